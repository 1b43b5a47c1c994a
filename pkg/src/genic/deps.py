"""Rule-cascade dependency analysis over a 12-relation inventory.

The cascade is a deterministic, linear-time pass over POS-tagged and
term-merged sentences. It tolerates missing determiners and defaults
unknown words to nouns, which is the right bias for biomedical abstracts.
Coordination distribution and passive normalization are separate passes
that only add edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .corpus import Sentence, TokenKind

RELATION_LABELS = (
    "Subject", "Object", "Prep", "V-GP", "O-GP", "NofN",
    "VtoV", "VcooV", "NcooN", "nV-Adj", "PaSim", "PaRel",
)


class Tag(str, Enum):
    NOUN = "noun"
    VERB = "verb"
    ADJECTIVE = "adjective"
    ADVERB = "adverb"
    PREPOSITION = "preposition"
    DETERMINER = "determiner"
    CONJUNCTION = "conjunction"
    PRONOUN = "pronoun"
    PUNCTUATION = "punctuation"
    OTHER = "other"


_BE_FORMS = {"be", "is", "are", "was", "were", "been", "being", "am"}
_IRREGULAR_PARTICIPLES = {"done", "known", "found", "shown", "given", "made", "seen", "bound"}
_REL_PRONOUNS = {"that", "which", "who"}


class TagLexicon:
    """word -> POS lookup with inflection stripping for verbs."""

    def __init__(self, words: dict[str, Tag]):
        self.words = words
        self.verb_stems = {w for w, t in words.items() if t == Tag.VERB}

    @classmethod
    def from_file(cls, path: str | Path | None = None) -> "TagLexicon":
        if path is None:
            text = resources.files("genic.data").joinpath("tag_lexicon.tsv").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        words = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            word, _, tag = line.partition("\t")
            words[word.strip().lower()] = Tag(tag.strip())
        return cls(words)

    def _verb_stem(self, w: str) -> str | None:
        if w in self.verb_stems:
            return w
        for strip, restore in (("s", ""), ("es", ""), ("ed", ""), ("ed", "e"),
                               ("d", ""), ("ing", ""), ("ing", "e")):
            if w.endswith(strip) and len(w) > len(strip) + 1:
                cand = w[: len(w) - len(strip)] + restore
                if cand in self.verb_stems:
                    return cand
        return None

    def lookup(self, word: str) -> tuple[Tag | None, bool]:
        """Return (tag, known) where known means lexicon or suffix evidence."""
        w = word.lower()
        if w in self.words:
            return self.words[w], True
        if self._verb_stem(w) is not None:
            return Tag.VERB, True
        for suffix, tag in (("tion", Tag.NOUN), ("sion", Tag.NOUN), ("ment", Tag.NOUN),
                            ("ness", Tag.NOUN), ("ly", Tag.ADVERB), ("ous", Tag.ADJECTIVE),
                            ("ive", Tag.ADJECTIVE), ("ical", Tag.ADJECTIVE)):
            if w.endswith(suffix) and len(w) > len(suffix) + 2:
                return tag, True
        return None, False

    def lemma(self, word: str, tag: Tag) -> str:
        w = word.lower()
        if tag == Tag.VERB:
            stem = self._verb_stem(w)
            if stem is not None:
                return stem
            for strip in ("ing", "ed", "es", "s"):
                if w.endswith(strip) and len(w) > len(strip) + 1:
                    return w[: len(w) - len(strip)]
            return w
        if tag == Tag.NOUN and len(w) > 3:
            if w.endswith("ies"):
                return w[:-3] + "y"
            if w.endswith("s") and not w.endswith(("ss", "us", "is")):
                return w[:-1]
        return w


_DEFAULT_TAG_LEXICON: TagLexicon | None = None


def default_tag_lexicon() -> TagLexicon:
    global _DEFAULT_TAG_LEXICON
    if _DEFAULT_TAG_LEXICON is None:
        _DEFAULT_TAG_LEXICON = TagLexicon.from_file()
    return _DEFAULT_TAG_LEXICON


@dataclass
class TermMerge:
    start: int  # token indices, inclusive
    end: int
    head: int
    tag: Tag


@dataclass
class PosTaggedSentence:
    sentence: Sentence
    tags: list[Tag]
    term_merges: list[TermMerge] = field(default_factory=list)

    @property
    def sentence_ref(self) -> tuple[str, int]:
        return (self.sentence.doc_id, self.sentence.index)


def pos_tag(sentence: Sentence, lexicon: TagLexicon | None = None) -> PosTaggedSentence:
    """Lexicon lookup, then suffix rules; unknown words default to noun."""
    if lexicon is None:
        lexicon = default_tag_lexicon()
    tags = []
    for tok in sentence.tokens:
        if tok.kind == TokenKind.PUNCTUATION:
            tags.append(Tag.PUNCTUATION)
        elif tok.kind == TokenKind.SYMBOL:
            tags.append(Tag.OTHER)
        else:
            tag, _ = lexicon.lookup(tok.text)
            tags.append(tag if tag is not None else Tag.NOUN)
    return PosTaggedSentence(sentence=sentence, tags=tags)


class TermLexicon:
    """Multiword terms collapsed to single units. Lines: `term[<TAB>tag]`."""

    def __init__(self, terms: dict[tuple[str, ...], Tag] | None = None):
        self.terms = terms or {}
        self.max_len = max((len(k) for k in self.terms), default=0)

    def add(self, term: str, tag: Tag = Tag.NOUN) -> None:
        key = tuple(term.lower().split())
        if len(key) < 2:
            raise ValueError(f"term {term!r} is not multiword")
        self.terms[key] = tag
        self.max_len = max(self.max_len, len(key))

    @classmethod
    def from_file(cls, path: str | Path) -> "TermLexicon":
        lex = cls()
        for raw in Path(path).read_text("utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            term, _, tag = line.partition("\t")
            lex.add(term.strip(), Tag(tag.strip()) if tag.strip() else Tag.NOUN)
        return lex


def merge_terms(tagged: PosTaggedSentence, term_lexicon: TermLexicon | None = None,
                tag_lexicon: TagLexicon | None = None) -> PosTaggedSentence:
    """Collapse multiword terms, Latin species names, and gene parentheticals.

    Species rule: a capitalized genus-looking word followed by an unknown
    lowercase epithet merges even without a lexicon entry. Parenthetical
    rule: `noun ( noun )` merges into one unit headed by the inner noun,
    so "the gene (sigK)" resolves to sigK.
    """
    if term_lexicon is None:
        term_lexicon = TermLexicon()
    if tag_lexicon is None:
        tag_lexicon = default_tag_lexicon()
    toks = tagged.sentence.tokens
    tags = tagged.tags
    merges: list[TermMerge] = []
    taken = set()

    def claim(merge: TermMerge) -> None:
        merges.append(merge)
        taken.update(range(merge.start, merge.end + 1))

    # longest-match lexicon terms
    i = 0
    n = len(toks)
    while i < n:
        matched = None
        for width in range(min(term_lexicon.max_len, n - i), 1, -1):
            if any(j in taken for j in range(i, i + width)):
                continue
            key = tuple(t.text.lower() for t in toks[i:i + width])
            tag = term_lexicon.terms.get(key)
            if tag is not None:
                matched = (width, tag)
                break
        if matched is not None:
            width, tag = matched
            claim(TermMerge(start=i, end=i + width - 1, head=i + width - 1, tag=tag))
            i += width
        else:
            i += 1

    # Latin species names: "Bacillus subtilis"
    for i in range(n - 1):
        if i in taken or i + 1 in taken:
            continue
        a, b = toks[i].text, toks[i + 1].text
        if not (len(a) >= 3 and a[0].isupper() and a[1:].islower() and a.isalpha()):
            continue
        if not (len(b) >= 3 and b.islower() and b.isalpha()):
            continue
        _, a_known = tag_lexicon.lookup(a)
        _, b_known = tag_lexicon.lookup(b)
        if not a_known and not b_known:
            claim(TermMerge(start=i, end=i + 1, head=i, tag=Tag.NOUN))

    # parenthetical apposition: noun ( noun )
    for i in range(n - 3):
        if any(j in taken for j in (i, i + 1, i + 2, i + 3)):
            continue
        if (tags[i] == Tag.NOUN and toks[i + 1].text == "("
                and tags[i + 2] == Tag.NOUN and toks[i + 3].text == ")"):
            claim(TermMerge(start=i, end=i + 3, head=i + 2, tag=Tag.NOUN))

    merges.sort(key=lambda m: m.start)
    return PosTaggedSentence(sentence=tagged.sentence, tags=list(tags), term_merges=merges)


@dataclass
class Node:
    index: int
    token_range: tuple[int, int]  # inclusive token indices
    head_token: int
    text: str
    lemma: str
    tag: Tag
    sem_class: str | None = None


@dataclass
class DependencyGraph:
    sentence_ref: tuple[str, int]
    nodes: list[Node]
    edges: set[tuple[int, int, str]] = field(default_factory=set)
    pp_preps: dict[tuple[int, int, str], str] = field(default_factory=dict)

    def add_edge(self, head: int, dep: int, label: str, prep: str | None = None) -> None:
        if label not in RELATION_LABELS:
            raise ValueError(f"unknown relation label: {label!r}")
        self.edges.add((head, dep, label))
        if prep is not None:
            self.pp_preps[(head, dep, label)] = prep

    def node_for_token(self, token_index: int) -> Node | None:
        for node in self.nodes:
            if node.token_range[0] <= token_index <= node.token_range[1]:
                return node
        return None

    def to_json_obj(self) -> dict:
        return {
            "sentence_ref": list(self.sentence_ref),
            "nodes": [{"index": nd.index, "range": list(nd.token_range), "head": nd.head_token,
                       "text": nd.text, "lemma": nd.lemma, "tag": nd.tag.value,
                       "sem_class": nd.sem_class}
                      for nd in self.nodes],
            "edges": sorted([h, d, label] for h, d, label in self.edges),
            "pp_preps": [{"edge": list(k), "prep": v} for k, v in sorted(self.pp_preps.items())],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "DependencyGraph":
        graph = cls(sentence_ref=tuple(obj["sentence_ref"]),
                    nodes=[Node(index=nd["index"], token_range=tuple(nd["range"]),
                                head_token=nd["head"], text=nd["text"], lemma=nd["lemma"],
                                tag=Tag(nd["tag"]), sem_class=nd.get("sem_class"))
                           for nd in obj["nodes"]])
        for h, d, label in obj["edges"]:
            graph.edges.add((h, d, label))
        for item in obj.get("pp_preps", []):
            graph.pp_preps[tuple(item["edge"])] = item["prep"]
        return graph


def build_units(tagged: PosTaggedSentence, tag_lexicon: TagLexicon | None = None) -> list[Node]:
    if tag_lexicon is None:
        tag_lexicon = default_tag_lexicon()
    toks = tagged.sentence.tokens
    merge_at = {m.start: m for m in tagged.term_merges}
    nodes = []
    i = 0
    while i < len(toks):
        merge = merge_at.get(i)
        if merge is not None:
            head_tok = toks[merge.head]
            text = tagged.sentence.text[toks[merge.start].span[0]:toks[merge.end].span[1]]
            nodes.append(Node(index=len(nodes), token_range=(merge.start, merge.end),
                              head_token=merge.head, text=text,
                              lemma=tag_lexicon.lemma(head_tok.text, merge.tag), tag=merge.tag))
            i = merge.end + 1
        else:
            tag = tagged.tags[i]
            nodes.append(Node(index=len(nodes), token_range=(i, i), head_token=i,
                              text=toks[i].text, lemma=tag_lexicon.lemma(toks[i].text, tag),
                              tag=tag))
            i += 1
    return nodes


def _is_participle(node: Node) -> bool:
    return node.text.lower().endswith("ed") or node.text.lower() in _IRREGULAR_PARTICIPLES


def extract_relations(tagged: PosTaggedSentence,
                      tag_lexicon: TagLexicon | None = None) -> DependencyGraph:
    """Single left-to-right cascade emitting surface relations."""
    nodes = build_units(tagged, tag_lexicon)
    graph = DependencyGraph(sentence_ref=tagged.sentence_ref, nodes=nodes)

    # noun groups: maximal det/adj/noun runs, head = last noun
    group_at: dict[int, tuple[int, int]] = {}  # start -> (end, head)
    i = 0
    while i < len(nodes):
        if nodes[i].tag in (Tag.DETERMINER, Tag.ADJECTIVE, Tag.NOUN):
            j = i
            last_noun = None
            while j < len(nodes) and nodes[j].tag in (Tag.DETERMINER, Tag.ADJECTIVE, Tag.NOUN):
                if nodes[j].tag == Tag.NOUN:
                    last_noun = j
                j += 1
            if last_noun is not None:
                group_at[i] = (j - 1, last_noun)
            i = j
        else:
            i += 1

    last_ng_head: int | None = None
    current_verb: int | None = None
    chain_head: int | None = None
    current_object: int | None = None
    pending_conj = False
    conj_left_noun: int | None = None
    pending_be: int | None = None
    be_subject: int | None = None
    rel_antecedent: int | None = None  # noun modified by a pending relative pronoun
    whose_antecedent: int | None = None

    def find_subject(k: int) -> tuple[int | None, int | None]:
        """Subject for a verb at position k; returns (subject, relative antecedent)."""
        p = k - 1
        while p >= 0 and nodes[p].tag == Tag.ADVERB:
            p -= 1
        if p >= 0 and nodes[p].tag == Tag.PRONOUN and nodes[p].lemma in _REL_PRONOUNS:
            q = p - 1
            while q >= 0 and nodes[q].tag == Tag.PUNCTUATION:
                q -= 1
            if q >= 0 and nodes[q].tag == Tag.NOUN:
                return q, q
        return last_ng_head, None

    k = 0
    while k < len(nodes):
        node = nodes[k]
        tag = node.tag

        if tag == Tag.PUNCTUATION:
            if node.text in ".;":
                current_verb = chain_head = current_object = None
                pending_conj = False
                last_ng_head = None
            k += 1
            continue

        if tag == Tag.CONJUNCTION:
            if node.lemma == "but":
                current_verb = chain_head = current_object = None
                pending_conj = False
            else:
                pending_conj = True
                conj_left_noun = last_ng_head
            k += 1
            continue

        if tag == Tag.PRONOUN and node.lemma == "whose":
            q = k - 1
            while q >= 0 and nodes[q].tag == Tag.PUNCTUATION:
                q -= 1
            whose_antecedent = q if q >= 0 and nodes[q].tag == Tag.NOUN else None
            k += 1
            continue

        if tag == Tag.VERB:
            prev = k - 1
            while prev >= 0 and nodes[prev].tag == Tag.ADVERB and nodes[prev].lemma != "not":
                prev -= 1
            prev_node = nodes[prev] if prev >= 0 else None

            if node.text.lower() in _BE_FORMS:
                pending_be = k
                be_subject, rel_antecedent = find_subject(k)
                if whose_antecedent is not None and be_subject is None:
                    be_subject = whose_antecedent
                current_verb = k
                current_object = None
                k += 1
                continue

            if pending_be is not None and _is_participle(node):
                # passive: surface subject hangs off the participle
                if rel_antecedent is not None:
                    if be_subject is not None:
                        graph.add_edge(k, be_subject, "PaRel")
                else:
                    if be_subject is not None:
                        graph.add_edge(k, be_subject, "PaSim")
                if prev_node is not None and prev_node.lemma == "not":
                    graph.add_edge(k, prev, "nV-Adj")
                current_verb = k
                if chain_head is None:
                    chain_head = k
                current_object = None
                pending_be = None
                rel_antecedent = None
                k += 1
                continue
            pending_be = None

            if prev_node is not None and prev_node.lemma == "to" and current_verb is not None:
                graph.add_edge(current_verb, k, "VtoV")
                current_verb = k
                current_object = None
                k += 1
                continue

            if pending_conj and (chain_head is not None or current_verb is not None):
                graph.add_edge(chain_head if chain_head is not None else current_verb, k, "VcooV")
                pending_conj = False
                current_verb = k
                current_object = None
                if prev_node is not None and prev_node.lemma == "not":
                    graph.add_edge(k, prev, "nV-Adj")
                k += 1
                continue
            pending_conj = False

            subject, antecedent = find_subject(k)
            if whose_antecedent is not None:
                # "X, whose Y verbs ...": the inner noun is the subject and
                # stands in an of-relation to the antecedent
                if last_ng_head is not None:
                    graph.add_edge(k, last_ng_head, "Subject")
                    graph.add_edge(last_ng_head, whose_antecedent, "NofN")
                whose_antecedent = None
            elif subject is not None:
                graph.add_edge(k, subject, "Subject")
            if prev_node is not None and prev_node.lemma == "not":
                graph.add_edge(k, prev, "nV-Adj")
            current_verb = k
            if chain_head is None:
                chain_head = k
            current_object = None
            k += 1
            continue

        if tag == Tag.ADJECTIVE and k not in group_at:
            prev = k - 1
            if prev >= 0 and nodes[prev].lemma == "not":
                graph.add_edge(k, prev, "nV-Adj")
            k += 1
            continue

        if k in group_at:
            end, head = group_at[k]
            for m in range(k, end + 1):
                if m != head and nodes[m].tag == Tag.NOUN:
                    graph.add_edge(head, m, "NofN")
            prev = k - 1
            while prev >= 0 and nodes[prev].tag == Tag.ADVERB:
                prev -= 1
            attached = False
            if prev >= 0 and nodes[prev].tag == Tag.PREPOSITION:
                prep = nodes[prev].lemma
                before = prev - 1
                while before >= 0 and nodes[before].tag == Tag.ADVERB:
                    before -= 1
                before_noun = before if before >= 0 and nodes[before].tag == Tag.NOUN else None
                if prep == "of" and before_noun is not None:
                    graph.add_edge(before_noun, head, "NofN", prep=prep)
                    attached = True
                elif current_object is not None and before_noun == current_object:
                    graph.add_edge(current_object, head, "O-GP", prep=prep)
                    attached = True
                elif current_verb is not None:
                    graph.add_edge(current_verb, head, "V-GP", prep=prep)
                    attached = True
                elif before_noun is not None:
                    graph.add_edge(before_noun, head, "Prep", prep=prep)
                    attached = True
            elif pending_conj and conj_left_noun is not None:
                graph.add_edge(conj_left_noun, head, "NcooN")
                pending_conj = False
                attached = True
            elif current_verb is not None and current_object is None:
                graph.add_edge(current_verb, head, "Object")
                current_object = head
                attached = True
            last_ng_head = head
            k = end + 1
            continue

        k += 1

    return graph


def distribute_coordination(graph: DependencyGraph) -> DependencyGraph:
    """Propagate shared dependents across coordinations (edge-adding, idempotent)."""
    changed = True
    while changed:
        changed = False
        for h, d, label in sorted(graph.edges):
            if label == "VcooV":
                has_subject = any(e[0] == d and e[2] == "Subject" for e in graph.edges)
                if not has_subject:
                    for h2, dep, lab in sorted(graph.edges):
                        if h2 == h and lab == "Subject":
                            graph.edges.add((d, dep, "Subject"))
                            changed = True
            elif label == "NcooN":
                for head, dep, lab in sorted(graph.edges):
                    if dep == h and lab != "NcooN":
                        edge = (head, d, lab)
                        if edge not in graph.edges:
                            graph.edges.add(edge)
                            if (head, h, lab) in graph.pp_preps:
                                graph.pp_preps[edge] = graph.pp_preps[(head, h, lab)]
                            changed = True
    return graph


def normalize_passive(graph: DependencyGraph) -> DependencyGraph:
    """Add canonical Subject/Object edges for passive constructions."""
    for h, d, label in sorted(graph.edges):
        if label in ("PaSim", "PaRel"):
            graph.edges.add((h, d, "Object"))
            for h2, dep, lab in sorted(graph.edges):
                if h2 == h and lab == "V-GP" and graph.pp_preps.get((h2, dep, lab)) == "by":
                    graph.edges.add((h, dep, "Subject"))
    return graph


@dataclass
class EvaluationCounts:
    per_label: dict[str, tuple[int, int, int]]  # label -> (nbRel, relOK, RelTot)


def relation_metrics(nb_rel: int, rel_ok: int, rel_tot: int) -> tuple[float, float]:
    """(recall, precision) with the 0/0 -> 1.0 convention."""
    recall = rel_ok / nb_rel if nb_rel else 1.0
    precision = rel_ok / rel_tot if rel_tot else 1.0
    return recall, precision


GoldEdges = dict[tuple[str, int], list[tuple[str, str, str]]]  # ref -> (label, head, dep)


def read_gold_relations(path: str | Path) -> GoldEdges:
    """Read `doc_id<TAB>sent_idx<TAB>label<TAB>head_token<TAB>dependent_token` lines."""
    gold: GoldEdges = {}
    for raw in Path(path).read_text("utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        doc_id, sent_idx, label, head, dep = line.split("\t")
        gold.setdefault((doc_id, int(sent_idx)), []).append((label, head, dep))
    return gold


def graph_surface_edges(graph: DependencyGraph) -> list[tuple[str, str, str]]:
    out = []
    for h, d, label in graph.edges:
        head_node, dep_node = graph.nodes[h], graph.nodes[d]
        out.append((label, _head_word(head_node), _head_word(dep_node)))
    return out


def _head_word(node: Node) -> str:
    # single-token nodes: the token itself; merged nodes: the head token's lemma base
    return node.lemma


def evaluate_relations(gold: GoldEdges, predicted: list[DependencyGraph]):
    """Per-label recall/precision plus raw counts, exact (head, dep, label) match."""
    from collections import Counter

    pred_refs = {g.sentence_ref for g in predicted}
    if pred_refs != set(gold):
        missing = set(gold) ^ pred_refs
        raise ValueError(f"gold and predicted sentence sets differ: {sorted(missing)}")

    counts = {label: [0, 0, 0] for label in RELATION_LABELS}
    for graph in predicted:
        gold_edges = Counter((label, head.lower(), dep.lower())
                             for label, head, dep in gold[graph.sentence_ref])
        pred_edges = Counter((label, head.lower(), dep.lower())
                             for label, head, dep in graph_surface_edges(graph))
        hit = gold_edges & pred_edges
        for label in RELATION_LABELS:
            counts[label][0] += sum(c for (lab, _, _), c in gold_edges.items() if lab == label)
            counts[label][1] += sum(c for (lab, _, _), c in hit.items() if lab == label)
            counts[label][2] += sum(c for (lab, _, _), c in pred_edges.items() if lab == label)

    metrics = {label: relation_metrics(*counts[label]) for label in RELATION_LABELS}
    return metrics, EvaluationCounts(per_label={k: tuple(v) for k, v in counts.items()})
