"""Extraction-rule learning over normalized sentence graphs.

Relational examples (graph + candidate agent/target pair) are flattened to
boolean feature vectors (bounded dependency paths, interaction-verb classes,
semantic classes, order), then conjunctive rules are learned per regulation
type by greedy set covering and evaluated with stratified k-fold CV.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .annotations import InteractionFrame
from .corpus import Sentence
from .deps import DependencyGraph
from .ner import GeneMention
from .semclass import Hierarchy, most_specific_class

REGULATION_FROM_ANNOTATION = {"activate": "positive", "inhibit": "negative", "unknown": "unknown"}

DEFAULT_PATH_LENGTH = 3
DEFAULT_NOISE_BUDGET = 0
DEFAULT_MAX_LITERALS = 4
DEFAULT_NEG_WEIGHT = 2.0


def load_interaction_classes(path: str | Path | None = None) -> dict[str, str]:
    """verb lemma -> interaction class (activation/inhibition)."""
    if path is None:
        text = resources.files("genic.data").joinpath("interaction_verbs.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    classes = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lemma, _, cls = line.partition("\t")
        classes[lemma.strip()] = cls.strip()
    return classes


@dataclass
class RelationalExample:
    graph: DependencyGraph
    agent: GeneMention
    target: GeneMention
    is_positive: bool
    regulation: str = "unknown"  # positive | negative | unknown (only meaningful when positive)

    @property
    def ref(self) -> tuple:
        return (*self.graph.sentence_ref, self.agent.token_range, self.target.token_range)


@dataclass
class BuildReport:
    skipped_spans: int = 0
    warnings: list[str] = field(default_factory=list)


def _mention_char_span(sentence: Sentence, mention: GeneMention) -> tuple[int, int]:
    first, last = mention.token_range
    return (sentence.tokens[first].span[0], sentence.tokens[last].span[1])


def _match_span_to_mention(sentence: Sentence, mentions: list[GeneMention],
                           inner: tuple[int, int]) -> GeneMention | None:
    text = sentence.text[inner[0]:inner[1]]
    stripped = text.strip()
    start = inner[0] + (len(text) - len(text.lstrip()))
    end = start + len(stripped)
    for m in mentions:
        if _mention_char_span(sentence, m) == (start, end):
            return m
    for m in mentions:
        if m.surface == stripped:
            return m
    return None


def build_examples(annotated: list[tuple[Sentence, list[InteractionFrame]]],
                   graphs: dict[tuple[str, int], DependencyGraph],
                   mentions: dict[tuple[str, int], list[GeneMention]],
                   report: BuildReport | None = None) -> list[RelationalExample]:
    """Positives from frames, negatives from every other ordered gene pair."""
    if report is None:
        report = BuildReport()
    examples: list[RelationalExample] = []
    for sentence, frames in annotated:
        ref = (sentence.doc_id, sentence.index)
        if ref not in graphs:
            raise ValueError(f"no dependency graph for sentence {ref}")
        graph = graphs[ref]
        sent_mentions = mentions.get(ref, [])
        positive_pairs: dict[tuple[tuple[int, int], tuple[int, int]], str] = {}
        for frame in frames:
            regulation = REGULATION_FROM_ANNOTATION.get(
                frame.attrs.get("regulation", "unknown"), "unknown")
            agents, targets = [], []
            for span in frame.spans:
                if span.role not in ("agent", "target"):
                    continue
                m = _match_span_to_mention(sentence, sent_mentions, span.inner)
                if m is None:
                    report.skipped_spans += 1
                    report.warnings.append(
                        f"{ref}: {span.role} span {span.inner} matches no gene mention")
                    continue
                (agents if span.role == "agent" else targets).append(m)
            for a in agents:
                for t in targets:
                    if a.token_range == t.token_range:
                        continue
                    positive_pairs[(a.token_range, t.token_range)] = regulation

        by_range = {m.token_range: m for m in sent_mentions}
        for (a_range, t_range), regulation in sorted(positive_pairs.items()):
            examples.append(RelationalExample(graph=graph, agent=by_range[a_range],
                                              target=by_range[t_range],
                                              is_positive=True, regulation=regulation))
        for a in sent_mentions:
            for t in sent_mentions:
                if a.token_range == t.token_range:
                    continue
                if (a.token_range, t.token_range) in positive_pairs:
                    continue
                examples.append(RelationalExample(graph=graph, agent=a, target=t,
                                                  is_positive=False))
    return examples


# ------------------------------------------------------------- features

def compute_features(example: RelationalExample,
                     max_path_length: int = DEFAULT_PATH_LENGTH,
                     interaction_classes: dict[str, str] | None = None,
                     hierarchy: Hierarchy | None = None) -> frozenset[str]:
    """All features of an example (dictionary filtering happens separately)."""
    if interaction_classes is None:
        interaction_classes = load_interaction_classes()
    graph = example.graph
    agent_node = graph.node_for_token(example.agent.token_range[0])
    target_node = graph.node_for_token(example.target.token_range[0])
    features: set[str] = set()
    if agent_node is None or target_node is None:
        return frozenset(features)

    if example.agent.token_range[0] < example.target.token_range[0]:
        features.add("agent_before_target")

    # adjacency with direction: up = dependent->head, down = head->dependent
    adj: dict[int, list[tuple[int, str]]] = {}
    for h, d, label in sorted(graph.edges):
        adj.setdefault(d, []).append((h, f"{label}^"))
        adj.setdefault(h, []).append((d, f"{label}v"))

    paths = _simple_paths(adj, agent_node.index, target_node.index, max_path_length)
    for node_seq, label_seq in paths:
        features.add("path:" + ".".join(label_seq))
        for idx in node_seq[1:-1]:
            lemma = graph.nodes[idx].lemma
            cls = interaction_classes.get(lemma)
            if cls is not None:
                features.add(f"pathclass:{cls}")
            if hierarchy is not None:
                sem = most_specific_class(hierarchy, lemma)
                if sem is not None:
                    features.add(f"pathnodeclass:{sem}")

    if hierarchy is not None:
        for prefix, node in (("agentclass", agent_node), ("targetclass", target_node)):
            sem = node.sem_class or most_specific_class(hierarchy, node.lemma)
            if sem is not None:
                features.add(f"{prefix}:{sem}")
    return frozenset(features)


def _simple_paths(adj, start: int, goal: int, max_len: int):
    out = []
    stack = [(start, [start], [])]
    while stack:
        node, node_seq, label_seq = stack.pop()
        if node == goal and label_seq:
            out.append((node_seq, label_seq))
            continue
        if len(label_seq) >= max_len:
            continue
        for nxt, label in adj.get(node, ()):
            if nxt in node_seq:
                continue
            stack.append((nxt, node_seq + [nxt], label_seq + [label]))
    return out


def build_dictionary(vectors: list[frozenset[str]]) -> frozenset[str]:
    return frozenset().union(*vectors) if vectors else frozenset()


def propositionalize(features: frozenset[str], dictionary: frozenset[str]) -> frozenset[str]:
    """Restrict an example's features to the (training-fold) dictionary."""
    return features & dictionary


# ---------------------------------------------------------------- rules

@dataclass
class ExtractionRule:
    literals: tuple[str, ...]  # conjunction of feature names
    regulation: str
    pos_covered: int
    neg_covered: int

    @property
    def precision(self) -> float:
        total = self.pos_covered + self.neg_covered
        return self.pos_covered / total if total else 0.0

    def matches(self, features: frozenset[str]) -> bool:
        return all(lit in features for lit in self.literals)

    def to_json_obj(self) -> dict:
        return {"literals": list(self.literals), "regulation": self.regulation,
                "pos_covered": self.pos_covered, "neg_covered": self.neg_covered}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ExtractionRule":
        return cls(literals=tuple(obj["literals"]), regulation=obj["regulation"],
                   pos_covered=obj["pos_covered"], neg_covered=obj["neg_covered"])


def save_rules(rules: list[ExtractionRule], path: str | Path) -> None:
    Path(path).write_text(json.dumps({"format_version": 1,
                                      "rules": [r.to_json_obj() for r in rules]},
                                     indent=1, sort_keys=True), "utf-8")


def load_rules(path: str | Path) -> list[ExtractionRule]:
    obj = json.loads(Path(path).read_text("utf-8"))
    return [ExtractionRule.from_json_obj(r) for r in obj["rules"]]


def _grow_rule(pos: list[frozenset[str]], neg: list[frozenset[str]],
               features: list[str], neg_weight: float, max_literals: int,
               noise_budget: int) -> tuple[tuple[str, ...], int, int] | None:
    """Best-first conjunction growth; returns (literals, pos_cov, neg_cov)."""
    literals: list[str] = []
    pos_cov, neg_cov = list(pos), list(neg)

    def score(p: int, n: int) -> float:
        return p - neg_weight * n

    while len(literals) < max_literals:
        best = None
        current = score(len(pos_cov), len(neg_cov))
        for f in features:
            if f in literals:
                continue
            p = sum(1 for v in pos_cov if f in v)
            n = sum(1 for v in neg_cov if f in v)
            if p == 0:
                continue
            s = score(p, n)
            improves = s > current or (s == current and n < len(neg_cov))
            if improves and (best is None or (-(s), n, f) < best[0]):
                best = ((-(s), n, f), f, p, n)
        if best is None:
            break
        _, f, p, n = best
        literals.append(f)
        pos_cov = [v for v in pos_cov if f in v]
        neg_cov = [v for v in neg_cov if f in v]
        if len(neg_cov) <= noise_budget:
            break

    if not literals or len(neg_cov) > noise_budget:
        return None
    if score(len(pos_cov), len(neg_cov)) <= 0:
        return None
    return tuple(literals), len(pos_cov), len(neg_cov)


def learn_rules(training: list[tuple[frozenset[str], bool, str]],
                noise_budget: int = DEFAULT_NOISE_BUDGET,
                max_literals: int = DEFAULT_MAX_LITERALS,
                neg_weight: float = DEFAULT_NEG_WEIGHT) -> list[ExtractionRule]:
    """Greedy set covering over (features, is_positive, regulation) triples.

    Rules come out ordered by training precision (then coverage), which is
    also their application order.
    """
    positives = [(v, reg) for v, is_pos, reg in training if is_pos]
    if not positives:
        raise ValueError("no positive examples")
    negatives = [v for v, is_pos, _ in training if not is_pos]

    rules: list[ExtractionRule] = []
    for regulation in sorted({reg for _, reg in positives}):
        pos = [v for v, reg in positives if reg == regulation]
        neg = negatives + [v for v, reg in positives if reg != regulation]
        features = sorted(frozenset().union(*pos))
        remaining = list(pos)
        while remaining:
            grown = _grow_rule(remaining, neg, features, neg_weight, max_literals,
                               noise_budget)
            if grown is None:
                break
            literals, _, neg_cov = grown
            total_pos = sum(1 for v in pos if all(l in v for l in literals))
            rules.append(ExtractionRule(literals=literals, regulation=regulation,
                                        pos_covered=total_pos, neg_covered=neg_cov))
            remaining = [v for v in remaining if not all(l in v for l in literals)]

    rules.sort(key=lambda r: (-r.precision, -r.pos_covered, r.regulation, r.literals))
    return rules


def match_rule_applications(rules: list[ExtractionRule], graph: DependencyGraph,
                            mentions: list[GeneMention],
                            max_path_length: int = DEFAULT_PATH_LENGTH,
                            interaction_classes: dict[str, str] | None = None,
                            hierarchy: Hierarchy | None = None
                            ) -> list[tuple[int, GeneMention, GeneMention]]:
    """Every ordered gene pair tested against the ordered rules; first match wins."""
    hits = []
    for a in mentions:
        for t in mentions:
            if a.token_range == t.token_range:
                continue
            example = RelationalExample(graph=graph, agent=a, target=t, is_positive=False)
            features = compute_features(example, max_path_length, interaction_classes,
                                        hierarchy)
            for i, rule in enumerate(rules):
                if rule.matches(features):
                    hits.append((i, a, t))
                    break
    return hits


def apply_rules(rules: list[ExtractionRule], graph: DependencyGraph,
                mentions: list[GeneMention],
                max_path_length: int = DEFAULT_PATH_LENGTH,
                interaction_classes: dict[str, str] | None = None,
                hierarchy: Hierarchy | None = None) -> list[tuple[str, str, str]]:
    """Unique (regulation, agent_canonical, target_canonical) triples."""
    triples: list[tuple[str, str, str]] = []
    seen = set()
    for i, a, t in match_rule_applications(rules, graph, mentions, max_path_length,
                                           interaction_classes, hierarchy):
        triple = (rules[i].regulation, a.canonical, t.canonical)
        if triple not in seen:
            seen.add(triple)
            triples.append(triple)
    return triples


# ------------------------------------------------------------ evaluation

@dataclass
class CVReport:
    fold_precision: list[float]
    fold_recall: list[float]

    @property
    def precision(self) -> tuple[float, float]:
        return mean_std(self.fold_precision)

    @property
    def recall(self) -> tuple[float, float]:
        return mean_std(self.fold_recall)

    def to_json_obj(self) -> dict:
        pm, ps = self.precision
        rm, rs = self.recall
        return {"folds": [{"precision": p, "recall": r}
                          for p, r in zip(self.fold_precision, self.fold_recall)],
                "precision": {"mean": pm, "std": ps},
                "recall": {"mean": rm, "std": rs}}

    def to_text(self) -> str:
        pm, ps = self.precision
        rm, rs = self.recall
        lines = ["fold  precision  recall"]
        for i, (p, r) in enumerate(zip(self.fold_precision, self.fold_recall), 1):
            lines.append(f"{i:>4}  {p:9.3f}  {r:6.3f}")
        lines.append(f"mean  {pm:.3f} +/- {ps:.3f}  {rm:.3f} +/- {rs:.3f}")
        return "\n".join(lines)


def mean_std(values: list[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (n-1 denominator)."""
    n = len(values)
    if n == 0:
        raise ValueError("no values")
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def stratified_folds(examples: list[RelationalExample], k: int,
                     seed: int) -> list[list[RelationalExample]]:
    """Partition into k folds preserving the positive ratio within +/-1."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(examples) < k:
        raise ValueError("fewer examples than folds")
    positives = [e for e in examples if e.is_positive]
    negatives = [e for e in examples if not e.is_positive]
    if len(positives) < k:
        raise ValueError(f"only {len(positives)} positives for {k} folds; use a smaller k")
    rng = random.Random(seed)
    rng.shuffle(positives)
    rng.shuffle(negatives)
    folds: list[list[RelationalExample]] = [[] for _ in range(k)]
    for i, e in enumerate(positives):
        folds[i % k].append(e)
    for i, e in enumerate(negatives):
        folds[i % k].append(e)
    return folds


def cross_validate(examples: list[RelationalExample], k: int = 10, seed: int = 0,
                   max_path_length: int = DEFAULT_PATH_LENGTH,
                   noise_budget: int = DEFAULT_NOISE_BUDGET,
                   max_literals: int = DEFAULT_MAX_LITERALS,
                   neg_weight: float = DEFAULT_NEG_WEIGHT,
                   interaction_classes: dict[str, str] | None = None,
                   hierarchy: Hierarchy | None = None) -> CVReport:
    """Stratified k-fold CV; the feature dictionary is rebuilt per fold."""
    if interaction_classes is None:
        interaction_classes = load_interaction_classes()
    folds = stratified_folds(examples, k, seed)
    fold_precision, fold_recall = [], []
    for i in range(k):
        test = folds[i]
        train = [e for j, fold in enumerate(folds) if j != i for e in fold]
        train_feats = [compute_features(e, max_path_length, interaction_classes, hierarchy)
                       for e in train]
        dictionary = build_dictionary(train_feats)
        rules = learn_rules(
            [(propositionalize(f, dictionary), e.is_positive, e.regulation)
             for f, e in zip(train_feats, train)],
            noise_budget=noise_budget, max_literals=max_literals, neg_weight=neg_weight)

        tp = fp = 0
        gold_pos = sum(1 for e in test if e.is_positive)
        for e in test:
            features = propositionalize(
                compute_features(e, max_path_length, interaction_classes, hierarchy),
                dictionary)
            predicted = None
            for rule in rules:
                if rule.matches(features):
                    predicted = rule.regulation
                    break
            if predicted is None:
                continue
            if e.is_positive and e.regulation == predicted:
                tp += 1
            else:
                fp += 1
        fold_precision.append(tp / (tp + fp) if tp + fp else 1.0)
        fold_recall.append(tp / gold_pos if gold_pos else 1.0)
    return CVReport(fold_precision=fold_precision, fold_recall=fold_recall)
