"""Bottom-up semantic class induction from distributional contexts.

Argument lemmas that occur in similar (headword, relation) slots are merged
agglomeratively; similarity is a count-weighted Jaccard over shared slots.
The merge order defines the hierarchy, which a human validates through a
decision file before classes are used for node typing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .deps import RELATION_LABELS, DependencyGraph

DEFAULT_SLOT_RELATIONS = frozenset({"Subject", "Object", "Prep", "NofN"})
DEFAULT_MERGE_THRESHOLD = 0.25


@dataclass(frozen=True)
class ContextTriple:
    headword: str
    relation: str
    argument: str
    count: int

    def __post_init__(self):
        if self.relation not in RELATION_LABELS:
            raise ValueError(f"unknown relation: {self.relation!r}")
        if self.count < 1:
            raise ValueError("count must be >= 1")


def collect_triples(graphs: list[DependencyGraph],
                    slot_relations: frozenset[str] = DEFAULT_SLOT_RELATIONS) -> list[ContextTriple]:
    """Aggregate (headword, relation, argument) occurrences over graphs."""
    counts: dict[tuple[str, str, str], int] = {}
    for graph in graphs:
        for h, d, label in graph.edges:
            if label not in slot_relations:
                continue
            key = (graph.nodes[h].lemma, label, graph.nodes[d].lemma)
            counts[key] = counts.get(key, 0) + 1
    return [ContextTriple(headword=h, relation=r, argument=a, count=c)
            for (h, r, a), c in sorted(counts.items())]


@dataclass
class SemanticClass:
    id: str
    members: frozenset[str]
    children: tuple[str, ...] = ()
    contexts: dict[tuple[str, str], int] = field(default_factory=dict)  # slot -> count
    validated: str = "pending"  # pending | accepted | rejected


@dataclass
class Hierarchy:
    classes: dict[str, SemanticClass]
    roots: list[str]
    merge_sequence: list[tuple[str, str, float]] = field(default_factory=list)

    def depth(self, class_id: str) -> int:
        d = 0
        cls = self.classes[class_id]
        while cls.children:
            d += 1
            cls = self.classes[cls.children[0]]
        return d

    def to_json_obj(self) -> dict:
        return {
            "classes": [{"id": c.id, "members": sorted(c.members),
                         "children": list(c.children), "validated": c.validated,
                         "contexts": [[h, r, n] for (h, r), n in sorted(c.contexts.items())]}
                        for c in self.classes.values()],
            "roots": self.roots,
            "merge_sequence": [[a, b, s] for a, b, s in self.merge_sequence],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Hierarchy":
        classes = {}
        for c in obj["classes"]:
            classes[c["id"]] = SemanticClass(
                id=c["id"], members=frozenset(c["members"]),
                children=tuple(c["children"]), validated=c["validated"],
                contexts={(h, r): n for h, r, n in c.get("contexts", [])})
        return cls(classes=classes, roots=list(obj["roots"]),
                   merge_sequence=[tuple(m) for m in obj.get("merge_sequence", [])])


def slot_similarity(a: dict[tuple[str, str], int], b: dict[tuple[str, str], int]) -> float:
    """Count-weighted Jaccard: sum of min over shared slots / sum of max over all."""
    if not a or not b:
        return 0.0
    num = sum(min(a[s], b[s]) for s in a.keys() & b.keys())
    den = sum(max(a.get(s, 0), b.get(s, 0)) for s in a.keys() | b.keys())
    return num / den if den else 0.0


def _representative(cls: SemanticClass) -> str:
    return min(cls.members)


def cluster(triples: list[ContextTriple],
            threshold: float = DEFAULT_MERGE_THRESHOLD) -> Hierarchy:
    """Agglomerative merging of argument lemmas by context overlap.

    At each step the most similar pair with similarity >= threshold merges;
    ties break on the lexicographically smallest (representative) pair, so
    the result is independent of triple-list order.
    """
    lemmas = sorted({t.argument for t in triples})
    if len(lemmas) < 2:
        raise ValueError("need at least two distinct argument lemmas")

    classes: dict[str, SemanticClass] = {}
    for lemma in lemmas:
        contexts: dict[tuple[str, str], int] = {}
        for t in triples:
            if t.argument == lemma:
                slot = (t.headword, t.relation)
                contexts[slot] = contexts.get(slot, 0) + t.count
        classes[lemma] = SemanticClass(id=lemma, members=frozenset([lemma]), contexts=contexts)

    active = set(classes)
    merge_sequence: list[tuple[str, str, float]] = []
    next_id = 1
    while len(active) > 1:
        best = None
        for a in sorted(active, key=lambda i: _representative(classes[i])):
            for b in sorted(active, key=lambda i: _representative(classes[i])):
                ra, rb = _representative(classes[a]), _representative(classes[b])
                if ra >= rb:
                    continue
                sim = slot_similarity(classes[a].contexts, classes[b].contexts)
                if sim < threshold:
                    continue
                key = (-sim, ra, rb)
                if best is None or key < best[0]:
                    best = (key, a, b, sim)
        if best is None:
            break
        _, a, b, sim = best
        merged_contexts = dict(classes[a].contexts)
        for slot, n in classes[b].contexts.items():
            merged_contexts[slot] = merged_contexts.get(slot, 0) + n
        new_id = f"c{next_id}"
        next_id += 1
        classes[new_id] = SemanticClass(
            id=new_id, members=classes[a].members | classes[b].members,
            children=(a, b), contexts=merged_contexts)
        active -= {a, b}
        active.add(new_id)
        merge_sequence.append((a, b, sim))

    return Hierarchy(classes=classes, roots=sorted(active), merge_sequence=merge_sequence)


def apply_validation(hierarchy: Hierarchy, decisions: list[tuple[str, str]]) -> Hierarchy:
    """Mark classes accepted/rejected; unknown ids are an error."""
    for class_id, status in decisions:
        if class_id not in hierarchy.classes:
            raise KeyError(f"unknown class id: {class_id!r}")
        if status not in ("accepted", "rejected"):
            raise ValueError(f"bad decision {status!r} for {class_id!r}")
        hierarchy.classes[class_id].validated = status
    return hierarchy


def most_specific_class(hierarchy: Hierarchy, lemma: str) -> str | None:
    """Deepest accepted class containing the lemma (rejected merges excluded)."""
    best = None
    best_size = None
    for cls in hierarchy.classes.values():
        if cls.validated != "accepted" or lemma not in cls.members:
            continue
        if _has_rejected_descendant_path(hierarchy, cls):
            continue
        if best_size is None or len(cls.members) < best_size or (
                len(cls.members) == best_size and cls.id < best):
            best, best_size = cls.id, len(cls.members)
    return best


def _has_rejected_descendant_path(hierarchy: Hierarchy, cls: SemanticClass) -> bool:
    stack = list(cls.children)
    while stack:
        ch = hierarchy.classes[stack.pop()]
        if ch.validated == "rejected":
            return True
        stack.extend(ch.children)
    return False


def type_nodes(graph: DependencyGraph, hierarchy: Hierarchy) -> DependencyGraph:
    """Assign the most specific accepted class id to each typable node."""
    for node in graph.nodes:
        node.sem_class = most_specific_class(hierarchy, node.lemma)
    return graph


def read_decisions(path: str | Path) -> list[tuple[str, str]]:
    decisions = []
    for raw in Path(path).read_text("utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        class_id, _, status = line.partition("\t")
        decisions.append((class_id.strip(), status.strip()))
    return decisions


def write_triples(triples: list[ContextTriple], path: str | Path) -> None:
    lines = [f"{t.headword}\t{t.relation}\t{t.argument}\t{t.count}" for t in triples]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")


def read_triples(path: str | Path) -> list[ContextTriple]:
    triples = []
    for raw in Path(path).read_text("utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        h, r, a, c = line.split("\t")
        triples.append(ContextTriple(headword=h, relation=r, argument=a, count=int(c)))
    return triples
