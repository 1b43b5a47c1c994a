"""Agglomerative semantic class induction and validation."""

import random

import pytest

from genic.corpus import build_document
from genic.deps import extract_relations, merge_terms, pos_tag
from genic.semclass import (
    ContextTriple,
    Hierarchy,
    apply_validation,
    cluster,
    collect_triples,
    most_specific_class,
    read_decisions,
    read_triples,
    slot_similarity,
    type_nodes,
    write_triples,
)


def triple(h, r, a, c=1):
    return ContextTriple(headword=h, relation=r, argument=a, count=c)


def parse(text):
    sent = build_document("d", "", text).sentences[0]
    return extract_relations(merge_terms(pos_tag(sent)))


def test_triple_validation():
    with pytest.raises(ValueError):
        triple("x", "Dobj", "y")
    with pytest.raises(ValueError):
        triple("x", "Subject", "y", 0)


def test_collect_triples_aggregates_counts():
    graphs = [parse("GerE activates cotD ."), parse("GerE activates cotD .")]
    got = collect_triples(graphs)
    assert triple("activate", "Subject", "gere", 2) in got
    assert triple("activate", "Object", "cotd", 2) in got


def test_collect_triples_restricts_slots():
    graphs = [parse("cotD interacts in cells .")]
    got = collect_triples(graphs, slot_relations=frozenset({"Subject"}))
    assert got == [triple("interact", "Subject", "cotd")]


def test_slot_similarity_weighted_jaccard():
    a = {("bind", "Object"): 3, ("express", "Object"): 1}
    b = {("bind", "Object"): 1, ("cleave", "Object"): 2}
    # min-overlap 1 over max-union 3 + 1 + 2
    assert slot_similarity(a, b) == pytest.approx(1 / 6)
    assert slot_similarity({}, b) == 0.0
    assert slot_similarity(a, a) == 1.0


def test_cluster_merges_shared_contexts():
    triples = [
        triple("transcribe", "Object", "cotD", 2),
        triple("transcribe", "Object", "cotA", 2),
        triple("activate", "Object", "cotD", 1),
        triple("lyse", "Object", "wall", 5),
    ]
    hier = cluster(triples, threshold=0.25)
    merged = hier.classes["c1"]
    assert merged.members == frozenset({"cotA", "cotD"})
    assert "wall" in hier.roots
    assert hier.merge_sequence[0][:2] == ("cotA", "cotD")


def test_cluster_tie_breaks_on_representatives():
    # b/c and a/d have identical similarity; the (a, d) pair sorts first
    triples = [
        triple("f", "Subject", "a"), triple("f", "Subject", "d"),
        triple("g", "Subject", "b"), triple("g", "Subject", "c"),
    ]
    hier = cluster(triples, threshold=0.5)
    assert hier.merge_sequence[0][:2] == ("a", "d")
    assert hier.merge_sequence[1][:2] == ("b", "c")


def test_cluster_is_order_independent():
    triples = [
        triple("p", "Object", "x", 2), triple("p", "Object", "y", 1),
        triple("q", "Object", "y", 3), triple("q", "Object", "z", 3),
        triple("r", "NofN", "x", 1), triple("r", "NofN", "z", 1),
    ]
    fwd = cluster(triples)
    rev = cluster(list(reversed(triples)))
    assert fwd.merge_sequence == rev.merge_sequence
    assert fwd.to_json_obj() == rev.to_json_obj()


def test_cluster_requires_two_lemmas():
    with pytest.raises(ValueError):
        cluster([triple("f", "Subject", "only")])


def brute_force_merge_sequence(triples, threshold):
    """Recompute every pairwise similarity from scratch at each step."""
    contexts = {}
    for t in triples:
        slot = (t.headword, t.relation)
        contexts.setdefault(t.argument, {})
        contexts[t.argument][slot] = contexts[t.argument].get(slot, 0) + t.count
    active = {lemma: ({lemma}, ctx) for lemma, ctx in contexts.items()}
    ids = {lemma: lemma for lemma in active}
    sequence = []
    next_id = 1
    while len(active) > 1:
        best = None
        for a in active:
            for b in active:
                ra, rb = min(active[a][0]), min(active[b][0])
                if ra >= rb:
                    continue
                sim = slot_similarity(active[a][1], active[b][1])
                if sim >= threshold:
                    key = (-sim, ra, rb)
                    if best is None or key < best[0]:
                        best = (key, a, b, sim)
        if best is None:
            break
        _, a, b, sim = best
        merged_ctx = dict(active[a][1])
        for slot, n in active[b][1].items():
            merged_ctx[slot] = merged_ctx.get(slot, 0) + n
        new_id = f"c{next_id}"
        next_id += 1
        sequence.append((ids[a], ids[b], sim))
        members = active[a][0] | active[b][0]
        del active[a], active[b]
        active[new_id] = (members, merged_ctx)
        ids[new_id] = new_id
    return sequence


def test_cluster_matches_brute_force_on_random_inputs():
    rng = random.Random(7)
    heads = ["bind", "activate", "express", "cleave"]
    for trial in range(50):
        lemmas = [f"w{i}" for i in range(rng.randint(2, 6))]
        triples = []
        seen = set()
        for _ in range(rng.randint(2, 12)):
            key = (rng.choice(heads), rng.choice(("Subject", "Object")),
                   rng.choice(lemmas))
            if key in seen:
                continue
            seen.add(key)
            triples.append(triple(*key, rng.randint(1, 4)))
        if len({t.argument for t in triples}) < 2:
            continue
        threshold = rng.choice((0.1, 0.25, 0.5))
        hier = cluster(triples, threshold=threshold)
        assert hier.merge_sequence == brute_force_merge_sequence(triples, threshold), trial


# ------------------------------------------------------ validation / typing

def build_small_hierarchy():
    triples = [
        triple("transcribe", "Object", "cotd", 2),
        triple("transcribe", "Object", "cota", 2),
        triple("transcribe", "Object", "sigk", 1),
    ]
    return cluster(triples, threshold=0.2)


def test_apply_validation_and_most_specific():
    hier = build_small_hierarchy()
    apply_validation(hier, [("c1", "accepted"), ("c2", "accepted"),
                            ("cotd", "accepted")])
    assert most_specific_class(hier, "cotd") == "cotd"
    # cota has no accepted leaf; smallest accepted class containing it wins
    assert most_specific_class(hier, "cota") == "c1"
    assert most_specific_class(hier, "unknown") is None


def test_rejected_descendant_blocks_ancestors():
    hier = build_small_hierarchy()
    apply_validation(hier, [("c1", "rejected"), ("c2", "accepted"),
                            ("sigk", "accepted")])
    # c2 contains a rejected descendant (c1), so only the leaf remains
    assert most_specific_class(hier, "sigk") == "sigk"
    assert most_specific_class(hier, "cotd") is None


def test_apply_validation_errors():
    hier = build_small_hierarchy()
    with pytest.raises(KeyError):
        apply_validation(hier, [("nope", "accepted")])
    with pytest.raises(ValueError):
        apply_validation(hier, [("c1", "maybe")])


def test_type_nodes_assigns_classes():
    hier = build_small_hierarchy()
    apply_validation(hier, [("c1", "accepted")])
    graph = parse("GerE activates cotD .")
    type_nodes(graph, hier)
    by_lemma = {n.lemma: n.sem_class for n in graph.nodes}
    assert by_lemma["cotd"] == "c1"
    assert by_lemma["gere"] is None


# ------------------------------------------------------------------ file IO

def test_hierarchy_json_round_trip():
    hier = build_small_hierarchy()
    apply_validation(hier, [("c1", "accepted")])
    again = Hierarchy.from_json_obj(hier.to_json_obj())
    assert again.to_json_obj() == hier.to_json_obj()
    assert again.classes["c1"].validated == "accepted"


def test_triples_file_round_trip(tmp_path):
    triples = [triple("bind", "Object", "cotD", 3), triple("f", "Subject", "x")]
    path = tmp_path / "triples.tsv"
    write_triples(triples, path)
    assert read_triples(path) == triples


def test_read_decisions_skips_comments(tmp_path):
    path = tmp_path / "decisions.tsv"
    path.write_text("# header\nc1\taccepted\n\nc2\trejected\n")
    assert read_decisions(path) == [("c1", "accepted"), ("c2", "rejected")]
