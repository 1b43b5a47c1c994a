"""POS tagging, term merging, and the dependency rule cascade."""

from pathlib import Path

import pytest

from genic import deps
from genic.corpus import build_document
from genic.deps import (
    RELATION_LABELS,
    DependencyGraph,
    Tag,
    TagLexicon,
    TermLexicon,
    default_tag_lexicon,
    distribute_coordination,
    evaluate_relations,
    extract_relations,
    merge_terms,
    normalize_passive,
    pos_tag,
    read_gold_relations,
    relation_metrics,
)

FIXTURES = Path(__file__).parent / "fixtures"

FIG1 = ("GerE stimulates cotD transcription and inhibits cotA transcription in vitro "
        "by sigma K RNA polymerase, as expected from in vivo studies, and, unexpectedly, "
        "profoundly inhibits in vitro transcription of the gene (sigK) that encode sigma K.")


def parse(text, term_lexicon=None):
    sent = build_document("d", "", text).sentences[0]
    tagged = merge_terms(pos_tag(sent), term_lexicon)
    graph = extract_relations(tagged)
    distribute_coordination(graph)
    normalize_passive(graph)
    return graph


def edge_lemmas(graph):
    return {(graph.nodes[h].lemma, graph.nodes[d].lemma, label)
            for h, d, label in graph.edges}


# ------------------------------------------------------------- POS tagging

def test_tag_lexicon_inflection_stripping():
    lex = default_tag_lexicon()
    assert lex.lookup("activates") == (Tag.VERB, True)
    assert lex.lookup("activated") == (Tag.VERB, True)
    assert lex.lookup("activating") == (Tag.VERB, True)
    assert lex.lemma("activates", Tag.VERB) == "activate"
    assert lex.lemma("studies", Tag.NOUN) == "study"


def test_tag_lexicon_suffix_rules():
    lex = default_tag_lexicon()
    assert lex.lookup("sporulation") == (Tag.NOUN, True)
    assert lex.lookup("profoundly") == (Tag.ADVERB, True)
    assert lex.lookup("spoIIG") == (None, False)


def test_unknown_words_default_to_noun():
    sent = build_document("d", "", "spoIIG blorfs qux").sentences[0]
    assert pos_tag(sent).tags == [Tag.NOUN, Tag.NOUN, Tag.NOUN]


# ------------------------------------------------------------- term merges

def test_term_lexicon_merge():
    terms = TermLexicon()
    terms.add("sigma K RNA polymerase")
    sent = build_document("d", "", "by sigma K RNA polymerase today").sentences[0]
    merged = merge_terms(pos_tag(sent), terms)
    assert [(m.start, m.end) for m in merged.term_merges] == [(1, 4)]


def test_species_name_merge():
    sent = build_document("d", "", "Bacillus subtilis sporulates").sentences[0]
    merged = merge_terms(pos_tag(sent))
    assert [(m.start, m.end, m.head) for m in merged.term_merges] == [(0, 1, 0)]


def test_species_merge_requires_unknown_words():
    # "during growth" looks shape-compatible but both words are known
    sent = build_document("d", "", "Protein levels rise").sentences[0]
    assert merge_terms(pos_tag(sent)).term_merges == []


def test_parenthetical_merge_heads_inner_noun():
    sent = build_document("d", "", "the gene ( sigK ) is expressed").sentences[0]
    merged = merge_terms(pos_tag(sent))
    merge = merged.term_merges[0]
    assert (merge.start, merge.end) == (1, 4)
    assert sent.tokens[merge.head].text == "sigK"


def test_term_lexicon_file_with_tags():
    terms = TermLexicon.from_file(FIXTURES / "terms.txt")
    assert terms.terms[("in", "vitro")] == Tag.ADVERB
    assert terms.terms[("sigma", "k")] == Tag.NOUN


# ---------------------------------------------------------------- cascade

def test_simple_transitive_clause():
    graph = parse("GerE activates transcription of cotD .")
    assert edge_lemmas(graph) == {
        ("activate", "gere", "Subject"),
        ("activate", "transcription", "Object"),
        ("transcription", "cotd", "NofN"),
    }


def test_verb_and_object_prepositional_attachment():
    graph = parse("sigA binds the promoter in cells .")
    assert ("bind", "promoter", "Object") in edge_lemmas(graph)
    assert ("promoter", "cell", "O-GP") in edge_lemmas(graph)
    graph2 = parse("sigA sporulates in cells .")
    assert ("sporulate", "cell", "V-GP") in edge_lemmas(graph2)


def test_noun_noun_preposition():
    graph = parse("the level of expression in mutants increased .")
    assert ("expression", "mutant", "Prep") in edge_lemmas(graph)


def test_vtov_chain():
    graph = parse("sigA binds to activate spoIIG .")
    assert ("bind", "activate", "VtoV") in edge_lemmas(graph)
    assert ("activate", "spoiig", "Object") in edge_lemmas(graph)


def test_nv_adj_negation():
    graph = parse("spoIIG does not sporulate .")
    assert ("sporulate", "not", "nV-Adj") in edge_lemmas(graph)


def test_passive_simple_normalization():
    graph = parse("cotD is transcribed by GerE .")
    got = edge_lemmas(graph)
    assert ("transcribe", "cotd", "PaSim") in got
    assert ("transcribe", "cotd", "Object") in got
    assert ("transcribe", "gere", "Subject") in got


def test_passive_relative():
    graph = parse("the gene that is repressed by GerE sporulates .")
    got = edge_lemmas(graph)
    assert ("repress", "gene", "PaRel") in got
    assert ("repress", "gere", "Subject") in got


def test_vcoov_distributes_subject():
    graph = parse("GerE activates cotD and represses cotA .")
    got = edge_lemmas(graph)
    assert ("activate", "repress", "VcooV") in got
    assert ("repress", "gere", "Subject") in got


def test_ncoon_copies_incoming_edges():
    graph = parse("expression depends on sigA and sigB .")
    got = edge_lemmas(graph)
    assert ("siga", "sigb", "NcooN") in got
    assert ("depend", "sigb", "V-GP") in got


def test_but_resets_clause_state():
    graph = parse("GerE sporulates but cotD interacts .")
    got = edge_lemmas(graph)
    assert ("interact", "cotd", "Subject") in got
    assert not any(label == "VcooV" for _, _, label in got)


def test_whose_clause():
    graph = parse("spoIIG , whose transcription depends on sigA , sporulates .")
    got = edge_lemmas(graph)
    assert ("depend", "transcription", "Subject") in got
    assert ("transcription", "spoiig", "NofN") in got
    assert ("depend", "siga", "V-GP") in got


def test_figure_sentence_end_to_end():
    terms = TermLexicon.from_file(FIXTURES / "terms.txt")
    graph = parse(FIG1, terms)
    got = edge_lemmas(graph)
    # three coordinated predications, all sharing the GerE subject
    assert ("stimulate", "gere", "Subject") in got
    assert ("stimulate", "inhibit", "VcooV") in got
    assert sum(1 for h, d, l in graph.edges
               if l == "Subject" and graph.nodes[d].lemma == "gere") == 3
    # the three targets hang off their transcription heads
    assert ("transcription", "cotd", "NofN") in got
    assert ("transcription", "cota", "NofN") in got
    assert ("transcription", "sigk", "NofN") in got
    # "by sigma K RNA polymerase" attaches below the object
    assert any(l == "O-GP" and graph.nodes[d].text == "sigma K RNA polymerase"
               for h, d, l in graph.edges)


def test_distribute_coordination_idempotent():
    graph = parse("GerE activates cotD and represses cotA .")
    before = set(graph.edges)
    distribute_coordination(graph)
    assert graph.edges == before


def test_add_edge_rejects_unknown_label():
    graph = DependencyGraph(sentence_ref=("d", 0), nodes=[])
    with pytest.raises(ValueError):
        graph.add_edge(0, 1, "Dobj")


def test_graph_json_round_trip():
    graph = parse("cotD is transcribed by GerE in cells .")
    again = DependencyGraph.from_json_obj(graph.to_json_obj())
    assert again.edges == graph.edges
    assert again.pp_preps == graph.pp_preps
    assert [n.lemma for n in again.nodes] == [n.lemma for n in graph.nodes]


# -------------------------------------------------------------- evaluation

def test_relation_metrics_conventions():
    assert relation_metrics(10, 8, 10) == (0.8, 0.8)
    assert relation_metrics(0, 0, 0) == (1.0, 1.0)
    assert relation_metrics(0, 0, 5) == (1.0, 0.0)


def test_evaluate_relations_counts(tmp_path):
    graph = parse("GerE activates transcription of cotD .")
    gold_file = tmp_path / "gold.tsv"
    gold_file.write_text(
        "d\t0\tSubject\tactivate\tgerE\n"
        "d\t0\tObject\tactivate\ttranscription\n"
        "d\t0\tNofN\ttranscription\tcotA\n")
    gold = read_gold_relations(gold_file)
    metrics, counts = evaluate_relations(gold, [graph])
    assert counts.per_label["Subject"] == (1, 1, 1)
    assert counts.per_label["NofN"] == (1, 0, 1)
    assert metrics["NofN"] == (0.0, 0.0)
    assert metrics["Prep"] == (1.0, 1.0)


def test_evaluate_relations_requires_aligned_refs():
    graph = parse("GerE activates cotD .")
    with pytest.raises(ValueError):
        evaluate_relations({("other", 0): []}, [graph])


def test_relation_inventory_is_fixed():
    assert len(RELATION_LABELS) == 12
    assert "V-GP" in RELATION_LABELS and "PaRel" in RELATION_LABELS
