"""Command-line pipeline orchestration.

Each stage reads the previous stage's artifact files from the output
directory and writes its own, so stages can be rerun in isolation. All
artifacts are deterministic given the same config and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import annotations as ann
from . import deps, filtering, learner, semclass, synonyms
from .config import ConfigError, PipelineConfig, validate_config
from .corpus import Document, Sentence, build_document, parse_corpus_file, tokenize
from .ner import CasePolicy, GeneLexicon, GeneMention, SynonymTable, canonicalize, find_gene_mentions

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_MISSING_ARTIFACT = 2


class MissingArtifact(RuntimeError):
    def __init__(self, artifact: Path, stage: str):
        super().__init__(f"missing artifact {artifact}; run the `{stage}` stage first")


def _dump_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", "utf-8")


def _load_json(path: Path, stage: str):
    if not path.exists():
        raise MissingArtifact(path, stage)
    return json.loads(path.read_text("utf-8"))


def _ref_key(doc_id: str, index: int) -> str:
    return f"{doc_id}:{index}"


# ------------------------------------------------------------------ stages

def _load_documents(config: PipelineConfig) -> list[Document]:
    obj = _load_json(config.output_dir / "documents.json", "ingest")
    return [build_document(d["id"], d["title"], d["abstract"]) for d in obj["documents"]]


def _load_lexicon(config: PipelineConfig) -> GeneLexicon:
    lex_path = config.path("lexicon")
    if lex_path is None:
        raise ConfigError(["paths.lexicon: required for this stage"])
    lexicon = GeneLexicon.from_file(lex_path, CasePolicy.FOLD_FIRST_CHAR)
    syn_path = config.path("synonyms")
    table = SynonymTable.from_file(syn_path) if syn_path else SynonymTable()
    return lexicon, table


def _load_mentions(config: PipelineConfig) -> dict[tuple[str, int], list[dict]]:
    obj = _load_json(config.output_dir / "mentions.json", "ner")
    out = {}
    for key, items in obj["mentions"].items():
        doc_id, _, idx = key.rpartition(":")
        out[(doc_id, int(idx))] = items
    return out


def _mentions_for_sentence(sentence: Sentence, raw: list[dict]) -> list[GeneMention]:
    return [GeneMention(sentence_ref=(sentence.doc_id, sentence.index),
                        token_range=tuple(m["token_range"]), surface=m["surface"],
                        canonical=m["canonical"]) for m in raw]


def stage_ingest(config: PipelineConfig) -> dict:
    corpus_path = config.path("corpus")
    if corpus_path is None or not corpus_path.exists():
        raise ConfigError(["paths.corpus: required for ingest"])
    result = parse_corpus_file(corpus_path.read_bytes(), config.corpus_format)
    _dump_json({
        "documents": [{"id": d.id, "title": d.title, "abstract": d.abstract_text}
                      for d in result.documents],
        "skipped_empty": result.skipped_empty,
        "errors": [{"line": e.line, "message": e.message} for e in result.errors],
    }, config.output_dir / "documents.json")
    return {"documents": len(result.documents), "skipped": result.skipped_empty,
            "errors": len(result.errors)}


def stage_ner(config: PipelineConfig) -> dict:
    documents = _load_documents(config)
    lexicon, table = _load_lexicon(config)
    mentions_obj = {}
    total = 0
    for doc in documents:
        for sent in doc.sentences:
            found = [canonicalize(m, table) for m in find_gene_mentions(sent, lexicon)]
            total += len(found)
            mentions_obj[_ref_key(doc.id, sent.index)] = [
                {"token_range": list(m.token_range), "surface": m.surface,
                 "canonical": m.canonical} for m in found]
    _dump_json({"mentions": mentions_obj}, config.output_dir / "mentions.json")
    return {"sentences": sum(len(d.sentences) for d in documents), "mentions": total}


def stage_filter(config: PipelineConfig) -> dict:
    documents = _load_documents(config)
    mentions = _load_mentions(config)
    model = None
    training_path = config.path("training")
    if training_path is not None:
        model = _train_filter_model(config, training_path)
        model.save(config.output_dir / "nb_model.json")

    decisions = []
    candidates = accepted = 0
    for doc in documents:
        for sent in doc.sentences:
            ms = _mentions_for_sentence(sent, mentions.get((doc.id, sent.index), []))
            is_candidate = filtering.candidate_filter(sent, ms, config.count_mode)
            candidates += is_candidate
            if model is not None:
                bag = filtering.sentence_bag(sent, ms)
                decision = filtering.classify(model, (doc.id, sent.index), bag, is_candidate)
            else:
                decision = filtering.FilterDecision(
                    sentence_ref=(doc.id, sent.index), candidate=is_candidate,
                    posterior_relevant=1.0 if is_candidate else 0.0, accepted=is_candidate)
            accepted += decision.accepted
            decisions.append({"sentence_ref": list(decision.sentence_ref),
                              "candidate": decision.candidate,
                              "posterior_relevant": round(decision.posterior_relevant, 12),
                              "accepted": decision.accepted})
    _dump_json({"decisions": decisions}, config.output_dir / "filter.json")
    return {"sentences": len(decisions), "candidates": candidates, "accepted": accepted}


def _train_filter_model(config: PipelineConfig, training_path: Path):
    rows = filtering.read_training_tsv(training_path)
    lexicon, table = _load_lexicon(config)
    labeled = []
    for i, (label, text) in enumerate(rows):
        doc = build_document(f"train-{i}", "", text)
        bags = set()
        for sent in doc.sentences:
            ms = [canonicalize(m, table) for m in find_gene_mentions(sent, lexicon)]
            bags.update(filtering.sentence_bag(sent, ms))
        labeled.append(filtering.LabeledSentence(sentence_ref=(f"train-{i}", 0),
                                                 bag=frozenset(bags), label=label))
    vocabulary = filtering.select_features(labeled, config.k_features)
    return filtering.train_nb(labeled, vocabulary, config.alpha, config.threshold)


def stage_synonyms(config: PipelineConfig) -> dict:
    documents = _load_documents(config)
    mentions = _load_mentions(config)
    patterns = synonyms.load_trigger_patterns(config.path("triggers"))
    candidates = []
    for doc in documents:
        for sent in doc.sentences:
            ms = _mentions_for_sentence(sent, mentions.get((doc.id, sent.index), []))
            candidates.extend(synonyms.match_triggers(sent, ms, patterns, config.max_gap))
    report = synonyms.SynonymBuildReport()
    table = synonyms.build_synonym_table(candidates, config.min_confidence, report)
    table.write(config.output_dir / "synonyms.tsv")
    return {"candidates": len(candidates), "pairs": len(table.mapping),
            "rejected_conflicts": len(report.rejected_conflicts)}


def _parse_sentence(sent: Sentence, term_lexicon: deps.TermLexicon) -> deps.DependencyGraph:
    tagged = deps.pos_tag(sent)
    merged = deps.merge_terms(tagged, term_lexicon)
    graph = deps.extract_relations(merged)
    deps.distribute_coordination(graph)
    deps.normalize_passive(graph)
    return graph


def stage_parse(config: PipelineConfig) -> dict:
    documents = _load_documents(config)
    terms_path = config.path("terms")
    term_lexicon = deps.TermLexicon.from_file(terms_path) if terms_path else deps.TermLexicon()
    accepted_refs = None
    filter_path = config.output_dir / "filter.json"
    if filter_path.exists():
        obj = json.loads(filter_path.read_text("utf-8"))
        accepted_refs = {tuple(d["sentence_ref"]) for d in obj["decisions"] if d["accepted"]}

    graphs = []
    edges = 0
    for doc in documents:
        for sent in doc.sentences:
            if accepted_refs is not None and (doc.id, sent.index) not in accepted_refs:
                continue
            graph = _parse_sentence(sent, term_lexicon)
            edges += len(graph.edges)
            graphs.append(graph.to_json_obj())
    _dump_json({"graphs": graphs}, config.output_dir / "graphs.json")
    return {"graphs": len(graphs), "edges": edges}


def _load_graphs(config: PipelineConfig) -> list[deps.DependencyGraph]:
    obj = _load_json(config.output_dir / "graphs.json", "parse")
    return [deps.DependencyGraph.from_json_obj(g) for g in obj["graphs"]]


def stage_cluster(config: PipelineConfig) -> dict:
    graphs = _load_graphs(config)
    triples = semclass.collect_triples(graphs, frozenset(config.slot_relations))
    semclass.write_triples(triples, config.output_dir / "triples.tsv")
    if len({t.argument for t in triples}) < 2:
        _dump_json({"classes": [], "roots": [], "merge_sequence": []},
                   config.output_dir / "hierarchy.json")
        return {"triples": len(triples), "classes": 0}
    hierarchy = semclass.cluster(triples, config.cluster_threshold)
    decisions_path = config.path("decisions")
    if decisions_path is not None:
        semclass.apply_validation(hierarchy, semclass.read_decisions(decisions_path))
    _dump_json(hierarchy.to_json_obj(), config.output_dir / "hierarchy.json")
    return {"triples": len(triples), "classes": len(hierarchy.classes)}


def _load_annotated(config: PipelineConfig) -> list[tuple[Sentence, list[ann.InteractionFrame]]]:
    annotations_dir = config.path("annotations")
    if annotations_dir is None:
        raise ConfigError(["paths.annotations: required for learn"])
    out = []
    for xml_path in sorted(Path(annotations_dir).glob("*.xml")):
        parsed = ann.parse_annotation_xml(xml_path.read_text("utf-8"))
        sent = Sentence(doc_id=xml_path.stem, index=0, text=parsed.text,
                        span=(0, len(parsed.text)), tokens=tokenize(parsed.text))
        out.append((sent, parsed.frames))
    return out


def stage_learn(config: PipelineConfig) -> dict:
    annotated = _load_annotated(config)
    lexicon, table = _load_lexicon(config)
    terms_path = config.path("terms")
    term_lexicon = deps.TermLexicon.from_file(terms_path) if terms_path else deps.TermLexicon()

    graphs, mentions = {}, {}
    for sent, _ in annotated:
        ref = (sent.doc_id, sent.index)
        graphs[ref] = _parse_sentence(sent, term_lexicon)
        mentions[ref] = [canonicalize(m, table) for m in find_gene_mentions(sent, lexicon)]

    report = learner.BuildReport()
    examples = learner.build_examples(annotated, graphs, mentions, report)
    features = [learner.compute_features(e, config.path_length) for e in examples]
    dictionary = learner.build_dictionary(features)
    rules = learner.learn_rules(
        [(learner.propositionalize(f, dictionary), e.is_positive, e.regulation)
         for f, e in zip(features, examples)],
        noise_budget=config.noise_budget, max_literals=4, neg_weight=config.neg_weight)
    learner.save_rules(rules, config.output_dir / "rules.json")

    cv = learner.cross_validate(examples, k=config.folds, seed=config.seed,
                                max_path_length=config.path_length,
                                noise_budget=config.noise_budget,
                                neg_weight=config.neg_weight)
    _dump_json(cv.to_json_obj(), config.output_dir / "cv_report.json")
    (config.output_dir / "cv_report.txt").write_text(cv.to_text() + "\n", "utf-8")
    return {"examples": len(examples),
            "positives": sum(e.is_positive for e in examples),
            "rules": len(rules), "skipped_spans": report.skipped_spans}


def stage_extract(config: PipelineConfig) -> dict:
    counts = {}
    counts["ingest"] = stage_ingest(config)
    counts["ner"] = stage_ner(config)
    counts["filter"] = stage_filter(config)
    counts["parse"] = stage_parse(config)

    rules_path = config.path("rules") or (config.output_dir / "rules.json")
    if not rules_path.exists():
        raise MissingArtifact(rules_path, "learn")
    rules = learner.load_rules(rules_path)

    hierarchy = None
    hierarchy_path = config.output_dir / "hierarchy.json"
    if hierarchy_path.exists():
        hierarchy = semclass.Hierarchy.from_json_obj(
            json.loads(hierarchy_path.read_text("utf-8")))

    documents = {d.id: d for d in _load_documents(config)}
    mentions = _load_mentions(config)
    graphs = _load_graphs(config)

    lines = []
    for graph in graphs:
        doc_id, idx = graph.sentence_ref
        sent = documents[doc_id].sentences[idx]
        ms = _mentions_for_sentence(sent, mentions.get((doc_id, idx), []))
        if hierarchy is not None:
            semclass.type_nodes(graph, hierarchy)
        seen = set()
        for rule_idx, a, t in learner.match_rule_applications(
                rules, graph, ms, config.path_length, hierarchy=hierarchy):
            triple = (rules[rule_idx].regulation, a.canonical, t.canonical)
            if triple in seen:
                continue
            seen.add(triple)
            lines.append(json.dumps({
                "type": triple[0], "agent": triple[1], "target": triple[2],
                "sentence_ref": [doc_id, idx], "rule_id": rule_idx,
            }, sort_keys=True))
    out_path = config.output_dir / "templates.jsonl"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")
    counts["templates"] = len(lines)
    return counts


def stage_eval(config: PipelineConfig) -> dict:
    gold_path = config.path("gold_relations")
    if gold_path is None:
        raise ConfigError(["paths.gold_relations: required for eval"])
    gold = deps.read_gold_relations(gold_path)
    graphs = [g for g in _load_graphs(config) if g.sentence_ref in gold]
    metrics, counts = deps.evaluate_relations(gold, graphs)
    table = {}
    lines = [f"{'Rel':8} {'nbRel':>5} {'relOK':>5} {'R':>5} {'RelTot':>6} {'P':>5}"]
    for label in deps.RELATION_LABELS:
        nb, ok, tot = counts.per_label[label]
        r, p = metrics[label]
        table[label] = {"nbRel": nb, "relOK": ok, "RelTot": tot,
                        "recall": round(r, 4), "precision": round(p, 4)}
        lines.append(f"{label:8} {nb:>5} {ok:>5} {r:>5.2f} {tot:>6} {p:>5.2f}")
    _dump_json({"relations": table}, config.output_dir / "relation_eval.json")
    (config.output_dir / "relation_eval.txt").write_text("\n".join(lines) + "\n", "utf-8")
    return {"labels": len(table)}


def stage_report(config: PipelineConfig) -> dict:
    stage_files = {
        "ingest": "documents.json", "ner": "mentions.json", "filter": "filter.json",
        "synonyms": "synonyms.tsv", "parse": "graphs.json", "cluster": "hierarchy.json",
        "learn": "rules.json", "extract": "templates.jsonl",
    }
    report = {}
    for stage, name in stage_files.items():
        path = config.output_dir / name
        report[stage] = {"artifact": name, "present": path.exists()}
    _dump_json(report, config.output_dir / "report.json")
    return {"stages_present": sum(1 for s in report.values() if s["present"])}


def stage_annotate_serve(config: PipelineConfig, port: int | None = None) -> dict:
    import uvicorn

    from .service import AnnotationStore, create_app

    store_path = config.path("store")
    if store_path is None:
        raise ConfigError(["paths.store: required for annotate-serve"])
    frontend = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(AnnotationStore(store_path),
                     frontend_dir=frontend if frontend.is_dir() else None)
    uvicorn.run(app, host="127.0.0.1", port=port or config.port)
    return {}


STAGES = {
    "ingest": stage_ingest,
    "ner": stage_ner,
    "filter": stage_filter,
    "synonyms": stage_synonyms,
    "parse": stage_parse,
    "cluster": stage_cluster,
    "learn": stage_learn,
    "extract": stage_extract,
    "eval": stage_eval,
    "report": stage_report,
}


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genic",
                                     description="genic-interaction extraction pipeline")
    parser.add_argument("--config", required=True, help="pipeline config JSON")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES:
        p = sub.add_parser(name)
        if name == "learn":
            p.add_argument("--folds", type=int)
            p.add_argument("--seed", type=int)
    serve = sub.add_parser("annotate-serve")
    serve.add_argument("--store")
    serve.add_argument("--port", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        config = validate_config(args.config)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "annotate-serve":
        if args.store:
            config.paths["store"] = args.store
        stage_annotate_serve(config, args.port)
        return EXIT_OK

    if args.command == "learn":
        if args.folds is not None:
            config.folds = args.folds
        if args.seed is not None:
            config.seed = args.seed

    started = time.monotonic()
    try:
        config.output_dir.mkdir(parents=True, exist_ok=True)
        counts = STAGES[args.command](config)
    except MissingArtifact as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISSING_ARTIFACT
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    elapsed = time.monotonic() - started
    print(json.dumps({"stage": args.command, "counts": counts,
                      "seconds": round(elapsed, 3)}, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
