"""Candidate-sentence selection and Naive Bayes relevance classification.

Sentences with at least two gene names are candidates; a Bernoulli-bag NB
model with mutual-information feature selection scores them for relevance.
Gene mentions are masked with a GENE placeholder so the model learns
context, not gene identity.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import Sentence, TokenKind
from .ner import GeneMention

GENE_PLACEHOLDER = "GENE"
RELEVANT = "relevant"
IRRELEVANT = "irrelevant"

MODEL_FORMAT_VERSION = 1


@dataclass
class LabeledSentence:
    sentence_ref: tuple[str, int]
    bag: frozenset[str]
    label: str | None = None


@dataclass
class FilterDecision:
    sentence_ref: tuple[str, int]
    candidate: bool
    posterior_relevant: float
    accepted: bool


def sentence_bag(sentence: Sentence, mentions: list[GeneMention] | None = None) -> frozenset[str]:
    """Lowercased word types, with gene-mention tokens replaced by GENE."""
    masked = set()
    if mentions:
        for m in mentions:
            masked.update(range(m.token_range[0], m.token_range[1] + 1))
    bag = set()
    for i, tok in enumerate(sentence.tokens):
        if i in masked:
            bag.add(GENE_PLACEHOLDER)
        elif tok.kind in (TokenKind.WORD, TokenKind.NUMBER):
            bag.add(tok.text.lower())
    return frozenset(bag)


def candidate_filter(sentence: Sentence, mentions: list[GeneMention],
                     count_mode: str = "raw_mentions") -> bool:
    """True iff the sentence carries >= 2 gene names under count_mode."""
    if count_mode == "raw_mentions":
        return len(mentions) >= 2
    if count_mode == "distinct_canonical":
        return len({m.canonical for m in mentions}) >= 2
    raise ValueError(f"unknown count_mode: {count_mode!r}")


def _mi(n11: int, n10: int, n01: int, n00: int) -> float:
    """Mutual information of a binary feature with the binary label (nats)."""
    n = n11 + n10 + n01 + n00
    total = 0.0
    for nf, nl, nfl in ((n11 + n10, n11 + n01, n11),
                        (n11 + n10, n10 + n00, n10),
                        (n01 + n00, n11 + n01, n01),
                        (n01 + n00, n10 + n00, n00)):
        if nfl == 0:
            continue
        total += (nfl / n) * math.log(n * nfl / (nf * nl))
    return total


def select_features(training: list[LabeledSentence], k: int) -> set[str]:
    """Top-k features by mutual information with the label.

    Ties break lexicographically; k beyond the feature count returns all.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    labels = {s.label for s in training}
    if labels != {RELEVANT, IRRELEVANT}:
        raise ValueError("training data must contain both labels")

    features = sorted({f for s in training for f in s.bag})
    n_rel = sum(1 for s in training if s.label == RELEVANT)
    n_irr = len(training) - n_rel
    scored = []
    for f in features:
        n11 = sum(1 for s in training if s.label == RELEVANT and f in s.bag)
        n10 = sum(1 for s in training if s.label == IRRELEVANT and f in s.bag)
        scored.append((-_mi(n11, n10, n_rel - n11, n_irr - n10), f))
    scored.sort()
    return {f for _, f in scored[:k]}


@dataclass
class NaiveBayesModel:
    class_log_priors: dict[str, float]
    feature_log_likelihoods: dict[str, dict[str, float]]  # feature -> class -> logprob
    vocabulary: frozenset[str]
    smoothing_alpha: float
    threshold: float = 0.5

    def to_json(self) -> str:
        return json.dumps({
            "format_version": MODEL_FORMAT_VERSION,
            "class_log_priors": self.class_log_priors,
            "feature_log_likelihoods": self.feature_log_likelihoods,
            "vocabulary": sorted(self.vocabulary),
            "smoothing_alpha": self.smoothing_alpha,
            "threshold": self.threshold,
        }, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NaiveBayesModel":
        obj = json.loads(text)
        if obj.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version: {obj.get('format_version')}")
        return cls(
            class_log_priors=obj["class_log_priors"],
            feature_log_likelihoods=obj["feature_log_likelihoods"],
            vocabulary=frozenset(obj["vocabulary"]),
            smoothing_alpha=obj["smoothing_alpha"],
            threshold=obj.get("threshold", 0.5),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), "utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NaiveBayesModel":
        return cls.from_json(Path(path).read_text("utf-8"))


def train_nb(training: list[LabeledSentence], vocabulary: set[str],
             alpha: float = 1.0, threshold: float = 0.5) -> NaiveBayesModel:
    """ML priors plus Laplace(alpha)-smoothed presence likelihoods, in log space."""
    if not training:
        raise ValueError("training set is empty")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    counts = Counter(s.label for s in training)
    if set(counts) != {RELEVANT, IRRELEVANT}:
        raise ValueError("training data must contain both labels")

    n = len(training)
    priors = {c: math.log(counts[c] / n) for c in (RELEVANT, IRRELEVANT)}
    likelihoods: dict[str, dict[str, float]] = {}
    for f in sorted(vocabulary):
        likelihoods[f] = {}
        for c in (RELEVANT, IRRELEVANT):
            present = sum(1 for s in training if s.label == c and f in s.bag)
            likelihoods[f][c] = math.log((present + alpha) / (counts[c] + 2 * alpha))
    return NaiveBayesModel(class_log_priors=priors, feature_log_likelihoods=likelihoods,
                           vocabulary=frozenset(vocabulary), smoothing_alpha=alpha,
                           threshold=threshold)


def posterior_relevant(model: NaiveBayesModel, bag: frozenset[str]) -> float:
    """P(relevant | bag) from the selected features present in the bag."""
    scores = dict(model.class_log_priors)
    for f in bag & model.vocabulary:
        for c in scores:
            scores[c] += model.feature_log_likelihoods[f][c]
    m = max(scores.values())
    exp = {c: math.exp(v - m) for c, v in scores.items()}
    return exp[RELEVANT] / (exp[RELEVANT] + exp[IRRELEVANT])


def classify(model: NaiveBayesModel, sentence_ref: tuple[str, int], bag: frozenset[str],
             candidate: bool = True) -> FilterDecision:
    p = posterior_relevant(model, bag)
    return FilterDecision(sentence_ref=sentence_ref, candidate=candidate,
                          posterior_relevant=p,
                          accepted=candidate and p >= model.threshold)


def read_training_tsv(path: str | Path) -> list[tuple[str, str]]:
    """Read `label<TAB>sentence_text` training lines."""
    rows = []
    for raw in Path(path).read_text("utf-8").splitlines():
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        label, _, text = line.partition("\t")
        if label not in (RELEVANT, IRRELEVANT) or not text:
            raise ValueError(f"bad training line: {raw!r}")
        rows.append((label, text))
    return rows
