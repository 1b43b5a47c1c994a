"""Trigger-pattern synonym mining over `gene trigger gene` fragments.

Triggers are token sequences ("also called", "formerly") or punctuation
schemas (a parenthesized gene right after a gene; a gene/gene slash pair),
shipped as an editable JSON file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import Sentence
from .ner import GeneMention, SynonymTable

DIRECTIONS = {"second_is_former_name", "second_is_alias", "undirected"}
DEFAULT_MAX_GAP = 3
DEFAULT_MIN_CONFIDENCE = 0.8
GAP_DECAY = 0.9

# tokens allowed to link multiple right-hand genes to one trigger
_COORD_TOKENS = {",", "and", "or"}


@dataclass
class TriggerPattern:
    id: str
    tokens: tuple[str, ...] = ()  # empty for punctuation schemas
    punctuation: str | None = None  # "paren" | "slash"
    direction: str = "undirected"
    score: float = 1.0

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction: {self.direction!r}")
        if not self.tokens and self.punctuation is None:
            raise ValueError(f"pattern {self.id!r} has an empty trigger")


@dataclass
class SynonymCandidate:
    pair: tuple[GeneMention, GeneMention]
    pattern_id: str
    sentence_ref: tuple[str, int]
    confidence: float
    span: tuple[int, int] = (0, 0)  # token span containing both mentions and the trigger


@dataclass
class SynonymBuildReport:
    rejected_conflicts: list[tuple[str, str, str]] = field(default_factory=list)
    dropped_low_confidence: int = 0


def load_trigger_patterns(path: str | Path | None = None) -> list[TriggerPattern]:
    if path is None:
        text = resources.files("genic.data").joinpath("triggers.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    patterns = []
    for obj in json.loads(text):
        patterns.append(TriggerPattern(
            id=obj["id"],
            tokens=tuple(obj.get("tokens", ())),
            punctuation=obj.get("punctuation"),
            direction=obj.get("direction", "undirected"),
            score=float(obj.get("score", 1.0)),
        ))
    return patterns


def _mention_at(mentions: list[GeneMention], index: int) -> GeneMention | None:
    for m in mentions:
        if m.token_range[0] == index:
            return m
    return None


def _mention_ending_at(mentions: list[GeneMention], index: int) -> GeneMention | None:
    for m in mentions:
        if m.token_range[1] == index:
            return m
    return None


def match_triggers(sentence: Sentence, mentions: list[GeneMention],
                   patterns: list[TriggerPattern],
                   max_gap: int = DEFAULT_MAX_GAP) -> list[SynonymCandidate]:
    """Emit a candidate for each `gene trigger gene` occurrence.

    At most max_gap non-trigger tokens may separate the trigger from each
    mention. On the right side, coordinated genes ("also called A and B")
    each yield a candidate.
    """
    toks = [t.text for t in sentence.tokens]
    candidates = []
    for pattern in patterns:
        if pattern.punctuation is not None:
            candidates.extend(_match_punctuation(sentence, toks, mentions, pattern))
            continue
        trig = tuple(t.lower() for t in pattern.tokens)
        for i in range(len(toks) - len(trig) + 1):
            if tuple(t.lower() for t in toks[i:i + len(trig)]) != trig:
                continue
            left, left_gap = _left_mention(mentions, i, max_gap)
            if left is None:
                continue
            for right, right_gap in _right_mentions(mentions, toks, i + len(trig), max_gap):
                if left.canonical == right.canonical:
                    continue
                conf = pattern.score * GAP_DECAY ** (left_gap + right_gap)
                candidates.append(SynonymCandidate(
                    pair=(left, right), pattern_id=pattern.id,
                    sentence_ref=(sentence.doc_id, sentence.index),
                    confidence=conf,
                    span=(left.token_range[0], right.token_range[1]),
                ))
    return candidates


def _left_mention(mentions, trigger_start, max_gap):
    """Closest mention ending at most max_gap tokens before the trigger."""
    for gap in range(max_gap + 1):
        end = trigger_start - 1 - gap
        if end < 0:
            return None, 0
        m = _mention_ending_at(mentions, end)
        if m is not None:
            return m, gap
    return None, 0


def _right_mentions(mentions, toks, after, max_gap):
    """First mention after the trigger, plus coordinated follow-ons."""
    first = None
    gap = 0
    for g in range(max_gap + 1):
        start = after + g
        if start >= len(toks):
            return
        m = _mention_at(mentions, start)
        if m is not None:
            first, gap = m, g
            break
    if first is None:
        return
    yield first, gap
    # walk "X, Y and Z" style coordinations
    pos = first.token_range[1] + 1
    while pos < len(toks) and toks[pos].lower() in _COORD_TOKENS:
        nxt = pos + 1
        while nxt < len(toks) and toks[nxt].lower() in _COORD_TOKENS:
            nxt += 1
        m = _mention_at(mentions, nxt)
        if m is None:
            return
        yield m, gap
        pos = m.token_range[1] + 1


def _match_punctuation(sentence, toks, mentions, pattern):
    out = []
    for left in mentions:
        j = left.token_range[1] + 1
        if pattern.punctuation == "paren":
            # gene ( gene )
            if j < len(toks) and toks[j] == "(":
                right = _mention_at(mentions, j + 1)
                if right is not None and right.canonical != left.canonical:
                    close = right.token_range[1] + 1
                    if close < len(toks) and toks[close] == ")":
                        out.append(SynonymCandidate(
                            pair=(left, right), pattern_id=pattern.id,
                            sentence_ref=(sentence.doc_id, sentence.index),
                            confidence=pattern.score,
                            span=(left.token_range[0], close)))
        elif pattern.punctuation == "slash":
            # gene / gene
            if j < len(toks) and toks[j] == "/":
                right = _mention_at(mentions, j + 1)
                if right is not None and right.canonical != left.canonical:
                    out.append(SynonymCandidate(
                        pair=(left, right), pattern_id=pattern.id,
                        sentence_ref=(sentence.doc_id, sentence.index),
                        confidence=pattern.score,
                        span=(left.token_range[0], right.token_range[1])))
    return out


def build_synonym_table(candidates: list[SynonymCandidate],
                        min_confidence: float = DEFAULT_MIN_CONFIDENCE,
                        report: SynonymBuildReport | None = None) -> SynonymTable:
    """Merge candidates into an alternate->preferred table.

    Direction rules pick preferred vs alternate; conflicting preferreds for
    one alternate are resolved by higher aggregate confidence, ties reject
    both sides into the report.
    """
    if report is None:
        report = SynonymBuildReport()
    # aggregate confidence per directed (preferred, alternate) pair
    agg: dict[tuple[str, str], float] = {}
    for c in candidates:
        if c.confidence < min_confidence:
            report.dropped_low_confidence += 1
            continue
        left, right = (m.canonical for m in c.pair)
        # both "formerly" (second is the old name) and "also called" (second
        # is an alias) make the left mention the preferred name
        preferred, alternate = left, right
        agg[(preferred, alternate)] = agg.get((preferred, alternate), 0.0) + c.confidence

    by_alternate: dict[str, list[tuple[float, str]]] = {}
    for (preferred, alternate), conf in agg.items():
        by_alternate.setdefault(alternate, []).append((conf, preferred))

    pairs = []
    for alternate, options in sorted(by_alternate.items()):
        options.sort(reverse=True)
        if len(options) > 1 and options[0][0] == options[1][0]:
            for conf, preferred in options:
                report.rejected_conflicts.append((preferred, alternate, f"tie at {conf:g}"))
            continue
        best_conf, preferred = options[0]
        for conf, other in options[1:]:
            report.rejected_conflicts.append((other, alternate, f"lost to {preferred} ({best_conf:g} > {conf:g})"))
        pairs.append((preferred, alternate, "mined"))
    return SynonymTable.from_pairs(pairs)


def evaluate_synonym_mining(predicted: SynonymTable, gold: SynonymTable) -> tuple[float, float]:
    """Order-insensitive pair precision/recall against a gold table."""

    def norm(table: SynonymTable) -> set[frozenset[str]]:
        return {frozenset(p) for p in table.pairs()}

    pred, ref = norm(predicted), norm(gold)
    if not ref:
        raise ValueError("gold table is empty; recall undefined")
    hit = len(pred & ref)
    precision = hit / len(pred) if pred else 1.0
    recall = hit / len(ref)
    return precision, recall
