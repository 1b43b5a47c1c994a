"""Corpus ingestion: abstract records, sentence segmentation, tokenization.

Input formats are offline files: Medline-like PMID/TI/AB text blocks or a
3-column TSV (id, title, abstract). All offsets are Unicode scalar offsets
into NFC-normalized text.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources


class TokenKind(str, Enum):
    WORD = "word"
    NUMBER = "number"
    PUNCTUATION = "punctuation"
    SYMBOL = "symbol"


@dataclass(frozen=True)
class Token:
    text: str
    span: tuple[int, int]  # offsets within the sentence
    kind: TokenKind


@dataclass
class Sentence:
    doc_id: str
    index: int
    text: str
    span: tuple[int, int]  # offsets within the abstract
    tokens: list[Token] = field(default_factory=list)


@dataclass
class Document:
    id: str
    title: str
    abstract_text: str
    sentences: list[Sentence] = field(default_factory=list)


@dataclass
class RecordError:
    line: int
    message: str


@dataclass
class ParseResult:
    documents: list[Document]
    skipped_empty: int = 0
    errors: list[RecordError] = field(default_factory=list)


class CorpusFormatError(ValueError):
    """Fatal corpus-level problem (e.g. undecodable bytes)."""


def _load_default_abbreviations() -> frozenset[str]:
    text = resources.files("genic.data").joinpath("abbreviations.txt").read_text("utf-8")
    abbrevs = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            abbrevs.add(line.rstrip(".").lower())
    return frozenset(abbrevs)


_DEFAULT_ABBREVIATIONS: frozenset[str] | None = None


def default_abbreviations() -> frozenset[str]:
    global _DEFAULT_ABBREVIATIONS
    if _DEFAULT_ABBREVIATIONS is None:
        _DEFAULT_ABBREVIATIONS = _load_default_abbreviations()
    return _DEFAULT_ABBREVIATIONS


# A sentence boundary is {., !, ?} followed by whitespace and a capital or
# digit, unless the preceding word is a protected abbreviation or a single
# capital letter (species abbreviations like "B. subtilis").
_BOUNDARY_RE = re.compile(r"[.!?](?=\s+[A-Z0-9])")
_LAST_WORD_RE = re.compile(r"(\S+)$")


def segment_sentences(text: str, abbreviations: frozenset[str] | None = None) -> list[tuple[int, int]]:
    """Return (start, end) sentence spans covering all non-whitespace content."""
    if abbreviations is None:
        abbreviations = default_abbreviations()
    boundaries = []
    for m in _BOUNDARY_RE.finditer(text):
        pos = m.start()
        before = _LAST_WORD_RE.search(text[:pos])
        if before is not None and m.group(0) == ".":
            word = before.group(1)
            if len(word) == 1 and word.isupper():
                continue  # "B." in "B. subtilis"
            if word.rstrip(".").lower() in abbreviations:
                continue
        boundaries.append(pos + 1)

    spans = []
    start = 0
    for b in boundaries + [len(text)]:
        chunk = text[start:b]
        lstripped = chunk.lstrip()
        if lstripped:
            s = start + (len(chunk) - len(lstripped))
            e = s + len(lstripped.rstrip())
            spans.append((s, e))
        start = b
    return spans


# Words keep internal hyphens and digits ("Spo0A", "SYGP-ORF50") and accept
# any Unicode letter; everything else is emitted one character at a time.
_TOKEN_RE = re.compile(r"[^\W_](?:(?:['-]|[^\W_])*(?:'|[^\W_]))?|\S")
_PUNCT = set(".,;:!?()[]{}\"'`-/")


def tokenize(sentence_text: str) -> list[Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(sentence_text):
        text = m.group(0)
        if text[0].isalnum():
            kind = TokenKind.NUMBER if text.isdigit() else TokenKind.WORD
        elif text in _PUNCT:
            kind = TokenKind.PUNCTUATION
        else:
            kind = TokenKind.SYMBOL
        tokens.append(Token(text=text, span=(m.start(), m.end()), kind=kind))
    return tokens


def build_document(doc_id: str, title: str, abstract: str,
                   abbreviations: frozenset[str] | None = None) -> Document:
    abstract = unicodedata.normalize("NFC", abstract)
    title = unicodedata.normalize("NFC", title)
    doc = Document(id=doc_id, title=title, abstract_text=abstract)
    for i, (s, e) in enumerate(segment_sentences(abstract, abbreviations)):
        sent = Sentence(doc_id=doc_id, index=i, text=abstract[s:e], span=(s, e))
        sent.tokens = tokenize(sent.text)
        doc.sentences.append(sent)
    return doc


def parse_corpus_file(data: bytes, format: str = "medline_txt") -> ParseResult:
    """Parse an offline corpus file into Documents.

    Records with an empty abstract are skipped and counted; malformed records
    are reported with their line number and processing continues.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusFormatError(f"corpus file is not valid UTF-8: {exc}") from exc
    text = unicodedata.normalize("NFC", text)

    if format == "medline_txt":
        return _parse_medline(text)
    if format == "plain_tsv":
        return _parse_tsv(text)
    raise CorpusFormatError(f"unsupported corpus format: {format!r}")


_FIELD_RE = re.compile(r"^([A-Z]{2,4})\s*-\s?(.*)$")


def _parse_medline(text: str) -> ParseResult:
    result = ParseResult(documents=[])
    lines = text.splitlines()
    record: dict[str, list[str]] = {}
    record_start = 1
    current_field: str | None = None

    def flush(line_no: int) -> None:
        nonlocal record, current_field
        if not record:
            return
        pmid = " ".join(record.get("PMID", [])).strip()
        title = " ".join(record.get("TI", [])).strip()
        abstract = " ".join(record.get("AB", [])).strip()
        if not pmid:
            result.errors.append(RecordError(line=record_start, message="record has no PMID"))
        elif not abstract:
            result.skipped_empty += 1
        else:
            result.documents.append(build_document(pmid, title, abstract))
        record = {}
        current_field = None

    for i, line in enumerate(lines, start=1):
        if not line.strip():
            flush(i)
            record_start = i + 1
            continue
        if line[0].isspace():
            # continuation line
            if current_field is None:
                result.errors.append(RecordError(line=i, message="continuation line outside a field"))
            else:
                record[current_field].append(line.strip())
            continue
        m = _FIELD_RE.match(line)
        if m is None:
            result.errors.append(RecordError(line=i, message=f"unrecognized line: {line[:40]!r}"))
            continue
        current_field = m.group(1)
        record.setdefault(current_field, []).append(m.group(2).strip())
    flush(len(lines) + 1)
    return result


def _parse_tsv(text: str) -> ParseResult:
    result = ParseResult(documents=[])
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            result.errors.append(RecordError(line=i, message=f"expected 3 tab-separated columns, got {len(parts)}"))
            continue
        doc_id, title, abstract = (p.strip() for p in parts)
        if not doc_id:
            result.errors.append(RecordError(line=i, message="empty id column"))
        elif not abstract:
            result.skipped_empty += 1
        else:
            result.documents.append(build_document(doc_id, title, abstract))
    return result
