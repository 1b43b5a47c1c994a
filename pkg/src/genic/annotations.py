"""Genic-interaction annotation frames: XML parsing, validation, serialization.

The implemented tag subset is GENIC-INTERACTION with IF/I, AF*/A*, TF*/T*
and CF/C children. Spans are character ranges into the whitespace-normalized
sentence text. Serialization is canonical (fixed attribute order, schema
nesting), so parse . serialize is the identity on valid frames.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

FRAME_TAG = "GENIC-INTERACTION"
FRAME_ATTR_ORDER = ("id", "type", "assertion", "regulation", "uncertainty",
                    "self-contained", "text-clarity")
AGENT_ATTR_ORDER = ("type", "role", "direct")
TARGET_ATTR_ORDER = ("type",)

ROLE_TAGS = {
    "interaction": ("IF", "I"),
    "agent": ("AF", "A"),
    "target": ("TF", "T"),
    "confidence": ("CF", "C"),
}
_OUTER_TAG_RE = re.compile(r"^(IF|AF(\d+)|TF(\d+)|CF)$")
_INNER_FOR_OUTER = {"IF": "I", "AF": "A", "TF": "T", "CF": "C"}


class AnnotationParseError(ValueError):
    pass


@dataclass
class AnnotationSpan:
    role: str  # agent | target | interaction | confidence
    index: int | None  # agents/targets carry a 1-based index
    outer: tuple[int, int]  # frame span (AF/TF/IF/CF), char range
    inner: tuple[int, int]  # entity span (A/T/I/C), char range
    attrs: dict[str, str] = field(default_factory=dict)

    def outer_tag(self) -> str:
        base = ROLE_TAGS[self.role][0]
        return base + (str(self.index) if self.index is not None else "")

    def inner_tag(self) -> str:
        base = ROLE_TAGS[self.role][1]
        return base + (str(self.index) if self.index is not None else "")


@dataclass
class InteractionFrame:
    id: str
    attrs: dict[str, str]
    spans: list[AnnotationSpan]
    span: tuple[int, int] | None = None  # region covered by the frame element
    sentence_ref: tuple[str, int] | None = None

    def to_json_obj(self) -> dict:
        return {
            "id": self.id,
            "attrs": dict(self.attrs),
            "span": list(self.span) if self.span else None,
            "spans": [{"role": s.role, "index": s.index, "outer": list(s.outer),
                       "inner": list(s.inner), "attrs": dict(s.attrs)} for s in self.spans],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "InteractionFrame":
        return cls(
            id=str(obj["id"]),
            attrs=dict(obj.get("attrs", {})),
            span=tuple(obj["span"]) if obj.get("span") else None,
            spans=[AnnotationSpan(role=s["role"], index=s.get("index"),
                                  outer=tuple(s["outer"]), inner=tuple(s["inner"]),
                                  attrs=dict(s.get("attrs", {})))
                   for s in obj.get("spans", [])],
        )


@dataclass
class OpaqueSpan:
    tag: str
    attrs: dict[str, str]
    range: tuple[int, int]


@dataclass
class ParsedAnnotation:
    text: str
    frames: list[InteractionFrame]
    opaque: list[OpaqueSpan] = field(default_factory=list)


@dataclass(frozen=True)
class Violation:
    code: str  # vocabulary | nesting | uniqueness | bounds | missing-interaction | bad-id
    message: str
    frame_id: str | None = None


def load_schema(path: str | Path | None = None) -> dict:
    if path is None:
        text = resources.files("genic.data").joinpath("schema.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return json.loads(text)


# ---------------------------------------------------------------- parsing

_BARE_ATTR_RE = re.compile(r"([\w-]+)\s*=\s*([^\s\"'<>]+)")


def _quote_bare_attributes(xml: str) -> str:
    """Quote `type=protein` style attributes so ElementTree accepts them."""

    def fix_tag(m: re.Match) -> str:
        inner = _BARE_ATTR_RE.sub(lambda a: f'{a.group(1)}="{a.group(2)}"', m.group(2))
        return "<" + m.group(1) + inner + ">"

    return re.sub(r"<([\w-]+)((?:[^>\"']|\"[^\"]*\"|'[^']*')*)>", fix_tag, xml)


class _TextAccumulator:
    """Builds the whitespace-normalized plain text and tracks offsets."""

    def __init__(self):
        self.parts: list[str] = []
        self.length = 0

    def add(self, raw: str | None) -> None:
        if not raw:
            return
        words = raw.split()
        if not words:
            return
        chunk = " ".join(words)
        if self.length > 0:
            self.parts.append(" ")
            self.length += 1
        self.parts.append(chunk)
        self.length += len(chunk)

    @property
    def pos(self) -> int:
        return self.length

    def text(self) -> str:
        return "".join(self.parts)


def parse_annotation_xml(xml: str) -> ParsedAnnotation:
    """Parse an annotated sentence into plain text plus frames.

    Tolerates the unquoted-attribute style of legacy annotation files.
    Unknown tags inside a frame are an error; unknown top-level tags are
    preserved opaquely.
    """
    prepared = _quote_bare_attributes(xml)
    try:
        root = ET.fromstring(f"<__root__>{prepared}</__root__>")
    except ET.ParseError as exc:
        raise AnnotationParseError(f"malformed annotation XML: {exc}") from exc

    acc = _TextAccumulator()
    frames: list[InteractionFrame] = []
    opaque: list[OpaqueSpan] = []

    acc.add(root.text)
    for el in root:
        if el.tag == FRAME_TAG:
            frames.append(_parse_frame(el, acc))
        else:
            start = acc.pos
            _add_subtree_text(el, acc)
            opaque.append(OpaqueSpan(tag=el.tag, attrs=dict(el.attrib), range=(start, acc.pos)))
        acc.add(el.tail)
    text = acc.text()

    def snap(span: tuple[int, int]) -> tuple[int, int]:
        s, e = span
        while s < e and text[s] == " ":
            s += 1
        while e > s and text[e - 1] == " ":
            e -= 1
        return (s, e)

    for frame in frames:
        frame.span = snap(frame.span) if frame.span else None
        for sp in frame.spans:
            sp.outer = snap(sp.outer)
            sp.inner = snap(sp.inner)
    for op in opaque:
        op.range = snap(op.range)
    return ParsedAnnotation(text=text, frames=frames, opaque=opaque)


def _add_subtree_text(el: ET.Element, acc: _TextAccumulator) -> None:
    acc.add(el.text)
    for child in el:
        _add_subtree_text(child, acc)
        acc.add(child.tail)


def _parse_frame(el: ET.Element, acc: _TextAccumulator) -> InteractionFrame:
    frame_start = acc.pos
    spans: list[AnnotationSpan] = []
    acc.add(el.text)
    for child in el:
        m = _OUTER_TAG_RE.match(child.tag)
        if m is None:
            raise AnnotationParseError(
                f"unknown tag <{child.tag}> inside <{FRAME_TAG}>")
        base = child.tag[:2]
        index = int(child.tag[2:]) if child.tag[2:] else None
        role = {"IF": "interaction", "AF": "agent", "TF": "target", "CF": "confidence"}[base]
        expected_inner = _INNER_FOR_OUTER[base] + (child.tag[2:] or "")

        outer_start = acc.pos
        inner = None
        attrs: dict[str, str] = {}
        acc.add(child.text)
        for inner_el in child:
            if inner_el.tag != expected_inner:
                raise AnnotationParseError(
                    f"expected <{expected_inner}> inside <{child.tag}>, got <{inner_el.tag}>")
            if inner is not None:
                raise AnnotationParseError(f"multiple <{expected_inner}> inside <{child.tag}>")
            if len(inner_el):
                raise AnnotationParseError(f"<{expected_inner}> must contain only text")
            istart = acc.pos
            acc.add(inner_el.text)
            inner = (istart, acc.pos)
            attrs = dict(inner_el.attrib)
            acc.add(inner_el.tail)
        if inner is None:
            raise AnnotationParseError(f"<{child.tag}> has no <{expected_inner}> child")
        spans.append(AnnotationSpan(role=role, index=index, outer=(outer_start, acc.pos),
                                    inner=inner, attrs=attrs))
        acc.add(child.tail)

    return InteractionFrame(id=el.attrib.get("id", ""),
                            attrs={k: v for k, v in el.attrib.items() if k != "id"},
                            spans=spans, span=(frame_start, acc.pos))


# ---------------------------------------------------------- serialization

def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _attr_string(attrs: dict[str, str], order: tuple[str, ...]) -> str:
    parts = []
    for key in order:
        if key in attrs:
            parts.append(f'{key}="{attrs[key]}"')
    for key in sorted(attrs):
        if key not in order:
            parts.append(f'{key}="{attrs[key]}"')
    return (" " + " ".join(parts)) if parts else ""


def serialize_annotation_xml(frames: list[InteractionFrame], sentence_text: str) -> str:
    """Canonical serialization; empty frame list yields the bare text."""
    violations = []
    for frame in frames:
        violations.extend(validate_frame(frame, text_length=len(sentence_text)))
    if violations:
        raise ValueError("cannot serialize invalid frames: "
                         + "; ".join(v.message for v in violations))

    ordered = sorted(frames, key=lambda f: (f.span or (0, len(sentence_text)))[0])
    out = []
    pos = 0
    for frame in ordered:
        fstart, fend = frame.span or (0, len(sentence_text))
        out.append(_escape(sentence_text[pos:fstart]))
        frame_attrs = {"id": frame.id, **frame.attrs}
        out.append(f"<{FRAME_TAG}{_attr_string(frame_attrs, FRAME_ATTR_ORDER)}>")
        cursor = fstart
        for span in sorted(frame.spans, key=lambda s: s.outer[0]):
            out.append(_escape(sentence_text[cursor:span.outer[0]]))
            attr_order = AGENT_ATTR_ORDER if span.role == "agent" else TARGET_ATTR_ORDER
            out.append(f"<{span.outer_tag()}>")
            out.append(_escape(sentence_text[span.outer[0]:span.inner[0]]))
            out.append(f"<{span.inner_tag()}{_attr_string(span.attrs, attr_order)}>")
            out.append(_escape(sentence_text[span.inner[0]:span.inner[1]]))
            out.append(f"</{span.inner_tag()}>")
            out.append(_escape(sentence_text[span.inner[1]:span.outer[1]]))
            out.append(f"</{span.outer_tag()}>")
            cursor = span.outer[1]
        out.append(_escape(sentence_text[cursor:fend]))
        out.append(f"</{FRAME_TAG}>")
        pos = fend
    out.append(_escape(sentence_text[pos:]))
    return "".join(out)


# ------------------------------------------------------------- validation

def validate_frame(frame: InteractionFrame, schema: dict | None = None,
                   text_length: int | None = None) -> list[Violation]:
    """Collect every violation; an empty list means the frame is valid."""
    if schema is None:
        schema = load_schema()
    violations: list[Violation] = []
    fid = frame.id or None

    if not frame.id:
        violations.append(Violation("bad-id", "frame has no id", fid))

    for key, allowed in schema["frame_attributes"].items():
        value = frame.attrs.get(key)
        if value is not None and value not in allowed:
            violations.append(Violation(
                "vocabulary", f"attribute {key}={value!r} not in {allowed}", fid))

    if not any(s.role == "interaction" for s in frame.spans):
        violations.append(Violation("missing-interaction", "no Interaction span", fid))

    seen_indices: set[tuple[str, int]] = set()
    for span in frame.spans:
        if span.role not in ROLE_TAGS:
            violations.append(Violation("vocabulary", f"unknown span role {span.role!r}", fid))
            continue
        os_, oe = span.outer
        is_, ie = span.inner
        if not (os_ <= is_ <= ie <= oe):
            violations.append(Violation(
                "nesting", f"{span.inner_tag()} span {span.inner} outside "
                           f"{span.outer_tag()} span {span.outer}", fid))
        if os_ < 0 or (text_length is not None and oe > text_length) or os_ > oe:
            violations.append(Violation("bounds", f"{span.outer_tag()} span {span.outer} "
                                                  "out of bounds", fid))
        if span.index is not None:
            key = (span.role, span.index)
            if key in seen_indices:
                violations.append(Violation(
                    "uniqueness", f"duplicate {span.outer_tag()} index", fid))
            seen_indices.add(key)
        allowed_attrs = schema["span_attributes"].get(span.role, {})
        for key, value in span.attrs.items():
            if key not in allowed_attrs:
                violations.append(Violation(
                    "vocabulary", f"unknown attribute {key!r} on {span.inner_tag()}", fid))
            elif value not in allowed_attrs[key]:
                violations.append(Violation(
                    "vocabulary", f"{span.inner_tag()} {key}={value!r} "
                                  f"not in {allowed_attrs[key]}", fid))

        if frame.span is not None:
            if not (frame.span[0] <= os_ and oe <= frame.span[1]):
                violations.append(Violation(
                    "nesting", f"{span.outer_tag()} span outside its frame span", fid))

    return violations


def frames_equal(a: list[InteractionFrame], b: list[InteractionFrame]) -> bool:
    """Structural equality, ignoring span ordering."""
    if len(a) != len(b):
        return False
    key = lambda f: (f.id, sorted(f.attrs.items()),
                     sorted((s.role, s.index, s.outer, s.inner, sorted(s.attrs.items()))
                            for s in f.spans))
    return sorted(map(key, a)) == sorted(map(key, b))
