"""Annotation frame parsing, validation, and canonical serialization."""

from pathlib import Path

import pytest

from genic.annotations import (
    FRAME_TAG,
    AnnotationParseError,
    AnnotationSpan,
    InteractionFrame,
    ParsedAnnotation,
    _quote_bare_attributes,
    frames_equal,
    load_schema,
    parse_annotation_xml,
    serialize_annotation_xml,
    validate_frame,
)

FIXTURES = Path(__file__).parent / "fixtures"
LISTING = (FIXTURES / "listing_interaction.xml").read_text("utf-8")

EXPECTED_TEXT = ("low level of GerE , activated transcription of CotD "
                 "by GerE RNA polymerase , but in vitro")


def test_quote_bare_attributes():
    assert _quote_bare_attributes('<A1 type=protein role="x">') == \
        '<A1 type="protein" role="x">'
    # quoted values with spaces survive untouched
    assert _quote_bare_attributes('<X a="b c">') == '<X a="b c">'


def test_parse_listing_text_and_structure():
    parsed = parse_annotation_xml(LISTING)
    assert parsed.text == EXPECTED_TEXT
    assert len(parsed.frames) == 1
    frame = parsed.frames[0]
    assert frame.id == "1"
    assert frame.attrs["regulation"] == "activate"
    assert frame.attrs["self-contained"] == "yes"
    roles = [(s.role, s.index) for s in frame.spans]
    assert roles == [("interaction", None), ("agent", 1), ("interaction", None),
                     ("target", 1), ("agent", 2), ("confidence", None)]


def test_parse_listing_spans_index_text():
    parsed = parse_annotation_xml(LISTING)
    frame = parsed.frames[0]

    def inner_text(span):
        return parsed.text[span.inner[0]:span.inner[1]]

    by_tag = {s.outer_tag(): s for s in frame.spans if s.role != "interaction"}
    assert inner_text(by_tag["AF1"]) == "GerE"
    assert inner_text(by_tag["TF1"]) == "CotD"
    assert inner_text(by_tag["AF2"]) == "GerE RNA polymerase"
    assert inner_text(by_tag["CF"]) == "in vitro"
    # "but" lies inside the CF region but outside the C span
    cf = by_tag["CF"]
    assert parsed.text[cf.outer[0]:cf.outer[1]] == "but in vitro"
    assert by_tag["AF1"].attrs == {"type": "protein", "role": "modulate", "direct": "yes"}
    assert by_tag["AF2"].attrs == {"type": "protein", "role": "required"}


def test_parse_listing_has_no_violations():
    parsed = parse_annotation_xml(LISTING)
    assert validate_frame(parsed.frames[0], text_length=len(parsed.text)) == []


def test_serialize_is_a_fixpoint_of_parse():
    parsed = parse_annotation_xml(LISTING)
    canonical = serialize_annotation_xml(parsed.frames, parsed.text)
    again = parse_annotation_xml(canonical)
    assert again.text == parsed.text
    assert frames_equal(again.frames, parsed.frames)
    # canonical form is stable
    assert serialize_annotation_xml(again.frames, again.text) == canonical


def test_frame_json_round_trip():
    parsed = parse_annotation_xml(LISTING)
    frame = parsed.frames[0]
    again = InteractionFrame.from_json_obj(frame.to_json_obj())
    assert frames_equal([again], [frame])
    assert again.span == frame.span


def test_opaque_tags_preserved_outside_frames():
    parsed = parse_annotation_xml('before <EM lang="la">in vivo</EM> after')
    assert parsed.text == "before in vivo after"
    assert parsed.frames == []
    assert [(o.tag, o.attrs, parsed.text[o.range[0]:o.range[1]])
            for o in parsed.opaque] == [("EM", {"lang": "la"}, "in vivo")]


def test_plain_text_passthrough():
    parsed = parse_annotation_xml("geneG binds geneH .")
    assert parsed == ParsedAnnotation(text="geneG binds geneH .", frames=[], opaque=[])


def test_parse_errors():
    with pytest.raises(AnnotationParseError):
        parse_annotation_xml("<GENIC-INTERACTION id='1'><IF>no inner</IF></GENIC-INTERACTION>")
    with pytest.raises(AnnotationParseError):
        parse_annotation_xml("<GENIC-INTERACTION id='1'><XX><I>x</I></XX></GENIC-INTERACTION>")
    with pytest.raises(AnnotationParseError):
        parse_annotation_xml("<GENIC-INTERACTION id='1'><IF><T1>x</T1></IF></GENIC-INTERACTION>")
    with pytest.raises(AnnotationParseError):
        parse_annotation_xml("<unclosed")


# ------------------------------------------------------------- validation

def minimal_frame(**overrides):
    frame = InteractionFrame(
        id="1",
        attrs={"type": "transcriptional", "assertion": "exist",
               "regulation": "activate", "uncertainty": "certain",
               "self-contained": "yes", "text-clarity": "good"},
        spans=[
            AnnotationSpan(role="interaction", index=None, outer=(6, 15), inner=(6, 15)),
            AnnotationSpan(role="agent", index=1, outer=(0, 5), inner=(0, 5),
                           attrs={"type": "protein"}),
            AnnotationSpan(role="target", index=1, outer=(16, 21), inner=(16, 21),
                           attrs={"type": "gene"}),
        ],
        span=(0, 21),
    )
    for key, value in overrides.items():
        setattr(frame, key, value)
    return frame


def codes(frame, text_length=21):
    return [v.code for v in validate_frame(frame, text_length=text_length)]


def test_valid_frame_has_no_violations():
    assert codes(minimal_frame()) == []


def test_bad_id_violation():
    assert codes(minimal_frame(id="")) == ["bad-id"]


def test_vocabulary_violation_on_frame_attr():
    frame = minimal_frame()
    frame.attrs["regulation"] = "banish"
    assert codes(frame) == ["vocabulary"]


def test_vocabulary_violation_on_span_attr():
    frame = minimal_frame()
    frame.spans[1].attrs["role"] = "sings"
    assert codes(frame) == ["vocabulary"]
    frame.spans[1].attrs = {"made-up": "x"}
    assert codes(frame) == ["vocabulary"]


def test_missing_interaction_violation():
    frame = minimal_frame()
    frame.spans = [s for s in frame.spans if s.role != "interaction"]
    assert codes(frame) == ["missing-interaction"]


def test_nesting_violation():
    frame = minimal_frame()
    frame.spans[1].inner = (0, 9)  # inner extends past its outer
    assert "nesting" in codes(frame)
    frame = minimal_frame()
    frame.spans[2].outer = (16, 30)  # outer escapes the frame span
    got = codes(frame, text_length=40)
    assert "nesting" in got


def test_bounds_violation():
    frame = minimal_frame()
    frame.spans[2].outer = (16, 99)
    frame.spans[2].inner = (16, 99)
    frame.span = (0, 99)
    assert "bounds" in codes(frame)


def test_uniqueness_violation():
    frame = minimal_frame()
    frame.spans.append(AnnotationSpan(role="agent", index=1, outer=(16, 21),
                                      inner=(16, 21), attrs={"type": "protein"}))
    assert "uniqueness" in codes(frame)


def test_multiple_interaction_spans_allowed():
    frame = minimal_frame()
    frame.spans.append(AnnotationSpan(role="interaction", index=None,
                                      outer=(16, 21), inner=(16, 21)))
    assert codes(frame) == []


def test_serialize_rejects_invalid_frames():
    with pytest.raises(ValueError):
        serialize_annotation_xml([minimal_frame(id="")], "x" * 21)


def test_serialize_escapes_markup_characters():
    text = "a < b binds c"
    out = serialize_annotation_xml([], text)
    assert out == "a &lt; b binds c"
    assert parse_annotation_xml(out).text == text


def test_load_schema_vocabularies():
    schema = load_schema()
    assert "activate" in schema["frame_attributes"]["regulation"]
    assert "protein" in schema["span_attributes"]["agent"]["type"]
