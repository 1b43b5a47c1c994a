import { describe, expect, test } from "vitest";

import {
  applyTag,
  attributeKeys,
  newEditorState,
  selectFrame,
  selectSpan,
  setFrameAttribute,
  setSelection,
  setSpanAttribute,
  xmlPane,
} from "../src/state.js";
import { serializeAnnotationXml } from "../src/xml.js";
import { loadSchema } from "./helpers.js";

const SCHEMA = loadSchema();
const TEXT = "GerE activates transcription of cotD in vitro .";

function fresh() {
  return newEditorState("doc1", TEXT, [], 0);
}

describe("editor state operations", () => {
  test("loading yields a clean state", () => {
    const state = fresh();
    expect(state.dirty).toBe(false);
    expect(state.frames).toEqual([]);
    expect(xmlPane(state)).toBe(TEXT);
  });

  test("tagging a region creates a frame and sets the dirty flag", () => {
    const state = applyTag(fresh(), "GENIC-INTERACTION", [0, 36]);
    expect(state.frames).toHaveLength(1);
    expect(state.frames[0].id).toBe("1");
    expect(state.frames[0].span).toEqual([0, 36]);
    expect(state.dirty).toBe(true);
    expect(state.selectedFrame).toBe(0);
  });

  test("role tags are order-free: interaction may come after agents", () => {
    let state = applyTag(fresh(), "GENIC-INTERACTION", [0, 36]);
    state = applyTag(state, "agent", [0, 4]);
    state = applyTag(state, "interaction", [5, 14]);
    expect(state.frames[0].spans.map((s) => s.role)).toEqual(["agent", "interaction"]);
  });

  test("agent/target indices auto-assign within a frame", () => {
    let state = applyTag(fresh(), "GENIC-INTERACTION", [0, 36]);
    state = applyTag(state, "agent", [0, 4]);
    state = applyTag(state, "target", [32, 36]);
    state = applyTag(state, "agent", [15, 28]);
    const byRole = state.frames[0].spans.map((s) => [s.role, s.index]);
    expect(byRole).toEqual([
      ["agent", 1],
      ["target", 1],
      ["agent", 2],
    ]);
  });

  test("tagging a role with no enclosing frame creates one around it", () => {
    const state = applyTag(fresh(), "agent", [0, 4]);
    expect(state.frames).toHaveLength(1);
    expect(state.frames[0].span).toEqual([0, 4]);
    expect(state.frames[0].spans[0].role).toBe("agent");
  });

  test("span boundaries snap off surrounding spaces", () => {
    const state = applyTag(fresh(), "agent", [0, 5]); // trailing space
    expect(state.frames[0].spans[0].inner).toEqual([0, 4]);
  });

  test("an explicit narrower inner range is kept", () => {
    let state = applyTag(fresh(), "GENIC-INTERACTION", [0, 36]);
    state = applyTag(state, "interaction", [5, 31], [5, 14]);
    expect(state.frames[0].spans[0].outer).toEqual([5, 31]);
    expect(state.frames[0].spans[0].inner).toEqual([5, 14]);
  });

  test("overlapping spans within a frame are rejected", () => {
    let state = applyTag(fresh(), "GENIC-INTERACTION", [0, 36]);
    state = applyTag(state, "agent", [0, 14]);
    expect(() => applyTag(state, "interaction", [5, 14])).toThrow(/overlaps/);
  });

  test("selection crossing a frame boundary is rejected", () => {
    const state = applyTag(fresh(), "GENIC-INTERACTION", [0, 14]);
    expect(() => applyTag({ ...state, selectedFrame: null }, "agent", [5, 28])).toThrow(
      /crosses a frame boundary/,
    );
  });

  test("XML pane always equals the canonical serialization", () => {
    let state = applyTag(fresh(), "GENIC-INTERACTION", [0, 36]);
    state = applyTag(state, "interaction", [5, 14]);
    state = setFrameAttribute(state, 0, "type", "transcriptional");
    expect(xmlPane(state)).toBe(serializeAnnotationXml(state.frames, state.text));
    expect(xmlPane(state)).toContain('type="transcriptional"');
  });

  test("attribute pane follows the selection", () => {
    let state = applyTag(fresh(), "GENIC-INTERACTION", [0, 36]);
    state = applyTag(state, "agent", [0, 4]);
    expect(attributeKeys(state, SCHEMA)).toEqual(["type", "role", "direct"]);
    state = selectFrame(state, 0);
    expect(attributeKeys(state, SCHEMA)).toEqual(Object.keys(SCHEMA.frame_attributes));
    state = selectSpan(state, 0, 0);
    state = setSpanAttribute(state, 0, 0, "type", "protein");
    expect(state.frames[0].spans[0].attrs.type).toBe("protein");
  });

  test("setSelection rejects out-of-bounds ranges", () => {
    expect(() => setSelection(fresh(), [0, 999])).toThrow(/out of bounds/);
    expect(setSelection(fresh(), [0, 4]).selection).toEqual([0, 4]);
  });
});
