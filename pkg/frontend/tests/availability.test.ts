import { describe, expect, test } from "vitest";

import { tagAvailability } from "../src/availability.js";
import { applyTag, newEditorState, setSelection } from "../src/state.js";
import { loadSchema } from "./helpers.js";

const SCHEMA = loadSchema();
const TEXT = "GerE activates transcription of cotD in vitro .";

function byTag(state: Parameters<typeof tagAvailability>[1]) {
  return Object.fromEntries(tagAvailability(SCHEMA, state).map((a) => [a.tag, a]));
}

describe("tag availability", () => {
  test("everything is disabled without a selection", () => {
    const avail = tagAvailability(SCHEMA, newEditorState("d", TEXT, [], 0));
    expect(avail).toHaveLength(5);
    expect(avail.every((a) => !a.enabled)).toBe(true);
    expect(avail[0].reason).toMatch(/select a text range/);
  });

  test("fresh selection enables the frame tag and role tags", () => {
    const state = setSelection(newEditorState("d", TEXT, [], 0), [0, 4]);
    const avail = byTag(state);
    expect(avail["GENIC-INTERACTION"].enabled).toBe(true);
    expect(avail["agent"].enabled).toBe(true);
    expect(avail["agent"].reason).toMatch(/creates a frame/);
  });

  test("inside an existing frame, frame tag disables and roles attach", () => {
    let state = applyTag(newEditorState("d", TEXT, [], 0), "GENIC-INTERACTION", [0, 36]);
    state = setSelection(state, [0, 4]);
    const avail = byTag(state);
    expect(avail["GENIC-INTERACTION"].enabled).toBe(false);
    expect(avail["GENIC-INTERACTION"].reason).toMatch(/overlaps an existing frame/);
    expect(avail["interaction"].enabled).toBe(true);
    expect(avail["interaction"].reason).toMatch(/enclosing frame/);
  });

  test("selection over an existing span disables role tags", () => {
    let state = applyTag(newEditorState("d", TEXT, [], 0), "GENIC-INTERACTION", [0, 36]);
    state = applyTag(state, "agent", [0, 4]);
    state = setSelection(state, [0, 9]);
    const avail = byTag(state);
    expect(avail["agent"].enabled).toBe(false);
    expect(avail["agent"].reason).toMatch(/overlaps an existing span/);
  });

  test("selection straddling a frame boundary disables role tags", () => {
    let state = applyTag(newEditorState("d", TEXT, [], 0), "GENIC-INTERACTION", [0, 14]);
    state = { ...setSelection(state, [5, 28]), selectedFrame: null };
    const avail = byTag(state);
    expect(avail["agent"].enabled).toBe(false);
    expect(avail["agent"].reason).toMatch(/crosses a frame boundary/);
  });

  test("is a pure function: identical inputs give identical output", () => {
    const state = setSelection(newEditorState("d", TEXT, [], 0), [0, 4]);
    expect(tagAvailability(SCHEMA, state)).toEqual(tagAvailability(SCHEMA, state));
  });
});
