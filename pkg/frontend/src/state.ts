/** Editor state and the pure editing operations behind the four panes.
 *
 * All operations are non-destructive: they return a new state and never
 * touch the service; persistence happens only through save() in ops.ts.
 */

import { AnnotationSchema, AnnotationSpan, InteractionFrame, Role, cloneFrame } from "./types.js";
import { serializeAnnotationXml } from "./xml.js";

export type Selection = [number, number];

/** Tags offered in the tag pane: the frame element plus its four span roles. */
export type EditorTag = "GENIC-INTERACTION" | Role;
export const EDITOR_TAGS: EditorTag[] = [
  "GENIC-INTERACTION",
  "interaction",
  "agent",
  "target",
  "confidence",
];

export interface EditorState {
  docId: string;
  text: string;
  frames: InteractionFrame[];
  version: number;
  selection: Selection | null;
  selectedFrame: number | null; // index into frames
  selectedSpan: [number, number] | null; // (frame index, span index)
  dirty: boolean;
  conflict: { currentVersion: number } | null;
  violations: import("./types.js").Violation[];
}

export function newEditorState(
  docId: string,
  text: string,
  frames: InteractionFrame[],
  version: number,
): EditorState {
  return {
    docId,
    text,
    frames: frames.map(cloneFrame),
    version,
    selection: null,
    selectedFrame: null,
    selectedSpan: null,
    dirty: false,
    conflict: null,
    violations: [],
  };
}

function withFrames(state: EditorState, frames: InteractionFrame[]): EditorState {
  return { ...state, frames, dirty: true, violations: [] };
}

export function setSelection(state: EditorState, selection: Selection | null): EditorState {
  if (selection && (selection[0] < 0 || selection[1] > state.text.length || selection[0] > selection[1])) {
    throw new Error(`selection ${selection} out of bounds`);
  }
  return { ...state, selection };
}

export function selectFrame(state: EditorState, index: number | null): EditorState {
  if (index !== null && (index < 0 || index >= state.frames.length)) {
    throw new Error(`no frame at index ${index}`);
  }
  return { ...state, selectedFrame: index, selectedSpan: null };
}

export function selectSpan(state: EditorState, frame: number, span: number): EditorState {
  if (frame < 0 || frame >= state.frames.length || span < 0 || span >= state.frames[frame].spans.length) {
    throw new Error(`no span (${frame}, ${span})`);
  }
  return { ...state, selectedFrame: frame, selectedSpan: [frame, span] };
}

function snap(text: string, [s, e]: Selection): Selection {
  while (s < e && text[s] === " ") s += 1;
  while (e > s && text[e - 1] === " ") e -= 1;
  return [s, e];
}

function nextFrameId(frames: InteractionFrame[]): string {
  let max = 0;
  for (const f of frames) {
    const n = Number(f.id);
    if (Number.isInteger(n) && n > max) max = n;
  }
  return String(max + 1);
}

function nextSpanIndex(frame: InteractionFrame, role: Role): number {
  let max = 0;
  for (const s of frame.spans) {
    if (s.role === role && s.index !== null && s.index > max) max = s.index;
  }
  return max + 1;
}

/** The frame a selection belongs to: the selected frame, or the unique frame
 * whose span contains the selection. Returns null when no frame applies and
 * "crosses" when the selection straddles a frame boundary.
 */
export function frameForSelection(
  state: EditorState,
  selection: Selection,
): number | null | "crosses" {
  if (state.selectedFrame !== null) {
    const span = state.frames[state.selectedFrame].span;
    if (span && (selection[0] < span[0] || selection[1] > span[1])) return "crosses";
    return state.selectedFrame;
  }
  for (let i = 0; i < state.frames.length; i++) {
    const span = state.frames[i].span;
    if (!span) continue;
    if (selection[0] >= span[0] && selection[1] <= span[1]) return i;
    if (selection[1] > span[0] && selection[0] < span[1]) return "crosses";
  }
  return null;
}

/** Apply a tag to a text range. Inner defaults to the outer range; the
 * listing style where the entity span is narrower than its frame span
 * (e.g. `<IF><I>low level</I> of</IF>`) passes both ranges.
 *
 * Tagging GENIC-INTERACTION creates a new empty frame; tagging a role with
 * no applicable frame creates a frame around the selection first (order-free
 * insertion). Returns the new state with the new span/frame selected.
 */
export function applyTag(
  state: EditorState,
  tag: EditorTag,
  outer: Selection,
  inner: Selection | null = null,
): EditorState {
  const o = snap(state.text, outer);
  const i = inner === null ? o : snap(state.text, inner);
  if (o[0] > i[0] || i[1] > o[1]) {
    throw new Error(`inner range ${i} outside outer range ${o}`);
  }

  const frames = state.frames.map(cloneFrame);
  if (tag === "GENIC-INTERACTION") {
    const placed = frameForSelection({ ...state, selectedFrame: null }, o);
    if (placed !== null) throw new Error("selection overlaps an existing frame");
    frames.push({ id: nextFrameId(frames), attrs: {}, span: o, spans: [] });
    return { ...withFrames(state, frames), selectedFrame: frames.length - 1, selectedSpan: null };
  }

  let at = frameForSelection(state, o);
  if (at === "crosses") throw new Error("selection crosses a frame boundary");
  if (at === null) {
    frames.push({ id: nextFrameId(frames), attrs: {}, span: o, spans: [] });
    at = frames.length - 1;
  }
  const frame = frames[at];
  for (const existing of frame.spans) {
    if (o[1] > existing.outer[0] && o[0] < existing.outer[1]) {
      throw new Error("selection overlaps an existing span");
    }
  }
  const span: AnnotationSpan = {
    role: tag,
    index: tag === "agent" || tag === "target" ? nextSpanIndex(frame, tag) : null,
    outer: o,
    inner: i,
    attrs: {},
  };
  frame.spans.push(span);
  return {
    ...withFrames(state, frames),
    selectedFrame: at,
    selectedSpan: [at, frame.spans.length - 1],
  };
}

export function setFrameAttribute(
  state: EditorState,
  frameIndex: number,
  key: string,
  value: string,
): EditorState {
  const frames = state.frames.map(cloneFrame);
  frames[frameIndex].attrs[key] = value;
  return withFrames(state, frames);
}

export function setSpanAttribute(
  state: EditorState,
  frameIndex: number,
  spanIndex: number,
  key: string,
  value: string,
): EditorState {
  const frames = state.frames.map(cloneFrame);
  frames[frameIndex].spans[spanIndex].attrs[key] = value;
  return withFrames(state, frames);
}

export function removeSpan(state: EditorState, frameIndex: number, spanIndex: number): EditorState {
  const frames = state.frames.map(cloneFrame);
  frames[frameIndex].spans.splice(spanIndex, 1);
  return { ...withFrames(state, frames), selectedSpan: null };
}

/** The attribute keys the attribute pane offers for the current selection. */
export function attributeKeys(state: EditorState, schema: AnnotationSchema): string[] {
  if (state.selectedSpan !== null) {
    const [fi, si] = state.selectedSpan;
    const role = state.frames[fi].spans[si].role;
    return Object.keys(schema.span_attributes[role] ?? {});
  }
  if (state.selectedFrame !== null) return Object.keys(schema.frame_attributes);
  return [];
}

/** Contents of the XML pane: always the canonical serialization. */
export function xmlPane(state: EditorState): string {
  return serializeAnnotationXml(state.frames, state.text);
}
