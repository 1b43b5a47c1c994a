/** Load and save: the two operations that touch the service. */

import { ApiClient } from "./api.js";
import { EditorState, newEditorState } from "./state.js";
import { AnnotationSchema, Violation } from "./types.js";
import { validateFrames } from "./validate.js";

export async function loadDocument(client: ApiClient, id: string): Promise<EditorState> {
  const doc = await client.getDocument(id);
  if (doc === null) throw new Error(`unknown document ${JSON.stringify(id)}`);
  return newEditorState(doc.id, doc.text, doc.frames, doc.version);
}

export type SaveOutcome =
  | { kind: "saved"; state: EditorState }
  | { kind: "conflict"; state: EditorState; currentVersion: number }
  | { kind: "invalid"; state: EditorState; violations: Violation[] };

/** Optimistic save: client-side validation first, then PUT with the version
 * the edits were based on. A 409 marks the state as conflicted (the UI shows
 * a dialog offering reload); a 422 records the violations for highlighting.
 * The local edits are preserved in every failure case.
 */
export async function save(
  client: ApiClient,
  state: EditorState,
  schema: AnnotationSchema,
): Promise<SaveOutcome> {
  const violations = validateFrames(state.frames, schema, state.text.length);
  if (violations.length > 0) {
    return { kind: "invalid", state: { ...state, violations }, violations };
  }
  const result = await client.putAnnotations(state.docId, state.version, state.frames);
  switch (result.kind) {
    case "ok":
      return {
        kind: "saved",
        state: { ...state, version: result.version, dirty: false, conflict: null, violations: [] },
      };
    case "conflict":
      return {
        kind: "conflict",
        state: { ...state, conflict: { currentVersion: result.currentVersion } },
        currentVersion: result.currentVersion,
      };
    case "invalid":
      return {
        kind: "invalid",
        state: { ...state, violations: result.violations },
        violations: result.violations,
      };
    case "not_found":
      throw new Error(`unknown document ${JSON.stringify(state.docId)}`);
  }
}
