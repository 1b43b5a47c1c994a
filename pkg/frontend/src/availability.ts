/** Which tags can be applied right now.
 *
 * A pure function of the schema and the current selection context, so the
 * tag pane can be recomputed on every state change with no side effects.
 */

import { EDITOR_TAGS, EditorState, EditorTag, frameForSelection } from "./state.js";
import { AnnotationSchema } from "./types.js";

export interface TagAvailability {
  tag: EditorTag;
  enabled: boolean;
  reason: string;
}

export function tagAvailability(
  schema: AnnotationSchema,
  state: EditorState,
): TagAvailability[] {
  return EDITOR_TAGS.map((tag) => {
    if (state.selection === null) {
      return { tag, enabled: false, reason: "select a text range first" };
    }
    const sel = state.selection;
    const at = frameForSelection(state, sel);
    if (tag === "GENIC-INTERACTION") {
      if (at !== null) {
        return { tag, enabled: false, reason: "selection overlaps an existing frame" };
      }
      return { tag, enabled: true, reason: "creates a new interaction frame" };
    }
    if (at === "crosses") {
      return { tag, enabled: false, reason: "selection crosses a frame boundary" };
    }
    if (!(tag in schema.span_attributes)) {
      return { tag, enabled: false, reason: "role not in schema" };
    }
    if (at !== null) {
      for (const span of state.frames[at].spans) {
        if (sel[1] > span.outer[0] && sel[0] < span.outer[1]) {
          return { tag, enabled: false, reason: "selection overlaps an existing span" };
        }
      }
      return { tag, enabled: true, reason: "adds a span to the enclosing frame" };
    }
    return { tag, enabled: true, reason: "creates a frame around the selection" };
  });
}
