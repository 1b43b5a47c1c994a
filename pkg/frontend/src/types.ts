/** Shared domain types mirroring the annotation service's JSON shapes. */

export type Role = "interaction" | "agent" | "target" | "confidence";

export interface AnnotationSpan {
  role: Role;
  index: number | null; // agents/targets carry a 1-based index
  outer: [number, number]; // frame span (AF/TF/IF/CF), char range
  inner: [number, number]; // entity span (A/T/I/C), char range
  attrs: Record<string, string>;
}

export interface InteractionFrame {
  id: string;
  attrs: Record<string, string>;
  span: [number, number] | null;
  spans: AnnotationSpan[];
}

export interface AnnotationSchema {
  frame_attributes: Record<string, string[]>;
  span_attributes: Record<string, Record<string, string[]>>;
  reserved_tags?: string[];
}

export interface Violation {
  code: string;
  message: string;
  frame_id: string | null;
}

export const ROLE_TAGS: Record<Role, [string, string]> = {
  interaction: ["IF", "I"],
  agent: ["AF", "A"],
  target: ["TF", "T"],
  confidence: ["CF", "C"],
};

export function outerTag(span: AnnotationSpan): string {
  return ROLE_TAGS[span.role][0] + (span.index === null ? "" : String(span.index));
}

export function innerTag(span: AnnotationSpan): string {
  return ROLE_TAGS[span.role][1] + (span.index === null ? "" : String(span.index));
}

export function cloneFrame(frame: InteractionFrame): InteractionFrame {
  return {
    id: frame.id,
    attrs: { ...frame.attrs },
    span: frame.span ? [frame.span[0], frame.span[1]] : null,
    spans: frame.spans.map((s) => ({
      role: s.role,
      index: s.index,
      outer: [s.outer[0], s.outer[1]],
      inner: [s.inner[0], s.inner[1]],
      attrs: { ...s.attrs },
    })),
  };
}

/** Structural frame-list equality, ignoring span ordering. */
export function framesEqual(a: InteractionFrame[], b: InteractionFrame[]): boolean {
  const key = (f: InteractionFrame) =>
    JSON.stringify([
      f.id,
      Object.entries(f.attrs).sort(),
      f.spans
        .map((s) =>
          JSON.stringify([s.role, s.index, s.outer, s.inner, Object.entries(s.attrs).sort()]),
        )
        .sort(),
    ]);
  if (a.length !== b.length) return false;
  const ka = a.map(key).sort();
  const kb = b.map(key).sort();
  return ka.every((k, i) => k === kb[i]);
}
