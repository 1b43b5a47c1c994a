/** Canonical XML serialization of annotation frames.
 *
 * Mirrors the service's serializer exactly (fixed attribute order, schema
 * nesting), so the XML pane always shows what the server would store.
 */

import { AnnotationSpan, InteractionFrame, innerTag, outerTag } from "./types.js";

export const FRAME_TAG = "GENIC-INTERACTION";
const FRAME_ATTR_ORDER = [
  "id",
  "type",
  "assertion",
  "regulation",
  "uncertainty",
  "self-contained",
  "text-clarity",
];
const AGENT_ATTR_ORDER = ["type", "role", "direct"];
const TARGET_ATTR_ORDER = ["type"];

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function attrString(attrs: Record<string, string>, order: string[]): string {
  const parts: string[] = [];
  for (const key of order) {
    if (key in attrs) parts.push(`${key}="${attrs[key]}"`);
  }
  for (const key of Object.keys(attrs).sort()) {
    if (!order.includes(key)) parts.push(`${key}="${attrs[key]}"`);
  }
  return parts.length ? " " + parts.join(" ") : "";
}

export function serializeAnnotationXml(
  frames: InteractionFrame[],
  sentenceText: string,
): string {
  const ordered = [...frames].sort(
    (a, b) => (a.span ?? [0, sentenceText.length])[0] - (b.span ?? [0, sentenceText.length])[0],
  );
  const out: string[] = [];
  let pos = 0;
  for (const frame of ordered) {
    const [fstart, fend] = frame.span ?? [0, sentenceText.length];
    out.push(escapeXml(sentenceText.slice(pos, fstart)));
    const frameAttrs = { id: frame.id, ...frame.attrs };
    out.push(`<${FRAME_TAG}${attrString(frameAttrs, FRAME_ATTR_ORDER)}>`);
    let cursor = fstart;
    const spans: AnnotationSpan[] = [...frame.spans].sort((a, b) => a.outer[0] - b.outer[0]);
    for (const span of spans) {
      out.push(escapeXml(sentenceText.slice(cursor, span.outer[0])));
      const order = span.role === "agent" ? AGENT_ATTR_ORDER : TARGET_ATTR_ORDER;
      out.push(`<${outerTag(span)}>`);
      out.push(escapeXml(sentenceText.slice(span.outer[0], span.inner[0])));
      out.push(`<${innerTag(span)}${attrString(span.attrs, order)}>`);
      out.push(escapeXml(sentenceText.slice(span.inner[0], span.inner[1])));
      out.push(`</${innerTag(span)}>`);
      out.push(escapeXml(sentenceText.slice(span.inner[1], span.outer[1])));
      out.push(`</${outerTag(span)}>`);
      cursor = span.outer[1];
    }
    out.push(escapeXml(sentenceText.slice(cursor, fend)));
    out.push(`</${FRAME_TAG}>`);
    pos = fend;
  }
  out.push(escapeXml(sentenceText.slice(pos)));
  return out.join("");
}
