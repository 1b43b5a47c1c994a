/** Client-side frame validation: the same rules the service applies on PUT,
 * driven by the schema fetched from /schema, so the editor can reject a
 * save before the network round-trip.
 */

import {
  AnnotationSchema,
  InteractionFrame,
  ROLE_TAGS,
  Violation,
  innerTag,
  outerTag,
} from "./types.js";

export function validateFrame(
  frame: InteractionFrame,
  schema: AnnotationSchema,
  textLength: number | null = null,
): Violation[] {
  const violations: Violation[] = [];
  const fid = frame.id || null;

  if (!frame.id) violations.push({ code: "bad-id", message: "frame has no id", frame_id: fid });

  for (const [key, allowed] of Object.entries(schema.frame_attributes)) {
    const value = frame.attrs[key];
    if (value !== undefined && !allowed.includes(value)) {
      violations.push({
        code: "vocabulary",
        message: `attribute ${key}=${JSON.stringify(value)} not allowed`,
        frame_id: fid,
      });
    }
  }

  if (!frame.spans.some((s) => s.role === "interaction")) {
    violations.push({
      code: "missing-interaction",
      message: "no Interaction span",
      frame_id: fid,
    });
  }

  const seen = new Set<string>();
  for (const span of frame.spans) {
    if (!(span.role in ROLE_TAGS)) {
      violations.push({
        code: "vocabulary",
        message: `unknown span role ${JSON.stringify(span.role)}`,
        frame_id: fid,
      });
      continue;
    }
    const [os, oe] = span.outer;
    const [is_, ie] = span.inner;
    if (!(os <= is_ && is_ <= ie && ie <= oe)) {
      violations.push({
        code: "nesting",
        message: `${innerTag(span)} span outside ${outerTag(span)} span`,
        frame_id: fid,
      });
    }
    if (os < 0 || (textLength !== null && oe > textLength) || os > oe) {
      violations.push({
        code: "bounds",
        message: `${outerTag(span)} span out of bounds`,
        frame_id: fid,
      });
    }
    if (span.index !== null) {
      const key = `${span.role}:${span.index}`;
      if (seen.has(key)) {
        violations.push({
          code: "uniqueness",
          message: `duplicate ${outerTag(span)} index`,
          frame_id: fid,
        });
      }
      seen.add(key);
    }
    const allowedAttrs = schema.span_attributes[span.role] ?? {};
    for (const [key, value] of Object.entries(span.attrs)) {
      if (!(key in allowedAttrs)) {
        violations.push({
          code: "vocabulary",
          message: `unknown attribute ${JSON.stringify(key)} on ${innerTag(span)}`,
          frame_id: fid,
        });
      } else if (!allowedAttrs[key].includes(value)) {
        violations.push({
          code: "vocabulary",
          message: `${innerTag(span)} ${key}=${JSON.stringify(value)} not allowed`,
          frame_id: fid,
        });
      }
    }
    if (frame.span !== null) {
      if (!(frame.span[0] <= os && oe <= frame.span[1])) {
        violations.push({
          code: "nesting",
          message: `${outerTag(span)} span outside its frame span`,
          frame_id: fid,
        });
      }
    }
  }
  return violations;
}

export function validateFrames(
  frames: InteractionFrame[],
  schema: AnnotationSchema,
  textLength: number | null = null,
): Violation[] {
  return frames.flatMap((f) => validateFrame(f, schema, textLength));
}
