import { readFileSync } from "node:fs";

import { AnnotationSchema, InteractionFrame } from "../src/types.js";

export function loadSchema(): AnnotationSchema {
  const url = new URL("../../src/genic/data/schema.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as AnnotationSchema;
}

export interface ListingFixture {
  text: string;
  frames: InteractionFrame[];
  canonical_xml: string;
}

/** The reference sentence: plain text, parsed frames, and the canonical XML
 * the backend emits for it (captured from the service's serializer, which
 * the backend test suite checks against the original annotated listing).
 */
export function loadListing(): ListingFixture {
  const url = new URL("./fixtures/listing.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as ListingFixture;
}
