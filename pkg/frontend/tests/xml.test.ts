import { describe, expect, test } from "vitest";

import { serializeAnnotationXml } from "../src/xml.js";
import { InteractionFrame } from "../src/types.js";
import { loadListing } from "./helpers.js";

describe("canonical XML serialization", () => {
  test("matches the backend serializer on the reference sentence", () => {
    const listing = loadListing();
    expect(serializeAnnotationXml(listing.frames, listing.text)).toBe(listing.canonical_xml);
  });

  test("empty frame list yields the bare text", () => {
    expect(serializeAnnotationXml([], "GerE activates cotD .")).toBe("GerE activates cotD .");
  });

  test("escapes markup characters in text runs", () => {
    const frame: InteractionFrame = {
      id: "1",
      attrs: {},
      span: [0, 9],
      spans: [
        { role: "interaction", index: null, outer: [0, 5], inner: [0, 5], attrs: {} },
      ],
    };
    const xml = serializeAnnotationXml([frame], "a < b & c");
    expect(xml).toContain("a &lt; b</I>");
    expect(xml).toContain("&amp; c");
  });

  test("orders frame and span attributes canonically", () => {
    const frame: InteractionFrame = {
      id: "7",
      attrs: { "text-clarity": "good", type: "transcriptional" },
      span: [0, 4],
      spans: [
        {
          role: "agent",
          index: 1,
          outer: [0, 4],
          inner: [0, 4],
          attrs: { direct: "yes", type: "protein" },
        },
      ],
    };
    const xml = serializeAnnotationXml([frame], "GerE");
    expect(xml).toContain('<GENIC-INTERACTION id="7" type="transcriptional" text-clarity="good">');
    expect(xml).toContain('<A1 type="protein" direct="yes">');
  });
});
