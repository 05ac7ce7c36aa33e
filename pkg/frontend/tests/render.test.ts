import { describe, expect, it } from "vitest";

import { renderSpans } from "../src/render";

describe("span rendering", () => {
  it("turn 0 is one generated span", () => {
    expect(renderSpans("the dog sat", null)).toEqual([
      { text: "the dog sat", style: "generated" },
    ]);
  });

  it("empty hypothesis renders nothing", () => {
    expect(renderSpans("", null)).toEqual([]);
  });

  it("constraint and fill spans get distinct styles", () => {
    const spans = [
      { kind: "c" as const, start: 0, end: 7 },
      { kind: "b" as const, start: 7, end: 11 },
    ];
    expect(renderSpans("the cat sat", spans)).toEqual([
      { text: "the cat", style: "constraint" },
      { text: " sat", style: "generated" },
    ]);
  });

  it("empty blank fills are skipped", () => {
    const spans = [
      { kind: "b" as const, start: 0, end: 0 },
      { kind: "c" as const, start: 0, end: 3 },
    ];
    expect(renderSpans("abc", spans)).toEqual([{ text: "abc", style: "constraint" }]);
  });

  it("multi-byte characters are sliced by code point", () => {
    const spans = [
      { kind: "c" as const, start: 0, end: 2 },
      { kind: "b" as const, start: 2, end: 3 },
    ];
    expect(renderSpans("我们好", spans)).toEqual([
      { text: "我们", style: "constraint" },
      { text: "好", style: "generated" },
    ]);
  });
});
