// Turn a hypothesis plus the server's match-witness spans into styled
// segments: constraint text and freshly generated text get distinct colors.

import type { SpanInfo } from "./api.js";

export type SpanStyle = "constraint" | "generated";

export interface StyledSpan {
  text: string;
  style: SpanStyle;
}

export function renderSpans(hypothesis: string, spans: SpanInfo[] | null): StyledSpan[] {
  const chars = [...hypothesis];
  if (!spans) {
    // turn 0 (or a violating reply): everything is machine-generated
    return hypothesis ? [{ text: hypothesis, style: "generated" }] : [];
  }
  const out: StyledSpan[] = [];
  for (const span of spans) {
    if (span.end <= span.start) {
      continue; // empty blank fill
    }
    out.push({
      text: chars.slice(span.start, span.end).join(""),
      style: span.kind === "c" ? "constraint" : "generated",
    });
  }
  return out;
}
