"""Lexical-constraint templates: construction, matching, prompt rendering.

A template is an alternating sequence of constraint segments and blanks.
Constraints must appear verbatim and in order in a satisfying candidate;
blanks absorb arbitrary (possibly empty) text.  Deleted text is kept as
hints only and never binds generation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .edits import CONSTRAINT_TAGS, TaggedText


class InvalidTemplate(ValueError):
    pass


class EmptyTemplateError(InvalidTemplate):
    pass


@dataclass(frozen=True)
class Constraint:
    text: str


@dataclass(frozen=True)
class Blank:
    pass


Segment = Constraint | Blank

BLANK = Blank()


@dataclass(frozen=True)
class LexicalTemplate:
    segments: tuple[Segment, ...]
    # (segment index the deleted run precedes, deleted text)
    hints: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.segments:
            raise EmptyTemplateError("template needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if type(a) is type(b):
                raise InvalidTemplate("adjacent same-kind segments must be merged")
        for seg in self.segments:
            if isinstance(seg, Constraint) and not seg.text:
                raise InvalidTemplate("constraint text must be non-empty")

    @property
    def constraints(self) -> list[str]:
        return [s.text for s in self.segments if isinstance(s, Constraint)]

    @property
    def n_blanks(self) -> int:
        return sum(1 for s in self.segments if isinstance(s, Blank))

    def to_wire(self) -> dict:
        segs = [
            {"c": s.text} if isinstance(s, Constraint) else {"b": True}
            for s in self.segments
        ]
        return {
            "segments": segs,
            "hints": [{"at": at, "text": text} for at, text in self.hints],
        }

    @classmethod
    def from_wire(cls, d: dict) -> "LexicalTemplate":
        segs: list[Segment] = []
        for s in d["segments"]:
            if "c" in s:
                segs.append(Constraint(s["c"]))
            elif s.get("b"):
                segs.append(BLANK)
            else:
                raise InvalidTemplate(f"bad wire segment: {s!r}")
        hints = tuple((h["at"], h["text"]) for h in d.get("hints", ()))
        return cls(segments=tuple(segs), hints=hints)


@dataclass(frozen=True)
class MatchResult:
    satisfied: bool
    # one fill string per blank, in order, when satisfied
    fills: tuple[str, ...] | None = None


def build_template(t: TaggedText) -> LexicalTemplate:
    """Convert a tagged revision into a template.

    Maximal runs of k/i/r characters become constraints, runs of b
    characters become blanks (the placeholder contributes no text), and
    d runs are dropped from the segments but recorded as hints, so two
    constraints separated only by deleted text merge.
    """
    segments: list[Segment] = []
    hints: list[tuple[int, str]] = []
    for tag, chars in t.runs():
        if tag in CONSTRAINT_TAGS:
            if segments and isinstance(segments[-1], Constraint):
                segments[-1] = Constraint(segments[-1].text + chars)
            else:
                segments.append(Constraint(chars))
        elif tag == "b":
            if not (segments and isinstance(segments[-1], Blank)):
                segments.append(BLANK)
        else:  # deleted run: hint only
            hints.append((len(segments), chars))
    if not segments:
        raise EmptyTemplateError("tagged text yields no constraints and no blanks")
    return LexicalTemplate(segments=tuple(segments), hints=tuple(hints))


def matches(tpl: LexicalTemplate, candidate: str) -> MatchResult:
    """Decide whether the candidate satisfies the template.

    The candidate must decompose as the in-order concatenation of the
    constraint texts with arbitrary (possibly empty) strings in place of
    blanks; material before the first / after the last segment is allowed
    only when the template starts / ends with a blank.  Computed by dynamic
    programming over (segment, position); the returned fill witness is the
    leftmost one.
    """
    segs = tpl.segments
    k, n = len(segs), len(candidate)
    # ok[i][p]: segments[i:] can match candidate[p:] exactly to the end
    ok = [[False] * (n + 1) for _ in range(k + 1)]
    ok[k][n] = True
    for i in range(k - 1, -1, -1):
        seg = segs[i]
        if isinstance(seg, Constraint):
            t = seg.text
            for p in range(n - len(t), -1, -1):
                ok[i][p] = candidate.startswith(t, p) and ok[i + 1][p + len(t)]
        else:
            reachable = False
            for p in range(n, -1, -1):
                reachable = reachable or ok[i + 1][p]
                ok[i][p] = reachable
    if not ok[0][0]:
        return MatchResult(satisfied=False)

    fills: list[str] = []
    p = 0
    for i, seg in enumerate(segs):
        if isinstance(seg, Constraint):
            p += len(seg.text)
        else:
            q = p
            while not ok[i + 1][q]:
                q += 1
            fills.append(candidate[p:q])
            p = q
    return MatchResult(satisfied=True, fills=tuple(fills))


def to_prompt_string(tpl: LexicalTemplate) -> str:
    """Render for prompting: constraints verbatim, each blank as ``_``,
    single spaces between adjacent segments; hints are omitted."""
    return " ".join(
        seg.text if isinstance(seg, Constraint) else "_" for seg in tpl.segments
    )


def constraint_char_spans(tpl: LexicalTemplate, m: MatchResult) -> list[dict]:
    """Character spans of each segment inside a satisfying candidate,
    derived from the match witness (used for UI highlighting)."""
    if not m.satisfied or m.fills is None:
        raise ValueError("witness requires a satisfied match")
    spans: list[dict] = []
    p = 0
    fill_idx = 0
    for seg in tpl.segments:
        if isinstance(seg, Constraint):
            spans.append({"kind": "c", "start": p, "end": p + len(seg.text)})
            p += len(seg.text)
        else:
            fill = m.fills[fill_idx]
            fill_idx += 1
            spans.append({"kind": "b", "start": p, "end": p + len(fill)})
            p += len(fill)
    return spans
