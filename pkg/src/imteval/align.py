"""Edit-distance machinery: character scripts, span merging, word marking.

The single-pass post-editing cost is defined procedurally: take the optimal
character-level Levenshtein script (deterministic backtrace), merge maximal
runs of non-match steps into spans, and price the spans with the keystroke
cost model.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .edits import EditOp, delete, insert, op_cost, replace


class StepOp(Enum):
    MATCH = "match"
    SUBSTITUTE = "substitute"
    DELETE_CHAR = "delete_char"
    INSERT_CHAR = "insert_char"


@dataclass(frozen=True)
class Step:
    """One backtrace step; ``i``/``j`` index into hypothesis/reference."""

    op: StepOp
    i: int
    j: int


@dataclass(frozen=True)
class CharEditScript:
    hyp: str
    ref: str
    steps: tuple[Step, ...]

    def replay(self) -> str:
        """Apply the steps to the hypothesis; must reproduce the reference."""
        out: list[str] = []
        for s in self.steps:
            if s.op is StepOp.MATCH:
                out.append(self.hyp[s.i])
            elif s.op in (StepOp.SUBSTITUTE, StepOp.INSERT_CHAR):
                out.append(self.ref[s.j])
            # deletions emit nothing
        return "".join(out)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance between two sequences (strings or word lists)."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        ai = a[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            cur[j] = min(sub, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[m]


def char_script(hyp: str, ref: str) -> CharEditScript:
    """Minimal-cost character script with a deterministic backtrace.

    The table holds suffix distances and the walk runs left to right,
    preferring match/substitute over delete over insert at every tie, so
    matches are taken as early as possible.
    """
    n, m = len(hyp), len(ref)
    # suffix[i][j] = distance between hyp[i:] and ref[j:]
    suffix = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        suffix[i][m] = n - i
    for j in range(m + 1):
        suffix[n][j] = m - j
    for i in range(n - 1, -1, -1):
        hi = hyp[i]
        row, below = suffix[i], suffix[i + 1]
        for j in range(m - 1, -1, -1):
            diag = below[j + 1] + (0 if hi == ref[j] else 1)
            row[j] = min(diag, below[j] + 1, row[j + 1] + 1)

    steps: list[Step] = []
    i = j = 0
    while i < n or j < m:
        if i < n and j < m:
            equal = hyp[i] == ref[j]
            if suffix[i][j] == suffix[i + 1][j + 1] + (0 if equal else 1):
                steps.append(Step(StepOp.MATCH if equal else StepOp.SUBSTITUTE, i, j))
                i += 1
                j += 1
                continue
        if i < n and suffix[i][j] == suffix[i + 1][j] + 1:
            steps.append(Step(StepOp.DELETE_CHAR, i, j))
            i += 1
            continue
        steps.append(Step(StepOp.INSERT_CHAR, i, j))
        j += 1
    return CharEditScript(hyp=hyp, ref=ref, steps=tuple(steps))


def merge_spans(script: CharEditScript) -> list[EditOp]:
    """Merge maximal runs of non-match steps into edit operations.

    A run of only deletions becomes one delete span, a run of only
    insertions one insert, anything mixed (or any substitution) one replace
    whose payload is the run's target characters.  Match runs are implicit
    keeps and produce no op.
    """
    ops: list[EditOp] = []
    run: list[Step] = []

    def flush() -> None:
        if not run:
            return
        kinds = {s.op for s in run}
        consuming = [s for s in run if s.op in (StepOp.SUBSTITUTE, StepOp.DELETE_CHAR)]
        payload = "".join(
            script.ref[s.j] for s in run if s.op in (StepOp.SUBSTITUTE, StepOp.INSERT_CHAR)
        )
        if kinds == {StepOp.DELETE_CHAR}:
            ops.append(delete(consuming[0].i, consuming[-1].i + 1))
        elif kinds == {StepOp.INSERT_CHAR}:
            ops.append(insert(run[0].i, payload))
        else:
            start = consuming[0].i if consuming else run[0].i
            end = consuming[-1].i + 1 if consuming else run[0].i
            ops.append(replace(start, end, payload))
        run.clear()

    for step in script.steps:
        if step.op is StepOp.MATCH:
            flush()
        else:
            run.append(step)
    flush()
    return ops


def mtpe_cost(hyp: str, ref: str) -> tuple[int, int]:
    """(keystroke cost, span count) of correcting ``hyp`` into ``ref`` in one
    pass; the span count doubles as the interaction patience threshold."""
    spans = merge_spans(char_script(hyp, ref))
    return sum(op_cost(op) for op in spans), len(spans)


@dataclass(frozen=True)
class CorrectnessMarking:
    """Per-hypothesis-word correctness against the reference.

    ``ref_index`` maps each correct hypothesis word index to the reference
    word index it matches; matched pairs form a common subsequence.
    """

    flags: tuple[bool, ...]
    ref_index: dict[int, int]


def mark_correct(hyp_words: Sequence[str], ref_words: Sequence[str]) -> CorrectnessMarking:
    """Mark hypothesis words correct via a longest common subsequence.

    Deterministic tie-break: among equal-length LCSs prefer the one using
    the earliest hypothesis indices, then the earliest reference indices.
    """
    n, m = len(hyp_words), len(ref_words)
    # suffix LCS lengths
    L = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if hyp_words[i] == ref_words[j]:
                L[i][j] = L[i + 1][j + 1] + 1
            else:
                L[i][j] = max(L[i + 1][j], L[i][j + 1])
    flags = [False] * n
    ref_index: dict[int, int] = {}
    i = j = 0
    while i < n and j < m and L[i][j] > 0:
        if hyp_words[i] == ref_words[j] and L[i][j] == L[i + 1][j + 1] + 1:
            flags[i] = True
            ref_index[i] = j
            i += 1
            j += 1
        elif L[i][j + 1] == L[i][j]:
            # skipping this reference word keeps the budget, which lets the
            # current hypothesis word match as early as possible
            j += 1
        else:
            i += 1
    return CorrectnessMarking(flags=tuple(flags), ref_index=ref_index)
