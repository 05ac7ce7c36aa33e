"""Simulated user policies and the patience model.

Five policies map (current hypothesis, reference) to an edit batch or a
terminal decision: one-shot post-editing (mtpe), left-to-right completion
(l2r), random-anchor completion (rand), left-to-right infilling (l2ri) and
random-position infilling (randi).

Every emitted batch obeys one hard guarantee: the template built from it
matches the reference, i.e. the simulated user never issues constraints that
are inconsistent with their goal.  Constraint texts are always contiguous
reference chunks; payloads carry the separator characters needed to keep
that true, and those separators are charged as typed keystrokes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .align import char_script, mark_correct, merge_spans
from .edits import EditBatch, EditOp, blank_fill, insert, keep, replace
from .template import Blank, Constraint, LexicalTemplate, matches
from .text import Sentence, WordSegmentation, segment_text, tokenize


class PolicyKind(str, Enum):
    MTPE = "mtpe"
    L2R = "l2r"
    RAND = "rand"
    L2RI = "l2ri"
    RANDI = "randi"


_TOLERANCE = {
    PolicyKind.MTPE: 0,   # never queries constrained
    PolicyKind.L2R: 0,    # loses patience at the first violation
    PolicyKind.RAND: 3,
    PolicyKind.L2RI: 3,
    PolicyKind.RANDI: 3,
}


def tolerance(kind: PolicyKind) -> int:
    return _TOLERANCE[kind]


@dataclass(frozen=True)
class Accept:
    pass


@dataclass(frozen=True)
class Edit:
    batch: EditBatch


@dataclass(frozen=True)
class GiveUp:
    reason: str  # "turn_limit" | "violation_limit"


PolicyDecision = Accept | Edit | GiveUp


@dataclass
class PolicyState:
    kind: PolicyKind
    rng: random.Random
    violations: int = 0
    # rand only: reference word interval [a0, a1) of the current constraint
    anchor: tuple[int, int] | None = None
    last_template: LexicalTemplate | None = None


def new_state(kind: PolicyKind, seed: int) -> PolicyState:
    return PolicyState(kind=kind, rng=random.Random(seed))


def register_template(state: PolicyState, tpl: LexicalTemplate) -> None:
    """Called by the engine after it converts the batch into the query."""
    state.last_template = tpl


def on_violation(state: PolicyState) -> bool:
    """Record a constraint violation; True means the user gives up.

    Below the tolerance the policy restarts from the current translation:
    positional state is dropped, the violation count is kept.
    """
    state.violations += 1
    if state.violations > tolerance(state.kind):
        return True
    state.anchor = None
    state.last_template = None
    return False


def step(state: PolicyState, hyp: Sentence, ref: Sentence) -> PolicyDecision:
    if hyp.text == ref.text:
        return Accept()
    k = state.kind
    if k is PolicyKind.MTPE:
        return _mtpe_step(hyp, ref)
    if k is PolicyKind.L2R:
        return _l2r_step(hyp, ref)
    if k is PolicyKind.RAND:
        return _rand_step(state, hyp, ref)
    if k is PolicyKind.L2RI:
        return _infill_step(state, hyp, ref, random_gap=False)
    return _infill_step(state, hyp, ref, random_gap=True)


# --- mtpe ---------------------------------------------------------------------

def _mtpe_step(hyp: Sentence, ref: Sentence) -> PolicyDecision:
    ops = merge_spans(char_script(hyp.text, ref.text))
    return Edit(EditBatch(base=hyp, ops=tuple(ops)))


def mtpe_step(hyp: Sentence, ref: Sentence) -> PolicyDecision:
    if hyp.text == ref.text:
        return Accept()
    return _mtpe_step(hyp, ref)


# --- l2r ----------------------------------------------------------------------

def _l2r_step(hyp: Sentence, ref: Sentence) -> PolicyDecision:
    """Replace the leftmost incorrect word, blank away the suffix.

    The emitted template is always [constraint(reference word prefix), blank].
    """
    hseg, rseg = tokenize(hyp), tokenize(ref)
    hw, rw = hseg.words, rseg.words
    # longest word prefix whose covering text is identical on both sides
    p = 0
    while p < len(hw) and p < len(rw):
        if hyp.text[: hw[p][1]] != ref.text[: rw[p][1]]:
            break
        p += 1
    h_end = hw[p - 1][1] if p else 0
    r_end = rw[p - 1][1] if p else 0
    n = len(hyp.text)
    ops: list[EditOp] = []
    if p == len(rw):
        # reference complete; the extra suffix is redundant
        ops.append(blank_fill(h_end, n))
    elif p == len(hw):
        # hypothesis exhausted: append the next reference word
        payload = ref.text[r_end : rw[p][1]]
        ops.append(insert(n, payload))
        ops.append(blank_fill(n, n))
    else:
        (hw_lo, hw_hi), (rw_lo, rw_hi) = hw[p], rw[p]
        if hyp.text[h_end:hw_lo] == ref.text[r_end:rw_lo]:
            ops.append(replace(hw_lo, hw_hi, ref.text[rw_lo:rw_hi]))
        else:
            # separator mismatch: retype it together with the word
            ops.append(replace(h_end, hw_hi, ref.text[r_end:rw_hi]))
        ops.append(blank_fill(hw_hi, n) if hw_hi < n else blank_fill(n, n))
    return Edit(EditBatch(base=hyp, ops=tuple(ops)))


# --- rand ---------------------------------------------------------------------

def _rand_step(state: PolicyState, hyp: Sentence, ref: Sentence) -> PolicyDecision:
    hseg, rseg = tokenize(hyp), tokenize(ref)
    if state.anchor is None or state.last_template is None:
        return _rand_first_move(state, hyp, ref, hseg, rseg)
    witness = matches(state.last_template, hyp.text)
    if not witness.satisfied:  # pragma: no cover - engine restarts before this
        state.anchor = None
        return _rand_first_move(state, hyp, ref, hseg, rseg)

    # locate the constraint span inside the hypothesis via the witness
    segs = state.last_template.segments
    c0 = len(witness.fills[0]) if isinstance(segs[0], Blank) else 0
    constraint_text = next(s.text for s in segs if isinstance(s, Constraint))
    c1 = c0 + len(constraint_text)
    a0, a1 = state.anchor

    go_left = state.rng.random() < 0.5
    for direction in ((-1, 1) if go_left else (1, -1)):
        walker = _rand_walk_left if direction < 0 else _rand_walk_right
        decision = walker(state, hyp, ref, rseg, a0, a1, c0, c1)
        if decision is not None:
            return decision
    # both directions complete only when hypothesis equals reference,
    # which the caller already turned into Accept
    return Accept()  # pragma: no cover


def _outer_left(hyp: Sentence, c0: int, a0: int) -> list[EditOp]:
    if c0 > 0:
        return [blank_fill(0, c0)]
    if a0 > 0:
        return [blank_fill(0, 0)]  # reference words remain on this side
    return []


def _outer_right(hyp: Sentence, c1: int, a1: int, n_ref: int) -> list[EditOp]:
    n = len(hyp.text)
    if c1 < n:
        return [blank_fill(c1, n)]
    if a1 < n_ref:
        return [blank_fill(n, n)]
    return []


def _rand_walk_left(
    state: PolicyState,
    hyp: Sentence,
    ref: Sentence,
    rseg: WordSegmentation,
    a0: int,
    a1: int,
    c0: int,
    c1: int,
) -> PolicyDecision | None:
    rw = rseg.words
    n_ref = len(rw)
    # extend over already-correct material
    while a0 > 0:
        chunk = ref.text[rw[a0 - 1][0] : rw[a0][0]]  # word + trailing separator
        if c0 >= len(chunk) and hyp.text[c0 - len(chunk) : c0] == chunk:
            c0 -= len(chunk)
            a0 -= 1
        else:
            break
    if a0 == 0:
        if c0 == 0:
            return None  # this side is complete
        # leftover junk before a completed left side
        ops = [blank_fill(0, c0)] + _outer_right(hyp, c1, a1, n_ref)
        state.anchor = (a0, a1)
        return Edit(EditBatch(base=hyp, ops=tuple(ops)))

    j = a0 - 1
    r0 = rw[a0][0]
    left_words = segment_text(hyp.text[:c0], hyp.lang).words
    if left_words:
        ws, we = left_words[-1]
        if hyp.text[we:c0] == ref.text[rw[j][1] : r0]:
            rep = replace(ws, we, ref.text[rw[j][0] : rw[j][1]])
        else:
            rep = replace(ws, c0, ref.text[rw[j][0] : r0])
        corrected_start = ws
    elif c0 > 0:
        rep = replace(0, c0, ref.text[rw[j][0] : r0])
        corrected_start = 0
    else:
        rep = insert(0, ref.text[rw[j][0] : r0])
        corrected_start = 0
    ops = _outer_left(hyp, corrected_start, j) + [rep]
    ops += _outer_right(hyp, c1, a1, n_ref)
    state.anchor = (j, a1)
    return Edit(EditBatch(base=hyp, ops=tuple(ops)))


def _rand_walk_right(
    state: PolicyState,
    hyp: Sentence,
    ref: Sentence,
    rseg: WordSegmentation,
    a0: int,
    a1: int,
    c0: int,
    c1: int,
) -> PolicyDecision | None:
    rw = rseg.words
    n_ref = len(rw)
    n = len(hyp.text)
    while a1 < n_ref:
        chunk = ref.text[rw[a1 - 1][1] : rw[a1][1]]  # separator + next word
        if hyp.text[c1 : c1 + len(chunk)] == chunk:
            c1 += len(chunk)
            a1 += 1
        else:
            break
    if a1 == n_ref:
        if c1 == n:
            return None  # this side is complete
        ops = _outer_left(hyp, c0, a0) + [blank_fill(c1, n)]
        state.anchor = (a0, a1)
        return Edit(EditBatch(base=hyp, ops=tuple(ops)))

    j = a1
    r1 = rw[a1 - 1][1]
    right_words = segment_text(hyp.text[c1:], hyp.lang).words
    if right_words:
        ws, we = (right_words[0][0] + c1, right_words[0][1] + c1)
        if hyp.text[c1:ws] == ref.text[r1 : rw[j][0]]:
            rep = replace(ws, we, ref.text[rw[j][0] : rw[j][1]])
        else:
            rep = replace(c1, we, ref.text[r1 : rw[j][1]])
        corrected_end = we
    elif c1 < n:
        rep = replace(c1, n, ref.text[r1 : rw[j][1]])
        corrected_end = n
    else:
        rep = insert(n, ref.text[r1 : rw[j][1]])
        corrected_end = n
    ops = _outer_left(hyp, c0, a0) + [rep]
    if corrected_end < n:
        ops.append(blank_fill(corrected_end, n))
    elif j + 1 < n_ref:
        ops.append(blank_fill(n, n))
    state.anchor = (a0, j + 1)
    return Edit(EditBatch(base=hyp, ops=tuple(ops)))


def _rand_first_move(
    state: PolicyState,
    hyp: Sentence,
    ref: Sentence,
    hseg: WordSegmentation,
    rseg: WordSegmentation,
) -> PolicyDecision:
    """Anchor on a random correct word, blanking away prefix and suffix."""
    hw, rw = hseg.words, rseg.words
    n_ref = len(rw)
    n = len(hyp.text)
    if n_ref == 0:
        # goal is empty: everything is redundant
        state.anchor = None
        return Edit(EditBatch(base=hyp, ops=(blank_fill(0, n),)))
    if not hw:
        ops: list[EditOp] = [insert(0, ref.text[rw[0][0] : rw[0][1]])]
        if n_ref > 1:
            ops.append(blank_fill(0, 0))
        state.anchor = (0, 1)
        return Edit(EditBatch(base=hyp, ops=tuple(ops)))
    marking = mark_correct(hseg.word_texts(), rseg.word_texts())
    correct = [i for i, ok in enumerate(marking.flags) if ok]
    if not correct:
        # no start point exists; create one out of the first word
        ws, we = hw[0]
        ops = [replace(ws, we, ref.text[rw[0][0] : rw[0][1]])]
        if we < n:
            ops.append(blank_fill(we, n))
        elif n_ref > 1:
            ops.append(blank_fill(n, n))
        state.anchor = (0, 1)
        return Edit(EditBatch(base=hyp, ops=tuple(ops)))

    pick = correct[state.rng.randrange(len(correct))]
    j = marking.ref_index[pick]
    ws, we = hw[pick]
    ops = []
    if ws > 0:
        ops.append(blank_fill(0, ws))
    elif j > 0:
        ops.append(blank_fill(0, 0))
    ops.append(keep(ws, we))
    if we < n:
        ops.append(blank_fill(we, n))
    elif j + 1 < n_ref:
        ops.append(blank_fill(n, n))
    state.anchor = (j, j + 1)
    return Edit(EditBatch(base=hyp, ops=tuple(ops)))


# --- l2ri / randi ----------------------------------------------------------------

@dataclass(frozen=True)
class _Gap:
    h_lo: int
    h_hi: int
    r_lo: int
    r_hi: int
    ref_words: tuple[int, ...]  # reference word indices missing in this gap


def _gaps(
    hyp: Sentence, ref: Sentence, hseg: WordSegmentation, rseg: WordSegmentation
) -> list[_Gap]:
    """Regions between LCS-kept words where hypothesis and reference differ."""
    marking = mark_correct(hseg.word_texts(), rseg.word_texts())
    kept = [(i, marking.ref_index[i]) for i, ok in enumerate(marking.flags) if ok]
    hw, rw = hseg.words, rseg.words
    out: list[_Gap] = []
    for g in range(len(kept) + 1):
        h_lo = hw[kept[g - 1][0]][1] if g > 0 else 0
        r_lo = rw[kept[g - 1][1]][1] if g > 0 else 0
        h_hi = hw[kept[g][0]][0] if g < len(kept) else len(hyp.text)
        r_hi = rw[kept[g][1]][0] if g < len(kept) else len(ref.text)
        if hyp.text[h_lo:h_hi] == ref.text[r_lo:r_hi]:
            continue
        lo_idx = kept[g - 1][1] + 1 if g > 0 else 0
        hi_idx = kept[g][1] if g < len(kept) else len(rw)
        out.append(_Gap(h_lo, h_hi, r_lo, r_hi, tuple(range(lo_idx, hi_idx))))
    return out


def _gap_insert_ops(hyp: Sentence, ref: Sentence, rw, gap: _Gap) -> list[EditOp]:
    """Insert the gap's first missing reference word at the start of its blank."""
    j = gap.ref_words[0]
    w_lo, w_hi = rw[j]
    inner = segment_text(hyp.text[gap.h_lo : gap.h_hi], hyp.lang).words
    lead_end = inner[0][0] + gap.h_lo if inner else gap.h_hi
    if hyp.text[gap.h_lo : lead_end] == ref.text[gap.r_lo : w_lo]:
        ins_at, payload = lead_end, ref.text[w_lo:w_hi]
    else:
        ins_at, payload = gap.h_lo, ref.text[gap.r_lo : w_hi]
    ops = [insert(ins_at, payload)]
    if gap.h_hi > ins_at:
        ops.append(blank_fill(ins_at, gap.h_hi))
    elif ref.text[w_hi : gap.r_hi]:
        # gap not fully covered: keep a blank open after the inserted word
        ops.append(blank_fill(ins_at, ins_at))
    return ops


def _infill_step(
    state: PolicyState, hyp: Sentence, ref: Sentence, random_gap: bool
) -> PolicyDecision:
    """Blank every incorrect span, keep correct words, insert one reference
    word into one gap (the leftmost for l2ri, a random one for randi)."""
    hseg, rseg = tokenize(hyp), tokenize(ref)
    gaps = _gaps(hyp, ref, hseg, rseg)
    if not gaps:  # pragma: no cover - equality is handled by the caller
        return Accept()
    candidates = [g for g in gaps if g.ref_words]
    target = None
    if candidates:
        idx = state.rng.randrange(len(candidates)) if random_gap else 0
        target = candidates[idx]
    ops: list[EditOp] = []
    for gap in gaps:
        if gap is target:
            ops.extend(_gap_insert_ops(hyp, ref, rseg.words, gap))
        elif gap.h_hi > gap.h_lo:
            ops.append(blank_fill(gap.h_lo, gap.h_hi))
        else:
            ops.append(blank_fill(gap.h_lo, gap.h_lo))
    return Edit(EditBatch(base=hyp, ops=tuple(ops)))
