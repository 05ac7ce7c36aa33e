"""Edit operations, character tags, normalization and the keystroke cost model.

User feedback is recorded as a revised translation where every character
carries one tag out of ``k`` (keep), ``i`` (insert), ``r`` (replace),
``d`` (delete) and ``b`` (blank-filling).  Deleted and blanked text stays in
the revised string; a pure insertion point for blank-filling is marked with
the placeholder ``*``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .text import Sentence

PLACEHOLDER = "*"
TAG_ALPHABET = "kirdb"

# tags whose characters become lexical constraints
CONSTRAINT_TAGS = frozenset("kir")


class InvalidTaggedText(ValueError):
    pass


class InvalidEditBatch(ValueError):
    pass


@dataclass(frozen=True)
class TaggedText:
    """Revised translation plus one tag per character (the wire form)."""

    text: str
    tags: str

    def __post_init__(self) -> None:
        if len(self.text) != len(self.tags):
            raise InvalidTaggedText("text and tags must have equal length")
        bad = set(self.tags) - set(TAG_ALPHABET)
        if bad:
            raise InvalidTaggedText(f"unknown tag characters: {sorted(bad)!r}")
        for ch, tag in zip(self.text, self.tags):
            if ch == PLACEHOLDER and tag != "b":
                raise InvalidTaggedText("placeholder '*' must carry the 'b' tag")
        if not any(t in "kirb" for t in self.tags):
            raise InvalidTaggedText("tagged text with only deletions is invalid")

    def to_wire(self) -> dict:
        return {"text": self.text, "tags": self.tags}

    @classmethod
    def from_wire(cls, d: dict) -> "TaggedText":
        return cls(text=d["text"], tags=d["tags"])

    def runs(self) -> list[tuple[str, str]]:
        """Maximal same-tag runs as (tag, chars) pairs."""
        out: list[tuple[str, str]] = []
        start = 0
        for i in range(1, len(self.tags) + 1):
            if i == len(self.tags) or self.tags[i] != self.tags[start]:
                out.append((self.tags[start], self.text[start:i]))
                start = i
        return out


class EditKind(Enum):
    KEEP = "keep"
    INSERT = "insert"
    REPLACE = "replace"
    DELETE = "delete"
    BLANK_FILL = "blank_fill"


@dataclass(frozen=True)
class EditOp:
    """One edit on a character span of the pre-edit hypothesis.

    ``start``/``end`` is a half-open span into the hypothesis; for a pure
    insertion (or a bare blank-filling placeholder) the span is empty.
    ``payload`` holds the characters the user typed.
    """

    kind: EditKind
    start: int
    end: int
    payload: str = ""

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise InvalidEditBatch(f"bad span ({self.start}, {self.end})")
        k = self.kind
        if k is EditKind.KEEP and (self.payload or self.start == self.end):
            raise InvalidEditBatch("keep takes a non-empty span and no payload")
        if k is EditKind.INSERT and (not self.payload or self.start != self.end):
            raise InvalidEditBatch("insert takes a payload and an empty span")
        if k is EditKind.REPLACE and (not self.payload or self.start == self.end):
            raise InvalidEditBatch("replace takes a payload and a non-empty span")
        if k is EditKind.DELETE and (self.payload or self.start == self.end):
            raise InvalidEditBatch("delete takes a non-empty span and no payload")
        if k is EditKind.BLANK_FILL and self.payload:
            raise InvalidEditBatch("blank-filling takes no payload")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def keep(start: int, end: int) -> EditOp:
    return EditOp(EditKind.KEEP, start, end)


def insert(at: int, payload: str) -> EditOp:
    return EditOp(EditKind.INSERT, at, at, payload)


def replace(start: int, end: int, payload: str) -> EditOp:
    return EditOp(EditKind.REPLACE, start, end, payload)


def delete(start: int, end: int) -> EditOp:
    return EditOp(EditKind.DELETE, start, end)


def blank_fill(start: int, end: int) -> EditOp:
    return EditOp(EditKind.BLANK_FILL, start, end)


def op_cost(op: EditOp) -> int:
    """Keystrokes for one operation: keep 0, insert #chars, delete 1,
    replace #chars+1, blank-filling 1."""
    if op.kind is EditKind.KEEP:
        return 0
    if op.kind is EditKind.INSERT:
        return len(op.payload)
    if op.kind is EditKind.DELETE:
        return 1
    if op.kind is EditKind.REPLACE:
        return len(op.payload) + 1
    return 1  # blank-filling


def _fusable(a: EditOp, b: EditOp) -> bool:
    """Adjacent delete+insert (either order) on one contiguous span."""
    if a.kind is EditKind.DELETE and b.kind is EditKind.INSERT:
        return b.start in (a.start, a.end)
    if a.kind is EditKind.INSERT and b.kind is EditKind.DELETE:
        return a.start in (b.start, b.end)
    return False


@dataclass(frozen=True)
class EditBatch:
    """One turn's ordered edits against a base hypothesis."""

    base: Sentence
    ops: tuple[EditOp, ...]

    def __post_init__(self) -> None:
        n = len(self.base.text)
        for op in self.ops:
            if op.end > n:
                raise InvalidEditBatch(f"op span {op.span} exceeds base length {n}")
        for a, b in zip(self.ops, self.ops[1:]):
            if a.end <= b.start:
                continue
            if _fusable(a, b):
                continue
            raise InvalidEditBatch(f"ops out of order or overlapping: {a} / {b}")


def batch_cost(b: EditBatch) -> int:
    return sum(op_cost(op) for op in b.ops)


def normalize(b: EditBatch) -> EditBatch:
    """Fuse adjacent delete+insert / insert+delete pairs on one contiguous
    span into a single replace; everything else is left untouched."""
    ops: list[EditOp] = []
    i = 0
    while i < len(b.ops):
        cur = b.ops[i]
        if i + 1 < len(b.ops) and _fusable(cur, b.ops[i + 1]):
            nxt = b.ops[i + 1]
            dele = cur if cur.kind is EditKind.DELETE else nxt
            ins = nxt if cur.kind is EditKind.DELETE else cur
            ops.append(replace(dele.start, dele.end, ins.payload))
            i += 2
            continue
        ops.append(cur)
        i += 1
    return EditBatch(base=b.base, ops=tuple(ops))


def to_tagged(b: EditBatch) -> TaggedText:
    """Render a normalized batch as a tagged revised translation.

    Characters of the base not covered by any op are implicit keeps.
    """
    for a, nxt in zip(b.ops, b.ops[1:]):
        if _fusable(a, nxt):
            raise InvalidEditBatch("batch must be normalized before tagging")
    base = b.base.text
    chars: list[str] = []
    tags: list[str] = []

    def emit(text: str, tag: str) -> None:
        chars.append(text)
        tags.append(tag * len(text))

    pos = 0
    for op in b.ops:
        if op.start > pos:
            emit(base[pos:op.start], "k")
        if op.kind is EditKind.KEEP:
            emit(base[op.start:op.end], "k")
        elif op.kind is EditKind.INSERT:
            emit(op.payload, "i")
        elif op.kind is EditKind.REPLACE:
            emit(op.payload, "r")
        elif op.kind is EditKind.DELETE:
            emit(base[op.start:op.end], "d")
        else:  # blank-filling
            if op.start == op.end:
                emit(PLACEHOLDER, "b")
            else:
                emit(base[op.start:op.end], "b")
        pos = max(pos, op.end)
    if pos < len(base):
        emit(base[pos:], "k")
    return TaggedText(text="".join(chars), tags="".join(tags))


def cost_of_tags(tags: str) -> int:
    """Keystroke cost recomputed from tag runs alone (server-side costing).

    Runs: ``i`` costs its length, ``r`` length+1, ``d`` and ``b`` cost 1
    per run, ``k`` is free.
    """
    total = 0
    start = 0
    for i in range(1, len(tags) + 1):
        if i == len(tags) or tags[i] != tags[start]:
            tag, length = tags[start], i - start
            if tag == "i":
                total += length
            elif tag == "r":
                total += length + 1
            elif tag in ("d", "b"):
                total += 1
            start = i
    return total
