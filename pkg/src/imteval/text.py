"""Word segmentation and character-span bookkeeping shared by all modules.

All indices are code-point offsets into the sentence text, never bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

Span = tuple[int, int]

_CJK_RANGES = (
    (0x3400, 0x4DBF),    # extension A
    (0x4E00, 0x9FFF),    # unified ideographs
    (0xF900, 0xFAFF),    # compatibility ideographs
    (0x20000, 0x2FA1F),  # extensions B..F
)


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


class InvalidSentence(ValueError):
    pass


@dataclass(frozen=True)
class Sentence:
    """A source, reference or hypothesis sentence with its language code."""

    text: str
    lang: str = "en"

    def __post_init__(self) -> None:
        if self.text != self.text.strip():
            raise InvalidSentence("sentence must not have leading/trailing whitespace")
        if any(ord(ch) < 0x20 or ch == "\x7f" for ch in self.text):
            raise InvalidSentence("control characters are not allowed in a sentence")


@dataclass(frozen=True)
class WordSegmentation:
    """Word spans plus the inter-word separator spans of one text.

    ``separators`` has ``len(words) + 1`` entries (possibly empty spans) so
    that ``sep[0] + word[0] + sep[1] + ... + sep[n]`` reassembles the text.
    """

    text: str
    words: tuple[Span, ...]
    separators: tuple[Span, ...]

    def word_text(self, i: int) -> str:
        a, b = self.words[i]
        return self.text[a:b]

    def word_texts(self) -> list[str]:
        return [self.text[a:b] for a, b in self.words]

    def reassemble(self) -> str:
        parts = []
        for i, (a, b) in enumerate(self.words):
            sa, sb = self.separators[i]
            parts.append(self.text[sa:sb])
            parts.append(self.text[a:b])
        sa, sb = self.separators[-1]
        parts.append(self.text[sa:sb])
        return "".join(parts)


def tokenize(s: Sentence) -> WordSegmentation:
    """Segment a sentence into words.

    Non-CJK text: words are maximal runs of non-whitespace characters.
    For ``zh`` every CJK character is its own word; embedded non-CJK runs
    follow the whitespace rule.
    """
    return segment_text(s.text, s.lang)


def segment_text(text: str, lang: str = "en") -> WordSegmentation:
    """Segment raw text (no sentence validation; offsets are into ``text``)."""
    per_char_cjk = lang.lower().startswith("zh")
    words: list[Span] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if per_char_cjk and is_cjk(ch):
            words.append((i, i + 1))
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace() and not (per_char_cjk and is_cjk(text[j])):
            j += 1
        words.append((i, j))
        i = j

    separators: list[Span] = []
    prev = 0
    for a, b in words:
        separators.append((prev, a))
        prev = b
    separators.append((prev, n))
    return WordSegmentation(text=text, words=tuple(words), separators=tuple(separators))


def char_span_of(seg: WordSegmentation, i: int, j: int) -> Span:
    """Smallest character span covering words ``i..j`` inclusive."""
    if not (0 <= i <= j < len(seg.words)):
        raise IndexError(f"word span {i}..{j} out of range for {len(seg.words)} words")
    return (seg.words[i][0], seg.words[j][1])
