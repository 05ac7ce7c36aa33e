"""Parallel-corpus ingestion, deterministic sampling and log persistence."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .session import SessionLog, log_from_wire, log_to_wire
from .text import InvalidSentence, Sentence


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[tuple[Sentence, Sentence], ...]
    src_lang: str
    tgt_lang: str

    def __post_init__(self) -> None:
        for src, _ in self.pairs:
            if not src.text:
                raise CorpusError("empty source sentence")

    def __len__(self) -> int:
        return len(self.pairs)


def load_corpus(
    path: str | Path, fmt: str, src_lang: str, tgt_lang: str
) -> ParallelCorpus:
    """Load a TSV (``source<TAB>reference``) or JSONL (``{"src","ref"}``)
    corpus; malformed lines abort with their line number."""
    path = Path(path)
    if fmt not in ("tsv", "jsonl"):
        raise CorpusError(f"unknown corpus format {fmt!r}")
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus: {exc}") from exc
    pairs: list[tuple[Sentence, Sentence]] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            if fmt == "tsv":
                cols = line.split("\t")
                if len(cols) != 2:
                    raise CorpusError(f"expected 2 tab-separated columns, got {len(cols)}")
                src_text, ref_text = cols
            else:
                obj = json.loads(line)
                if not isinstance(obj, dict) or "src" not in obj or "ref" not in obj:
                    raise CorpusError('expected an object with "src" and "ref"')
                src_text, ref_text = obj["src"], obj["ref"]
            pair = (
                Sentence(src_text.strip(), src_lang),
                Sentence(ref_text.strip(), tgt_lang),
            )
            if not pair[0].text:
                raise CorpusError("empty source sentence")
        except (CorpusError, InvalidSentence, json.JSONDecodeError, AttributeError) as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from exc
        pairs.append(pair)
    return ParallelCorpus(pairs=tuple(pairs), src_lang=src_lang, tgt_lang=tgt_lang)


def sample_corpus(corpus: ParallelCorpus, n: int, seed: int) -> ParallelCorpus:
    """Seeded uniform sample without replacement, original order preserved."""
    if n > len(corpus.pairs):
        raise CorpusError(f"cannot sample {n} of {len(corpus.pairs)} pairs")
    idx = sorted(random.Random(seed).sample(range(len(corpus.pairs)), n))
    return ParallelCorpus(
        pairs=tuple(corpus.pairs[i] for i in idx),
        src_lang=corpus.src_lang,
        tgt_lang=corpus.tgt_lang,
    )


def dumps_log(log: SessionLog) -> str:
    return json.dumps(log_to_wire(log), ensure_ascii=False, separators=(",", ":"))


def write_logs(path: str | Path, logs: list[SessionLog]) -> None:
    Path(path).write_text(
        "".join(dumps_log(log) + "\n" for log in logs), encoding="utf-8"
    )


def read_logs(path: str | Path) -> list[SessionLog]:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read logs: {exc}") from exc
    logs: list[SessionLog] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            logs.append(log_from_wire(json.loads(line)))
        except (ValueError, KeyError, TypeError) as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from exc
    return logs
