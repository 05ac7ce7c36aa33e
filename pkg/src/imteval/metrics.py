"""End-to-end metrics over session logs and campaign aggregation.

Per session: editing cost (keystrokes incl. any fallback), success,
consistency (mean edit distance between consecutive outputs, word level by
default), turns and mean response time.  Campaign reports average the
non-failed sessions and break results down per policy and backend.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from statistics import mean

from .align import levenshtein
from .session import FAILURE, SUCCESS, SessionLog
from .text import segment_text


@dataclass(frozen=True)
class SessionMetrics:
    ec: int
    success: bool
    consistency: float | None  # absent with fewer than two hypotheses
    at: int
    rt_ms: float | None


def session_metrics(
    log: SessionLog,
    consistency: str = "word",
    include_initial_turn: bool = True,
) -> SessionMetrics:
    """Recompute the metrics of one session from its log alone.

    ``consistency`` is "word" or "char"; ``include_initial_turn`` controls
    whether the unconstrained initial query counts toward the turn total.
    """
    if log.outcome.kind == FAILURE:
        raise ValueError("failed sessions carry no metrics")
    hyps = [t.hyp for t in log.turns]
    lang = log.config.tgt_lang
    if consistency == "word":
        seqs = [segment_text(h, lang).word_texts() for h in hyps]
    elif consistency == "char":
        seqs = hyps  # type: ignore[assignment]
    else:
        raise ValueError(f"unknown consistency level {consistency!r}")
    con = (
        mean(levenshtein(a, b) for a, b in zip(seqs, seqs[1:]))
        if len(seqs) >= 2
        else None
    )
    latencies = [t.latency_ms for t in log.turns if t.latency_ms is not None]
    at = len(log.turns) if include_initial_turn else max(len(log.turns) - 1, 0)
    return SessionMetrics(
        ec=log.totals.ec,
        success=log.outcome.kind == SUCCESS,
        consistency=con,
        at=at,
        rt_ms=mean(latencies) if latencies else None,
    )


@dataclass(frozen=True)
class ReportRow:
    policy: str
    backend: str
    n: int
    ec: float
    sr: float
    con: float | None
    at: float
    rt_ms: float | None


@dataclass(frozen=True)
class CampaignReport:
    n_sessions: int
    n_failures: int
    overall: ReportRow
    rows: tuple[ReportRow, ...]


def _row(policy: str, backend: str, ms: list[SessionMetrics]) -> ReportRow:
    cons = [m.consistency for m in ms if m.consistency is not None]
    rts = [m.rt_ms for m in ms if m.rt_ms is not None]
    return ReportRow(
        policy=policy,
        backend=backend,
        n=len(ms),
        ec=mean(m.ec for m in ms),
        sr=sum(1 for m in ms if m.success) / len(ms),
        con=mean(cons) if cons else None,
        at=mean(m.at for m in ms),
        rt_ms=mean(rts) if rts else None,
    )


def aggregate(
    logs: list[SessionLog],
    consistency: str = "word",
    include_initial_turn: bool = True,
) -> CampaignReport:
    ok = [l for l in logs if l.outcome.kind != FAILURE]
    failures = len(logs) - len(ok)
    if not ok:
        raise ValueError("no scorable sessions to aggregate")
    per_log = [
        (l, session_metrics(l, consistency, include_initial_turn)) for l in ok
    ]
    groups: dict[tuple[str, str], list[SessionMetrics]] = {}
    for log, m in per_log:
        groups.setdefault((log.config.policy, log.config.backend_spec), []).append(m)
    rows = tuple(
        _row(policy, backend, ms)
        for (policy, backend), ms in sorted(groups.items())
    )
    overall = _row("all", "all", [m for _, m in per_log])
    return CampaignReport(
        n_sessions=len(logs), n_failures=failures, overall=overall, rows=rows
    )


def report_to_wire(report: CampaignReport) -> dict:
    def row(r: ReportRow) -> dict:
        return {
            "policy": r.policy,
            "backend": r.backend,
            "n": r.n,
            "ec": r.ec,
            "sr": r.sr,
            "con": r.con,
            "at": r.at,
            "rt_ms": r.rt_ms,
        }

    return {
        "n_sessions": report.n_sessions,
        "n_failures": report.n_failures,
        "overall": row(report.overall),
        "rows": [row(r) for r in report.rows],
    }


CSV_COLUMNS = ["policy", "backend", "n", "ec", "sr", "con", "at", "rt_ms"]


def report_to_csv(report: CampaignReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow([r.policy, r.backend, r.n, r.ec, r.sr, r.con, r.at, r.rt_ms])
    return buf.getvalue()


def sessions_to_csv(
    logs: list[SessionLog],
    consistency: str = "word",
    include_initial_turn: bool = True,
) -> str:
    """Raw per-session rows for external analysis."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["policy", "backend", "src", "ec", "success", "con", "at", "rt_ms"])
    for log in logs:
        if log.outcome.kind == FAILURE:
            continue
        m = session_metrics(log, consistency, include_initial_turn)
        w.writerow(
            [
                log.config.policy,
                log.config.backend_spec,
                log.config.source.text,
                m.ec,
                m.success,
                m.consistency,
                m.at,
                m.rt_ms,
            ]
        )
    return buf.getvalue()


def format_report(report: CampaignReport) -> str:
    """Plain-text table for terminal output."""

    def fmt(r: ReportRow) -> list[str]:
        return [
            r.policy,
            r.backend,
            str(r.n),
            f"{r.ec:.2f}",
            f"{r.sr:.1%}",
            "-" if r.con is None else f"{r.con:.2f}",
            f"{r.at:.2f}",
            "-" if r.rt_ms is None else f"{r.rt_ms:.1f}",
        ]

    header = ["policy", "backend", "n", "ec", "sr", "con", "at", "rt_ms"]
    table = [header] + [fmt(r) for r in report.rows] + [fmt(report.overall)]
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    if report.n_failures:
        lines.append(f"backend failures: {report.n_failures}")
    return "\n".join(lines)
