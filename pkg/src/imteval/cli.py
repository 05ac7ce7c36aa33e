"""Campaign driver: run simulations, recompute reports, launch the service.

Exit codes: 0 success, 2 config error, 3 backend error, 4 corpus error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .backends import (
    LLMBackend,
    NoisyOracleBackend,
    OracleBackend,
    PrefixOracleBackend,
    WireBackend,
)
from .corpus import CorpusError, load_corpus, read_logs, sample_corpus, write_logs
from .metrics import (
    aggregate,
    format_report,
    report_to_csv,
    report_to_wire,
    sessions_to_csv,
)
from .policies import PolicyKind
from .seeding import derive_seed
from .session import SessionConfig, run_session
from .text import Sentence

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BACKEND = 3
EXIT_CORPUS = 4


class BackendSpecError(ValueError):
    pass


def _corrupt_one_word(ref: Sentence, seed: int) -> Sentence:
    """Seeded single-word corruption of the reference (the prefix backend's
    stand-in initial hypothesis)."""
    rng = random.Random(derive_seed(seed, ref.text))
    words = ref.text.split()
    if not words:
        return Sentence("qx", ref.lang)
    i = rng.randrange(len(words))
    words[i] = "".join(rng.choice("qxzj") for _ in range(max(2, len(words[i]))))
    return Sentence(" ".join(words), ref.lang)


def make_backend_factory(spec: str, llm_model: str = "gpt-3.5-turbo"):
    """Resolve a backend spec string into a per-session factory.

    ``oracle`` | ``prefix`` | ``noisy:we=F,vr=F`` | ``wire:URL`` | ``llm:URL``.
    Built-in backends are constructed per session around its reference;
    wire/llm clients are shared across sessions.
    """
    if spec == "oracle":
        return lambda source, reference, seed: OracleBackend(reference)
    if spec == "prefix":
        return lambda source, reference, seed: PrefixOracleBackend(
            reference, initial=_corrupt_one_word(reference, seed), seed=seed
        )
    if spec.startswith("noisy"):
        params = {"we": 0.0, "vr": 0.0}
        _, _, tail = spec.partition(":")
        if tail:
            for part in tail.split(","):
                key, _, value = part.partition("=")
                if key not in params or not value:
                    raise BackendSpecError(f"bad noisy parameter {part!r}")
                try:
                    params[key] = float(value)
                except ValueError as exc:
                    raise BackendSpecError(f"bad noisy parameter {part!r}") from exc
        return lambda source, reference, seed: NoisyOracleBackend(
            reference, params["we"], params["vr"], seed=seed
        )
    if spec.startswith("wire:"):
        shared = WireBackend(spec[len("wire:"):])
        return lambda source, reference, seed: shared
    if spec.startswith("llm:"):
        shared = LLMBackend(spec[len("llm:"):], model=llm_model)
        return lambda source, reference, seed: shared
    raise BackendSpecError(f"unresolvable backend spec {spec!r}")


def session_seed(campaign_seed: int, pair_index: int) -> int:
    return derive_seed(campaign_seed, pair_index)


def run_campaign(
    corpus,
    policies: list[str],
    backend_spec: str,
    seed: int,
    jobs: int = 1,
    turn_limit: int | None = None,
    llm_model: str = "gpt-3.5-turbo",
):
    """|policies| x |corpus| sessions, scheduling-independent ordering."""
    factory = make_backend_factory(backend_spec, llm_model)
    specs = []
    for policy in policies:
        for idx, (source, reference) in enumerate(corpus.pairs):
            s = session_seed(seed, idx)
            cfg = SessionConfig(
                source=source,
                reference=reference,
                policy=policy,
                backend_spec=backend_spec,
                seed=s,
                tgt_lang=corpus.tgt_lang,
                turn_limit_override=turn_limit,
            )
            specs.append(cfg)

    def run(cfg: SessionConfig):
        return run_session(cfg, factory(cfg.source, cfg.reference, cfg.seed))

    if jobs <= 1:
        return [run(cfg) for cfg in specs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, specs))


def _parse_policies(raw: str) -> list[str]:
    policies = [p.strip() for p in raw.split(",") if p.strip()]
    if not policies:
        raise ValueError("at least one policy is required")
    valid = {k.value for k in PolicyKind}
    for p in policies:
        if p not in valid:
            raise ValueError(f"unknown policy {p!r} (choose from {sorted(valid)})")
    return policies


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        policies = _parse_policies(args.policy)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        corpus = load_corpus(args.corpus, args.format, args.src, args.tgt)
        if args.sample is not None:
            corpus = sample_corpus(corpus, args.sample, args.seed)
        if not corpus.pairs:
            raise CorpusError("corpus is empty")
        for _, ref in corpus.pairs:
            if not ref.text:
                raise CorpusError("simulation requires non-empty references")
    except CorpusError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    try:
        make_backend_factory(args.backend, args.llm_model)
    except BackendSpecError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND

    logs = run_campaign(
        corpus,
        policies,
        args.backend,
        args.seed,
        jobs=args.jobs,
        turn_limit=args.turn_limit,
        llm_model=args.llm_model,
    )
    if args.logs:
        write_logs(args.logs, logs)
    report = aggregate(
        logs,
        consistency=args.consistency,
        include_initial_turn=args.at_mode == "all",
    )
    if args.report:
        path = Path(args.report)
        path.write_text(
            json.dumps(report_to_wire(report), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
        csv_path = path.with_suffix(".csv") if path.suffix != ".csv" else path
        csv_path.write_text(report_to_csv(report), encoding="utf-8")
    if args.sessions_csv:
        Path(args.sessions_csv).write_text(sessions_to_csv(logs), encoding="utf-8")
    print(format_report(report))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        logs = read_logs(args.logs)
        if not logs:
            raise CorpusError("log file is empty")
        report = aggregate(
            logs,
            consistency=args.consistency,
            include_initial_turn=args.at_mode == "all",
        )
    except (CorpusError, ValueError) as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    if args.report:
        Path(args.report).write_text(
            json.dumps(report_to_wire(report), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    print(format_report(report))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        factory = make_backend_factory(args.backend, args.llm_model)
    except BackendSpecError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    corpus = None
    if args.corpus:
        try:
            corpus = load_corpus(args.corpus, args.format, args.src, args.tgt)
        except CorpusError as exc:
            print(f"corpus error: {exc}", file=sys.stderr)
            return EXIT_CORPUS
    app = create_app(
        backend_factory=factory,
        backend_spec=args.backend,
        log_path=Path(args.logs) if args.logs else None,
        src_lang=args.src,
        tgt_lang=args.tgt,
        corpus=corpus,
        ui_dir=Path(args.ui) if args.ui else None,
        seed=args.seed,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imt-eval",
        description="End-to-end interactive machine translation evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulated campaign")
    sim.add_argument("--corpus", required=True, help="parallel corpus path")
    sim.add_argument("--format", choices=["tsv", "jsonl"], default="tsv")
    sim.add_argument("--src", default="en", help="source language code")
    sim.add_argument("--tgt", default="en", help="target language code")
    sim.add_argument(
        "--policy",
        default="l2r",
        help="comma-separated list: mtpe,l2r,rand,l2ri,randi",
    )
    sim.add_argument(
        "--backend",
        default="oracle",
        help="oracle | prefix | noisy:we=0.3,vr=0.1 | wire:URL | llm:URL",
    )
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--sample", type=int, default=None, help="sample size")
    sim.add_argument("--logs", default=None, help="write session logs (JSONL)")
    sim.add_argument("--report", default=None, help="write report JSON (+ CSV)")
    sim.add_argument("--sessions-csv", default=None, help="per-session CSV export")
    sim.add_argument("--jobs", type=int, default=1)
    sim.add_argument("--turn-limit", type=int, default=None)
    sim.add_argument("--llm-model", default="gpt-3.5-turbo")
    sim.add_argument(
        "--consistency", choices=["word", "char"], default="word",
        help="edit-distance level for the consistency metric",
    )
    sim.add_argument(
        "--at-mode", choices=["all", "interactive"], default="all",
        help="count the initial query toward average turns, or not",
    )
    sim.set_defaults(func=cmd_simulate)

    rep = sub.add_parser("report", help="recompute a report from logs")
    rep.add_argument("--logs", required=True)
    rep.add_argument("--report", default=None)
    rep.add_argument("--consistency", choices=["word", "char"], default="word")
    rep.add_argument("--at-mode", choices=["all", "interactive"], default="all")
    rep.set_defaults(func=cmd_report)

    srv = sub.add_parser("serve", help="run the human-evaluation service")
    srv.add_argument("--backend", default="oracle")
    srv.add_argument("--corpus", default=None)
    srv.add_argument("--format", choices=["tsv", "jsonl"], default="tsv")
    srv.add_argument("--src", default="en")
    srv.add_argument("--tgt", default="en")
    srv.add_argument("--logs", default=None)
    srv.add_argument("--ui", default=None, help="static UI bundle directory")
    srv.add_argument("--seed", type=int, default=0)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--llm-model", default="gpt-3.5-turbo")
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())
