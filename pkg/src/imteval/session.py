"""The dialogue engine: one interactive session from initial query to outcome.

A session starts with an unconstrained query, then loops policy edits and
constrained queries until the goal is reached, the backend violates once too
often, or the turn budget (the span count of the initial one-shot correction)
runs out; losing patience triggers a final one-shot correction whose cost is
charged to the session.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import policies
from .align import mtpe_cost
from .backends import Backend, BackendError, TranslationRequest
from .edits import TaggedText, batch_cost, to_tagged
from .template import LexicalTemplate, build_template, matches
from .text import Sentence

SUCCESS = "success"
FALLBACK = "fallback_mtpe"
FAILURE = "backend_failure"

TURN_LIMIT = "turn_limit"
VIOLATION_LIMIT = "violation_limit"


@dataclass(frozen=True)
class SessionConfig:
    source: Sentence
    reference: Sentence | None
    policy: str  # policy kind value, or "human"
    backend_spec: str
    seed: int = 0
    tgt_lang: str = "en"
    turn_limit_override: int | None = None

    def __post_init__(self) -> None:
        if self.policy != "human" and self.reference is None:
            raise ValueError("simulated sessions need a reference")


@dataclass(frozen=True)
class TurnRecord:
    index: int
    template: LexicalTemplate | None
    tagged: TaggedText | None
    hyp: str
    cost: int
    violation: bool
    latency_ms: float | None


@dataclass(frozen=True)
class Outcome:
    kind: str
    reason: str | None = None
    fallback_cost: int = 0


@dataclass(frozen=True)
class Totals:
    ec: int
    turns: int
    violations: int


@dataclass(frozen=True)
class SessionLog:
    config: SessionConfig
    turns: tuple[TurnRecord, ...]
    outcome: Outcome

    @property
    def totals(self) -> Totals:
        return Totals(
            ec=sum(t.cost for t in self.turns) + self.outcome.fallback_cost,
            turns=len(self.turns),
            violations=sum(1 for t in self.turns if t.violation),
        )


def turn_limit(cfg: SessionConfig, initial_hyp: Sentence) -> int:
    """Constrained-turn budget: the span count of the one-shot correction of
    the initial hypothesis, unless overridden."""
    if cfg.turn_limit_override is not None:
        return cfg.turn_limit_override
    assert cfg.reference is not None
    return mtpe_cost(initial_hyp.text, cfg.reference.text)[1]


def run_session(cfg: SessionConfig, backend: Backend) -> SessionLog:
    ref = cfg.reference
    assert ref is not None, "run_session drives simulated sessions only"
    kind = policies.PolicyKind(cfg.policy)

    turns: list[TurnRecord] = []

    def finished(outcome: Outcome) -> SessionLog:
        return SessionLog(config=cfg, turns=tuple(turns), outcome=outcome)

    try:
        resp = backend.translate(
            TranslationRequest(
                source=cfg.source, src_lang=cfg.source.lang, tgt_lang=cfg.tgt_lang
            )
        )
    except BackendError:
        return finished(Outcome(kind=FAILURE, reason="initial_query"))
    hyp = resp.hypothesis
    turns.append(TurnRecord(0, None, None, hyp.text, 0, False, resp.latency_ms))

    if kind is policies.PolicyKind.MTPE:
        decision = policies.mtpe_step(hyp, ref)
        if isinstance(decision, policies.Accept):
            return finished(Outcome(kind=SUCCESS))
        tagged = to_tagged(decision.batch)
        turns.append(
            TurnRecord(
                index=1,
                template=build_template(tagged),
                tagged=tagged,
                hyp=ref.text,
                cost=batch_cost(decision.batch),
                violation=False,
                latency_ms=None,  # the correction queries no backend
            )
        )
        return finished(Outcome(kind=SUCCESS))

    limit = turn_limit(cfg, hyp)
    state = policies.new_state(kind, cfg.seed)
    constrained = 0
    while True:
        decision = policies.step(state, hyp, ref)
        if isinstance(decision, policies.Accept):
            return finished(Outcome(kind=SUCCESS))
        if isinstance(decision, policies.GiveUp):  # pragma: no cover - defensive
            cost = mtpe_cost(hyp.text, ref.text)[0]
            return finished(Outcome(FALLBACK, decision.reason, cost))
        if constrained + 1 > limit:
            cost = mtpe_cost(hyp.text, ref.text)[0]
            return finished(Outcome(FALLBACK, TURN_LIMIT, cost))
        batch = decision.batch
        tagged = to_tagged(batch)
        tpl = build_template(tagged)
        policies.register_template(state, tpl)
        try:
            resp = backend.translate(
                TranslationRequest(
                    source=cfg.source,
                    src_lang=cfg.source.lang,
                    tgt_lang=cfg.tgt_lang,
                    template=tpl,
                    turn_index=constrained + 1,
                )
            )
        except BackendError:
            turns.append(
                TurnRecord(
                    len(turns), tpl, tagged, hyp.text, batch_cost(batch), False, None
                )
            )
            return finished(Outcome(kind=FAILURE, reason="constrained_query"))
        constrained += 1
        violation = not matches(tpl, resp.hypothesis.text).satisfied
        turns.append(
            TurnRecord(
                index=len(turns),
                template=tpl,
                tagged=tagged,
                hyp=resp.hypothesis.text,
                cost=batch_cost(batch),
                violation=violation,
                latency_ms=resp.latency_ms,
            )
        )
        hyp = resp.hypothesis
        if violation and policies.on_violation(state):
            cost = mtpe_cost(hyp.text, ref.text)[0]
            return finished(Outcome(FALLBACK, VIOLATION_LIMIT, cost))


# --- wire format ----------------------------------------------------------------

def config_to_wire(cfg: SessionConfig) -> dict:
    return {
        "src": cfg.source.text,
        "src_lang": cfg.source.lang,
        "ref": None if cfg.reference is None else cfg.reference.text,
        "tgt_lang": cfg.tgt_lang,
        "policy": cfg.policy,
        "backend": cfg.backend_spec,
        "seed": cfg.seed,
        "turn_limit": cfg.turn_limit_override,
    }


def config_from_wire(d: dict) -> SessionConfig:
    ref = d.get("ref")
    return SessionConfig(
        source=Sentence(d["src"], d.get("src_lang", "en")),
        reference=None if ref is None else Sentence(ref, d.get("tgt_lang", "en")),
        policy=d["policy"],
        backend_spec=d.get("backend", ""),
        seed=d.get("seed", 0),
        tgt_lang=d.get("tgt_lang", "en"),
        turn_limit_override=d.get("turn_limit"),
    )


def log_to_wire(log: SessionLog) -> dict:
    totals = log.totals
    return {
        "config": config_to_wire(log.config),
        "turns": [
            {
                "i": t.index,
                "template": None if t.template is None else t.template.to_wire(),
                "tagged": None if t.tagged is None else t.tagged.to_wire(),
                "hyp": t.hyp,
                "cost": t.cost,
                "violation": t.violation,
                "latency_ms": t.latency_ms,
            }
            for t in log.turns
        ],
        "outcome": {
            "kind": log.outcome.kind,
            "reason": log.outcome.reason,
            "fallback_cost": log.outcome.fallback_cost,
        },
        "totals": {"ec": totals.ec, "turns": totals.turns, "violations": totals.violations},
    }


def log_from_wire(d: dict) -> SessionLog:
    turns = tuple(
        TurnRecord(
            index=t["i"],
            template=None
            if t.get("template") is None
            else LexicalTemplate.from_wire(t["template"]),
            tagged=None if t.get("tagged") is None else TaggedText.from_wire(t["tagged"]),
            hyp=t["hyp"],
            cost=t["cost"],
            violation=t["violation"],
            latency_ms=t.get("latency_ms"),
        )
        for t in d["turns"]
    )
    out = d["outcome"]
    log = SessionLog(
        config=config_from_wire(d["config"]),
        turns=turns,
        outcome=Outcome(
            kind=out["kind"],
            reason=out.get("reason"),
            fallback_cost=out.get("fallback_cost", 0),
        ),
    )
    totals = log.totals
    recorded = d.get("totals")
    if recorded is not None and (
        recorded.get("ec") != totals.ec
        or recorded.get("turns") != totals.turns
        or recorded.get("violations") != totals.violations
    ):
        raise ValueError("stored totals disagree with the recorded turns")
    return log
