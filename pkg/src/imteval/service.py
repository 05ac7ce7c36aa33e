"""Session service for human evaluation: the dialogue engine over HTTP.

Costs are computed server-side from the posted tags, never trusted from the
client.  Sessions are isolated: one in-flight request each, closed sessions
reject further edits, and all finalized logs are appended to one JSONL
stream.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .align import mtpe_cost
from .backends import BackendError, TranslationRequest
from .edits import InvalidTaggedText, TaggedText, cost_of_tags
from .metrics import session_metrics
from .session import (
    FALLBACK,
    SUCCESS,
    Outcome,
    SessionConfig,
    SessionLog,
    TurnRecord,
    log_to_wire,
)
from .template import (
    EmptyTemplateError,
    InvalidTemplate,
    build_template,
    constraint_char_spans,
    matches,
)
from .text import InvalidSentence, Sentence


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class LiveSession:
    id: str
    config: SessionConfig
    backend: object
    turns: list[TurnRecord] = field(default_factory=list)
    hyp: str = ""
    closed: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)


class CreateSessionBody(BaseModel):
    source: str
    reference: str | None = None
    src_lang: str | None = None
    tgt_lang: str | None = None


class TurnBody(BaseModel):
    text: str
    tags: str


class SubmitBody(BaseModel):
    final_text: str
    mtpe_clicked: bool = False


def create_app(
    backend_factory,
    backend_spec: str = "configured",
    log_path: Path | None = None,
    src_lang: str = "en",
    tgt_lang: str = "en",
    corpus=None,
    ui_dir: Path | None = None,
    seed: int = 0,
) -> FastAPI:
    app = FastAPI(title="imteval session service")
    sessions: dict[str, LiveSession] = {}
    finalized: list[str] = []  # JSONL lines of closed sessions
    registry_lock = threading.Lock()
    writer_lock = threading.Lock()
    counter = {"n": 0}

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "bad_request", "message": str(exc)}},
        )

    def persist(log: SessionLog) -> None:
        line = json.dumps(log_to_wire(log), ensure_ascii=False, separators=(",", ":"))
        with writer_lock:
            finalized.append(line)
            if log_path is not None:
                with open(log_path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")

    def get_session(session_id: str) -> LiveSession:
        sess = sessions.get(session_id)
        if sess is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return sess

    def current_log(sess: LiveSession, outcome: Outcome) -> SessionLog:
        return SessionLog(
            config=sess.config, turns=tuple(sess.turns), outcome=outcome
        )

    @app.post("/api/sessions")
    def create_session(body: CreateSessionBody):
        try:
            source = Sentence(body.source.strip(), body.src_lang or src_lang)
            reference = (
                Sentence(body.reference.strip(), body.tgt_lang or tgt_lang)
                if body.reference is not None
                else None
            )
        except InvalidSentence as exc:
            raise ApiError(400, "bad_sentence", str(exc))
        with registry_lock:
            counter["n"] += 1
            session_seed = seed + counter["n"]
        config = SessionConfig(
            source=source,
            reference=reference,
            policy="human",
            backend_spec=backend_spec,
            seed=session_seed,
            tgt_lang=body.tgt_lang or tgt_lang,
        )
        backend = backend_factory(source, reference, session_seed)
        try:
            resp = backend.translate(
                TranslationRequest(
                    source=source, src_lang=source.lang, tgt_lang=config.tgt_lang
                )
            )
        except BackendError as exc:
            raise ApiError(502, "backend_error", str(exc))
        sess = LiveSession(
            id=secrets.token_urlsafe(16), config=config, backend=backend
        )
        sess.hyp = resp.hypothesis.text
        sess.turns.append(
            TurnRecord(0, None, None, sess.hyp, 0, False, resp.latency_ms)
        )
        with registry_lock:
            sessions[sess.id] = sess
        return {
            "id": sess.id,
            "hypothesis": sess.hyp,
            "latency_ms": resp.latency_ms,
        }

    @app.post("/api/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnBody):
        sess = get_session(session_id)
        if sess.closed:
            raise ApiError(409, "session_closed", "session already submitted")
        if not sess.lock.acquire(blocking=False):
            raise ApiError(409, "turn_in_flight", "another turn is in flight")
        try:
            try:
                tagged = TaggedText(text=body.text, tags=body.tags)
                tpl = build_template(tagged)
            except (InvalidTaggedText, EmptyTemplateError, InvalidTemplate) as exc:
                raise ApiError(400, "bad_tags", str(exc))
            cost = cost_of_tags(tagged.tags)
            try:
                resp = sess.backend.translate(
                    TranslationRequest(
                        source=sess.config.source,
                        src_lang=sess.config.source.lang,
                        tgt_lang=sess.config.tgt_lang,
                        template=tpl,
                        turn_index=len(sess.turns),
                    )
                )
            except BackendError as exc:
                raise ApiError(502, "backend_error", str(exc))
            witness = matches(tpl, resp.hypothesis.text)
            sess.turns.append(
                TurnRecord(
                    index=len(sess.turns),
                    template=tpl,
                    tagged=tagged,
                    hyp=resp.hypothesis.text,
                    cost=cost,
                    violation=not witness.satisfied,
                    latency_ms=resp.latency_ms,
                )
            )
            sess.hyp = resp.hypothesis.text
            return {
                "hypothesis": sess.hyp,
                "violation": not witness.satisfied,
                "latency_ms": resp.latency_ms,
                "spans": constraint_char_spans(tpl, witness)
                if witness.satisfied
                else None,
            }
        finally:
            sess.lock.release()

    @app.post("/api/sessions/{session_id}/submit")
    def submit(session_id: str, body: SubmitBody):
        sess = get_session(session_id)
        if sess.closed:
            raise ApiError(409, "session_closed", "session already submitted")
        if not sess.lock.acquire(blocking=False):
            raise ApiError(409, "turn_in_flight", "another turn is in flight")
        try:
            final = body.final_text.strip()
            if body.mtpe_clicked:
                fallback_cost = mtpe_cost(sess.hyp, final)[0]
                outcome = Outcome(FALLBACK, "mtpe_clicked", fallback_cost)
            elif final == sess.hyp:
                outcome = Outcome(SUCCESS)
            else:
                # edited outside the loop without asking for post-editing:
                # not a success, but no keystrokes were observed server-side
                outcome = Outcome(FALLBACK, "manual_correction", 0)
            log = current_log(sess, outcome)
            sess.closed = True
            sess.final_log = log  # type: ignore[attr-defined]
            persist(log)
            m = session_metrics(log)
            return {
                "ec": m.ec,
                "success": m.success,
                "consistency": m.consistency,
                "at": m.at,
                "rt_ms": m.rt_ms,
            }
        finally:
            sess.lock.release()

    @app.get("/api/sessions/{session_id}/log")
    def get_log(session_id: str):
        sess = get_session(session_id)
        if not sess.closed:
            raise ApiError(409, "session_open", "submit the session first")
        return log_to_wire(sess.final_log)  # type: ignore[attr-defined]

    @app.get("/api/export")
    def export_campaign():
        with writer_lock:
            payload = "".join(line + "\n" for line in finalized)
        return PlainTextResponse(payload, media_type="application/jsonl")

    @app.get("/api/corpus")
    def get_corpus():
        if corpus is None:
            return {"pairs": []}
        return {
            "pairs": [
                {"src": s.text, "ref": r.text if r is not None else None}
                for s, r in corpus.pairs
            ],
            "src_lang": corpus.src_lang,
            "tgt_lang": corpus.tgt_lang,
        }

    @app.get("/", response_class=HTMLResponse)
    def index():
        if ui_dir is not None:
            page = ui_dir / "index.html"
            if page.exists():
                return page.read_text(encoding="utf-8")
        return (
            "<!doctype html><title>imteval</title>"
            "<p>Session service is running. No UI bundle configured.</p>"
        )

    if ui_dir is not None and ui_dir.exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir)), name="ui")

    return app
