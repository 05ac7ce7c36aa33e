"""Translation backends: the system side of the interactive loop.

Every backend answers an unconstrained initial query and template-
constrained follow-up queries through one ``translate`` contract.  Built-in
backends are deterministic desk-scale stand-ins used for testing and
simulation; the wire and chat-completion clients integrate real systems.
Constraint satisfaction is never trusted from a backend: the session engine
re-checks every response against the template.
"""

from __future__ import annotations

import json
import os
import random
import re
import time
from dataclasses import dataclass

import requests

from .seeding import derive_seed
from .template import Blank, Constraint, LexicalTemplate, matches, to_prompt_string
from .text import Sentence


class BackendError(Exception):
    """Transport failure, timeout or malformed response."""


class UnsupportedTemplateError(BackendError):
    """The backend cannot decode this template shape at all."""


@dataclass(frozen=True)
class TranslationRequest:
    source: Sentence
    src_lang: str
    tgt_lang: str
    template: LexicalTemplate | None = None
    turn_index: int = 0

    def __post_init__(self) -> None:
        if (self.turn_index == 0) != (self.template is None):
            raise ValueError("template must be present exactly on constrained turns")


@dataclass(frozen=True)
class TranslationResponse:
    hypothesis: Sentence
    latency_ms: float
    backend_id: str

    def __post_init__(self) -> None:
        if self.latency_ms < 0:
            raise ValueError("latency must be non-negative")


def _clean(raw: str, lang: str) -> Sentence:
    # control characters would violate sentence invariants
    raw = re.sub(r"[\x00-\x1f\x7f]", " ", raw)
    return Sentence(raw.strip(), lang)


class Backend:
    """Contract all backends implement."""

    id: str = "backend"

    def translate(self, req: TranslationRequest) -> TranslationResponse:
        start = time.perf_counter()
        text = self._answer(req)
        latency = (time.perf_counter() - start) * 1000.0
        return TranslationResponse(
            hypothesis=_clean(text, req.tgt_lang),
            latency_ms=latency,
            backend_id=self.id,
        )

    def _answer(self, req: TranslationRequest) -> str:
        raise NotImplementedError


class OracleBackend(Backend):
    """Always returns the configured reference."""

    id = "oracle"

    def __init__(self, reference: Sentence):
        self.reference = reference

    def _answer(self, req: TranslationRequest) -> str:
        return self.reference.text


class PrefixOracleBackend(Backend):
    """Behavioral stand-in for a prefix-constrained decoder.

    Understands only prefix-shaped templates ([constraint, blank] or a lone
    blank).  A constraint that is a true reference prefix completes to the
    full reference; anything else gets a seeded junk suffix, simulating
    model failure.  Unconstrained queries echo the configured initial
    hypothesis.
    """

    id = "prefix"

    def __init__(self, reference: Sentence, initial: Sentence, seed: int = 0):
        self.reference = reference
        self.initial = initial
        self.seed = seed

    def _answer(self, req: TranslationRequest) -> str:
        tpl = req.template
        if tpl is None:
            return self.initial.text
        segs = tpl.segments
        if len(segs) == 1 and isinstance(segs[0], Blank):
            return self.reference.text
        if (
            len(segs) == 2
            and isinstance(segs[0], Constraint)
            and isinstance(segs[1], Blank)
        ):
            prefix = segs[0].text
            if self.reference.text.startswith(prefix):
                return self.reference.text
            rng = random.Random(derive_seed(self.seed, prefix))
            junk = " ".join(
                "".join(rng.choice("qxzj") for _ in range(rng.randint(3, 6)))
                for _ in range(rng.randint(1, 3))
            )
            return prefix + " " + junk
        raise UnsupportedTemplateError(
            "prefix backend accepts only prefix-shaped templates"
        )


def _corrupt_word(word: str, rng: random.Random) -> str:
    out = "".join(rng.choice("qxzj") for _ in range(max(1, len(word))))
    if out == word:
        out += "x"
    return out


class NoisyOracleBackend(Backend):
    """Oracle with seeded word errors and deliberate constraint violations.

    Template blanks are filled with the aligned reference material; every
    non-constraint word is then corrupted independently with probability
    ``word_error_rate``.  With probability ``violation_rate`` a constrained
    response instead drops the first constraint, guaranteeing a violation.
    Responses are pure functions of (config, request).
    """

    id = "noisy"

    def __init__(
        self,
        reference: Sentence,
        word_error_rate: float = 0.0,
        violation_rate: float = 0.0,
        seed: int = 0,
    ):
        self.reference = reference
        self.word_error_rate = word_error_rate
        self.violation_rate = violation_rate
        self.seed = seed

    def _rng(self, req: TranslationRequest) -> random.Random:
        tpl = "" if req.template is None else json.dumps(req.template.to_wire())
        return random.Random(derive_seed(self.seed, req.source.text, tpl))

    def _corrupt_text(self, text: str, rng: random.Random) -> str:
        if self.word_error_rate <= 0:
            return text
        return re.sub(
            r"\S+",
            lambda m: _corrupt_word(m.group(0), rng)
            if rng.random() < self.word_error_rate
            else m.group(0),
            text,
        )

    def _answer(self, req: TranslationRequest) -> str:
        rng = self._rng(req)
        ref = self.reference.text
        tpl = req.template
        if tpl is None:
            return self._corrupt_text(ref, rng)
        constraints = tpl.constraints
        if constraints and rng.random() < self.violation_rate:
            broken = ref.replace(constraints[0], "~")
            if matches(tpl, broken.strip()).satisfied:  # pragma: no cover - guard
                broken = "~"
            return broken
        m = matches(tpl, ref)
        if not m.satisfied:
            return ref
        out: list[str] = []
        fill_idx = 0
        for seg in tpl.segments:
            if isinstance(seg, Constraint):
                out.append(seg.text)
            else:
                out.append(self._corrupt_text(m.fills[fill_idx], rng))
                fill_idx += 1
        return "".join(out)


class WireBackend(Backend):
    """Generic client for user-supplied model servers.

    POSTs ``{"source", "src_lang", "tgt_lang", "template"}`` to
    ``<endpoint>/translate`` and expects ``{"translation": str}`` back.
    """

    id = "wire"

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def translate(self, req: TranslationRequest) -> TranslationResponse:
        body = {
            "source": req.source.text,
            "src_lang": req.src_lang,
            "tgt_lang": req.tgt_lang,
            "template": None if req.template is None else req.template.to_wire(),
        }
        start = time.perf_counter()
        try:
            resp = requests.post(
                self.endpoint + "/translate", json=body, timeout=self.timeout
            )
            resp.raise_for_status()
            payload = resp.json()
            translation = payload["translation"]
            if not isinstance(translation, str):
                raise TypeError("translation must be a string")
        except Exception as exc:
            raise BackendError(f"wire backend failed: {exc}") from exc
        latency = (time.perf_counter() - start) * 1000.0
        return TranslationResponse(
            hypothesis=_clean(translation, req.tgt_lang),
            latency_ms=latency,
            backend_id=self.id,
        )


LANG_NAMES = {
    "en": "English",
    "de": "German",
    "zh": "Chinese",
    "fr": "French",
    "es": "Spanish",
    "ja": "Japanese",
    "ru": "Russian",
}


def lang_name(code: str) -> str:
    return LANG_NAMES.get(code.lower(), code)


def initial_prompt(src_lang: str, tgt_lang: str, source_text: str) -> str:
    return (
        f"Translate the following {lang_name(src_lang)} text "
        f"to {lang_name(tgt_lang)}:{source_text}"
    )


def constrained_prompt(
    src_lang: str, tgt_lang: str, source_text: str, tpl: LexicalTemplate
) -> str:
    src, tgt = lang_name(src_lang), lang_name(tgt_lang)
    return (
        f"Translate the {src} sentence by filling in the {tgt} template. "
        f"Strictly follow the given {tgt} template and generate a whole translation.\n"
        f"{src} sentence: {source_text}\n"
        f"{tgt} template: {to_prompt_string(tpl)}\n"
        f"{tgt} translation:"
    )


class LLMBackend(Backend):
    """Chat-completion client that encodes templates as natural language.

    Requests are sent with temperature 0 and max_tokens 200; the reply is
    trimmed of surrounding whitespace and quotes, nothing more, so that
    constraint violations stay observable.  Auth token comes from the
    ``IMT_LLM_TOKEN`` environment variable.
    """

    id = "llm"

    TOKEN_ENV = "IMT_LLM_TOKEN"

    def __init__(self, endpoint: str, model: str = "gpt-3.5-turbo", timeout: float = 60.0):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout

    def build_prompt(self, req: TranslationRequest) -> str:
        if req.template is None:
            return initial_prompt(req.src_lang, req.tgt_lang, req.source.text)
        return constrained_prompt(
            req.src_lang, req.tgt_lang, req.source.text, req.template
        )

    def request_body(self, req: TranslationRequest) -> dict:
        return {
            "model": self.model,
            "temperature": 0,
            "max_tokens": 200,
            "messages": [{"role": "user", "content": self.build_prompt(req)}],
        }

    @staticmethod
    def clean_completion(raw: str) -> str:
        out = raw.strip()
        if len(out) >= 2 and out[0] == out[-1] and out[0] in "\"'":
            out = out[1:-1].strip()
        return out

    def translate(self, req: TranslationRequest) -> TranslationResponse:
        headers = {}
        token = os.environ.get(self.TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        start = time.perf_counter()
        try:
            resp = requests.post(
                self.endpoint,
                json=self.request_body(req),
                headers=headers,
                timeout=self.timeout,
            )
            resp.raise_for_status()
            payload = resp.json()
            raw = payload["choices"][0]["message"]["content"]
            if not isinstance(raw, str):
                raise TypeError("completion content must be a string")
        except Exception as exc:
            raise BackendError(f"llm backend failed: {exc}") from exc
        latency = (time.perf_counter() - start) * 1000.0
        text = self.clean_completion(raw)
        if not text:
            raise BackendError("llm backend returned an empty completion")
        return TranslationResponse(
            hypothesis=_clean(text, req.tgt_lang),
            latency_ms=latency,
            backend_id=self.id,
        )
