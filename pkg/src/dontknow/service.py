"""HTTP front end: ``POST /v1/fallback`` and ``GET /v1/health``.

Each request draws from ``SplitMix64(derive_seed(seed, counter))``. The
counter is taken from the request when given, otherwise from a server-side
sequence that starts at 0, so restarting with the same seed and replaying
the same requests reproduces every response.
"""

from __future__ import annotations

import itertools
import threading

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .conllu import ConlluError, read_conllu
from .parser_client import ParserUnavailable, parse_text
from .realize import Engine
from .rng import MASK64, SplitMix64, derive_seed


class FallbackRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    text: str | None = None
    conllu: str | None = None
    counter: int | None = Field(default=None, ge=0, le=MASK64)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.text is None) == (self.conllu is None):
            raise ValueError("give exactly one of 'text' or 'conllu'")
        if self.text is not None and not self.text.strip():
            raise ValueError("'text' is empty")
        return self


def _error(status, kind, message):
    return JSONResponse(status_code=status, content={"error": kind, "message": message})


def create_app(engine=None, seed=None, parser_url=None, parser_timeout=10.0):
    engine = engine or Engine()
    seed = engine.config.seed if seed is None else seed
    sequence = itertools.count()
    lock = threading.Lock()

    app = FastAPI(title="dontknow", version=engine.version["engine_version"])

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request, exc):
        msgs = "; ".join(str(e.get("msg", e)) for e in exc.errors())
        return _error(400, "bad_request", msgs or "malformed request")

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "seed": seed, **engine.version}

    @app.post("/v1/fallback")
    def fallback(req: FallbackRequest):
        if req.counter is None:
            with lock:
                counter = next(sequence)
        else:
            counter = req.counter
        if req.conllu is not None:
            try:
                sentences = read_conllu(req.conllu)
            except ConlluError as exc:
                return _error(422, "bad_conllu", str(exc))
            if len(sentences) != 1:
                return _error(422, "bad_conllu", f"expected one sentence, got {len(sentences)}")
        else:
            if not parser_url:
                return _error(502, "parser_unavailable", "no parser configured for 'text' input")
            try:
                sentences = parse_text(parser_url, req.text, parser_timeout)
            except ParserUnavailable as exc:
                return _error(502, "parser_unavailable", str(exc))
        resp = engine.respond(sentences[0], SplitMix64(derive_seed(seed, counter)))
        return {**resp.to_dict(), "counter": counter}

    return app
