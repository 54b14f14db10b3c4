"""FastAPI application factory for the scoring service.

The service loads frozen statistics, word lists, and provider backends
once, then serves scoring, selection, and loss computation to any number
of clients. Launch with uvicorn against the environment-driven factory:

    ARS_ENGINE_STATS=stats.json uvicorn --factory ars_engine.service.app:create_app_from_env

Environment: ARS_ENGINE_STATS (required path), ARS_ENGINE_AW / ARS_ENGINE_OW
(word list paths, packaged defaults), ARS_ENGINE_SENTIMENT (backend spec,
default "lexicon"), ARS_ENGINE_EMBED (backend spec, default "hash").
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..corpus import normalize_text
from ..errors import DegenerateStatsError, InputError, ProviderError
from ..lexicon import (
    AESTHETIC_WORDS_DECLARED,
    OBJECT_WORDS_DECLARED,
    load_wordlist,
)
from ..loss import SentenceLossInput, weighted_ce
from ..providers import make_embedding_provider, make_sentiment_provider
from ..scoring import ArsScorer
from ..selector import Candidate, DacsConfig, select_groups
from ..stats import FrozenStats, load_stats
from . import schemas


@dataclass
class EngineRuntime:
    """Everything the endpoints need, loaded once at startup."""

    stats: FrozenStats
    scorer: ArsScorer
    embedder: object

    @classmethod
    def from_paths(
        cls,
        stats_path: str,
        aw_path: str | None = None,
        ow_path: str | None = None,
        sentiment_spec: str = "lexicon",
        embed_spec: str = "hash",
    ) -> "EngineRuntime":
        stats = load_stats(stats_path)
        aw = load_wordlist(aw_path, "aesthetic", AESTHETIC_WORDS_DECLARED) if aw_path else None
        ow = load_wordlist(ow_path, "object", OBJECT_WORDS_DECLARED) if ow_path else None
        scorer = ArsScorer(stats, aw, ow, make_sentiment_provider(sentiment_spec))
        return cls(stats=stats, scorer=scorer, embedder=make_embedding_provider(embed_spec))


def _breakdown_response(text: str, scorer: ArsScorer) -> schemas.ScoreResponse:
    b = scorer.score_text(text)
    return schemas.ScoreResponse(
        text=text,
        aesthetic_words=b.aesthetic_words,
        length=b.length,
        object_words=b.object_words,
        sentiment=b.sentiment,
        tfidf=b.tfidf,
        ars=b.total,
    )


def create_app(runtime: EngineRuntime) -> FastAPI:
    app = FastAPI(title="ars-engine", version=__version__)

    @app.exception_handler(InputError)
    async def input_error(_: Request, exc: InputError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ProviderError)
    async def provider_error(_: Request, exc: ProviderError) -> JSONResponse:
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.exception_handler(DegenerateStatsError)
    async def degenerate_error(_: Request, exc: DegenerateStatsError) -> JSONResponse:
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__, ars_mean=runtime.stats.ars_mean)

    @app.get("/stats", response_model=schemas.StatsResponse)
    def stats() -> schemas.StatsResponse:
        s = runtime.stats
        return schemas.StatsResponse(
            scale_kind=s.scale_kind,
            corpus_hash=s.corpus_hash,
            document_count=s.tfidf.doc_count,
            term_count=len(s.tfidf.doc_freq),
            length_mean=s.length.mean,
            length_scale=s.length.scale,
            min_len=s.length.min_len,
            max_len=s.length.max_len,
            tau_mean=s.tfidf.tau_mean,
            tau_scale=s.tfidf.tau_scale,
            tau_min=s.tfidf.tau_min,
            tau_max=s.tfidf.tau_max,
            ars_mean=s.ars_mean,
            ars_scale=s.ars_scale,
        )

    @app.post("/score", response_model=schemas.ScoreResponse)
    def score(request: schemas.ScoreRequest) -> schemas.ScoreResponse:
        return _breakdown_response(request.text, runtime.scorer)

    @app.post("/score/batch", response_model=schemas.ScoreBatchResponse)
    def score_batch(request: schemas.ScoreBatchRequest) -> schemas.ScoreBatchResponse:
        return schemas.ScoreBatchResponse(
            scores=[_breakdown_response(text, runtime.scorer) for text in request.texts]
        )

    @app.post("/select", response_model=schemas.SelectResponse)
    def select(request: schemas.SelectRequest) -> schemas.SelectResponse:
        floor = request.floor
        if floor is None:
            if runtime.stats.ars_mean is None:
                raise InputError(
                    "stats have no frozen score mean; pass an explicit floor in the request"
                )
            floor = runtime.stats.ars_mean
        config = DacsConfig(
            ars_floor=floor,
            similarity_threshold=request.threshold,
            blacklist=frozenset(
                cleaned for cleaned in (normalize_text(e) for e in request.blacklist) if cleaned
            ),
            max_outputs=request.max_outputs,
            grouping=request.grouping,
        )
        candidates = [Candidate(text=c.text, confidence=c.confidence) for c in request.candidates]
        groups = select_groups(
            candidates,
            config,
            runtime.embedder,
            lambda text: runtime.scorer.score_text(text).total,
        )
        return schemas.SelectResponse(
            selections=[
                schemas.SelectionOut(
                    text=g.representative.text,
                    ars=g.representative.ars,
                    group_size=len(g.members),
                    rank=rank,
                )
                for rank, g in enumerate(groups, start=1)
            ]
        )

    @app.post("/loss", response_model=schemas.LossResponse)
    def loss(request: schemas.LossRequest) -> schemas.LossResponse:
        batch = [
            SentenceLossInput(weight=s.weight, token_log_probs=tuple(s.token_log_probs))
            for s in request.sentences
        ]
        result = weighted_ce(batch)
        return schemas.LossResponse(
            total=result.total,
            per_sentence=list(result.per_sentence),
            sentence_count=result.sentence_count,
        )

    return app


def create_app_from_env() -> FastAPI:
    stats_path = os.environ.get("ARS_ENGINE_STATS")
    if not stats_path:
        raise InputError("ARS_ENGINE_STATS must point at a frozen stats file")
    runtime = EngineRuntime.from_paths(
        stats_path=stats_path,
        aw_path=os.environ.get("ARS_ENGINE_AW"),
        ow_path=os.environ.get("ARS_ENGINE_OW"),
        sentiment_spec=os.environ.get("ARS_ENGINE_SENTIMENT", "lexicon"),
        embed_spec=os.environ.get("ARS_ENGINE_EMBED", "hash"),
    )
    return create_app(runtime)
