"""Request and response models for the scoring service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str
    ars_mean: float | None


class StatsResponse(BaseModel):
    scale_kind: str
    corpus_hash: str
    document_count: int
    term_count: int
    length_mean: float
    length_scale: float
    min_len: int
    max_len: int
    tau_mean: float
    tau_scale: float
    tau_min: float
    tau_max: float
    ars_mean: float | None
    ars_scale: float | None


class ScoreRequest(BaseModel):
    text: str = Field(min_length=1)


class ScoreBatchRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


class ScoreResponse(BaseModel):
    text: str
    aesthetic_words: int
    length: float
    object_words: int
    sentiment: float
    tfidf: float
    ars: float


class ScoreBatchResponse(BaseModel):
    scores: list[ScoreResponse]


class CandidateIn(BaseModel):
    text: str = Field(min_length=1)
    confidence: float


class SelectRequest(BaseModel):
    candidates: list[CandidateIn] = Field(min_length=1)
    threshold: float = 0.7
    floor: float | None = None  # defaults to the frozen training mean
    max_outputs: int | None = None
    grouping: str = "leader"
    blacklist: list[str] = Field(default_factory=list)


class SelectionOut(BaseModel):
    text: str
    ars: float
    group_size: int
    rank: int


class SelectResponse(BaseModel):
    selections: list[SelectionOut]


class SentenceLossIn(BaseModel):
    weight: float
    token_log_probs: list[float] = Field(min_length=1)


class LossRequest(BaseModel):
    sentences: list[SentenceLossIn] = Field(min_length=1)


class LossResponse(BaseModel):
    total: float
    per_sentence: list[float]
    sentence_count: int
