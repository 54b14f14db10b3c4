"""Deterministic aesthetic-relevance scoring for image-comment corpora.

The package computes a per-sentence relevance score from five components
(aesthetic-word count, normalized length, object-word count, sentiment,
normalized tf-idf), exposes a score-weighted cross-entropy reduction for
training harnesses, and selects diverse high-scoring captions from
generator output. A CLI drives batch pipelines over JSONL files and a
FastAPI service wraps the same core for long-running use.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    ImageRecord,
    Sentence,
    content_hash,
    iterate_sentences,
    load_corpus,
    normalize_text,
    save_corpus,
    split_sentences,
    tokenize,
)
from .errors import (
    ArsEngineError,
    CorpusFormatError,
    DegenerateStatsError,
    InputError,
    LookupMissError,
    ProviderError,
)
from .lexicon import WordList, count_hits, default_aesthetic_words, default_object_words, load_wordlist
from .loss import BatchLoss, LogProbRow, SentenceLossInput, attach_weights, weighted_ce
from .providers import (
    Embedding,
    SentimentPair,
    cosine,
    make_embedding_provider,
    make_sentiment_provider,
    sentiment_score,
)
from .scoring import (
    ArsBreakdown,
    ArsScorer,
    LabelledSentence,
    LabelResult,
    LabelSummary,
    ThresholdPartition,
    ars_histogram,
    label_corpus,
    partition_by_threshold,
    summarize,
)
from .selector import (
    Candidate,
    CandidateGroup,
    DacsConfig,
    filter_bad,
    group_candidates,
    select,
    select_groups,
    select_with_scorer,
)
from .stats import (
    DocTerms,
    FrozenStats,
    LengthStats,
    TfIdfModel,
    build_tfidf,
    compute_frozen_stats,
    compute_length_stats,
    document_terms,
    dump_stats,
    idf_factor,
    length_score,
    load_stats,
    mean_and_scale,
    own_terms,
    save_stats,
    sigmoid,
    stats_from_dict,
    stats_matches_corpus,
    stats_to_dict,
    tau,
    tfidf_norm,
    tfidf_score,
    with_ars_distribution,
)

__all__ = [
    "ArsBreakdown",
    "ArsEngineError",
    "ArsScorer",
    "BatchLoss",
    "Candidate",
    "CandidateGroup",
    "Corpus",
    "CorpusFormatError",
    "DacsConfig",
    "DegenerateStatsError",
    "DocTerms",
    "Embedding",
    "FrozenStats",
    "ImageRecord",
    "InputError",
    "LabelResult",
    "LabelSummary",
    "LabelledSentence",
    "LengthStats",
    "LogProbRow",
    "LookupMissError",
    "ProviderError",
    "Sentence",
    "SentenceLossInput",
    "SentimentPair",
    "TfIdfModel",
    "ThresholdPartition",
    "WordList",
    "__version__",
    "ars_histogram",
    "attach_weights",
    "build_tfidf",
    "compute_frozen_stats",
    "compute_length_stats",
    "content_hash",
    "cosine",
    "count_hits",
    "default_aesthetic_words",
    "default_object_words",
    "document_terms",
    "dump_stats",
    "filter_bad",
    "group_candidates",
    "idf_factor",
    "iterate_sentences",
    "label_corpus",
    "length_score",
    "load_corpus",
    "load_stats",
    "load_wordlist",
    "make_embedding_provider",
    "make_sentiment_provider",
    "mean_and_scale",
    "normalize_text",
    "own_terms",
    "partition_by_threshold",
    "save_corpus",
    "save_stats",
    "select",
    "select_groups",
    "select_with_scorer",
    "sentiment_score",
    "sigmoid",
    "split_sentences",
    "stats_from_dict",
    "stats_matches_corpus",
    "stats_to_dict",
    "summarize",
    "tau",
    "tfidf_norm",
    "tfidf_score",
    "tokenize",
    "weighted_ce",
    "with_ars_distribution",
]
