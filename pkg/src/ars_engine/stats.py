"""Corpus statistics: sigmoid normalization, length score, tf-idf, frozen stats.

Two score components are corpus-relative and share one normalization
pattern: a logistic curve centered on the corpus mean with corpus spread
as its scale, rescaled so the observed minimum maps to 0 and the observed
maximum maps to 1. Inputs outside the observed range are clamped first,
so both normalized scores live in [0, 1] by construction.

All statistics are reduced over *sorted* value multisets with ``math.fsum``,
which makes every number here independent of corpus file order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Mapping, NamedTuple

from .corpus import Corpus, ImageRecord, Sentence, content_hash, iterate_sentences
from .errors import CorpusFormatError, DegenerateStatsError, InputError

FORMAT_VERSION = 1

SCALE_KINDS = ("stddev", "variance")
LOG_BASES = ("e", "10", "2")
TAU_POPULATIONS = ("pairs", "occurrences")


def sigmoid(x: float, m: float, sigma: float) -> float:
    """Logistic curve 1 / (1 + exp(-(x - m) / sigma)); sigma must be positive.

    Evaluated on the side that exponentiates a nonpositive argument, so it
    never overflows however far x sits from m.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    z = (x - m) / sigma
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def mean_and_scale(sorted_values: list[float], scale_kind: str) -> tuple[float, float]:
    if scale_kind not in SCALE_KINDS:
        raise InputError(f"scale_kind must be one of {SCALE_KINDS}, got {scale_kind!r}")
    n = len(sorted_values)
    mean = math.fsum(sorted_values) / n
    variance = math.fsum((v - mean) ** 2 for v in sorted_values) / n
    if scale_kind == "variance":
        return mean, variance
    return mean, math.sqrt(variance)


def _rescaled_sigmoid(x: float, m: float, scale: float, lo: float, hi: float) -> float:
    x = min(max(x, lo), hi)
    beta_lo = sigmoid(lo, m, scale)
    beta_hi = sigmoid(hi, m, scale)
    return (sigmoid(x, m, scale) - beta_lo) / (beta_hi - beta_lo)


@dataclass(frozen=True)
class LengthStats:
    mean: float
    scale: float
    min_len: int
    max_len: int


def compute_length_stats(corpus: Corpus, scale_kind: str = "stddev") -> LengthStats:
    """Mean/spread/extremes of sentence length (in tokens) over the corpus."""
    lengths = sorted(float(s.length) for _, _, _, s in iterate_sentences(corpus))
    if len(lengths) < 2:
        raise DegenerateStatsError("length statistics need at least 2 sentences")
    mean, scale = mean_and_scale(lengths, scale_kind)
    if scale == 0.0:
        raise DegenerateStatsError("all sentence lengths identical; length scale is zero")
    return LengthStats(mean=mean, scale=scale, min_len=int(lengths[0]), max_len=int(lengths[-1]))


def length_score(sentence_len: int, stats: LengthStats) -> float:
    """Normalized length component in [0, 1]; 0 at min_len, 1 at max_len."""
    if sentence_len < 0:
        raise InputError(f"sentence length must be nonnegative, got {sentence_len}")
    return _rescaled_sigmoid(
        float(sentence_len), stats.mean, stats.scale, float(stats.min_len), float(stats.max_len)
    )


class DocTerms(NamedTuple):
    """Term-frequency context a sentence is scored against."""

    counts: Mapping[str, int]
    total: int


def document_terms(record: ImageRecord) -> DocTerms:
    """Token counts of one document: all comments of one image concatenated."""
    counts: dict[str, int] = {}
    total = 0
    for comment in record.comments:
        for sentence in comment.sentences:
            for token in sentence.tokens:
                counts[token] = counts.get(token, 0) + 1
                total += 1
    return DocTerms(counts=counts, total=total)


def own_terms(sentence: Sentence) -> DocTerms:
    """A standalone text (e.g. a generated caption) is its own tf context."""
    counts: dict[str, int] = {}
    for token in sentence.tokens:
        counts[token] = counts.get(token, 0) + 1
    return DocTerms(counts=counts, total=len(sentence.tokens))


@dataclass(frozen=True)
class TfIdfModel:
    doc_count: int
    doc_freq: Mapping[str, int]
    tau_mean: float
    tau_scale: float
    tau_min: float
    tau_max: float
    log_base: str = "e"
    tau_population: str = "pairs"


def _log(x: float, base: str) -> float:
    if base == "e":
        return math.log(x)
    if base == "10":
        return math.log10(x)
    if base == "2":
        return math.log2(x)
    raise InputError(f"log_base must be one of {LOG_BASES}, got {base!r}")


def idf_factor(term: str, model: TfIdfModel) -> float | None:
    """log((1 + N) / (1 + df)) + 1 for a known term, None for an unseen one."""
    df = model.doc_freq.get(term)
    if df is None:
        return None
    return _log((1 + model.doc_count) / (1 + df), model.log_base) + 1.0


def tau(term: str, terms: DocTerms, model: TfIdfModel) -> float | None:
    """Raw tf-idf of a term in a document context; None when the model
    has never seen the term."""
    factor = idf_factor(term, model)
    if factor is None:
        return None
    n = terms.counts.get(term, 0)
    if n == 0 or terms.total == 0:
        return 0.0
    return (n / terms.total) * factor


def build_tfidf(
    corpus: Corpus,
    log_base: str = "e",
    scale_kind: str = "stddev",
    tau_population: str = "pairs",
) -> TfIdfModel:
    """Fit document frequencies and the tau normalization statistics.

    A document is the concatenation of all comments of one image; images
    that contribute no tokens are not documents. The tau population is one
    value per distinct (term, document) pair by default; the "occurrences"
    variant repeats each value once per term occurrence.
    """
    if tau_population not in TAU_POPULATIONS:
        raise InputError(f"tau_population must be one of {TAU_POPULATIONS}, got {tau_population!r}")
    docs = []
    for record in corpus.images:
        terms = document_terms(record)
        if terms.total > 0:
            docs.append(terms)
    if not docs:
        raise DegenerateStatsError("corpus contains no tokens; cannot fit tf-idf")

    doc_freq: dict[str, int] = {}
    for terms in docs:
        for term in terms.counts:
            doc_freq[term] = doc_freq.get(term, 0) + 1

    doc_count = len(docs)
    values: list[float] = []
    for terms in docs:
        for term, n in terms.counts.items():
            value = (n / terms.total) * (
                _log((1 + doc_count) / (1 + doc_freq[term]), log_base) + 1.0
            )
            if tau_population == "occurrences":
                values.extend([value] * n)
            else:
                values.append(value)
    values.sort()
    tau_mean, tau_scale = mean_and_scale(values, scale_kind)
    return TfIdfModel(
        doc_count=doc_count,
        doc_freq=doc_freq,
        tau_mean=tau_mean,
        tau_scale=tau_scale,
        tau_min=values[0],
        tau_max=values[-1],
        log_base=log_base,
        tau_population=tau_population,
    )


def tfidf_norm(tau_value: float, model: TfIdfModel) -> float:
    """Normalized tf-idf in [0, 1]; 0 at tau_min, 1 at tau_max."""
    if model.tau_min == model.tau_max:
        raise DegenerateStatsError("tau_min equals tau_max; tf-idf scale is degenerate")
    return _rescaled_sigmoid(tau_value, model.tau_mean, model.tau_scale, model.tau_min, model.tau_max)


def tfidf_score_terms(sentence: Sentence, terms: DocTerms, model: TfIdfModel) -> float:
    """Sum of normalized tf-idf over token positions.

    Occurrences count separately, and a token the model has never seen
    contributes 0 (its tau clamps to tau_min).
    """
    total = 0.0
    for token in sentence.tokens:
        t = tau(token, terms, model)
        if t is None:
            continue
        total += tfidf_norm(t, model)
    return total


def tfidf_score(sentence: Sentence, doc_id: str, model: TfIdfModel, corpus: Corpus) -> float:
    """Score a corpus sentence against its own image's document context."""
    record = corpus.image(doc_id)
    return tfidf_score_terms(sentence, document_terms(record), model)


@dataclass(frozen=True)
class FrozenStats:
    """Everything scoring needs, decoupled from the corpus that produced it.

    ars_mean / ars_scale start as None and are written once labeling has
    produced the corpus score distribution; corpus_hash ties the file to
    the exact corpus content it was fitted on.
    """

    scale_kind: str
    corpus_hash: str
    length: LengthStats
    tfidf: TfIdfModel
    ars_mean: float | None = None
    ars_scale: float | None = None


def compute_frozen_stats(
    corpus: Corpus,
    log_base: str = "e",
    scale_kind: str = "stddev",
    tau_population: str = "pairs",
) -> FrozenStats:
    return FrozenStats(
        scale_kind=scale_kind,
        corpus_hash=content_hash(corpus),
        length=compute_length_stats(corpus, scale_kind),
        tfidf=build_tfidf(corpus, log_base, scale_kind, tau_population),
    )


def with_ars_distribution(stats: FrozenStats, ars_mean: float, ars_scale: float) -> FrozenStats:
    return replace(stats, ars_mean=ars_mean, ars_scale=ars_scale)


def stats_matches_corpus(stats: FrozenStats, corpus: Corpus) -> bool:
    return stats.corpus_hash == content_hash(corpus)


def stats_to_dict(stats: FrozenStats) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "scale_kind": stats.scale_kind,
        "corpus_hash": stats.corpus_hash,
        "length": {
            "mean": stats.length.mean,
            "scale": stats.length.scale,
            "min_len": stats.length.min_len,
            "max_len": stats.length.max_len,
        },
        "tfidf": {
            "doc_count": stats.tfidf.doc_count,
            "doc_freq": dict(stats.tfidf.doc_freq),
            "tau_mean": stats.tfidf.tau_mean,
            "tau_scale": stats.tfidf.tau_scale,
            "tau_min": stats.tfidf.tau_min,
            "tau_max": stats.tfidf.tau_max,
            "log_base": stats.tfidf.log_base,
            "tau_population": stats.tfidf.tau_population,
        },
        "ars_mean": stats.ars_mean,
        "ars_scale": stats.ars_scale,
    }


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CorpusFormatError(f"stats file: {message}")


def stats_from_dict(obj: dict) -> FrozenStats:
    _require(isinstance(obj, dict), "top level must be an object")
    _require(obj.get("format_version") == FORMAT_VERSION, "unsupported format_version")
    length = obj.get("length")
    tfidf = obj.get("tfidf")
    _require(isinstance(length, dict), "missing length block")
    _require(isinstance(tfidf, dict), "missing tfidf block")
    _require(obj.get("scale_kind") in SCALE_KINDS, "bad scale_kind")
    _require(tfidf.get("log_base") in LOG_BASES, "bad log_base")
    _require(tfidf.get("tau_population") in TAU_POPULATIONS, "bad tau_population")
    doc_freq = tfidf.get("doc_freq")
    _require(
        isinstance(doc_freq, dict)
        and all(isinstance(k, str) and isinstance(v, int) and v > 0 for k, v in doc_freq.items()),
        "doc_freq must map terms to positive integers",
    )
    try:
        return FrozenStats(
            scale_kind=obj["scale_kind"],
            corpus_hash=str(obj["corpus_hash"]),
            length=LengthStats(
                mean=float(length["mean"]),
                scale=float(length["scale"]),
                min_len=int(length["min_len"]),
                max_len=int(length["max_len"]),
            ),
            tfidf=TfIdfModel(
                doc_count=int(tfidf["doc_count"]),
                doc_freq=doc_freq,
                tau_mean=float(tfidf["tau_mean"]),
                tau_scale=float(tfidf["tau_scale"]),
                tau_min=float(tfidf["tau_min"]),
                tau_max=float(tfidf["tau_max"]),
                log_base=tfidf["log_base"],
                tau_population=tfidf["tau_population"],
            ),
            ars_mean=None if obj.get("ars_mean") is None else float(obj["ars_mean"]),
            ars_scale=None if obj.get("ars_scale") is None else float(obj["ars_scale"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusFormatError(f"stats file: {exc}") from None


def dump_stats(stats: FrozenStats) -> str:
    """Canonical JSON text: sorted keys, stable float repr, trailing newline."""
    return json.dumps(stats_to_dict(stats), sort_keys=True, indent=2) + "\n"


def save_stats(stats: FrozenStats, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dump_stats(stats))


def load_stats(path: str) -> FrozenStats:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"stats file: invalid JSON ({exc.msg})") from None
    return stats_from_dict(obj)
