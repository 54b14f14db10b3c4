"""Aesthetic relevance scoring: compose the five components, label corpora,
partition by score thresholds, and histogram score distributions.

A sentence's score is the plain unweighted sum of five parts: how many
aesthetic-vocabulary tokens it contains, a normalized length score, how
many object-vocabulary tokens it contains, a sentiment score, and the sum
of normalized tf-idf over its tokens. No rescaling is applied anywhere;
the integer counts dominating the scale is intentional.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import lexicon as lexicon_mod
from .corpus import Corpus, Sentence, iterate_sentences, tokenize
from .errors import InputError, ProviderError
from .providers import LexiconSentimentProvider, sentiment_score
from .stats import (
    DocTerms,
    FrozenStats,
    mean_and_scale,
    document_terms,
    length_score,
    own_terms,
    tfidf_score_terms,
)

PARTITION_RULES = ("leq", "geq")


@dataclass(frozen=True)
class ArsBreakdown:
    """The five score components and their exact sum."""

    aesthetic_words: int
    length: float
    object_words: int
    sentiment: float
    tfidf: float
    total: float

    @classmethod
    def compose(
        cls, aesthetic_words: int, length: float, object_words: int, sentiment: float, tfidf: float
    ) -> "ArsBreakdown":
        return cls(
            aesthetic_words=aesthetic_words,
            length=length,
            object_words=object_words,
            sentiment=sentiment,
            tfidf=tfidf,
            total=aesthetic_words + length + object_words + sentiment + tfidf,
        )


@dataclass(frozen=True)
class LabelledSentence:
    image_id: str
    comment_id: str
    sentence_index: int
    sentence: Sentence
    breakdown: ArsBreakdown

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.image_id, self.comment_id, self.sentence_index)


@dataclass(frozen=True)
class LabelSummary:
    count: int
    mean: float
    scale: float
    min: float
    max: float
    histogram: tuple[tuple[float, int], ...]


@dataclass(frozen=True)
class LabelResult:
    labels: tuple[LabelledSentence, ...]
    summary: LabelSummary | None
    skipped: int = 0


@dataclass(frozen=True)
class ThresholdPartition:
    rule: str
    alpha: float
    members: tuple[LabelledSentence, ...]


class ArsScorer:
    """Bundles frozen stats, word lists, and a sentiment backend.

    Corpus sentences are scored against their own image's document context
    (pass the corpus); standalone texts such as generated captions use
    themselves as their tf context.
    """

    def __init__(
        self,
        stats: FrozenStats,
        aesthetic_words: lexicon_mod.WordList | None = None,
        object_words: lexicon_mod.WordList | None = None,
        sentiment_provider=None,
        corpus: Corpus | None = None,
    ):
        self.stats = stats
        self.aesthetic_words = (
            aesthetic_words if aesthetic_words is not None else lexicon_mod.default_aesthetic_words()
        )
        self.object_words = (
            object_words if object_words is not None else lexicon_mod.default_object_words()
        )
        self.sentiment_provider = (
            sentiment_provider if sentiment_provider is not None else LexiconSentimentProvider.default()
        )
        self.corpus = corpus
        self._doc_terms: dict[str, DocTerms] = {}

    def _terms_for(self, doc_id: str) -> DocTerms:
        if self.corpus is None:
            raise InputError("scorer has no corpus; document-context scoring unavailable")
        terms = self._doc_terms.get(doc_id)
        if terms is None:
            terms = document_terms(self.corpus.image(doc_id))
            self._doc_terms[doc_id] = terms
        return terms

    def _score(self, sentence: Sentence, terms: DocTerms) -> ArsBreakdown:
        return ArsBreakdown.compose(
            aesthetic_words=lexicon_mod.count_hits(sentence, self.aesthetic_words),
            length=length_score(sentence.length, self.stats.length),
            object_words=lexicon_mod.count_hits(sentence, self.object_words),
            sentiment=sentiment_score(self.sentiment_provider.sentiment(sentence)),
            tfidf=tfidf_score_terms(sentence, terms, self.stats.tfidf),
        )

    def score_sentence(self, sentence: Sentence, doc_id: str) -> ArsBreakdown:
        """Score a corpus sentence against the document of image doc_id."""
        return self._score(sentence, self._terms_for(doc_id))

    def score_text(self, text: str) -> ArsBreakdown:
        """Score a standalone text; it serves as its own tf context."""
        sentence = tokenize(text)
        if sentence is None:
            raise InputError(f"cannot score text with no tokens: {text!r}")
        return self._score(sentence, own_terms(sentence))


def _histogram_of_totals(totals: list[float], bin_width: float) -> tuple[tuple[float, int], ...]:
    if bin_width <= 0:
        raise InputError(f"bin_width must be positive, got {bin_width}")
    if not totals:
        return ()
    counts: dict[int, int] = {}
    for value in totals:
        counts[int(value // bin_width)] = counts.get(int(value // bin_width), 0) + 1
    top = max(counts)
    return tuple((k * bin_width, counts.get(k, 0)) for k in range(top + 1))


def ars_histogram(labels, bin_width: float = 1.0) -> tuple[tuple[float, int], ...]:
    """Left-closed bins starting at 0; contiguous through the top nonempty bin."""
    return _histogram_of_totals([lab.breakdown.total for lab in labels], bin_width)


def summarize(labels, scale_kind: str = "stddev", bin_width: float = 1.0) -> LabelSummary | None:
    totals = sorted(lab.breakdown.total for lab in labels)
    if not totals:
        return None
    mean, scale = mean_and_scale(totals, scale_kind)
    return LabelSummary(
        count=len(totals),
        mean=mean,
        scale=scale,
        min=totals[0],
        max=totals[-1],
        histogram=_histogram_of_totals(totals, bin_width),
    )


def label_corpus(
    corpus: Corpus,
    scorer: ArsScorer,
    strict: bool = True,
    threads: int = 1,
) -> LabelResult:
    """Score every sentence in document order.

    Strict mode aborts on the first provider failure, naming the sentence;
    lenient mode skips the sentence and counts it. The label list order is
    the document order however many threads compute scores.
    """
    if scorer.corpus is not corpus:
        scorer = ArsScorer(
            stats=scorer.stats,
            aesthetic_words=scorer.aesthetic_words,
            object_words=scorer.object_words,
            sentiment_provider=scorer.sentiment_provider,
            corpus=corpus,
        )
    items = list(iterate_sentences(corpus))

    def compute(item):
        image_id, comment_id, index, sentence = item
        return scorer.score_sentence(sentence, image_id)

    labels: list[LabelledSentence] = []
    skipped = 0
    if threads > 1:
        executor = ThreadPoolExecutor(max_workers=threads)
        futures = [executor.submit(compute, item) for item in items]
        outcomes = []
        for future in futures:
            try:
                outcomes.append((future.result(), None))
            except ProviderError as exc:
                outcomes.append((None, exc))
        executor.shutdown()
    else:
        outcomes = []
        for item in items:
            try:
                outcomes.append((compute(item), None))
            except ProviderError as exc:
                outcomes.append((None, exc))

    for (image_id, comment_id, index, sentence), (breakdown, error) in zip(items, outcomes):
        if error is not None:
            if strict:
                raise error.__class__(
                    f"image={image_id} comment={comment_id} sentence={index}: {error}"
                ) from error
            skipped += 1
            continue
        labels.append(
            LabelledSentence(
                image_id=image_id,
                comment_id=comment_id,
                sentence_index=index,
                sentence=sentence,
                breakdown=breakdown,
            )
        )
    summary = summarize(labels, scale_kind=scorer.stats.scale_kind)
    return LabelResult(labels=tuple(labels), summary=summary, skipped=skipped)


def partition_by_threshold(
    labels, stats: FrozenStats, alpha: float, rule: str
) -> ThresholdPartition:
    """Filter labels by total against the frozen score distribution.

    leq keeps totals <= mean - alpha * scale, geq keeps totals >= mean +
    alpha * scale. Members come back sorted by total descending; ties keep
    document order.
    """
    if rule not in PARTITION_RULES:
        raise InputError(f"rule must be one of {PARTITION_RULES}, got {rule!r}")
    if stats.ars_mean is None or stats.ars_scale is None:
        raise InputError("stats file has no frozen score distribution; run labeling with freezing first")
    if not math.isfinite(alpha):
        raise InputError(f"alpha must be finite, got {alpha}")
    if rule == "leq":
        bound = stats.ars_mean - alpha * stats.ars_scale
        members = [lab for lab in labels if lab.breakdown.total <= bound]
    else:
        bound = stats.ars_mean + alpha * stats.ars_scale
        members = [lab for lab in labels if lab.breakdown.total >= bound]
    members.sort(key=lambda lab: -lab.breakdown.total)
    return ThresholdPartition(rule=rule, alpha=alpha, members=tuple(members))
