"""Score-weighted cross-entropy over externally supplied log-probabilities.

The generator network lives elsewhere; this module is a pure reduction:
each sentence contributes -weight * sum(token log-probs), and the batch
total is the raw sum of contributions with no normalization by batch or
token count. Reductions use compensated summation so results are
reproducible to well under 1e-9 regardless of how callers shard batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError
from .scoring import LabelledSentence

SentenceKey = tuple[str, str, int]


@dataclass(frozen=True)
class SentenceLossInput:
    """weight is the sentence's relevance score; log-probs are all <= 0."""

    weight: float
    token_log_probs: tuple[float, ...]
    key: SentenceKey | None = None


@dataclass(frozen=True)
class LogProbRow:
    image_id: str
    comment_id: str
    sentence_index: int
    log_probs: tuple[float, ...]

    @property
    def key(self) -> SentenceKey:
        return (self.image_id, self.comment_id, self.sentence_index)


@dataclass(frozen=True)
class BatchLoss:
    total: float
    per_sentence: tuple[float, ...]
    sentence_count: int


def _validate(item: SentenceLossInput, position: int) -> None:
    where = f"sentence {position}" if item.key is None else f"sentence {item.key}"
    if math.isnan(item.weight) or math.isinf(item.weight):
        raise InputError(f"{where}: weight must be finite, got {item.weight}")
    if not item.token_log_probs:
        raise InputError(f"{where}: token log-probs must be nonempty")
    for lp in item.token_log_probs:
        if math.isnan(lp):
            raise InputError(f"{where}: log-prob is NaN")
        if lp > 0:
            raise InputError(f"{where}: log-prob {lp} is positive; probabilities cannot exceed 1")


def weighted_ce(batch: list[SentenceLossInput]) -> BatchLoss:
    """total = -sum_k weight_k * sum_i log_probs[k][i]; raw, unnormalized."""
    if not batch:
        raise InputError("loss batch is empty")
    per_sentence = []
    for position, item in enumerate(batch):
        _validate(item, position)
        per_sentence.append(-item.weight * math.fsum(item.token_log_probs))
    return BatchLoss(
        total=math.fsum(per_sentence),
        per_sentence=tuple(per_sentence),
        sentence_count=len(batch),
    )


def attach_weights(labels: list[LabelledSentence], rows: list[LogProbRow]) -> list[SentenceLossInput]:
    """Join log-prob rows to labels by (image_id, comment_id, sentence_index).

    Keys, not texts, drive the join: the same sentence text under two
    images resolves to two different weights. Row order is preserved.
    """
    by_key: dict[SentenceKey, LabelledSentence] = {}
    for label in labels:
        if label.key in by_key:
            raise InputError(f"duplicate label key {label.key}")
        by_key[label.key] = label
    out = []
    for row in rows:
        label = by_key.get(row.key)
        if label is None:
            raise InputError(
                "no label for sentence "
                f"image={row.image_id} comment={row.comment_id} index={row.sentence_index}"
            )
        out.append(
            SentenceLossInput(
                weight=label.breakdown.total,
                token_log_probs=row.log_probs,
                key=row.key,
            )
        )
    return out
