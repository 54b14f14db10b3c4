"""Weighted cross-entropy reduction and the label/log-prob join."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ars_engine import (
    ArsBreakdown,
    InputError,
    LogProbRow,
    SentenceLossInput,
    attach_weights,
    weighted_ce,
    tokenize,
)
from ars_engine.scoring import LabelledSentence

LOGPROBS = st.lists(st.floats(-8.0, 0.0), min_size=1, max_size=6).map(tuple)


def item(weight: float, lps) -> SentenceLossInput:
    return SentenceLossInput(weight=weight, token_log_probs=tuple(lps))


class TestWeightedCe:
    def test_hand_computed(self):
        batch = [item(2.0, (-1.0, -0.5)), item(0.5, (-2.0,))]
        loss = weighted_ce(batch)
        assert loss.per_sentence == (3.0, 1.0)
        assert loss.total == 4.0
        assert loss.sentence_count == 2

    def test_unit_weights_equal_unweighted_ce(self):
        lps = [(-0.25, -1.5), (-0.75,), (-2.0, -0.125, -0.125)]
        weighted = weighted_ce([item(1.0, row) for row in lps])
        plain = -math.fsum(lp for row in lps for lp in row)
        assert weighted.total == pytest.approx(plain, abs=1e-12)

    def test_zero_weight_contributes_nothing(self):
        loss = weighted_ce([item(0.0, (-5.0, -3.0)), item(2.0, (-1.0,))])
        assert loss.per_sentence[0] == 0.0
        assert loss.total == 2.0

    def test_zero_log_probs_give_zero(self):
        loss = weighted_ce([item(3.0, (0.0, 0.0))])
        assert loss.total == 0.0

    @given(st.lists(st.tuples(st.floats(0, 50), LOGPROBS), min_size=1, max_size=8),
           st.floats(0.25, 4.0))
    def test_scaling_all_weights_scales_total(self, rows, factor):
        base = weighted_ce([item(w, lps) for w, lps in rows])
        scaled = weighted_ce([item(w * factor, lps) for w, lps in rows])
        assert scaled.total == pytest.approx(base.total * factor, rel=1e-9, abs=1e-9)

    @given(st.lists(st.tuples(st.floats(0, 50), LOGPROBS), min_size=2, max_size=8))
    def test_batch_splitting_is_additive(self, rows):
        """Sharding a batch and summing the shard totals reproduces the
        whole-batch total."""
        batch = [item(w, lps) for w, lps in rows]
        whole = weighted_ce(batch).total
        cut = len(batch) // 2
        parts = weighted_ce(batch[:cut]).total + weighted_ce(batch[cut:]).total
        assert parts == pytest.approx(whole, rel=1e-12, abs=1e-12)

    def test_empty_batch_rejected(self):
        with pytest.raises(InputError, match="empty"):
            weighted_ce([])

    def test_empty_log_probs_rejected(self):
        with pytest.raises(InputError, match="nonempty"):
            weighted_ce([item(1.0, ())])

    def test_positive_log_prob_rejected(self):
        with pytest.raises(InputError, match="positive"):
            weighted_ce([item(1.0, (-0.5, 0.01))])

    def test_nan_rejected(self):
        with pytest.raises(InputError, match="NaN"):
            weighted_ce([item(1.0, (float("nan"),))])
        with pytest.raises(InputError, match="finite"):
            weighted_ce([item(float("nan"), (-1.0,))])

    def test_error_names_sentence_key(self):
        bad = SentenceLossInput(weight=1.0, token_log_probs=(0.5,), key=("img-9", "c2", 1))
        with pytest.raises(InputError, match=r"img-9.*c2.*1"):
            weighted_ce([bad])


def _label(key, total):
    return LabelledSentence(
        image_id=key[0],
        comment_id=key[1],
        sentence_index=key[2],
        sentence=tokenize("words"),
        breakdown=ArsBreakdown.compose(0, 0.0, 0, 0.0, total),
    )


class TestAttachWeights:
    def test_join_by_key_preserving_row_order(self):
        labels = [_label(("i1", "c1", 0), 2.0), _label(("i2", "c1", 0), 5.0)]
        rows = [
            LogProbRow("i2", "c1", 0, (-1.0,)),
            LogProbRow("i1", "c1", 0, (-2.0,)),
        ]
        batch = attach_weights(labels, rows)
        assert [b.weight for b in batch] == [5.0, 2.0]
        assert [b.key for b in batch] == [("i2", "c1", 0), ("i1", "c1", 0)]

    def test_same_text_different_keys_different_weights(self):
        labels = [_label(("i1", "c1", 0), 1.0), _label(("i2", "c1", 0), 9.0)]
        rows = [LogProbRow("i1", "c1", 0, (-1.0,)), LogProbRow("i2", "c1", 0, (-1.0,))]
        batch = attach_weights(labels, rows)
        assert batch[0].weight != batch[1].weight

    def test_unresolved_key_names_sentence(self):
        labels = [_label(("i1", "c1", 0), 1.0)]
        rows = [LogProbRow("i1", "c1", 3, (-1.0,))]
        with pytest.raises(InputError, match="image=i1 comment=c1 index=3"):
            attach_weights(labels, rows)

    def test_duplicate_label_key_rejected(self):
        labels = [_label(("i1", "c1", 0), 1.0), _label(("i1", "c1", 0), 2.0)]
        with pytest.raises(InputError, match="duplicate label key"):
            attach_weights(labels, [])

    def test_end_to_end_with_toy_labels(self, toy_labels):
        rows = [LogProbRow(*toy_labels.labels[0].key, log_probs=(-1.0, -2.0))]
        batch = attach_weights(list(toy_labels.labels), rows)
        loss = weighted_ce(batch)
        expected = toy_labels.labels[0].breakdown.total * 3.0
        assert loss.total == pytest.approx(expected, abs=1e-12)
