"""Word list loading and per-occurrence hit counting."""

from __future__ import annotations

import logging

import pytest

from ars_engine import InputError, count_hits, load_wordlist, tokenize
from ars_engine.lexicon import (
    default_aesthetic_words,
    default_negative_words,
    default_object_words,
    default_positive_words,
)


class TestLoadWordlist:
    def test_basic_load(self, tmp_path):
        path = tmp_path / "words.txt"
        path.write_text("# comment line\nalpha\nBETA\n\ngamma!\n", encoding="utf-8")
        wl = load_wordlist(str(path), name="test")
        assert wl.words == frozenset({"alpha", "beta", "gamma"})
        assert wl.raw_entries == 3
        assert wl.duplicates == 0
        assert "alpha" in wl
        assert "delta" not in wl
        assert len(wl) == 3

    def test_duplicates_counted_and_warned(self, tmp_path, caplog):
        path = tmp_path / "words.txt"
        path.write_text("alpha\nAlpha\nALPHA!\nbeta\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="ars_engine.lexicon"):
            wl = load_wordlist(str(path), name="dups")
        assert wl.words == frozenset({"alpha", "beta"})
        assert wl.duplicates == 2
        assert any("duplicate" in rec.message for rec in caplog.records)

    def test_declared_size_mismatch_warns_not_fails(self, tmp_path, caplog):
        path = tmp_path / "words.txt"
        path.write_text("alpha\nbeta\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="ars_engine.lexicon"):
            wl = load_wordlist(str(path), name="short", declared_size=5)
        assert len(wl) == 2
        assert any("declared 5" in rec.message for rec in caplog.records)

    def test_empty_list_rejected(self, tmp_path):
        path = tmp_path / "words.txt"
        path.write_text("# nothing but comments\n", encoding="utf-8")
        with pytest.raises(InputError, match="no usable entries"):
            load_wordlist(str(path), name="empty")

    def test_unnormalizable_entry_skipped(self, tmp_path):
        path = tmp_path / "words.txt"
        path.write_text("alpha\n!!!\n", encoding="utf-8")
        wl = load_wordlist(str(path), name="odd")
        assert wl.words == frozenset({"alpha"})
        assert wl.raw_entries == 2


class TestPackagedLists:
    def test_aesthetic_words(self):
        wl = default_aesthetic_words()
        assert wl.raw_entries == 1021
        assert len(wl) == 1012
        for word in ("shot", "light", "composition", "sharp"):
            assert word in wl, word

    def test_object_words(self):
        wl = default_object_words()
        assert wl.raw_entries == 2145
        assert len(wl) == 2145
        for word in ("tree", "sky", "water", "dog"):
            assert word in wl, word

    def test_sentiment_lists_disjoint_enough(self):
        pos = default_positive_words()
        neg = default_negative_words()
        assert len(pos) > 0 and len(neg) > 0
        assert not (pos.words & neg.words)

    def test_lists_are_tokenizer_normalized(self):
        """Every stored word must be a fixed point of the tokenizer."""
        for wl in (default_aesthetic_words(), default_object_words()):
            for word in wl.words:
                sent = tokenize(word)
                assert sent is not None and sent.tokens == (word,), word


class TestCountHits:
    def test_per_occurrence(self, tmp_path):
        path = tmp_path / "words.txt"
        path.write_text("light\ntone\n", encoding="utf-8")
        wl = load_wordlist(str(path), name="hits")
        sent = tokenize("The LIGHT, the light, and the tone")
        assert count_hits(sent, wl) == 3

    def test_zero_hits(self, tmp_path):
        path = tmp_path / "words.txt"
        path.write_text("light\n", encoding="utf-8")
        wl = load_wordlist(str(path), name="hits")
        assert count_hits(tokenize("no matches here"), wl) == 0
