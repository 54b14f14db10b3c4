"""Shared fixtures: the frozen toy corpus and everything derived from it."""

from __future__ import annotations

import json
import logging
import pathlib

import pytest

from ars_engine import ArsScorer, compute_frozen_stats, label_corpus, load_corpus
from ars_engine.providers import TableSentimentProvider, load_sentiment_table

logging.getLogger("ars_engine").setLevel(logging.ERROR)

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> pathlib.Path:
    return DATA


@pytest.fixture(scope="session")
def toy_corpus_path() -> str:
    return str(DATA / "toy_corpus.jsonl")


@pytest.fixture(scope="session")
def toy_corpus(toy_corpus_path):
    return load_corpus(toy_corpus_path)


@pytest.fixture(scope="session")
def toy_stats(toy_corpus):
    return compute_frozen_stats(toy_corpus)


@pytest.fixture(scope="session")
def toy_sentiment_provider():
    return TableSentimentProvider(
        load_sentiment_table(str(DATA / "toy_sentiment.jsonl")), source="toy_sentiment"
    )


@pytest.fixture(scope="session")
def toy_scorer(toy_corpus, toy_stats, toy_sentiment_provider):
    return ArsScorer(toy_stats, sentiment_provider=toy_sentiment_provider, corpus=toy_corpus)


@pytest.fixture(scope="session")
def toy_labels(toy_corpus, toy_scorer):
    return label_corpus(toy_corpus, toy_scorer)


def write_jsonl(path: pathlib.Path, rows) -> str:
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    return str(path)


@pytest.fixture
def make_corpus(tmp_path):
    """Write corpus rows to a temp JSONL file and load them."""

    def build(rows, name="corpus.jsonl"):
        return load_corpus(write_jsonl(tmp_path / name, rows))

    return build
