"""HTTP service behavior over the frozen toy statistics."""

from __future__ import annotations

import pathlib

import pytest
from fastapi.testclient import TestClient

from ars_engine import save_stats, with_ars_distribution
from ars_engine.service.app import EngineRuntime, create_app, create_app_from_env

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def frozen_stats_path(tmp_path_factory, request):
    """Toy stats with a frozen score distribution, saved to disk."""
    toy_stats = request.getfixturevalue("toy_stats")
    toy_labels = request.getfixturevalue("toy_labels")
    stats = with_ars_distribution(
        toy_stats, toy_labels.summary.mean, toy_labels.summary.scale
    )
    path = tmp_path_factory.mktemp("service") / "stats.json"
    save_stats(stats, str(path))
    return str(path)


@pytest.fixture(scope="module")
def client(frozen_stats_path):
    """Lexicon sentiment: the service must handle arbitrary request texts."""
    runtime = EngineRuntime.from_paths(stats_path=frozen_stats_path)
    return TestClient(create_app(runtime))


class TestHealth:
    def test_health(self, client, toy_labels):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["ars_mean"] == pytest.approx(toy_labels.summary.mean, abs=1e-12)

    def test_stats(self, client, toy_stats):
        body = client.get("/stats").json()
        assert body["document_count"] == 20
        assert body["term_count"] == len(toy_stats.tfidf.doc_freq)
        assert body["min_len"] == 2
        assert body["max_len"] == 12
        assert body["corpus_hash"] == toy_stats.corpus_hash


class TestScore:
    def test_score_matches_library(self, client, toy_stats):
        from ars_engine import ArsScorer

        response = client.post("/score", json={"text": "Great shot"})
        assert response.status_code == 200
        body = response.json()
        b = ArsScorer(toy_stats).score_text("Great shot")
        assert body["aesthetic_words"] == b.aesthetic_words
        assert body["object_words"] == b.object_words
        assert body["length"] == b.length
        assert body["tfidf"] == pytest.approx(b.tfidf, abs=1e-12)
        assert body["ars"] == pytest.approx(
            body["aesthetic_words"]
            + body["length"]
            + body["object_words"]
            + body["sentiment"]
            + body["tfidf"],
            abs=1e-12,
        )

    def test_score_batch(self, client):
        response = client.post(
            "/score/batch", json={"texts": ["Great shot", "water and sky"]}
        )
        assert response.status_code == 200
        scores = response.json()["scores"]
        assert len(scores) == 2
        single = client.post("/score", json={"text": "Great shot"}).json()
        assert scores[0] == single

    def test_empty_text_rejected_by_schema(self, client):
        assert client.post("/score", json={"text": ""}).status_code == 422

    def test_unscorable_text_400(self, client):
        response = client.post("/score", json={"text": "!!!"})
        assert response.status_code == 400
        assert "no tokens" in response.json()["detail"]


class TestSelect:
    CANDIDATES = [
        {"text": "wonderful light and tones", "confidence": 0.9},
        {"text": "wonderful light and tone", "confidence": 0.85},
        {"text": "a dog by the water", "confidence": 0.6},
    ]

    def test_select_defaults_to_frozen_floor(self, client):
        response = client.post("/select", json={"candidates": self.CANDIDATES})
        assert response.status_code == 200
        selections = response.json()["selections"]
        assert [s["rank"] for s in selections] == list(range(1, len(selections) + 1))

    def test_floor_zero_keeps_all_groups(self, client):
        response = client.post(
            "/select", json={"candidates": self.CANDIDATES, "floor": 0.0}
        )
        selections = response.json()["selections"]
        assert sum(s["group_size"] for s in selections) == len(self.CANDIDATES)
        ars = [s["ars"] for s in selections]
        assert ars == sorted(ars, reverse=True)

    def test_near_duplicates_group_together(self, client):
        response = client.post(
            "/select",
            json={"candidates": self.CANDIDATES, "floor": 0.0, "threshold": 0.7},
        )
        selections = response.json()["selections"]
        sizes = sorted(s["group_size"] for s in selections)
        assert sizes == [1, 2]

    def test_blacklist(self, client):
        response = client.post(
            "/select",
            json={
                "candidates": self.CANDIDATES,
                "floor": 0.0,
                "blacklist": ["A dog by the WATER!"],
            },
        )
        selections = response.json()["selections"]
        assert all("dog" not in s["text"] for s in selections)

    def test_max_outputs(self, client):
        response = client.post(
            "/select",
            json={"candidates": self.CANDIDATES, "floor": 0.0, "max_outputs": 1},
        )
        assert len(response.json()["selections"]) == 1

    def test_bad_grouping_400(self, client):
        response = client.post(
            "/select",
            json={"candidates": self.CANDIDATES, "floor": 0.0, "grouping": "kmeans"},
        )
        assert response.status_code == 400

    def test_unfrozen_stats_need_explicit_floor(self, toy_stats, tmp_path):
        path = tmp_path / "unfrozen.json"
        save_stats(toy_stats, str(path))
        runtime = EngineRuntime.from_paths(stats_path=str(path))
        bare = TestClient(create_app(runtime))
        response = bare.post(
            "/select", json={"candidates": [{"text": "anything", "confidence": 0.5}]}
        )
        assert response.status_code == 400
        assert "floor" in response.json()["detail"]


class TestLoss:
    def test_loss_round_trip(self, client):
        response = client.post(
            "/loss",
            json={
                "sentences": [
                    {"weight": 2.0, "token_log_probs": [-1.0, -0.5]},
                    {"weight": 0.5, "token_log_probs": [-2.0]},
                ]
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["per_sentence"] == [3.0, 1.0]
        assert body["total"] == 4.0
        assert body["sentence_count"] == 2

    def test_positive_log_prob_400(self, client):
        response = client.post(
            "/loss",
            json={"sentences": [{"weight": 1.0, "token_log_probs": [0.5]}]},
        )
        assert response.status_code == 400

    def test_empty_batch_422(self, client):
        assert client.post("/loss", json={"sentences": []}).status_code == 422


class TestEnvFactory:
    def test_env_factory(self, frozen_stats_path, monkeypatch):
        monkeypatch.setenv("ARS_ENGINE_STATS", frozen_stats_path)
        monkeypatch.setenv(
            "ARS_ENGINE_SENTIMENT", f"file:{DATA / 'toy_sentiment.jsonl'}"
        )
        app = create_app_from_env()
        body = TestClient(app).get("/health").json()
        assert body["status"] == "ok"

    def test_env_factory_requires_stats(self, monkeypatch):
        monkeypatch.delenv("ARS_ENGINE_STATS", raising=False)
        from ars_engine import InputError

        with pytest.raises(InputError, match="ARS_ENGINE_STATS"):
            create_app_from_env()
