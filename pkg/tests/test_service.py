import json
from types import SimpleNamespace

import numpy as np
import pytest
from fastapi.testclient import TestClient

from readranker import NotFound, RateLimited, UpstreamError
from readranker.features import FEATURE_NAMES
from readranker.ranker import ReadabilityRanker
from readranker.service import ServiceConfig, WikiClient, bench, create_app
from readranker.types import ArticleText


def _model() -> ReadabilityRanker:
    model = ReadabilityRanker(mode="document")
    weights = np.zeros(len(FEATURE_NAMES))
    weights[FEATURE_NAMES.index("words_per_sentence")] = 0.5
    model.feature_names_ = list(FEATURE_NAMES)
    model.norm_mean_ = np.zeros(len(FEATURE_NAMES))
    model.norm_std_ = np.ones(len(FEATURE_NAMES))
    model.params_ = [[weights.reshape(1, -1), np.array([0.0])]]
    model.loss_curve_ = []
    model.best_epoch_ = 0
    model.n_examples_ = 0
    return model


def _response(status: int, text: str = "", headers: dict | None = None):
    return SimpleNamespace(status_code=status, text=text, headers=headers or {})


def _fixture_client(routes: dict, config: ServiceConfig | None = None) -> WikiClient:
    def http_get(url, headers, timeout):
        assert "User-Agent" in headers
        if url in routes:
            return routes[url]
        return _response(404)

    return WikiClient(config or ServiceConfig(), http_get=http_get)


ARTICLE_HTML = "<p>Water is a liquid. It is wet. Fish live in it.</p><h2>More</h2><p>x</p>"
BASE = "https://en.wikipedia.org/api/rest_v1/page/html/"


# ------------------------------------------------------------- wiki client

def test_fetch_article_fixture():
    client = _fixture_client({BASE + "Water": _response(200, ARTICLE_HTML)})
    doc = client.fetch_article("en", "Water")
    assert doc.html == ARTICLE_HTML
    assert doc.title == "Water"
    assert doc.lang == "en"


def test_fetch_article_not_found():
    client = _fixture_client({})
    with pytest.raises(NotFound):
        client.fetch_article("en", "Missing")


def test_fetch_article_rate_limited():
    client = _fixture_client({BASE + "Busy": _response(429)})
    with pytest.raises(RateLimited):
        client.fetch_article("en", "Busy")


def test_fetch_article_upstream_error():
    config = ServiceConfig(retries=0)
    client = _fixture_client({BASE + "Broken": _response(503)}, config)
    with pytest.raises(UpstreamError):
        client.fetch_article("en", "Broken")


def test_fetch_article_follows_redirect_chain():
    routes = {
        BASE + "A": _response(302, headers={"Location": BASE + "B"}),
        BASE + "B": _response(200, ARTICLE_HTML),
    }
    client = _fixture_client(routes)
    doc = client.fetch_article("en", "A")
    assert doc.html == ARTICLE_HTML
    assert doc.title == "A"  # provenance keeps the requested title


def test_fetch_article_retries_then_succeeds():
    calls = []

    def http_get(url, headers, timeout):
        calls.append(url)
        if len(calls) < 2:
            return _response(500)
        return _response(200, ARTICLE_HTML)

    config = ServiceConfig(retries=2, backoff_s=0.0)
    client = WikiClient(config, http_get=http_get)
    doc = client.fetch_article("en", "Flaky")
    assert doc.html == ARTICLE_HTML
    assert len(calls) == 2


def test_revision_in_url():
    seen = []

    def http_get(url, headers, timeout):
        seen.append(url)
        return _response(200, ARTICLE_HTML)

    WikiClient(ServiceConfig(), http_get=http_get).fetch_article("en", "Water", revision=42)
    assert seen == [BASE + "Water/42"]


# -------------------------------------------------------------- service app

def _client(model=None, wiki=None) -> TestClient:
    app = create_app(model, ServiceConfig(), client=wiki)
    return TestClient(app)


def test_health_endpoint():
    client = _client(_model())
    body = client.get("/v1/health").json()
    assert body["status"] == "ok"
    assert body["model_version"]
    assert body["uptime_s"] >= 0


def test_score_inline_text():
    client = _client(_model())
    response = client.post("/v1/score", json={"text": "One two three. Four five six.", "lang": "en"})
    assert response.status_code == 200
    body = response.json()
    assert body["n_sentences"] == 2
    assert body["score"] == pytest.approx(1.5)  # 0.5 * words_per_sentence
    assert body["elapsed_ms"] >= 0
    assert body["source_title"] is None


def test_score_requires_exactly_one_input():
    client = _client(_model())
    both = client.post("/v1/score", json={"text": "x", "title": "y", "lang": "en"})
    neither = client.post("/v1/score", json={"lang": "en"})
    assert both.status_code == 400
    assert neither.status_code == 400
    assert both.json()["code"] == "invalid_request"


def test_score_no_model_gives_503():
    client = _client(None)
    response = client.post("/v1/score", json={"text": "Hello there.", "lang": "en"})
    assert response.status_code == 503
    assert response.json()["code"] == "model_not_loaded"


def test_score_by_title_matches_library_bit_exact():
    model = _model()
    wiki = _fixture_client({BASE + "Water": _response(200, ARTICLE_HTML)})
    client = _client(model, wiki)
    response = client.get("/v1/score", params={"lang": "en", "title": "Water"})
    assert response.status_code == 200
    body = response.json()

    from readranker.html_extract import extract_lead_text

    doc = wiki.fetch_article("en", "Water")
    expected = model.score_text(extract_lead_text(doc))
    assert body["score"] == expected  # bit-identical through JSON
    assert body["source_title"] == "Water"


def test_score_title_not_found_maps_404():
    client = _client(_model(), _fixture_client({}))
    response = client.post("/v1/score", json={"title": "Nope", "lang": "en"})
    assert response.status_code == 404
    assert response.json()["code"] == "not_found"


def test_score_empty_lead_maps_422():
    wiki = _fixture_client({BASE + "Hollow": _response(200, "<div>nothing</div>")})
    client = _client(_model(), wiki)
    response = client.post("/v1/score", json={"title": "Hollow", "lang": "en"})
    assert response.status_code == 422
    assert response.json()["code"] == "empty_lead"


def test_score_upstream_maps_502():
    wiki = _fixture_client({BASE + "Err": _response(500)}, ServiceConfig(retries=0))
    client = _client(_model(), wiki)
    response = client.post("/v1/score", json={"title": "Err", "lang": "en"})
    assert response.status_code == 502
    assert response.json()["code"] == "upstream"


def test_empty_inline_text_maps_422():
    client = _client(_model())
    response = client.post("/v1/score", json={"text": "...", "lang": "en"})
    assert response.status_code == 422
    assert response.json()["code"] == "empty_text"


# ------------------------------------------------------------------ config

def test_config_file_and_env_overrides(tmp_path):
    path = tmp_path / "service.json"
    path.write_text(json.dumps({
        "port": 9000,
        "timeout_s": 3.5,
        "api_overrides": {"eu": "https://eu.wikipedia.org/api/rest_v1/page/html/"},
    }))
    config = ServiceConfig.load(path, env={"READRANKER_PORT": "9100",
                                           "READRANKER_MODEL": "/models/m.json"})
    assert config.port == 9100  # env wins over file
    assert config.timeout_s == 3.5
    assert config.model_path == "/models/m.json"
    assert config.api_base("eu").startswith("https://eu.")
    assert config.api_base("fr") == "https://fr.wikipedia.org/api/rest_v1/page/html/"


def test_rate_limiter_spaces_requests():
    import time

    from readranker.service import _RateLimiter

    limiter = _RateLimiter(min_interval_s=0.05)
    start = time.monotonic()
    limiter.wait("host")
    limiter.wait("host")
    assert time.monotonic() - start >= 0.045
    # A different host is not throttled by the first one.
    other_start = time.monotonic()
    limiter.wait("elsewhere")
    assert time.monotonic() - other_start < 0.04


# ------------------------------------------------------------------- bench

def test_bench_single_text():
    model = _model()
    texts = [ArticleText.build("Only one. Text here. For timing.")]
    result = bench(model.score_text, texts, threads=1)
    assert result["n"] == 1
    assert result["median_ms"] == result["p75_ms"] == result["p95_ms"]
    assert result["median_ms"] >= 0


def test_bench_percentile_structure():
    model = _model()
    texts = [ArticleText.build(f"Sentence {i}. Another {i}.") for i in range(40)]
    result = bench(model.score_text, texts, threads=1)
    assert result["median_ms"] <= result["p75_ms"] <= result["p95_ms"]
    assert result["n"] == 40
