"""HTTP scoring endpoint with a MediaWiki article fetcher.

POST /v1/score takes either inline text or (lang, title); title requests
fetch the rendered article HTML from the wiki REST API, extract the lead
section, and score it with the model loaded at startup. The HTTP client is
injectable so tests run against canned fixtures. The model is immutable
after startup and shared across requests.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence
from urllib.parse import quote, urljoin

from pydantic import BaseModel

from . import __version__
from .errors import NotFound, RateLimited, ReadrankerError, UpstreamError
from .html_extract import extract_lead_text
from .types import ArticleText, RawDocument

DEFAULT_API_TEMPLATE = "https://{lang}.wikipedia.org/api/rest_v1/page/html/"


@dataclass
class ServiceConfig:
    model_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8080
    api_template: str = DEFAULT_API_TEMPLATE
    api_overrides: dict[str, str] = field(default_factory=dict)  # lang -> base URL
    timeout_s: float = 10.0
    retries: int = 2
    backoff_s: float = 0.5
    min_request_interval_s: float = 0.0
    max_redirects: int = 5
    user_agent: str = f"readranker/{__version__} (readability scoring service)"

    def api_base(self, lang: str) -> str:
        if lang in self.api_overrides:
            return self.api_overrides[lang]
        return self.api_template.format(lang=lang)

    @classmethod
    def load(cls, path: str | Path | None = None, env=os.environ) -> "ServiceConfig":
        """Config file (JSON) overlaid with READRANKER_* env overrides."""
        data: dict = {}
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        cfg = cls(**{k: v for k, v in data.items() if k in cls.__dataclass_fields__})
        if "READRANKER_MODEL" in env:
            cfg.model_path = env["READRANKER_MODEL"]
        if "READRANKER_HOST" in env:
            cfg.host = env["READRANKER_HOST"]
        if "READRANKER_PORT" in env:
            cfg.port = int(env["READRANKER_PORT"])
        if "READRANKER_TIMEOUT_S" in env:
            cfg.timeout_s = float(env["READRANKER_TIMEOUT_S"])
        if "READRANKER_MIN_REQUEST_INTERVAL_S" in env:
            cfg.min_request_interval_s = float(env["READRANKER_MIN_REQUEST_INTERVAL_S"])
        return cfg


class _RateLimiter:
    """Minimum spacing between upstream calls, per host."""

    def __init__(self, min_interval_s: float):
        self.min_interval_s = min_interval_s
        self._last: dict[str, float] = {}
        self._lock = threading.Lock()

    def wait(self, host: str) -> None:
        if self.min_interval_s <= 0:
            return
        with self._lock:
            now = time.monotonic()
            ready = self._last.get(host, 0.0) + self.min_interval_s
            delay = max(0.0, ready - now)
            self._last[host] = max(now, ready)
        if delay > 0:
            time.sleep(delay)


def _default_http_get(url: str, headers: dict, timeout: float):
    import requests

    return requests.get(url, headers=headers, timeout=timeout, allow_redirects=False)


class WikiClient:
    """Fetches rendered article HTML from a MediaWiki REST API."""

    def __init__(
        self,
        config: ServiceConfig | None = None,
        http_get: Callable | None = None,
        rng: random.Random | None = None,
    ):
        self.config = config or ServiceConfig()
        self.http_get = http_get or _default_http_get
        self.limiter = _RateLimiter(self.config.min_request_interval_s)
        self._rng = rng or random.Random(0)

    def _get(self, url: str):
        host = url.split("/", 3)[2] if "://" in url else url
        headers = {"User-Agent": self.config.user_agent}
        last_exc: Exception | None = None
        for attempt in range(self.config.retries + 1):
            self.limiter.wait(host)
            try:
                response = self.http_get(url, headers=headers, timeout=self.config.timeout_s)
            except Exception as exc:
                last_exc = exc
                if attempt < self.config.retries:
                    time.sleep(self.config.backoff_s * (attempt + 1) * (1 + self._rng.random()))
                    continue
                raise UpstreamError(f"request to {url} failed: {exc}") from exc
            if response.status_code >= 500 and attempt < self.config.retries:
                time.sleep(self.config.backoff_s * (attempt + 1) * (1 + self._rng.random()))
                continue
            return response
        raise UpstreamError(f"request to {url} failed: {last_exc}")

    def fetch_article(self, lang: str, title: str, revision: int | None = None) -> RawDocument:
        """Rendered HTML for the article, following redirects. The returned
        document keeps the requested title as provenance."""
        base = self.config.api_base(lang)
        path = quote(title.replace(" ", "_"), safe="")
        url = base + path + (f"/{revision}" if revision else "")
        for _ in range(self.config.max_redirects + 1):
            response = self._get(url)
            status = response.status_code
            if status in (301, 302, 303, 307, 308):
                location = response.headers.get("Location") or response.headers.get("location")
                if not location:
                    raise UpstreamError(f"redirect from {url} without Location")
                url = urljoin(url, location)
                continue
            if status == 404:
                raise NotFound(f"article {title!r} not found on {lang}")
            if status == 429:
                raise RateLimited(f"rate limited fetching {title!r} from {lang}")
            if not 200 <= status < 300:
                raise UpstreamError(f"upstream returned {status} for {url}")
            return RawDocument(html=response.text, title=title, lang=lang, source="wikipedia")
        raise UpstreamError(f"too many redirects fetching {title!r}")


def _score_payload(model, text_obj: ArticleText, source_title: str | None,
                   elapsed_ms: float) -> dict:
    return {
        "score": model.score_text(text_obj),
        "n_sentences": text_obj.num_sentences,
        "n_chars": text_obj.num_chars,
        "model_version": getattr(model, "version_", None) or MODEL_VERSION_FALLBACK,
        "lang": text_obj.lang,
        "source_title": source_title,
        "elapsed_ms": elapsed_ms,
    }


MODEL_VERSION_FALLBACK = f"readranker/{__version__}"


class ScoreBody(BaseModel):
    """Wire schema of a score request: exactly one of text or title."""

    text: Optional[str] = None
    title: Optional[str] = None
    lang: Optional[str] = None
    revision: Optional[int] = None


def create_app(model=None, config: ServiceConfig | None = None,
               client: WikiClient | None = None):
    """Build the FastAPI app. ``model`` may be None (score returns 503)."""
    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse

    config = config or ServiceConfig()
    client = client or WikiClient(config)
    app = FastAPI(title="readranker", version=__version__)
    app.state.model = model
    app.state.started = time.monotonic()

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(ReadrankerError)
    async def _domain_error(request: Request, exc: ReadrankerError):
        status = {
            "not_found": 404,
            "rate_limited": 429,
            "empty_lead": 422,
            "empty_text": 422,
            "malformed_input": 422,
            "upstream": 502,
        }.get(exc.code, 500)
        return error(status, exc.code, str(exc))

    @app.get("/v1/health")
    def health():
        m = app.state.model
        version = None if m is None else (getattr(m, "version_", None) or MODEL_VERSION_FALLBACK)
        return {
            "status": "ok" if m is not None else "no_model",
            "model_version": version,
            "uptime_s": time.monotonic() - app.state.started,
        }

    def do_score(body: ScoreBody):
        started = time.perf_counter()
        m = app.state.model
        if m is None:
            return error(503, "model_not_loaded", "no model was loaded at startup")
        if (body.text is None) == (body.title is None):
            return error(400, "invalid_request", "provide exactly one of text or title")
        if not body.lang:
            return error(400, "invalid_request", "lang is required")
        if body.text is not None:
            text_obj = ArticleText.build(body.text, lang=body.lang, source="other")
            source_title = None
        else:
            doc = client.fetch_article(body.lang, body.title, body.revision)
            text_obj = extract_lead_text(doc)
            source_title = body.title
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return _score_payload(m, text_obj, source_title, elapsed_ms)

    @app.post("/v1/score")
    def score_post(body: ScoreBody):
        return do_score(body)

    @app.get("/v1/score")
    def score_get(lang: str = "", title: str = "", revision: Optional[int] = None):
        return do_score(ScoreBody(title=title or None, lang=lang or None, revision=revision))

    return app


def bench(
    score_fn: Callable[[ArticleText], float],
    texts: Sequence[ArticleText],
    threads: int = 1,
) -> dict:
    """Per-text wall-clock latency percentiles. Each worker scores its
    share sequentially, matching a sequential measurement protocol."""
    from .evalkit import distribution_report

    def run(batch: Sequence[ArticleText]) -> list[float]:
        times = []
        for text in batch:
            start = time.perf_counter()
            score_fn(text)
            times.append((time.perf_counter() - start) * 1000.0)
        return times

    if threads <= 1:
        latencies = run(texts)
    else:
        from concurrent.futures import ThreadPoolExecutor

        shares = [list(texts[i::threads]) for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            latencies = [t for chunk in pool.map(run, shares) for t in chunk]
    report = distribution_report(latencies, language="")
    import numpy as np

    return {
        "n": len(latencies),
        "threads": threads,
        "median_ms": report.median,
        "p75_ms": report.p75,
        "p95_ms": float(np.percentile(np.asarray(latencies), 95)),
    }
