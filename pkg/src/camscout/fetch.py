"""Pluggable page/byte fetchers.

The crawler, sampler, and stream prober all speak to the network through this
one contract so tests can swap in recorded fixtures. StaticFetcher is a plain
HTTP client (no JavaScript, so xhr_responses stays empty); RendererFetcher
posts to an external headless-render service that returns the rendered HTML
plus the XHR traffic it observed; FixtureFetcher replays recorded sites and
logs every call it serves.
"""

from __future__ import annotations

import base64
import json
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol
from urllib.parse import urlsplit

import requests

from .clock import Clock, SystemClock
from .extract import RenderedPage, XhrResponse

RENDERER_URL_ENV = "CAMSCOUT_RENDERER_URL"

MAX_REDIRECTS = 5


class FetchError(Exception):
    """A request failed outright (connection refused, DNS, too many redirects)."""


class FetchTimeout(FetchError):
    """The server did not produce a response within the allotted timeout."""


@dataclass
class RawResponse:
    url: str
    status: int
    content_type: str
    body: bytes

    @property
    def ok(self) -> bool:
        return 200 <= self.status < 300


class Fetcher(Protocol):
    def fetch(self, url: str, timeout: float = 180.0, render_wait: float = 8.0) -> RenderedPage:
        """Fetch and (if supported) render a page. Raises FetchTimeout/FetchError."""
        ...

    def get(self, url: str, timeout: float = 30.0) -> RawResponse:
        """Plain GET for media bytes, playlists, and robots.txt."""
        ...

    def open_stream(self, url: str, timeout: float = 30.0) -> tuple[str, Iterator[bytes]]:
        """Open a streaming GET; returns (content_type, chunk iterator)."""
        ...


class StaticFetcher:
    """requests-backed fetcher. Follows up to MAX_REDIRECTS hops; the final
    URL after redirects is what lands in RenderedPage.url."""

    def __init__(self, user_agent: str = "camscout/0.1", clock: Clock | None = None):
        self.clock = clock or SystemClock()
        self._session = requests.Session()
        self._session.max_redirects = MAX_REDIRECTS
        self._session.headers["User-Agent"] = user_agent

    def fetch(self, url: str, timeout: float = 180.0, render_wait: float = 8.0) -> RenderedPage:
        resp = self._request(url, timeout)
        return RenderedPage(
            url=resp.url,
            status=resp.status_code,
            html=resp.text if resp.status_code < 300 else "",
            xhr_responses=[],
            fetched_at=self.clock.now(),
        )

    def get(self, url: str, timeout: float = 30.0) -> RawResponse:
        resp = self._request(url, timeout)
        return RawResponse(
            url=resp.url,
            status=resp.status_code,
            content_type=resp.headers.get("Content-Type", ""),
            body=resp.content,
        )

    def open_stream(self, url: str, timeout: float = 30.0) -> tuple[str, Iterator[bytes]]:
        try:
            resp = self._session.get(url, timeout=timeout, stream=True)
        except requests.Timeout as exc:
            raise FetchTimeout(f"timeout opening {url}") from exc
        except requests.RequestException as exc:
            raise FetchError(f"failed to open {url}: {exc}") from exc
        return resp.headers.get("Content-Type", ""), resp.iter_content(chunk_size=4096)

    def _request(self, url: str, timeout: float) -> requests.Response:
        try:
            return self._session.get(url, timeout=timeout)
        except requests.Timeout as exc:
            raise FetchTimeout(f"timeout fetching {url}") from exc
        except requests.RequestException as exc:
            raise FetchError(f"failed to fetch {url}: {exc}") from exc


class RendererFetcher:
    """Adapter for an external headless-render service.

    POSTs {"url": ..., "wait": ...} to the endpoint and expects
    {"html": str, "status": int, "xhr": [{"url", "content_type", "body_b64"}]}.
    Byte-level GETs fall back to a StaticFetcher since media requests need no
    rendering.
    """

    def __init__(self, endpoint: str, user_agent: str = "camscout/0.1", clock: Clock | None = None):
        self.endpoint = endpoint
        self.clock = clock or SystemClock()
        self._static = StaticFetcher(user_agent=user_agent, clock=self.clock)

    def fetch(self, url: str, timeout: float = 180.0, render_wait: float = 8.0) -> RenderedPage:
        try:
            resp = requests.post(
                self.endpoint, json={"url": url, "wait": render_wait}, timeout=timeout
            )
            resp.raise_for_status()
            payload = resp.json()
        except requests.Timeout as exc:
            raise FetchTimeout(f"renderer timeout for {url}") from exc
        except (requests.RequestException, json.JSONDecodeError) as exc:
            raise FetchError(f"renderer failed for {url}: {exc}") from exc
        return parse_renderer_response(url, payload, fetched_at=self.clock.now())

    def get(self, url: str, timeout: float = 30.0) -> RawResponse:
        return self._static.get(url, timeout)

    def open_stream(self, url: str, timeout: float = 30.0) -> tuple[str, Iterator[bytes]]:
        return self._static.open_stream(url, timeout)


def parse_renderer_response(url: str, payload: dict, fetched_at: float = 0.0) -> RenderedPage:
    xhr = []
    for entry in payload.get("xhr", []):
        body = entry.get("body_b64")
        raw = base64.b64decode(body) if body else entry.get("body", "").encode()
        xhr.append(
            XhrResponse(
                request_url=entry.get("url", ""),
                content_type=entry.get("content_type", ""),
                body=raw,
            )
        )
    return RenderedPage(
        url=payload.get("final_url", url),
        status=int(payload.get("status", 200)),
        html=payload.get("html", ""),
        xhr_responses=xhr,
        fetched_at=fetched_at,
    )


class FixtureFetcher:
    """Replays a recorded site for tests and hermetic pipeline runs.

    pages:     {url: html | {"html", "status"} | {"error": "timeout"|"fetch"}}
    xhr:       {page_url: [(request_url, content_type, body_bytes), ...]}
    media:     {url: bytes | [bytes, ...] | {"frames": [...], "content_type": str}}
               A list rotates one entry per request (clamped to the last).
    robots:    {host: robots_txt_text}
    redirects: {url: target_url}

    Every served request is appended to ``calls`` as (url, clock.now()),
    which is what politeness and no-refetch assertions read.
    """

    def __init__(
        self,
        pages: dict | None = None,
        xhr: dict | None = None,
        media: dict | None = None,
        robots: dict | None = None,
        redirects: dict | None = None,
        clock: Clock | None = None,
    ):
        self.pages = pages or {}
        self.xhr = xhr or {}
        self.media = media or {}
        self.robots = robots or {}
        self.redirects = redirects or {}
        self.clock = clock or SystemClock()
        self.calls: list[tuple[str, float]] = []
        self._media_hits: dict[str, int] = {}
        self._lock = threading.Lock()

    def _log(self, url: str) -> None:
        with self._lock:
            self.calls.append((url, self.clock.now()))

    def _follow_redirects(self, url: str) -> str:
        for _ in range(MAX_REDIRECTS):
            if url not in self.redirects:
                return url
            url = self.redirects[url]
        raise FetchError(f"too many redirects from {url}")

    def fetch(self, url: str, timeout: float = 180.0, render_wait: float = 8.0) -> RenderedPage:
        self._log(url)
        final = self._follow_redirects(url)
        entry = self.pages.get(final)
        if entry is None:
            return RenderedPage(url=final, status=404, html="", fetched_at=self.clock.now())
        if isinstance(entry, dict) and "error" in entry:
            if entry["error"] == "timeout":
                raise FetchTimeout(f"fixture timeout for {url}")
            raise FetchError(f"fixture error for {url}")
        html = entry["html"] if isinstance(entry, dict) else entry
        status = entry.get("status", 200) if isinstance(entry, dict) else 200
        xhr = [
            XhrResponse(request_url=u, content_type=ct, body=body)
            for (u, ct, body) in self.xhr.get(final, [])
        ]
        return RenderedPage(
            url=final, status=status, html=html, xhr_responses=xhr, fetched_at=self.clock.now()
        )

    def get(self, url: str, timeout: float = 30.0) -> RawResponse:
        self._log(url)
        final = self._follow_redirects(url)
        parts = urlsplit(final)
        if parts.path == "/robots.txt":
            text = self.robots.get(parts.hostname or "")
            if text is None:
                return RawResponse(url=final, status=404, content_type="text/plain", body=b"")
            return RawResponse(
                url=final, status=200, content_type="text/plain", body=text.encode()
            )
        entry = self.media.get(final)
        if entry is None:
            return RawResponse(url=final, status=404, content_type="", body=b"")
        if isinstance(entry, dict) and "error" in entry:
            if entry["error"] == "timeout":
                raise FetchTimeout(f"fixture timeout for {url}")
            raise FetchError(f"fixture error for {url}")
        body, content_type = self._media_body(final, entry)
        if body is None:
            return RawResponse(url=final, status=404, content_type="", body=b"")
        return RawResponse(url=final, status=200, content_type=content_type, body=body)

    def open_stream(self, url: str, timeout: float = 30.0) -> tuple[str, Iterator[bytes]]:
        resp = self.get(url, timeout)
        if not resp.ok:
            raise FetchError(f"fixture has no stream for {url}")

        def chunks(data: bytes) -> Iterator[bytes]:
            for i in range(0, len(data), 4096):
                yield data[i : i + 4096]

        return resp.content_type, chunks(resp.body)

    def _media_body(self, url: str, entry) -> tuple[bytes | None, str]:
        content_type = "image/jpeg"
        frames: Iterable[bytes] | bytes = entry
        if isinstance(entry, dict):
            content_type = entry.get("content_type", content_type)
            frames = entry.get("frames", b"")
        if isinstance(frames, bytes):
            return frames, content_type
        frames = list(frames)
        if not frames:
            return None, content_type
        with self._lock:
            n = self._media_hits.get(url, 0)
            self._media_hits[url] = n + 1
        return frames[min(n, len(frames) - 1)], content_type

    # -- call-log helpers used by tests ------------------------------------

    def fetched_urls(self) -> list[str]:
        return [u for (u, _) in self.calls]


def load_fixture(path) -> FixtureFetcher:
    """Build a FixtureFetcher from a recorded-site JSON file.

    Bodies are UTF-8 strings or base64 under *_b64 keys; media entries carry
    a frame list that rotates per request, so a "camera" is simply a URL with
    more than one distinct recorded frame.
    """
    with open(path) as fh:
        spec = json.load(fh)

    pages = dict(spec.get("pages", {}))
    xhr = {}
    for page_url, entries in spec.get("xhr", {}).items():
        parsed = []
        for e in entries:
            if "body_b64" in e:
                body = base64.b64decode(e["body_b64"])
            else:
                body = e.get("body", "").encode()
            parsed.append((e["url"], e.get("content_type", ""), body))
        xhr[page_url] = parsed
    media = {}
    for url, entry in spec.get("media", {}).items():
        if "frames_b64" in entry:
            frames = [base64.b64decode(f) for f in entry["frames_b64"]]
        else:
            frames = [f.encode() for f in entry.get("frames", [])]
        media[url] = {"frames": frames, "content_type": entry.get("content_type", "image/jpeg")}
    return FixtureFetcher(
        pages=pages,
        xhr=xhr,
        media=media,
        robots=spec.get("robots", {}),
        redirects=spec.get("redirects", {}),
    )
