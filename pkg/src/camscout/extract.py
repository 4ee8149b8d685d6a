"""Extract page links and candidate data links from fetched pages.

Two discovery channels: URLs embedded in the HTML itself (img/src, anchors,
video sources, iframes) and URLs carried inside XHR payloads (JSON, GeoJSON,
XML) captured while the page loaded. Map-style sites deliver most of their
camera links through the second channel.
"""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from html.parser import HTMLParser
from urllib.parse import urljoin, urlsplit

from .links import (
    DataLink,
    LinkKind,
    MalformedUrl,
    Provenance,
    canonicalize,
    classify_link,
    make_data_link,
)

log = logging.getLogger(__name__)

_SKIP_SCHEMES = ("javascript:", "mailto:", "data:", "tel:", "about:")

JSON_CONTENT_TYPES = ("application/json", "application/geo+json", "text/json")
XML_CONTENT_TYPES = ("application/xml", "text/xml")


@dataclass
class XhrResponse:
    request_url: str
    content_type: str
    body: bytes


@dataclass
class RenderedPage:
    """One fetched page: final URL, HTML body, and any XHR responses captured
    during rendering. Static fetchers leave xhr_responses empty."""

    url: str
    status: int
    html: str
    xhr_responses: list[XhrResponse] = field(default_factory=list)
    fetched_at: float = 0.0

    @property
    def ok(self) -> bool:
        return 200 <= self.status < 300


@dataclass
class ExtractionResult:
    """Links found on one page, deduplicated and in document order.

    page_links feed the crawl frontier; data_links are camera candidates.
    """

    page_links: list[str] = field(default_factory=list)
    data_links: list[DataLink] = field(default_factory=list)

    def __post_init__(self):
        self._page_seen: set[str] = {canonicalize(u, LinkKind.PAGE) for u in self.page_links}
        self._data_seen: set[str] = {dl.canonical_key for dl in self.data_links}

    def add_page(self, url: str) -> None:
        key = canonicalize(url, LinkKind.PAGE)
        if key not in self._page_seen:
            self._page_seen.add(key)
            self.page_links.append(url)

    def add_data(self, link: DataLink) -> None:
        if link.canonical_key not in self._data_seen:
            self._data_seen.add(link.canonical_key)
            self.data_links.append(link)

    def merge(self, other: "ExtractionResult") -> None:
        for url in other.page_links:
            self.add_page(url)
        for link in other.data_links:
            self.add_data(link)


class _LinkCollector(HTMLParser):
    """Tolerant tag scanner: collects (element, url) pairs in document order.

    Real camera sites are frequently malformed, so nothing here ever raises;
    the stdlib parser recovers the way browsers do.
    """

    URL_ATTRS = {"a": "href", "img": "src", "iframe": "src", "video": "src", "source": "src"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.found: list[tuple[str, str]] = []

    def handle_starttag(self, tag, attrs):
        attr = self.URL_ATTRS.get(tag)
        if attr is None:
            return
        for name, value in attrs:
            if name == attr and value:
                self.found.append((tag, value.strip()))


def _resolve(base: str, raw: str) -> str | None:
    if not raw or raw.startswith("#"):
        return None
    if raw.lower().startswith(_SKIP_SCHEMES):
        return None
    try:
        return urljoin(base, raw)
    except ValueError:
        return None


def extract_html_links(page: RenderedPage) -> ExtractionResult:
    """Scan a page's HTML for frontier links and data links.

    Anchor hrefs classified as pages go to page_links; anchors, img/src,
    video/source src, and iframe src classified as image or stream data
    become DataLinks. All URLs are resolved against the page URL.
    """
    result = ExtractionResult()
    collector = _LinkCollector()
    collector.feed(page.html or "")
    collector.close()

    for tag, raw in collector.found:
        url = _resolve(page.url, raw)
        if url is None:
            continue
        try:
            kind, _ = classify_link(url)
        except MalformedUrl:
            continue
        if kind in (LinkKind.IMAGE, LinkKind.STREAM):
            link = make_data_link(url, Provenance.HTML_EMBED, page.url, page.fetched_at)
            if link is not None:
                result.add_data(link)
        elif kind == LinkKind.PAGE and tag == "a":
            result.add_page(url)
    return result


def is_xhr_payload(request_url: str, content_type: str) -> bool:
    """True when a captured XHR looks like a JSON/GeoJSON/XML data file."""
    return _payload_format(request_url, content_type) is not None


def _payload_format(request_url: str, content_type: str) -> str | None:
    ct = (content_type or "").split(";")[0].strip().lower()
    if ct in JSON_CONTENT_TYPES:
        return "json"
    if ct in XML_CONTENT_TYPES:
        return "xml"
    path = urlsplit(request_url).path.lower()
    if path.endswith((".json", ".geojson")):
        return "json"
    if path.endswith(".xml"):
        return "xml"
    return None


def _iter_json_strings(obj):
    if isinstance(obj, str):
        yield obj
    elif isinstance(obj, dict):
        for value in obj.values():
            yield from _iter_json_strings(value)
    elif isinstance(obj, list):
        for item in obj:
            yield from _iter_json_strings(item)


def _iter_xml_strings(root):
    for element in root.iter():
        if element.text:
            yield element.text
        if element.tail:
            yield element.tail
        for value in element.attrib.values():
            yield value


def _candidate_url(s: str, source_page: str) -> str | None:
    """Interpret a payload string as a URL, absolute or relative to the page.

    Strings shorter than 4 characters, without a "/", or containing
    whitespace are never treated as relative paths (noise suppression).
    """
    s = s.strip()
    if not s or any(c.isspace() for c in s):
        return None
    try:
        parts = urlsplit(s)
    except ValueError:
        return None
    if parts.scheme:
        return s if parts.scheme.lower() in ("http", "https", "rtmp", "rtsp") else None
    if len(s) < 4 or "/" not in s:
        return None
    try:
        return urljoin(source_page, s)
    except ValueError:
        return None


def extract_xhr_links(
    request_url: str,
    content_type: str,
    body: bytes,
    source_page: str,
    discovered_at: float = 0.0,
) -> ExtractionResult:
    """Recursively mine a JSON/GeoJSON/XML payload for URL-shaped strings.

    Every object value, array element, XML text node, and attribute value is
    visited; strings that classify as image or stream data become DataLinks
    with XHR provenance, and page-classified strings feed the frontier.
    Unparseable payloads are logged and yield an empty result — a bad file
    never aborts a crawl.
    """
    result = ExtractionResult()
    fmt = _payload_format(request_url, content_type)
    if fmt is None:
        return result

    text = body.decode("utf-8", errors="replace") if isinstance(body, bytes) else body
    if fmt == "json":
        try:
            payload = json.loads(text)
        except (json.JSONDecodeError, ValueError):
            log.warning("unparseable JSON payload from %s", request_url)
            return result
        strings = _iter_json_strings(payload)
    else:
        try:
            root = ET.fromstring(text)
        except ET.ParseError:
            log.warning("unparseable XML payload from %s", request_url)
            return result
        strings = _iter_xml_strings(root)

    for s in strings:
        url = _candidate_url(s, source_page)
        if url is None:
            continue
        try:
            kind, _ = classify_link(url)
        except MalformedUrl:
            continue
        if kind in (LinkKind.IMAGE, LinkKind.STREAM):
            link = make_data_link(url, Provenance.XHR_PAYLOAD, source_page, discovered_at)
            if link is not None:
                result.add_data(link)
        elif kind == LinkKind.PAGE:
            result.add_page(url)
    return result


def extract_all(page: RenderedPage) -> ExtractionResult:
    """HTML extraction plus every captured XHR payload, merged and deduped."""
    result = extract_html_links(page) if page.ok else ExtractionResult()
    for xhr in page.xhr_responses:
        result.merge(
            extract_xhr_links(
                xhr.request_url, xhr.content_type, xhr.body, page.url, page.fetched_at
            )
        )
    return result
