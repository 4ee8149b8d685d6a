"""URL and link types: classification into page/image/stream, canonical dedup keys,
and the domain-scope rule that keeps a crawl inside its seed site.

Everything here is pure and safe to call from any number of workers.
"""

from __future__ import annotations

import ipaddress
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from urllib.parse import urlsplit, urlunsplit


class MalformedUrl(ValueError):
    """Raised when a string cannot be interpreted as an absolute URL."""


class LinkKind(str, Enum):
    IMAGE = "image"
    STREAM = "stream"
    PAGE = "page"
    OTHER = "other"


class StreamKind(str, Enum):
    HLS = "hls"
    MJPG = "mjpg"
    RTMP = "rtmp"
    RTSP = "rtsp"


class Provenance(str, Enum):
    HTML_EMBED = "html_embed"
    XHR_PAYLOAD = "xhr_payload"


IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png")
HLS_EXTENSIONS = (".m3u", ".m3u8")
MJPG_EXTENSIONS = (".mjpg", ".mjpeg")
PAGE_EXTENSIONS = (".html", ".htm", ".php", ".asp", ".aspx")

_DEFAULT_PORTS = {"http": 80, "https": 443, "rtsp": 554, "rtmp": 1935}
_PCT_ENCODED = re.compile(r"%[0-9a-fA-F]{2}")


def _split(url: str):
    try:
        parts = urlsplit(url)
    except ValueError as exc:
        raise MalformedUrl(f"cannot parse URL: {url!r}") from exc
    if not parts.scheme:
        raise MalformedUrl(f"URL has no scheme: {url!r}")
    return parts


def classify_link(
    url: str, mjpg_path_heuristic: bool = True
) -> tuple[LinkKind, StreamKind | None]:
    """Map any absolute URL to exactly one link kind.

    Images are .jpg/.jpeg/.png paths; streams are .m3u/.m3u8 (HLS),
    .mjpg/.mjpeg (MJPG) and rtmp:// / rtsp:// schemes; remaining http(s)
    URLs are pages; every other scheme (mailto:, javascript:, data:, ...)
    is Other. Extensions are matched on the path with the query stripped,
    case-insensitively.

    ``mjpg_path_heuristic`` additionally treats an extensionless last path
    segment containing "mjpg" as an MJPG stream, since many MJPG cameras
    expose endpoints like /mjpg or /cgi-bin/mjpg.
    """
    parts = _split(url)
    scheme = parts.scheme.lower()
    if scheme == "rtmp":
        return LinkKind.STREAM, StreamKind.RTMP
    if scheme == "rtsp":
        return LinkKind.STREAM, StreamKind.RTSP
    if scheme not in ("http", "https"):
        return LinkKind.OTHER, None
    if not parts.hostname:
        raise MalformedUrl(f"http(s) URL has no host: {url!r}")

    path = parts.path.lower()
    if path.endswith(IMAGE_EXTENSIONS):
        return LinkKind.IMAGE, None
    if path.endswith(HLS_EXTENSIONS):
        return LinkKind.STREAM, StreamKind.HLS
    if path.endswith(MJPG_EXTENSIONS):
        return LinkKind.STREAM, StreamKind.MJPG
    if mjpg_path_heuristic:
        last = path.rsplit("/", 1)[-1]
        if "mjpg" in last and "." not in last:
            return LinkKind.STREAM, StreamKind.MJPG
    return LinkKind.PAGE, None


def canonicalize(url: str, kind: LinkKind) -> str:
    """Deterministic dedup key for a URL.

    Lowercases scheme and host, drops the fragment and default ports, and
    uppercases percent-encoded escapes. For images the entire query string
    is stripped as well: camera sites commonly append a throwaway timestamp
    query, and stripping it collapses those duplicates into one key. The
    stripped key is only ever used for dedup; fetches always use the URL as
    observed.
    """
    parts = _split(url)
    scheme = parts.scheme.lower()

    host = parts.hostname or ""
    try:
        port = parts.port
    except ValueError as exc:
        raise MalformedUrl(f"bad port in URL: {url!r}") from exc
    if ":" in host:  # IPv6 literal
        host = f"[{host}]"
    netloc = host
    if "@" in parts.netloc:
        userinfo = parts.netloc.rsplit("@", 1)[0]
        netloc = f"{userinfo}@{host}"
    if port is not None and port != _DEFAULT_PORTS.get(scheme):
        netloc = f"{netloc}:{port}"

    upper = lambda m: m.group(0).upper()
    path = _PCT_ENCODED.sub(upper, parts.path)
    query = "" if kind == LinkKind.IMAGE else _PCT_ENCODED.sub(upper, parts.query)
    return urlunsplit((scheme, netloc, path, query, ""))


def load_suffixes(path: str | Path | None = None) -> frozenset[str]:
    """Load a public-suffix table: one suffix per line, "#" comments."""
    if path is None:
        text = resources.files("camscout.data").joinpath("public_suffixes.txt").read_text()
    else:
        text = Path(path).read_text()
    suffixes = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            suffixes.add(line.lstrip("."))
    return frozenset(suffixes)


_DEFAULT_SUFFIXES: frozenset[str] | None = None


def _default_suffixes() -> frozenset[str]:
    global _DEFAULT_SUFFIXES
    if _DEFAULT_SUFFIXES is None:
        _DEFAULT_SUFFIXES = load_suffixes()
    return _DEFAULT_SUFFIXES


def _is_ip(host: str) -> bool:
    try:
        ipaddress.ip_address(host.strip("[]"))
        return True
    except ValueError:
        return False


def registrable_domain(host: str, suffixes: frozenset[str] | None = None) -> str:
    """Reduce a hostname to its registrable domain ("www.a.example.com" -> "example.com").

    The leftmost labels are stripped down to the longest matching entry in the
    suffix table plus one label. IP literals and unknown single-label hosts are
    returned unchanged; with no table match the last two labels are kept.
    """
    host = host.lower().rstrip(".")
    if not host or _is_ip(host):
        return host
    if suffixes is None:
        suffixes = _default_suffixes()
    labels = host.split(".")
    if len(labels) == 1:
        return host
    for i in range(len(labels)):
        suffix = ".".join(labels[i:])
        if suffix in suffixes:
            if i == 0:  # the host itself is a bare suffix
                return host
            return ".".join(labels[i - 1 :])
    return ".".join(labels[-2:])


def same_domain(url: str, seed_domain: str) -> bool:
    """True iff the URL's host is the seed domain or one of its subdomains.

    Matches whole host labels only, so "example.com.evil.org" is out of
    scope for "example.com".
    """
    parts = _split(url)
    host = (parts.hostname or "").lower().rstrip(".")
    if not host:
        raise MalformedUrl(f"URL has no host: {url!r}")
    seed = seed_domain.lower().rstrip(".")
    return host == seed or host.endswith("." + seed)


@dataclass
class DataLink:
    """A discovered candidate URL: what it points at and where it was found."""

    raw_url: str
    kind: LinkKind
    stream_kind: StreamKind | None
    provenance: Provenance
    source_page: str
    seed_domain: str
    discovered_at: float
    depth: int = 0
    canonical_key: str = field(default="")

    def __post_init__(self):
        if (self.kind == LinkKind.STREAM) != (self.stream_kind is not None):
            raise ValueError("stream_kind must be set exactly when kind is stream")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if not self.canonical_key:
            self.canonical_key = canonicalize(self.raw_url, self.kind)

    def to_dict(self) -> dict:
        return {
            "raw_url": self.raw_url,
            "canonical_key": self.canonical_key,
            "kind": self.kind.value,
            "stream_kind": self.stream_kind.value if self.stream_kind else None,
            "provenance": self.provenance.value,
            "source_page": self.source_page,
            "seed_domain": self.seed_domain,
            "discovered_at": self.discovered_at,
            "depth": self.depth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DataLink":
        return cls(
            raw_url=d["raw_url"],
            kind=LinkKind(d["kind"]),
            stream_kind=StreamKind(d["stream_kind"]) if d.get("stream_kind") else None,
            provenance=Provenance(d["provenance"]),
            source_page=d["source_page"],
            seed_domain=d["seed_domain"],
            discovered_at=d["discovered_at"],
            depth=d.get("depth", 0),
            canonical_key=d.get("canonical_key", ""),
        )


def make_data_link(
    url: str,
    provenance: Provenance,
    source_page: str,
    discovered_at: float,
    depth: int = 0,
    seed_domain: str | None = None,
) -> DataLink | None:
    """Build a DataLink for a URL, or None when it is not image/stream data."""
    kind, stream = classify_link(url)
    if kind not in (LinkKind.IMAGE, LinkKind.STREAM):
        return None
    if seed_domain is None:
        host = urlsplit(source_page).hostname or ""
        seed_domain = registrable_domain(host)
    return DataLink(
        raw_url=url,
        kind=kind,
        stream_kind=stream,
        provenance=provenance,
        source_page=source_page,
        seed_domain=seed_domain,
        discovered_at=discovered_at,
        depth=depth,
    )
