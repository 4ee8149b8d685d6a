"""Stream liveness probing.

An HLS playlist with no end-of-list marker is an unbounded live stream; one
with the marker is finite video-on-demand. The probe fetches the playlist,
follows one level of master -> media indirection, and reads the live signal
plus a start-time signal (program-date-time when present, else a nonzero
media sequence). MJPEG endpoints are probed by opening the multipart stream
and confirming it actually delivers successive parts. RTMP/RTSP links are
recorded as unprobed: no wire-protocol handshake is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterator
from urllib.parse import urljoin

from .fetch import FetchError, Fetcher
from .identify import ClassificationResult, Method, MethodConfig, luminance_score
from .links import DataLink, LinkKind, StreamKind
from .sample import FrameSet


class StreamUnreachable(FetchError):
    pass


class PlaylistMalformed(ValueError):
    pass


class UnprobedStream(RuntimeError):
    """The stream's protocol is recorded but not probed (RTMP/RTSP)."""


@dataclass
class HlsPlaylist:
    is_master: bool = False
    variant_uris: list[str] = field(default_factory=list)
    segment_uris: list[str] = field(default_factory=list)
    segment_durations: list[float] = field(default_factory=list)
    media_sequence: int = 0
    has_endlist: bool = False
    program_date_time: datetime | None = None

    @property
    def is_live(self) -> bool:
        return not self.has_endlist

    @property
    def total_duration(self) -> float | None:
        """Sum of segment durations for a finite playlist; None while live."""
        if self.is_live:
            return None
        return sum(self.segment_durations)


def parse_m3u8(text: str) -> HlsPlaylist:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != "#EXTM3U":
        raise PlaylistMalformed("missing #EXTM3U header")

    playlist = HlsPlaylist()
    expect_variant = False
    pending_duration: float | None = None
    for line in lines[1:]:
        if line.startswith("#EXT-X-STREAM-INF"):
            playlist.is_master = True
            expect_variant = True
        elif line.startswith("#EXT-X-ENDLIST"):
            playlist.has_endlist = True
        elif line.startswith("#EXT-X-MEDIA-SEQUENCE:"):
            try:
                playlist.media_sequence = int(line.split(":", 1)[1])
            except ValueError as exc:
                raise PlaylistMalformed(f"bad media sequence line: {line}") from exc
        elif line.startswith("#EXT-X-PROGRAM-DATE-TIME:"):
            if playlist.program_date_time is None:
                playlist.program_date_time = _parse_date_time(line.split(":", 1)[1])
        elif line.startswith("#EXTINF:"):
            try:
                pending_duration = float(line.split(":", 1)[1].split(",", 1)[0])
            except ValueError:
                pending_duration = None
        elif not line.startswith("#"):
            if expect_variant:
                playlist.variant_uris.append(line)
                expect_variant = False
            else:
                playlist.segment_uris.append(line)
                if pending_duration is not None:
                    playlist.segment_durations.append(pending_duration)
                    pending_duration = None
    return playlist


def _parse_date_time(value: str) -> datetime | None:
    value = value.strip()
    for candidate in (value, value.replace("Z", "+00:00")):
        try:
            return datetime.fromisoformat(candidate)
        except ValueError:
            continue
    return None


@dataclass
class StreamProbe:
    """What could be learned about a stream link before classification."""

    link: DataLink
    probed: bool
    start_time: float | None = None
    duration: float | None = None
    playlist_is_live: bool | None = None  # HLS only
    multipart_parts: int | None = None  # MJPG only

    @property
    def looks_live(self) -> bool:
        if self.playlist_is_live is not None:
            return bool(
                self.playlist_is_live and self.start_time is not None and self.start_time > 0
            )
        if self.multipart_parts is not None:
            return self.multipart_parts >= 2
        return False


def probe_stream(link: DataLink, fetcher: Fetcher, timeout: float = 30.0) -> StreamProbe:
    """Probe an HLS or MJPG stream link; RTMP/RTSP come back unprobed."""
    if link.kind != LinkKind.STREAM or link.stream_kind is None:
        raise ValueError("probe_stream expects a stream link")
    if link.stream_kind == StreamKind.HLS:
        return _probe_hls(link, fetcher, timeout)
    if link.stream_kind == StreamKind.MJPG:
        return _probe_mjpg(link, fetcher, timeout)
    return StreamProbe(link=link, probed=False)


def _fetch_playlist(url: str, fetcher: Fetcher, timeout: float) -> HlsPlaylist:
    try:
        resp = fetcher.get(url, timeout=timeout)
    except FetchError as exc:
        raise StreamUnreachable(f"cannot fetch playlist {url}: {exc}") from exc
    if not resp.ok:
        raise StreamUnreachable(f"playlist {url} returned {resp.status}")
    return parse_m3u8(resp.body.decode("utf-8", errors="replace"))


def _probe_hls(link: DataLink, fetcher: Fetcher, timeout: float) -> StreamProbe:
    playlist = _fetch_playlist(link.raw_url, fetcher, timeout)
    if playlist.is_master:
        if not playlist.variant_uris:
            raise PlaylistMalformed("master playlist lists no variants")
        media_url = urljoin(link.raw_url, playlist.variant_uris[0])
        playlist = _fetch_playlist(media_url, fetcher, timeout)

    if playlist.program_date_time is not None:
        start: float | None = playlist.program_date_time.timestamp()
    elif playlist.media_sequence > 0:
        start = float(playlist.media_sequence)
    else:
        start = None
    return StreamProbe(
        link=link,
        probed=True,
        start_time=start,
        duration=playlist.total_duration,
        playlist_is_live=playlist.is_live,
    )


def _probe_mjpg(
    link: DataLink, fetcher: Fetcher, timeout: float, max_bytes: int = 1 << 20
) -> StreamProbe:
    try:
        content_type, chunks = fetcher.open_stream(link.raw_url, timeout=timeout)
    except FetchError as exc:
        raise StreamUnreachable(f"cannot open stream {link.raw_url}: {exc}") from exc
    boundary = _multipart_boundary(content_type)
    if boundary is None:
        return StreamProbe(link=link, probed=True, multipart_parts=0)
    parts = _count_multipart_parts(chunks, boundary, want=2, max_bytes=max_bytes)
    return StreamProbe(link=link, probed=True, multipart_parts=parts)


def _multipart_boundary(content_type: str) -> bytes | None:
    ct = (content_type or "").lower()
    if "multipart" not in ct or "replace" not in ct:
        return None
    for param in content_type.split(";")[1:]:
        name, _, value = param.strip().partition("=")
        if name.lower() == "boundary":
            return value.strip().strip('"').lstrip("-").encode()
    return None


def _count_multipart_parts(
    chunks: Iterator[bytes], boundary: bytes, want: int, max_bytes: int
) -> int:
    """Count body parts delimited by the boundary, reading only as much of the
    (unbounded) stream as needed."""
    marker = b"--" + boundary
    buffer = b""
    consumed = 0
    parts = 0
    saw_first = False
    for chunk in chunks:
        buffer += chunk
        consumed += len(chunk)
        while True:
            idx = buffer.find(marker)
            if idx == -1:
                break
            if saw_first and buffer[:idx].strip(b"\r\n-"):
                parts += 1
                if parts >= want:
                    return parts
            saw_first = True
            buffer = buffer[idx + len(marker) :]
        if consumed > max_bytes:
            return parts
    # a trailing body with no closing delimiter still counts once the stream ends
    if saw_first and buffer.strip(b"\r\n-"):
        parts += 1
    return parts


def classify_stream(
    probe: StreamProbe,
    fs: FrameSet | None = None,
    cfg: MethodConfig | None = None,
) -> ClassificationResult:
    """Camera iff the liveness/start-time check passes; when frames extracted
    from the stream are supplied, the luminance rule must pass as well."""
    cfg = cfg or MethodConfig()
    if not probe.probed:
        raise UnprobedStream(
            f"{probe.link.stream_kind.value if probe.link.stream_kind else '?'} stream not probed"
        )
    live = probe.looks_live
    score = 1.0 if live else 0.0
    is_camera = live
    frames_used: list[float] = []
    if live and fs is not None:
        score = luminance_score(fs, cfg.fallback_to_latest)
        is_camera = score > cfg.luminance_threshold
        frames_used = [off for off, f in zip(fs.offsets, fs.frames) if f is not None]
    return ClassificationResult(
        link=probe.link,
        method=Method.STREAM,
        score=score,
        is_camera=is_camera,
        frames_used=frames_used,
    )
