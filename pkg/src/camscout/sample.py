"""Download frames from candidate links on a fixed offset schedule.

Each image link gets one GET per schedule offset (default t0, +5 min, +60 min,
+12 h); the responses become a FrameSet whose frames carry a byte digest and a
decoded grayscale buffer. The clock is injectable, so a virtual clock runs the
whole 12-hour schedule instantly in tests.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

from .clock import Clock, SystemClock
from .fetch import FetchError, Fetcher
from .links import DataLink, LinkKind
from .politeness import DomainGate

DEFAULT_OFFSETS = (0.0, 300.0, 3600.0, 43200.0)

# Rec. 601 luma weights; fixed so luminance thresholds are portable.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class DecodeError(ValueError):
    """Payload bytes are not a decodable JPEG/PNG image."""


class AllSamplesFailed(RuntimeError):
    """Every scheduled fetch for a link failed; the link is dead, not classified."""


@dataclass(frozen=True)
class SampleSchedule:
    offsets: tuple[float, ...] = DEFAULT_OFFSETS

    def __post_init__(self):
        if not self.offsets or self.offsets[0] != 0:
            raise ValueError("schedule must start at offset 0")
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise ValueError("offsets must be strictly increasing")


def checksum(data: bytes) -> str:
    """128-bit digest of the raw payload; an equality fingerprint, not security."""
    return hashlib.md5(data).hexdigest()


def decode_grayscale(data: bytes) -> np.ndarray:
    """Decode JPEG/PNG bytes to a single-channel luminance buffer.

    Luminance is 0.299 R + 0.587 G + 0.114 B rounded to nearest integer,
    row-major uint8.
    """
    try:
        with Image.open(io.BytesIO(data)) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    luma = np.rint(rgb @ _LUMA_WEIGHTS)
    return np.clip(luma, 0, 255).astype(np.uint8)


@dataclass
class Frame:
    captured_at: float
    data: bytes
    checksum: str = ""
    pixels: np.ndarray | None = None
    decode_ok: bool = False

    @classmethod
    def from_bytes(cls, data: bytes, captured_at: float) -> "Frame":
        frame = cls(captured_at=captured_at, data=data, checksum=checksum(data))
        try:
            frame.pixels = decode_grayscale(data)
            frame.decode_ok = True
        except DecodeError:
            frame.pixels = None
            frame.decode_ok = False
        return frame


@dataclass
class FrameSet:
    """Frames for one link, aligned to schedule offsets; None marks a failed fetch."""

    link: DataLink
    t0: float
    offsets: tuple[float, ...]
    frames: list[Frame | None] = field(default_factory=list)

    def __post_init__(self):
        if self.frames and len(self.frames) != len(self.offsets):
            raise ValueError("frames must align with schedule offsets")

    def present(self) -> list[tuple[float, Frame]]:
        return [(off, f) for off, f in zip(self.offsets, self.frames) if f is not None]

    def pixel_change_counts(self) -> list[int | None]:
        """Per-frame count of pixels differing from the first frame.

        None for the first frame, for missing/undecoded frames, and when the
        dimensions do not match the first frame's.
        """
        counts: list[int | None] = [None] * len(self.frames)
        base = self.frames[0] if self.frames else None
        if base is None or not base.decode_ok:
            return counts
        for i, frame in enumerate(self.frames[1:], start=1):
            if frame is None or not frame.decode_ok:
                continue
            if frame.pixels.shape != base.pixels.shape:
                continue
            counts[i] = int(np.count_nonzero(frame.pixels != base.pixels))
        return counts


def sample_link(
    link: DataLink,
    schedule: SampleSchedule | None = None,
    clock: Clock | None = None,
    fetcher: Fetcher | None = None,
    gate: DomainGate | None = None,
    timeout: float = 30.0,
) -> FrameSet:
    """Fetch one frame per schedule offset and assemble the FrameSet.

    Each offset gets one retry on transient failure; a frame that still fails
    is recorded as missing without aborting the set. Raises AllSamplesFailed
    when no offset produced a frame.
    """
    if link.kind != LinkKind.IMAGE:
        raise ValueError(f"sample_link expects an image link, got {link.kind.value}")
    schedule = schedule or SampleSchedule()
    clock = clock or SystemClock()
    if fetcher is None:
        from .fetch import StaticFetcher

        fetcher = StaticFetcher(clock=clock)

    t0 = clock.now()
    frames: list[Frame | None] = []
    for offset in schedule.offsets:
        wait = t0 + offset - clock.now()
        if wait > 0:
            clock.sleep(wait)
        data = _fetch_with_retry(fetcher, link, gate, timeout)
        frames.append(Frame.from_bytes(data, clock.now()) if data is not None else None)

    if all(f is None for f in frames):
        raise AllSamplesFailed(f"no frame could be fetched from {link.raw_url}")
    return FrameSet(link=link, t0=t0, offsets=schedule.offsets, frames=frames)


def _fetch_with_retry(
    fetcher: Fetcher, link: DataLink, gate: DomainGate | None, timeout: float
) -> bytes | None:
    for _ in range(2):
        try:
            if gate is not None:
                with gate.permit(link.seed_domain):
                    resp = fetcher.get(link.raw_url, timeout=timeout)
            else:
                resp = fetcher.get(link.raw_url, timeout=timeout)
            if resp.ok and resp.body:
                return resp.body
        except FetchError:
            pass
    return None
