"""Shared test helpers: synthetic images, links, and framesets."""

from __future__ import annotations

import io

import numpy as np
import pytest
from PIL import Image

from camscout.links import DataLink, LinkKind, Provenance, StreamKind
from camscout.sample import Frame, FrameSet

DEFAULT_OFFSETS = (0.0, 300.0, 3600.0, 43200.0)


def gray_png(pixels, size=(8, 8)) -> bytes:
    """Encode a uint8 array (or a constant fill value) as PNG bytes."""
    if np.isscalar(pixels):
        pixels = np.full(size, pixels, dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(np.asarray(pixels, dtype=np.uint8), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def rgb_png(color, size=(1, 1)) -> bytes:
    buf = io.BytesIO()
    Image.new("RGB", size, color).save(buf, format="PNG")
    return buf.getvalue()


def array_with_mean(n: int, mean: float, base: int = 100) -> np.ndarray:
    """Integer pixel buffer of n values whose float64 mean is exactly `mean`.

    Builds base-valued pixels and bumps just enough of them by integer steps;
    only means expressible as base + k/n for integer k are representable.
    """
    total = round(mean * n)
    bump = total - base * n
    if bump < 0:
        raise ValueError("mean below base")
    arr = np.full(n, base, dtype=np.int64)
    full, rem = divmod(bump, n)
    arr += full
    arr[:rem] += 1
    assert arr.sum() == total
    return arr.astype(np.uint8)


def image_link(url: str = "http://site.test/cam.jpg", **kwargs) -> DataLink:
    defaults = dict(
        raw_url=url,
        kind=LinkKind.IMAGE,
        stream_kind=None,
        provenance=Provenance.HTML_EMBED,
        source_page="http://site.test/",
        seed_domain="site.test",
        discovered_at=0.0,
    )
    defaults.update(kwargs)
    return DataLink(**defaults)


def stream_link(url: str, stream_kind: StreamKind, **kwargs) -> DataLink:
    defaults = dict(
        raw_url=url,
        kind=LinkKind.STREAM,
        stream_kind=stream_kind,
        provenance=Provenance.XHR_PAYLOAD,
        source_page="http://site.test/",
        seed_domain="site.test",
        discovered_at=0.0,
    )
    defaults.update(kwargs)
    return DataLink(**defaults)


def frameset_from_bytes(
    payloads, link: DataLink | None = None, offsets=DEFAULT_OFFSETS, t0: float = 0.0
) -> FrameSet:
    """Build a FrameSet from raw payloads; None entries become missing frames."""
    frames = [
        None if data is None else Frame.from_bytes(data, t0 + off)
        for off, data in zip(offsets, payloads)
    ]
    return FrameSet(link=link or image_link(), t0=t0, offsets=tuple(offsets), frames=frames)


def frameset_from_means(means, link: DataLink | None = None, size=(8, 8)) -> FrameSet:
    """FrameSet of uniform images with the given integer mean values."""
    return frameset_from_bytes([gray_png(int(m), size) for m in means], link=link)


def frameset_from_pixels(pixel_arrays, link: DataLink | None = None) -> FrameSet:
    return frameset_from_bytes([gray_png(a) for a in pixel_arrays], link=link)


@pytest.fixture
def tmp_store(tmp_path):
    from camscout.store import Store

    return Store(tmp_path / "data")


def pytest_runtest_logreport(report):
    """One PASS/FAIL line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::", 1)[-1]
        print(f"\n[{status}] {name}", flush=True)
