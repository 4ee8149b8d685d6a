"""Decide whether a sampled link is a live network camera.

Three frame-comparison methods over a FrameSet:

* checksum — any later frame's byte digest differs from the first frame's.
* percent  — fraction of pixel positions that changed, averaged across the
  later frames relative to the first; camera when above a threshold
  (default 0.11).
* luminance — absolute difference of mean pixel value between the first and
  last frames; camera when above a threshold (default 1.3). Outdoor cameras
  swing strongly over a 12-hour day/night window, which is what the default
  schedule and threshold are tuned to.

`cascade` runs checksum as a cheap prefilter and only scores luminance on
sets whose bytes actually changed.

CameraClassifier wraps the methods in an estimator interface (fit selects an
operating threshold from labeled data, predict applies it) so the classifier
composes with the usual tooling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .links import DataLink
from .sample import FrameSet

DEFAULT_PERCENT_THRESHOLD = 0.11
DEFAULT_LUMINANCE_THRESHOLD = 1.3


class DimensionMismatch(ValueError):
    pass


class EmptyImage(ValueError):
    pass


class InsufficientFrames(ValueError):
    """The FrameSet lacks the frames a method needs; the link is unclassifiable."""


class Method(str, Enum):
    CHECKSUM = "checksum"
    PERCENT = "percent"
    LUMINANCE = "luminance"
    CASCADE = "cascade"
    STREAM = "stream"


@dataclass(frozen=True)
class MethodConfig:
    method: Method = Method.LUMINANCE
    percent_threshold: float = DEFAULT_PERCENT_THRESHOLD
    luminance_threshold: float = DEFAULT_LUMINANCE_THRESHOLD
    fallback_to_latest: bool = True

    def __post_init__(self):
        if self.percent_threshold < 0 or self.percent_threshold > 1:
            raise ValueError("percent_threshold must be in [0, 1]")
        if self.luminance_threshold < 0:
            raise ValueError("luminance_threshold must be non-negative")


@dataclass
class ClassificationResult:
    link: DataLink | None
    method: Method
    score: float
    is_camera: bool
    frames_used: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "link": self.link.to_dict() if self.link else None,
            "method": self.method.value,
            "score": self.score,
            "is_camera": self.is_camera,
            "frames_used": list(self.frames_used),
        }


def percent_diff(img1: np.ndarray, img2: np.ndarray) -> float:
    """Fraction of pixel positions whose values differ between two buffers."""
    a = np.asarray(img1)
    b = np.asarray(img2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise EmptyImage("cannot compare empty buffers")
    return float(np.count_nonzero(a != b)) / a.size


def luminance_diff(img1: np.ndarray, img2: np.ndarray) -> float:
    """Absolute difference of the two buffers' mean pixel values.

    Means are size-independent, so the buffers may have different dimensions.
    """
    a = np.asarray(img1, dtype=np.float64)
    b = np.asarray(img2, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptyImage("cannot take the mean of an empty buffer")
    return float(abs(a.mean() - b.mean()))


def checksum_changed(fs: FrameSet) -> bool:
    """True iff any later present frame's digest differs from the first frame's."""
    if not fs.frames or fs.frames[0] is None:
        raise InsufficientFrames("first frame is missing")
    later = [f for f in fs.frames[1:] if f is not None]
    if not later:
        raise InsufficientFrames("need at least one later frame")
    first = fs.frames[0].checksum
    return any(f.checksum != first for f in later)


def percent_score(fs: FrameSet) -> float:
    """Mean percent_diff of each later frame against the first.

    A later frame whose dimensions differ from the first counts as fully
    changed (1.0): a resolution switch is itself a content change, and
    treating it as such avoids silently dropping real cameras.
    """
    base = fs.frames[0] if fs.frames else None
    if base is None or not base.decode_ok:
        raise InsufficientFrames("first frame missing or undecodable")
    diffs = []
    for frame in fs.frames[1:]:
        if frame is None or not frame.decode_ok:
            continue
        if frame.pixels.shape != base.pixels.shape:
            diffs.append(1.0)
        else:
            diffs.append(percent_diff(base.pixels, frame.pixels))
    if not diffs:
        raise InsufficientFrames("no later decoded frame to compare")
    return float(sum(diffs) / len(diffs))


def luminance_score(fs: FrameSet, fallback_to_latest: bool = True) -> float:
    """Mean-luminance difference between the first frame and the last-offset frame.

    When the last frame is missing and fallback is enabled, the latest
    available decoded frame stands in.
    """
    base = fs.frames[0] if fs.frames else None
    if base is None or not base.decode_ok:
        raise InsufficientFrames("first frame missing or undecodable")
    last = fs.frames[-1] if fs.frames else None
    if last is None or not last.decode_ok:
        if not fallback_to_latest:
            raise InsufficientFrames("last frame missing or undecodable")
        last = next(
            (f for f in reversed(fs.frames[1:]) if f is not None and f.decode_ok), None
        )
        if last is None:
            raise InsufficientFrames("no later decoded frame available")
    return luminance_diff(base.pixels, last.pixels)


def classify(fs: FrameSet, cfg: MethodConfig | None = None) -> ClassificationResult:
    """Apply the configured method and produce a verdict for one FrameSet."""
    cfg = cfg or MethodConfig()
    present_offsets = [off for off, _ in fs.present()]

    if cfg.method == Method.CHECKSUM:
        changed = checksum_changed(fs)
        return ClassificationResult(
            link=fs.link,
            method=cfg.method,
            score=1.0 if changed else 0.0,
            is_camera=changed,
            frames_used=present_offsets,
        )

    if cfg.method == Method.PERCENT:
        score = percent_score(fs)
        return ClassificationResult(
            link=fs.link,
            method=cfg.method,
            score=score,
            is_camera=score > cfg.percent_threshold,
            frames_used=present_offsets,
        )

    if cfg.method == Method.LUMINANCE:
        score = luminance_score(fs, cfg.fallback_to_latest)
        return ClassificationResult(
            link=fs.link,
            method=cfg.method,
            score=score,
            is_camera=score > cfg.luminance_threshold,
            frames_used=_luminance_offsets(fs),
        )

    if cfg.method == Method.CASCADE:
        if not checksum_changed(fs):
            return ClassificationResult(
                link=fs.link,
                method=cfg.method,
                score=0.0,
                is_camera=False,
                frames_used=present_offsets,
            )
        score = luminance_score(fs, cfg.fallback_to_latest)
        return ClassificationResult(
            link=fs.link,
            method=cfg.method,
            score=score,
            is_camera=score > cfg.luminance_threshold,
            frames_used=_luminance_offsets(fs),
        )

    raise ValueError(f"unsupported method: {cfg.method}")


def _luminance_offsets(fs: FrameSet) -> list[float]:
    used = [fs.offsets[0]]
    for off, frame in reversed(list(zip(fs.offsets[1:], fs.frames[1:]))):
        if frame is not None and frame.decode_ok:
            used.append(off)
            break
    return used


def score_frameset(fs: FrameSet, method: Method, fallback_to_latest: bool = True) -> float:
    """Raw method score for one FrameSet (checksum scores are 0/1)."""
    if method == Method.CHECKSUM:
        return 1.0 if checksum_changed(fs) else 0.0
    if method == Method.PERCENT:
        return percent_score(fs)
    if method in (Method.LUMINANCE, Method.CASCADE):
        if method == Method.CASCADE and not checksum_changed(fs):
            return 0.0
        return luminance_score(fs, fallback_to_latest)
    raise ValueError(f"unsupported method: {method}")


def _default_threshold(method: Method, cfg: MethodConfig) -> float:
    if method == Method.PERCENT:
        return cfg.percent_threshold
    if method in (Method.LUMINANCE, Method.CASCADE):
        return cfg.luminance_threshold
    return 0.5  # checksum scores are exactly 0 or 1


class CameraClassifier:
    """Estimator-style wrapper: thresholded frame-change classification.

    Parameters mirror MethodConfig. Without fit(), predict() applies the
    shipped default threshold for the method; fit(framesets, labels) sweeps
    the observed scores and selects the operating threshold that maximizes
    min(precision, recall), exposing it as ``threshold_``.
    """

    def __init__(
        self,
        method: str | Method = Method.LUMINANCE,
        percent_threshold: float = DEFAULT_PERCENT_THRESHOLD,
        luminance_threshold: float = DEFAULT_LUMINANCE_THRESHOLD,
        fallback_to_latest: bool = True,
    ):
        self.method = method
        self.percent_threshold = percent_threshold
        self.luminance_threshold = luminance_threshold
        self.fallback_to_latest = fallback_to_latest

    # -- sklearn-style parameter protocol ----------------------------------

    def get_params(self, deep: bool = True) -> dict:
        return {
            "method": self.method,
            "percent_threshold": self.percent_threshold,
            "luminance_threshold": self.luminance_threshold,
            "fallback_to_latest": self.fallback_to_latest,
        }

    def set_params(self, **params) -> "CameraClassifier":
        for name, value in params.items():
            if name not in self.get_params():
                raise ValueError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def _config(self) -> MethodConfig:
        return MethodConfig(
            method=Method(self.method),
            percent_threshold=self.percent_threshold,
            luminance_threshold=self.luminance_threshold,
            fallback_to_latest=self.fallback_to_latest,
        )

    def score_samples(self, framesets: list[FrameSet]) -> np.ndarray:
        cfg = self._config()
        return np.array(
            [score_frameset(fs, cfg.method, cfg.fallback_to_latest) for fs in framesets]
        )

    def fit(self, framesets: list[FrameSet], labels) -> "CameraClassifier":
        """Select the operating threshold from labeled framesets."""
        from .evaluate import default_grid, select_threshold, threshold_sweep

        labels = np.asarray(labels, dtype=bool)
        if len(framesets) == 0 or len(labels) != len(framesets):
            raise ValueError("framesets and labels must be nonempty and aligned")
        scores = self.score_samples(framesets)
        if Method(self.method) == Method.CHECKSUM:
            self.threshold_ = 0.5
            self.pr_curve_ = []
            return self
        curve = threshold_sweep(scores.tolist(), labels.tolist(), default_grid(scores.tolist()))
        self.threshold_ = select_threshold(curve)
        self.pr_curve_ = curve
        return self

    def predict(self, framesets: list[FrameSet]) -> np.ndarray:
        cfg = self._config()
        threshold = getattr(self, "threshold_", None)
        if threshold is None:
            threshold = _default_threshold(cfg.method, cfg)
        return self.score_samples(framesets) > threshold
