"""Score classifier output against human labels.

Precision here is the share of links flagged as cameras that really are
cameras; recall is the share of real cameras that got flagged. Undefined
rates (zero denominator) are reported as None, never coerced to 0.
Threshold sweeps and the equal-importance operating-point rule live here,
along with a wall-time benchmark harness for the comparison methods.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .identify import Method
from .sample import FrameSet, checksum as digest
from .sample import decode_grayscale

LABEL_CAMERA = "NetworkCamera"
LABEL_OTHER = "OtherWebAsset"

SWEEP_GRID_POINTS = 200


class LabelGuardViolation(ValueError):
    """A never-changing frameset cannot be labeled as a camera."""


@dataclass
class LabeledSample:
    frameset_id: str
    label: str
    labeler: str
    labeled_at: float = 0.0
    pixel_change_count: int | None = None

    def __post_init__(self):
        if self.label not in (LABEL_CAMERA, LABEL_OTHER):
            raise ValueError(f"unknown label {self.label!r}")

    @property
    def is_camera(self) -> bool:
        return self.label == LABEL_CAMERA

    def to_dict(self) -> dict:
        return {
            "frameset_id": self.frameset_id,
            "label": self.label,
            "labeler": self.labeler,
            "labeled_at": self.labeled_at,
            "pixel_change_count": self.pixel_change_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledSample":
        return cls(
            frameset_id=d["frameset_id"],
            label=d["label"],
            labeler=d["labeler"],
            labeled_at=d.get("labeled_at", 0.0),
            pixel_change_count=d.get("pixel_change_count"),
        )


def validate_label(fs: FrameSet, label: str) -> None:
    """Labeling-protocol guard: frames whose bytes never changed cannot carry
    the camera label."""
    if label != LABEL_CAMERA:
        return
    present = [f for _, f in fs.present()]
    if len(present) >= 2 and all(f.checksum == present[0].checksum for f in present):
        raise LabelGuardViolation(
            "frames never changed between samples; cannot label as a camera"
        )


@dataclass
class EvalReport:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    precision: float | None = None
    recall: float | None = None
    accuracy: float | None = None
    pr_curve: list[tuple[float, float | None, float | None]] = field(default_factory=list)
    selected_threshold: float | None = None

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "precision": self.precision,
            "recall": self.recall,
            "accuracy": self.accuracy,
            "pr_curve": [list(p) for p in self.pr_curve],
            "selected_threshold": self.selected_threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        report = cls(
            tp=d["tp"],
            fp=d["fp"],
            fn=d["fn"],
            tn=d["tn"],
            precision=d.get("precision"),
            recall=d.get("recall"),
            accuracy=d.get("accuracy"),
            selected_threshold=d.get("selected_threshold"),
        )
        report.pr_curve = [tuple(p) for p in d.get("pr_curve", [])]
        return report


def compute_metrics(predictions: Sequence[bool], labels: Sequence[bool]) -> EvalReport:
    """Confusion counts plus precision/recall/accuracy for aligned vectors."""
    if len(predictions) != len(labels):
        raise ValueError("predictions and labels must have equal length")
    if not predictions:
        raise ValueError("cannot evaluate empty input")
    report = EvalReport()
    for pred, label in zip(predictions, labels):
        if pred and label:
            report.tp += 1
        elif pred and not label:
            report.fp += 1
        elif not pred and label:
            report.fn += 1
        else:
            report.tn += 1
    flagged = report.tp + report.fp
    actual = report.tp + report.fn
    report.precision = report.tp / flagged if flagged else None
    report.recall = report.tp / actual if actual else None
    report.accuracy = (report.tp + report.tn) / len(predictions)
    return report


def default_grid(scores: Sequence[float]) -> list[float]:
    """Sweep grid: evenly spaced thresholds between the observed extremes,
    plus every exact observed score."""
    if not scores:
        raise ValueError("cannot build a grid from no scores")
    lo, hi = min(scores), max(scores)
    points = set(scores)
    if hi > lo:
        step = (hi - lo) / (SWEEP_GRID_POINTS - 1)
        points.update(lo + i * step for i in range(SWEEP_GRID_POINTS))
    return sorted(points)


def threshold_sweep(
    scores: Sequence[float],
    labels: Sequence[bool],
    grid: Sequence[float] | None = None,
) -> list[tuple[float, float | None, float | None]]:
    """Evaluate (threshold, precision, recall) over a grid; prediction is
    score > threshold. Thresholds come back strictly increasing."""
    if len(scores) != len(labels):
        raise ValueError("scores and labels must have equal length")
    if not scores:
        raise ValueError("cannot sweep empty input")
    if grid is None:
        grid = default_grid(scores)
    if not grid:
        raise ValueError("grid must be nonempty")

    curve = []
    for t in sorted(set(grid)):
        report = compute_metrics([s > t for s in scores], list(labels))
        curve.append((t, report.precision, report.recall))
    return curve


class NoValidPoint(ValueError):
    pass


def select_threshold(pr_curve: Sequence[tuple[float, float | None, float | None]]) -> float:
    """Operating point treating precision and recall as equally important:
    maximize min(P, R); break ties by higher F1, then by lower threshold."""
    if not pr_curve:
        raise ValueError("curve is empty")
    best: tuple[float, float, float] | None = None  # (min_pr, f1, -threshold)
    best_t: float | None = None
    for t, p, r in pr_curve:
        if p is None or r is None:
            continue
        f1 = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
        key = (min(p, r), f1, -t)
        if best is None or key > best:
            best = key
            best_t = t
    if best_t is None:
        raise NoValidPoint("precision undefined at every grid point")
    return best_t


# -- runtime benchmarking ----------------------------------------------------


def _checksum_from_bytes(fs: FrameSet) -> bool:
    frames = [f for f in fs.frames if f is not None]
    digests = [digest(f.data) for f in frames]
    return any(d != digests[0] for d in digests[1:])


def _luminance_from_bytes(fs: FrameSet) -> float:
    first = decode_grayscale(fs.frames[0].data)
    last = decode_grayscale(fs.frames[-1].data)
    return float(abs(first.mean() - last.mean()))


def _percent_from_bytes(fs: FrameSet) -> float:
    base = decode_grayscale(fs.frames[0].data)
    diffs = []
    for frame in fs.frames[1:]:
        pixels = decode_grayscale(frame.data)
        if pixels.shape != base.shape:
            diffs.append(1.0)
        else:
            diffs.append(float(np.count_nonzero(pixels != base)) / base.size)
    return sum(diffs) / len(diffs)


_BENCH_FNS: dict[Method, Callable[[FrameSet], object]] = {
    Method.CHECKSUM: _checksum_from_bytes,
    Method.LUMINANCE: _luminance_from_bytes,
    Method.PERCENT: _percent_from_bytes,
}


@dataclass
class BenchResult:
    method: Method
    mean: float
    stddev: float
    samples: list[float]

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "mean_seconds": self.mean,
            "stddev_seconds": self.stddev,
            "samples": self.samples,
        }


def benchmark_methods(
    framesets: Sequence[FrameSet],
    methods: Sequence[Method] = (Method.CHECKSUM, Method.PERCENT, Method.LUMINANCE),
    repetitions: int = 20,
    timer: Callable[[], float] = time.perf_counter,
) -> dict[Method, BenchResult]:
    """Time each method over the whole frameset list, repetitions times.

    Methods run from the raw stored bytes (hashing for checksum, decode plus
    compare for the pixel methods), single-threaded so timings are
    comparable. Absolute numbers are hardware-bound and only recorded.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    results = {}
    for method in methods:
        fn = _BENCH_FNS[method]
        samples = []
        for _ in range(repetitions):
            start = timer()
            for fs in framesets:
                fn(fs)
            samples.append(timer() - start)
        mean = statistics.fmean(samples)
        stddev = statistics.pstdev(samples) if len(samples) > 1 else 0.0
        results[method] = BenchResult(method=method, mean=mean, stddev=stddev, samples=samples)
    return results


def write_pr_csv(
    pr_curve: Sequence[tuple[float, float | None, float | None]], path
) -> None:
    """Emit the sweep as threshold,precision,recall for external plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "precision", "recall"])
        for t, p, r in pr_curve:
            writer.writerow([t, "" if p is None else p, "" if r is None else r])
