"""camscout: find live network cameras by crawling sites, sampling frames over
time, and classifying links by how their frames change."""

from .clock import SystemClock, VirtualClock
from .crawl import CrawlConfig, CrawlReport, crawl
from .evaluate import (
    EvalReport,
    LabeledSample,
    benchmark_methods,
    compute_metrics,
    select_threshold,
    threshold_sweep,
)
from .extract import ExtractionResult, RenderedPage, extract_html_links, extract_xhr_links
from .fetch import Fetcher, FixtureFetcher, RendererFetcher, StaticFetcher
from .identify import (
    CameraClassifier,
    ClassificationResult,
    Method,
    MethodConfig,
    checksum_changed,
    classify,
    luminance_diff,
    luminance_score,
    percent_diff,
    percent_score,
)
from .links import DataLink, LinkKind, Provenance, StreamKind, canonicalize, classify_link, same_domain
from .sample import Frame, FrameSet, SampleSchedule, decode_grayscale, sample_link
from .store import CameraRecord, Store
from .streams import StreamProbe, classify_stream, parse_m3u8, probe_stream

__version__ = "0.1.0"

__all__ = [
    "CameraClassifier",
    "CameraRecord",
    "ClassificationResult",
    "CrawlConfig",
    "CrawlReport",
    "DataLink",
    "EvalReport",
    "ExtractionResult",
    "Fetcher",
    "FixtureFetcher",
    "Frame",
    "FrameSet",
    "LabeledSample",
    "LinkKind",
    "Method",
    "MethodConfig",
    "Provenance",
    "RenderedPage",
    "RendererFetcher",
    "SampleSchedule",
    "StaticFetcher",
    "Store",
    "StreamKind",
    "StreamProbe",
    "SystemClock",
    "VirtualClock",
    "benchmark_methods",
    "canonicalize",
    "checksum_changed",
    "classify",
    "classify_link",
    "classify_stream",
    "compute_metrics",
    "crawl",
    "decode_grayscale",
    "extract_html_links",
    "extract_xhr_links",
    "luminance_diff",
    "luminance_score",
    "parse_m3u8",
    "percent_diff",
    "percent_score",
    "probe_stream",
    "same_domain",
    "sample_link",
    "select_threshold",
    "threshold_sweep",
]
