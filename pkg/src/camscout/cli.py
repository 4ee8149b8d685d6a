"""camscout command line: crawl -> sample -> identify -> eval, plus bench and serve.

Every stage reads and writes one data directory (--data, or CAMSCOUT_DATA_DIR),
so the stages compose:

    camscout crawl https://example.com --out data/
    camscout sample --data data/ --virtual-clock
    camscout identify --data data/ --method luminance
    camscout eval --data data/ --sweep --csv pr.csv

--fixture PATH swaps the network for a recorded site on any stage, which is
how the test suite runs the whole pipeline hermetically.
"""

from __future__ import annotations

import os
import re
import sys
from pathlib import Path

import click

from .clock import SystemClock, VirtualClock
from .crawl import CrawlConfig, crawl, read_links, write_report
from .evaluate import (
    LABEL_CAMERA,
    benchmark_methods,
    compute_metrics,
    default_grid,
    select_threshold,
    threshold_sweep,
    write_pr_csv,
)
from .fetch import RENDERER_URL_ENV, FetchError, RendererFetcher, StaticFetcher, load_fixture
from .identify import InsufficientFrames, Method, MethodConfig, classify
from .links import LinkKind
from .politeness import DomainGate
from .sample import AllSamplesFailed, SampleSchedule, sample_link
from .store import CameraRecord, Store, frameset_id
from .streams import PlaylistMalformed, StreamUnreachable, UnprobedStream, classify_stream, probe_stream

DATA_DIR_ENV = "CAMSCOUT_DATA_DIR"

_DURATION_RE = re.compile(r"^(\d+(?:\.\d+)?)\s*(ms|s|m|h|d)?$")
_DURATION_UNITS = {"ms": 0.001, "s": 1.0, "m": 60.0, "h": 3600.0, "d": 86400.0, None: 1.0}


def parse_duration(text: str) -> float:
    """"3s" -> 3.0, "5m" -> 300.0, "12h" -> 43200.0; bare numbers are seconds."""
    match = _DURATION_RE.match(text.strip().lower())
    if not match:
        raise click.BadParameter(f"cannot parse duration {text!r}")
    value, unit = match.groups()
    return float(value) * _DURATION_UNITS[unit]


def _data_dir(value: str | None) -> Path:
    path = Path(value or os.environ.get(DATA_DIR_ENV, "camscout-data"))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _make_fetcher(fixture: str | None, renderer: str | None, clock, user_agent: str = "camscout"):
    if fixture:
        fetcher = load_fixture(fixture)
        fetcher.clock = clock
        return fetcher
    renderer = renderer or os.environ.get(RENDERER_URL_ENV)
    if renderer:
        return RendererFetcher(renderer, user_agent=user_agent, clock=clock)
    return StaticFetcher(user_agent=user_agent, clock=clock)


@click.group()
def main():
    """Discover network cameras: crawl, sample frames, classify, evaluate."""


@main.command("crawl")
@click.argument("seed_url")
@click.option("--depth", default=15, show_default=True, help="Maximum crawl depth.")
@click.option("--delay", default="3s", show_default=True, help="Per-domain request spacing.")
@click.option("--timeout", default="180s", show_default=True, help="Per-page fetch timeout.")
@click.option("--render-wait", default="8s", show_default=True, help="Renderer settle time.")
@click.option("--connections", default=32, show_default=True, help="Max connections per domain.")
@click.option("--workers", default=1, show_default=True, help="Concurrent fetch workers.")
@click.option("--renderer", default=None, help=f"Headless-render endpoint (or ${RENDERER_URL_ENV}).")
@click.option("--no-robots", is_flag=True, help="Ignore robots.txt (not recommended).")
@click.option("--fixture", default=None, type=click.Path(exists=True), help="Recorded-site JSON.")
@click.option("--virtual-clock", is_flag=True, help="Advance time without waiting.")
@click.option("--out", "out_dir", default=None, help="Output directory (default: data dir).")
def crawl_cmd(seed_url, depth, delay, timeout, render_wait, connections, workers,
              renderer, no_robots, fixture, virtual_clock, out_dir):
    """Crawl SEED_URL and write the discovered data links."""
    clock = VirtualClock() if virtual_clock else SystemClock()
    config = CrawlConfig(
        max_depth=depth,
        max_connections_per_domain=connections,
        per_request_delay=parse_duration(delay),
        page_timeout=parse_duration(timeout),
        render_wait=parse_duration(render_wait),
        respect_robots=not no_robots,
        workers=workers,
    )
    fetcher = _make_fetcher(fixture, renderer, clock)
    report = crawl(seed_url, config, fetcher, clock=clock)
    out = _data_dir(out_dir)
    write_report(report, out)
    click.echo(
        f"crawled {report.unique_pages} pages ({report.pages_crawled} fetches), "
        f"found {len(report.data_links)} data links, {len(report.errors)} errors"
    )
    for url, error in report.errors:
        click.echo(f"  error: {url}: {error}", err=True)
    if report.errors and report.unique_pages == 0:
        sys.exit(1)


@main.command("sample")
@click.option("--data", "data_dir", default=None, help=f"Data directory (or ${DATA_DIR_ENV}).")
@click.option("--schedule", default="0,5m,60m,12h", show_default=True,
              help="Comma-separated frame offsets from t0.")
@click.option("--virtual-clock", is_flag=True, help="Run the schedule instantly.")
@click.option("--delay", default="3s", show_default=True, help="Per-domain request spacing.")
@click.option("--fixture", default=None, type=click.Path(exists=True), help="Recorded-site JSON.")
def sample_cmd(data_dir, schedule, virtual_clock, delay, fixture):
    """Download frames for every image link found by the crawl."""
    data = _data_dir(data_dir)
    links_path = data / "links.jsonl"
    if not links_path.exists():
        raise click.ClickException(f"no links.jsonl in {data}; run `camscout crawl` first")
    offsets = tuple(parse_duration(part) for part in schedule.split(","))
    sched = SampleSchedule(offsets=offsets)
    clock = VirtualClock() if virtual_clock else SystemClock()
    fetcher = _make_fetcher(fixture, None, clock)
    gate = DomainGate(delay=parse_duration(delay), clock=clock)
    store = Store(data)

    sampled = dead = 0
    for link in read_links(links_path):
        if link.kind != LinkKind.IMAGE:
            continue
        try:
            fs = sample_link(link, sched, clock=clock, fetcher=fetcher, gate=gate)
        except AllSamplesFailed as exc:
            store.record_dead_link(link, str(exc))
            dead += 1
            continue
        store.put_frameset(fs)
        sampled += 1
    click.echo(f"sampled {sampled} framesets ({dead} dead links)")


@main.command("identify")
@click.option("--data", "data_dir", default=None, help=f"Data directory (or ${DATA_DIR_ENV}).")
@click.option("--method", default="luminance", show_default=True,
              type=click.Choice(["luminance", "percent", "checksum", "cascade"]))
@click.option("--percent-threshold", default=0.11, show_default=True)
@click.option("--luminance-threshold", default=1.3, show_default=True)
@click.option("--fixture", default=None, type=click.Path(exists=True), help="Recorded-site JSON.")
def identify_cmd(data_dir, method, percent_threshold, luminance_threshold, fixture):
    """Classify sampled framesets and probe stream links."""
    data = _data_dir(data_dir)
    store = Store(data)
    cfg = MethodConfig(
        method=Method(method),
        percent_threshold=percent_threshold,
        luminance_threshold=luminance_threshold,
    )
    clock = SystemClock()
    fetcher = _make_fetcher(fixture, None, clock)

    cameras = assessed = 0
    for manifest in store.list_framesets():
        fs = store.load_frameset(manifest["id"])
        try:
            result = classify(fs, cfg)
        except InsufficientFrames as exc:
            click.echo(f"  unclassifiable: {fs.link.raw_url}: {exc}", err=True)
            continue
        assessed += 1
        store.put_classification(result)
        if result.is_camera:
            cameras += 1
            _store_camera(store, manifest, result)

    streams = 0
    links_path = data / "links.jsonl"
    if links_path.exists():
        for link in read_links(links_path):
            if link.kind != LinkKind.STREAM:
                continue
            try:
                probe = probe_stream(link, fetcher)
                result = classify_stream(probe, cfg=cfg)
            except UnprobedStream:
                click.echo(f"  unprobed: {link.raw_url} ({link.stream_kind.value})", err=True)
                continue
            except (StreamUnreachable, PlaylistMalformed, FetchError) as exc:
                store.record_dead_link(link, str(exc))
                click.echo(f"  stream error: {link.raw_url}: {exc}", err=True)
                continue
            assessed += 1
            streams += 1
            store.put_classification(result)
            if result.is_camera:
                cameras += 1
                store.upsert_camera(
                    CameraRecord(
                        id=frameset_id(link.canonical_key),
                        data_link=link,
                        classification=result,
                        first_seen=link.discovered_at,
                        last_verified=clock.now(),
                        frame_refs=[],
                    )
                )
    click.echo(f"classified {assessed} links ({streams} streams): {cameras} cameras")


def _store_camera(store: Store, manifest: dict, result) -> None:
    refs = [f["checksum"] for f in manifest["frames"] if f is not None]
    captured = [f["captured_at"] for f in manifest["frames"] if f is not None]
    store.upsert_camera(
        CameraRecord(
            id=manifest["id"],
            data_link=result.link,
            classification=result,
            first_seen=manifest["t0"],
            last_verified=max(captured) if captured else manifest["t0"],
            frame_refs=refs,
        )
    )


@main.command("eval")
@click.option("--data", "data_dir", default=None, help=f"Data directory (or ${DATA_DIR_ENV}).")
@click.option("--method", default="luminance", show_default=True,
              type=click.Choice(["luminance", "percent", "checksum", "cascade", "stream"]))
@click.option("--sweep", is_flag=True, help="Sweep thresholds and select an operating point.")
@click.option("--csv", "csv_path", default=None, help="Write the PR curve as CSV.")
def eval_cmd(data_dir, method, sweep, csv_path):
    """Score stored classifications against human labels."""
    data = _data_dir(data_dir)
    store = Store(data)
    labels = store.list_labels()
    if not labels:
        raise click.ClickException("no labels stored; label candidates first")

    predictions, truths, scores = [], [], []
    for sample in labels:
        record = store.classification_for(sample.frameset_id)
        if record is None or record["method"] != method:
            continue
        predictions.append(bool(record["is_camera"]))
        truths.append(sample.is_camera)
        scores.append(float(record["score"]))
    if not predictions:
        raise click.ClickException(f"no stored {method} classifications match the labels")

    report = compute_metrics(predictions, truths)
    if sweep:
        curve = threshold_sweep(scores, truths, default_grid(scores))
        report.pr_curve = curve
        report.selected_threshold = select_threshold(curve)
        if csv_path:
            write_pr_csv(curve, csv_path)
    store.put_eval(report, method, report.selected_threshold)

    def fmt(x):
        return "n/a" if x is None else f"{x:.4f}"

    click.echo(
        f"tp={report.tp} fp={report.fp} fn={report.fn} tn={report.tn} "
        f"precision={fmt(report.precision)} recall={fmt(report.recall)} "
        f"accuracy={fmt(report.accuracy)}"
    )
    if report.selected_threshold is not None:
        click.echo(f"selected threshold: {report.selected_threshold:.6g}")


@main.command("bench")
@click.option("--data", "data_dir", default=None, help=f"Data directory (or ${DATA_DIR_ENV}).")
@click.option("--reps", default=20, show_default=True, help="Repetitions per method.")
@click.option("--synthetic", default=0, show_default=True,
              help="Use N synthetic framesets instead of stored ones.")
def bench_cmd(data_dir, reps, synthetic):
    """Benchmark the comparison methods' wall time."""
    if synthetic > 0:
        framesets = _synthetic_framesets(synthetic)
    else:
        store = Store(_data_dir(data_dir))
        framesets = [store.load_frameset(m["id"]) for m in store.list_framesets()]
        if not framesets:
            raise click.ClickException("no stored framesets; use --synthetic N")
    results = benchmark_methods(framesets, repetitions=reps)
    for method, result in results.items():
        click.echo(f"{method.value:10s} {result.mean * 1000:9.2f} ms ± {result.stddev * 1000:.2f} ms")


def _synthetic_framesets(count: int):
    import io

    import numpy as np
    from PIL import Image

    from .links import DataLink, Provenance
    from .sample import Frame, FrameSet

    rng = np.random.default_rng(7)
    framesets = []
    for i in range(count):
        link = DataLink(
            raw_url=f"http://bench.test/cam{i}.jpg",
            kind=LinkKind.IMAGE,
            stream_kind=None,
            provenance=Provenance.HTML_EMBED,
            source_page="http://bench.test/",
            seed_domain="bench.test",
            discovered_at=0.0,
        )
        frames = []
        for j in range(4):
            pixels = rng.integers(0, 256, size=(120, 160), dtype=np.uint8)
            buf = io.BytesIO()
            Image.fromarray(pixels, mode="L").save(buf, format="PNG")
            frames.append(Frame.from_bytes(buf.getvalue(), captured_at=float(j)))
        framesets.append(FrameSet(link=link, t0=0.0, offsets=(0.0, 300.0, 3600.0, 43200.0), frames=frames))
    return framesets


@main.command("serve")
@click.option("--data", "data_dir", default=None, help=f"Data directory (or ${DATA_DIR_ENV}).")
@click.option("--addr", default="127.0.0.1:8000", show_default=True, help="HOST:PORT to bind.")
@click.option("--ui-dir", default=None, type=click.Path(exists=True),
              help="Directory of labeling-UI static files to serve at /.")
def serve_cmd(data_dir, addr, ui_dir):
    """Serve the HTTP API (and optionally the labeling UI)."""
    import uvicorn

    from .api import create_app

    host, _, port = addr.partition(":")
    app = create_app(Store(_data_dir(data_dir)), ui_dir=ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
