"""Breadth-first, polite, depth-limited crawl of one seed domain.

The crawl walks level by level: every page at depth k is fetched (and its
links collected) before any page at depth k+1, which keeps the traversal
deterministic with one worker and still strictly breadth-first with many.
Pages are visited at most once, keyed on their canonical URL; only pages on
the seed's registrable domain are followed; robots.txt Disallow rules are
honored and a robots Crawl-delay larger than the configured spacing wins.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlsplit

from .clock import Clock, SystemClock
from .extract import ExtractionResult, extract_all
from .fetch import FetchError, Fetcher
from .links import (
    DataLink,
    LinkKind,
    MalformedUrl,
    canonicalize,
    registrable_domain,
    same_domain,
)
from .politeness import DomainGate
from .robots import PERMISSIVE, RuleSet, parse_robots

log = logging.getLogger(__name__)


@dataclass
class CrawlConfig:
    max_depth: int = 15
    max_connections_per_domain: int = 32
    per_request_delay: float = 3.0
    page_timeout: float = 180.0
    render_wait: float = 8.0
    respect_robots: bool = True
    user_agent: str = "camscout"
    workers: int = 1

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        for name in ("per_request_delay", "page_timeout", "render_wait"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class CrawlReport:
    seed_url: str = ""
    seed_domain: str = ""
    pages_crawled: int = 0
    unique_pages: int = 0
    data_links: list[DataLink] = field(default_factory=list)
    per_depth_counts: dict[int, tuple[int, int]] = field(default_factory=dict)
    errors: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "seed_url": self.seed_url,
            "seed_domain": self.seed_domain,
            "pages_crawled": self.pages_crawled,
            "unique_pages": self.unique_pages,
            "data_link_count": len(self.data_links),
            "per_depth_counts": {
                str(d): list(counts) for d, counts in sorted(self.per_depth_counts.items())
            },
            "errors": [list(e) for e in self.errors],
        }


class _RobotsCache:
    """One fetched-and-parsed RuleSet per host."""

    def __init__(self, fetcher: Fetcher, config: CrawlConfig):
        self._fetcher = fetcher
        self._config = config
        self._rules: dict[str, RuleSet] = {}

    def rules_for(self, url: str) -> RuleSet:
        parts = urlsplit(url)
        host = parts.hostname or ""
        key = f"{parts.scheme}://{host}"
        if key not in self._rules:
            self._rules[key] = self._fetch(parts.scheme, host)
        return self._rules[key]

    def _fetch(self, scheme: str, host: str) -> RuleSet:
        robots_url = f"{scheme}://{host}/robots.txt"
        try:
            resp = self._fetcher.get(robots_url, timeout=self._config.page_timeout)
        except FetchError:
            return PERMISSIVE
        if not resp.ok:
            return PERMISSIVE
        return parse_robots(resp.body.decode("utf-8", errors="replace"), self._config.user_agent)


def robots_rules(domain: str, fetcher: Fetcher, config: CrawlConfig | None = None) -> RuleSet:
    """Fetch and parse robots.txt for a domain; missing or failing -> permissive."""
    config = config or CrawlConfig()
    return _RobotsCache(fetcher, config).rules_for(f"http://{domain}/")


def crawl(
    seed_url: str,
    config: CrawlConfig | None = None,
    fetcher: Fetcher | None = None,
    clock: Clock | None = None,
    gate: DomainGate | None = None,
) -> CrawlReport:
    """BFS the seed's domain and collect every candidate data link.

    An unreachable seed ends the crawl immediately with an empty report
    carrying the error; any other page failure is recorded and skipped.
    """
    config = config or CrawlConfig()
    clock = clock or SystemClock()
    if fetcher is None:
        from .fetch import StaticFetcher

        fetcher = StaticFetcher(user_agent=config.user_agent, clock=clock)
    gate = gate or DomainGate(
        max_connections=config.max_connections_per_domain,
        delay=config.per_request_delay,
        clock=clock,
    )

    seed_host = urlsplit(seed_url).hostname
    if not seed_host:
        raise MalformedUrl(f"seed URL has no host: {seed_url!r}")
    seed_domain = registrable_domain(seed_host)
    report = CrawlReport(seed_url=seed_url, seed_domain=seed_domain)
    robots = _RobotsCache(_GatedFetcher(fetcher, gate, seed_domain), config)

    if config.respect_robots and not robots.rules_for(seed_url).allows_url(seed_url):
        report.errors.append((seed_url, "SeedUnreachable: disallowed by robots.txt"))
        return report

    visited = {canonicalize(seed_url, LinkKind.PAGE)}
    seen_data: set[str] = set()
    frontier: list[tuple[str, int]] = [(seed_url, 0)]
    depth = 0

    def fetch_one(url: str):
        rules = robots.rules_for(url) if config.respect_robots else PERMISSIVE
        if rules.crawl_delay:
            gate.set_delay(seed_domain, rules.crawl_delay)
        with gate.permit(seed_domain):
            return fetcher.fetch(url, timeout=config.page_timeout, render_wait=config.render_wait)

    while frontier and depth <= config.max_depth:
        level = frontier
        frontier = []
        pages_at_depth = 0
        links_at_depth = 0
        next_urls: list[str] = []

        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                outcomes = list(pool.map(_safe_fetch, [fetch_one] * len(level), [u for u, _ in level]))
        else:
            outcomes = [_safe_fetch(fetch_one, url) for url, _ in level]

        for (url, _), (page, error) in zip(level, outcomes):
            report.pages_crawled += 1
            if error is None and not page.ok:
                error = f"http status {page.status}"
                page = None
            if error is not None:
                if depth == 0:  # the seed itself: nothing to continue from
                    report.errors.append((url, f"SeedUnreachable: {error}"))
                    return report
                report.errors.append((url, error))
                continue

            final_key = canonicalize(page.url, LinkKind.PAGE)
            if page.url != url:
                # followed a redirect: dedup on the landing URL, drop off-domain targets
                if not same_domain(page.url, seed_domain):
                    report.errors.append((url, f"redirected off-domain to {page.url}"))
                    continue
                if final_key in visited and final_key != canonicalize(url, LinkKind.PAGE):
                    continue
                visited.add(final_key)

            report.unique_pages += 1
            pages_at_depth += 1
            extraction = extract_all(page)
            links_at_depth += _record_data_links(extraction, report, seen_data, depth, seed_domain)

            for link in extraction.page_links:
                next_urls.append(link)

        if depth + 1 <= config.max_depth:
            for url in next_urls:
                try:
                    if not same_domain(url, seed_domain):
                        continue
                    key = canonicalize(url, LinkKind.PAGE)
                except MalformedUrl:
                    continue
                if key in visited:
                    continue
                if config.respect_robots and not robots.rules_for(url).allows_url(url):
                    continue
                visited.add(key)
                frontier.append((url, depth + 1))

        report.per_depth_counts[depth] = (pages_at_depth, links_at_depth)
        depth += 1

    return report


def _safe_fetch(fetch_fn, url: str):
    try:
        return fetch_fn(url), None
    except FetchError as exc:
        return None, str(exc)


def _record_data_links(
    extraction: ExtractionResult,
    report: CrawlReport,
    seen: set[str],
    depth: int,
    seed_domain: str,
) -> int:
    added = 0
    for link in extraction.data_links:
        if link.canonical_key in seen:
            continue
        seen.add(link.canonical_key)
        link.depth = depth
        link.seed_domain = seed_domain
        report.data_links.append(link)
        added += 1
    return added


class _GatedFetcher:
    """Routes robots.txt GETs through the same politeness gate as page fetches."""

    def __init__(self, fetcher: Fetcher, gate: DomainGate, domain: str):
        self._fetcher = fetcher
        self._gate = gate
        self._domain = domain

    def get(self, url: str, timeout: float = 30.0):
        with self._gate.permit(self._domain):
            return self._fetcher.get(url, timeout)


def write_report(report: CrawlReport, out_dir: str | Path) -> None:
    """Write the crawl output as line-delimited JSON: one DataLink per line in
    links.jsonl plus a single-line summary in crawl_report.jsonl."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "links.jsonl", "w") as fh:
        for link in report.data_links:
            fh.write(json.dumps(link.to_dict()) + "\n")
    with open(out / "crawl_report.jsonl", "w") as fh:
        fh.write(json.dumps(report.to_dict()) + "\n")


def read_links(path: str | Path) -> list[DataLink]:
    links = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                links.append(DataLink.from_dict(json.loads(line)))
    return links
