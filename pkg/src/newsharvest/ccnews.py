"""Backward crawling: article extraction from CC-NEWS style WARC archives.

Archive files are named ``CC-NEWS-<YYYYMMDDhhmmss>-<seq>.warc.gz``, so date
narrowing is free: enumeration trusts the filename timestamp and never opens
out-of-range files. A base location may be a directory tree, a manifest file
listing one path or URL per line (optionally gzipped, like the published
``warc.paths.gz`` lists), or an HTTP(S) URL of such a manifest.
"""

from __future__ import annotations

import gzip
import logging
import queue
import re
import threading
from dataclasses import dataclass
from datetime import date, datetime, time as dtime, timezone
from pathlib import Path
from typing import Iterator
from urllib.parse import urljoin

import requests

from .articles import Article, HtmlRecord
from .crawler import CrawlParams, _drain, _put, _put_sentinel, payload_to_html
from .extraction import extract
from .registry import Registry
from .warc import WarcSourceError, stream_warc

logger = logging.getLogger(__name__)

_WARC_NAME = re.compile(r"CC-NEWS-(\d{14})-(\d+)\.warc\.gz$")
_HTML_TAG_SNIFF = re.compile(rb"<\s*(!doctype\s+html|html|head|body|article|div|p)[\s>]", re.IGNORECASE)


@dataclass(frozen=True)
class WarcSourceConfig:
    """Which archive slice to crawl: location, date window, parallelism."""

    base_location: str
    start_date: date
    end_date: date  # exclusive
    worker_count: int = 1

    def __post_init__(self) -> None:
        if self.start_date >= self.end_date:
            raise ValueError("start_date must precede end_date")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")


@dataclass(frozen=True)
class _WarcPath:
    location: str
    timestamp: datetime
    sequence: int


def _parse_warc_name(name: str) -> tuple[datetime, int] | None:
    match = _WARC_NAME.search(name)
    if not match:
        return None
    try:
        stamp = datetime.strptime(match.group(1), "%Y%m%d%H%M%S").replace(tzinfo=timezone.utc)
    except ValueError:
        return None
    return stamp, int(match.group(2))


def _manifest_lines(payload: bytes, name: str) -> list[str]:
    if payload[:2] == b"\x1f\x8b" or name.endswith(".gz"):
        payload = gzip.decompress(payload)
    return [line.strip() for line in payload.decode("utf-8", "replace").splitlines() if line.strip()]


def _candidate_locations(base_location: str, timeout: float = 30.0) -> list[str]:
    if base_location.startswith(("http://", "https://")):
        try:
            response = requests.get(base_location, timeout=timeout)
            response.raise_for_status()
        except requests.RequestException as exc:
            raise WarcSourceError(f"cannot fetch manifest {base_location}: {exc}") from exc
        return [urljoin(base_location, line) for line in _manifest_lines(response.content, base_location)]
    base = Path(base_location)
    if base.is_dir():
        return [str(p) for p in base.rglob("*.warc.gz")]
    if base.is_file():
        lines = _manifest_lines(base.read_bytes(), base.name)
        return [
            line if line.startswith(("http://", "https://")) or Path(line).is_absolute()
            else str(base.parent / line)
            for line in lines
        ]
    raise WarcSourceError(f"{base_location}: not a directory, manifest file or URL")


def enumerate_warc_paths(config: WarcSourceConfig) -> list[str]:
    """All archive files whose filename timestamp falls inside the window,
    ascending by timestamp. Files not following the naming convention are
    skipped with a warning."""
    start = datetime.combine(config.start_date, dtime.min, tzinfo=timezone.utc)
    end = datetime.combine(config.end_date, dtime.min, tzinfo=timezone.utc)
    selected: list[_WarcPath] = []
    for location in _candidate_locations(config.base_location):
        parsed = _parse_warc_name(location)
        if parsed is None:
            logger.warning("skipping %s: does not match the CC-NEWS naming convention", location)
            continue
        stamp, sequence = parsed
        if start <= stamp < end:
            selected.append(_WarcPath(location, stamp, sequence))
    selected.sort(key=lambda p: (p.timestamp, p.sequence, p.location))
    return [p.location for p in selected]


def _looks_like_html(content_type: str, body: bytes) -> bool:
    if "html" in content_type.lower():
        return True
    if content_type:
        return False
    return bool(_HTML_TAG_SNIFF.search(body[:512]))


def _archive_worker(
    jobs: "queue.Queue[str]",
    registry: Registry,
    params: CrawlParams,
    out: "queue.Queue[object]",
    stop: threading.Event,
) -> None:
    try:
        while not stop.is_set():
            try:
                path = jobs.get_nowait()
            except queue.Empty:
                return
            for attempt in (1, 2):
                try:
                    for article in _extract_from_file(path, registry, params, stop):
                        if not _put(out, article, stop):
                            return
                    break
                except WarcSourceError as exc:
                    if attempt == 1:
                        logger.warning("retrying %s: %s", path, exc)
                    else:
                        logger.error("skipping %s after retry: %s", path, exc)
    except Exception:
        logger.exception("archive worker crashed")
    finally:
        _put_sentinel(out, stop)


def _extract_from_file(
    path: str,
    registry: Registry,
    params: CrawlParams,
    stop: threading.Event,
) -> Iterator[Article]:
    for ref, body in stream_warc(path, timeout=params.timeout):
        if stop.is_set():
            return
        if not 200 <= ref.http_status < 300:
            continue
        if not _looks_like_html(ref.content_type, body):
            continue
        publisher = registry.match_url(ref.target_uri)
        if publisher is None:
            continue
        charset_header = ref.content_type if "charset=" in ref.content_type else None
        record = HtmlRecord(
            raw_html=payload_to_html(body, charset_header),
            url=ref.target_uri,
            crawl_time=ref.warc_date,
            source_id=ref.warc_path,
        )
        article = extract(record, publisher.parser)
        if params.only_complete and not article.complete:
            logger.info("dropping incomplete article %s (%s)", ref.target_uri, article.exception)
            continue
        yield article


def crawl_archive(
    registry: Registry,
    config: WarcSourceConfig,
    params: CrawlParams | None = None,
) -> Iterator[Article]:
    """Stream articles from every matching archive file.

    Files are processed by up to ``config.worker_count`` workers in
    parallel; the output order depends on scheduling but the article set
    does not. ``params.max_articles`` terminates early, leaving remaining
    files unread.
    """
    params = params or CrawlParams()
    paths = enumerate_warc_paths(config)
    worker_count = min(config.worker_count, max(1, len(paths)))
    jobs: "queue.Queue[str]" = queue.Queue()
    for path in paths:
        jobs.put(path)
    stop = threading.Event()
    out: "queue.Queue[object]" = queue.Queue(maxsize=max(8, 2 * worker_count))
    workers = [
        threading.Thread(
            target=_archive_worker,
            args=(jobs, registry, params, out, stop),
            name=f"warc-{i}",
            daemon=True,
        )
        for i in range(worker_count)
    ]
    for worker in workers:
        worker.start()
    try:
        yield from _drain(out, stop, len(workers), params.max_articles)
    finally:
        stop.set()
        for worker in workers:
            worker.join(timeout=params.timeout + 5)
