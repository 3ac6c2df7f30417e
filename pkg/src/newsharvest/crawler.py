"""Forward crawling: live publisher sites -> stream of extracted articles.

One worker thread per publisher keeps that publisher's requests strictly
serial, which is what makes the politeness guarantee structural: the gate in
:class:`~newsharvest.fetching.PoliteFetcher` plus a single writer per
publisher means consecutive request starts are always at least the
effective delay apart. Workers feed one queue; the consumer linearizes the
stream and enforces ``max_articles`` exactly.
"""

from __future__ import annotations

import logging
import queue
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterator
from urllib.parse import urlsplit

from .articles import Article, HtmlRecord
from .extraction import extract
from .feeds import discover_urls
from .fetching import DEFAULT_USER_AGENT, FetchError, PoliteFetcher, RequestLog
from .htmldom import sniff_charset
from .registry import PublisherSpec
from .robots import RobotsCache

logger = logging.getLogger(__name__)

_SENTINEL = object()


@dataclass(frozen=True)
class CrawlParams:
    """Knobs shared by forward and archive crawling."""

    max_articles: int | None = None
    only_complete: bool = True
    include_html: bool = False
    timeout: float = 30.0
    delay: float = 1.0

    def __post_init__(self) -> None:
        if self.max_articles is not None and self.max_articles <= 0:
            raise ValueError("max_articles must be positive")
        if self.delay < 0:
            raise ValueError("delay must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")


def payload_to_html(content: bytes, content_type: str | None) -> str | bytes:
    """Decode a response body when that is lossless, else keep the bytes.

    The extraction engine re-decodes byte payloads with charset sniffing;
    keeping undecodable payloads as bytes preserves them byte-exactly in
    serialized records.
    """
    declared = None
    if content_type and "charset=" in content_type:
        declared = content_type.split("charset=", 1)[1].split(";")[0].strip().strip('"')
    charset = sniff_charset(content, declared)
    try:
        return content.decode(charset)
    except (UnicodeDecodeError, LookupError):
        return content


def _drain(
    out: "queue.Queue[object]",
    stop: threading.Event,
    worker_count: int,
    max_articles: int | None,
) -> Iterator[Article]:
    """Consume worker output until the cap is reached or all workers finish."""
    yielded = 0
    finished = 0
    try:
        while finished < worker_count:
            item = out.get()
            if item is _SENTINEL:
                finished += 1
                continue
            yield item  # type: ignore[misc]
            yielded += 1
            if max_articles is not None and yielded >= max_articles:
                return
    finally:
        stop.set()


def _put(out: "queue.Queue[object]", item: object, stop: threading.Event) -> bool:
    while not stop.is_set():
        try:
            out.put(item, timeout=0.05)
            return True
        except queue.Full:
            continue
    return False


def _put_sentinel(out: "queue.Queue[object]", stop: threading.Event) -> None:
    """Deliver the end-of-worker marker without deadlocking: once the stream
    is stopping, queued articles are garbage and may be displaced."""
    while True:
        try:
            out.put(_SENTINEL, timeout=0.1)
            return
        except queue.Full:
            if stop.is_set():
                try:
                    out.get_nowait()
                except queue.Empty:
                    pass


class _CrawlShared:
    """State shared by publisher workers: dedup set and robots cache."""

    def __init__(self) -> None:
        self.seen_urls: set[str] = set()
        self._lock = threading.Lock()
        self.robots = RobotsCache()

    def claim(self, url: str) -> bool:
        with self._lock:
            if url in self.seen_urls:
                return False
            self.seen_urls.add(url)
            return True


def _effective_delay(publisher: PublisherSpec, params: CrawlParams, robots_delay: float | None) -> float:
    base = publisher.request_delay if publisher.request_delay is not None else params.delay
    return max(base, robots_delay or 0.0)


def _publisher_worker(
    publisher: PublisherSpec,
    params: CrawlParams,
    fetcher: PoliteFetcher,
    shared: _CrawlShared,
    out: "queue.Queue[object]",
    stop: threading.Event,
) -> None:
    try:
        base_delay = publisher.request_delay if publisher.request_delay is not None else params.delay
        anchor = publisher.sources[0].url if publisher.sources else f"https://{publisher.domains[0]}/"
        robots = shared.robots.policy_for(anchor, fetcher.fetch, publisher.id, base_delay)
        delay = _effective_delay(publisher, params, robots.crawl_delay(fetcher.user_agent))

        extra = tuple(u for u in robots.sitemap_urls)
        if not publisher.sources and not extra:
            logger.warning("publisher %s has no reachable sources", publisher.id)

        for url in discover_urls(publisher, robots, fetcher, delay, extra_sitemaps=extra):
            if stop.is_set():
                return
            if not shared.claim(url):
                continue
            policy = shared.robots.policy_for(url, fetcher.fetch, publisher.id, delay)
            if not policy.allowed(url, fetcher.user_agent):
                logger.debug("robots policy excludes %s", url)
                continue
            try:
                result = fetcher.fetch(url, publisher.id, delay)
            except FetchError as exc:
                logger.warning("skipping %s: %s", url, exc)
                continue
            if not 200 <= result.status < 300:
                logger.warning("skipping %s: HTTP %s", url, result.status)
                continue
            record = HtmlRecord(
                raw_html=payload_to_html(result.content, result.content_type),
                url=result.url,
                crawl_time=datetime.now(timezone.utc),
                source_id=publisher.id,
            )
            article = extract(record, publisher.parser)
            if params.only_complete and not article.complete:
                logger.info("dropping incomplete article %s (%s)", url, article.exception)
                continue
            if not _put(out, article, stop):
                return
    except Exception:
        logger.exception("publisher worker %s crashed", publisher.id)
    finally:
        _put_sentinel(out, stop)


def crawl(
    publishers: list[PublisherSpec],
    params: CrawlParams | None = None,
    *,
    user_agent: str = DEFAULT_USER_AGENT,
    request_log: RequestLog | None = None,
) -> Iterator[Article]:
    """Crawl live sites of ``publishers``, yielding articles as they
    complete (not grouped by publisher).

    The stream ends after ``params.max_articles`` articles, or when every
    publisher's sources are exhausted.
    """
    if not publishers:
        raise ValueError("publishers must be non-empty")
    params = params or CrawlParams()
    fetcher = PoliteFetcher(user_agent=user_agent, timeout=params.timeout, request_log=request_log)
    shared = _CrawlShared()
    stop = threading.Event()
    out: "queue.Queue[object]" = queue.Queue(maxsize=max(8, 2 * len(publishers)))
    workers = [
        threading.Thread(
            target=_publisher_worker,
            args=(publisher, params, fetcher, shared, out, stop),
            name=f"crawl-{publisher.id}",
            daemon=True,
        )
        for publisher in publishers
    ]
    for worker in workers:
        worker.start()
    try:
        yield from _drain(out, stop, len(workers), params.max_articles)
    finally:
        stop.set()
        for worker in workers:
            worker.join(timeout=params.timeout + 5)


def host_of(url: str) -> str | None:
    host = urlsplit(url).hostname
    return host.lower() if host else None
