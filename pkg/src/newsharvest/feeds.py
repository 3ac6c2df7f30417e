"""Content-map discovery: RSS/Atom feeds and sitemaps (including indexes).

Feeds and sitemaps are parsed namespace-insensitively because publishers
are wildly inconsistent about them; sitemap indexes are expanded
recursively with a depth cap and gzipped payloads are decompressed
transparently. One broken source never aborts the others.
"""

from __future__ import annotations

import gzip
import logging
import xml.etree.ElementTree as ET
from typing import Iterator

from .fetching import FetchError, PoliteFetcher
from .registry import PublisherSpec
from .robots import RobotsPolicy

logger = logging.getLogger(__name__)

SITEMAP_INDEX_DEPTH = 3
_GZIP_MAGIC = b"\x1f\x8b"


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1].lower()


def _maybe_gunzip(data: bytes, url: str) -> bytes:
    if data[:2] == _GZIP_MAGIC or url.endswith(".gz"):
        try:
            return gzip.decompress(data)
        except OSError as exc:
            logger.warning("failed to decompress %s: %s", url, exc)
    return data


def parse_feed(data: bytes) -> list[str]:
    """Item links from an RSS 2.0 or Atom feed, in document order."""
    root = ET.fromstring(data)
    links: list[str] = []
    for element in root.iter():
        name = _local_name(element.tag)
        if name == "item":  # RSS
            for child in element:
                if _local_name(child.tag) == "link" and child.text and child.text.strip():
                    links.append(child.text.strip())
                    break
        elif name == "entry":  # Atom
            fallback = None
            chosen = None
            for child in element:
                if _local_name(child.tag) != "link":
                    continue
                href = child.get("href")
                if not href:
                    continue
                rel = child.get("rel")
                if rel in (None, "alternate"):
                    chosen = href
                    break
                if fallback is None:
                    fallback = href
            if chosen or fallback:
                links.append(chosen or fallback)
    return links


def parse_sitemap(data: bytes) -> tuple[bool, list[str]]:
    """Parse a sitemap document.

    Returns ``(is_index, locations)``: for a sitemap index the locations are
    child sitemap URLs, otherwise page URLs.
    """
    root = ET.fromstring(data)
    is_index = _local_name(root.tag) == "sitemapindex"
    locations: list[str] = []
    for element in root.iter():
        if _local_name(element.tag) in ("url", "sitemap"):
            for child in element:
                if _local_name(child.tag) == "loc" and child.text and child.text.strip():
                    locations.append(child.text.strip())
                    break
    return is_index, locations


def _expand_sitemap(
    url: str,
    fetcher: PoliteFetcher,
    publisher_id: str,
    delay: float,
    depth: int,
    robots: RobotsPolicy,
) -> Iterator[str]:
    if not robots.allowed(url, fetcher.user_agent):
        logger.debug("robots policy excludes sitemap %s", url)
        return
    try:
        result = fetcher.fetch(url, publisher_id, delay)
    except FetchError as exc:
        logger.warning("sitemap %s unreachable: %s", url, exc)
        return
    if not 200 <= result.status < 300:
        logger.warning("sitemap %s returned HTTP %s", url, result.status)
        return
    payload = _maybe_gunzip(result.content, url)
    try:
        is_index, locations = parse_sitemap(payload)
    except ET.ParseError as exc:
        logger.warning("sitemap %s is not parseable XML: %s", url, exc)
        return
    if is_index:
        if depth >= SITEMAP_INDEX_DEPTH:
            logger.warning("sitemap index depth cap reached at %s", url)
            return
        for child in locations:
            yield from _expand_sitemap(child, fetcher, publisher_id, delay, depth + 1, robots)
    else:
        yield from locations


def discover_urls(
    publisher: PublisherSpec,
    robots: RobotsPolicy,
    fetcher: PoliteFetcher,
    delay: float,
    extra_sitemaps: tuple[str, ...] = (),
) -> Iterator[str]:
    """Stream candidate article URLs for one publisher.

    Declared sources come first (in declared order), then sitemaps exposed
    via robots.txt that were not declared; entries keep document order, are
    deduplicated exactly and filtered against the robots policy.
    """
    seen: set[str] = set()
    declared = {source.url for source in publisher.sources}
    jobs: list[tuple[str, str]] = [(source.kind, source.url) for source in publisher.sources]
    jobs += [("sitemap", url) for url in extra_sitemaps if url not in declared]

    for kind, source_url in jobs:
        try:
            if kind == "rss":
                if not robots.allowed(source_url, fetcher.user_agent):
                    logger.debug("robots policy excludes feed %s", source_url)
                    continue
                result = fetcher.fetch(source_url, publisher.id, delay)
                if not 200 <= result.status < 300:
                    logger.warning("feed %s returned HTTP %s", source_url, result.status)
                    continue
                found = parse_feed(_maybe_gunzip(result.content, source_url))
            else:  # sitemap / news_sitemap
                found = _expand_sitemap(source_url, fetcher, publisher.id, delay, depth=0, robots=robots)
        except FetchError as exc:
            logger.warning("source %s unreachable: %s", source_url, exc)
            continue
        except ET.ParseError as exc:
            logger.warning("source %s is not parseable XML: %s", source_url, exc)
            continue
        for url in found:
            if url in seen:
                continue
            seen.add(url)
            if not robots.allowed(url, fetcher.user_agent):
                logger.debug("robots policy excludes %s", url)
                continue
            yield url
