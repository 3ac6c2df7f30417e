"""Robots exclusion policy: parsing, fetching and per-host caching.

Prefix-match semantics over per-user-agent groups, with the conservative
failure modes a polite crawler wants: a missing robots.txt allows
everything, a server error disallows everything for the session, and
network trouble is retried once before giving up conservatively.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from urllib.parse import urlsplit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Group:
    agents: tuple[str, ...]
    rules: tuple[tuple[bool, str], ...]  # (allow, path-prefix)
    crawl_delay: float | None


@dataclass(frozen=True)
class RobotsPolicy:
    groups: tuple[_Group, ...]
    sitemap_urls: tuple[str, ...] = ()
    deny_all: bool = False

    @classmethod
    def allow_everything(cls) -> "RobotsPolicy":
        return cls(groups=())

    @classmethod
    def deny_everything(cls) -> "RobotsPolicy":
        return cls(groups=(), deny_all=True)

    def _group_for(self, user_agent: str) -> _Group | None:
        ua = user_agent.lower()
        best: tuple[int, _Group] | None = None
        fallback: _Group | None = None
        for group in self.groups:
            for agent in group.agents:
                if agent == "*":
                    if fallback is None:
                        fallback = group
                elif agent in ua:
                    if best is None or len(agent) > best[0]:
                        best = (len(agent), group)
        return best[1] if best else fallback

    def allowed(self, url: str, user_agent: str) -> bool:
        """Longest matching path prefix wins; allow wins on equal length."""
        if self.deny_all:
            return False
        group = self._group_for(user_agent)
        if group is None:
            return True
        path = urlsplit(url).path or "/"
        verdict = True
        best_length = -1
        for allow, prefix in group.rules:
            if path.startswith(prefix):
                if len(prefix) > best_length or (len(prefix) == best_length and allow):
                    best_length = len(prefix)
                    verdict = allow
        return verdict

    def crawl_delay(self, user_agent: str) -> float | None:
        group = self._group_for(user_agent)
        return group.crawl_delay if group else None


def parse_robots(text: str) -> RobotsPolicy:
    """Parse a robots.txt body into a policy."""
    groups: list[_Group] = []
    sitemaps: list[str] = []
    agents: list[str] = []
    rules: list[tuple[bool, str]] = []
    delay: float | None = None
    collecting_agents = True

    def flush() -> None:
        nonlocal agents, rules, delay
        if agents:
            groups.append(_Group(tuple(agents), tuple(rules), delay))
        agents, rules, delay = [], [], None

    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        field, _, value = line.partition(":")
        field = field.strip().lower()
        value = value.strip()
        if field == "user-agent":
            if not collecting_agents:
                flush()
                collecting_agents = True
            agents.append(value.lower())
        elif field in ("disallow", "allow"):
            collecting_agents = False
            if not agents:
                continue  # rules before any user-agent line are undefined
            if field == "disallow" and not value:
                continue  # empty disallow permits everything
            rules.append((field == "allow", value))
        elif field == "crawl-delay":
            collecting_agents = False
            try:
                delay = float(value)
            except ValueError:
                logger.debug("ignoring bad crawl-delay %r", value)
        elif field == "sitemap":
            if value:
                sitemaps.append(value)
    flush()
    return RobotsPolicy(groups=tuple(groups), sitemap_urls=tuple(sitemaps))


def fetch_robots(base_url: str, fetch, publisher_id: str, delay: float) -> RobotsPolicy:
    """Fetch and parse ``robots.txt`` for the host of ``base_url``.

    ``fetch(url, publisher_id, delay)`` is the polite fetcher callable. 4xx
    or an unreachable host after one retry yields allow-all or deny-all
    respectively; 5xx yields deny-all for this session.
    """
    parts = urlsplit(base_url)
    robots_url = f"{parts.scheme}://{parts.netloc}/robots.txt"
    last_error: Exception | None = None
    for attempt in range(2):
        try:
            result = fetch(robots_url, publisher_id, delay)
        except Exception as exc:
            last_error = exc
            continue
        if 200 <= result.status < 300:
            return parse_robots(result.content.decode("utf-8", errors="replace"))
        if 400 <= result.status < 500:
            return RobotsPolicy.allow_everything()
        logger.warning("robots.txt at %s returned %s; disallowing host", robots_url, result.status)
        return RobotsPolicy.deny_everything()
    logger.warning("robots.txt at %s unreachable (%s); disallowing host", robots_url, last_error)
    return RobotsPolicy.deny_everything()


class RobotsCache:
    """One policy per scheme://host, fetched on first use."""

    def __init__(self) -> None:
        self._policies: dict[str, RobotsPolicy] = {}
        self._lock = threading.Lock()

    def policy_for(self, url: str, fetch, publisher_id: str, delay: float) -> RobotsPolicy:
        parts = urlsplit(url)
        key = f"{parts.scheme}://{parts.netloc}"
        with self._lock:
            cached = self._policies.get(key)
        if cached is not None:
            return cached
        policy = fetch_robots(url, fetch, publisher_id, delay)
        with self._lock:
            return self._policies.setdefault(key, policy)
