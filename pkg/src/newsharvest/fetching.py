"""Polite HTTP fetching with a per-publisher rate gate and a request log.

Every request the crawler makes to a publisher (robots.txt, content maps,
article pages) goes through :class:`PoliteFetcher`, which enforces the
minimum interval between request starts to the same publisher and appends
one JSONL line per request to the audit log.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import requests

DEFAULT_USER_AGENT = "newsharvest/0.1 (+https://github.com/newsharvest/newsharvest)"
MAX_REDIRECTS = 5


class FetchError(Exception):
    """Network-level failure (timeout, connection error, too many redirects)."""


@dataclass(frozen=True)
class FetchResult:
    status: int
    content: bytes
    url: str  # final URL after redirects
    content_type: str | None


@dataclass(frozen=True)
class RequestLogEntry:
    url: str
    publisher: str
    start_unix: float
    start_monotonic: float
    status: int | str

    def to_json(self) -> str:
        return json.dumps(
            {
                "url": self.url,
                "publisher": self.publisher,
                "start": datetime.fromtimestamp(self.start_unix, tz=timezone.utc).isoformat(),
                "start_monotonic": self.start_monotonic,
                "status": self.status,
            },
            ensure_ascii=False,
        )


class RequestLog:
    """Thread-safe request audit trail, optionally mirrored to a JSONL file."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.entries: list[RequestLogEntry] = []
        self._lock = threading.Lock()
        self._handle = open(self.path, "a", encoding="utf-8") if self.path else None

    def record(self, entry: RequestLogEntry) -> None:
        with self._lock:
            self.entries.append(entry)
            if self._handle is not None:
                self._handle.write(entry.to_json() + "\n")
                self._handle.flush()

    def close(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None

    def by_publisher(self, publisher: str) -> list[RequestLogEntry]:
        with self._lock:
            return [e for e in self.entries if e.publisher == publisher]


class PoliteFetcher:
    """HTTP client enforcing per-publisher politeness.

    The gate is keyed by publisher id, not host, so a publisher with several
    subdomains is still treated as one server neighbourhood.
    """

    def __init__(
        self,
        user_agent: str = DEFAULT_USER_AGENT,
        timeout: float = 30.0,
        request_log: RequestLog | None = None,
    ):
        self.user_agent = user_agent
        self.timeout = timeout
        self.request_log = request_log or RequestLog()
        self._last_start: dict[str, float] = {}
        self._gate = threading.Lock()
        self._local = threading.local()

    def _session(self) -> requests.Session:
        session = getattr(self._local, "session", None)
        if session is None:
            session = requests.Session()
            session.max_redirects = MAX_REDIRECTS
            session.headers["User-Agent"] = self.user_agent
            self._local.session = session
        return session

    def _wait_for_slot(self, publisher: str, delay: float) -> tuple[float, float]:
        """Block until this publisher's next slot; returns the start stamps."""
        while True:
            with self._gate:
                now = time.monotonic()
                last = self._last_start.get(publisher)
                if last is None or now - last >= delay:
                    self._last_start[publisher] = now
                    return time.time(), now
                pause = delay - (now - last)
            time.sleep(pause)

    def fetch(self, url: str, publisher: str, delay: float = 0.0) -> FetchResult:
        """Politely GET ``url`` on behalf of ``publisher``.

        HTTP error statuses are returned, not raised; network failures raise
        :class:`FetchError`. Every attempt lands in the request log.
        """
        start_unix, start_monotonic = self._wait_for_slot(publisher, delay)
        status: int | str
        try:
            response = self._session().get(url, timeout=self.timeout, allow_redirects=True)
            status = response.status_code
            return FetchResult(
                status=response.status_code,
                content=response.content,
                url=str(response.url),
                content_type=response.headers.get("Content-Type"),
            )
        except requests.RequestException as exc:
            status = f"error:{type(exc).__name__}"
            raise FetchError(f"{url}: {exc}") from exc
        finally:
            self.request_log.record(
                RequestLogEntry(
                    url=url,
                    publisher=publisher,
                    start_unix=start_unix,
                    start_monotonic=start_monotonic,
                    status=status,
                )
            )
