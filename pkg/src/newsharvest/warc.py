"""Streaming WARC reader for gzip-compressed archive files.

Reads member-per-record and whole-file gzip alike (the decompressor is
transparent to member boundaries), holds at most one record body in memory
at a time and writes nothing to disk. Damage tolerance is part of the
contract: a record whose declared length does not line up with the record
boundary is dropped and the reader resynchronizes on the next ``WARC/``
header line; gzip-level corruption or truncation ends the file with a
diagnostic after yielding everything that parsed.
"""

from __future__ import annotations

import gzip
import logging
import zlib
from dataclasses import dataclass
from datetime import datetime
from typing import IO, Iterator

import requests

from .articles import parse_rfc3339

logger = logging.getLogger(__name__)

_BLANK = (b"\r\n", b"\n")


class WarcSourceError(Exception):
    """The WARC file or URL could not be opened."""


@dataclass(frozen=True)
class WarcRecordRef:
    """Identity and HTTP envelope of one response record."""

    warc_path: str
    record_offset: int  # offset in the uncompressed stream
    target_uri: str
    warc_date: datetime
    http_status: int
    content_type: str


class _LineReader:
    """Line/byte reader with offset tracking and line pushback."""

    def __init__(self, fh: IO[bytes]):
        self._fh = fh
        self._pushback: list[bytes] = []
        self.offset = 0

    def readline(self) -> bytes:
        line = self._pushback.pop() if self._pushback else self._fh.readline()
        self.offset += len(line)
        return line

    def push_back(self, line: bytes) -> None:
        self._pushback.append(line)
        self.offset -= len(line)

    def read(self, n: int) -> bytes:
        chunks: list[bytes] = []
        remaining = n
        while remaining > 0 and self._pushback:
            chunk = self._pushback.pop()
            if len(chunk) > remaining:
                self._pushback.append(chunk[remaining:])
                chunk = chunk[:remaining]
            chunks.append(chunk)
            remaining -= len(chunk)
        while remaining > 0:
            chunk = self._fh.read(remaining)
            if not chunk:
                break
            chunks.append(chunk)
            remaining -= len(chunk)
        data = b"".join(chunks)
        self.offset += len(data)
        return data


def _open_raw(location: str, timeout: float) -> tuple[IO[bytes], object]:
    if location.startswith(("http://", "https://")):
        try:
            response = requests.get(
                location,
                stream=True,
                timeout=timeout,
                headers={"Accept-Encoding": "identity"},
            )
        except requests.RequestException as exc:
            raise WarcSourceError(f"{location}: {exc}") from exc
        if response.status_code != 200:
            response.close()
            raise WarcSourceError(f"{location}: HTTP {response.status_code}")
        response.raw.decode_content = False
        return response.raw, response
    try:
        handle = open(location, "rb")
    except OSError as exc:
        raise WarcSourceError(f"{location}: {exc}") from exc
    return handle, handle


def _parse_warc_headers(reader: _LineReader) -> dict[str, str] | None:
    headers: dict[str, str] = {}
    last_key: str | None = None
    while True:
        line = reader.readline()
        if line in _BLANK:
            return headers
        if not line:
            return None  # EOF inside a header block
        if line[:1] in (b" ", b"\t") and last_key:
            headers[last_key] += " " + line.strip().decode("utf-8", "replace")
            continue
        name, sep, value = line.partition(b":")
        if not sep:
            return None  # not a header line; caller resynchronizes
        key = name.decode("ascii", "replace").strip().lower()
        headers[key] = value.strip().decode("utf-8", "replace")
        last_key = key


def _split_http(payload: bytes) -> tuple[int, dict[str, str], bytes] | None:
    for sep, width in ((b"\r\n\r\n", 4), (b"\n\n", 2)):
        cut = payload.find(sep)
        if cut != -1:
            head, body = payload[:cut], payload[cut + width:]
            break
    else:
        return None
    lines = head.split(b"\r\n") if b"\r\n" in head else head.split(b"\n")
    parts = lines[0].split(None, 2)
    if len(parts) < 2 or not parts[0].startswith(b"HTTP/"):
        return None
    try:
        status = int(parts[1])
    except ValueError:
        return None
    http_headers: dict[str, str] = {}
    for raw in lines[1:]:
        name, sep2, value = raw.partition(b":")
        if sep2:
            key = name.decode("ascii", "replace").strip().lower()
            if key not in http_headers:
                http_headers[key] = value.strip().decode("utf-8", "replace")
    return status, http_headers, body


def stream_warc(location: str, *, timeout: float = 30.0) -> Iterator[tuple[WarcRecordRef, bytes]]:
    """Yield ``(record, http_body_bytes)`` for every parseable response
    record in a gzip-compressed WARC file or URL."""
    raw, owner = _open_raw(location, timeout)
    try:
        reader = _LineReader(gzip.GzipFile(fileobj=raw))  # type: ignore[arg-type]
        try:
            yield from _iter_records(location, reader)
            if reader.offset == 0:
                logger.warning("%s: truncated or empty gzip stream: no data decompressed", location)
        except (OSError, EOFError, zlib.error) as exc:
            logger.warning("%s: truncated or corrupt gzip stream: %s", location, exc)
    finally:
        close = getattr(owner, "close", None)
        if close:
            close()


def _iter_records(location: str, reader: _LineReader) -> Iterator[tuple[WarcRecordRef, bytes]]:
    resyncing = False
    while True:
        line = reader.readline()
        if not line:
            return
        if line in _BLANK:
            continue
        if not line.startswith(b"WARC/"):
            if not resyncing:
                logger.warning("%s: corrupt record near offset %d; scanning for next record",
                               location, reader.offset)
                resyncing = True
            continue
        resyncing = False
        record_offset = reader.offset - len(line)

        headers = _parse_warc_headers(reader)
        if headers is None:
            continue
        try:
            content_length = int(headers.get("content-length", ""))
        except ValueError:
            logger.warning("%s: record at offset %d lacks a valid Content-Length; skipped",
                           location, record_offset)
            continue
        payload = reader.read(content_length)
        if len(payload) < content_length:
            logger.warning("%s: truncated record at offset %d; stopping", location, record_offset)
            return

        # Record must be terminated by a blank-line boundary; a mismatch
        # means the declared length was wrong and the record is dropped.
        first = reader.readline()
        boundary_ok = first in _BLANK or not first
        if boundary_ok and first:
            second = reader.readline()
            if second.startswith(b"WARC/"):
                reader.push_back(second)
            elif second not in _BLANK and second:
                reader.push_back(second)
        if not boundary_ok:
            reader.push_back(first)
            logger.warning("%s: record at offset %d has a Content-Length mismatch; skipped",
                           location, record_offset)
            continue

        if headers.get("warc-type") != "response":
            continue
        target_uri = headers.get("warc-target-uri", "")
        date_raw = headers.get("warc-date", "")
        try:
            warc_date = parse_rfc3339(date_raw)
        except ValueError:
            logger.warning("%s: response record at offset %d has invalid WARC-Date %r; skipped",
                           location, record_offset, date_raw)
            continue
        http = _split_http(payload)
        if http is None:
            logger.warning("%s: response record at offset %d has no HTTP status line; skipped",
                           location, record_offset)
            continue
        status, http_headers, body = http
        yield (
            WarcRecordRef(
                warc_path=location,
                record_offset=record_offset,
                target_uri=target_uri,
                warc_date=warc_date,
                http_status=status,
                content_type=http_headers.get("content-type", ""),
            ),
            body,
        )
