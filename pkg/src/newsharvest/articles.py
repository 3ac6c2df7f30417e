"""Article data model: text blocks, structured bodies, previews and JSONL records.

Everything in this module is immutable after construction and safe to share
between worker threads. The JSONL schema produced by :func:`to_jsonl_record`
is the interchange format used by the crawlers and the evaluation harness.
"""

from __future__ import annotations

import base64
import enum
import json
import re
import unicodedata
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Iterator

_WHITESPACE_RUN = re.compile(r"\s+")

PREVIEW_SNIPPET_CHARS = 240


def normalize_text(text: str) -> str:
    """NFC-normalize, collapse whitespace runs to single spaces and trim."""
    return _WHITESPACE_RUN.sub(" ", unicodedata.normalize("NFC", text)).strip()


def rfc3339(dt: datetime) -> str:
    """Format an aware datetime as an RFC 3339 UTC timestamp."""
    if dt.tzinfo is None:
        raise ValueError("naive datetime; timestamps must be timezone-aware")
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


class BlockKind(str, enum.Enum):
    SUMMARY = "summary"
    PARAGRAPH = "paragraph"
    SUBHEADLINE = "subheadline"


@dataclass(frozen=True)
class TextBlock:
    """One block of article text. ``text`` must already be normalized."""

    kind: BlockKind
    text: str

    def __post_init__(self) -> None:
        if not self.text or self.text != normalize_text(self.text):
            raise ValueError(f"block text not normalized or empty: {self.text!r}")


@dataclass(frozen=True)
class Section:
    """A run of paragraphs, optionally introduced by a subheadline."""

    headline: TextBlock | None
    paragraphs: tuple[TextBlock, ...]

    def __post_init__(self) -> None:
        if self.headline is None and not self.paragraphs:
            raise ValueError("section without headline must contain paragraphs")
        if self.headline is not None and self.headline.kind is not BlockKind.SUBHEADLINE:
            raise ValueError("section headline must be a subheadline block")
        for p in self.paragraphs:
            if p.kind is not BlockKind.PARAGRAPH:
                raise ValueError("section paragraphs must be paragraph blocks")


@dataclass(frozen=True)
class ArticleBody:
    """Ordered article structure: summary blocks followed by sections.

    Only the first section may lack a headline; it holds paragraphs that
    appear before the first subheadline in the source document.
    """

    summary: tuple[TextBlock, ...] = ()
    sections: tuple[Section, ...] = ()

    def __post_init__(self) -> None:
        for s in self.summary:
            if s.kind is not BlockKind.SUMMARY:
                raise ValueError("summary entries must be summary blocks")
        for i, section in enumerate(self.sections):
            if i > 0 and section.headline is None:
                raise ValueError("only the first section may lack a headline")

    def blocks(self) -> Iterator[TextBlock]:
        """All text blocks in document order."""
        yield from self.summary
        for section in self.sections:
            if section.headline is not None:
                yield section.headline
            yield from section.paragraphs

    def __bool__(self) -> bool:
        return bool(self.summary) or bool(self.sections)


@dataclass(frozen=True)
class HtmlRecord:
    """A downloaded page: raw HTML plus its provenance.

    ``raw_html`` keeps the payload byte-exact: it is a ``str`` when the
    source decoded cleanly and ``bytes`` otherwise. ``source_id`` is the
    publisher id for forward crawls and the WARC path for archive crawls.
    """

    raw_html: str | bytes
    url: str
    crawl_time: datetime
    source_id: str

    def __post_init__(self) -> None:
        if not self.url.startswith(("http://", "https://")):
            raise ValueError(f"url must be absolute http(s): {self.url!r}")
        if not self.source_id:
            raise ValueError("source_id must be non-empty")
        if self.crawl_time.tzinfo is None:
            raise ValueError("crawl_time must be timezone-aware")


@dataclass(frozen=True)
class AttributeFailure:
    """One failed extraction rule: which attribute, which rule, and why."""

    attribute: str
    rule: str
    cause: str


@dataclass(frozen=True)
class ExtractionError:
    """Aggregated per-attribute extraction failures for one article."""

    failures: tuple[AttributeFailure, ...]

    def __str__(self) -> str:
        return "; ".join(f"{f.attribute}: {f.cause}" for f in self.failures)


def _clean_str_tuple(values: tuple[str, ...]) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for v in values:
        if v and v not in seen:
            seen.add(v)
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class Article:
    """A fully extracted news article.

    ``exception`` is set if and only if at least one attribute rule failed;
    successfully extracted attributes are still populated in that case.
    """

    html: HtmlRecord
    title: str | None = None
    body: ArticleBody | None = None
    authors: tuple[str, ...] = ()
    publishing_date: datetime | None = None
    topics: tuple[str, ...] = ()
    free_access: bool = True
    ld: tuple[dict, ...] = ()
    meta: dict[str, str] = field(default_factory=dict)
    lang: str | None = None
    exception: ExtractionError | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "authors", _clean_str_tuple(tuple(self.authors)))
        object.__setattr__(self, "topics", _clean_str_tuple(tuple(self.topics)))
        if self.publishing_date is not None and self.publishing_date.tzinfo is None:
            raise ValueError("publishing_date must be timezone-aware")

    @property
    def plaintext(self) -> str:
        return plaintext(self.body) if self.body is not None else ""

    @property
    def complete(self) -> bool:
        return self.exception is None

    def without_html(self) -> "Article":
        """Copy with the raw HTML payload dropped (keeps provenance)."""
        return replace(self, html=replace(self.html, raw_html=""))

    def __str__(self) -> str:
        return render_preview(self)


def plaintext(body: ArticleBody) -> str:
    """Render a body as plain text: one block per line, blocks separated by
    a blank line. Empty body renders as the empty string."""
    return "\n\n".join(block.text for block in body.blocks())


def render_preview(article: Article) -> str:
    """Human-readable overview: title, a text snippet capped at
    ``PREVIEW_SNIPPET_CHARS`` characters, origin URL, source and crawl time."""
    title = article.title if article.title else "<no title>"
    text = article.plaintext
    if not text:
        snippet = "<no body>"
    elif len(text) > PREVIEW_SNIPPET_CHARS:
        snippet = text[:PREVIEW_SNIPPET_CHARS] + "[...]"
    else:
        snippet = text
    return (
        f"{title}\n"
        f"{snippet}\n"
        f"- URL: {article.html.url}\n"
        f"- From: {article.html.source_id} ({rfc3339(article.html.crawl_time)})"
    )


class RecordParseError(ValueError):
    """JSONL line is not valid JSON. ``offset`` is the failing byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class RecordValidationError(ValueError):
    """JSONL record violates the article schema. ``field`` names the culprit."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"field {field_name!r}: {message}")
        self.field = field_name


def _body_to_json(body: ArticleBody | None) -> dict | None:
    if body is None:
        return None
    return {
        "summary": [b.text for b in body.summary],
        "sections": [
            {
                "headline": s.headline.text if s.headline else None,
                "paragraphs": [p.text for p in s.paragraphs],
            }
            for s in body.sections
        ],
    }


def to_jsonl_record(article: Article, include_html: bool = False) -> str:
    """Serialize an article to one JSON line.

    ``raw_html`` is embedded only when ``include_html`` is set; byte payloads
    that are not valid UTF-8 are base64-encoded and flagged.
    """
    record: dict[str, Any] = {
        "title": article.title,
        "body": _body_to_json(article.body),
        "authors": list(article.authors),
        "publishing_date": rfc3339(article.publishing_date) if article.publishing_date else None,
        "topics": list(article.topics),
        "free_access": article.free_access,
        "ld": list(article.ld),
        "meta": dict(article.meta),
        "lang": article.lang,
        "url": article.html.url,
        "source_id": article.html.source_id,
        "crawl_time": rfc3339(article.html.crawl_time),
        "exception": None,
    }
    if article.exception is not None:
        record["exception"] = {
            "failures": [
                {"attribute": f.attribute, "rule": f.rule, "cause": f.cause}
                for f in article.exception.failures
            ]
        }
    if include_html:
        raw = article.html.raw_html
        if isinstance(raw, bytes):
            record["raw_html"] = base64.b64encode(raw).decode("ascii")
            record["raw_html_base64"] = True
        else:
            record["raw_html"] = raw
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def _expect(record: dict, key: str, types: tuple[type, ...], schema_name: str, required: bool = True):
    if key not in record or record[key] is None:
        if required:
            raise RecordValidationError(schema_name, "missing required field")
        return None
    value = record[key]
    if not isinstance(value, types):
        raise RecordValidationError(schema_name, f"expected {'/'.join(t.__name__ for t in types)}")
    return value


def _body_from_json(data: Any) -> ArticleBody | None:
    if data is None:
        return None
    if not isinstance(data, dict):
        raise RecordValidationError("body", "expected object")
    try:
        summary = tuple(TextBlock(BlockKind.SUMMARY, t) for t in data.get("summary", ()))
        sections = []
        for s in data.get("sections", ()):
            headline = s.get("headline")
            sections.append(
                Section(
                    headline=TextBlock(BlockKind.SUBHEADLINE, headline) if headline else None,
                    paragraphs=tuple(TextBlock(BlockKind.PARAGRAPH, t) for t in s.get("paragraphs", ())),
                )
            )
        return ArticleBody(summary=summary, sections=tuple(sections))
    except (ValueError, TypeError, AttributeError) as exc:
        raise RecordValidationError("body", str(exc)) from exc


def _str_list(record: dict, key: str) -> tuple[str, ...]:
    value = record.get(key, [])
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise RecordValidationError(key, "expected list of strings")
    return tuple(value)


def from_jsonl_record(line: str) -> Article:
    """Parse one JSONL line back into an :class:`Article`.

    Raises :class:`RecordParseError` for malformed JSON and
    :class:`RecordValidationError` when the schema is violated.
    """
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(exc.msg, exc.pos) from exc
    if not isinstance(record, dict):
        raise RecordValidationError("<root>", "expected a JSON object")

    url = _expect(record, "url", (str,), "html.url")
    source_id = _expect(record, "source_id", (str,), "html.source_id")
    crawl_raw = _expect(record, "crawl_time", (str,), "html.crawl_time")
    try:
        crawl_time = parse_rfc3339(crawl_raw)
    except ValueError as exc:
        raise RecordValidationError("html.crawl_time", str(exc)) from exc

    raw_html: str | bytes = record.get("raw_html") or ""
    if record.get("raw_html_base64"):
        try:
            raw_html = base64.b64decode(raw_html, validate=True)
        except Exception as exc:
            raise RecordValidationError("raw_html", f"invalid base64: {exc}") from exc

    published = None
    if record.get("publishing_date") is not None:
        value = _expect(record, "publishing_date", (str,), "publishing_date")
        try:
            published = parse_rfc3339(value)
        except ValueError as exc:
            raise RecordValidationError("publishing_date", str(exc)) from exc

    exception = None
    if record.get("exception") is not None:
        exc_data = _expect(record, "exception", (dict,), "exception")
        failures = exc_data.get("failures")
        if not isinstance(failures, list):
            raise RecordValidationError("exception.failures", "expected list")
        exception = ExtractionError(
            failures=tuple(
                AttributeFailure(
                    attribute=str(f.get("attribute", "")),
                    rule=str(f.get("rule", "")),
                    cause=str(f.get("cause", "")),
                )
                for f in failures
            )
        )

    ld = record.get("ld", [])
    if not isinstance(ld, list):
        raise RecordValidationError("ld", "expected list")
    meta = record.get("meta", {})
    if not isinstance(meta, dict):
        raise RecordValidationError("meta", "expected object")

    try:
        html = HtmlRecord(raw_html=raw_html, url=url, crawl_time=crawl_time, source_id=source_id)
    except ValueError as exc:
        raise RecordValidationError("html.url", str(exc)) from exc

    title = record.get("title")
    if title is not None and not isinstance(title, str):
        raise RecordValidationError("title", "expected string")
    lang = record.get("lang")
    if lang is not None and not isinstance(lang, str):
        raise RecordValidationError("lang", "expected string")
    free_access = record.get("free_access", True)
    if not isinstance(free_access, bool):
        raise RecordValidationError("free_access", "expected boolean")

    return Article(
        html=html,
        title=title,
        body=_body_from_json(record.get("body")),
        authors=_str_list(record, "authors"),
        publishing_date=published,
        topics=_str_list(record, "topics"),
        free_access=free_access,
        ld=tuple(ld),
        meta={str(k): str(v) for k, v in meta.items()},
        lang=lang,
        exception=exception,
    )
