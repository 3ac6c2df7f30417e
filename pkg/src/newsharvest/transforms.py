"""Closed registry of value transforms available to extraction rules.

Rules reference transforms by name (``strip``, ``split_on(,)``, ...) and the
registry is the complete set; unknown names are rejected when a publisher
file is loaded. Every transform is a pure function of the incoming value
plus a small context (publisher locale hints), so rules stay declarative
and individually testable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from typing import Callable

from dateutil import parser as date_parser

from .articles import normalize_text

Value = str | list | datetime | bool | None


class TransformError(ValueError):
    """A transform could not be applied to its input value."""


@dataclass(frozen=True)
class TransformContext:
    """Locale hints for transforms. ``dayfirst`` resolves ambiguous numeric
    dates (publisher country convention)."""

    dayfirst: bool = False


def parse_date_value(value: str, dayfirst: bool = False) -> datetime:
    """Parse a publisher timestamp into an aware UTC datetime.

    Accepts RFC 3339, RFC 2822 and the common publisher formats handled by
    dateutil; naive results are assumed to be UTC.
    """
    text = value.strip()
    if not text:
        raise TransformError("empty date string")
    dt: datetime | None = None
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        pass
    if dt is None:
        try:
            dt = parsedate_to_datetime(text)
        except (TypeError, ValueError):
            pass
    if dt is None:
        try:
            dt = date_parser.parse(text, dayfirst=dayfirst)
        except (ValueError, OverflowError) as exc:
            raise TransformError(f"unparseable date {value!r}: {exc}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _map_strings(value: Value, fn: Callable[[str], str], name: str) -> Value:
    if isinstance(value, str):
        return fn(value)
    if isinstance(value, list):
        return [fn(v) if isinstance(v, str) else v for v in value]
    raise TransformError(f"{name} expects a string or list, got {type(value).__name__}")


def _strip(value: Value, ctx: TransformContext) -> Value:
    return _map_strings(value, str.strip, "strip")


def _normalize_whitespace(value: Value, ctx: TransformContext) -> Value:
    return _map_strings(value, normalize_text, "normalize_whitespace")


def _split_on(sep: str) -> Callable[[Value, TransformContext], Value]:
    if not sep:
        raise TransformError("split_on requires a separator argument")

    def split(value: Value, ctx: TransformContext) -> Value:
        if isinstance(value, str):
            items: list[str] = [value]
        elif isinstance(value, list):
            items = [v for v in value if isinstance(v, str)]
        else:
            raise TransformError(f"split_on expects a string or list, got {type(value).__name__}")
        out: list[str] = []
        for item in items:
            out.extend(part.strip() for part in item.split(sep) if part.strip())
        return out

    return split


def _parse_date(value: Value, ctx: TransformContext) -> Value:
    if isinstance(value, datetime):
        return value if value.tzinfo else value.replace(tzinfo=timezone.utc)
    if isinstance(value, str):
        return parse_date_value(value, dayfirst=ctx.dayfirst)
    if isinstance(value, list):
        return [_parse_date(v, ctx) for v in value]
    raise TransformError(f"parse_date expects a string, got {type(value).__name__}")


def _dedupe(value: Value, ctx: TransformContext) -> Value:
    if not isinstance(value, list):
        return value
    seen: set = set()
    out = []
    for v in value:
        key = v if isinstance(v, (str, bool, int, float)) else repr(v)
        if key not in seen:
            seen.add(key)
            out.append(v)
    return out


_LANG_SEP = re.compile(r"[-_]")


def _lowercase_lang(value: Value, ctx: TransformContext) -> Value:
    def to_lang(text: str) -> str:
        return _LANG_SEP.split(text.strip().lower())[0]

    return _map_strings(value, to_lang, "lowercase_lang")


def _join_comma(value: Value, ctx: TransformContext) -> Value:
    if isinstance(value, list):
        return ", ".join(str(v) for v in value)
    return value


# name -> (factory takes an argument?, implementation)
_REGISTRY: dict[str, tuple[bool, Callable]] = {
    "strip": (False, _strip),
    "normalize_whitespace": (False, _normalize_whitespace),
    "split_on": (True, _split_on),
    "parse_date": (False, _parse_date),
    "dedupe": (False, _dedupe),
    "lowercase_lang": (False, _lowercase_lang),
    "join_comma": (False, _join_comma),
}

_TRANSFORM_SPEC = re.compile(r"^([a-z_]+)(?:\((.*)\))?$")


def transform_names() -> frozenset[str]:
    return frozenset(_REGISTRY)


def resolve_transform(spec: str) -> Callable[[Value, TransformContext], Value]:
    """Resolve a transform spec like ``strip`` or ``split_on(,)``.

    Raises :class:`TransformError` for unknown names or bad arguments, which
    registry loading reports as configuration errors.
    """
    match = _TRANSFORM_SPEC.match(spec.strip())
    if not match:
        raise TransformError(f"malformed transform spec: {spec!r}")
    name, arg = match.group(1), match.group(2)
    if name not in _REGISTRY:
        raise TransformError(f"unknown transform: {name!r}")
    takes_arg, impl = _REGISTRY[name]
    if takes_arg:
        if arg is None:
            raise TransformError(f"transform {name!r} requires an argument")
        return impl(arg)
    if arg is not None:
        raise TransformError(f"transform {name!r} takes no argument")
    return impl


def apply_transforms(value: Value, specs: tuple[str, ...], ctx: TransformContext) -> Value:
    """Apply a transform chain left to right."""
    for spec in specs:
        value = resolve_transform(spec)(value, ctx)
    return value
