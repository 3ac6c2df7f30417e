"""Declarative attribute rules and their evaluation.

A publisher's parser is data, not code: selector and metadata rules are
declared in its registry file, validated at load time and evaluated here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime

from .htmldom import Node
from .selectors import SelectorError, XPathSelector, compile_selector
from .transforms import (
    TransformContext,
    TransformError,
    Value,
    apply_transforms,
    parse_date_value,
    resolve_transform,
)

STRATEGIES = frozenset(["css_selector", "xpath_selector", "meta_key", "ld_path", "constant"])

# Article fields a rule may target.
ATTRIBUTE_TARGETS = frozenset(["title", "authors", "publishing_date", "topics", "free_access", "lang"])

# Generic heuristics a publisher may replace or suppress.
OVERRIDABLE_HEURISTICS = frozenset(["free_access", "language", "ld", "meta"])

_FALSE_TOKENS = frozenset(["false", "no", "0", "locked", "paid", "premium", "subscription", "registered"])
_TRUE_TOKENS = frozenset(["true", "yes", "1", "free", "metered", "public"])


class RuleFailure(Exception):
    """A single attribute rule produced no usable value."""

    def __init__(self, cause: str):
        super().__init__(cause)
        self.cause = cause


@dataclass(frozen=True)
class AttributeRule:
    attribute: str
    strategy: str
    expression: str
    transforms: tuple[str, ...] = ()
    required: bool = True

    def descriptor(self) -> str:
        return f"{self.strategy}:{self.expression}"


@dataclass(frozen=True)
class BodyRules:
    paragraphs: str
    summary: str | None = None
    subheadlines: str | None = None


@dataclass(frozen=True)
class ParserSpec:
    """Complete extraction recipe for one publisher."""

    publisher_id: str
    body: BodyRules
    attribute_rules: tuple[AttributeRule, ...] = ()
    overrides: frozenset[str] = frozenset()
    dayfirst: bool = False

    def transform_context(self) -> TransformContext:
        return TransformContext(dayfirst=self.dayfirst)


def validate_rule(rule: AttributeRule) -> list[str]:
    """Return human-readable violations for one rule (empty when valid)."""
    problems = []
    if rule.attribute not in ATTRIBUTE_TARGETS:
        problems.append(f"unknown attribute target {rule.attribute!r}")
    if rule.strategy not in STRATEGIES:
        problems.append(f"unknown strategy {rule.strategy!r}")
    elif rule.strategy in ("css_selector", "xpath_selector"):
        try:
            compile_selector(rule.expression, rule.strategy)
        except SelectorError as exc:
            problems.append(str(exc))
    elif not rule.expression:
        problems.append(f"{rule.strategy} requires a non-empty expression")
    for spec in rule.transforms:
        try:
            resolve_transform(spec)
        except TransformError as exc:
            problems.append(str(exc))
    return problems


def validate_parser_spec(spec: ParserSpec) -> list[str]:
    """Validate body selectors, rules, override names and uniqueness."""
    problems = []
    if not spec.body.paragraphs:
        problems.append("body.paragraphs selector is required")
    for name, expression in (
        ("body.paragraphs", spec.body.paragraphs),
        ("body.summary", spec.body.summary),
        ("body.subheadlines", spec.body.subheadlines),
    ):
        if not expression:
            continue
        try:
            selector = compile_selector(expression)
        except SelectorError as exc:
            problems.append(f"{name}: {exc}")
            continue
        if isinstance(selector, XPathSelector) and selector.returns_text:
            problems.append(f"{name}: body selectors must select elements, not text or attributes")
    seen: set[str] = set()
    for rule in spec.attribute_rules:
        if rule.attribute in seen:
            problems.append(f"duplicate rule for attribute {rule.attribute!r}")
        seen.add(rule.attribute)
        problems.extend(f"rule {rule.attribute!r}: {p}" for p in validate_rule(rule))
    for name in spec.overrides:
        if name not in OVERRIDABLE_HEURISTICS:
            problems.append(f"unknown override {name!r} (known: {', '.join(sorted(OVERRIDABLE_HEURISTICS))})")
    return problems


def _ld_walk(value: object, segments: list[str]) -> object | None:
    if not segments:
        return value
    head, rest = segments[0], segments[1:]
    if isinstance(value, dict):
        if head in value:
            return _ld_walk(value[head], rest)
        return None
    if isinstance(value, list):
        if head.isdigit():
            index = int(head)
            return _ld_walk(value[index], rest) if index < len(value) else None
        collected = []
        for item in value:
            hit = _ld_walk(item, segments)
            if hit is None:
                continue
            if isinstance(hit, list):
                collected.extend(hit)
            else:
                collected.append(hit)
        return collected or None
    return None


def ld_lookup(ld: list[dict], path: str) -> object | None:
    """Dot-path lookup over JSON-LD objects in document order; the first
    object where the whole path resolves wins."""
    segments = [s for s in path.split(".") if s]
    if not segments:
        return None
    for obj in ld:
        hit = _ld_walk(obj, segments)
        if hit is not None:
            return hit
    return None


def _is_empty(value: Value) -> bool:
    return value is None or value == "" or value == []


def evaluate_rule(
    root: Node | None,
    ld: list[dict],
    meta: dict[str, str],
    rule: AttributeRule,
    ctx: TransformContext,
) -> Value:
    """Evaluate one rule and its transform chain.

    Raises :class:`RuleFailure` when a required rule yields nothing or a
    transform rejects the value.
    """
    value: Value
    if rule.strategy in ("css_selector", "xpath_selector"):
        if root is None:
            raise RuleFailure("no parsed document")
        selected = compile_selector(rule.expression, rule.strategy).select(root)
        texts = [item if isinstance(item, str) else item.text() for item in selected]
        value = [t for t in texts if t]
    elif rule.strategy == "meta_key":
        value = meta.get(rule.expression)
    elif rule.strategy == "ld_path":
        value = ld_lookup(ld, rule.expression)  # type: ignore[assignment]
    elif rule.strategy == "constant":
        value = rule.expression
    else:  # pragma: no cover - blocked by validation
        raise RuleFailure(f"unknown strategy {rule.strategy!r}")

    if _is_empty(value):
        if rule.required:
            raise RuleFailure("no value matched")
        return None
    try:
        value = apply_transforms(value, rule.transforms, ctx)
    except TransformError as exc:
        raise RuleFailure(str(exc)) from exc
    if _is_empty(value) and rule.required:
        raise RuleFailure("transforms produced no value")
    return value


def _first(value: Value) -> Value:
    if isinstance(value, list):
        return value[0] if value else None
    return value


def coerce_attribute(attribute: str, value: Value, ctx: TransformContext) -> object:
    """Coerce a rule result into the Article field type.

    Raises :class:`RuleFailure` when the value cannot represent the field.
    """
    if _is_empty(value):
        return None
    if attribute == "title":
        first = _first(value)
        if not isinstance(first, str):
            raise RuleFailure(f"title expects text, got {type(first).__name__}")
        return first
    if attribute in ("authors", "topics"):
        items = value if isinstance(value, list) else [value]
        bad = [v for v in items if not isinstance(v, str)]
        if bad:
            raise RuleFailure(f"{attribute} expects text values, got {type(bad[0]).__name__}")
        return tuple(items)
    if attribute == "publishing_date":
        first = _first(value)
        if isinstance(first, datetime):
            return first
        if isinstance(first, str):
            try:
                return parse_date_value(first, dayfirst=ctx.dayfirst)
            except TransformError as exc:
                raise RuleFailure(str(exc)) from exc
        raise RuleFailure(f"publishing_date expects a date, got {type(first).__name__}")
    if attribute == "free_access":
        first = _first(value)
        if isinstance(first, bool):
            return first
        if isinstance(first, str):
            token = first.strip().lower()
            if token in _FALSE_TOKENS:
                return False
            if token in _TRUE_TOKENS:
                return True
            raise RuleFailure(f"unrecognized access token {first!r}")
        raise RuleFailure(f"free_access expects a boolean or token, got {type(first).__name__}")
    if attribute == "lang":
        first = _first(value)
        if not isinstance(first, str):
            raise RuleFailure(f"lang expects text, got {type(first).__name__}")
        return first.strip().lower() or None
    raise RuleFailure(f"unknown attribute {attribute!r}")


@dataclass
class RuleOutcome:
    """Mutable collection bucket used while a page is being extracted."""

    values: dict[str, object] = field(default_factory=dict)
    failures: list[tuple[str, str, str]] = field(default_factory=list)  # attribute, rule, cause
