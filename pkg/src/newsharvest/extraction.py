"""The extraction engine: HtmlRecord + parser spec -> Article.

Generic heuristics run first (JSON-LD, meta tags, paywall flag, language
detection), publisher rules fill the bespoke attributes, and every
per-attribute failure is collected instead of raised: callers always get an
Article back, with ``exception`` describing what went wrong.
"""

from __future__ import annotations

import logging

from .articles import (
    Article,
    ArticleBody,
    AttributeFailure,
    BlockKind,
    ExtractionError,
    HtmlRecord,
    Section,
    TextBlock,
    plaintext,
)
from .heuristics import Diagnostics, detect_free_access, parse_ld, parse_meta
from .htmldom import Node, decode_html, parse_html
from .langid import detect_language
from .rules import ParserSpec, RuleFailure, coerce_attribute, evaluate_rule
from .selectors import compile_selector

logger = logging.getLogger(__name__)


def _select_nodes(root: Node, expression: str) -> list[Node]:
    selected = compile_selector(expression).select(root)
    return [item for item in selected if isinstance(item, Node)]


def extract_body(root: Node, body_rules) -> ArticleBody:
    """Evaluate the three body selectors and rebuild the article structure.

    Paragraphs are split into sections at each subheadline position, all in
    document order. Raises :class:`RuleFailure` when the paragraph selector
    matches nothing.
    """
    summary_nodes = _select_nodes(root, body_rules.summary) if body_rules.summary else []
    paragraph_nodes = _select_nodes(root, body_rules.paragraphs)
    subheadline_nodes = _select_nodes(root, body_rules.subheadlines) if body_rules.subheadlines else []

    if not paragraph_nodes:
        raise RuleFailure("paragraph selector matched no elements")

    subheadline_ids = {id(n) for n in subheadline_nodes}
    summary = tuple(
        TextBlock(BlockKind.SUMMARY, text)
        for node in summary_nodes
        if (text := node.text())
    )

    flow: list[tuple[Node, bool]] = [(n, True) for n in subheadline_nodes]
    flow += [(n, False) for n in paragraph_nodes if id(n) not in subheadline_ids]
    flow.sort(key=lambda pair: pair[0].order)

    sections: list[Section] = []
    headline: TextBlock | None = None
    paragraphs: list[TextBlock] = []
    for node, is_subheadline in flow:
        text = node.text()
        if not text:
            continue
        if is_subheadline:
            if headline is not None or paragraphs:
                sections.append(Section(headline, tuple(paragraphs)))
            headline = TextBlock(BlockKind.SUBHEADLINE, text)
            paragraphs = []
        else:
            paragraphs.append(TextBlock(BlockKind.PARAGRAPH, text))
    if headline is not None or paragraphs:
        sections.append(Section(headline, tuple(paragraphs)))

    if not any(section.paragraphs for section in sections):
        raise RuleFailure("paragraph selector matched only empty elements")
    return ArticleBody(summary=summary, sections=tuple(sections))


def extract(record: HtmlRecord, spec: ParserSpec, diagnostics: Diagnostics | None = None) -> Article:
    """Extract an Article from a downloaded page.

    Never raises: catastrophic parse problems and per-attribute failures are
    materialized in ``Article.exception`` and extraction of the remaining
    attributes continues.
    """
    try:
        return _extract(record, spec, diagnostics)
    except Exception as exc:  # defensive: extraction must be total
        logger.exception("unexpected extraction failure for %s", record.url)
        return Article(
            html=record,
            exception=ExtractionError(
                failures=(AttributeFailure("article", "extract", f"internal error: {exc}"),)
            ),
        )


def _extract(record: HtmlRecord, spec: ParserSpec, diagnostics: Diagnostics | None) -> Article:
    failures: list[AttributeFailure] = []
    values: dict[str, object] = {}
    ctx = spec.transform_context()

    try:
        root: Node | None = parse_html(decode_html(record.raw_html))
    except Exception as exc:
        root = None
        failures.append(AttributeFailure("html", "parse", f"unparseable document: {exc}"))

    ld: list[dict] = []
    meta: dict[str, str] = {}
    if root is not None:
        if "ld" not in spec.overrides:
            ld = parse_ld(root, diagnostics)
        if "meta" not in spec.overrides:
            meta = parse_meta(root, diagnostics)

    body: ArticleBody | None = None
    if root is not None:
        try:
            body = extract_body(root, spec.body)
        except RuleFailure as exc:
            failures.append(AttributeFailure("body", f"selectors:{spec.body.paragraphs}", exc.cause))
    else:
        failures.append(AttributeFailure("body", "selectors", "no parsed document"))

    for rule in spec.attribute_rules:
        try:
            raw = evaluate_rule(root, ld, meta, rule, ctx)
            coerced = coerce_attribute(rule.attribute, raw, ctx)
            if coerced is not None:
                values[rule.attribute] = coerced
        except RuleFailure as exc:
            failures.append(AttributeFailure(rule.attribute, rule.descriptor(), exc.cause))

    if "free_access" not in spec.overrides:
        values["free_access"] = detect_free_access(ld)

    text = plaintext(body) if body is not None else ""
    if "language" not in spec.overrides and "lang" not in values:
        lang = detect_language(text)
        if lang is not None:
            values["lang"] = lang

    return Article(
        html=record,
        title=values.get("title"),  # type: ignore[arg-type]
        body=body,
        authors=values.get("authors", ()),  # type: ignore[arg-type]
        publishing_date=values.get("publishing_date"),  # type: ignore[arg-type]
        topics=values.get("topics", ()),  # type: ignore[arg-type]
        free_access=values.get("free_access", True),  # type: ignore[arg-type]
        ld=tuple(ld),
        meta=meta,
        lang=values.get("lang"),  # type: ignore[arg-type]
        exception=ExtractionError(failures=tuple(failures)) if failures else None,
    )
