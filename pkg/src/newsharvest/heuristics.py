"""Generic extraction heuristics shared by all publishers.

These run on every page unless a publisher explicitly overrides them:
JSON-LD scripts, ``<meta>`` tags and the schema.org paywall flag. They are
deliberately forgiving; a broken script block is skipped and counted, never
fatal.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .htmldom import Node

logger = logging.getLogger(__name__)


@dataclass
class Diagnostics:
    """Non-fatal extraction observations for one page."""

    ld_skipped: int = 0
    meta_collisions: list[str] = field(default_factory=list)


def _flatten_ld(value: object, out: list[dict]) -> None:
    if isinstance(value, list):
        for item in value:
            _flatten_ld(item, out)
    elif isinstance(value, dict):
        graph = value.get("@graph")
        if isinstance(graph, list):
            _flatten_ld(graph, out)
        else:
            out.append(value)


def parse_ld(root: Node, diagnostics: Diagnostics | None = None) -> list[dict]:
    """Collect JSON-LD objects from ``<script type="application/ld+json">``.

    Top-level arrays and ``@graph`` arrays are flattened; blocks that fail to
    parse are skipped and counted in the diagnostics.
    """
    objects: list[dict] = []
    for node in root.iter():
        if node.tag != "script":
            continue
        if (node.attrs.get("type") or "").strip().lower() != "application/ld+json":
            continue
        payload = node.raw_text().strip()
        if not payload:
            continue
        try:
            data = json.loads(payload)
        except json.JSONDecodeError as exc:
            if diagnostics is not None:
                diagnostics.ld_skipped += 1
            logger.debug("skipping malformed ld+json block: %s", exc)
            continue
        _flatten_ld(data, objects)
    return objects


def parse_meta(root: Node, diagnostics: Diagnostics | None = None) -> dict[str, str]:
    """Map ``<meta>`` ``name``/``property`` attributes to their ``content``.

    The first occurrence of a key wins; later collisions are recorded.
    """
    meta: dict[str, str] = {}
    for node in root.iter():
        if node.tag != "meta":
            continue
        key = node.attrs.get("name") or node.attrs.get("property")
        content = node.attrs.get("content")
        if not key or content is None:
            continue
        if key in meta:
            if diagnostics is not None:
                diagnostics.meta_collisions.append(key)
            logger.debug("duplicate meta key %r; keeping first value", key)
            continue
        meta[key] = content
    return meta


def detect_free_access(ld: list[dict]) -> bool:
    """Optimistic paywall check: free unless some JSON-LD object declares
    ``isAccessibleForFree`` false (boolean or string spelling)."""
    for obj in ld:
        value = obj.get("isAccessibleForFree")
        if value is False or (isinstance(value, str) and value.strip().lower() == "false"):
            return False
    return True
