"""Gold corpus loading.

One YAML document per article: id, publisher, source URL and the ordered
paragraph list. Paragraphs the annotator marked ``optional`` may be dropped
by the scorer when that improves F1 (summaries, formatting-only text,
third-party notes and other content that is defensible either way).
Headlines, captions and tables are excluded by the annotation guidelines
and never appear in gold paragraphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml


@dataclass(frozen=True)
class GoldParagraph:
    text: str
    optional: bool = False


@dataclass(frozen=True)
class GoldArticle:
    article_id: str
    publisher_id: str
    url: str
    paragraphs: tuple[GoldParagraph, ...]

    def reference_text(self) -> str:
        """Full reference with every optional paragraph kept."""
        return "\n".join(p.text for p in self.paragraphs)


class GoldCorpusError(ValueError):
    """A gold file is malformed; the message names file and field."""


def _load_gold_file(path: Path) -> GoldArticle:
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise GoldCorpusError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise GoldCorpusError(f"{path}: expected a mapping")
    article_id = str(data.get("article_id") or "")
    publisher_id = str(data.get("publisher_id") or "")
    url = str(data.get("url") or "")
    if not article_id:
        raise GoldCorpusError(f"{path}: article_id is required")
    if not publisher_id:
        raise GoldCorpusError(f"{path}: publisher_id is required")
    raw_paragraphs = data.get("paragraphs")
    if not isinstance(raw_paragraphs, list) or not raw_paragraphs:
        raise GoldCorpusError(f"{path}: paragraphs must be a non-empty list")
    paragraphs = []
    for i, raw in enumerate(raw_paragraphs):
        if isinstance(raw, str):
            text, optional = raw, False
        elif isinstance(raw, dict):
            text = str(raw.get("text") or "")
            optional = bool(raw.get("optional", False))
        else:
            raise GoldCorpusError(f"{path}: paragraphs[{i}] must be text or a mapping")
        text = text.strip()
        if not text:
            raise GoldCorpusError(f"{path}: paragraphs[{i}].text is empty")
        if "\n" in text:
            text = " ".join(text.split())
        paragraphs.append(GoldParagraph(text=text, optional=optional))
    return GoldArticle(
        article_id=article_id,
        publisher_id=publisher_id,
        url=url,
        paragraphs=tuple(paragraphs),
    )


def load_gold_dir(gold_dir: str | Path) -> list[GoldArticle]:
    """Load every gold article under a directory, sorted by article id.

    Raises :class:`GoldCorpusError` for malformed files or duplicate ids.
    """
    gold_dir = Path(gold_dir)
    if not gold_dir.is_dir():
        raise GoldCorpusError(f"{gold_dir}: not a directory")
    articles = [_load_gold_file(path) for path in sorted(gold_dir.rglob("*.yaml"))]
    seen: dict[str, GoldArticle] = {}
    for article in articles:
        if article.article_id in seen:
            raise GoldCorpusError(f"duplicate gold article id {article.article_id!r}")
        seen[article.article_id] = article
    return sorted(articles, key=lambda a: a.article_id)
