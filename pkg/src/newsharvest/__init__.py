"""newsharvest: polite news crawling with per-publisher extraction rules.

The package crawls live newspaper sites (robots.txt, sitemaps, RSS) and
CC-NEWS style WARC archives, extracts structured article text using
hand-tailored per-publisher selector rules, and ships a ROUGE-LSum harness
for scoring extraction quality against hand-annotated gold corpora.
"""

from .articles import (
    Article,
    ArticleBody,
    AttributeFailure,
    BlockKind,
    ExtractionError,
    HtmlRecord,
    Section,
    TextBlock,
    from_jsonl_record,
    plaintext,
    render_preview,
    to_jsonl_record,
)
from .ccnews import WarcSourceConfig, crawl_archive, enumerate_warc_paths
from .crawler import CrawlParams, crawl
from .extraction import extract, extract_body
from .goldset import GoldArticle, GoldParagraph, load_gold_dir
from .registry import (
    PublisherSpec,
    Registry,
    RegistryValidationError,
    SourceDescriptor,
    default_registry_dir,
    load_registry,
)
from .report import AggregateReport, evaluate_corpus
from .rouge import RougeScore, rouge_lsum, score_with_optionals, tokenize, union_lcs
from .rules import AttributeRule, BodyRules, ParserSpec
from .warc import WarcRecordRef, stream_warc

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "Article",
    "ArticleBody",
    "AttributeFailure",
    "AttributeRule",
    "BlockKind",
    "BodyRules",
    "CrawlParams",
    "ExtractionError",
    "GoldArticle",
    "GoldParagraph",
    "HtmlRecord",
    "ParserSpec",
    "PublisherSpec",
    "Registry",
    "RegistryValidationError",
    "RougeScore",
    "Section",
    "SourceDescriptor",
    "TextBlock",
    "WarcRecordRef",
    "WarcSourceConfig",
    "crawl",
    "crawl_archive",
    "default_registry_dir",
    "enumerate_warc_paths",
    "evaluate_corpus",
    "extract",
    "extract_body",
    "from_jsonl_record",
    "load_gold_dir",
    "load_registry",
    "plaintext",
    "render_preview",
    "rouge_lsum",
    "score_with_optionals",
    "stream_warc",
    "to_jsonl_record",
    "tokenize",
    "union_lcs",
]
