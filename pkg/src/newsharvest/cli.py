"""Command line interface.

Subcommands: ``crawl`` (live sites), ``cc-news`` (WARC archives),
``evaluate`` (score predictions against a gold corpus) and
``list-publishers``. Human-readable previews go to stdout by default;
``--format jsonl`` switches to machine output, and diagnostics always go to
stderr so pipelines stay composable.

Exit codes for the crawl commands: 0 when at least one article was
produced, 2 when the crawl ran but produced nothing, 1 on fatal errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterator, Sequence

import yaml

from .articles import Article, from_jsonl_record, render_preview, to_jsonl_record
from .ccnews import WarcSourceConfig, crawl_archive
from .crawler import CrawlParams, crawl
from .fetching import DEFAULT_USER_AGENT, RequestLog
from .goldset import GoldCorpusError, load_gold_dir
from .registry import PublisherSpec, Registry, RegistryValidationError, default_registry_dir, load_registry
from .report import evaluate_corpus, render_table, report_to_json
from .warc import WarcSourceError

logger = logging.getLogger(__name__)

ENV_PREFIX = "NEWSHARVEST_"


@dataclass(frozen=True)
class CliConfig:
    user_agent: str = DEFAULT_USER_AGENT
    default_delay: float = 1.0
    timeout: float = 30.0
    log_level: str = "warning"


def _load_config_file(path: str | None) -> dict:
    candidate = path or os.environ.get(ENV_PREFIX + "CONFIG")
    if not candidate:
        return {}
    data = yaml.safe_load(Path(candidate).read_text(encoding="utf-8"))
    return data if isinstance(data, dict) else {}


def resolve_config(args: argparse.Namespace) -> CliConfig:
    """Layer configuration: defaults, then config file, then environment,
    then command line flags (later wins)."""
    merged: dict = {}
    merged.update(_load_config_file(getattr(args, "config", None)))
    env_map = {
        "user_agent": os.environ.get(ENV_PREFIX + "USER_AGENT"),
        "default_delay": os.environ.get(ENV_PREFIX + "DELAY"),
        "timeout": os.environ.get(ENV_PREFIX + "TIMEOUT"),
        "log_level": os.environ.get(ENV_PREFIX + "LOG_LEVEL"),
    }
    merged.update({k: v for k, v in env_map.items() if v is not None})
    flag_map = {
        "user_agent": getattr(args, "user_agent", None),
        "default_delay": getattr(args, "delay", None),
        "timeout": getattr(args, "timeout", None),
        "log_level": getattr(args, "log_level", None),
    }
    merged.update({k: v for k, v in flag_map.items() if v is not None})
    config = CliConfig(
        user_agent=str(merged.get("user_agent", DEFAULT_USER_AGENT)),
        default_delay=float(merged.get("default_delay", 1.0)),
        timeout=float(merged.get("timeout", 30.0)),
        log_level=str(merged.get("log_level", "warning")).lower(),
    )
    if config.default_delay < 0:
        raise ValueError("delay must be >= 0")
    return config


def _setup_logging(level_name: str) -> None:
    level = getattr(logging, level_name.upper(), logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def _load_registry(args: argparse.Namespace) -> Registry:
    registry_dir = getattr(args, "registry", None) or default_registry_dir()
    return load_registry(registry_dir)


def select_publishers(registry: Registry, tokens: str) -> list[PublisherSpec]:
    """Resolve a comma-separated publisher selection.

    Tokens may be two-letter country codes, publisher ids, or
    ``country.publisher_id``. Raises ``ValueError`` naming the first token
    that matches nothing.
    """
    selected: list[PublisherSpec] = []
    seen: set[str] = set()
    for raw in tokens.split(","):
        token = raw.strip()
        if not token:
            continue
        matches: list[PublisherSpec] = []
        if "." in token:
            country, _, publisher_id = token.partition(".")
            publisher = registry.get(publisher_id.strip().lower())
            if publisher and publisher.country == country.strip().lower():
                matches = [publisher]
        elif len(token) == 2 and not registry.get(token.lower()):
            matches = registry.by_country(token)
        else:
            publisher = registry.get(token.lower())
            matches = [publisher] if publisher else []
        if not matches:
            raise ValueError(f"unknown publisher or country: {token!r}")
        for publisher in matches:
            if publisher.id not in seen:
                seen.add(publisher.id)
                selected.append(publisher)
    if not selected:
        raise ValueError("no publishers selected")
    return selected


def _emit_articles(articles: Iterator[Article], args: argparse.Namespace) -> int:
    """Stream articles to stdout or ``--out``; returns the article count."""
    count = 0
    sink = open(args.out, "w", encoding="utf-8") if getattr(args, "out", None) else None
    try:
        for article in articles:
            count += 1
            if args.format == "jsonl":
                line = to_jsonl_record(article, include_html=args.include_html)
                print(line, file=sink or sys.stdout)
            else:
                target = sink or sys.stdout
                print(render_preview(article), file=target)
                print(file=target)
    finally:
        if sink is not None:
            sink.close()
    return count


def cmd_crawl(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    registry = _load_registry(args)
    try:
        publishers = select_publishers(registry, args.publishers)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    params = CrawlParams(
        max_articles=args.max_articles,
        only_complete=not args.include_incomplete,
        include_html=args.include_html,
        timeout=config.timeout,
        delay=config.default_delay,
    )
    request_log = RequestLog(args.request_log) if args.request_log else None
    try:
        count = _emit_articles(
            crawl(publishers, params, user_agent=config.user_agent, request_log=request_log),
            args,
        )
    finally:
        if request_log is not None:
            request_log.close()
    return 0 if count > 0 else 2


def cmd_cc_news(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    registry = _load_registry(args)
    if args.publishers:
        try:
            publishers = select_publishers(registry, args.publishers)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        registry = Registry(publishers=tuple(publishers))
    if args.start >= args.end:
        print("error: --start must precede --end", file=sys.stderr)
        return 1
    source_config = WarcSourceConfig(
        base_location=args.source,
        start_date=args.start,
        end_date=args.end,
        worker_count=args.workers,
    )
    params = CrawlParams(
        max_articles=args.max_articles,
        only_complete=not args.include_incomplete,
        include_html=args.include_html,
        timeout=config.timeout,
        delay=config.default_delay,
    )
    try:
        count = _emit_articles(crawl_archive(registry, source_config, params), args)
    except WarcSourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0 if count > 0 else 2


def cmd_evaluate(args: argparse.Namespace) -> int:
    gold_dir = Path(args.gold)
    predictions_path = Path(args.pred)
    if not gold_dir.is_dir():
        print(f"error: gold directory not found: {gold_dir}", file=sys.stderr)
        return 1
    if not predictions_path.is_file():
        print(f"error: predictions file not found: {predictions_path}", file=sys.stderr)
        return 1
    try:
        gold_set = load_gold_dir(gold_dir)
    except GoldCorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    by_url: dict[str, str] = {}
    with open(predictions_path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                article = from_jsonl_record(line)
            except ValueError as exc:
                print(f"error: {predictions_path}:{line_number}: {exc}", file=sys.stderr)
                return 1
            by_url.setdefault(article.html.url, article.plaintext)

    predictions = {
        gold.article_id: by_url[gold.url] for gold in gold_set if gold.url in by_url
    }
    report = evaluate_corpus(predictions, gold_set)
    print(render_table(report))
    if args.json_out:
        Path(args.json_out).write_text(
            json.dumps(report_to_json(report), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    return 0


def cmd_list_publishers(args: argparse.Namespace) -> int:
    registry = _load_registry(args)
    if not len(registry):
        print("registry is empty")
        return 0
    for country in registry.countries():
        print(f"[{country}]")
        for publisher in registry.by_country(country):
            print(f"  {publisher.id:<24} {publisher.name:<32} {country}  sources={len(publisher.sources)}")
    return 0


def _parse_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid date {value!r}: use YYYY-MM-DD") from exc


def _add_common_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-articles", type=int, default=None, help="stop after N articles")
    parser.add_argument("--format", choices=["preview", "jsonl"], default="preview")
    parser.add_argument("--out", help="write output to a file instead of stdout")
    parser.add_argument("--include-html", action="store_true", help="embed raw HTML in JSONL records")
    parser.add_argument(
        "--include-incomplete",
        action="store_true",
        help="also emit articles whose extraction recorded failures",
    )
    parser.add_argument("--registry", help="publisher registry directory (default: packaged registry)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newsharvest", description=__doc__)
    parser.add_argument("--config", help="YAML config file (or NEWSHARVEST_CONFIG)")
    parser.add_argument("--user-agent", dest="user_agent")
    parser.add_argument("--delay", type=float, help="per-publisher politeness delay in seconds")
    parser.add_argument("--timeout", type=float, help="HTTP timeout in seconds")
    parser.add_argument("--log-level", dest="log_level", choices=["debug", "info", "warning", "error"])
    subparsers = parser.add_subparsers(dest="command", required=True)

    crawl_parser = subparsers.add_parser("crawl", help="crawl live publisher sites")
    crawl_parser.add_argument("--publishers", required=True,
                              help="comma-separated country codes, ids or country.id tokens")
    crawl_parser.add_argument("--request-log", help="write a JSONL request log for politeness audits")
    _add_common_output_flags(crawl_parser)
    crawl_parser.set_defaults(func=cmd_crawl)

    cc_parser = subparsers.add_parser("cc-news", help="crawl a CC-NEWS style WARC archive")
    cc_parser.add_argument("--source", required=True,
                           help="archive directory, manifest file, or manifest URL")
    cc_parser.add_argument("--start", type=_parse_date, required=True, help="inclusive start date")
    cc_parser.add_argument("--end", type=_parse_date, required=True, help="exclusive end date")
    cc_parser.add_argument("--workers", type=int, default=1)
    cc_parser.add_argument("--publishers", default="",
                           help="optional publisher filter (same syntax as crawl)")
    _add_common_output_flags(cc_parser)
    cc_parser.set_defaults(func=cmd_cc_news)

    eval_parser = subparsers.add_parser("evaluate", help="score predictions against a gold corpus")
    eval_parser.add_argument("--gold", required=True, help="gold corpus directory")
    eval_parser.add_argument("--pred", required=True, help="predictions JSONL file")
    eval_parser.add_argument("--json-out", help="also write the report as JSON")
    eval_parser.set_defaults(func=cmd_evaluate)

    list_parser = subparsers.add_parser("list-publishers", help="show the publisher registry")
    list_parser.add_argument("--registry", help="publisher registry directory")
    list_parser.set_defaults(func=cmd_list_publishers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        _setup_logging(config.log_level)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except RegistryValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 1
    except Exception as exc:
        logger.exception("fatal error")
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
