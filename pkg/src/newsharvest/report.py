"""Corpus evaluation: per-article scoring, per-publisher and overall stats.

Means and standard deviations are sample statistics (n - 1 denominator,
zero for singleton groups) reported in percent; the JSON report additionally
records which optional paragraphs were dropped for each article so scoring
decisions can be audited.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .goldset import GoldArticle
from .rouge import RougeScore, best_optional_score


@dataclass(frozen=True)
class ArticleResult:
    article_id: str
    publisher_id: str
    score: RougeScore
    removed_optionals: tuple[int, ...]
    missing_prediction: bool


@dataclass(frozen=True)
class MetricStats:
    mean: float
    std: float


@dataclass(frozen=True)
class GroupStats:
    n: int
    precision: MetricStats
    recall: MetricStats
    f1: MetricStats


@dataclass(frozen=True)
class AggregateReport:
    per_publisher: dict[str, GroupStats]
    overall: GroupStats
    articles: tuple[ArticleResult, ...]

    @property
    def n_articles(self) -> int:
        return self.overall.n


def _stats(values: list[float]) -> MetricStats:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return MetricStats(mean=mean, std=std)


def _group_stats(scores: list[RougeScore]) -> GroupStats:
    return GroupStats(
        n=len(scores),
        precision=_stats([s.precision for s in scores]),
        recall=_stats([s.recall for s in scores]),
        f1=_stats([s.f1 for s in scores]),
    )


def evaluate_corpus(predictions: dict[str, str], gold_set: list[GoldArticle]) -> AggregateReport:
    """Score every gold article against its predicted text.

    A gold article without a prediction is scored as an empty candidate and
    flagged in the per-article results.
    """
    if not gold_set:
        raise ValueError("gold set is empty")
    results: list[ArticleResult] = []
    for gold in gold_set:
        candidate = predictions.get(gold.article_id)
        missing = candidate is None
        outcome = best_optional_score(candidate or "", gold)
        results.append(
            ArticleResult(
                article_id=gold.article_id,
                publisher_id=gold.publisher_id,
                score=outcome.score,
                removed_optionals=outcome.removed,
                missing_prediction=missing,
            )
        )

    by_publisher: dict[str, list[RougeScore]] = {}
    for result in results:
        by_publisher.setdefault(result.publisher_id, []).append(result.score)
    return AggregateReport(
        per_publisher={pid: _group_stats(scores) for pid, scores in sorted(by_publisher.items())},
        overall=_group_stats([r.score for r in results]),
        articles=tuple(results),
    )


def _cell(stats: MetricStats) -> str:
    return f"{stats.mean * 100:6.2f} ±{stats.std * 100:5.2f}"


def render_table(report: AggregateReport) -> str:
    """Plain-text score table, percent values, sample std after the ±."""
    header = f"{'Publisher':<24} {'N':>4}  {'Precision':>15}  {'Recall':>15}  {'F1-Score':>15}"
    ruler = "-" * len(header)
    lines = [
        "ROUGE-LSum scores (mean ± sample std, percent)",
        header,
        ruler,
    ]
    for publisher_id, stats in report.per_publisher.items():
        lines.append(
            f"{publisher_id:<24} {stats.n:>4}  {_cell(stats.precision):>15}  "
            f"{_cell(stats.recall):>15}  {_cell(stats.f1):>15}"
        )
    lines.append(ruler)
    overall = report.overall
    lines.append(
        f"{'overall':<24} {overall.n:>4}  {_cell(overall.precision):>15}  "
        f"{_cell(overall.recall):>15}  {_cell(overall.f1):>15}"
    )
    flagged = [r.article_id for r in report.articles if r.missing_prediction]
    if flagged:
        lines.append(f"missing predictions ({len(flagged)}): {', '.join(flagged)}")
    return "\n".join(lines)


def report_to_json(report: AggregateReport) -> dict:
    """Machine-readable report with per-article audit details."""

    def stats_json(stats: GroupStats) -> dict:
        return {
            "n": stats.n,
            "precision": {"mean": round(stats.precision.mean * 100, 2), "std": round(stats.precision.std * 100, 2)},
            "recall": {"mean": round(stats.recall.mean * 100, 2), "std": round(stats.recall.std * 100, 2)},
            "f1": {"mean": round(stats.f1.mean * 100, 2), "std": round(stats.f1.std * 100, 2)},
        }

    return {
        "std_kind": "sample (n-1); 0.00 for singleton groups",
        "unit": "percent",
        "overall": stats_json(report.overall),
        "per_publisher": {pid: stats_json(stats) for pid, stats in report.per_publisher.items()},
        "articles": [
            {
                "article_id": r.article_id,
                "publisher_id": r.publisher_id,
                "precision": round(r.score.precision * 100, 2),
                "recall": round(r.score.recall * 100, 2),
                "f1": round(r.score.f1 * 100, 2),
                "removed_optional_paragraphs": list(r.removed_optionals),
                "missing_prediction": r.missing_prediction,
            }
            for r in report.articles
        ],
    }
