import math

import pytest

from conftest import FIXTURES
from newsharvest.goldset import GoldArticle, GoldCorpusError, GoldParagraph, load_gold_dir
from newsharvest.report import evaluate_corpus, render_table, report_to_json


def gold(article_id, publisher_id, text):
    return GoldArticle(
        article_id=article_id,
        publisher_id=publisher_id,
        url=f"https://example-news.com/{article_id}",
        paragraphs=(GoldParagraph(text),),
    )


class TestGoldLoading:
    def test_shipped_gold_corpus_loads(self):
        articles = load_gold_dir(FIXTURES / "gold")
        assert len(articles) == 9
        assert {a.publisher_id for a in articles} == {
            "midtown_herald", "pacific_courier", "deutsche_rundschau",
        }
        for article in articles:
            assert article.paragraphs
            assert all(p.text.strip() == p.text for p in article.paragraphs)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(GoldCorpusError):
            load_gold_dir(tmp_path / "nope")

    def test_empty_paragraphs_rejected(self, tmp_path):
        (tmp_path / "bad.yaml").write_text(
            "article_id: bad\npublisher_id: p\nurl: https://x.example/\nparagraphs: []\n"
        )
        with pytest.raises(GoldCorpusError, match="paragraphs"):
            load_gold_dir(tmp_path)

    def test_duplicate_ids_rejected(self, tmp_path):
        for name in ("a.yaml", "b.yaml"):
            (tmp_path / name).write_text(
                "article_id: same\npublisher_id: p\nurl: https://x.example/\n"
                "paragraphs:\n  - text: hello\n"
            )
        with pytest.raises(GoldCorpusError, match="duplicate"):
            load_gold_dir(tmp_path)


class TestEvaluateCorpus:
    def test_single_perfect_article(self):
        g = gold("a1", "pub", "alpha beta gamma")
        report = evaluate_corpus({"a1": "alpha beta gamma"}, [g])
        assert report.overall.n == 1
        assert report.overall.f1.mean == 1.0
        assert report.overall.f1.std == 0.0

    def test_mean_and_sample_std(self):
        golds = [
            gold("a1", "pub", "alpha beta gamma delta epsilon"),
            gold("a2", "pub", "one two three four five"),
        ]
        predictions = {
            "a1": "alpha beta gamma delta epsilon",  # F1 = 1.0
            "a2": "one two three four nope",         # 4 hits of 5 -> P=R=F1=0.8
        }
        report = evaluate_corpus(predictions, golds)
        assert report.overall.f1.mean == pytest.approx(0.9)
        assert report.overall.f1.std == pytest.approx(math.sqrt(2 * 0.01))
        rendered = render_table(report)
        assert " 90.00" in rendered
        assert "14.14" in rendered

    def test_missing_prediction_scored_empty_and_flagged(self):
        golds = [gold("a1", "pub", "alpha beta")]
        report = evaluate_corpus({}, golds)
        assert report.overall.f1.mean == 0.0
        assert report.articles[0].missing_prediction
        assert "missing predictions" in render_table(report)

    def test_per_publisher_grouping(self):
        golds = [
            gold("a1", "pub_a", "alpha beta"),
            gold("a2", "pub_b", "gamma delta"),
            gold("a3", "pub_b", "epsilon zeta"),
        ]
        predictions = {"a1": "alpha beta", "a2": "gamma delta", "a3": "epsilon zeta"}
        report = evaluate_corpus(predictions, golds)
        assert set(report.per_publisher) == {"pub_a", "pub_b"}
        assert report.per_publisher["pub_b"].n == 2
        assert report.overall.n == sum(s.n for s in report.per_publisher.values())

    def test_empty_gold_set_rejected(self):
        with pytest.raises(ValueError):
            evaluate_corpus({}, [])

    def test_json_report_contains_audit_trail(self):
        g = GoldArticle(
            article_id="a1",
            publisher_id="pub",
            url="https://example-news.com/a1",
            paragraphs=(
                GoldParagraph("alpha beta gamma", optional=False),
                GoldParagraph("unrelated optional text", optional=True),
            ),
        )
        report = evaluate_corpus({"a1": "alpha beta gamma"}, [g])
        data = report_to_json(report)
        assert data["articles"][0]["removed_optional_paragraphs"] == [1]
        assert data["overall"]["f1"]["mean"] == 100.0
        assert "sample" in data["std_kind"]

    def test_table_has_metric_columns(self):
        report = evaluate_corpus({"a1": "x"}, [gold("a1", "pub", "x")])
        table = render_table(report)
        assert "Precision" in table and "Recall" in table and "F1-Score" in table
