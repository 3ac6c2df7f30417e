import random

import pytest

from oracles import best_optional_subset_oracle

from newsharvest.goldset import GoldArticle, GoldParagraph
from newsharvest.rouge import best_optional_score, rouge_lsum, score_with_optionals


def gold(*paragraphs, article_id="g1"):
    return GoldArticle(
        article_id=article_id,
        publisher_id="pub",
        url="https://example-news.com/a",
        paragraphs=tuple(GoldParagraph(text, optional) for text, optional in paragraphs),
    )


class TestScoreWithOptionals:
    def test_no_optionals_equals_plain_rouge(self):
        g = gold(("alpha beta gamma", False), ("delta epsilon", False))
        candidate = "alpha beta\ndelta"
        assert score_with_optionals(candidate, g) == rouge_lsum(candidate, g.reference_text())

    def test_removing_unmatched_optional_wins(self):
        g = gold(("alpha beta gamma", False), ("delta epsilon zeta", True))
        result = best_optional_score("alpha beta gamma", g)
        assert result.score.f1 == 1.0
        assert result.removed == (1,)

    def test_matched_optional_kept(self):
        g = gold(("alpha beta", False), ("gamma delta", True))
        result = best_optional_score("alpha beta\ngamma delta", g)
        assert result.score.f1 == 1.0
        assert result.removed == ()

    def test_never_worse_than_full_reference(self):
        rng = random.Random(5)
        vocab = [f"w{i}" for i in range(12)]
        for _ in range(100):
            paragraphs = [
                (" ".join(rng.choices(vocab, k=rng.randint(1, 8))), rng.random() < 0.5)
                for _ in range(rng.randint(1, 5))
            ]
            g = gold(*paragraphs)
            candidate = "\n".join(
                " ".join(rng.choices(vocab, k=rng.randint(0, 8))) for _ in range(rng.randint(1, 3))
            )
            best = score_with_optionals(candidate, g)
            assert best.f1 >= rouge_lsum(candidate, g.reference_text()).f1

    def test_guard_on_too_many_optionals(self):
        paragraphs = [(f"text {i}", True) for i in range(21)]
        with pytest.raises(ValueError, match="optional paragraphs"):
            score_with_optionals("text", gold(*paragraphs))

    def test_matches_exhaustive_oracle(self):
        rng = random.Random(777)
        vocab = [f"w{i}" for i in range(10)]
        for _ in range(60):
            optional_count = rng.randint(0, 6)
            required_count = rng.randint(1, 4)
            flags = [True] * optional_count + [False] * required_count
            rng.shuffle(flags)
            paragraphs = [
                (" ".join(rng.choices(vocab, k=rng.randint(1, 10))), optional)
                for optional in flags
            ]
            candidate = "\n".join(
                " ".join(rng.choices(vocab, k=rng.randint(0, 10)))
                for _ in range(rng.randint(1, 4))
            )
            g = gold(*paragraphs)
            (op, orecall, of1), oremoved = best_optional_subset_oracle(candidate, paragraphs)
            result = best_optional_score(candidate, g)
            assert result.score.f1 == of1
            assert result.score.recall == orecall
            assert result.score.precision == op
            assert result.removed == oremoved
