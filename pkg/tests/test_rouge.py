import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rouge_lsum_oracle, union_lcs_positions_oracle

from newsharvest import _lcs
from newsharvest.rouge import rouge_lsum, tokenize, tokenized_lines, union_lcs


class TestTokenize:
    def test_basic_sentence(self):
        assert tokenize("Oppenheimer wins 7 Oscars.") == ["oppenheimer", "wins", "7", "oscars"]

    def test_empty(self):
        assert tokenize("") == []

    def test_unicode_dash_splits(self):
        assert tokenize("A—B") == ["a", "b"]

    def test_underscore_splits(self):
        assert tokenize("snake_case") == ["snake", "case"]

    def test_lines_drop_token_free_lines(self):
        assert tokenized_lines("one two\n\n...\nthree") == [["one", "two"], ["three"]]


class TestUnionLcs:
    def test_identity(self):
        assert union_lcs(["a", "b", "c"], [["a", "b", "c"]]) == 3

    def test_union_across_candidates(self):
        # Positions {0,2} from the first candidate, {1,3} from the second.
        assert union_lcs(["a", "b", "c", "d"], [["a", "c"], ["b", "d"]]) == 4

    def test_empty_candidates(self):
        assert union_lcs(["a", "b"], []) == 0

    def test_matches_oracle_on_random_inputs(self):
        rng = random.Random(99)
        vocab = list("abcdefghij")
        for _ in range(300):
            ref = rng.choices(vocab, k=rng.randint(0, 12))
            cands = [rng.choices(vocab, k=rng.randint(0, 12)) for _ in range(rng.randint(0, 4))]
            expected = len(union_lcs_positions_oracle(ref, cands))
            assert union_lcs(ref, cands) == expected


class TestKernels:
    def both_kernels(self):
        kernels = [_lcs.lcs_match_mask_py]
        if _lcs.lcs_match_mask_numba is not None:
            kernels.append(_lcs.lcs_match_mask_numba)
        return kernels

    def test_numba_available_here(self):
        import os

        if os.environ.get("NEWSHARVEST_DISABLE_NUMBA"):
            pytest.skip("JIT kernel disabled via NEWSHARVEST_DISABLE_NUMBA")
        # The packaged default in this environment is the JIT kernel.
        assert _lcs.lcs_match_mask_numba is not None

    def test_kernels_agree_with_each_other_and_oracle(self):
        rng = random.Random(4)
        for _ in range(200):
            ref = np.array([rng.randint(0, 6) for _ in range(rng.randint(0, 20))], dtype=np.int64)
            cand = np.array([rng.randint(0, 6) for _ in range(rng.randint(0, 20))], dtype=np.int64)
            expected = union_lcs_positions_oracle(ref.tolist(), [cand.tolist()])
            for kernel in self.both_kernels():
                mask = kernel(ref, cand)
                assert set(np.flatnonzero(mask).tolist()) == expected

    def test_empty_inputs(self):
        empty = np.array([], dtype=np.int64)
        one = np.array([1], dtype=np.int64)
        for kernel in self.both_kernels():
            assert kernel(empty, one).size == 0
            assert kernel(one, empty).tolist() == [0]


class TestRougeLsum:
    def test_identity_is_perfect(self):
        score = rouge_lsum("some text here\nsecond line", "some text here\nsecond line")
        assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)

    def test_empty_candidate_or_reference(self):
        assert rouge_lsum("", "reference text").f1 == 0.0
        assert rouge_lsum("candidate text", "").f1 == 0.0
        assert rouge_lsum("", "").f1 == 0.0

    def test_small_fixture_pair_matches_oracle(self):
        candidate = "the quick brown fox\njumps over the dog"
        reference = "the quick fox jumps\nover the lazy dog\nthe end"
        p, r, f1 = rouge_lsum_oracle(candidate, reference)
        score = rouge_lsum(candidate, reference)
        assert (score.precision, score.recall, score.f1) == (p, r, f1)

    def test_clipping_prevents_repeat_inflation(self):
        # Candidate repeats 'a' many times; only one reference 'a' exists.
        score = rouge_lsum("a a a a a a", "a b")
        assert score.recall == pytest.approx(0.5)
        assert score.precision == pytest.approx(1 / 6)

    def test_f1_identity_from_counts(self):
        score = rouge_lsum("a b", "a c")
        p, r = score.precision, score.recall
        assert score.f1 == pytest.approx(2 * p * r / (p + r))

    def test_matches_oracle_on_many_random_pairs(self):
        rng = random.Random(12345)
        vocab = [f"w{i}" for i in range(10)]

        def random_text():
            lines = []
            for _ in range(rng.randint(1, 4)):
                lines.append(" ".join(rng.choices(vocab, k=rng.randint(0, 15))))
            return "\n".join(lines)

        for _ in range(400):
            candidate, reference = random_text(), random_text()
            p, r, f1 = rouge_lsum_oracle(candidate, reference)
            score = rouge_lsum(candidate, reference)
            assert score.precision == p
            assert score.recall == r
            assert score.f1 == f1


@st.composite
def token_text(draw, vocab_size=8, max_lines=4, max_tokens=12):
    vocab = [f"t{i}" for i in range(vocab_size)]
    lines = draw(
        st.lists(
            st.lists(st.sampled_from(vocab), max_size=max_tokens),
            min_size=1,
            max_size=max_lines,
        )
    )
    return "\n".join(" ".join(line) for line in lines)


class TestProperties:
    @settings(max_examples=150, deadline=None)
    @given(token_text(), token_text())
    def test_scores_bounded(self, candidate, reference):
        score = rouge_lsum(candidate, reference)
        assert 0.0 <= score.precision <= 1.0
        assert 0.0 <= score.recall <= 1.0
        assert 0.0 <= score.f1 <= 1.0

    @settings(max_examples=80, deadline=None)
    @given(token_text())
    def test_self_similarity(self, text):
        score = rouge_lsum(text, text)
        if tokenize(text):
            assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_role_symmetry_on_repetition_free_texts(self, data):
        # With all-distinct tokens the clipped hit count is role-symmetric,
        # so precision(c, r) == recall(r, c). (Does not hold for texts with
        # repeated tokens under per-line canonical LCS unions.)
        tokens = [f"u{i}" for i in range(24)]
        shuffled = data.draw(st.permutations(tokens))
        cut_a = data.draw(st.integers(min_value=0, max_value=12))
        line_cut_a = data.draw(st.integers(min_value=0, max_value=cut_a))
        line_cut_b = data.draw(st.integers(min_value=0, max_value=24 - cut_a))
        a_tokens, b_tokens = shuffled[:cut_a], shuffled[cut_a:]
        a = " ".join(a_tokens[:line_cut_a]) + "\n" + " ".join(a_tokens[line_cut_a:])
        b = " ".join(b_tokens[:line_cut_b]) + "\n" + " ".join(b_tokens[line_cut_b:])
        forward = rouge_lsum(a, b)
        backward = rouge_lsum(b, a)
        assert forward.precision == backward.recall
        assert forward.recall == backward.precision
