"""Summary-level ROUGE-L scoring with optional-paragraph handling.

Texts are line-oriented: ``\\n`` separates the scoring units (gold
paragraphs joined by single newlines, extracted plaintext whose blocks are
separated by blank lines). For each reference line the union of canonical
LCS matches against all candidate lines is taken, hits are clipped by token
multiplicity on both sides, and precision/recall are the clipped hit count
over the candidate/reference token totals.

No stemming is applied and tokens are lowercased alphanumeric runs; scores
are therefore comparable only within this harness.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _lcs
from .goldset import GoldArticle

_TOKEN_SPLIT = re.compile(r"[\W_]+", re.UNICODE)

MAX_OPTIONAL_PARAGRAPHS = 20


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, hits: int, candidate_tokens: int, reference_tokens: int) -> "RougeScore":
        precision = hits / candidate_tokens if candidate_tokens else 0.0
        recall = hits / reference_tokens if reference_tokens else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        return cls(precision=precision, recall=recall, f1=f1)


ZERO_SCORE = RougeScore(0.0, 0.0, 0.0)


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumeric runs; digits are kept."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def tokenized_lines(text: str) -> list[list[str]]:
    """Tokenize each newline-delimited line, dropping token-free lines."""
    lines = [tokenize(line) for line in text.split("\n")]
    return [line for line in lines if line]


def union_lcs(reference_tokens: Sequence[str], candidate_sentences: Sequence[Sequence[str]]) -> int:
    """Size of the union of canonical LCS matches of one reference sentence
    against every candidate sentence (positions counted once)."""
    vocab: dict[str, int] = {}
    ref_ids = _to_ids(reference_tokens, vocab)
    cand_ids = [_to_ids(c, vocab) for c in candidate_sentences]
    return int(_union_mask(ref_ids, cand_ids).sum())


def _to_ids(tokens: Sequence[str], vocab: dict[str, int]) -> np.ndarray:
    return np.array([vocab.setdefault(t, len(vocab)) for t in tokens], dtype=np.int64)


def _union_mask(ref_ids: np.ndarray, cand_ids: list[np.ndarray]) -> np.ndarray:
    mask = np.zeros(len(ref_ids), dtype=np.uint8)
    if len(ref_ids) == 0:
        return mask
    for cand in cand_ids:
        if len(cand):
            mask |= _lcs.lcs_match_mask(ref_ids, cand)
    return mask


def rouge_lsum(candidate_text: str, reference_text: str) -> RougeScore:
    """Score a candidate text against a reference text.

    Empty candidate or reference scores zero across the board.
    """
    reference_lines = tokenized_lines(reference_text)
    candidate_lines = tokenized_lines(candidate_text)
    reference_total = sum(len(line) for line in reference_lines)
    candidate_total = sum(len(line) for line in candidate_lines)
    if reference_total == 0 or candidate_total == 0:
        return ZERO_SCORE

    vocab: dict[str, int] = {}
    ref_ids = [_to_ids(line, vocab) for line in reference_lines]
    cand_ids = [_to_ids(line, vocab) for line in candidate_lines]

    candidate_budget: Counter[int] = Counter()
    reference_budget: Counter[int] = Counter()
    for line in cand_ids:
        candidate_budget.update(line.tolist())
    for line in ref_ids:
        reference_budget.update(line.tolist())

    hits = 0
    for line in ref_ids:
        mask = _union_mask(line, cand_ids)
        for pos in np.flatnonzero(mask):
            token = int(line[pos])
            if candidate_budget[token] > 0 and reference_budget[token] > 0:
                hits += 1
                candidate_budget[token] -= 1
                reference_budget[token] -= 1
    return RougeScore.from_counts(hits, candidate_total, reference_total)


@dataclass(frozen=True)
class OptionalScoreResult:
    """Best score over optional-paragraph subsets plus the audit trail."""

    score: RougeScore
    removed: tuple[int, ...]  # indices into gold.paragraphs that were dropped


def _candidate_better(a: tuple[RougeScore, tuple[int, ...]], b: tuple[RougeScore, tuple[int, ...]]) -> bool:
    """Tie-break order: max F1, then max recall, then fewer removed
    paragraphs, then the lexicographically smallest removed index tuple."""
    (score_a, removed_a), (score_b, removed_b) = a, b
    if score_a.f1 != score_b.f1:
        return score_a.f1 > score_b.f1
    if score_a.recall != score_b.recall:
        return score_a.recall > score_b.recall
    if len(removed_a) != len(removed_b):
        return len(removed_a) < len(removed_b)
    return removed_a < removed_b


def best_optional_score(candidate_text: str, gold: GoldArticle) -> OptionalScoreResult:
    """Exhaustively score every optional-paragraph subset of the gold
    reference and keep the best one.

    The subset count is exponential in the number of optional paragraphs,
    so more than :data:`MAX_OPTIONAL_PARAGRAPHS` of them is treated as a
    corpus error.
    """
    optional_indices = [i for i, p in enumerate(gold.paragraphs) if p.optional]
    k = len(optional_indices)
    if k > MAX_OPTIONAL_PARAGRAPHS:
        raise ValueError(
            f"gold article {gold.article_id!r} has {k} optional paragraphs "
            f"(limit {MAX_OPTIONAL_PARAGRAPHS}); split or fix the corpus entry"
        )
    best: tuple[RougeScore, tuple[int, ...]] | None = None
    for subset in range(1 << k):
        removed = tuple(optional_indices[b] for b in range(k) if subset >> b & 1)
        removed_set = set(removed)
        reference = "\n".join(p.text for i, p in enumerate(gold.paragraphs) if i not in removed_set)
        score = rouge_lsum(candidate_text, reference)
        entry = (score, removed)
        if best is None or _candidate_better(entry, best):
            best = entry
    assert best is not None
    return OptionalScoreResult(score=best[0], removed=best[1])


def score_with_optionals(candidate_text: str, gold: GoldArticle) -> RougeScore:
    """Best-F1 score over all optional-paragraph subsets of the reference."""
    return best_optional_score(candidate_text, gold).score
