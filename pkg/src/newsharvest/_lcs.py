"""Longest-common-subsequence match kernel used by the ROUGE scorer.

The O(len(ref) * len(cand)) dynamic program dominates evaluation runtime on
large corpora, so the kernel is JIT-compiled with numba when available. Set
``NEWSHARVEST_DISABLE_NUMBA=1`` (or run without numba installed) to use the
pure-Python fallback; both implementations are exercised against each other
in the test suite and compared in ``benchmarks/bench_lcs.py``.

Backtracking is canonical and part of the scoring contract: on a token match
take the diagonal, otherwise move up when the upper cell is strictly
greater, else left. Which positions an LCS touches depends on this
convention, and the union step in summary-level ROUGE is sensitive to it.
"""

from __future__ import annotations

import os

import numpy as np


def lcs_match_mask_py(ref: np.ndarray, cand: np.ndarray) -> np.ndarray:
    """Pure-Python reference kernel. Returns a uint8 mask over ``ref``
    positions that are part of the canonical LCS with ``cand``."""
    m, n = len(ref), len(cand)
    mask = np.zeros(m, dtype=np.uint8)
    if m == 0 or n == 0:
        return mask
    table = np.zeros((m + 1, n + 1), dtype=np.int32)
    for i in range(1, m + 1):
        token = ref[i - 1]
        row = table[i]
        prev = table[i - 1]
        for j in range(1, n + 1):
            if token == cand[j - 1]:
                row[j] = prev[j - 1] + 1
            elif prev[j] >= row[j - 1]:
                row[j] = prev[j]
            else:
                row[j] = row[j - 1]
    i, j = m, n
    while i > 0 and j > 0:
        if ref[i - 1] == cand[j - 1]:
            mask[i - 1] = 1
            i -= 1
            j -= 1
        elif table[i - 1][j] > table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return mask


def _make_numba_kernel():
    from numba import njit

    @njit(cache=True)
    def lcs_match_mask_jit(ref: np.ndarray, cand: np.ndarray) -> np.ndarray:  # pragma: no cover
        m, n = len(ref), len(cand)
        mask = np.zeros(m, dtype=np.uint8)
        if m == 0 or n == 0:
            return mask
        table = np.zeros((m + 1, n + 1), dtype=np.int32)
        for i in range(1, m + 1):
            token = ref[i - 1]
            for j in range(1, n + 1):
                if token == cand[j - 1]:
                    table[i, j] = table[i - 1, j - 1] + 1
                elif table[i - 1, j] >= table[i, j - 1]:
                    table[i, j] = table[i - 1, j]
                else:
                    table[i, j] = table[i, j - 1]
        i, j = m, n
        while i > 0 and j > 0:
            if ref[i - 1] == cand[j - 1]:
                mask[i - 1] = 1
                i -= 1
                j -= 1
            elif table[i - 1, j] > table[i, j - 1]:
                i -= 1
            else:
                j -= 1
        return mask

    return lcs_match_mask_jit


lcs_match_mask_numba = None
USING_NUMBA = False

if os.environ.get("NEWSHARVEST_DISABLE_NUMBA", "").strip() not in ("1", "true", "yes"):
    try:
        lcs_match_mask_numba = _make_numba_kernel()
        USING_NUMBA = True
    except ImportError:  # numba not installed; fall back silently
        lcs_match_mask_numba = None

lcs_match_mask = lcs_match_mask_numba if USING_NUMBA else lcs_match_mask_py
