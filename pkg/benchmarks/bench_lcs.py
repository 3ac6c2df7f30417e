#!/usr/bin/env python3
"""Benchmark the LCS match kernel: numba JIT vs pure Python.

The kernel dominates corpus-scale ROUGE-LSum evaluation (one O(m*n) dynamic
program per reference-line/candidate-line pair, re-run for every optional
paragraph subset). Run as:

    python benchmarks/bench_lcs.py [--pairs 2000] [--max-len 120] [--vocab 500]
"""

import argparse
import statistics
import time

import numpy as np

from newsharvest import _lcs


def make_pairs(pair_count: int, max_len: int, vocab: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(pair_count):
        m = int(rng.integers(1, max_len + 1))
        n = int(rng.integers(1, max_len + 1))
        pairs.append(
            (
                rng.integers(0, vocab, size=m).astype(np.int64),
                rng.integers(0, vocab, size=n).astype(np.int64),
            )
        )
    return pairs


def run(kernel, pairs, repeats: int = 3):
    timings = []
    checksum = 0
    for _ in range(repeats):
        started = time.perf_counter()
        checksum = 0
        for ref, cand in pairs:
            checksum += int(kernel(ref, cand).sum())
        timings.append(time.perf_counter() - started)
    return min(timings), statistics.fmean(timings), checksum


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--max-len", type=int, default=120)
    parser.add_argument("--vocab", type=int, default=500)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.max_len, args.vocab)
    print(f"{args.pairs} pairs, lengths 1..{args.max_len}, vocab {args.vocab}")

    results = {}
    best_py, mean_py, checksum_py = run(_lcs.lcs_match_mask_py, pairs)
    results["pure python"] = (best_py, mean_py)
    print(f"{'pure python':<14} best {best_py * 1000:9.1f} ms   mean {mean_py * 1000:9.1f} ms")

    if _lcs.lcs_match_mask_numba is None:
        print("numba kernel unavailable (not installed or NEWSHARVEST_DISABLE_NUMBA set)")
        return 0

    _lcs.lcs_match_mask_numba(pairs[0][0], pairs[0][1])  # compile outside timing
    best_nb, mean_nb, checksum_nb = run(_lcs.lcs_match_mask_numba, pairs)
    print(f"{'numba jit':<14} best {best_nb * 1000:9.1f} ms   mean {mean_nb * 1000:9.1f} ms")

    if checksum_py != checksum_nb:
        print(f"MISMATCH: checksums differ ({checksum_py} vs {checksum_nb})")
        return 1
    print(f"checksums agree ({checksum_py}); speedup x{best_py / best_nb:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
