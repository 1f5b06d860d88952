"""Compare the numba-jitted scoring kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--docs 50000] [--dim 256] [--repeats 20]

The same inputs are fed to both paths; timings exclude JIT compilation
(first call is warmed up) and results are cross-checked before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lore import _kernels


def _time(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_bm25(num_docs: int, repeats: int, rng) -> list[tuple[str, float]]:
    # ~5 query terms, each matching ~2% of the corpus
    postings_per_term = max(1, num_docs // 50)
    doc_idx = rng.integers(0, num_docs, size=5 * postings_per_term).astype(np.int64)
    tfs = rng.integers(1, 10, size=doc_idx.size).astype(np.float64)
    idfs = rng.uniform(0.1, 3.0, size=doc_idx.size)
    doc_lens = rng.integers(20, 400, size=num_docs).astype(np.float64)
    avgdl = float(doc_lens.mean())
    args = (num_docs, doc_idx, tfs, idfs, doc_lens, avgdl, 1.2, 0.75)

    rows = [("bm25 numpy", _time(_kernels.bm25_scores_numpy, *args, repeats=repeats))]
    if _kernels.bm25_scores_jit is not None:
        reference = _kernels.bm25_scores_numpy(*args)
        jitted = _kernels.bm25_scores_jit(*args)  # also warms up the JIT
        np.testing.assert_allclose(reference, jitted, atol=1e-9)
        rows.append(("bm25 numba", _time(_kernels.bm25_scores_jit, *args, repeats=repeats)))
    return rows


def bench_dot(num_docs: int, dim: int, repeats: int, rng) -> list[tuple[str, float]]:
    matrix = rng.standard_normal((num_docs, dim))
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
    query = rng.standard_normal(dim)
    query /= np.linalg.norm(query)

    rows = [("dot  numpy", _time(_kernels.dot_scores_numpy, matrix, query, repeats=repeats))]
    if _kernels.dot_scores_jit is not None:
        reference = _kernels.dot_scores_numpy(matrix, query)
        jitted = _kernels.dot_scores_jit(matrix, query)
        np.testing.assert_allclose(reference, jitted, atol=1e-9)
        rows.append(("dot  numba", _time(_kernels.dot_scores_jit, matrix, query, repeats=repeats)))
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=50_000)
    parser.add_argument("--dim", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"docs={args.docs} dim={args.dim} repeats={args.repeats} "
          f"(numba available: {_kernels.bm25_scores_jit is not None})")
    rows = bench_bm25(args.docs, args.repeats, rng) + bench_dot(args.docs, args.dim, args.repeats, rng)
    for name, seconds in rows:
        print(f"  {name:<12} {seconds * 1e3:8.3f} ms")


if __name__ == "__main__":
    main()
