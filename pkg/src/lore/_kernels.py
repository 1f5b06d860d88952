"""Hot scoring kernels: numba-jitted loops with a pure-numpy fallback.

Set LORE_NO_NUMBA=1 to force the numpy path (e.g. on platforms where JIT
compilation is unwanted). Both paths compute the same arithmetic; the
benchmark in benchmarks/bench_kernels.py compares them.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("LORE_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in {"1", "true", "yes"}


def bm25_scores_numpy(num_docs, doc_idx, tfs, idfs, doc_lens, avgdl, k1, b):
    """Accumulate per-document BM25 contributions for one query.

    doc_idx/tfs/idfs are parallel arrays with one entry per (query term,
    posting) pair; repeated doc indices accumulate.
    """
    scores = np.zeros(num_docs, dtype=np.float64)
    if doc_idx.size == 0:
        return scores
    norm = k1 * (1.0 - b + b * doc_lens[doc_idx] / avgdl)
    contrib = idfs * tfs * (k1 + 1.0) / (tfs + norm)
    np.add.at(scores, doc_idx, contrib)
    return scores


def _bm25_scores_loop(num_docs, doc_idx, tfs, idfs, doc_lens, avgdl, k1, b):
    scores = np.zeros(num_docs, dtype=np.float64)
    for i in range(doc_idx.shape[0]):
        d = doc_idx[i]
        f = tfs[i]
        denom = f + k1 * (1.0 - b + b * doc_lens[d] / avgdl)
        scores[d] += idfs[i] * f * (k1 + 1.0) / denom
    return scores


def dot_scores_numpy(matrix, query):
    """Dot product of every row of `matrix` against `query`."""
    return matrix @ query


def _dot_scores_loop(matrix, query):
    n, dim = matrix.shape
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        acc = 0.0
        for j in range(dim):
            acc += matrix[i, j] * query[j]
        out[i] = acc
    return out


bm25_scores_jit = None
dot_scores_jit = None

if not NUMBA_DISABLED:
    try:
        from numba import njit
    except ImportError:  # numpy fallback still works
        njit = None
    if njit is not None:
        bm25_scores_jit = njit(cache=True)(_bm25_scores_loop)
        dot_scores_jit = njit(cache=True)(_dot_scores_loop)

USING_NUMBA = bm25_scores_jit is not None

if USING_NUMBA:
    bm25_scores = bm25_scores_jit
    dot_scores = dot_scores_jit
else:
    bm25_scores = bm25_scores_numpy
    dot_scores = dot_scores_numpy
