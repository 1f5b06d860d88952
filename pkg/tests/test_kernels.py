"""The numba and numpy kernel paths must agree; the env flag selects one."""

import os
import subprocess
import sys

import numpy as np
import pytest

from lore import _kernels


def _random_bm25_inputs(rng, num_docs=40, num_postings=200):
    doc_idx = rng.integers(0, num_docs, size=num_postings).astype(np.int64)
    tfs = rng.integers(1, 8, size=num_postings).astype(np.float64)
    idfs = rng.uniform(0.01, 3.0, size=num_postings)
    doc_lens = rng.integers(1, 60, size=num_docs).astype(np.float64)
    avgdl = float(doc_lens.mean())
    return doc_idx, tfs, idfs, doc_lens, avgdl


@pytest.mark.skipif(not _kernels.USING_NUMBA, reason="numba path not active")
def test_bm25_paths_agree():
    rng = np.random.default_rng(11)
    for _ in range(20):
        doc_idx, tfs, idfs, doc_lens, avgdl = _random_bm25_inputs(rng)
        a = _kernels.bm25_scores_numpy(40, doc_idx, tfs, idfs, doc_lens, avgdl, 1.2, 0.75)
        b = _kernels.bm25_scores_jit(40, doc_idx, tfs, idfs, doc_lens, avgdl, 1.2, 0.75)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


@pytest.mark.skipif(not _kernels.USING_NUMBA, reason="numba path not active")
def test_dot_paths_agree():
    rng = np.random.default_rng(12)
    for _ in range(10):
        matrix = rng.standard_normal((50, 16))
        query = rng.standard_normal(16)
        np.testing.assert_allclose(
            _kernels.dot_scores_numpy(matrix, query),
            _kernels.dot_scores_jit(matrix, query),
            rtol=0,
            atol=1e-9,
        )


def test_env_flag_disables_numba():
    env = dict(os.environ, LORE_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from lore import _kernels; print(_kernels.USING_NUMBA)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "False"


def test_bm25_numpy_accumulates_repeated_docs():
    # two postings against the same document must both contribute
    doc_idx = np.array([0, 0], dtype=np.int64)
    tfs = np.array([1.0, 2.0])
    idfs = np.array([1.0, 1.0])
    doc_lens = np.array([5.0])
    scores = _kernels.bm25_scores_numpy(1, doc_idx, tfs, idfs, doc_lens, 5.0, 1.2, 0.75)
    one = 1.0 * 2.2 / (1.0 + 1.2)
    two = 2.0 * 2.2 / (2.0 + 1.2)
    assert scores[0] == pytest.approx(one + two, abs=1e-12)
