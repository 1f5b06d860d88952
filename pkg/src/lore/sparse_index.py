"""Inverted index with Okapi BM25 scoring.

score(q, d) = sum over query terms t of
    IDF(t) * f(t,d) * (k1 + 1) / (f(t,d) + k1 * (1 - b + b * |d| / avgdl))

with IDF(t) = ln(1 + (N - n + 0.5) / (n + 0.5)), which stays non-negative
for terms occurring in every document.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .corpus import Corpus, tokenize
from .fusion import RankedEntry, RankedList

MAGIC = "LOREIDX1 sparse"


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


class SparseIndex:
    """Immutable BM25 index over a corpus.

    `postings` maps each term to its (passage_id, term_frequency) pairs in
    document insertion order; `doc_lengths` maps passage ids to token counts.
    """

    def __init__(
        self,
        postings: dict[str, list[tuple[str, int]]],
        doc_lengths: dict[str, int],
        avgdl: float,
        params: Bm25Params,
    ):
        self.postings = postings
        self.doc_lengths = doc_lengths
        self.avgdl = avgdl
        self.num_docs = len(doc_lengths)
        self.params = params

        self._ids = list(doc_lengths)
        self._pos = {pid: i for i, pid in enumerate(self._ids)}
        self._ids_arr = np.array(self._ids)
        self._len_arr = np.array([doc_lengths[pid] for pid in self._ids], dtype=np.float64)
        self._postings_arr = {
            term: (
                np.array([self._pos[pid] for pid, _ in plist], dtype=np.int64),
                np.array([tf for _, tf in plist], dtype=np.float64),
            )
            for term, plist in postings.items()
        }

    def idf(self, term: str) -> float:
        """Inverse document frequency; unseen terms use document frequency 0."""
        n = len(self.postings.get(term, ()))
        return math.log(1.0 + (self.num_docs - n + 0.5) / (n + 0.5))

    def score(self, query_tokens: list[str], passage_id: str) -> float:
        """BM25 score of one passage for the given query tokens.

        Tokens are counted with multiplicity; terms absent from the passage
        contribute 0.
        """
        if passage_id not in self.doc_lengths:
            raise KeyError(f"unknown passage id {passage_id!r}")
        k1, b = self.params.k1, self.params.b
        length = self.doc_lengths[passage_id]
        total = 0.0
        for token in query_tokens:
            plist = self.postings.get(token)
            if not plist:
                continue
            tf = 0
            for pid, freq in plist:
                if pid == passage_id:
                    tf = freq
                    break
            if tf == 0:
                continue
            denom = tf + k1 * (1.0 - b + b * length / self.avgdl)
            total += self.idf(token) * tf * (k1 + 1.0) / denom
        return total

    def search(self, query: str, n: int) -> RankedList:
        """Top-n passages by BM25 score, ties broken by ascending passage id.

        Passages matching no query term (score 0) are excluded; the result
        may be shorter than n or empty.
        """
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        tokens = tokenize(query)
        idx_parts, tf_parts, idf_parts = [], [], []
        for token in tokens:
            arrs = self._postings_arr.get(token)
            if arrs is None:
                continue
            doc_idx, tfs = arrs
            idx_parts.append(doc_idx)
            tf_parts.append(tfs)
            idf_parts.append(np.full(doc_idx.shape[0], self.idf(token)))
        if not idx_parts:
            return RankedList(retriever_id="sparse", entries=())

        doc_idx = np.concatenate(idx_parts)
        tfs = np.concatenate(tf_parts)
        idfs = np.concatenate(idf_parts)
        scores = _kernels.bm25_scores(
            self.num_docs, doc_idx, tfs, idfs, self._len_arr,
            self.avgdl, self.params.k1, self.params.b,
        )
        candidates = np.flatnonzero(scores > 0.0)
        order = candidates[np.lexsort((self._ids_arr[candidates], -scores[candidates]))]
        entries = tuple(
            RankedEntry(passage_id=self._ids[i], score=float(scores[i]), rank=r + 1)
            for r, i in enumerate(order[:n])
        )
        return RankedList(retriever_id="sparse", entries=entries)

    def save(self, path: str | Path) -> None:
        """Persist to a single UTF-8 file: magic line, JSON header, one JSON
        line per term's postings."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(MAGIC + "\n")
            header = {
                "num_docs": self.num_docs,
                "avgdl": self.avgdl,
                "k1": self.params.k1,
                "b": self.params.b,
            }
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for term, plist in self.postings.items():
                fh.write(json.dumps({"term": term, "postings": [[pid, tf] for pid, tf in plist]}) + "\n")


def build(corpus: Corpus, params: Bm25Params | None = None) -> SparseIndex:
    """Build the inverted index; deterministic given corpus order."""
    if len(corpus) == 0:
        raise ValueError("cannot build an index over an empty corpus")
    params = params or Bm25Params()
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    for passage in corpus:
        tokens = tokenize(passage.text)
        doc_lengths[passage.id] = len(tokens)
        counts: dict[str, int] = {}
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
        for token, tf in counts.items():
            postings.setdefault(token, []).append((passage.id, tf))
    avgdl = sum(doc_lengths.values()) / len(doc_lengths)
    return SparseIndex(postings, doc_lengths, avgdl, params)


def load(path: str | Path) -> SparseIndex:
    """Load an index saved by SparseIndex.save; rejects wrong magic.

    Document lengths are recovered exactly from the postings: every token of
    a passage is counted in exactly one term's frequency.
    """
    with open(path, encoding="utf-8") as fh:
        magic = fh.readline().rstrip("\n")
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        header = json.loads(fh.readline())
        postings: dict[str, list[tuple[str, int]]] = {}
        doc_lengths: dict[str, int] = {}
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            plist = [(pid, int(tf)) for pid, tf in record["postings"]]
            postings[record["term"]] = plist
            for pid, tf in plist:
                doc_lengths[pid] = doc_lengths.get(pid, 0) + tf
    doc_lengths = {pid: doc_lengths[pid] for pid in sorted(doc_lengths)}
    if len(doc_lengths) != header["num_docs"]:
        raise ValueError(
            f"{path}: header says {header['num_docs']} docs, postings cover {len(doc_lengths)}"
        )
    index = SparseIndex(
        postings,
        doc_lengths,
        float(header["avgdl"]),
        Bm25Params(k1=float(header["k1"]), b=float(header["b"])),
    )
    recomputed = sum(doc_lengths.values()) / len(doc_lengths)
    if abs(recomputed - index.avgdl) > 1e-9:
        raise ValueError(f"{path}: header avgdl {index.avgdl} inconsistent with postings")
    return index
