"""Exact cosine-similarity search over unit-normalized embedding vectors.

Vectors are normalized at build time, so cosine similarity reduces to a dot
product and the search order equals dot-product order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .fusion import RankedEntry, RankedList

MAGIC = "LOREIDX1 dense"


@dataclass(frozen=True)
class EmbeddingRecord:
    passage_id: str
    vector: tuple[float, ...]


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity q.d / (|q||d|); errors on mismatched dims or zeros."""
    ua = np.asarray(u, dtype=np.float64)
    va = np.asarray(v, dtype=np.float64)
    if ua.shape != va.shape or ua.ndim != 1:
        raise ValueError(f"dimension mismatch: {ua.shape} vs {va.shape}")
    nu = math.sqrt(float(ua @ ua))
    nv = math.sqrt(float(va @ va))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for zero vectors")
    value = float(ua @ va) / (nu * nv)
    return max(-1.0, min(1.0, value))


class DenseIndex:
    """Immutable store of unit vectors supporting exact top-n search."""

    def __init__(self, ids: list[str], matrix: np.ndarray):
        self.dim = int(matrix.shape[1])
        self._ids = ids
        self._ids_arr = np.array(ids)
        self._matrix = matrix

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def passage_ids(self) -> list[str]:
        return list(self._ids)

    def vector(self, passage_id: str) -> np.ndarray:
        try:
            i = self._ids.index(passage_id)
        except ValueError:
            raise KeyError(f"unknown passage id {passage_id!r}") from None
        return self._matrix[i].copy()

    def search(self, query_vector: Sequence[float], n: int) -> RankedList:
        """Top-n passages by cosine, descending; ties broken by passage id."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        q = np.asarray(query_vector, dtype=np.float64)
        if q.ndim != 1 or q.shape[0] != self.dim:
            raise ValueError(f"query has dim {q.shape}, index has dim {self.dim}")
        norm = math.sqrt(float(q @ q))
        if norm == 0.0:
            raise ValueError("query vector must be non-zero")
        scores = _kernels.dot_scores(self._matrix, q / norm)
        order = np.lexsort((self._ids_arr, -scores))
        entries = tuple(
            RankedEntry(passage_id=self._ids[i], score=float(scores[i]), rank=r + 1)
            for r, i in enumerate(order[:n])
        )
        return RankedList(retriever_id="dense", entries=entries)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(MAGIC + "\n")
            fh.write(json.dumps({"dim": self.dim, "num_records": len(self._ids)}) + "\n")
            for pid, row in zip(self._ids, self._matrix):
                fh.write(json.dumps({"id": pid, "vector": row.tolist()}) + "\n")


def build(records: Sequence[EmbeddingRecord]) -> DenseIndex:
    """Validate records, re-normalize vectors to unit length, and index them."""
    if not records:
        raise ValueError("cannot build a dense index from zero records")
    dim = len(records[0].vector)
    if dim < 1:
        raise ValueError("vectors must have dimension >= 1")
    ids: list[str] = []
    seen: set[str] = set()
    rows = np.empty((len(records), dim), dtype=np.float64)
    for i, record in enumerate(records):
        if len(record.vector) != dim:
            raise ValueError(
                f"record {record.passage_id!r} has dim {len(record.vector)}, expected {dim}"
            )
        if record.passage_id in seen:
            raise ValueError(f"duplicate passage id {record.passage_id!r}")
        seen.add(record.passage_id)
        row = np.asarray(record.vector, dtype=np.float64)
        norm = math.sqrt(float(row @ row))
        if norm == 0.0:
            raise ValueError(f"record {record.passage_id!r} has a zero vector")
        rows[i] = row / norm
        ids.append(record.passage_id)
    return DenseIndex(ids, rows)


def load_embeddings(path: str | Path) -> list[EmbeddingRecord]:
    """Parse JSONL records {id, vector: [...]}, validating one shared dim."""
    records: list[EmbeddingRecord] = []
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            if "id" not in record or "vector" not in record:
                raise ValueError(f"{path}: line {lineno}: record must have 'id' and 'vector'")
            vector = record["vector"]
            if not isinstance(vector, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in vector
            ):
                raise ValueError(f"{path}: line {lineno}: vector must be a list of numbers")
            if dim is None:
                dim = len(vector)
            elif len(vector) != dim:
                raise ValueError(
                    f"{path}: line {lineno}: vector has dim {len(vector)}, expected {dim}"
                )
            records.append(EmbeddingRecord(passage_id=record["id"], vector=tuple(vector)))
    if not records:
        raise ValueError(f"{path}: no embedding records found")
    return records


def load(path: str | Path) -> DenseIndex:
    """Load an index saved by DenseIndex.save; rejects wrong magic."""
    with open(path, encoding="utf-8") as fh:
        magic = fh.readline().rstrip("\n")
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        header = json.loads(fh.readline())
        ids: list[str] = []
        rows: list[list[float]] = []
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            ids.append(record["id"])
            rows.append(record["vector"])
    if len(ids) != header["num_records"]:
        raise ValueError(f"{path}: header says {header['num_records']} records, found {len(ids)}")
    matrix = np.asarray(rows, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != header["dim"]:
        raise ValueError(f"{path}: vectors inconsistent with header dim {header['dim']}")
    return DenseIndex(ids, matrix)
