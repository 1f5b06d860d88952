"""Reciprocal rank fusion of retriever rankings.

RRF(d) = sum over lists of 1/(rank(d) + k); documents absent from a list
contribute nothing for it. Scores are kept in exact float arithmetic with no
intermediate rounding, so the fused order is always consistent with the
scores themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_RRF_K = 60


@dataclass(frozen=True)
class RankedEntry:
    passage_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    """One retriever's ordered output; ranks are 1-based and gap-free."""

    retriever_id: str
    entries: tuple[RankedEntry, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for i, entry in enumerate(self.entries):
            if entry.rank != i + 1:
                raise ValueError(
                    f"{self.retriever_id}: rank {entry.rank} at position {i}; "
                    "ranks must be 1-based and gap-free"
                )
            if entry.passage_id in seen:
                raise ValueError(f"{self.retriever_id}: duplicate passage {entry.passage_id!r}")
            seen.add(entry.passage_id)

    def __len__(self) -> int:
        return len(self.entries)

    def rank_of(self, passage_id: str) -> int | None:
        for entry in self.entries:
            if entry.passage_id == passage_id:
                return entry.rank
        return None


@dataclass(frozen=True)
class FusedContext:
    """A passage with its fused score and 1-based context rank."""

    passage_id: str
    rrf_score: float
    context_rank: int


def rrf_score(ranks: Iterable[int | None], k: int = DEFAULT_RRF_K) -> float:
    """Sum 1/(rank + k) over the present ranks; None means absent."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    total = 0.0
    for rank in ranks:
        if rank is None:
            continue
        if rank < 1:
            raise ValueError(f"ranks must be >= 1, got {rank}")
        total += 1.0 / (rank + k)
    return total


def fuse(lists: Sequence[RankedList], k: int = DEFAULT_RRF_K) -> list[FusedContext]:
    """Fuse ranked lists into a single ranking ordered by RRF score.

    Ties break first on the best single-list rank, then on passage id, so the
    result is independent of the order the lists are supplied in.
    """
    if not lists:
        raise ValueError("fuse requires at least one ranked list")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    ranks_by_id: dict[str, list[int]] = {}
    for ranked in lists:
        for entry in ranked.entries:
            ranks_by_id.setdefault(entry.passage_id, []).append(entry.rank)

    # summing in sorted-rank order makes the result exactly independent of
    # the order the lists were supplied in (float addition is not associative)
    scored = [
        (rrf_score(sorted(ranks), k), min(ranks), pid)
        for pid, ranks in ranks_by_id.items()
    ]
    scored.sort(key=lambda item: (-item[0], item[1], item[2]))
    return [
        FusedContext(passage_id=pid, rrf_score=score, context_rank=i + 1)
        for i, (score, _best, pid) in enumerate(scored)
    ]
