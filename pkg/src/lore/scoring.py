"""Answer scoring: per-step token probabilities, mean score, and the
weighted LoR selection criterion.

LoR = w1 * mean_score + w2 / context_rank, defaults w1=0.8, w2=0.2. The mean
score averages, over the generated sequence, the vocabulary-softmax
probability of each emitted token. Context ranks are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class LorWeights:
    w1: float = 0.8
    w2: float = 0.2

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0:
            raise ValueError(f"weights must be non-negative, got ({self.w1}, {self.w2})")
        if self.w1 + self.w2 <= 0:
            raise ValueError("at least one weight must be positive")


@dataclass(frozen=True)
class ScoredAnswer:
    text: str
    mean_score: float
    context_rank: int
    lor_score: float
    passage_id: str


def step_probability(step_logits: Sequence[float], emitted_index: int) -> float:
    """Softmax probability of the emitted token at one decoding step.

    Uses max-subtraction for numerical stability; result is in (0, 1].
    """
    logits = np.asarray(step_logits, dtype=np.float64)
    if logits.ndim != 1 or logits.size == 0:
        raise ValueError("step_logits must be a non-empty vector")
    if not np.all(np.isfinite(logits)):
        raise ValueError("step_logits must be finite")
    if not 0 <= emitted_index < logits.size:
        raise IndexError(f"emitted_index {emitted_index} out of range for {logits.size} logits")
    shifted = np.exp(logits - logits.max())
    return float(shifted[emitted_index] / shifted.sum())


def mean_score(step_probs: Sequence[float]) -> float:
    """Arithmetic mean of per-step emitted-token probabilities."""
    if len(step_probs) == 0:
        raise ValueError("step_probs must be non-empty")
    return float(sum(step_probs) / len(step_probs))


def lor(mean: float, context_rank: int, weights: LorWeights = LorWeights()) -> float:
    """Weighted blend of generation confidence and retrieval rank."""
    if context_rank < 1:
        raise ValueError(f"context_rank must be >= 1, got {context_rank}")
    return weights.w1 * mean + weights.w2 / context_rank


def score_answer(
    text: str,
    step_probs: Sequence[float],
    context_rank: int,
    passage_id: str,
    weights: LorWeights = LorWeights(),
) -> ScoredAnswer:
    """Compute mean and LoR scores for one generated answer."""
    mean = mean_score(step_probs)
    return ScoredAnswer(
        text=text,
        mean_score=mean,
        context_rank=context_rank,
        lor_score=lor(mean, context_rank, weights),
        passage_id=passage_id,
    )


def select(answers: Sequence[ScoredAnswer]) -> ScoredAnswer:
    """Answer with maximal LoR; ties go to the smaller context rank, then
    lexicographically smaller text."""
    if not answers:
        raise ValueError("select requires at least one answer")
    return min(answers, key=lambda a: (-a.lor_score, a.context_rank, a.text))
