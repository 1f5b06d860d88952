"""Evaluation metrics: exact match, token F1, and ROUGE-L.

Answers are normalized the SQuAD way (lowercase, strip punctuation, drop the
articles a/an/the, collapse whitespace) and each metric takes the max over
the gold answers.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Sequence

_ARTICLES_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def normalize_answer(text: str) -> str:
    """Lower text and remove punctuation, articles and extra whitespace."""
    text = text.lower()
    text = text.translate(_PUNCT_TABLE)
    text = _ARTICLES_RE.sub(" ", text)
    return " ".join(text.split())


def exact_match(prediction: str, golds: Sequence[str]) -> int:
    """1 iff the normalized prediction equals any normalized gold."""
    if not golds:
        raise ValueError("golds must be non-empty")
    normalized = normalize_answer(prediction)
    return int(any(normalized == normalize_answer(g) for g in golds))


def _f1_single(prediction: str, gold: str) -> float:
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    # overlap counted with multiplicity
    counts: dict[str, int] = {}
    for t in pred_tokens:
        counts[t] = counts.get(t, 0) + 1
    same = 0
    for t in gold_tokens:
        if counts.get(t, 0) > 0:
            counts[t] -= 1
            same += 1
    if same == 0:
        return 0.0
    precision = same / len(pred_tokens)
    recall = same / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def f1(prediction: str, golds: Sequence[str]) -> float:
    """Max over golds of the token-multiset F1."""
    if not golds:
        raise ValueError("golds must be non-empty")
    return max(_f1_single(prediction, g) for g in golds)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(prediction: str, gold: str | Sequence[str]) -> float:
    """LCS F-measure over normalized tokens; max over golds if several."""
    if not isinstance(gold, str):
        return max(rouge_l(prediction, g) for g in gold) if gold else 0.0
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    if not pred_tokens and not gold_tokens:
        return 1.0
    lcs = _lcs_length(pred_tokens, gold_tokens)
    if lcs == 0:
        return 0.0
    precision = lcs / len(pred_tokens)
    recall = lcs / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class EvalRecord:
    question_id: str
    prediction: str
    golds: tuple[str, ...]
    em: int
    f1: float
    rouge_l: float


@dataclass(frozen=True)
class EvalReport:
    n: int
    em_pct: float
    f1_pct: float
    rouge_l_pct: float


def evaluate_prediction(question_id: str, prediction: str, golds: Sequence[str]) -> EvalRecord:
    """Score one prediction against its gold answers."""
    return EvalRecord(
        question_id=question_id,
        prediction=prediction,
        golds=tuple(golds),
        em=exact_match(prediction, golds),
        f1=f1(prediction, golds),
        rouge_l=rouge_l(prediction, tuple(golds)),
    )


def aggregate(records: Sequence[EvalRecord]) -> EvalReport:
    """Mean per-record values, expressed as percentages."""
    n = len(records)
    if n == 0:
        return EvalReport(n=0, em_pct=0.0, f1_pct=0.0, rouge_l_pct=0.0)
    return EvalReport(
        n=n,
        em_pct=100.0 * sum(r.em for r in records) / n,
        f1_pct=100.0 * sum(r.f1 for r in records) / n,
        rouge_l_pct=100.0 * sum(r.rouge_l for r in records) / n,
    )
