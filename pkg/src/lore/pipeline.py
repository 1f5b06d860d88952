"""End-to-end flow: retrieve with both indexes, fuse, generate one candidate
answer per top-ranked context, score, and select by LoR."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import reader as reader_mod
from .corpus import Corpus, QaPair
from .dense_index import DenseIndex
from .fusion import FusedContext, fuse
from .metrics import EvalRecord, EvalReport, aggregate, evaluate_prediction
from .reader import ReaderConfig, ReaderError
from .scoring import LorWeights, ScoredAnswer, score_answer, select
from .sparse_index import Bm25Params, SparseIndex


class NoEvidenceError(Exception):
    """Neither retriever returned any context for the query."""


class AnswerGenerationError(Exception):
    """Every retrieved context failed generation after retries."""


@dataclass
class PipelineConfig:
    top_k: int = 10
    rrf_k: int = 60
    bm25: Bm25Params = field(default_factory=Bm25Params)
    weights: LorWeights = field(default_factory=LorWeights)
    retrieval_depth: int = 50
    parallelism: int = 1

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if self.retrieval_depth < self.top_k:
            raise ValueError(
                f"retrieval_depth ({self.retrieval_depth}) must be >= top_k ({self.top_k})"
            )
        if self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")


@dataclass
class Indexes:
    """The built retrieval state a pipeline runs against.

    dense may be None (sparse-only degraded mode); exact cosine search over a
    built dense index always returns candidates, so a query can only come up
    empty-handed when the dense side is absent.
    """

    corpus: Corpus
    sparse: SparseIndex
    dense: DenseIndex | None


@dataclass
class AnswerTrace:
    query: str
    fused: list[FusedContext]
    candidates: list[ScoredAnswer]  # ordered by context_rank
    selected: ScoredAnswer


def answer_question(
    query: str, config: PipelineConfig, indexes: Indexes, reader: ReaderConfig
) -> AnswerTrace:
    """Answer one query; raises NoEvidenceError when nothing is retrieved.

    A context whose generation fails after retries is dropped; if all of them
    fail, AnswerGenerationError is raised.
    """
    lists = []
    sparse_list = indexes.sparse.search(query, config.retrieval_depth)
    if len(sparse_list) > 0:
        lists.append(sparse_list)
    if indexes.dense is not None:
        query_vector = reader_mod.embed(reader, [query])[0]
        dense_list = indexes.dense.search(query_vector, config.retrieval_depth)
        if len(dense_list) > 0:
            lists.append(dense_list)
    if not lists:
        raise NoEvidenceError(f"no passage matched query {query!r}")
    fused = fuse(lists, config.rrf_k)
    contexts = fused[: config.top_k]

    def generate_one(ctx: FusedContext):
        passage = indexes.corpus.get_passage(ctx.passage_id)
        return reader_mod.generate(reader, query, passage)

    # results are keyed by context rank, so completion order cannot matter
    results: list[tuple[FusedContext, object]] = []
    if config.parallelism == 1 or len(contexts) == 1:
        for ctx in contexts:
            try:
                results.append((ctx, generate_one(ctx)))
            except ReaderError as exc:
                results.append((ctx, exc))
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            futures = [(ctx, pool.submit(generate_one, ctx)) for ctx in contexts]
            for ctx, future in futures:
                try:
                    results.append((ctx, future.result()))
                except ReaderError as exc:
                    results.append((ctx, exc))

    candidates: list[ScoredAnswer] = []
    for ctx, outcome in sorted(results, key=lambda item: item[0].context_rank):
        if isinstance(outcome, ReaderError):
            continue
        if not outcome.step_probs:
            continue  # empty generation carries no confidence signal
        candidates.append(
            score_answer(
                text=outcome.text,
                step_probs=outcome.step_probs,
                context_rank=ctx.context_rank,
                passage_id=ctx.passage_id,
                weights=config.weights,
            )
        )
    if not candidates:
        raise AnswerGenerationError(f"all {len(contexts)} contexts failed for query {query!r}")
    return AnswerTrace(query=query, fused=fused, candidates=candidates, selected=select(candidates))


def _trace_line(question_id: str, qa: QaPair, trace: AnswerTrace | None, error: str | None) -> dict:
    line = {
        "question_id": question_id,
        "query": qa.question,
        "selected_answer": None,
        "lor": None,
        "mean_score": None,
        "context_rank": None,
        "em": 0,
        "f1": 0.0,
        "rouge_l": 0.0,
    }
    if trace is not None:
        line.update(
            selected_answer=trace.selected.text,
            lor=trace.selected.lor_score,
            mean_score=trace.selected.mean_score,
            context_rank=trace.selected.context_rank,
        )
    if error is not None:
        line["error"] = error
    return line


def evaluate(
    dataset: Sequence[QaPair],
    config: PipelineConfig,
    indexes: Indexes,
    reader: ReaderConfig,
    trace_path: str | Path | None = None,
    summary_path: str | Path | None = None,
) -> EvalReport:
    """Run answer_question over a dataset and aggregate EM/F1/ROUGE-L.

    Questions that fail (no evidence, generation failure) are counted as
    zero-score records, never dropped. When paths are given, a per-record
    JSONL trace and a JSON summary are written.
    """
    records: list[EvalRecord] = []
    lines: list[dict] = []
    failures = 0
    for i, qa in enumerate(dataset):
        question_id = f"q{i:05d}"
        try:
            trace = answer_question(qa.question, config, indexes, reader)
        except (NoEvidenceError, AnswerGenerationError, ReaderError) as exc:
            failures += 1
            records.append(
                EvalRecord(
                    question_id=question_id,
                    prediction="",
                    golds=tuple(qa.gold_answers),
                    em=0,
                    f1=0.0,
                    rouge_l=0.0,
                )
            )
            lines.append(_trace_line(question_id, qa, None, type(exc).__name__))
            continue
        record = evaluate_prediction(question_id, trace.selected.text, qa.gold_answers)
        records.append(record)
        line = _trace_line(question_id, qa, trace, None)
        line.update(em=record.em, f1=record.f1, rouge_l=record.rouge_l)
        lines.append(line)

    report = aggregate(records)
    if trace_path is not None:
        with open(trace_path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(json.dumps(line, sort_keys=True) + "\n")
    if summary_path is not None:
        summary = {
            "n": report.n,
            "em_pct": report.em_pct,
            "f1_pct": report.f1_pct,
            "rouge_l_pct": report.rouge_l_pct,
            "failures": failures,
        }
        with open(summary_path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(summary, sort_keys=True) + "\n")
    return report
