"""Hybrid-retrieval question answering: BM25 + dense cosine retrieval fused
with reciprocal ranks, per-context answer generation, and LoR selection."""

from .corpus import Corpus, CorpusStats, Passage, QaPair, ingest_jsonl, load_squad, tokenize
from .dense_index import DenseIndex, EmbeddingRecord, cosine, load_embeddings
from .fusion import DEFAULT_RRF_K, FusedContext, RankedEntry, RankedList, fuse, rrf_score
from .metrics import (
    EvalRecord,
    EvalReport,
    aggregate,
    evaluate_prediction,
    exact_match,
    f1,
    normalize_answer,
    rouge_l,
)
from .pipeline import (
    AnswerGenerationError,
    AnswerTrace,
    Indexes,
    NoEvidenceError,
    PipelineConfig,
    answer_question,
    evaluate,
)
from .reader import GeneratedAnswer, ReaderConfig, ReaderError, embed, generate, stub_config
from .scoring import LorWeights, ScoredAnswer, lor, mean_score, score_answer, select, step_probability
from .sparse_index import Bm25Params, SparseIndex

__all__ = [
    "Bm25Params",
    "Corpus",
    "CorpusStats",
    "DEFAULT_RRF_K",
    "DenseIndex",
    "EmbeddingRecord",
    "EvalRecord",
    "EvalReport",
    "FusedContext",
    "GeneratedAnswer",
    "Indexes",
    "LorWeights",
    "NoEvidenceError",
    "AnswerGenerationError",
    "AnswerTrace",
    "Passage",
    "PipelineConfig",
    "QaPair",
    "RankedEntry",
    "RankedList",
    "ReaderConfig",
    "ReaderError",
    "ScoredAnswer",
    "SparseIndex",
    "aggregate",
    "answer_question",
    "cosine",
    "embed",
    "evaluate",
    "evaluate_prediction",
    "exact_match",
    "f1",
    "fuse",
    "generate",
    "ingest_jsonl",
    "load_embeddings",
    "load_squad",
    "lor",
    "mean_score",
    "normalize_answer",
    "rouge_l",
    "rrf_score",
    "score_answer",
    "select",
    "step_probability",
    "stub_config",
    "tokenize",
]
