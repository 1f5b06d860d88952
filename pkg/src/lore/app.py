"""Operational shell: CLI subcommands, JSON config, and the HTTP QA service.

Config resolution: --config flag, else the LORE_CONFIG env var, else
./lore.json if present, else built-in defaults. CLI flags override file
values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel

from . import dense_index, pipeline, reader, sparse_index
from .corpus import Corpus, ingest_jsonl, load_qa_jsonl, load_squad
from .pipeline import (
    AnswerGenerationError,
    Indexes,
    NoEvidenceError,
    PipelineConfig,
    answer_question,
    evaluate,
)
from .reader import ReaderConfig, ReaderError
from .scoring import LorWeights
from .sparse_index import Bm25Params

SPARSE_FILE = "sparse.idx"
DENSE_FILE = "dense.idx"
CONFIG_ENV = "LORE_CONFIG"
DEFAULT_CONFIG_FILE = "lore.json"


@dataclass
class AppConfig:
    corpus_path: str | None = None
    embeddings_path: str | None = None
    index_dir: str | None = None
    reader_endpoint: str | None = None
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    port: int = 8080
    stub_table: dict[tuple[str, str], tuple[str, list[float]]] = field(default_factory=dict)
    max_failure_rate: float = 0.0
    reader_max_tokens: int = 64

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port must be in [1, 65535], got {self.port}")


def _pipeline_from_dict(raw: dict) -> PipelineConfig:
    bm25 = Bm25Params(**raw.get("bm25", {}))
    weights = LorWeights(**raw.get("weights", {}))
    kwargs = {k: raw[k] for k in ("top_k", "rrf_k", "retrieval_depth", "parallelism") if k in raw}
    return PipelineConfig(bm25=bm25, weights=weights, **kwargs)


def _stub_table_from_dict(raw: dict) -> dict[tuple[str, str], tuple[str, list[float]]]:
    # config JSON nests the table as {query: {passage_id: {answer, step_probs}}}
    table: dict[tuple[str, str], tuple[str, list[float]]] = {}
    for query, per_passage in raw.items():
        for pid, entry in per_passage.items():
            table[(query, pid)] = (entry["answer"], [float(p) for p in entry["step_probs"]])
    return table


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load AppConfig from JSON; missing file with an explicit path is an error."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
        if path is None:
            path = DEFAULT_CONFIG_FILE if Path(DEFAULT_CONFIG_FILE).exists() else None
    if path is None:
        return AppConfig()
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return AppConfig(
        corpus_path=raw.get("corpus_path"),
        embeddings_path=raw.get("embeddings_path"),
        index_dir=raw.get("index_dir"),
        reader_endpoint=raw.get("reader_endpoint"),
        pipeline=_pipeline_from_dict(raw.get("pipeline", {})),
        port=raw.get("port", 8080),
        stub_table=_stub_table_from_dict(raw.get("stub_table", {})),
        max_failure_rate=raw.get("max_failure_rate", 0.0),
        reader_max_tokens=raw.get("reader_max_tokens", 64),
    )


def _reader_config(config: AppConfig, embed_dim: int | None = None) -> ReaderConfig:
    if config.reader_endpoint:
        return ReaderConfig(
            endpoint_url=config.reader_endpoint, max_tokens=config.reader_max_tokens
        )
    kwargs = {"max_tokens": config.reader_max_tokens}
    if embed_dim is not None:
        kwargs["embed_dim"] = embed_dim
    return reader.stub_config(config.stub_table, **kwargs)


def _load_indexes(config: AppConfig) -> Indexes:
    if not config.corpus_path:
        raise ValueError("corpus_path is required to answer queries")
    if not config.index_dir:
        raise ValueError("index_dir is required to answer queries")
    corpus = ingest_jsonl(config.corpus_path)
    sparse = sparse_index.load(Path(config.index_dir) / SPARSE_FILE)
    dense_path = Path(config.index_dir) / DENSE_FILE
    dense = dense_index.load(dense_path) if dense_path.exists() else None
    return Indexes(corpus=corpus, sparse=sparse, dense=dense)


def cli_index(args: argparse.Namespace) -> int:
    """Build and persist both indexes; print corpus stats as JSON."""
    config = load_config(args.config)
    corpus_path = args.corpus or config.corpus_path
    embeddings_path = args.embeddings or config.embeddings_path
    out_dir = args.out or config.index_dir
    if not corpus_path or not embeddings_path or not out_dir:
        print("index requires --corpus, --embeddings and --out", file=sys.stderr)
        return 2
    try:
        corpus = ingest_jsonl(corpus_path)
        records = dense_index.load_embeddings(embeddings_path)
        unknown = [r.passage_id for r in records if r.passage_id not in corpus]
        if unknown:
            raise ValueError(f"embeddings reference unknown passage ids: {unknown[:5]}")
        sparse = sparse_index.build(corpus, config.pipeline.bm25)
        dense = dense_index.build(records)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sparse.save(out / SPARSE_FILE)
    dense.save(out / DENSE_FILE)
    stats = corpus.stats()
    print(
        json.dumps(
            {
                "num_passages": stats.num_passages,
                "avgdl": stats.avgdl,
                "vocab_size": stats.vocab_size,
            },
            sort_keys=True,
        )
    )
    return 0


def _trace_payload(trace: pipeline.AnswerTrace) -> dict:
    return {
        "selected_answer": trace.selected.text,
        "lor": trace.selected.lor_score,
        "mean_score": trace.selected.mean_score,
        "context_rank": trace.selected.context_rank,
        "contexts": [
            {"passage_id": c.passage_id, "rrf_score": c.rrf_score, "context_rank": c.context_rank}
            for c in trace.fused
        ],
    }


def cli_query(args: argparse.Namespace) -> int:
    """Answer one question and print the selection plus fused contexts."""
    config = load_config(args.config)
    if args.index_dir:
        config.index_dir = args.index_dir
    if args.corpus:
        config.corpus_path = args.corpus
    pipe = config.pipeline
    if args.top_k is not None:
        pipe = PipelineConfig(
            top_k=args.top_k,
            rrf_k=pipe.rrf_k,
            bm25=pipe.bm25,
            weights=pipe.weights,
            retrieval_depth=max(pipe.retrieval_depth, args.top_k),
            parallelism=pipe.parallelism,
        )
    try:
        indexes = _load_indexes(config)
        reader_cfg = _reader_config(
            config, embed_dim=indexes.dense.dim if indexes.dense else None
        )
        trace = answer_question(args.question, pipe, indexes, reader_cfg)
    except NoEvidenceError:
        print(json.dumps({"no_evidence": True}, sort_keys=True))
        return 0
    except (OSError, ValueError, ReaderError, AnswerGenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(_trace_payload(trace), sort_keys=True))
    return 0


def cli_eval(args: argparse.Namespace) -> int:
    """Evaluate a dataset; write trace JSONL + summary JSON under --out."""
    config = load_config(args.config)
    dataset_path = Path(args.dataset)
    out_dir = Path(args.out)
    max_failure_rate = (
        args.max_failure_rate if args.max_failure_rate is not None else config.max_failure_rate
    )
    try:
        if dataset_path.suffix == ".jsonl":
            dataset = load_qa_jsonl(dataset_path)
        else:
            _, dataset = load_squad(dataset_path)
        indexes = _load_indexes(config)
        reader_cfg = _reader_config(
            config, embed_dim=indexes.dense.dim if indexes.dense else None
        )
        out_dir.mkdir(parents=True, exist_ok=True)
        report = evaluate(
            dataset,
            config.pipeline,
            indexes,
            reader_cfg,
            trace_path=out_dir / "trace.jsonl",
            summary_path=out_dir / "summary.json",
        )
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"EM {report.em_pct:.2f}  F1 {report.f1_pct:.2f}  ROUGE-L {report.rouge_l_pct:.2f}")
    with open(out_dir / "summary.json", encoding="utf-8") as fh:
        failures = json.load(fh)["failures"]
    if report.n and failures / report.n > max_failure_rate:
        print(f"error: {failures}/{report.n} questions failed", file=sys.stderr)
        return 1
    return 0


class AskRequest(BaseModel):
    question: str
    top_k: int | None = None


def create_app(config: AppConfig):
    """FastAPI application over loaded indexes (read-only, shared)."""
    from fastapi import FastAPI, Request
    from fastapi.exceptions import RequestValidationError
    from fastapi.responses import JSONResponse

    indexes = _load_indexes(config)
    reader_cfg = _reader_config(config, embed_dim=indexes.dense.dim if indexes.dense else None)
    app = FastAPI()

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors())})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/ask")
    def ask(body: AskRequest):
        pipe = config.pipeline
        if body.top_k is not None:
            if body.top_k < 1:
                return JSONResponse(status_code=400, content={"detail": "top_k must be >= 1"})
            pipe = PipelineConfig(
                top_k=body.top_k,
                rrf_k=pipe.rrf_k,
                bm25=pipe.bm25,
                weights=pipe.weights,
                retrieval_depth=max(pipe.retrieval_depth, body.top_k),
                parallelism=pipe.parallelism,
            )
        try:
            trace = answer_question(body.question, pipe, indexes, reader_cfg)
        except NoEvidenceError:
            return JSONResponse(status_code=422, content={"detail": "no evidence retrieved"})
        except (ReaderError, AnswerGenerationError) as exc:
            return JSONResponse(status_code=503, content={"detail": str(exc)})
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        payload = _trace_payload(trace)
        payload["answer"] = payload.pop("selected_answer")
        payload["lor_score"] = payload.pop("lor")
        return payload

    return app


def cli_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = load_config(args.config)
    if args.port is not None:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host="0.0.0.0", port=config.port)
    return 0


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lore", description=__doc__)
    parser.add_argument("--config", help="path to a JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build and persist both indexes")
    p_index.add_argument("--corpus", help="passages JSONL")
    p_index.add_argument("--embeddings", help="embeddings JSONL")
    p_index.add_argument("--out", help="output index directory")
    p_index.set_defaults(func=cli_index)

    p_query = sub.add_parser("query", help="answer a single question")
    p_query.add_argument("question")
    p_query.add_argument("--top-k", type=_positive_int, default=None)
    p_query.add_argument("--index-dir", default=None)
    p_query.add_argument("--corpus", default=None)
    p_query.set_defaults(func=cli_query)

    p_eval = sub.add_parser("eval", help="evaluate a QA dataset")
    p_eval.add_argument("--dataset", required=True, help="SQuAD JSON or QaPair JSONL")
    p_eval.add_argument("--out", required=True, help="output directory for trace and summary")
    p_eval.add_argument("--max-failure-rate", type=float, default=None)
    p_eval.set_defaults(func=cli_eval)

    p_serve = sub.add_parser("serve", help="run the HTTP QA service")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.set_defaults(func=cli_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
