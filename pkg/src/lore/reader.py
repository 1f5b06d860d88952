"""Generator-model client: given a query and one context, produce an answer
plus the per-step probability of each emitted token.

Two modes, exactly one of which must be configured:
  - HTTP: POST /generate and /embed against an inference sidecar (UTF-8 JSON).
  - stub: a lookup table keyed by (query, passage_id), for hermetic tests.
    Misses fall back to echoing the first sentence of the context with
    step_probs=[0.5]; embeddings are hash-derived unit vectors.
"""

from __future__ import annotations

import hashlib
import json
import re
import time
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import requests

from .corpus import Passage

DEFAULT_PROMPT_TEMPLATE = "question: {query} context: {context}"
STUB_EMBED_DIM = 32

_FIRST_SENTENCE_RE = re.compile(r".+?[.!?](?=\s|$)", re.S)


class ReaderError(RuntimeError):
    """Transport or protocol failure talking to the generator endpoint.

    Retryable: callers retry up to the configured budget before giving up.
    """


@dataclass
class ReaderConfig:
    endpoint_url: str | None = None
    stub_table: Mapping[tuple[str, str], tuple[str, Sequence[float]]] | None = None
    max_tokens: int = 64
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    timeout: float = 30.0
    retries: int = 2
    retry_wait: float = 0.05
    embed_dim: int = STUB_EMBED_DIM  # stub mode only; HTTP mode reports its own

    def __post_init__(self):
        if (self.endpoint_url is None) == (self.stub_table is None):
            raise ValueError("configure exactly one of endpoint_url or stub_table")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if "{query}" not in self.prompt_template or "{context}" not in self.prompt_template:
            raise ValueError("prompt_template must contain {query} and {context}")


def stub_config(
    table: Mapping[tuple[str, str], tuple[str, Sequence[float]]] | None = None, **kwargs
) -> ReaderConfig:
    """Stub-mode config; an empty table means every lookup falls back."""
    return ReaderConfig(stub_table=dict(table or {}), **kwargs)


@dataclass(frozen=True)
class GeneratedAnswer:
    text: str
    step_probs: tuple[float, ...]
    context_rank: int | None = None  # attached by the pipeline


def generate(config: ReaderConfig, query: str, context: Passage) -> GeneratedAnswer:
    """One answer for (query, context), with per-step emitted-token probabilities."""
    if not query:
        raise ValueError("query must be non-empty")
    if config.stub_table is not None:
        return _stub_generate(config, query, context)
    return _http_generate(config, query, context)


def embed(config: ReaderConfig, texts: Sequence[str]) -> list[list[float]]:
    """One vector per text, all of equal dimension."""
    if not texts:
        raise ValueError("texts must be non-empty")
    if config.stub_table is not None:
        return [_stub_embedding(t, config.embed_dim) for t in texts]
    return _http_embed(config, texts)


def _first_sentence(text: str) -> str:
    match = _FIRST_SENTENCE_RE.match(text.strip())
    return match.group(0) if match else text.strip()


def _stub_generate(config: ReaderConfig, query: str, context: Passage) -> GeneratedAnswer:
    hit = config.stub_table.get((query, context.id))
    if hit is None:
        return GeneratedAnswer(text=_first_sentence(context.text), step_probs=(0.5,))
    text, probs = hit
    return GeneratedAnswer(text=text, step_probs=tuple(float(p) for p in probs))


def _stub_embedding(text: str, dim: int) -> list[float]:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
    vec = rng.standard_normal(dim)
    return (vec / np.linalg.norm(vec)).tolist()


def _post_with_retries(config: ReaderConfig, path: str, body: dict) -> dict:
    url = config.endpoint_url.rstrip("/") + path
    last: Exception | None = None
    for attempt in range(config.retries + 1):
        if attempt > 0:
            time.sleep(config.retry_wait)
        try:
            response = requests.post(url, json=body, timeout=config.timeout)
        except requests.RequestException as exc:
            last = ReaderError(f"POST {url} failed: {exc}")
            continue
        if response.status_code != 200:
            last = ReaderError(f"POST {url} returned {response.status_code}")
            continue
        try:
            return response.json()
        except (json.JSONDecodeError, ValueError):
            last = ReaderError(f"POST {url} returned a non-JSON body")
            continue
    raise last


def _http_generate(config: ReaderConfig, query: str, context: Passage) -> GeneratedAnswer:
    prompt = config.prompt_template.format(query=query, context=context.text)
    payload = _post_with_retries(
        config, "/generate", {"prompt": prompt, "max_tokens": config.max_tokens}
    )
    try:
        text = payload["answer"]
        probs = tuple(float(p) for p in payload["token_probs"])
    except (KeyError, TypeError, ValueError):
        raise ReaderError(f"malformed /generate response: {payload!r}") from None
    if not isinstance(text, str) or any(not (0.0 < p <= 1.0) for p in probs):
        raise ReaderError(f"malformed /generate response: {payload!r}")
    return GeneratedAnswer(text=text, step_probs=probs)


def _http_embed(config: ReaderConfig, texts: Sequence[str]) -> list[list[float]]:
    payload = _post_with_retries(config, "/embed", {"texts": list(texts)})
    try:
        vectors = [[float(x) for x in vec] for vec in payload["vectors"]]
        dim = int(payload["dim"])
    except (KeyError, TypeError, ValueError):
        raise ReaderError(f"malformed /embed response: {payload!r}") from None
    if len(vectors) != len(texts) or any(len(v) != dim for v in vectors):
        raise ReaderError("embed response vectors inconsistent with reported dim")
    return vectors
