"""Passage corpus: ingestion, tokenization, and lookup by id."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

_TOKEN_RE = re.compile(r"[^\W_]+")  # unicode alphanumeric runs, no underscore


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; empty tokens dropped."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Passage:
    """One retrievable text unit."""

    id: str
    title: str
    text: str
    token_count: int


@dataclass(frozen=True)
class QaPair:
    question: str
    gold_answers: tuple[str, ...]
    passage_id: str | None = None


@dataclass(frozen=True)
class CorpusStats:
    num_passages: int
    avgdl: float
    vocab_size: int


def make_passage(passage_id: str, title: str, text: str) -> Passage:
    """Build a Passage, validating id/text and computing the token count."""
    if not passage_id:
        raise ValueError("passage id must be non-empty")
    if not text:
        raise ValueError(f"passage {passage_id!r}: text must be non-empty")
    tokens = tokenize(text)
    if not tokens:
        raise ValueError(f"passage {passage_id!r}: text has no tokens")
    return Passage(id=passage_id, title=title, text=text, token_count=len(tokens))


class Corpus:
    """Immutable-after-ingestion store of passages, indexed by id."""

    def __init__(self, passages: list[Passage]):
        if not passages:
            raise ValueError("corpus must contain at least one passage")
        self._passages: list[Passage] = []
        self._by_id: dict[str, Passage] = {}
        for p in passages:
            if p.id in self._by_id:
                raise ValueError(f"duplicate passage id {p.id!r}")
            self._by_id[p.id] = p
            self._passages.append(p)

    def __len__(self) -> int:
        return len(self._passages)

    def __contains__(self, passage_id: str) -> bool:
        return passage_id in self._by_id

    def __iter__(self):
        return iter(self._passages)

    @property
    def passages(self) -> list[Passage]:
        return list(self._passages)

    def get_passage(self, passage_id: str) -> Passage:
        try:
            return self._by_id[passage_id]
        except KeyError:
            raise KeyError(f"unknown passage id {passage_id!r}") from None

    def stats(self) -> CorpusStats:
        total = sum(p.token_count for p in self._passages)
        vocab: set[str] = set()
        for p in self._passages:
            vocab.update(tokenize(p.text))
        return CorpusStats(
            num_passages=len(self._passages),
            avgdl=total / len(self._passages),
            vocab_size=len(vocab),
        )


def ingest_jsonl(path: str | Path) -> Corpus:
    """Load a corpus from newline-delimited JSON records {id, title?, text}.

    Malformed records and duplicate ids are errors; the message names the
    offending line.
    """
    passages: list[Passage] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise ValueError(f"{path}: line {lineno}: record must have 'id' and 'text'")
            pid = record["id"]
            if not isinstance(pid, str) or not isinstance(record["text"], str):
                raise ValueError(f"{path}: line {lineno}: 'id' and 'text' must be strings")
            if pid in seen:
                raise ValueError(f"{path}: line {lineno}: duplicate passage id {pid!r}")
            seen.add(pid)
            try:
                passages.append(make_passage(pid, record.get("title", ""), record["text"]))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
    if not passages:
        raise ValueError(f"{path}: no passages found")
    return Corpus(passages)


def load_squad(path: str | Path) -> tuple[list[Passage], list[QaPair]]:
    """Read a SQuAD v1.1 JSON file into passages and QA pairs.

    Each paragraph becomes one passage whose id is derived from the article
    title and the paragraph's ordinal within that article.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(payload, dict) or "data" not in payload:
        raise ValueError(f"{path}: missing top-level 'data' array")

    passages: list[Passage] = []
    pairs: list[QaPair] = []
    for article in payload["data"]:
        title = article.get("title", "")
        for ordinal, paragraph in enumerate(article.get("paragraphs", [])):
            pid = f"{title}#p{ordinal}"
            passages.append(make_passage(pid, title, paragraph["context"]))
            for qa in paragraph.get("qas", []):
                answers = tuple(a["text"] for a in qa.get("answers", []))
                if not answers:
                    raise ValueError(f"{path}: question {qa.get('question')!r} has no answers")
                pairs.append(QaPair(question=qa["question"], gold_answers=answers, passage_id=pid))
    if not passages or not pairs:
        raise ValueError(f"{path}: empty dataset")
    return passages, pairs


def load_qa_jsonl(path: str | Path) -> list[QaPair]:
    """Load QA pairs from JSONL records {question, gold_answers, passage_id?}."""
    pairs: list[QaPair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            if "question" not in record or "gold_answers" not in record:
                raise ValueError(
                    f"{path}: line {lineno}: record must have 'question' and 'gold_answers'"
                )
            golds = tuple(record["gold_answers"])
            if not golds:
                raise ValueError(f"{path}: line {lineno}: gold_answers must be non-empty")
            pairs.append(
                QaPair(
                    question=record["question"],
                    gold_answers=golds,
                    passage_id=record.get("passage_id"),
                )
            )
    if not pairs:
        raise ValueError(f"{path}: no QA pairs found")
    return pairs
