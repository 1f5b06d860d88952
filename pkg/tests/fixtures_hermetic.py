"""Hermetic 10-passage fixture shared by pipeline, app, and acceptance tests.

Constructed so that for the slime question the gold-bearing passage lands at
fused rank 3 behind two decoys that both retrievers prefer, while the stub
table gives the gold answer the highest generation confidence. Selection
must overcome the positional bias.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from lore import reader

SLIME_QUESTION = "what color is wet slime"
SPONSOR_QUESTION = "who sponsored the championship game"
PAGE_QUESTION = "which page performs the dialogue"

HERMETIC_PASSAGES = [
    ("p01", "Chevron sponsored the championship game. The event drew a record crowd."),
    ("p02", "Quarterbacks threw for many yards during autumn practice."),
    ("p03", "Green slime appeared everywhere: slime in the halls, slime on the stairs."),
    ("p04", "A museum opened a new wing devoted to maritime history."),
    ("p05", "Blue slime samples were catalogued beside older slime jars."),
    ("p06", "Farmers rotated crops to keep their soil healthy."),
    ("p07", "Researchers found that slime underground glowed pink. Its hue surprised everyone."),
    ("p08", "A violin maker tuned each instrument by hand."),
    ("p09", "An observatory tracked a comet across a winter sky."),
    ("p10", "Bakers proofed dough overnight in cool cellars."),
]

# cosine of each passage's vector against the stub embedding of the slime
# question; p03 > p05 > p07 mirrors the BM25 ordering so both retrievers
# agree and the fused ranks are 1, 2, 3
HERMETIC_COSINES = {
    "p01": 0.10, "p02": 0.09, "p03": 0.95, "p04": 0.08, "p05": 0.90,
    "p06": 0.07, "p07": 0.85, "p08": 0.06, "p09": 0.05, "p10": 0.04,
}

HERMETIC_STUB_TABLE = {
    (SLIME_QUESTION, "p03"): ("green", [0.40]),
    (SLIME_QUESTION, "p05"): ("blue", [0.45]),
    (SLIME_QUESTION, "p07"): ("pink", [0.99, 0.99]),
    (SPONSOR_QUESTION, "p01"): ("Chevron", [0.98]),
}

HERMETIC_QA = [
    {"question": SLIME_QUESTION, "gold_answers": ["pink"], "passage_id": "p07"},
    {"question": SPONSOR_QUESTION, "gold_answers": ["Chevron"], "passage_id": "p01"},
    {"question": PAGE_QUESTION, "gold_answers": ["zanzibar"], "passage_id": None},
]


def hermetic_embeddings() -> list[dict]:
    """Unit vectors with exact, chosen cosines against the slime query vector."""
    dim = reader.STUB_EMBED_DIM
    q = np.asarray(reader._stub_embedding(SLIME_QUESTION, dim))
    rng = np.random.default_rng(7)
    u = rng.standard_normal(dim)
    u -= (u @ q) * q
    u /= np.linalg.norm(u)
    records = []
    for pid, _text in HERMETIC_PASSAGES:
        c = HERMETIC_COSINES[pid]
        v = c * q + np.sqrt(1.0 - c * c) * u
        records.append({"id": pid, "vector": v.tolist()})
    return records


def write_hermetic_fixture(root: Path) -> dict[str, Path]:
    """Write corpus/embeddings/dataset/config files; returns their paths."""
    paths = {
        "corpus": root / "corpus.jsonl",
        "embeddings": root / "embeddings.jsonl",
        "dataset": root / "dataset.jsonl",
        "config": root / "config.json",
        "index_dir": root / "index",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for pid, text in HERMETIC_PASSAGES:
            fh.write(json.dumps({"id": pid, "title": "", "text": text}) + "\n")
    with open(paths["embeddings"], "w", encoding="utf-8") as fh:
        for record in hermetic_embeddings():
            fh.write(json.dumps(record) + "\n")
    with open(paths["dataset"], "w", encoding="utf-8") as fh:
        for qa in HERMETIC_QA:
            fh.write(json.dumps(qa) + "\n")
    stub_nested: dict[str, dict] = {}
    for (query, pid), (answer, probs) in HERMETIC_STUB_TABLE.items():
        stub_nested.setdefault(query, {})[pid] = {"answer": answer, "step_probs": probs}
    config = {
        "corpus_path": str(paths["corpus"]),
        "embeddings_path": str(paths["embeddings"]),
        "index_dir": str(paths["index_dir"]),
        "pipeline": {"top_k": 10, "retrieval_depth": 50},
        "stub_table": stub_nested,
    }
    with open(paths["config"], "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
    return paths
