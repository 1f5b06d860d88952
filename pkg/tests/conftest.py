from __future__ import annotations

from pathlib import Path

import pytest

from fixtures_hermetic import HERMETIC_STUB_TABLE, write_hermetic_fixture
from lore import reader
from lore.corpus import Corpus, make_passage


@pytest.fixture
def hermetic_paths(tmp_path) -> dict[str, Path]:
    return write_hermetic_fixture(tmp_path)


@pytest.fixture
def cat_corpus() -> Corpus:
    return Corpus(
        [
            make_passage("d1", "", "the cat sat"),
            make_passage("d2", "", "the dog"),
            make_passage("d3", "", "cat cat cat"),
        ]
    )


@pytest.fixture
def hermetic_indexes(hermetic_paths):
    from lore import dense_index, sparse_index
    from lore.corpus import ingest_jsonl
    from lore.pipeline import Indexes

    corpus = ingest_jsonl(hermetic_paths["corpus"])
    sparse = sparse_index.build(corpus)
    dense = dense_index.build(dense_index.load_embeddings(hermetic_paths["embeddings"]))
    return Indexes(corpus=corpus, sparse=sparse, dense=dense)


@pytest.fixture
def hermetic_reader():
    return reader.stub_config(HERMETIC_STUB_TABLE)
