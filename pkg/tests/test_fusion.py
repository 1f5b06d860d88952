import random

import pytest

from lore.fusion import FusedContext, RankedEntry, RankedList, fuse, rrf_score


def ranked(retriever_id, pids):
    return RankedList(
        retriever_id=retriever_id,
        entries=tuple(
            RankedEntry(passage_id=p, score=1.0 / (i + 1), rank=i + 1)
            for i, p in enumerate(pids)
        ),
    )


def test_rrf_score_two_ranks():
    assert rrf_score([1, 2], 60) == pytest.approx(1 / 61 + 1 / 62, abs=1e-15)


def test_rrf_score_absent_contributes_zero():
    assert rrf_score([4, None], 60) == pytest.approx(1 / 64, abs=1e-15)


def test_rrf_score_k_one():
    assert rrf_score([1], 1) == 0.5


def test_rrf_score_rejects_bad_rank_and_k():
    with pytest.raises(ValueError):
        rrf_score([0], 60)
    with pytest.raises(ValueError):
        rrf_score([1], 0)


def test_ranked_list_validation():
    with pytest.raises(ValueError, match="gap-free"):
        RankedList("x", (RankedEntry("a", 1.0, 2),))
    with pytest.raises(ValueError, match="duplicate"):
        RankedList("x", (RankedEntry("a", 1.0, 1), RankedEntry("a", 0.5, 2)))


def test_fuse_two_lists_exact():
    result = fuse([ranked("bm25", ["D1", "D2", "D3", "D4"]), ranked("vec", ["D3", "D1", "D5", "D2"])], 60)
    assert [f.passage_id for f in result] == ["D1", "D3", "D2", "D5", "D4"]
    expected = {
        "D1": 1 / 61 + 1 / 62,
        "D3": 1 / 63 + 1 / 61,
        "D2": 1 / 62 + 1 / 64,
        "D5": 1 / 63,
        "D4": 1 / 64,
    }
    for f in result:
        assert f.rrf_score == pytest.approx(expected[f.passage_id], abs=1e-15)
    assert [f.context_rank for f in result] == [1, 2, 3, 4, 5]


def test_fuse_with_empty_list_equals_other():
    empty = RankedList("bm25", ())
    other = ranked("vec", ["a", "b", "c"])
    result = fuse([empty, other], 60)
    assert [f.passage_id for f in result] == ["a", "b", "c"]


def test_fuse_identical_lists_doubles_scores():
    single = fuse([ranked("one", ["a", "b"])], 60)
    double = fuse([ranked("one", ["a", "b"]), ranked("two", ["a", "b"])], 60)
    assert [f.passage_id for f in double] == [f.passage_id for f in single]
    for s, d in zip(single, double):
        assert d.rrf_score == pytest.approx(2 * s.rrf_score, abs=1e-15)


def test_fuse_requires_lists():
    with pytest.raises(ValueError):
        fuse([], 60)


def test_fuse_single_list_preserves_order():
    rng = random.Random(1)
    for _ in range(200):
        pids = [f"p{i}" for i in range(rng.randint(1, 12))]
        rng.shuffle(pids)
        result = fuse([ranked("only", pids)], rng.randint(1, 100))
        assert [f.passage_id for f in result] == pids


def _random_lists(rng) -> list[RankedList]:
    universe = [f"p{i}" for i in range(rng.randint(2, 15))]
    lists = []
    for li in range(rng.randint(1, 4)):
        pids = rng.sample(universe, rng.randint(1, len(universe)))
        lists.append(ranked(f"r{li}", pids))
    return lists


def test_fuse_permutation_invariance():
    rng = random.Random(2)
    for _ in range(300):
        lists = _random_lists(rng)
        base = fuse(lists, 60)
        shuffled = lists[:]
        rng.shuffle(shuffled)
        assert fuse(shuffled, 60) == base


def test_fuse_rank_improvement_strictly_increases_score():
    rng = random.Random(3)
    for _ in range(300):
        lists = _random_lists(rng)
        target_list = rng.randrange(len(lists))
        entries = list(lists[target_list].entries)
        if len(entries) < 2:
            continue
        pos = rng.randrange(1, len(entries))
        pid = entries[pos].passage_id
        before = {f.passage_id: f.rrf_score for f in fuse(lists, 60)}
        # swap the passage one slot up in exactly one list
        entries[pos - 1], entries[pos] = (
            RankedEntry(entries[pos].passage_id, entries[pos - 1].score, pos),
            RankedEntry(entries[pos - 1].passage_id, entries[pos].score, pos + 1),
        )
        improved = lists[:]
        improved[target_list] = RankedList(lists[target_list].retriever_id, tuple(entries))
        after = {f.passage_id: f.rrf_score for f in fuse(improved, 60)}
        assert after[pid] > before[pid]


def test_fuse_dominance():
    # present in both lists at rank r beats present in one list at rank r
    both = rrf_score([3, 3], 60)
    one = rrf_score([3, None], 60)
    assert both > one


def test_fused_context_ranks_gap_free_and_scores_non_increasing():
    rng = random.Random(4)
    for _ in range(200):
        result = fuse(_random_lists(rng), 60)
        assert [f.context_rank for f in result] == list(range(1, len(result) + 1))
        scores = [f.rrf_score for f in result]
        assert all(a >= b for a, b in zip(scores, scores[1:]))


def test_fuse_tie_breaks_best_rank_then_id():
    # y and z have equal scores; z has the better single-list rank
    a = ranked("a", ["z", "q"])
    b = ranked("b", ["q", "z"])
    c = ranked("c", ["y"])
    d = ranked("d", ["y"])
    # z: 1/61 + 1/62, y: 1/61 + 1/61 -> not tied; craft a real tie instead
    tie_a = ranked("a", ["y"])
    tie_b = ranked("b", ["z"])
    result = fuse([tie_a, tie_b], 60)
    assert [f.passage_id for f in result] == ["y", "z"]  # equal score, id ascending
    result2 = fuse([a, b, c, d], 60)
    scores = {f.passage_id: f.rrf_score for f in result2}
    assert scores["z"] == pytest.approx(scores["q"], abs=1e-15)
    ranks = {f.passage_id: f.context_rank for f in result2}
    assert abs(ranks["z"] - ranks["q"]) == 1
