"""Vocabulary handling, candidate ranking, and capture-avoiding renames."""

import pytest

from hogforge.errors import CaptureCollision, EmptyVocabulary
from hogforge.frontend import parse_unit
from hogforge.lexicon import (
    EmbeddingProvider,
    build_pool,
    harvest_vocabulary,
    load_vocabulary,
    rename,
    similarity,
)

SRC = """
int tally(int count, int limit) {
    int total = 0;
    for (int i = 0; i < count; i = i + 1) {
        if (i > limit) {
            break;
        }
        total = total + i;
    }
    return total;
}
"""


@pytest.fixture(scope="module")
def unit():
    return parse_unit(SRC, "tally")


@pytest.fixture(scope="module")
def provider():
    return EmbeddingProvider.subword_hash()


def test_harvest_is_sorted_unique(unit):
    a = parse_unit("int f(int x, int y) { return x + y; }", "a")
    vocab = harvest_vocabulary([unit, a, a])
    assert vocab == sorted(set(vocab))
    assert "count" in vocab and "x" in vocab


def test_load_vocabulary_strips_comments(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("# header\nalpha\n\n  beta  \n# tail\ngamma\n")
    assert load_vocabulary(path) == ["alpha", "beta", "gamma"]


def test_load_vocabulary_all_comments_gives_empty(tmp_path, unit, provider):
    path = tmp_path / "vocab.txt"
    path.write_text("# only comments\n")
    words = load_vocabulary(path)
    assert words == []
    with pytest.raises(EmptyVocabulary):
        build_pool(unit, words, provider, k=5)


def test_build_pool_excludes_taken_and_keywords(unit, provider):
    vocab = ["count", "total", "while", "int", "fresh_name", "other_name"]
    pool = build_pool(unit, vocab, provider, k=5)
    assert pool.vocabulary == ["fresh_name", "other_name"]
    for name in unit.identifiers:
        cands = [c for c, _ in pool.candidates(name)]
        assert set(cands) == {"fresh_name", "other_name"}


def test_build_pool_requires_vocabulary(unit, provider):
    with pytest.raises(EmptyVocabulary):
        build_pool(unit, [], provider, k=5)


def test_candidates_ranked_by_distance(unit, provider):
    vocab = [f"word_{i}" for i in range(12)]
    pool = build_pool(unit, vocab, provider, k=4)
    for name in unit.identifiers:
        dists = [d for _, d in pool.candidates(name)]
        assert dists == sorted(dists)
        expect = sorted(
            ((similarity(name, w, provider), w) for w in vocab))
        assert [w for _, w in expect] == [w for w, _ in pool.candidates(name)]


def test_guided_slice_is_prefix(unit, provider):
    vocab = [f"word_{i}" for i in range(12)]
    pool = build_pool(unit, vocab, provider, k=4)
    name = unit.identifiers[0]
    assert pool.guided_slice(name) == pool.candidates(name)[:4]


def test_embedding_deterministic(provider):
    a = provider.embed("total_read")
    b = EmbeddingProvider.subword_hash().embed("total_read")
    assert a == b
    assert abs(sum(x * x for x in a) - 1.0) < 1e-9


def test_similarity_self_smallest(provider):
    words = ["total", "tally", "count", "flag", "zebra_stripe"]
    for w in words:
        d_self = similarity(w, w, provider)
        assert all(similarity(w, o, provider) >= d_self for o in words)


def test_vector_file_round_trip(tmp_path):
    path = tmp_path / "vecs.txt"
    path.write_text("2 3\nalpha 1.0 0.0 0.5\nbeta 0.0 1.0 0.5\n")
    file_provider = EmbeddingProvider.from_vector_file(path)
    assert file_provider.embed("alpha") == [1.0, 0.0, 0.5]
    # Out-of-file words embed to the zero vector.
    assert file_provider.embed("gamma") == [0.0, 0.0, 0.0]


def test_vector_file_bad_header(tmp_path):
    path = tmp_path / "vecs.txt"
    path.write_text("alpha 1.0 0.0 0.5\n")
    with pytest.raises(ValueError):
        EmbeddingProvider.from_vector_file(path)


def test_rename_basic(unit):
    out = rename(unit, {"total": "acc", "count": "n_items"})
    assert "acc" in out.text and "n_items" in out.text
    assert "total" not in out.text and "count" not in out.text
    assert out.text == parse_unit(out.text, "x").text


def test_rename_empty_map_is_identity(unit):
    assert rename(unit, {}) is unit


def test_rename_keeps_node_ids(unit):
    out = rename(unit, {"total": "acc"})
    from hogforge.frontend import walk
    orig_ids = [n.node_id for n in walk(unit.ast)]
    new_ids = [n.node_id for n in walk(out.ast)]
    assert orig_ids == new_ids


def test_rename_collision_with_existing_name(unit):
    with pytest.raises(CaptureCollision):
        rename(unit, {"total": "count"})


def test_rename_collision_between_targets(unit):
    with pytest.raises(CaptureCollision):
        rename(unit, {"total": "shared", "count": "shared"})


def test_rename_to_keyword_rejected(unit):
    with pytest.raises(CaptureCollision):
        rename(unit, {"total": "while"})


def test_rename_swap_via_fresh_names(unit):
    step = rename(unit, {"total": "tmp_a", "count": "tmp_b"})
    back = rename(step, {"tmp_a": "total", "tmp_b": "count"})
    assert back.text == unit.text
