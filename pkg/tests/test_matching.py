import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedcmd.matching import (
    EmbeddingTable,
    rank,
    score_embedding,
    score_jaccard,
    score_vsm,
    template_tokens,
)

import numpy as np


# -- independent oracles -------------------------------------------------


def oracle_tfidf_ranking(query, documents):
    """Brute-force tf-idf cosine, written from the formula, loops only."""
    n = len(documents)
    vocab = set()
    for doc in documents.values():
        vocab.update(doc)

    def idf(term):
        df = sum(1 for doc in documents.values() if term in doc)
        return math.log(n / df) if df else 0.0

    def vector(tokens):
        return {t: tokens.count(t) * idf(t) for t in set(tokens) if t in vocab}

    def cosine(u, v):
        dot = sum(u[t] * v[t] for t in u if t in v)
        nu = math.sqrt(sum(x * x for x in u.values()))
        nv = math.sqrt(sum(x * x for x in v.values()))
        return dot / (nu * nv) if nu and nv else 0.0

    q = vector(list(query))
    return {aid: cosine(q, vector(list(doc))) for aid, doc in documents.items()}


def oracle_jaccard(a, b):
    sa, sb = set(a), set(b)
    return len(sa & sb) / len(sa | sb) if (sa | sb) else 0.0


# -- jaccard ---------------------------------------------------------------


def test_jaccard_identical_sets():
    assert score_jaccard(["move", "block"], ["block", "move"]) == 1.0


def test_jaccard_derived_half_overlap():
    # {"move","block_set","location"} vs {"shift","block_set","location"}:
    # 2 shared / 4 total
    a = ["move", "block_set", "location"]
    b = ["shift", "block_set", "location"]
    assert score_jaccard(a, b) == pytest.approx(2 / 4)


def test_jaccard_disjoint_and_empty():
    assert score_jaccard(["a"], ["b"]) == 0.0
    assert score_jaccard([], []) == 0.0


@settings(max_examples=300)
@given(
    st.lists(st.sampled_from("abcdefgh"), max_size=10),
    st.lists(st.sampled_from("abcdefgh"), max_size=10),
)
def test_jaccard_properties(a, b):
    s = score_jaccard(a, b)
    assert s == score_jaccard(b, a)
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(oracle_jaccard(a, b))


def test_jaccard_random_pairs_match_oracle():
    rng = random.Random(7)
    terms = [f"t{i}" for i in range(12)]
    for _ in range(1000):
        a = [rng.choice(terms) for _ in range(rng.randint(0, 8))]
        b = [rng.choice(terms) for _ in range(rng.randint(0, 8))]
        assert score_jaccard(a, b) == pytest.approx(oracle_jaccard(a, b))


# -- vsm --------------------------------------------------------------------


def test_vsm_self_similarity_dominates():
    docs = {
        1: ["alpha", "beta", "gamma"],
        2: ["delta", "epsilon"],
        3: ["zeta", "eta"],
    }
    scores = score_vsm(["alpha", "beta", "gamma"], docs)
    assert scores[1] > scores[2] and scores[1] > scores[3]


def test_vsm_toy_corpus_matches_oracle():
    docs = {
        1: ["move", "block_set", "location"],
        2: ["remove", "block_set"],
        3: ["add", "location"],
    }
    query = ["remove", "block_set"]
    scores = score_vsm(query, docs)
    expected = oracle_tfidf_ranking(query, docs)
    for aid in docs:
        assert scores[aid] == pytest.approx(expected[aid], abs=1e-9)
    ranked = sorted(scores, key=lambda a: -scores[a])
    expected_rank = sorted(expected, key=lambda a: -expected[a])
    assert ranked == expected_rank
    assert ranked[0] == 2


def test_vsm_zero_overlap_scores_zero():
    docs = {1: ["move"], 2: ["remove"]}
    scores = score_vsm(["frobnicate", "quux"], docs)
    assert scores == {1: 0.0, 2: 0.0}


def test_vsm_randomized_against_oracle():
    rng = random.Random(42)
    terms = [f"w{i}" for i in range(8)]
    for _ in range(1000):
        n_docs = rng.randint(1, 5)
        docs = {
            aid: [rng.choice(terms) for _ in range(rng.randint(1, 6))]
            for aid in range(1, n_docs + 1)
        }
        query = [rng.choice(terms) for _ in range(rng.randint(1, 6))]
        got = score_vsm(query, docs)
        want = oracle_tfidf_ranking(query, docs)
        for aid in docs:
            assert got[aid] == pytest.approx(want[aid], abs=1e-9)


def test_vsm_requires_documents():
    with pytest.raises(ValueError):
        score_vsm(["x"], {})


# -- embeddings --------------------------------------------------------------


@pytest.fixture
def toy_table():
    return EmbeddingTable(
        {
            "move": np.array([1.0, 0.0, 0.0]),
            "shift": np.array([0.9, 0.1, 0.0]),
            "remove": np.array([0.0, 1.0, 0.0]),
        },
        dimension=3,
    )


def test_embedding_identical_tokens(toy_table):
    assert score_embedding(["move"], ["move"], toy_table) == pytest.approx(1.0, abs=1e-9)


def test_embedding_oov_both_sides(toy_table):
    assert score_embedding(["zzz"], ["yyy"], toy_table) == 0.0


def test_embedding_toy_cosines_by_hand(toy_table):
    # cos(shift, move) = 0.9/sqrt(0.82); cos(shift, remove) = 0.1/sqrt(0.82)
    got_move = score_embedding(["shift"], ["move"], toy_table)
    got_remove = score_embedding(["shift"], ["remove"], toy_table)
    norm = math.sqrt(0.9 ** 2 + 0.1 ** 2)
    assert got_move == pytest.approx(0.9 / norm, abs=1e-9)
    assert got_remove == pytest.approx(0.1 / norm, abs=1e-9)
    assert got_move > got_remove


def test_embedding_oov_tokens_skipped(toy_table):
    mixed = score_embedding(["move", "xyzzy"], ["move"], toy_table)
    assert mixed == pytest.approx(1.0, abs=1e-9)


def test_embedding_scale_invariance(toy_table, blocks_spec):
    scaled = EmbeddingTable(
        {t: 7.3 * v for t, v in toy_table.vectors.items()}, dimension=3
    )
    queries = [["shift"], ["move", "remove"], ["shift", "remove"]]
    templates = [["move"], ["remove"], ["shift", "move"]]
    for q in queries:
        base = [score_embedding(q, t, toy_table) for t in templates]
        big = [score_embedding(q, t, scaled) for t in templates]
        assert sorted(range(3), key=lambda i: -base[i]) == sorted(
            range(3), key=lambda i: -big[i]
        )
        for x, y in zip(base, big):
            assert x == pytest.approx(y, abs=1e-9)


def test_embedding_file_round_trip(tmp_path):
    path = tmp_path / "vec.txt"
    path.write_text("tok 1.0 2.0 3.0\nother 0.0 1.0 0.0\n")
    table = EmbeddingTable.load(str(path))
    assert table.dimension == 3
    assert set(table.vectors) == {"tok", "other"}


def test_embedding_file_dimension_mismatch(tmp_path):
    path = tmp_path / "vec.txt"
    path.write_text("tok 1.0 2.0\nother 0.0 1.0 0.0\n")
    with pytest.raises(ValueError):
        EmbeddingTable.load(str(path))


# -- rank ---------------------------------------------------------------------


def _action_candidates(spec):
    return [(asc, tmpl) for asc in spec.action_ascs for tmpl in asc.templates]


def test_rank_single_candidate_first(blocks_spec):
    move = blocks_spec.asc(3)
    ranked = rank([(move, move.templates[0])], ["frobnicate"], "jaccard")
    assert ranked[0].asc_aid == 3
    assert ranked[0].score == 0.0


def test_rank_reduced_figure_command(blocks_spec):
    query = ["move", "block_set", "to", "location"]
    ranked = rank(_action_candidates(blocks_spec), query, "vsm",
                  corpus=blocks_spec.action_ascs)
    assert ranked[0].asc_aid == 3
    ranked_j = rank(_action_candidates(blocks_spec), query, "jaccard")
    assert ranked_j[0].asc_aid == 3


def test_rank_tie_breaks_by_aid(blocks_spec):
    a, b = blocks_spec.asc(5), blocks_spec.asc(6)
    candidates = [(a, a.templates[0]), (b, b.templates[0])]
    ranked = rank(candidates, ["nothing", "matches"], "jaccard")
    assert [m.asc_aid for m in ranked] == [5, 6]
    assert ranked[0].score == ranked[1].score == 0.0


def test_rank_max_over_templates(blocks_spec):
    move = blocks_spec.asc(3)
    ranked = rank(
        [(move, t) for t in move.templates],
        ["shift", "block_set", "to", "location"],
        "jaccard",
    )
    assert len(ranked) == 1
    assert ranked[0].template_index == 1  # "shift X1 to X2" wins


def test_rank_is_pure(blocks_spec):
    query = ["remove", "block_set"]
    candidates = _action_candidates(blocks_spec)
    first = rank(candidates, query, "vsm", corpus=blocks_spec.action_ascs)
    second = rank(candidates, query, "vsm", corpus=blocks_spec.action_ascs)
    assert first == second


def test_template_tokens_typed_and_word_only(blocks_spec):
    move = blocks_spec.asc(3)
    assert template_tokens(move, move.templates[0]) == [
        "move", "block_set", "to", "location",
    ]
    assert template_tokens(move, move.templates[0], typed=False) == ["move", "to"]
