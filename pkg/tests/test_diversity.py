"""Trigram-Jaccard similarity and greedy farthest-point selection."""

import random

import pytest

import oracles
from copyforge.diversity import min_pairwise_distance, select_diverse, similarity


def test_similarity_identical_and_disjoint():
    assert similarity("abcabc", "abcabc") == 1.0
    assert similarity("abc", "xyz") == 0.0


def test_similarity_hand_computed_overlap():
    # {abc, bcd} vs {bcd, cde}: one shared gram of three distinct
    assert similarity("abcd", "bcde") == pytest.approx(1 / 3)


def test_similarity_symmetric_and_bounded():
    pairs = [("free delivery", "free shipping"), ("a", "ab"), ("", "x")]
    for a, b in pairs:
        assert similarity(a, b) == similarity(b, a)
        assert 0.0 <= similarity(a, b) <= 1.0


def test_similarity_folds_case_and_whitespace():
    assert similarity("Free  Shipping", "free shipping") == 1.0
    assert similarity("FREE\tshipping\n", " free shipping ") == 1.0


def test_similarity_short_string_fallback():
    assert similarity("ab", "ab") == 1.0
    assert similarity("ab", "ba") == 0.0
    assert similarity("", "x") == 0.0
    assert similarity("", "") == 1.0


def test_equal_gram_sets_score_one():
    # repeated-letter strings collapse to the same trigram set
    assert similarity("aaaa", "aaaaaa") == 1.0


def test_similarity_agrees_with_oracle():
    rng = random.Random(13)
    words = ["free", "fast", "delivery", "shipping", "today", "pets", "order"]
    for _ in range(300):
        a = " ".join(rng.choices(words, k=rng.randint(1, 4)))
        b = " ".join(rng.choices(words, k=rng.randint(1, 4)))
        expected = oracles.jaccard_distance(a, b)
        assert 1.0 - similarity(a, b) == pytest.approx(expected)


def test_select_separates_duplicate_from_distinct():
    assert select_diverse(["a", "a", "b"], 2) == [0, 2]


def test_select_saturates_at_distinct_count():
    texts = ["alpha", "alpha", "beta", "gamma", "beta"]
    picked = select_diverse(texts, 10)
    assert len(picked) == 3
    assert sorted(texts[i] for i in picked) == ["alpha", "beta", "gamma"]


def test_all_duplicates_collapse_to_one():
    assert len(select_diverse(["x", "x", "x"], 3)) == 1


def test_seed_is_longest_then_lexicographic():
    assert select_diverse(["bb", "aa", "ccc"], 1) == [2]
    assert select_diverse(["bb", "aa"], 1) == [1]


def test_selection_is_deterministic():
    texts = ["free delivery today", "fast and free", "order pet food", "free delivery today!"]
    runs = {tuple(select_diverse(texts, 3)) for _ in range(5)}
    assert len(runs) == 1


def test_empty_input_and_bad_k():
    assert select_diverse([], 3) == []
    with pytest.raises(ValueError):
        select_diverse(["a"], 0)


def test_min_pairwise_distance_singleton():
    assert min_pairwise_distance(["only"], [0]) == 1.0


def random_instance(rng: random.Random) -> list[str]:
    words = ["free", "fast", "ship", "pets", "now", "save", "big", "home"]
    n = rng.randint(1, 8)
    return [
        " ".join(rng.choices(words, k=rng.randint(1, 3))) for _ in range(n)
    ]


def test_greedy_matches_brute_force_duplicate_freeness():
    rng = random.Random(99)
    for _ in range(150):
        texts = random_instance(rng)
        k = rng.randint(1, 8)
        picked = select_diverse(texts, k)
        # size is exactly the number of distinct gram sets, capped at k
        assert len(picked) == min(k, oracles.distinct_gram_count(texts))
        # no zero-distance pair inside the selection
        for a in range(len(picked)):
            for b in range(a + 1, len(picked)):
                assert similarity(texts[picked[a]], texts[picked[b]]) < 1.0
        # greedy min distance never beats the exhaustive optimum
        if len(picked) >= 2:
            got = min_pairwise_distance(texts, picked)
            best = oracles.best_min_distance(texts, len(picked))
            assert got <= best + 1e-9
