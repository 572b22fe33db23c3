"""Diverse subset selection over lexical similarity.

Similarity is character-trigram Jaccard on case-folded, whitespace-
normalized text; strings shorter than one trigram fall back to a single
whole-string gram. Selection is greedy farthest-point: seed with the
longest copy, then repeatedly add the copy whose minimum distance to
the selected set is largest. Ties break to the longer, then the
lexicographically smaller text, then the earlier index, so the output
is deterministic for a fixed input list.
"""

from __future__ import annotations

from typing import Sequence


def _normalize(text: str) -> str:
    return " ".join(text.casefold().split())


def _grams(normalized: str) -> frozenset[str]:
    if not normalized:
        return frozenset()
    if len(normalized) < 3:
        return frozenset({normalized})
    return frozenset(normalized[i : i + 3] for i in range(len(normalized) - 2))


def similarity(a: str, b: str) -> float:
    """Trigram Jaccard in [0, 1]; identical normalized text scores 1."""
    na, nb = _normalize(a), _normalize(b)
    if na == nb:
        return 1.0
    ga, gb = _grams(na), _grams(nb)
    if not ga or not gb:
        return 0.0
    inter = len(ga & gb)
    union = len(ga | gb)
    return inter / union


def _pair_similarity(
    norm: list[str], grams: list[frozenset[str]], i: int, j: int
) -> float:
    if norm[i] == norm[j]:
        return 1.0
    if not grams[i] or not grams[j]:
        return 0.0
    inter = len(grams[i] & grams[j])
    return inter / len(grams[i] | grams[j])


def select_diverse(texts: Sequence[str], k: int) -> list[int]:
    """Indices of up to k pairwise-distinct copies, in selection order.

    Stops early once only duplicates of already-selected copies remain,
    so the result size is min(k, number of distinct copies).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = len(texts)
    if n == 0:
        return []
    norm = [_normalize(t) for t in texts]
    grams = [_grams(t) for t in norm]

    seed = min(range(n), key=lambda i: (-len(norm[i]), norm[i], i))
    selected = [seed]
    min_dist = [
        0.0 if i == seed else 1.0 - _pair_similarity(norm, grams, i, seed)
        for i in range(n)
    ]
    chosen = {seed}

    while len(selected) < k:
        best = None
        for i in range(n):
            if i in chosen:
                continue
            if best is None:
                best = i
                continue
            a = (-min_dist[i], -len(norm[i]), norm[i], i)
            b = (-min_dist[best], -len(norm[best]), norm[best], best)
            if a < b:
                best = i
        if best is None or min_dist[best] == 0.0:
            break
        selected.append(best)
        chosen.add(best)
        for i in range(n):
            if i in chosen:
                continue
            d = 1.0 - _pair_similarity(norm, grams, i, best)
            if d < min_dist[i]:
                min_dist[i] = d
    return selected


def min_pairwise_distance(texts: Sequence[str], indices: Sequence[int]) -> float:
    """Smallest pairwise distance inside a selection; 1.0 for singletons."""
    if len(indices) < 2:
        return 1.0
    worst = 1.0
    for a in range(len(indices)):
        for b in range(a + 1, len(indices)):
            d = 1.0 - similarity(texts[indices[a]], texts[indices[b]])
            if d < worst:
                worst = d
    return worst
