"""Independent reference implementations the tests trust.

Everything here is written from the behavioral definitions alone, never
by calling into copyforge, so agreement between the two is evidence and
not tautology. Keep these naive and obvious: character scans, exhaustive
enumeration, integer arithmetic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# -- word-boundary scanning ----------------------------------------------


def is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def boundary_hits(text: str, literal: str) -> list[int]:
    """Positions where literal occurs case-insensitively with no word
    character hugging either end. Positions index the casefolded text."""
    folded = text.casefold()
    needle = literal.casefold()
    hits = []
    if not needle:
        return hits
    start = 0
    while True:
        pos = folded.find(needle, start)
        if pos < 0:
            return hits
        before_ok = pos == 0 or not is_word_char(folded[pos - 1])
        end = pos + len(needle)
        after_ok = end == len(folded) or not is_word_char(folded[end])
        if before_ok and after_ok:
            hits.append(pos)
        start = pos + 1


def punctuation_hits(text: str, word: str, puncts: str = ".,;:!?") -> list[int]:
    """Boundary occurrences of word immediately followed by punctuation."""
    folded = text.casefold()
    out = []
    for pos in boundary_hits(text, word):
        end = pos + len(word.casefold())
        if end < len(folded) and folded[end] in puncts:
            out.append(pos)
    return out


# -- two-decimal half-up percentage, decimal-module-free ------------------


def half_up_pct(numerator: int, denominator: int) -> float:
    """100 * numerator / denominator rounded half-up to 2 decimals,
    done in exact integer arithmetic."""
    if denominator == 0:
        raise ZeroDivisionError
    scaled = Fraction(numerator * 100 * 100, denominator)
    whole = scaled.numerator // scaled.denominator
    remainder = scaled - whole
    if remainder * 2 >= 1:
        whole += 1
    return whole / 100.0


# -- trigram similarity and exhaustive subset search -----------------------


def normalize(text: str) -> str:
    return " ".join(text.casefold().split())


def gram_set(text: str) -> frozenset[str]:
    norm = normalize(text)
    if len(norm) < 3:
        return frozenset([norm]) if norm else frozenset()
    return frozenset(norm[i : i + 3] for i in range(len(norm) - 2))


def jaccard_distance(a: str, b: str) -> float:
    ga, gb = gram_set(a), gram_set(b)
    if normalize(a) == normalize(b):
        return 0.0
    if not ga or not gb:
        return 1.0
    return 1.0 - len(ga & gb) / len(ga | gb)


def distinct_gram_count(texts: list[str]) -> int:
    """Size of the largest subset with all pairwise distances > 0.
    Zero distance is gram-set equality, an equivalence relation, so this
    is just the number of distinct gram sets (empty-text classes count
    as one class via the normalized string)."""
    return len({(gram_set(t), "" if gram_set(t) else normalize(t)) for t in texts})


def best_min_distance(texts: list[str], size: int) -> float:
    """Exhaustive max over all size-subsets of the min pairwise distance.
    Only sane for len(texts) <= 8 or so."""
    if size < 2:
        return float("inf")
    best = -1.0
    for combo in itertools.combinations(range(len(texts)), size):
        worst = min(
            jaccard_distance(texts[i], texts[j])
            for i, j in itertools.combinations(combo, 2)
        )
        best = max(best, worst)
    return best


# -- lineage state machine mirror ------------------------------------------


class LineageMirror:
    """Transition table for one copy's event sequence, kept deliberately
    separate from the store's fold: phases, the eval flag, and the refine
    budget, nothing else."""

    TERMINAL = {"discarded", "accepted", "human_rejected"}

    def __init__(self) -> None:
        self.phase = "absent"
        self.last_eval_passed: bool | None = None
        self.refine_count = 0
        self.max_refines = 0

    def legal(self, kind: str, payload: dict) -> bool:
        p = self.phase
        if p in self.TERMINAL:
            return False
        if kind == "CopyGenerated":
            return p == "absent"
        if p == "absent":
            return False
        if kind == "CopyFormatted":
            return p in ("generated", "refined")
        if kind == "EvaluationRecorded":
            return p == "formatted" or (p == "evaluating" and self.last_eval_passed is True)
        if kind == "RefinementRequested":
            return (
                p == "evaluating"
                and self.last_eval_passed is False
                and self.refine_count < self.max_refines
            )
        if kind == "CopyRefined":
            return p == "refining"
        if kind == "SentToHumanReview":
            return p == "evaluating" and self.last_eval_passed is True
        if kind == "HumanReviewRecorded":
            return p == "pending_review" and payload.get("verdict") in ("approve", "reject")
        if kind == "CopyDiscarded":
            return p != "pending_review"
        return False

    def apply(self, kind: str, payload: dict) -> None:
        if kind == "CopyGenerated":
            self.phase = "generated"
            self.max_refines = int(payload.get("max_refines", 0))
        elif kind == "CopyFormatted":
            self.phase = "formatted"
            self.last_eval_passed = None
        elif kind == "EvaluationRecorded":
            self.phase = "evaluating"
            self.last_eval_passed = bool(payload["outcome"]["pass"])
        elif kind == "RefinementRequested":
            self.phase = "refining"
        elif kind == "CopyRefined":
            self.phase = "refined"
            self.refine_count += 1
        elif kind == "SentToHumanReview":
            self.phase = "pending_review"
        elif kind == "HumanReviewRecorded":
            self.phase = "accepted" if payload["verdict"] == "approve" else "human_rejected"
        elif kind == "CopyDiscarded":
            self.phase = "discarded"

    def state(self) -> str:
        return {
            "absent": "absent",
            "generated": "generating",
            "formatted": "evaluating",
            "evaluating": "evaluating",
            "refining": "refining",
            "refined": "refining",
            "pending_review": "pending_human_review",
            "accepted": "accepted",
            "human_rejected": "human_rejected",
            "discarded": "discarded",
        }[self.phase]
