"""Deterministic constraint evaluators and plan sequencing.

Matching is case-insensitive (casefold) with word boundaries on both
edges of a literal, so "now" never matches inside "nowhere" or "Know".
Reported positions are indices into the case-folded component text.
run_plan executes the evaluator sequence with strict short-circuit:
the first failing step ends the round and later steps never run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable

from .model import (
    CopyDraft,
    EvaluationOutcome,
    JudgedCriterion,
    LengthConstraint,
    UseCaseSpec,
    failing_outcome,
    passing_outcome,
)

#: Marks that must not immediately follow a protected word.
PUNCTUATION_AFTER_SET = ".,;:!?"

JudgeRunner = Callable[[CopyDraft, JudgedCriterion, UseCaseSpec], EvaluationOutcome]


def _boundary_finditer(literal: str, text: str) -> Iterable[re.Match]:
    """Occurrences of literal in text, both casefolded, word-bounded."""
    pattern = re.compile(r"(?<!\w)" + re.escape(literal.casefold()) + r"(?!\w)")
    return pattern.finditer(text.casefold())


def _first_position(literal: str, text: str) -> int | None:
    for m in _boundary_finditer(literal, text):
        return m.start()
    return None


def check_length(draft: CopyDraft, constraint: LengthConstraint) -> EvaluationOutcome:
    """Length check for one component; length counts every Unicode scalar."""
    text = draft.components[constraint.component]
    measured = len(text)
    if measured > constraint.max_len:
        return failing_outcome(
            "length",
            "length.exceeded",
            {
                "component": constraint.component,
                "measured": measured,
                "limit": constraint.max_len,
            },
            f"{constraint.component} is {measured} characters; the limit is {constraint.max_len}",
            scope=constraint.component,
        )
    if constraint.min_len is not None and measured < constraint.min_len:
        return failing_outcome(
            "length",
            "length.too_short",
            {
                "component": constraint.component,
                "measured": measured,
                "limit": constraint.min_len,
            },
            f"{constraint.component} is {measured} characters; the minimum is {constraint.min_len}",
            scope=constraint.component,
        )
    return passing_outcome("length", scope=constraint.component)


def check_keywords(
    draft: CopyDraft,
    include_groups: tuple[tuple[str, ...], ...],
    exclude_list: tuple[str, ...],
) -> EvaluationOutcome:
    """Every include group needs one alternative present somewhere in the
    copy; no exclude literal may appear anywhere."""
    missing: list[list[str]] = []
    for group in include_groups:
        hit = False
        for alternative in group:
            for text in draft.components.values():
                if _first_position(alternative, text) is not None:
                    hit = True
                    break
            if hit:
                break
        if not hit:
            missing.append(list(group))

    found: list[dict] = []
    for term in exclude_list:
        for name, text in draft.components.items():
            position = _first_position(term, text)
            if position is not None:
                found.append({"term": term, "component": name, "position": position})

    if not missing and not found:
        return passing_outcome("keywords")

    if missing:
        reason = "keyword.missing_group"
        groups = ["/".join(g) for g in missing]
        narrative = "required keywords missing: " + "; ".join(groups)
        if found:
            narrative += "; banned terms present: " + ", ".join(
                sorted({f["term"] for f in found})
            )
    else:
        reason = "keyword.banned_present"
        narrative = "banned terms present: " + ", ".join(
            sorted({f["term"] for f in found})
        )
    return failing_outcome(
        "keywords", reason, {"missing": missing, "found": found}, narrative
    )


def check_punctuation_after(
    draft: CopyDraft, words: tuple[str, ...]
) -> EvaluationOutcome:
    """No listed word may be immediately followed by a punctuation mark."""
    occurrences: list[dict] = []
    for word in words:
        for name, text in draft.components.items():
            folded = text.casefold()
            for m in _boundary_finditer(word, text):
                end = m.end()
                if end < len(folded) and folded[end] in PUNCTUATION_AFTER_SET:
                    occurrences.append(
                        {"word": word, "component": name, "position": m.start()}
                    )
    if not occurrences:
        return passing_outcome("punctuation_after")
    words_hit = ", ".join(sorted({o["word"] for o in occurrences}))
    return failing_outcome(
        "punctuation_after",
        "punct.after_word",
        {"occurrences": occurrences},
        f"punctuation immediately follows: {words_hit}",
    )


def check_lexical_prefs(
    draft: CopyDraft, prefs: tuple[tuple[str, str], ...]
) -> EvaluationOutcome:
    """Flag avoided terms; the refiner suggests the preferred substitution."""
    pairs: list[dict] = []
    for preferred, avoided in prefs:
        for name, text in draft.components.items():
            position = _first_position(avoided, text)
            if position is not None:
                pairs.append(
                    {
                        "preferred": preferred,
                        "avoided": avoided,
                        "component": name,
                        "position": position,
                    }
                )
    if not pairs:
        return passing_outcome("lexical_prefs")
    avoided_hit = ", ".join(sorted({repr(p["avoided"]) for p in pairs}))
    return failing_outcome(
        "lexical_prefs",
        "lexical.avoided_term",
        {"pairs": pairs},
        f"avoided terms present: {avoided_hit}",
    )


@dataclass(frozen=True)
class PlanResult:
    """Outcomes of one evaluation round, short-circuited at the first fail."""

    outcomes: tuple[EvaluationOutcome, ...]
    failed_index: int | None = None

    @property
    def all_passed(self) -> bool:
        return self.failed_index is None

    @property
    def failure(self) -> EvaluationOutcome:
        if self.failed_index is None:
            raise ValueError("plan passed; no failure to inspect")
        return self.outcomes[self.failed_index]


def _length_step(draft: CopyDraft, spec: UseCaseSpec) -> EvaluationOutcome:
    # One plan step covers all components; the first failing component
    # becomes the step outcome so refinement targets a single fix.
    by_component = {c.component: c for c in spec.constraints.length}
    for name in spec.structure.components:
        outcome = check_length(draft, by_component[name])
        if not outcome.passed:
            return outcome
    return passing_outcome("length")


def run_plan(
    draft: CopyDraft, spec: UseCaseSpec, judge_runner: JudgeRunner | None = None
) -> PlanResult:
    """Execute the evaluator plan in order, stopping at the first failure."""
    if not draft.formatted:
        raise ValueError("run_plan requires a formatted draft")
    criteria = {c.criterion_id: c for c in spec.constraints.judged_criteria}
    outcomes: list[EvaluationOutcome] = []
    for index, step in enumerate(spec.evaluator_plan.steps):
        if step.kind == "deterministic":
            if step.evaluator_id == "length":
                outcome = _length_step(draft, spec)
            elif step.evaluator_id == "keywords":
                outcome = check_keywords(
                    draft,
                    spec.constraints.keywords_include,
                    spec.constraints.keywords_exclude,
                )
            elif step.evaluator_id == "punctuation_after":
                outcome = check_punctuation_after(
                    draft, spec.constraints.punctuation_after
                )
            elif step.evaluator_id == "lexical_prefs":
                outcome = check_lexical_prefs(draft, spec.constraints.lexical_prefs)
            else:
                raise ValueError(f"unknown deterministic evaluator: {step.evaluator_id!r}")
        elif step.kind == "judged":
            if judge_runner is None:
                raise ValueError("plan has judged steps but no judge_runner was given")
            outcome = judge_runner(draft, criteria[step.evaluator_id], spec)
        else:
            raise ValueError(f"unknown step kind: {step.kind!r}")
        outcomes.append(outcome)
        if not outcome.passed:
            return PlanResult(outcomes=tuple(outcomes), failed_index=index)
    return PlanResult(outcomes=tuple(outcomes), failed_index=None)
