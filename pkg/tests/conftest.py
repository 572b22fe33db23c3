"""Shared fixtures: campaign configs, transcript plumbing, lineage seeding."""

from __future__ import annotations

import json
import os

import pytest

from copyforge.gateway import Gateway, MockProvider, MockTranscript
from copyforge.model import (
    ConstraintSet,
    CopyStructure,
    EvaluatorPlan,
    LengthConstraint,
    PlanStep,
    PromptFragments,
    UseCaseSpec,
    failing_outcome,
    passing_outcome,
)
from copyforge.store import EventLog

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")

TABLE_FOUR_HEADERS = [
    "Free delivery from stores saves you time & money",
    "Keep your kitchen stocked with free delivery from stores",
    "Shop from the comfort of home with free delivery",
    "Free delivery from stores: the ultimate time saver",
    "This is not a drill: get free shipping with no order minimum",
    "Don't miss out: get free shipping with no order minimum",
    "Guess what? There's no minimum order for free shipping.",
    "Free shipping with no order minimum. You read it right.",
]

TABLE_EIGHT_PAIRS = [
    (
        "Leave the store trip to us",
        "Free & fast delivery directly from your local store.",
    ),
    (
        "Shop from home, save more time",
        "{campaign name} brings groceries & more right to your home with free delivery.",
    ),
    (
        "Maximize your savings",
        "Enjoy free shipping with no order minimum. Only with {campaign name}.",
    ),
    (
        "{campaign name} unlocks free shipping",
        "No order minimum means more savings, more often.",
    ),
]


def load_config(name: str) -> UseCaseSpec:
    with open(os.path.join(CONFIG_DIR, f"{name}.json"), encoding="utf-8") as fh:
        return UseCaseSpec.from_dict(json.load(fh))


@pytest.fixture(scope="session")
def campaign_a() -> UseCaseSpec:
    return load_config("campaign_a")


@pytest.fixture(scope="session")
def campaign_b() -> UseCaseSpec:
    return load_config("campaign_b")


@pytest.fixture(scope="session")
def campaign_c() -> UseCaseSpec:
    return load_config("campaign_c")


def header_only_spec(
    usecase_id: str = "unit-header",
    max_len: int = 40,
    plan_steps: tuple[PlanStep, ...] = (PlanStep("deterministic", "length"),),
    **constraint_overrides,
) -> UseCaseSpec:
    """Minimal single-component use case for pipeline-level tests."""
    constraints = dict(
        length=(LengthConstraint("header", max_len),),
        keywords_include=(),
        keywords_exclude=(),
        punctuation_after=(),
        lexical_prefs=(),
        judged_criteria=(),
    )
    constraints.update(constraint_overrides)
    return UseCaseSpec(
        usecase_id=usecase_id,
        context="unit-context",
        structure=CopyStructure(components=("header",)),
        constraints=ConstraintSet(**constraints),
        evaluator_plan=EvaluatorPlan(plan_version=1, steps=tuple(plan_steps)),
        prompt_fragments=PromptFragments(
            role="You write one-line banners.",
            contextual_descriptions={"unit-context": "A plain test banner."},
            instructions=("Keep it short.",),
            usecase_instructions=(),
            examples=({"header": "Plain offer, plainly put"},),
        ),
    )


def transcript_gateway(entries: list[dict], strict: bool = True) -> Gateway:
    """Gateway over an in-memory transcript; entries use the file schema."""
    return Gateway(MockProvider(MockTranscript.from_data({"strict": strict, "entries": entries})))


def write_transcript(path, entries: list[dict], strict: bool = True) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"strict": strict, "entries": entries}, fh)
    return str(path)


# -- lineage seeding for metrics and report fixtures -----------------------


def seed_lineage(
    log: EventLog,
    copy_id: str,
    rounds: list[str],
    max_refines: int = 2,
    evaluator: str = "length",
    final: str | None = None,
    usecase_id: str = "fixture-case",
) -> None:
    """Record one copy's history. rounds is a list of 'pass'/'fail'
    plan-round outcomes: a fail that is not the last round leads into a
    refinement; a final fail discards; a final pass goes to review.
    final='approve'/'reject' adds the human verdict."""
    log.record(
        copy_id,
        "CopyGenerated",
        {"components": {"header": "x"}, "usecase_id": usecase_id, "max_refines": max_refines},
    )
    for round_index, verdict in enumerate(rounds):
        log.record(copy_id, "CopyFormatted", {"components": {"header": "x"}})
        last_round = round_index == len(rounds) - 1
        if verdict == "pass":
            outcome = passing_outcome(evaluator)
            log.record(
                copy_id,
                "EvaluationRecorded",
                {"outcome": outcome.to_dict(), "step_index": 0, "plan_round": round_index},
            )
            log.record(copy_id, "SentToHumanReview", {"refine_count": round_index})
            break
        outcome = failing_outcome(
            evaluator,
            reason_code="length.exceeded",
            details={"component": "header", "measured": 99, "limit": 10},
            narrative="",
        )
        log.record(
            copy_id,
            "EvaluationRecorded",
            {"outcome": outcome.to_dict(), "step_index": 0, "plan_round": round_index},
        )
        if last_round:
            log.record(
                copy_id,
                "CopyDiscarded",
                {"reason": "refine_budget_exhausted", "last_reason_code": "length.exceeded"},
            )
            return
        log.record(
            copy_id,
            "RefinementRequested",
            {"reason_code": "length.exceeded", "instruction": "shorten", "prompt_digest": "d"},
        )
        log.record(copy_id, "CopyRefined", {"components": {"header": "x"}})
    if final is not None:
        log.record(copy_id, "HumanReviewRecorded", {"verdict": final})
