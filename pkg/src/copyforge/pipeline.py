"""End-to-end orchestration: generate, format, evaluate, refine, record.

One generation call produces a whole batch; each copy is then processed
independently through format -> plan -> refine rounds until it passes,
exhausts its refine budget, or loses its provider. Every transition is
appended to the job's event log, so a finished run is fully replayable.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

from . import taxonomy
from .constraints import JudgeRunner, run_plan
from .errors import ParseFailure, ProviderError
from .formatter import apply_rules, parse_generation, parse_refinement, ruleset_for
from .gateway import CompletionRequest, Gateway
from .judge import make_judge_runner
from .metrics import PASS_STATES, percentage, state_counts
from .model import CopyDraft, CopyLineage, EvaluatorPlan, FeedbackRecord, UseCaseSpec
from .store import EventLog

log = logging.getLogger("copyforge.pipeline")

#: Hard cap on copies per generation call.
MAX_BATCH_SIZE = 20


@dataclass(frozen=True)
class PromptBundle:
    """Assembled generation prompt: role, context, instructions, examples,
    batch instruction, and output-format instruction."""

    text: str
    batch_size: int


@dataclass(frozen=True)
class RefinePrompt:
    """Rendered instruction with the current copy appended."""

    instruction: str
    text: str

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()[:16]


def _common_header(spec: UseCaseSpec) -> list[str]:
    parts = [spec.prompt_fragments.role.strip()]
    description = spec.prompt_fragments.contextual_descriptions.get(spec.context)
    if description:
        parts.append(f"Campaign context: {description}")
    if spec.persona is not None:
        parts.append(
            f"Target audience ({spec.persona.persona_id}): {spec.persona.description}"
        )
    return parts


def _component_keys(spec: UseCaseSpec) -> str:
    return ", ".join(f'"{name}"' for name in spec.structure.components)


def build_generation_prompt(spec: UseCaseSpec, m: int) -> PromptBundle:
    parts = _common_header(spec)
    if spec.prompt_fragments.instructions:
        parts.append("Instructions:")
        parts.extend(f"- {line}" for line in spec.prompt_fragments.instructions)
    if spec.prompt_fragments.usecase_instructions:
        parts.append("Campaign-specific instructions:")
        parts.extend(f"- {line}" for line in spec.prompt_fragments.usecase_instructions)
    if spec.prompt_fragments.examples:
        parts.append("Example copies:")
        parts.extend(
            json.dumps(example, ensure_ascii=False)
            for example in spec.prompt_fragments.examples
        )
    parts.append(f"Generate {m} different copies.")
    parts.append(
        f"Answer with a JSON array of exactly {m} objects, "
        f"each with keys: {_component_keys(spec)}. No other text."
    )
    return PromptBundle(text="\n".join(parts), batch_size=m)


def build_refine_prompt(
    spec: UseCaseSpec, instruction: str, draft: CopyDraft
) -> RefinePrompt:
    parts = _common_header(spec)
    parts.append(instruction)
    parts.append(
        "Rewrite the copy below so the instruction is satisfied and every "
        f"other requirement stays satisfied. Answer with a single JSON object "
        f"with keys: {_component_keys(spec)}. No other text."
    )
    parts.append("Copy:")
    parts.append(json.dumps(draft.components, ensure_ascii=False))
    return RefinePrompt(instruction=instruction, text="\n".join(parts))


def render_instruction(feedback: FeedbackRecord) -> str:
    """Actionable imperative for the refiner, straight from the taxonomy."""
    return taxonomy.render_template(feedback.reason_code, feedback.details)


def generate_batch(
    spec: UseCaseSpec,
    m: int,
    gateway: Gateway,
    make_id: Callable[[], str] | None = None,
) -> list[CopyDraft]:
    """One generation call for m raw drafts.

    A malformed response is re-asked once; the re-ask is parsed leniently
    so partially valid batches are salvaged. A still-unusable response
    yields an empty batch with the deficit logged.
    """
    if not 1 <= m <= MAX_BATCH_SIZE:
        raise ValueError(f"batch size must be in 1..{MAX_BATCH_SIZE}")
    bundle = build_generation_prompt(spec, m)
    request = CompletionRequest(bundle.text, "generation")
    raw = gateway.complete(request)
    try:
        drafts = parse_generation(
            raw, spec.structure, m, spec.usecase_id, exact=True, make_id=make_id
        )
    except ParseFailure as exc:
        log.warning("generation parse failed (%s); re-asking once", exc.reason)
        raw = gateway.complete(request)
        try:
            drafts = parse_generation(
                raw, spec.structure, m, spec.usecase_id, exact=False, make_id=make_id
            )
        except ParseFailure as retry_exc:
            log.warning("generation re-ask unusable (%s); batch lost", retry_exc.reason)
            drafts = []
    if len(drafts) < m:
        log.warning("generation deficit: asked for %d copies, parsed %d", m, len(drafts))
    return drafts


def run_copy(
    draft: CopyDraft,
    spec: UseCaseSpec,
    max_refines: int,
    gateway: Gateway,
    event_log: EventLog,
    judge_runner: JudgeRunner | None = None,
) -> CopyLineage:
    """Process one raw draft to a terminal state, recording every step.

    Each refinement re-enters formatting and the full plan from the
    first step, so a fix for one evaluator can still be caught by any
    other on the next round.
    """
    if max_refines < 0:
        raise ValueError("max_refines must be non-negative")
    plan_version = spec.evaluator_plan.plan_version
    ruleset = ruleset_for(spec.format_rules)
    copy_id = draft.copy_id

    def record(kind: str, payload: dict) -> None:
        event_log.record(copy_id, kind, payload, plan_version=plan_version)

    record(
        "CopyGenerated",
        {
            "components": dict(draft.components),
            "usecase_id": spec.usecase_id,
            "max_refines": max_refines,
        },
    )
    refines = 0
    current = draft
    while True:
        formatted = apply_rules(current, ruleset)
        record("CopyFormatted", {"components": dict(formatted.components)})
        try:
            result = run_plan(formatted, spec, judge_runner)
        except ProviderError as exc:
            log.warning("copy %s lost its judge provider: %s", copy_id, exc)
            record("CopyDiscarded", {"reason": "provider_failure", "detail": str(exc)})
            break
        for index, outcome in enumerate(result.outcomes):
            record(
                "EvaluationRecorded",
                {
                    "outcome": outcome.to_dict(),
                    "step_index": index,
                    "plan_round": refines,
                },
            )
        if result.all_passed:
            record("SentToHumanReview", {"refine_count": refines})
            break
        failure = result.failure
        if refines >= max_refines:
            record(
                "CopyDiscarded",
                {
                    "reason": "refine_budget_exhausted",
                    "last_reason_code": failure.feedback.reason_code,
                },
            )
            break
        instruction = render_instruction(failure.feedback)
        prompt = build_refine_prompt(spec, instruction, formatted)
        record(
            "RefinementRequested",
            {
                "reason_code": failure.feedback.reason_code,
                "instruction": instruction,
                "prompt_digest": prompt.digest,
            },
        )
        request = CompletionRequest(prompt.text, "refinement")
        try:
            raw = gateway.complete(request)
            try:
                components = parse_refinement(raw, spec.structure)
            except ParseFailure as exc:
                log.warning(
                    "refinement parse failed for %s (%s); re-asking once",
                    copy_id,
                    exc.reason,
                )
                raw = gateway.complete(request)
                components = parse_refinement(raw, spec.structure)
        except ProviderError as exc:
            record("CopyDiscarded", {"reason": "provider_failure", "detail": str(exc)})
            break
        except ParseFailure as exc:
            record(
                "CopyDiscarded",
                {
                    "reason": "parse_failure",
                    "last_reason_code": failure.feedback.reason_code,
                    "detail": exc.reason,
                },
            )
            break
        refines += 1
        record("CopyRefined", {"components": dict(components)})
        current = CopyDraft(
            copy_id=copy_id,
            usecase_id=spec.usecase_id,
            components=components,
            formatted=False,
        )
    return event_log.replay(copy_id)


@dataclass(frozen=True)
class JobSummary:
    job_id: str
    usecase_id: str
    requested: int
    generated: int
    states: dict[str, int]
    success_without_refinement: float
    success_with_refinement: float

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "usecase_id": self.usecase_id,
            "requested": self.requested,
            "generated": self.generated,
            "states": dict(self.states),
            "success_without_refinement": self.success_without_refinement,
            "success_with_refinement": self.success_with_refinement,
        }


def run_job(
    spec: UseCaseSpec,
    total: int,
    batch_size: int,
    max_refines: int,
    gateway: Gateway,
    event_log: EventLog | None = None,
    judge_runner: JudgeRunner | None = None,
    workers: int = 1,
    job_id: str | None = None,
) -> JobSummary:
    """Generate and process `total` copies in batches of `batch_size`.

    Success rates use the requested total as denominator, so generation
    deficits count against the job. A lost generation batch is logged
    and the job continues with the copies it has.
    """
    if total < 1:
        raise ValueError("total must be at least 1")
    if not 1 <= batch_size <= MAX_BATCH_SIZE:
        raise ValueError(f"batch_size must be in 1..{MAX_BATCH_SIZE}")
    if max_refines < 0:
        raise ValueError("max_refines must be non-negative")
    if workers < 1:
        raise ValueError("workers must be at least 1")

    job = job_id or "job-" + uuid.uuid4().hex[:12]
    own_log = event_log or EventLog(path=None, job_id=job)
    if judge_runner is None:
        has_judged = any(s.kind == "judged" for s in spec.evaluator_plan.steps)
        judge_runner = make_judge_runner(gateway) if has_judged else None

    counter = itertools.count(1)

    def make_id() -> str:
        return f"{job}-c{next(counter):04d}"

    drafts: list[CopyDraft] = []
    remaining = total
    batch_index = 0
    while remaining > 0:
        size = min(batch_size, remaining)
        try:
            drafts.extend(generate_batch(spec, size, gateway, make_id=make_id))
        except ProviderError as exc:
            log.warning("generation batch %d lost: %s", batch_index, exc)
        remaining -= size
        batch_index += 1

    if workers == 1 or len(drafts) <= 1:
        lineages = [
            run_copy(d, spec, max_refines, gateway, own_log, judge_runner)
            for d in drafts
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            lineages = list(
                pool.map(
                    lambda d: run_copy(d, spec, max_refines, gateway, own_log, judge_runner),
                    drafts,
                )
            )

    passed_first = sum(
        1 for l in lineages if l.state in PASS_STATES and l.refine_count == 0
    )
    passed_total = sum(1 for l in lineages if l.state in PASS_STATES)
    return JobSummary(
        job_id=job,
        usecase_id=spec.usecase_id,
        requested=total,
        generated=len(lineages),
        states=state_counts(lineages),
        success_without_refinement=percentage(passed_first, total),
        success_with_refinement=percentage(passed_total, total),
    )


def deterministic_only(spec: UseCaseSpec) -> UseCaseSpec:
    """Copy of the use case whose plan keeps only deterministic steps; used to
    evaluate existing copies when no judge provider is configured."""
    steps = tuple(s for s in spec.evaluator_plan.steps if s.kind == "deterministic")
    plan = EvaluatorPlan(plan_version=spec.evaluator_plan.plan_version, steps=steps)
    return replace(spec, evaluator_plan=plan)
