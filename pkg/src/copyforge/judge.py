"""LLM-graded evaluators, one criterion per call.

The prompt asks for step-by-step reasoning and a final one-line JSON
answer block. Parsing reads the LAST well-formed JSON object carrying
a "verdict" key, so the reasoning text can mention JSON freely. An
unreadable answer is re-asked once; a second unreadable answer becomes
a failing outcome with reason judge.unparseable, because a copy must
earn its pass.
"""

from __future__ import annotations

import json
import re

from .errors import JudgeFormatError, JudgeUnavailable, ProviderError
from .gateway import CompletionRequest, Gateway
from .model import (
    CopyDraft,
    EvaluationOutcome,
    JudgedCriterion,
    UseCaseSpec,
    failing_outcome,
    passing_outcome,
)

JUDGE_PROMPT_VERSION = "judge-prompts/1"

_QUESTIONS = {
    "tone": "Does the copy's tone of voice match the brand tone described above?",
    "coherence": "Do the header and subheader form a coherent message together?",
    "topic_inclusion": "Does the copy talk about the required topic described above?",
    "topic_exclusion": "Does the copy stay away from the excluded topic described above?",
    "persona": "Does the copy speak to the target audience described above?",
    "value_proposition": "Does the copy communicate the value proposition described above?",
    "style": "Does the copy follow the style guidance described above?",
}

_ANSWER_INSTRUCTION = (
    "Think step by step about whether the copy meets the criterion. "
    "After your reasoning, end your reply with exactly one JSON object on its own line:\n"
    '{"verdict": "pass" | "fail", "reason_code": "<short_snake_case_code>", '
    '"narrative": "<one sentence explaining the verdict>"}'
)


def build_judge_prompt(
    draft: CopyDraft, criterion: JudgedCriterion, spec: UseCaseSpec
) -> str:
    """Assemble the single-aspect grading prompt."""
    if criterion.kind == "coherence" and len(spec.structure.components) != 2:
        raise ValueError("coherence judging requires a two-component structure")

    lines: list[str] = [
        "You are a strict brand-compliance reviewer grading marketing copy.",
    ]
    description = spec.prompt_fragments.contextual_descriptions.get(spec.context)
    if description:
        lines.append(f"Campaign context: {description}")
    if criterion.kind == "persona" and spec.persona is not None:
        lines.append(
            f"Target audience ({spec.persona.persona_id}): {spec.persona.description}"
        )
    lines.append("Grade exactly one aspect of the copy.")
    lines.append(f"Criterion ({criterion.kind}): {criterion.rubric_text}")
    lines.append(_QUESTIONS[criterion.kind])
    if criterion.few_shot:
        lines.append("Labeled examples:")
        for example in criterion.few_shot:
            rendered = json.dumps(example.components, ensure_ascii=False)
            note = f" ({example.note})" if example.note else ""
            lines.append(f"- {example.label}: {rendered}{note}")
    lines.append("Copy to grade:")
    lines.append(json.dumps(draft.components, ensure_ascii=False))
    lines.append(_ANSWER_INSTRUCTION)
    return "\n".join(lines)


def _last_answer_block(raw: str) -> dict | None:
    decoder = json.JSONDecoder()
    found: dict | None = None
    for i, ch in enumerate(raw):
        if ch != "{":
            continue
        try:
            value, _ = decoder.raw_decode(raw, i)
        except ValueError:
            continue
        if isinstance(value, dict) and "verdict" in value:
            found = value
    return found


def _slug(code: str) -> str:
    cleaned = re.sub(r"[^a-z0-9_.-]+", "_", code.strip().casefold()).strip("_")
    return cleaned or "failed"


def parse_judge_response(raw: str, criterion: JudgedCriterion) -> EvaluationOutcome:
    """Turn the verbatim judge reply into an outcome; reasoning text ahead
    of the answer block is ignored."""
    block = _last_answer_block(raw)
    if block is None:
        raise JudgeFormatError("no JSON answer block with a verdict found")
    verdict = str(block.get("verdict", "")).strip().casefold()
    evaluator_id = f"judge:{criterion.criterion_id}"
    if verdict == "pass":
        return passing_outcome(evaluator_id)
    if verdict != "fail":
        raise JudgeFormatError(f"verdict must be pass or fail, got {verdict!r}")
    narrative = str(block.get("narrative", "")).strip()
    reason_code = f"judge.{criterion.kind}.{_slug(str(block.get('reason_code', '')))}"
    return failing_outcome(
        evaluator_id,
        reason_code,
        {
            "criterion_id": criterion.criterion_id,
            "kind": criterion.kind,
            "narrative": narrative,
        },
        narrative,
    )


def run_judge(
    draft: CopyDraft,
    criterion: JudgedCriterion,
    spec: UseCaseSpec,
    gateway: Gateway,
) -> EvaluationOutcome:
    """One grading call, with a single re-ask on an unreadable answer."""
    prompt = build_judge_prompt(draft, criterion, spec)
    request = CompletionRequest(prompt, f"judge:{criterion.criterion_id}")
    try:
        raw = gateway.complete(request)
    except ProviderError as exc:
        raise JudgeUnavailable(str(exc)) from exc
    try:
        return parse_judge_response(raw, criterion)
    except JudgeFormatError:
        pass
    try:
        raw = gateway.complete(request)
    except ProviderError as exc:
        raise JudgeUnavailable(str(exc)) from exc
    try:
        return parse_judge_response(raw, criterion)
    except JudgeFormatError:
        return failing_outcome(
            f"judge:{criterion.criterion_id}",
            "judge.unparseable",
            {"criterion_id": criterion.criterion_id, "kind": criterion.kind},
            "judge response had no readable answer block after a retry",
        )


def make_judge_runner(gateway: Gateway):
    """Adapter giving run_plan a (draft, criterion, spec) callable."""

    def runner(
        draft: CopyDraft, criterion: JudgedCriterion, spec: UseCaseSpec
    ) -> EvaluationOutcome:
        return run_judge(draft, criterion, spec, gateway)

    return runner
