"""Shared domain types for constrained copy generation.

Every type here is an immutable value with dict/JSON round-trip helpers.
Invariant checking is concentrated in validate_usecase, which reports
violations as data rather than raising, so campaign configs can be
linted before any pipeline work starts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

LINEAGE_STATES = (
    "generating",
    "evaluating",
    "refining",
    "pending_human_review",
    "accepted",
    "human_rejected",
    "discarded",
)

#: States a copy can finish the automated pipeline in. Review later moves
#: pending copies to accepted or human_rejected.
TERMINAL_STATES = frozenset(
    {"pending_human_review", "accepted", "human_rejected", "discarded"}
)

#: Evaluator ids the deterministic constraint engine implements.
DETERMINISTIC_EVALUATORS = ("length", "keywords", "punctuation_after", "lexical_prefs")

JUDGED_KINDS = (
    "tone",
    "coherence",
    "topic_inclusion",
    "topic_exclusion",
    "persona",
    "value_proposition",
    "style",
)

#: Scope marker for outcomes grading the whole copy rather than one component.
WHOLE_COPY = "copy"

#: Normalization rules the formatter ships, in their default order.
FORMAT_RULE_IDS = (
    "serial_comma_removal",
    "ampersand_substitution",
    "terminal_punctuation_strip",
    "whitespace_collapse",
)


@dataclass(frozen=True)
class CopyStructure:
    """Ordered component names a copy must provide (header, optional subheader)."""

    components: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"components": list(self.components)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CopyStructure":
        return cls(components=tuple(data["components"]))


@dataclass(frozen=True)
class LengthConstraint:
    """Character budget for one component; length counts Unicode scalars, spaces included."""

    component: str
    max_len: int
    min_len: int | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"component": self.component, "max_len": self.max_len}
        if self.min_len is not None:
            out["min_len"] = self.min_len
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "LengthConstraint":
        return cls(
            component=data["component"],
            max_len=int(data["max_len"]),
            min_len=int(data["min_len"]) if data.get("min_len") is not None else None,
        )


@dataclass(frozen=True)
class FewShotExample:
    """One labeled example embedded in a judge prompt."""

    components: dict[str, str]
    label: str  # "pass" | "fail"
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"components": dict(self.components), "label": self.label}
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FewShotExample":
        return cls(
            components=dict(data["components"]),
            label=data["label"],
            note=data.get("note", ""),
        )


@dataclass(frozen=True)
class JudgedCriterion:
    """A single LLM-graded aspect (tone, coherence, persona fit, ...)."""

    criterion_id: str
    kind: str
    rubric_text: str
    few_shot: tuple[FewShotExample, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "criterion_id": self.criterion_id,
            "kind": self.kind,
            "rubric_text": self.rubric_text,
        }
        if self.few_shot:
            out["few_shot"] = [ex.to_dict() for ex in self.few_shot]
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "JudgedCriterion":
        return cls(
            criterion_id=data["criterion_id"],
            kind=data["kind"],
            rubric_text=data["rubric_text"],
            few_shot=tuple(
                FewShotExample.from_dict(ex) for ex in data.get("few_shot", [])
            ),
        )


@dataclass(frozen=True)
class ConstraintSet:
    """All constraint parameters for one use case.

    keywords_include holds groups of alternatives: each group is satisfied
    by any one literal, and every group must be satisfied. lexical_prefs
    pairs are (preferred, avoided).
    """

    length: tuple[LengthConstraint, ...]
    keywords_include: tuple[tuple[str, ...], ...] = ()
    keywords_exclude: tuple[str, ...] = ()
    punctuation_after: tuple[str, ...] = ()
    lexical_prefs: tuple[tuple[str, str], ...] = ()
    judged_criteria: tuple[JudgedCriterion, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "length": [c.to_dict() for c in self.length],
            "keywords_include": [list(g) for g in self.keywords_include],
            "keywords_exclude": list(self.keywords_exclude),
            "punctuation_after": list(self.punctuation_after),
            "lexical_prefs": [list(p) for p in self.lexical_prefs],
            "judged_criteria": [c.to_dict() for c in self.judged_criteria],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ConstraintSet":
        return cls(
            length=tuple(LengthConstraint.from_dict(c) for c in data.get("length", [])),
            keywords_include=tuple(
                tuple(g) for g in data.get("keywords_include", [])
            ),
            keywords_exclude=tuple(data.get("keywords_exclude", [])),
            punctuation_after=tuple(data.get("punctuation_after", [])),
            lexical_prefs=tuple(
                (p[0], p[1]) for p in data.get("lexical_prefs", [])
            ),
            judged_criteria=tuple(
                JudgedCriterion.from_dict(c) for c in data.get("judged_criteria", [])
            ),
        )


@dataclass(frozen=True)
class PlanStep:
    """One evaluator reference: deterministic engine check or judged criterion."""

    kind: str  # "deterministic" | "judged"
    evaluator_id: str

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "evaluator_id": self.evaluator_id}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PlanStep":
        return cls(kind=data["kind"], evaluator_id=data["evaluator_id"])


@dataclass(frozen=True)
class EvaluatorPlan:
    """Ordered evaluator sequence applied to every formatted copy."""

    plan_version: int
    steps: tuple[PlanStep, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "plan_version": self.plan_version,
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EvaluatorPlan":
        return cls(
            plan_version=int(data["plan_version"]),
            steps=tuple(PlanStep.from_dict(s) for s in data["steps"]),
        )


@dataclass(frozen=True)
class PromptFragments:
    """Prompt building blocks: role, contextual descriptions, shared and
    usecase-specific instructions, and few-shot example copies."""

    role: str
    contextual_descriptions: dict[str, str] = field(default_factory=dict)
    instructions: tuple[str, ...] = ()
    usecase_instructions: tuple[str, ...] = ()
    examples: tuple[dict[str, str], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "role": self.role,
            "contextual_descriptions": dict(self.contextual_descriptions),
            "instructions": list(self.instructions),
            "usecase_instructions": list(self.usecase_instructions),
            "examples": [dict(ex) for ex in self.examples],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PromptFragments":
        return cls(
            role=data["role"],
            contextual_descriptions=dict(data.get("contextual_descriptions", {})),
            instructions=tuple(data.get("instructions", [])),
            usecase_instructions=tuple(data.get("usecase_instructions", [])),
            examples=tuple(dict(ex) for ex in data.get("examples", [])),
        )


@dataclass(frozen=True)
class PersonaSpec:
    """Target audience cohort the copy must address."""

    persona_id: str
    description: str

    def to_dict(self) -> dict[str, Any]:
        return {"persona_id": self.persona_id, "description": self.description}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PersonaSpec":
        return cls(persona_id=data["persona_id"], description=data["description"])


@dataclass(frozen=True)
class UseCaseSpec:
    """Complete declarative definition of one campaign use case."""

    usecase_id: str
    context: str
    structure: CopyStructure
    constraints: ConstraintSet
    evaluator_plan: EvaluatorPlan
    prompt_fragments: PromptFragments
    persona: PersonaSpec | None = None
    format_rules: tuple[str, ...] | None = None  # None = builtin default ruleset

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "usecase_id": self.usecase_id,
            "context": self.context,
            "structure": self.structure.to_dict(),
            "constraints": self.constraints.to_dict(),
            "evaluator_plan": self.evaluator_plan.to_dict(),
            "prompt_fragments": self.prompt_fragments.to_dict(),
        }
        if self.persona is not None:
            out["persona"] = self.persona.to_dict()
        if self.format_rules is not None:
            out["format_rules"] = list(self.format_rules)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "UseCaseSpec":
        persona = data.get("persona")
        rules = data.get("format_rules")
        return cls(
            usecase_id=data["usecase_id"],
            context=data.get("context", ""),
            structure=CopyStructure.from_dict(data["structure"]),
            constraints=ConstraintSet.from_dict(data["constraints"]),
            evaluator_plan=EvaluatorPlan.from_dict(data["evaluator_plan"]),
            prompt_fragments=PromptFragments.from_dict(data["prompt_fragments"]),
            persona=PersonaSpec.from_dict(persona) if persona is not None else None,
            format_rules=tuple(rules) if rules is not None else None,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "UseCaseSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CopyDraft:
    """One copy, raw (formatted=False) or normalized (formatted=True)."""

    copy_id: str
    usecase_id: str
    components: dict[str, str]
    formatted: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "copy_id": self.copy_id,
            "usecase_id": self.usecase_id,
            "components": dict(self.components),
            "formatted": self.formatted,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CopyDraft":
        return cls(
            copy_id=data["copy_id"],
            usecase_id=data["usecase_id"],
            components=dict(data["components"]),
            formatted=bool(data.get("formatted", False)),
        )


@dataclass(frozen=True)
class FeedbackRecord:
    """Machine-readable failure feedback: taxonomy code, structured details,
    and a human-readable narrative."""

    reason_code: str
    details: dict[str, Any] = field(default_factory=dict)
    narrative: str = ""

    PASS_CODE = "pass"

    @classmethod
    def passing(cls) -> "FeedbackRecord":
        """The default record attached to every passing outcome."""
        return cls(reason_code=cls.PASS_CODE, details={}, narrative="")

    def is_default(self) -> bool:
        return self.reason_code == self.PASS_CODE and not self.details and not self.narrative

    def to_dict(self) -> dict[str, Any]:
        return {
            "reason_code": self.reason_code,
            "details": dict(self.details),
            "narrative": self.narrative,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FeedbackRecord":
        return cls(
            reason_code=data["reason_code"],
            details=dict(data.get("details", {})),
            narrative=data.get("narrative", ""),
        )


@dataclass(frozen=True)
class EvaluationOutcome:
    """Verdict of one evaluator on one copy.

    The serialized field is named "pass"; the attribute is `passed` only
    because "pass" is a Python keyword.
    """

    evaluator_id: str
    passed: bool
    feedback: FeedbackRecord
    scope: str = WHOLE_COPY

    def to_dict(self) -> dict[str, Any]:
        return {
            "evaluator_id": self.evaluator_id,
            "pass": self.passed,
            "feedback": self.feedback.to_dict(),
            "scope": self.scope,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EvaluationOutcome":
        return cls(
            evaluator_id=data["evaluator_id"],
            passed=bool(data["pass"]),
            feedback=FeedbackRecord.from_dict(data["feedback"]),
            scope=data.get("scope", WHOLE_COPY),
        )


def passing_outcome(evaluator_id: str, scope: str = WHOLE_COPY) -> EvaluationOutcome:
    return EvaluationOutcome(evaluator_id, True, FeedbackRecord.passing(), scope)


def failing_outcome(
    evaluator_id: str,
    reason_code: str,
    details: dict[str, Any],
    narrative: str,
    scope: str = WHOLE_COPY,
) -> EvaluationOutcome:
    return EvaluationOutcome(
        evaluator_id, False, FeedbackRecord(reason_code, details, narrative), scope
    )


@dataclass(frozen=True)
class CopyLineage:
    """Folded view of one copy's event history."""

    copy_id: str
    usecase_id: str
    refine_count: int
    max_refines: int
    state: str
    events: tuple[dict[str, Any], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "copy_id": self.copy_id,
            "usecase_id": self.usecase_id,
            "refine_count": self.refine_count,
            "max_refines": self.max_refines,
            "state": self.state,
            "events": [dict(ev) for ev in self.events],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CopyLineage":
        return cls(
            copy_id=data["copy_id"],
            usecase_id=data["usecase_id"],
            refine_count=int(data["refine_count"]),
            max_refines=int(data["max_refines"]),
            state=data["state"],
            events=tuple(dict(ev) for ev in data.get("events", [])),
        )


@dataclass(frozen=True)
class ProviderConfig:
    """How to reach the text-completion provider (or its scripted mock)."""

    provider_kind: str  # "http" | "mock"
    model_id: str = "default"
    temperature: float = 0.7
    max_output_tokens: int = 1024
    endpoint: str | None = None
    credential_env: str | None = None
    transcript_path: str | None = None
    max_concurrency: int = 4

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "provider_kind": self.provider_kind,
            "model_id": self.model_id,
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
            "max_concurrency": self.max_concurrency,
        }
        if self.endpoint is not None:
            out["endpoint"] = self.endpoint
        if self.credential_env is not None:
            out["credential_env"] = self.credential_env
        if self.transcript_path is not None:
            out["transcript_path"] = self.transcript_path
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProviderConfig":
        return cls(
            provider_kind=data["provider_kind"],
            model_id=data.get("model_id", "default"),
            temperature=float(data.get("temperature", 0.7)),
            max_output_tokens=int(data.get("max_output_tokens", 1024)),
            endpoint=data.get("endpoint"),
            credential_env=data.get("credential_env"),
            transcript_path=data.get("transcript_path"),
            max_concurrency=int(data.get("max_concurrency", 4)),
        )


@dataclass(frozen=True)
class Violation:
    """One invariant breach found by validate_usecase."""

    path: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"path": self.path, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def _blank(text: str) -> bool:
    return not text.strip()


def validate_usecase(spec: UseCaseSpec) -> ValidationReport:
    """Check every declared invariant; an empty report means the use case is usable."""
    found: list[Violation] = []

    def bad(path: str, message: str) -> None:
        found.append(Violation(path, message))

    if _blank(spec.usecase_id):
        bad("usecase_id", "must be non-empty")

    comps = spec.structure.components
    if not 1 <= len(comps) <= 2:
        bad("structure.components", f"needs 1 or 2 components, has {len(comps)}")
    if len(set(comps)) != len(comps):
        bad("structure.components", "component names must be unique")
    for i, name in enumerate(comps):
        if _blank(name):
            bad(f"structure.components[{i}]", "component name must be non-empty")

    by_component: dict[str, int] = {}
    for i, lc in enumerate(spec.constraints.length):
        by_component[lc.component] = by_component.get(lc.component, 0) + 1
        if lc.component not in comps:
            bad(f"constraints.length[{i}]", f"unknown component {lc.component!r}")
        if lc.max_len <= 0:
            bad(f"constraints.length[{i}].max_len", "must be positive")
        if lc.min_len is not None:
            if lc.min_len < 0:
                bad(f"constraints.length[{i}].min_len", "must be non-negative")
            elif lc.min_len >= lc.max_len:
                bad(f"constraints.length[{i}].min_len", "must be less than max_len")
    for name in comps:
        n = by_component.get(name, 0)
        if n != 1:
            bad(
                "constraints.length",
                f"component {name!r} needs exactly one length constraint, has {n}",
            )

    for g, group in enumerate(spec.constraints.keywords_include):
        if not group:
            bad(f"constraints.keywords_include[{g}]", "group must be non-empty")
        for a, alt in enumerate(group):
            if _blank(alt):
                bad(
                    f"constraints.keywords_include[{g}][{a}]",
                    "literal must be non-empty after trimming",
                )
    for i, term in enumerate(spec.constraints.keywords_exclude):
        if _blank(term):
            bad(f"constraints.keywords_exclude[{i}]", "literal must be non-empty after trimming")
    for i, word in enumerate(spec.constraints.punctuation_after):
        if _blank(word):
            bad(f"constraints.punctuation_after[{i}]", "word must be non-empty after trimming")
    for i, pair in enumerate(spec.constraints.lexical_prefs):
        preferred, avoided = pair
        if _blank(preferred) or _blank(avoided):
            bad(f"constraints.lexical_prefs[{i}]", "terms must be non-empty after trimming")
        elif preferred.strip().casefold() == avoided.strip().casefold():
            bad(f"constraints.lexical_prefs[{i}]", "preferred and avoided terms must differ")

    criterion_ids: set[str] = set()
    for i, crit in enumerate(spec.constraints.judged_criteria):
        where = f"constraints.judged_criteria[{i}]"
        if _blank(crit.criterion_id):
            bad(where, "criterion_id must be non-empty")
        elif crit.criterion_id in criterion_ids:
            bad(where, f"duplicate criterion_id {crit.criterion_id!r}")
        criterion_ids.add(crit.criterion_id)
        if crit.kind not in JUDGED_KINDS:
            bad(f"{where}.kind", f"unknown kind {crit.kind!r}")
        if _blank(crit.rubric_text):
            bad(f"{where}.rubric_text", "must be non-empty")
        if crit.kind == "coherence" and len(comps) != 2:
            bad(where, "coherence requires a two-component structure")
        if crit.kind == "persona" and spec.persona is None:
            bad(where, "persona criterion requires spec.persona")
        for j, ex in enumerate(crit.few_shot):
            if ex.label not in ("pass", "fail"):
                bad(f"{where}.few_shot[{j}].label", "must be 'pass' or 'fail'")

    plan = spec.evaluator_plan
    if plan.plan_version < 1:
        bad("evaluator_plan.plan_version", "must be a positive integer")
    if not plan.steps:
        bad("evaluator_plan.steps", "plan needs at least one step")
    seen_judged = False
    seen_steps: set[tuple[str, str]] = set()
    for i, step in enumerate(plan.steps):
        where = f"evaluator_plan.steps[{i}]"
        key = (step.kind, step.evaluator_id)
        if key in seen_steps:
            bad(where, f"duplicate step {step.evaluator_id!r}")
        seen_steps.add(key)
        if step.kind == "judged":
            seen_judged = True
            if step.evaluator_id not in criterion_ids:
                bad(where, f"no judged criterion named {step.evaluator_id!r}")
        elif step.kind == "deterministic":
            if seen_judged:
                bad(where, "deterministic steps must precede judged steps")
            if step.evaluator_id not in DETERMINISTIC_EVALUATORS:
                bad(where, f"unknown deterministic evaluator {step.evaluator_id!r}")
            elif step.evaluator_id == "keywords":
                if not spec.constraints.keywords_include and not spec.constraints.keywords_exclude:
                    bad(where, "keywords step needs include groups or an exclude list")
            elif step.evaluator_id == "punctuation_after":
                if not spec.constraints.punctuation_after:
                    bad(where, "punctuation_after step needs a word list")
            elif step.evaluator_id == "lexical_prefs":
                if not spec.constraints.lexical_prefs:
                    bad(where, "lexical_prefs step needs preference pairs")
        else:
            bad(where, f"unknown step kind {step.kind!r}")

    if _blank(spec.prompt_fragments.role):
        bad("prompt_fragments.role", "role text is required")
    if spec.context and spec.context not in spec.prompt_fragments.contextual_descriptions:
        bad(
            "prompt_fragments.contextual_descriptions",
            f"missing description for context {spec.context!r}",
        )

    if spec.persona is not None and _blank(spec.persona.description):
        bad("persona.description", "must be non-empty")

    if spec.format_rules is not None:
        if not spec.format_rules:
            bad("format_rules", "must list at least one rule when present")
        for i, rule_id in enumerate(spec.format_rules):
            if rule_id not in FORMAT_RULE_IDS:
                bad(f"format_rules[{i}]", f"unknown rule {rule_id!r}")
        if len(set(spec.format_rules)) != len(spec.format_rules):
            bad("format_rules", "rule ids must be unique")

    return ValidationReport(violations=tuple(found))
