"""Constrained marketing-copy generation with evaluate/refine loops."""

from .constraints import (
    PlanResult,
    check_keywords,
    check_length,
    check_lexical_prefs,
    check_punctuation_after,
    run_plan,
)
from .diversity import select_diverse, similarity
from .errors import (
    CopyforgeError,
    EmptyInput,
    InvalidScenario,
    JudgeFormatError,
    JudgeUnavailable,
    NotFound,
    ParseFailure,
    ProviderError,
    ProviderRejected,
    ProviderTimeout,
    SequenceViolation,
    StorageFailure,
    TranscriptExhausted,
    TranscriptMismatch,
    UnknownReasonCode,
)
from .formatter import BRAND_DEFAULT_V1, FormatRule, apply_rules, parse_generation
from .gateway import (
    CompletionRequest,
    Gateway,
    HttpProvider,
    MockProvider,
    MockTranscript,
    TranscriptEntry,
    build_gateway,
    build_provider,
    load_transcript,
)
from .judge import build_judge_prompt, parse_judge_response, run_judge
from .mab import Arm, ArmStats, SimReport, simulate, simulate_scenario
from .metrics import failure_breakdown, job_report, success_rate
from .model import (
    ConstraintSet,
    CopyDraft,
    CopyLineage,
    CopyStructure,
    EvaluationOutcome,
    EvaluatorPlan,
    FeedbackRecord,
    JudgedCriterion,
    LengthConstraint,
    PersonaSpec,
    PlanStep,
    PromptFragments,
    ProviderConfig,
    UseCaseSpec,
    ValidationReport,
    validate_usecase,
)
from .pipeline import (
    JobSummary,
    build_generation_prompt,
    build_refine_prompt,
    generate_batch,
    render_instruction,
    run_copy,
    run_job,
)
from .store import EventLog, LineageEvent, open_job_log

__version__ = "0.1.0"

__all__ = [
    "Arm",
    "ArmStats",
    "BRAND_DEFAULT_V1",
    "CompletionRequest",
    "ConstraintSet",
    "CopyDraft",
    "CopyLineage",
    "CopyStructure",
    "CopyforgeError",
    "EmptyInput",
    "EvaluationOutcome",
    "EvaluatorPlan",
    "EventLog",
    "FeedbackRecord",
    "FormatRule",
    "Gateway",
    "HttpProvider",
    "InvalidScenario",
    "JobSummary",
    "JudgeFormatError",
    "JudgeUnavailable",
    "JudgedCriterion",
    "LengthConstraint",
    "LineageEvent",
    "MockProvider",
    "MockTranscript",
    "NotFound",
    "ParseFailure",
    "PersonaSpec",
    "PlanResult",
    "PlanStep",
    "PromptFragments",
    "ProviderConfig",
    "ProviderError",
    "ProviderRejected",
    "ProviderTimeout",
    "SequenceViolation",
    "SimReport",
    "StorageFailure",
    "TranscriptEntry",
    "TranscriptExhausted",
    "TranscriptMismatch",
    "UnknownReasonCode",
    "UseCaseSpec",
    "ValidationReport",
    "apply_rules",
    "build_gateway",
    "build_generation_prompt",
    "build_judge_prompt",
    "build_provider",
    "build_refine_prompt",
    "check_keywords",
    "check_length",
    "check_lexical_prefs",
    "check_punctuation_after",
    "failure_breakdown",
    "generate_batch",
    "job_report",
    "load_transcript",
    "open_job_log",
    "parse_generation",
    "parse_judge_response",
    "render_instruction",
    "run_copy",
    "run_job",
    "run_judge",
    "run_plan",
    "select_diverse",
    "similarity",
    "simulate",
    "simulate_scenario",
    "success_rate",
    "validate_usecase",
]
