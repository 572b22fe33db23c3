"""Success-rate and failure-breakdown reporting over folded lineages.

All percentages are computed in decimal arithmetic and rounded half-up
to two places; binary-float rounding would mis-round exact halves.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .errors import EmptyInput
from .model import CopyLineage

#: Lineage states that count as passing all automated evaluations.
PASS_STATES = frozenset({"pending_human_review", "accepted", "human_rejected"})

_TWO_PLACES = Decimal("0.01")


def percentage(numerator: int, denominator: int) -> float:
    """100 * numerator / denominator, half-up to two decimals."""
    if denominator == 0:
        raise EmptyInput("percentage of an empty denominator")
    value = (Decimal(numerator) * 100) / Decimal(denominator)
    return float(value.quantize(_TWO_PLACES, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class SuccessRate:
    generated: int
    passed_first: int
    passed_total: int
    without_refinement: float
    with_refinement: float

    def to_dict(self) -> dict:
        return {
            "generated": self.generated,
            "passed_first": self.passed_first,
            "passed_total": self.passed_total,
            "without_refinement": self.without_refinement,
            "with_refinement": self.with_refinement,
        }


def success_rate(lineages: Sequence[CopyLineage]) -> SuccessRate:
    """Share of generated copies passing every evaluation, before and
    after refinement. A first-pass copy is one that reached a passing
    state without ever being refined."""
    if not lineages:
        raise EmptyInput("success_rate needs at least one lineage")
    generated = len(lineages)
    passed_first = sum(
        1 for l in lineages if l.state in PASS_STATES and l.refine_count == 0
    )
    passed_total = sum(1 for l in lineages if l.state in PASS_STATES)
    return SuccessRate(
        generated=generated,
        passed_first=passed_first,
        passed_total=passed_total,
        without_refinement=percentage(passed_first, generated),
        with_refinement=percentage(passed_total, generated),
    )


def _eval_events(lineage: CopyLineage) -> Iterable[dict]:
    for event in lineage.events:
        if event.get("kind") == "EvaluationRecorded":
            yield event


def _first_failure_evaluator(lineage: CopyLineage) -> str | None:
    for event in _eval_events(lineage):
        outcome = event.get("payload", {}).get("outcome", {})
        if not outcome.get("pass", False):
            return str(outcome.get("evaluator_id", "unknown"))
    return None


def _last_failure_evaluator(lineage: CopyLineage) -> str | None:
    last = None
    for event in _eval_events(lineage):
        outcome = event.get("payload", {}).get("outcome", {})
        if not outcome.get("pass", False):
            last = str(outcome.get("evaluator_id", "unknown"))
    return last


@dataclass(frozen=True)
class FailureBreakdown:
    total_failures: int
    first_failures: dict[str, int]
    first_failure_pcts: dict[str, float]
    refined_then_passed: int
    post_refinement_failures: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "total_failures": self.total_failures,
            "first_failures": dict(self.first_failures),
            "first_failure_pcts": dict(self.first_failure_pcts),
            "refined_then_passed": self.refined_then_passed,
            "post_refinement_failures": dict(self.post_refinement_failures),
        }


def failure_breakdown(lineages: Sequence[CopyLineage]) -> FailureBreakdown:
    """Per-evaluator counts of first-evaluation failures, plus what still
    failed after refinement. Percentages are shares of total failures."""
    first: dict[str, int] = {}
    post: dict[str, int] = {}
    refined_then_passed = 0
    for lineage in lineages:
        evaluator = _first_failure_evaluator(lineage)
        if evaluator is None:
            continue
        first[evaluator] = first.get(evaluator, 0) + 1
        if lineage.state in PASS_STATES:
            if lineage.refine_count > 0:
                refined_then_passed += 1
        elif lineage.state == "discarded" and lineage.refine_count > 0:
            last = _last_failure_evaluator(lineage) or "unknown"
            post[last] = post.get(last, 0) + 1
    total = sum(first.values())
    pcts = {
        name: percentage(count, total) for name, count in first.items()
    } if total else {}
    return FailureBreakdown(
        total_failures=total,
        first_failures=dict(sorted(first.items())),
        first_failure_pcts=dict(sorted(pcts.items())),
        refined_then_passed=refined_then_passed,
        post_refinement_failures=dict(sorted(post.items())),
    )


def state_counts(lineages: Sequence[CopyLineage]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for lineage in lineages:
        counts[lineage.state] = counts.get(lineage.state, 0) + 1
    return dict(sorted(counts.items()))


def job_report(lineages: Sequence[CopyLineage], requested: int | None = None) -> dict:
    """Everything the report endpoint and CLI print for one job."""
    if not lineages:
        raise EmptyInput("job_report needs at least one lineage")
    rates = success_rate(lineages)
    breakdown = failure_breakdown(lineages)
    return {
        "requested": requested if requested is not None else rates.generated,
        "states": state_counts(lineages),
        "success_rate": rates.to_dict(),
        "failure_breakdown": breakdown.to_dict(),
    }


def render_report_text(report: dict) -> str:
    """Aligned-text rendering of a job_report dict."""
    lines: list[str] = []
    rates = report["success_rate"]
    lines.append(f"requested copies          {report['requested']}")
    lines.append(f"generated copies          {rates['generated']}")
    lines.append(f"success without refinement  {rates['without_refinement']:.2f}%")
    lines.append(f"success with refinement     {rates['with_refinement']:.2f}%")
    lines.append("")
    lines.append("terminal states")
    for state, count in report["states"].items():
        lines.append(f"  {state:<24}{count}")
    breakdown = report["failure_breakdown"]
    if breakdown["total_failures"]:
        lines.append("")
        lines.append(f"first-evaluation failures   {breakdown['total_failures']}")
        for name, count in breakdown["first_failures"].items():
            pct = breakdown["first_failure_pcts"][name]
            lines.append(f"  {name:<24}{count:>6}  {pct:.2f}%")
        lines.append(f"refined then passed         {breakdown['refined_then_passed']}")
        if breakdown["post_refinement_failures"]:
            lines.append("still failing after refinement")
            for name, count in breakdown["post_refinement_failures"].items():
                lines.append(f"  {name:<24}{count:>6}")
    return "\n".join(lines)
