"""Reporting math: decimal rounding, success rates, failure histograms."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seed_lineage
from copyforge.errors import EmptyInput
from copyforge.metrics import (
    failure_breakdown,
    job_report,
    percentage,
    render_report_text,
    state_counts,
    success_rate,
)
from copyforge.store import EventLog
from oracles import half_up_pct


def test_percentage_half_up_not_bankers():
    # 3/800 = 0.375%; bankers rounding would give 0.38 too, so use 1/800
    assert percentage(1, 800) == 0.13  # 0.125 rounds up, not to even
    assert percentage(3, 800) == 0.38
    assert percentage(1, 3) == 33.33
    assert percentage(2, 3) == 66.67
    assert percentage(0, 7) == 0.0
    assert percentage(7, 7) == 100.0


def test_percentage_rejects_empty_denominator():
    with pytest.raises(EmptyInput):
        percentage(1, 0)


@given(st.integers(0, 10**6), st.integers(1, 10**6))
def test_percentage_agrees_with_fraction_oracle(num, den):
    assert percentage(num, den) == half_up_pct(num, den)


def test_report_row_arithmetic_is_exact():
    # frozen counts behind the replay fixtures; each must round bit-exactly
    rows = [
        (100, 41, 65, 41.0, 65.0),
        (100, 34, 56, 34.0, 56.0),
        (180, 83, 141, 46.11, 78.33),
        (220, 67, 146, 30.45, 66.36),
        (437, 180, 251, 41.19, 57.44),
    ]
    for total, first, final, want_first, want_final in rows:
        assert percentage(first, total) == want_first
        assert percentage(final, total) == want_final


def mixed_log() -> EventLog:
    """4 clean passes, 2 refined-then-pass, 3 refined-then-discard,
    1 discarded with no budget."""
    log = EventLog()
    for i in range(4):
        seed_lineage(log, f"ok{i}", ["pass"])
    for i in range(2):
        seed_lineage(log, f"fix{i}", ["fail", "pass"])
    for i in range(3):
        seed_lineage(log, f"bad{i}", ["fail", "fail"], max_refines=1)
    seed_lineage(log, "dud", ["fail"], max_refines=0)
    return log


def test_success_rate_counts_refinement_separately():
    rates = success_rate(mixed_log().query())
    assert rates.generated == 10
    assert rates.passed_first == 4
    assert rates.passed_total == 6
    assert rates.without_refinement == 40.0
    assert rates.with_refinement == 60.0


def test_success_rate_counts_reviewed_copies_as_passed():
    # human verdicts do not change the automated-evaluation pass counts
    log = EventLog()
    seed_lineage(log, "a", ["pass"], final="approve")
    seed_lineage(log, "b", ["pass"], final="reject")
    rates = success_rate(log.query())
    assert rates.passed_first == 2
    assert rates.passed_total == 2


def test_success_rate_rejects_empty_input():
    with pytest.raises(EmptyInput):
        success_rate([])


def breakdown_log() -> EventLog:
    log = EventLog()
    for i in range(4):
        seed_lineage(log, f"ok{i}", ["pass"])
    seed_lineage(log, "len-fix0", ["fail", "pass"], evaluator="length")
    seed_lineage(log, "len-fix1", ["fail", "pass"], evaluator="length")
    seed_lineage(log, "len-bad", ["fail", "fail"], max_refines=1, evaluator="length")
    seed_lineage(log, "kw-bad0", ["fail", "fail"], max_refines=1, evaluator="keywords")
    seed_lineage(log, "kw-bad1", ["fail", "fail"], max_refines=1, evaluator="keywords")
    seed_lineage(log, "judge-dud", ["fail"], max_refines=0, evaluator="judge:tone-of-voice")
    return log


def test_failure_breakdown_histograms():
    got = failure_breakdown(breakdown_log().query())
    assert got.total_failures == 6
    assert got.first_failures == {
        "judge:tone-of-voice": 1,
        "keywords": 2,
        "length": 3,
    }
    assert got.first_failure_pcts == {
        "judge:tone-of-voice": 16.67,
        "keywords": 33.33,
        "length": 50.0,
    }
    assert got.refined_then_passed == 2
    # the judge dud never refined, so it is not a post-refinement failure
    assert got.post_refinement_failures == {"keywords": 2, "length": 1}


def test_failure_breakdown_empty_when_all_pass():
    log = EventLog()
    seed_lineage(log, "a", ["pass"])
    got = failure_breakdown(log.query())
    assert got.total_failures == 0
    assert got.first_failure_pcts == {}
    assert got.refined_then_passed == 0


def test_passed_total_splits_into_first_pass_plus_refined():
    # every lineage that passes with refine_count > 0 had a first failure
    rng = random.Random(7)
    log = EventLog()
    for i in range(60):
        shape = rng.choice([["pass"], ["fail", "pass"], ["fail", "fail"], ["fail"]])
        budget = 1 if len(shape) > 1 else rng.choice([0, 1])
        if shape == ["fail"] and budget == 1:
            shape = ["fail", "fail"]
        seed_lineage(log, f"c{i:03d}", shape, max_refines=budget)
    lineages = log.query()
    rates = success_rate(lineages)
    got = failure_breakdown(lineages)
    assert rates.passed_total == rates.passed_first + got.refined_then_passed
    assert rates.with_refinement == percentage(
        rates.passed_first + got.refined_then_passed, rates.generated
    )


def test_state_counts_sorted():
    counts = state_counts(mixed_log().query())
    assert counts == {"discarded": 4, "pending_human_review": 6}
    assert list(counts) == sorted(counts)


def test_job_report_shape_and_requested_override():
    lineages = mixed_log().query()
    report = job_report(lineages, requested=12)
    assert report["requested"] == 12
    assert report["states"] == {"discarded": 4, "pending_human_review": 6}
    assert report["success_rate"]["without_refinement"] == 40.0
    assert report["failure_breakdown"]["total_failures"] == 6
    assert job_report(lineages)["requested"] == 10
    with pytest.raises(EmptyInput):
        job_report([])


def test_render_report_text_lines():
    text = render_report_text(job_report(breakdown_log().query()))
    lines = text.splitlines()
    assert "requested copies          10" in lines
    assert "success without refinement  40.00%" in lines
    assert "success with refinement     60.00%" in lines
    assert "first-evaluation failures   6" in lines
    length_line = next(l for l in lines if l.strip().startswith("length"))
    assert length_line.split() == ["length", "3", "50.00%"]
    assert "refined then passed         2" in lines
    assert any(l.split() == ["keywords", "2"] for l in lines)


def test_render_report_text_omits_failure_block_when_clean():
    log = EventLog()
    seed_lineage(log, "a", ["pass"])
    text = render_report_text(job_report(log.query()))
    assert "first-evaluation failures" not in text
    assert "success with refinement     100.00%" in text
