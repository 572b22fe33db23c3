"""Operator command line: run jobs, evaluate copies, select, report, simulate.

Exit codes: 0 success, 1 bad usage or bad input files, 2 runtime failure.
Every subcommand takes --json for machine-readable output.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import uuid

import click

from .errors import CopyforgeError, InvalidScenario
from .formatter import apply_rules, ruleset_for
from .diversity import select_diverse
from .gateway import build_gateway
from .judge import make_judge_runner
from .metrics import PASS_STATES, job_report, render_report_text
from .model import CopyDraft, ProviderConfig, UseCaseSpec, validate_usecase
from .constraints import run_plan
from .mab import simulate_scenario
from .pipeline import deterministic_only, run_job
from .store import EventLog, iter_job_ids, log_path, open_job_log


def _load_usecase(path: str) -> UseCaseSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            spec = UseCaseSpec.from_dict(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise click.UsageError(f"cannot load use case {path}: {exc}")
    report = validate_usecase(spec)
    if not report.ok:
        lines = "; ".join(f"{v.path}: {v.message}" for v in report.violations)
        raise click.UsageError(f"use case {path} is invalid: {lines}")
    return spec


def _provider_config(
    provider_kind: str,
    transcript: str | None,
    endpoint: str | None,
    model_id: str,
    credential_env: str | None,
    temperature: float,
) -> ProviderConfig:
    if provider_kind == "mock" and not transcript:
        raise click.UsageError("--provider mock requires --transcript")
    if provider_kind == "http" and not endpoint:
        raise click.UsageError("--provider http requires --endpoint")
    return ProviderConfig(
        provider_kind=provider_kind,
        model_id=model_id,
        temperature=temperature,
        endpoint=endpoint,
        credential_env=credential_env,
        transcript_path=transcript,
    )


def _open_log_in(job_dir: str, job_id: str | None) -> EventLog:
    job_ids = list(iter_job_ids(job_dir))
    if job_id is None:
        if not job_ids:
            raise click.UsageError(f"no event logs found in {job_dir}")
        if len(job_ids) > 1:
            raise click.UsageError(
                f"{job_dir} holds {len(job_ids)} jobs; pick one with --job-id "
                f"({', '.join(job_ids)})"
            )
        job_id = job_ids[0]
    elif job_id not in job_ids:
        raise click.UsageError(f"no event log for job {job_id!r} in {job_dir}")
    return EventLog(path=log_path(job_dir, job_id), job_id=job_id)


@click.group()
@click.option("--verbose", is_flag=True, help="Show gateway and pipeline logs.")
def cli(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(name)s %(levelname)s %(message)s",
    )


@cli.command()
@click.option("--usecase", "usecase_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--count", "total", required=True, type=int, help="Total copies to request.")
@click.option("--batch", "batch_size", default=10, show_default=True, type=int)
@click.option("--max-refines", default=1, show_default=True, type=int)
@click.option("--provider", "provider_kind", type=click.Choice(["mock", "http"]), default="mock", show_default=True)
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", "model_id", default="default", show_default=True)
@click.option("--credential-env", default=None)
@click.option("--temperature", default=0.7, show_default=True, type=float)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--job-id", default=None)
@click.option("--json", "as_json", is_flag=True)
def run(
    usecase_path: str,
    total: int,
    batch_size: int,
    max_refines: int,
    provider_kind: str,
    transcript: str | None,
    endpoint: str | None,
    model_id: str,
    credential_env: str | None,
    temperature: float,
    out_dir: str,
    workers: int,
    job_id: str | None,
    as_json: bool,
) -> None:
    """Generate, evaluate, and refine copies; write the event log and summary."""
    spec = _load_usecase(usecase_path)
    config = _provider_config(
        provider_kind, transcript, endpoint, model_id, credential_env, temperature
    )
    gateway = build_gateway(config)
    os.makedirs(out_dir, exist_ok=True)
    job = job_id or "job-" + uuid.uuid4().hex[:12]
    with open_job_log(out_dir, job) as log:
        summary = run_job(
            spec,
            total,
            batch_size,
            max_refines,
            gateway,
            event_log=log,
            workers=workers,
            job_id=job,
        )
    summary_path = os.path.join(out_dir, f"{job}.summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary.to_dict(), fh, indent=2)
        fh.write("\n")
    if as_json:
        click.echo(json.dumps(summary.to_dict(), indent=2))
        return
    click.echo(f"job {summary.job_id}: {summary.generated}/{summary.requested} generated")
    for state, count in summary.states.items():
        click.echo(f"  {state:<24}{count}")
    click.echo(f"success without refinement  {summary.success_without_refinement:.2f}%")
    click.echo(f"success with refinement     {summary.success_with_refinement:.2f}%")
    click.echo(f"event log: {log_path(out_dir, job)}")


@cli.command("eval")
@click.option("--usecase", "usecase_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--copies", "copies_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON array of component maps, e.g. [{\"header\": \"...\"}].")
@click.option("--provider", "provider_kind", type=click.Choice(["mock", "http"]), default=None,
              help="Needed only to run judged steps; omitted = deterministic checks only.")
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", "model_id", default="default")
@click.option("--credential-env", default=None)
@click.option("--temperature", default=0.7, type=float)
@click.option("--json", "as_json", is_flag=True)
def eval_copies(
    usecase_path: str,
    copies_path: str,
    provider_kind: str | None,
    transcript: str | None,
    endpoint: str | None,
    model_id: str,
    credential_env: str | None,
    temperature: float,
    as_json: bool,
) -> None:
    """Format and evaluate existing copies; no generation, no refinement."""
    spec = _load_usecase(usecase_path)
    try:
        with open(copies_path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, ValueError) as exc:
        raise click.UsageError(f"cannot load copies {copies_path}: {exc}")
    if isinstance(raw, dict):
        raw = raw.get("copies", [])
    if not isinstance(raw, list) or not all(isinstance(c, dict) for c in raw):
        raise click.UsageError("copies file must be a JSON array of component maps")

    judge_runner = None
    eval_spec = spec
    skipped = 0
    if provider_kind is not None:
        config = _provider_config(
            provider_kind, transcript, endpoint, model_id, credential_env, temperature
        )
        judge_runner = make_judge_runner(build_gateway(config))
    else:
        eval_spec = deterministic_only(spec)
        skipped = len(spec.evaluator_plan.steps) - len(eval_spec.evaluator_plan.steps)

    ruleset = ruleset_for(spec.format_rules)
    results = []
    for i, components in enumerate(raw):
        draft = CopyDraft(
            copy_id=f"copy-{i + 1}",
            usecase_id=spec.usecase_id,
            components={k: str(v) for k, v in components.items()},
            formatted=False,
        )
        formatted = apply_rules(draft, ruleset)
        result = run_plan(formatted, eval_spec, judge_runner)
        results.append(
            {
                "copy_id": draft.copy_id,
                "components": dict(formatted.components),
                "pass": result.all_passed,
                "outcomes": [o.to_dict() for o in result.outcomes],
            }
        )
    if as_json:
        click.echo(json.dumps({"results": results, "judged_steps_skipped": skipped}, indent=2))
        return
    for row in results:
        mark = "PASS" if row["pass"] else "FAIL"
        click.echo(f"{row['copy_id']}: {mark}")
        for outcome in row["outcomes"]:
            verdict = "pass" if outcome["pass"] else outcome["feedback"]["reason_code"]
            click.echo(f"  {outcome['evaluator_id']:<20}{verdict}")
    if skipped:
        click.echo(f"note: {skipped} judged step(s) skipped (no provider given)")


@cli.command()
@click.option("--job", "job_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--job-id", default=None)
@click.option("--k", required=True, type=int)
@click.option("--json", "as_json", is_flag=True)
def select(job_dir: str, job_id: str | None, k: int, as_json: bool) -> None:
    """Pick k diverse copies from a job's passing set."""
    if k < 1:
        raise click.UsageError("--k must be at least 1")
    with _open_log_in(job_dir, job_id) as log:
        lineages = [l for l in log.query() if l.state in PASS_STATES]
        texts = []
        for lineage in lineages:
            components: dict[str, str] = {}
            for event in reversed(lineage.events):
                if event["kind"] in ("CopyFormatted", "CopyRefined", "CopyGenerated"):
                    components = event["payload"].get("components", {})
                    break
            texts.append(" ".join(components.values()))
        picked = select_diverse(texts, k) if texts else []
        rows = [{"copy_id": lineages[i].copy_id, "text": texts[i]} for i in picked]
    if as_json:
        click.echo(json.dumps({"k": k, "selected": rows}, indent=2))
        return
    for row in rows:
        click.echo(f"{row['copy_id']}\t{row['text']}")


@cli.command()
@click.option("--job", "job_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--job-id", default=None)
@click.option("--json", "as_json", is_flag=True)
def report(job_dir: str, job_id: str | None, as_json: bool) -> None:
    """Success rates and failure breakdown for a finished job."""
    with _open_log_in(job_dir, job_id) as log:
        lineages = log.query()
        if not lineages:
            raise click.UsageError("job log holds no copies")
        body = job_report(lineages)
    if as_json:
        click.echo(json.dumps(body, indent=2))
        return
    click.echo(render_report_text(body))


@cli.command("mab-sim")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--csv", "csv_path", default=None, type=click.Path(dir_okay=False),
              help="Also write the per-decile allocation trace as CSV.")
@click.option("--json", "as_json", is_flag=True)
def mab_sim(scenario_path: str, out_path: str, csv_path: str | None, as_json: bool) -> None:
    """Run a seeded bandit scenario and write the report."""
    try:
        with open(scenario_path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise click.UsageError(f"cannot load scenario {scenario_path}: {exc}")
    sim = simulate_scenario(data)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(sim.to_dict(), fh, indent=2)
        fh.write("\n")
    if csv_path:
        import csv as csv_mod

        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv_mod.DictWriter(fh, fieldnames=["decile", "arm_id", "share"])
            writer.writeheader()
            writer.writerows(sim.trace_rows())
    if as_json:
        click.echo(json.dumps(sim.to_dict(), indent=2))
        return
    click.echo(f"policy {sim.policy}, seed {sim.seed}, horizon {sim.horizon}")
    for arm in sim.arms:
        click.echo(
            f"  {arm.arm_id:<20}impressions {arm.impressions:>8}  "
            f"ctr {arm.empirical_ctr:.4f}"
        )
    click.echo(f"best arm: {sim.best_arm} (control: {sim.control_arm})")
    if sim.estimated_lift is not None:
        click.echo(f"estimated lift vs control: {sim.estimated_lift * 100:.2f}%")


@cli.command()
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--token", default=None, help="Require X-Api-Token on /api routes.")
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False),
              help="Static review UI bundle; defaults to ./frontend/dist when present.")
def serve(data_dir: str, host: str, port: int, token: str | None, ui_dir: str | None) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    if ui_dir is None:
        candidate = os.path.join(os.getcwd(), "frontend", "dist")
        ui_dir = candidate if os.path.isdir(candidate) else None
    app = create_app(data_dir, token=token, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except (InvalidScenario, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except (CopyforgeError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
