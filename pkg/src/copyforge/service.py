"""HTTP/JSON facade over the pipeline, store, and reports.

Jobs run asynchronously in background threads and are polled via GET.
All state changes flow through EventLog.append, whose per-log lock
makes review transitions atomic: a double-submit loses the race and
gets a 409 with the current state. An optional shared token guards
every /api route.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field
from typing import Any

from fastapi import Body, FastAPI, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import taxonomy
from .diversity import select_diverse
from .errors import EmptyInput, NotFound, SequenceViolation
from .gateway import build_gateway
from .metrics import PASS_STATES, job_report, state_counts
from .model import CopyLineage, ProviderConfig, UseCaseSpec, validate_usecase
from .pipeline import JobSummary, run_job
from .store import EventLog, iter_job_ids, open_job_log


@dataclass
class _JobStatus:
    job_id: str
    usecase_id: str
    requested: int
    status: str = "queued"  # queued | running | done | failed
    summary: JobSummary | None = None
    error: str | None = None


def _current_components(lineage: CopyLineage) -> dict[str, str]:
    for event in reversed(lineage.events):
        if event.get("kind") in ("CopyFormatted", "CopyRefined", "CopyGenerated"):
            return dict(event.get("payload", {}).get("components", {}))
    return {}


def _trail(lineage: CopyLineage) -> list[dict[str, Any]]:
    rows = []
    for event in lineage.events:
        if event.get("kind") != "EvaluationRecorded":
            continue
        payload = event.get("payload", {})
        outcome = payload.get("outcome", {})
        feedback = outcome.get("feedback", {})
        rows.append(
            {
                "evaluator_id": outcome.get("evaluator_id"),
                "pass": bool(outcome.get("pass", False)),
                "plan_round": payload.get("plan_round"),
                "reason_code": feedback.get("reason_code"),
                "narrative": feedback.get("narrative"),
            }
        )
    return rows


class _ServiceState:
    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self.usecase_dir = os.path.join(data_dir, "usecases")
        os.makedirs(self.usecase_dir, exist_ok=True)
        self.lock = threading.Lock()
        self.usecases: dict[str, UseCaseSpec] = {}
        self.logs: dict[str, EventLog] = {}
        self.jobs: dict[str, _JobStatus] = {}
        self._load_usecases()
        for job_id in iter_job_ids(data_dir):
            self.logs[job_id] = open_job_log(data_dir, job_id)

    def _load_usecases(self) -> None:
        for name in sorted(os.listdir(self.usecase_dir)):
            if not name.endswith(".json"):
                continue
            path = os.path.join(self.usecase_dir, name)
            with open(path, encoding="utf-8") as fh:
                spec = UseCaseSpec.from_json(fh.read())
            self.usecases[spec.usecase_id] = spec

    def save_usecase(self, spec: UseCaseSpec) -> None:
        path = os.path.join(self.usecase_dir, f"{spec.usecase_id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(spec.to_json() + "\n")
        with self.lock:
            self.usecases[spec.usecase_id] = spec

    def log_for(self, job_id: str) -> EventLog | None:
        with self.lock:
            return self.logs.get(job_id)

    def find_copy(self, copy_id: str) -> tuple[EventLog, CopyLineage]:
        with self.lock:
            logs = list(self.logs.values())
        for log in logs:
            try:
                return log, log.replay(copy_id)
            except NotFound:
                continue
        raise NotFound(f"no copy {copy_id!r}")


def create_app(
    data_dir: str, token: str | None = None, ui_dir: str | None = None
) -> FastAPI:
    app = FastAPI(title="copyforge", version="0.1.0")
    state = _ServiceState(data_dir)

    if token:

        @app.middleware("http")
        async def _check_token(request, call_next):  # type: ignore[no-untyped-def]
            if request.url.path.startswith("/api"):
                if request.headers.get("x-api-token") != token:
                    return JSONResponse(
                        status_code=401, content={"detail": "invalid or missing token"}
                    )
            return await call_next(request)

    @app.get("/api/health")
    def health() -> dict:
        return {"ok": True}

    @app.get("/api/taxonomy")
    def get_taxonomy() -> dict:
        return {
            "version": taxonomy.TAXONOMY_VERSION,
            "codes": taxonomy.registered_codes(),
        }

    @app.post("/api/usecases", status_code=201)
    def register_usecase(body: dict = Body(...)):
        try:
            spec = UseCaseSpec.from_dict(body)
        except (KeyError, TypeError, ValueError) as exc:
            return JSONResponse(
                status_code=422, content={"detail": f"malformed use case: {exc}"}
            )
        report = validate_usecase(spec)
        if not report.ok:
            return JSONResponse(status_code=422, content=report.to_dict())
        state.save_usecase(spec)
        return {"usecase_id": spec.usecase_id}

    def _execute_job(
        status: _JobStatus,
        spec: UseCaseSpec,
        log: EventLog,
        provider: ProviderConfig,
        total: int,
        batch_size: int,
        max_refines: int,
        workers: int,
    ) -> None:
        try:
            gateway = build_gateway(provider)
            status.status = "running"
            summary = run_job(
                spec,
                total,
                batch_size,
                max_refines,
                gateway,
                event_log=log,
                workers=workers,
                job_id=status.job_id,
            )
            status.summary = summary
            status.status = "done"
        except Exception as exc:  # surfaced via GET /api/jobs/{id}
            status.error = f"{type(exc).__name__}: {exc}"
            status.status = "failed"

    @app.post("/api/jobs", status_code=202)
    def submit_job(body: dict = Body(...)):
        usecase_id = body.get("usecase_id")
        spec = state.usecases.get(usecase_id or "")
        if spec is None:
            return JSONResponse(
                status_code=404, content={"detail": f"unknown usecase_id {usecase_id!r}"}
            )
        try:
            total = int(body.get("total", 0))
            batch_size = int(body.get("batch_size", 10))
            max_refines = int(body.get("max_refines", 1))
            workers = int(body.get("workers", 1))
            provider = ProviderConfig.from_dict(body["provider"])
        except (KeyError, TypeError, ValueError) as exc:
            return JSONResponse(
                status_code=422, content={"detail": f"malformed job request: {exc}"}
            )
        problems = []
        if total < 1:
            problems.append("total must be at least 1")
        if not 1 <= batch_size <= 20:
            problems.append("batch_size must be in 1..20")
        if max_refines not in (0, 1, 2):
            problems.append("max_refines must be 0, 1, or 2")
        if workers < 1:
            problems.append("workers must be at least 1")
        if problems:
            return JSONResponse(status_code=422, content={"detail": "; ".join(problems)})

        job_id = "job-" + uuid.uuid4().hex[:12]
        log = open_job_log(state.data_dir, job_id)
        status = _JobStatus(job_id=job_id, usecase_id=spec.usecase_id, requested=total)
        with state.lock:
            state.logs[job_id] = log
            state.jobs[job_id] = status
        thread = threading.Thread(
            target=_execute_job,
            args=(status, spec, log, provider, total, batch_size, max_refines, workers),
            daemon=True,
        )
        thread.start()
        return {"job_id": job_id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        log = state.log_for(job_id)
        status = state.jobs.get(job_id)
        if log is None and status is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown job {job_id!r}"})
        states = state_counts(log.query()) if log is not None else {}
        body: dict[str, Any] = {
            "job_id": job_id,
            "status": status.status if status else "done",
            "states": states,
        }
        if status is not None:
            body["requested"] = status.requested
            body["usecase_id"] = status.usecase_id
            body["summary"] = status.summary.to_dict() if status.summary else None
            if status.error:
                body["error"] = status.error
        return body

    def _summary_row(lineage: CopyLineage) -> dict[str, Any]:
        spec = state.usecases.get(lineage.usecase_id)
        persona = spec.persona.description if spec and spec.persona else None
        return {
            "copy_id": lineage.copy_id,
            "usecase_id": lineage.usecase_id,
            "state": lineage.state,
            "refine_count": lineage.refine_count,
            "max_refines": lineage.max_refines,
            "components": _current_components(lineage),
            "persona": persona,
            "trail": _trail(lineage),
        }

    @app.get("/api/copies")
    def list_copies(
        job_id: str = Query(...), state_filter: str | None = Query(None, alias="state")
    ):
        log = state.log_for(job_id)
        if log is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown job {job_id!r}"})
        lineages = log.query(state=state_filter)
        return {"job_id": job_id, "copies": [_summary_row(l) for l in lineages]}

    @app.get("/api/copies/{copy_id}")
    def get_copy(copy_id: str):
        try:
            _, lineage = state.find_copy(copy_id)
        except NotFound:
            return JSONResponse(status_code=404, content={"detail": f"unknown copy {copy_id!r}"})
        return lineage.to_dict()

    @app.post("/api/copies/{copy_id}/review")
    def review_copy(copy_id: str, body: dict = Body(...)):
        verdict = body.get("verdict")
        if verdict not in ("approve", "reject"):
            return JSONResponse(
                status_code=422, content={"detail": "verdict must be approve or reject"}
            )
        try:
            log, lineage = state.find_copy(copy_id)
        except NotFound:
            return JSONResponse(status_code=404, content={"detail": f"unknown copy {copy_id!r}"})
        payload: dict[str, Any] = {"verdict": verdict}
        if body.get("reason_code"):
            payload["reason_code"] = str(body["reason_code"])
        if body.get("note"):
            payload["note"] = str(body["note"])
        plan_version = (
            int(lineage.events[-1].get("plan_version", 1)) if lineage.events else 1
        )
        try:
            log.record(copy_id, "HumanReviewRecorded", payload, plan_version=plan_version)
        except SequenceViolation as exc:
            return JSONResponse(
                status_code=409,
                content={"detail": str(exc), "state": log.replay(copy_id).state},
            )
        return {"copy_id": copy_id, "state": log.replay(copy_id).state}

    @app.get("/api/select")
    def select_copies(job_id: str = Query(...), k: int = Query(...)):
        if k < 1:
            return JSONResponse(status_code=422, content={"detail": "k must be at least 1"})
        log = state.log_for(job_id)
        if log is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown job {job_id!r}"})
        lineages = [l for l in log.query() if l.state in PASS_STATES]
        texts = [" ".join(_current_components(l).values()) for l in lineages]
        picked = select_diverse(texts, k) if texts else []
        return {
            "job_id": job_id,
            "k": k,
            "copy_ids": [lineages[i].copy_id for i in picked],
        }

    @app.get("/api/reports/{job_id}")
    def report(job_id: str):
        log = state.log_for(job_id)
        if log is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown job {job_id!r}"})
        status = state.jobs.get(job_id)
        requested = status.requested if status else None
        try:
            return job_report(log.query(), requested=requested)
        except EmptyInput:
            return JSONResponse(
                status_code=404, content={"detail": f"job {job_id!r} has no copies yet"}
            )

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
