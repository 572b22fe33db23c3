"""Append-only event log for copy lineages.

One JSONL file per job: a schema header line, then one event per line.
Appends are validated against a per-copy state machine before they are
written, so an EventLog can never hold an illegal sequence, and any
legal prefix of a file replays to a legal state. Folds never read
timestamps; replay is a pure function of the event sequence.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, IO, Iterable, Mapping

from .errors import NotFound, SequenceViolation, StorageFailure
from .model import CopyLineage

SCHEMA_HEADER = {"schema": "lineage/1"}

EVENT_KINDS = (
    "CopyGenerated",
    "CopyFormatted",
    "EvaluationRecorded",
    "RefinementRequested",
    "CopyRefined",
    "CopyDiscarded",
    "SentToHumanReview",
    "HumanReviewRecorded",
)

#: Internal fold phases; richer than the published lineage states so the
#: machine can tell "formatted, awaiting evaluation" from "mid-plan".
_TERMINAL_PHASES = frozenset({"accepted", "human_rejected", "discarded"})

_PHASE_TO_STATE = {
    "generated": "generating",
    "formatted": "evaluating",
    "evaluating": "evaluating",
    "refining": "refining",
    "refined": "refining",
    "pending_review": "pending_human_review",
    "accepted": "accepted",
    "human_rejected": "human_rejected",
    "discarded": "discarded",
}


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class LineageEvent:
    event_id: int
    timestamp: str
    copy_id: str
    job_id: str
    kind: str
    payload: dict[str, Any] = field(default_factory=dict)
    plan_version: int = 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "event_id": self.event_id,
            "timestamp": self.timestamp,
            "copy_id": self.copy_id,
            "job_id": self.job_id,
            "kind": self.kind,
            "payload": dict(self.payload),
            "plan_version": self.plan_version,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "LineageEvent":
        return cls(
            event_id=int(data["event_id"]),
            timestamp=data["timestamp"],
            copy_id=data["copy_id"],
            job_id=data["job_id"],
            kind=data["kind"],
            payload=dict(data.get("payload", {})),
            plan_version=int(data.get("plan_version", 1)),
        )


class _CopyFold:
    """Mutable per-copy accumulator used for validation and replay."""

    __slots__ = (
        "phase",
        "last_eval_passed",
        "refine_count",
        "max_refines",
        "usecase_id",
        "last_event_id",
        "events",
    )

    def __init__(self) -> None:
        self.phase = "absent"
        self.last_eval_passed: bool | None = None
        self.refine_count = 0
        self.max_refines = 0
        self.usecase_id = ""
        self.last_event_id: int | None = None
        self.events: list[LineageEvent] = []

    def check(self, event: LineageEvent) -> None:
        """Raise SequenceViolation unless event is legal from this fold."""
        kind = event.kind
        if kind not in EVENT_KINDS:
            raise SequenceViolation(f"unknown event kind {kind!r}")
        if self.last_event_id is not None and event.event_id <= self.last_event_id:
            raise SequenceViolation(
                f"event_id {event.event_id} is not after {self.last_event_id} "
                f"for copy {event.copy_id}"
            )
        if self.phase in _TERMINAL_PHASES:
            raise SequenceViolation(
                f"copy {event.copy_id} is terminal ({self.phase}); no further events"
            )

        if kind == "CopyGenerated":
            if self.phase != "absent":
                raise SequenceViolation("CopyGenerated must be the first event, once")
            return
        if self.phase == "absent":
            raise SequenceViolation(f"{kind} before CopyGenerated")

        if kind == "CopyFormatted":
            if self.phase not in ("generated", "refined"):
                raise SequenceViolation(f"CopyFormatted illegal from phase {self.phase}")
        elif kind == "EvaluationRecorded":
            mid_plan = self.phase == "evaluating" and self.last_eval_passed is True
            if not (self.phase == "formatted" or mid_plan):
                raise SequenceViolation(
                    f"EvaluationRecorded illegal from phase {self.phase}"
                    + (" after a failure" if self.phase == "evaluating" else "")
                )
        elif kind == "RefinementRequested":
            if not (self.phase == "evaluating" and self.last_eval_passed is False):
                raise SequenceViolation(
                    "RefinementRequested requires a failed evaluation"
                )
            if self.refine_count >= self.max_refines:
                raise SequenceViolation(
                    f"refine budget exhausted ({self.refine_count}/{self.max_refines})"
                )
        elif kind == "CopyRefined":
            if self.phase != "refining":
                raise SequenceViolation("CopyRefined without RefinementRequested")
        elif kind == "SentToHumanReview":
            if not (self.phase == "evaluating" and self.last_eval_passed is True):
                raise SequenceViolation(
                    "SentToHumanReview requires a passed evaluation"
                )
        elif kind == "HumanReviewRecorded":
            if self.phase != "pending_review":
                raise SequenceViolation(
                    "HumanReviewRecorded on a copy not pending review"
                )
            verdict = event.payload.get("verdict")
            if verdict not in ("approve", "reject"):
                raise SequenceViolation(f"review verdict must be approve|reject, got {verdict!r}")
        elif kind == "CopyDiscarded":
            if self.phase == "pending_review":
                raise SequenceViolation("cannot discard a copy pending human review")

    def apply(self, event: LineageEvent) -> None:
        """Advance the fold; caller has already run check()."""
        kind = event.kind
        if kind == "CopyGenerated":
            self.phase = "generated"
            self.usecase_id = str(event.payload.get("usecase_id", ""))
            self.max_refines = int(event.payload.get("max_refines", 0))
        elif kind == "CopyFormatted":
            self.phase = "formatted"
            self.last_eval_passed = None
        elif kind == "EvaluationRecorded":
            self.phase = "evaluating"
            outcome = event.payload.get("outcome", {})
            self.last_eval_passed = bool(outcome.get("pass", False))
        elif kind == "RefinementRequested":
            self.phase = "refining"
        elif kind == "CopyRefined":
            self.phase = "refined"
            self.refine_count += 1
        elif kind == "SentToHumanReview":
            self.phase = "pending_review"
        elif kind == "HumanReviewRecorded":
            verdict = event.payload["verdict"]
            self.phase = "accepted" if verdict == "approve" else "human_rejected"
        elif kind == "CopyDiscarded":
            self.phase = "discarded"
        self.last_event_id = event.event_id
        self.events.append(event)

    def lineage(self, copy_id: str) -> CopyLineage:
        return CopyLineage(
            copy_id=copy_id,
            usecase_id=self.usecase_id,
            refine_count=self.refine_count,
            max_refines=self.max_refines,
            state=_PHASE_TO_STATE[self.phase],
            events=tuple(ev.to_dict() for ev in self.events),
        )


class EventLog:
    """Event store for one job: a file-backed or in-memory append-only log
    with single-writer discipline."""

    def __init__(
        self, path: str | None = None, job_id: str | None = None, fsync: bool = False
    ):
        self._path = path
        self._fsync = fsync
        self._lock = threading.RLock()
        self._folds: dict[str, _CopyFold] = {}
        self._order: list[str] = []  # copy ids in first-appearance order
        self._event_ids: set[int] = set()
        self._max_event_id = 0
        self._job_id = job_id
        self._fh: IO[str] | None = None
        if path is not None:
            if os.path.exists(path):
                self._load(path)
            self._open_for_append(path, fresh=not os.path.exists(path))

    # -- file handling ------------------------------------------------------

    def _open_for_append(self, path: str, fresh: bool) -> None:
        try:
            self._fh = open(path, "a", encoding="utf-8")
            if fresh:
                self._fh.write(json.dumps(SCHEMA_HEADER) + "\n")
                self._fh.flush()
        except OSError as exc:
            raise StorageFailure(f"cannot open event log {path}: {exc}") from exc

    def _load(self, path: str) -> None:
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.read().split("\n")
        except OSError as exc:
            raise StorageFailure(f"cannot read event log {path}: {exc}") from exc
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise StorageFailure(f"event log {path} is empty (missing header)")
        try:
            header = json.loads(lines[0])
        except ValueError as exc:
            raise StorageFailure(f"event log {path} has a bad header line") from exc
        if header != SCHEMA_HEADER:
            raise StorageFailure(
                f"event log {path} declares unsupported schema {header!r}"
            )
        torn = False
        for i, line in enumerate(lines[1:], start=2):
            try:
                data = json.loads(line)
            except ValueError as exc:
                if i == len(lines):
                    # A torn final line is an interrupted append; the
                    # durable prefix is still a legal log.
                    torn = True
                    break
                raise StorageFailure(f"{path}:{i}: corrupt event line") from exc
            try:
                event = LineageEvent.from_dict(data)
                self._admit(event)
            except (KeyError, TypeError, ValueError) as exc:
                raise StorageFailure(f"{path}:{i}: malformed event") from exc
            except SequenceViolation as exc:
                raise StorageFailure(f"{path}:{i}: illegal event sequence: {exc}") from exc
        if torn:
            # Drop the fragment so later appends start on a clean line.
            try:
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write("\n".join(lines[:-1]) + "\n")
            except OSError as exc:
                raise StorageFailure(f"cannot repair event log {path}: {exc}") from exc

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    # -- appends ------------------------------------------------------------

    def _admit(self, event: LineageEvent) -> None:
        """Validate and apply to in-memory state; no file writes."""
        if self._job_id is None:
            self._job_id = event.job_id
        elif event.job_id != self._job_id:
            raise SequenceViolation(
                f"event job_id {event.job_id!r} does not match log job {self._job_id!r}"
            )
        if event.event_id in self._event_ids:
            raise SequenceViolation(f"duplicate event_id {event.event_id}")
        fold = self._folds.get(event.copy_id)
        if fold is None:
            fold = _CopyFold()
        fold.check(event)
        if event.copy_id not in self._folds:
            self._folds[event.copy_id] = fold
            self._order.append(event.copy_id)
        fold.apply(event)
        self._event_ids.add(event.event_id)
        self._max_event_id = max(self._max_event_id, event.event_id)

    def append(self, event: LineageEvent) -> None:
        """Validate, apply, and durably write one event."""
        with self._lock:
            self._admit(event)
            if self._fh is not None:
                try:
                    self._fh.write(json.dumps(event.to_dict(), ensure_ascii=False) + "\n")
                    self._fh.flush()
                    if self._fsync:
                        os.fsync(self._fh.fileno())
                except OSError as exc:
                    raise StorageFailure(f"append failed: {exc}") from exc

    def next_event_id(self) -> int:
        with self._lock:
            return self._max_event_id + 1

    def record(
        self,
        copy_id: str,
        kind: str,
        payload: dict[str, Any],
        plan_version: int = 1,
        job_id: str | None = None,
    ) -> LineageEvent:
        """Convenience append that allocates the id and timestamp."""
        with self._lock:
            event = LineageEvent(
                event_id=self.next_event_id(),
                timestamp=utc_now(),
                copy_id=copy_id,
                job_id=job_id or self._job_id or "",
                kind=kind,
                payload=payload,
                plan_version=plan_version,
            )
            self.append(event)
            return event

    # -- reads ---------------------------------------------------------------

    @property
    def job_id(self) -> str | None:
        return self._job_id

    def copy_ids(self) -> list[str]:
        with self._lock:
            return list(self._order)

    def events(self, copy_id: str | None = None) -> list[LineageEvent]:
        with self._lock:
            if copy_id is not None:
                fold = self._folds.get(copy_id)
                if fold is None:
                    raise NotFound(f"no events for copy {copy_id!r}")
                return list(fold.events)
            merged = [ev for cid in self._order for ev in self._folds[cid].events]
            merged.sort(key=lambda ev: ev.event_id)
            return merged

    def replay(self, copy_id: str) -> CopyLineage:
        with self._lock:
            fold = self._folds.get(copy_id)
            if fold is None:
                raise NotFound(f"no events for copy {copy_id!r}")
            return fold.lineage(copy_id)

    def query(
        self,
        state: str | None = None,
        usecase_id: str | None = None,
        job_id: str | None = None,
    ) -> list[CopyLineage]:
        """Filtered lineage listing, stably ordered by copy_id."""
        with self._lock:
            if job_id is not None and self._job_id is not None and job_id != self._job_id:
                return []
            out = []
            for cid in sorted(self._folds):
                lineage = self._folds[cid].lineage(cid)
                if state is not None and lineage.state != state:
                    continue
                if usecase_id is not None and lineage.usecase_id != usecase_id:
                    continue
                out.append(lineage)
            return out

    def rejection_reasons(self) -> dict[str, int]:
        """Histogram of human-rejection reason codes, for evaluator tuning."""
        with self._lock:
            counts: dict[str, int] = {}
            for fold in self._folds.values():
                for ev in fold.events:
                    if ev.kind != "HumanReviewRecorded":
                        continue
                    if ev.payload.get("verdict") != "reject":
                        continue
                    code = ev.payload.get("reason_code") or "unspecified"
                    counts[code] = counts.get(code, 0) + 1
            return counts


def log_path(data_dir: str, job_id: str) -> str:
    return os.path.join(data_dir, f"{job_id}.events.jsonl")


def open_job_log(data_dir: str, job_id: str, fsync: bool = False) -> EventLog:
    return EventLog(path=log_path(data_dir, job_id), job_id=job_id, fsync=fsync)


def iter_job_ids(data_dir: str) -> Iterable[str]:
    suffix = ".events.jsonl"
    try:
        names = sorted(os.listdir(data_dir))
    except OSError:
        return []
    return [n[: -len(suffix)] for n in names if n.endswith(suffix)]
