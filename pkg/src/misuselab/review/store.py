"""Durable review storage: an append-only record log with compaction.

Every accepted write is fsync'd before the caller sees success, so a
service restart never loses an assessment.  One assessment is kept per
(finding, reviewer): later writes replace earlier ones, and the log keeps
the full history for audit.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

DECISIONS = ("misuse", "not-misuse")

FP_ROOT_CAUSES = (
    "Uncommon",
    "Analysis",
    "Alternative",
    "Inside",
    "Dependent",
    "Bug",
    "Multiplicity",
)

FN_ROOT_CAUSES = (
    "Representation",
    "Matching",
    "Analysis",
    "Bug",
    "Lenient",
    "ExceptionHandling",
)


class ReviewValidationError(ValueError):
    pass


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True, slots=True)
class Assessment:
    finding_id: str
    reviewer_id: str
    decision: str
    fp_root_cause: str | None = None
    fn_root_cause: str | None = None
    comment: str = ""
    timestamp: str = ""

    def __post_init__(self) -> None:
        if not self.finding_id or not self.reviewer_id:
            raise ReviewValidationError("finding_id and reviewer_id are required")
        if self.decision not in DECISIONS:
            raise ReviewValidationError(f"decision must be one of {DECISIONS}")
        if self.fp_root_cause is not None:
            if self.fp_root_cause not in FP_ROOT_CAUSES:
                raise ReviewValidationError(
                    f"fp_root_cause must be one of {FP_ROOT_CAUSES}"
                )
            if self.decision != "not-misuse":
                raise ReviewValidationError(
                    "fp_root_cause applies only to not-misuse decisions"
                )
        if self.fn_root_cause is not None and self.fn_root_cause not in FN_ROOT_CAUSES:
            raise ReviewValidationError(f"fn_root_cause must be one of {FN_ROOT_CAUSES}")


@dataclass(frozen=True, slots=True)
class Resolution:
    finding_id: str
    decision: str
    note: str = ""
    resolved_by: str = ""
    timestamp: str = ""

    def __post_init__(self) -> None:
        if not self.finding_id:
            raise ReviewValidationError("finding_id is required")
        if self.decision not in DECISIONS:
            raise ReviewValidationError(f"decision must be one of {DECISIONS}")


@dataclass(frozen=True)
class ReviewState:
    """Review lifecycle of one finding."""

    finding_id: str
    assessments: tuple[Assessment, ...]
    resolution: Resolution | None

    @property
    def reviewer_count(self) -> int:
        return len({a.reviewer_id for a in self.assessments})

    @property
    def review_complete(self) -> bool:
        return self.reviewer_count >= 2

    def final_decision(self) -> str | None:
        """Resolution when present, else the unanimous decision of a
        complete review; None while the gate is unsatisfied or disputed."""
        if self.resolution is not None:
            return self.resolution.decision
        if not self.review_complete:
            return None
        decisions = {a.decision for a in self.assessments}
        return decisions.pop() if len(decisions) == 1 else None

    @property
    def disputed(self) -> bool:
        return (
            self.review_complete
            and self.resolution is None
            and len({a.decision for a in self.assessments}) > 1
        )


class ReviewStore:
    """Single-writer, append-only JSONL store."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._assessments: dict[tuple[str, str], Assessment] = {}
        self._resolutions: dict[str, Resolution] = {}
        self._reviewer_order: list[str] = []
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        with self.path.open(encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                kind = record.pop("type", None)
                if kind == "assessment":
                    self._apply_assessment(Assessment(**record))
                elif kind == "resolution":
                    self._apply_resolution(Resolution(**record))
                else:
                    raise ReviewValidationError(
                        f"{self.path}:{line_no}: unknown record type {kind!r}"
                    )

    def _apply_assessment(self, assessment: Assessment) -> None:
        self._assessments[(assessment.finding_id, assessment.reviewer_id)] = assessment
        if assessment.reviewer_id not in self._reviewer_order:
            self._reviewer_order.append(assessment.reviewer_id)

    def _apply_resolution(self, resolution: Resolution) -> None:
        self._resolutions[resolution.finding_id] = resolution

    def _append(self, kind: str, payload: dict) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        line = json.dumps({"type": kind, **payload}, sort_keys=True)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(line + "\n")
            handle.flush()
            os.fsync(handle.fileno())

    # -- writes --

    def add_assessment(self, assessment: Assessment) -> Assessment:
        if not assessment.timestamp:
            assessment = Assessment(**{**asdict(assessment), "timestamp": _utc_now()})
        with self._lock:
            self._append("assessment", asdict(assessment))
            self._apply_assessment(assessment)
        return assessment

    def add_resolution(self, resolution: Resolution) -> Resolution:
        state = self.state_of(resolution.finding_id)
        if state.reviewer_count < 2:
            raise ReviewValidationError(
                "a resolution requires at least two prior assessments"
            )
        if not resolution.timestamp:
            resolution = Resolution(**{**asdict(resolution), "timestamp": _utc_now()})
        with self._lock:
            self._append("resolution", asdict(resolution))
            self._apply_resolution(resolution)
        return resolution

    # -- reads --

    def state_of(self, finding_id: str) -> ReviewState:
        assessments = tuple(
            sorted(
                (a for (fid, _), a in self._assessments.items() if fid == finding_id),
                key=lambda a: (a.timestamp, a.reviewer_id),
            )
        )
        return ReviewState(finding_id, assessments, self._resolutions.get(finding_id))

    def states(self) -> Iterator[ReviewState]:
        finding_ids = {fid for fid, _ in self._assessments} | set(self._resolutions)
        for finding_id in sorted(finding_ids):
            yield self.state_of(finding_id)

    def reviewers(self) -> tuple[str, ...]:
        """Reviewer ids in order of first appearance."""
        return tuple(self._reviewer_order)

    def assessment_count(self) -> int:
        return len(self._assessments)

    # -- maintenance --

    def compact(self) -> None:
        """Rewrite the log keeping only the latest record per key; atomic."""
        with self._lock:
            temp = self.path.with_suffix(self.path.suffix + ".compact")
            with temp.open("w", encoding="utf-8") as handle:
                for key in sorted(self._assessments):
                    record = asdict(self._assessments[key])
                    handle.write(json.dumps({"type": "assessment", **record}, sort_keys=True) + "\n")
                for finding_id in sorted(self._resolutions):
                    record = asdict(self._resolutions[finding_id])
                    handle.write(json.dumps({"type": "resolution", **record}, sort_keys=True) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(temp, self.path)
