"""HTTP JSON API behind the review website.

Serves exported findings with code context, records assessments from
authenticated reviewers, enforces the two-review gate and publishes
experiment statistics.  State lives in the workspace exports plus the
append-only review store; the service itself is stateless across restarts.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import yaml
from fastapi import Depends, FastAPI, Header, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..muc import load_capability_matrix
from .stats import (
    ExperimentExport,
    experiment_stats,
    load_exports,
    primary_reviewers,
    review_progress,
)
from .store import (
    DECISIONS,
    FN_ROOT_CAUSES,
    FP_ROOT_CAUSES,
    Assessment,
    Resolution,
    ReviewStore,
    ReviewValidationError,
)

SNIPPET_CONTEXT = 10

# Attached to every review task; leniency is reviewer judgment, never
# automated matching logic.
REVIEW_GUIDANCE = (
    "Lenient review: missing calls may indicate missing condition checks. "
    "When a detector reports a missing call to a method that belongs in an "
    "absent check (say, a missing hasNext() before next()), count the "
    "finding as a hit even though the condition itself is not reported."
)


def load_tokens(path: Path | str) -> dict[str, str]:
    """Token table: maps bearer tokens to reviewer ids; file order defines
    the primary reviewers."""
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise ValueError(f"{path}: token file must map token -> reviewer id")
    return data


class AssessmentBody(BaseModel):
    finding_id: str
    decision: str
    fp_root_cause: str | None = None
    fn_root_cause: str | None = None
    comment: str = ""


class ResolutionBody(BaseModel):
    finding_id: str
    decision: str
    note: str = ""


def create_app(
    workspace: Path | str,
    store_path: Path | str | None = None,
    tokens: Mapping[str, str] | None = None,
    static_dir: Path | str | None = None,
) -> FastAPI:
    workspace = Path(workspace)
    store = ReviewStore(store_path or workspace / "review" / "store.jsonl")
    tokens = dict(tokens or {})
    reviewer_order = list(tokens.values())
    matrix = load_capability_matrix()

    app = FastAPI(title="misuse review service")

    def exports() -> dict[str, ExperimentExport]:
        return load_exports(workspace)

    def get_export(name: str) -> ExperimentExport:
        all_exports = exports()
        if name not in all_exports:
            raise HTTPException(404, f"unknown experiment {name!r}")
        return all_exports[name]

    def authenticate(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(401, "missing bearer token")
        token = authorization.removeprefix("Bearer ").strip()
        reviewer = tokens.get(token)
        if reviewer is None:
            raise HTTPException(401, "unknown token")
        return reviewer

    def find_finding(finding_id: str) -> tuple[str, dict]:
        for name, export in exports().items():
            for finding in export.findings:
                if finding.finding_id == finding_id:
                    return name, finding.record
        raise HTTPException(404, f"unknown finding {finding_id!r}")

    def state_json(finding_id: str) -> dict:
        state = store.state_of(finding_id)
        return {
            "reviewers": sorted({a.reviewer_id for a in state.assessments}),
            "assessments": [
                {
                    "reviewer_id": a.reviewer_id,
                    "decision": a.decision,
                    "fp_root_cause": a.fp_root_cause,
                    "fn_root_cause": a.fn_root_cause,
                    "comment": a.comment,
                    "timestamp": a.timestamp,
                }
                for a in state.assessments
            ],
            "review_complete": state.review_complete,
            "disputed": state.disputed,
            "resolution": (
                {
                    "decision": state.resolution.decision,
                    "note": state.resolution.note,
                    "resolved_by": state.resolution.resolved_by,
                }
                if state.resolution
                else None
            ),
            "final_decision": state.final_decision(),
        }

    def snippet_for(record: dict) -> dict | None:
        loc = record["location"]
        path = workspace / "checkouts" / loc["project"] / loc["version"] / loc["file"]
        if not path.is_file():
            return None
        lines = path.read_text(encoding="utf-8", errors="replace").splitlines()
        middle = loc.get("line") or 1
        metadata_line = record.get("metadata", {}).get("first_call_line")
        if metadata_line and str(metadata_line).isdigit():
            middle = int(metadata_line)
        start = max(1, middle - SNIPPET_CONTEXT)
        end = min(len(lines), middle + SNIPPET_CONTEXT)
        return {
            "file": loc["file"],
            "lines": [
                {"number": n, "text": lines[n - 1], "marked": n == middle}
                for n in range(start, end + 1)
            ],
        }

    # -- read endpoints --

    @app.get("/experiments")
    def list_experiments() -> list[dict]:
        return [
            {
                "name": name,
                "detectors": list(export.detectors()),
                "meta": export.meta,
                "progress": review_progress(export, store),
                "misuse_count": len(export.misuses),
            }
            for name, export in sorted(exports().items())
        ]

    @app.get("/findings")
    def list_findings(
        experiment: str = Query(...),
        detector: str | None = None,
        version: str | None = None,
    ) -> list[dict]:
        export = get_export(experiment)
        result = []
        for finding in export.findings:
            record = finding.record
            if detector and finding.detector_id != detector:
                continue
            if version and record["location"]["version"] != version:
                continue
            result.append(
                {
                    "finding_id": finding.finding_id,
                    "detector_id": finding.detector_id,
                    "rank": record.get("rank"),
                    "location": record["location"],
                    "score": record["score"],
                    "missing": record["missing"],
                    "review": state_json(finding.finding_id),
                }
            )
        return result

    @app.get("/findings/{finding_id}")
    def get_finding(finding_id: str) -> dict:
        experiment, record = find_finding(finding_id)
        export = get_export(experiment)
        misuse_records = []
        for hit in export.potential_hits:
            if hit["finding_id"] != finding_id:
                continue
            for misuse in export.misuses:
                if misuse.misuse_id == hit["misuse_id"]:
                    misuse_records.append({**misuse.record, "ambiguous": hit.get("ambiguous", False)})
        return {
            "experiment": experiment,
            "finding": record,
            "snippet": snippet_for(record),
            "potential_hit_of": misuse_records,
            "review": state_json(finding_id),
            "review_guidance": REVIEW_GUIDANCE,
        }

    @app.get("/root-causes")
    def root_causes() -> dict:
        return {
            "decisions": list(DECISIONS),
            "fp_root_causes": list(FP_ROOT_CAUSES),
            "fn_root_causes": list(FN_ROOT_CAUSES),
        }

    @app.get("/stats")
    def stats(experiment: str = Query(...), detector: str | None = None) -> dict:
        export = get_export(experiment)
        rows = experiment_stats(
            export,
            store,
            matrix=matrix,
            configured_reviewers=reviewer_order,
            detector_id=detector,
        )
        return {
            "experiment": experiment,
            "progress": review_progress(export, store),
            "primary_reviewers": list(primary_reviewers(store, reviewer_order)),
            "detectors": [row.to_json() for row in rows],
        }

    # -- write endpoints --

    @app.post("/assessments", status_code=201)
    def post_assessment(
        body: AssessmentBody, reviewer: str = Depends(authenticate)
    ) -> dict:
        find_finding(body.finding_id)
        try:
            assessment = Assessment(
                finding_id=body.finding_id,
                reviewer_id=reviewer,
                decision=body.decision,
                fp_root_cause=body.fp_root_cause,
                fn_root_cause=body.fn_root_cause,
                comment=body.comment,
            )
        except ReviewValidationError as exc:
            raise HTTPException(422, str(exc)) from exc
        store.add_assessment(assessment)
        return {"status": "recorded", "review": state_json(body.finding_id)}

    @app.post("/resolutions", status_code=201)
    def post_resolution(
        body: ResolutionBody, reviewer: str = Depends(authenticate)
    ) -> dict:
        find_finding(body.finding_id)
        try:
            resolution = Resolution(
                finding_id=body.finding_id,
                decision=body.decision,
                note=body.note,
                resolved_by=reviewer,
            )
            store.add_resolution(resolution)
        except ReviewValidationError as exc:
            status = 409 if "two prior assessments" in str(exc) else 422
            raise HTTPException(status, str(exc)) from exc
        return {"status": "resolved", "review": state_json(body.finding_id)}

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
