"""Experiment statistics over exported findings plus the review store.

Shared by the HTTP service and the CLI so the dashboard and the terminal
can never disagree.  Numbers gated on the two-review rule: a finding counts
only once two distinct reviewers assessed it; disputed findings count once
resolved.  Kappa is computed from first-round decisions of the two primary
reviewers, never from consensus resolutions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from ..benchmark.metrics import cohens_kappa, percent
from ..muc import CapabilityMatrix, MucLabel, muc_matches
from .store import FN_ROOT_CAUSES, FP_ROOT_CAUSES, ReviewStore


@dataclass(frozen=True)
class ExportedFinding:
    finding_id: str
    experiment: str
    detector_id: str
    record: dict


@dataclass(frozen=True)
class ExportedMisuse:
    misuse_id: str
    labels: frozenset[MucLabel]
    record: dict


@dataclass(frozen=True)
class ExperimentExport:
    name: str
    findings: tuple[ExportedFinding, ...]
    potential_hits: tuple[dict, ...]  # {"finding_id", "misuse_id", "ambiguous"}
    misuses: tuple[ExportedMisuse, ...]
    meta: dict

    def detectors(self) -> tuple[str, ...]:
        return tuple(sorted({f.detector_id for f in self.findings} | set(self.meta.get("detectors", ()))))


def _read_jsonl(path: Path) -> list[dict]:
    if not path.is_file():
        return []
    records = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def load_experiment_export(directory: Path) -> ExperimentExport:
    meta_path = directory / "meta.json"
    meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.is_file() else {}
    findings = tuple(
        ExportedFinding(r["finding_id"], r["experiment"], r["detector_id"], r)
        for r in _read_jsonl(directory / "findings.jsonl")
    )
    misuses = tuple(
        ExportedMisuse(
            r["misuse_id"],
            frozenset(MucLabel.from_key(k) for k in r.get("muc_labels", ())),
            r,
        )
        for r in _read_jsonl(directory / "misuses.jsonl")
    )
    return ExperimentExport(
        name=meta.get("experiment", directory.name),
        findings=findings,
        potential_hits=tuple(_read_jsonl(directory / "potential_hits.jsonl")),
        misuses=misuses,
        meta=meta,
    )


def load_exports(workspace: Path) -> dict[str, ExperimentExport]:
    root = workspace / "experiments"
    exports = {}
    if root.is_dir():
        for directory in sorted(p for p in root.iterdir() if p.is_dir()):
            exports[directory.name] = load_experiment_export(directory)
    return exports


@dataclass(frozen=True)
class DetectorStats:
    experiment: str
    detector_id: str
    total_findings: int
    reviewed: int
    confirmed: int
    awaiting_resolution: int
    precision: Fraction | None
    kappa: float | None
    kappa_pairs: int
    fp_root_causes: Mapping[str, int]
    fn_root_causes: Mapping[str, int]
    known_misuses: int | None = None
    actual_hits: int | None = None
    recall: Fraction | None = None
    conceptual_rub: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "detector_id": self.detector_id,
            "total_findings": self.total_findings,
            "reviewed": self.reviewed,
            "confirmed": self.confirmed,
            "awaiting_resolution": self.awaiting_resolution,
            "precision": percent(self.precision) if self.precision is not None else None,
            "kappa": round(self.kappa, 4) if self.kappa is not None else None,
            "kappa_pairs": self.kappa_pairs,
            "fp_root_causes": dict(self.fp_root_causes),
            "fn_root_causes": dict(self.fn_root_causes),
            "known_misuses": self.known_misuses,
            "actual_hits": self.actual_hits,
            "recall": percent(self.recall) if self.recall is not None else None,
            "conceptual_rub": percent(self.conceptual_rub)
            if self.conceptual_rub is not None
            else None,
        }


def primary_reviewers(store: ReviewStore, configured: Sequence[str] | None = None) -> tuple[str, ...]:
    """The two reviewers whose first-round decisions feed the kappa score.

    Configured reviewers (token-table order) win; otherwise the first two
    distinct reviewers seen in the store.  Additional reviewers still count
    toward the two-review gate but are excluded from kappa.
    """
    if configured and len(configured) >= 2:
        return tuple(configured[:2])
    seen = store.reviewers()
    return tuple(seen[:2])


def detector_stats(
    export: ExperimentExport,
    store: ReviewStore,
    detector_id: str,
    matrix: CapabilityMatrix | None = None,
    configured_reviewers: Sequence[str] | None = None,
) -> DetectorStats:
    findings = [f for f in export.findings if f.detector_id == detector_id]
    states = {f.finding_id: store.state_of(f.finding_id) for f in findings}

    complete = [f for f in findings if states[f.finding_id].review_complete]
    decided = [
        f for f in complete if states[f.finding_id].final_decision() is not None
    ]
    confirmed = [
        f for f in decided if states[f.finding_id].final_decision() == "misuse"
    ]
    awaiting = [f for f in complete if states[f.finding_id].disputed]

    reviewed = len(decided)
    precision = Fraction(len(confirmed), reviewed) if reviewed else None

    primaries = primary_reviewers(store, configured_reviewers)
    kappa_pairs: list[tuple[str, str]] = []
    if len(primaries) == 2:
        for f in complete:
            by_reviewer = {a.reviewer_id: a.decision for a in states[f.finding_id].assessments}
            if primaries[0] in by_reviewer and primaries[1] in by_reviewer:
                kappa_pairs.append((by_reviewer[primaries[0]], by_reviewer[primaries[1]]))
    kappa = cohens_kappa(kappa_pairs) if kappa_pairs else None

    fp_counts = {cause: 0 for cause in FP_ROOT_CAUSES}
    fn_counts = {cause: 0 for cause in FN_ROOT_CAUSES}
    for f in complete:
        for assessment in states[f.finding_id].assessments:
            if assessment.fp_root_cause:
                fp_counts[assessment.fp_root_cause] += 1
            if assessment.fn_root_cause:
                fn_counts[assessment.fn_root_cause] += 1

    known = actual = None
    recall_value = conceptual = None
    if export.misuses:
        known = len(export.misuses)
        hits_by_misuse: dict[str, bool] = {m.misuse_id: False for m in export.misuses}
        findings_by_id = {f.finding_id: f for f in findings}
        for hit in export.potential_hits:
            finding = findings_by_id.get(hit["finding_id"])
            if finding is None:
                continue
            state = states[finding.finding_id]
            if state.final_decision() == "misuse" and hit["misuse_id"] in hits_by_misuse:
                hits_by_misuse[hit["misuse_id"]] = True
        actual = sum(hits_by_misuse.values())
        recall_value = Fraction(actual, known) if known else None
        if matrix is not None and detector_id in matrix.rows:
            matching = sum(
                1 for m in export.misuses if muc_matches(matrix, detector_id, m.labels)
            )
            conceptual = Fraction(matching, known)

    return DetectorStats(
        experiment=export.name,
        detector_id=detector_id,
        total_findings=len(findings),
        reviewed=reviewed,
        confirmed=len(confirmed),
        awaiting_resolution=len(awaiting),
        precision=precision,
        kappa=kappa,
        kappa_pairs=len(kappa_pairs),
        fp_root_causes=fp_counts,
        fn_root_causes=fn_counts,
        known_misuses=known,
        actual_hits=actual,
        recall=recall_value,
        conceptual_rub=conceptual,
    )


def experiment_stats(
    export: ExperimentExport,
    store: ReviewStore,
    matrix: CapabilityMatrix | None = None,
    configured_reviewers: Sequence[str] | None = None,
    detector_id: str | None = None,
) -> list[DetectorStats]:
    detectors = [detector_id] if detector_id else list(export.detectors())
    return [
        detector_stats(export, store, d, matrix, configured_reviewers) for d in detectors
    ]


def review_progress(export: ExperimentExport, store: ReviewStore) -> dict:
    """Completeness overview: how far reviews of an experiment have come."""
    total = len(export.findings)
    once = complete = resolved = 0
    for finding in export.findings:
        state = store.state_of(finding.finding_id)
        if state.reviewer_count == 1:
            once += 1
        elif state.reviewer_count >= 2:
            complete += 1
            if state.resolution is not None or state.final_decision() is not None:
                resolved += 1
    return {
        "total_findings": total,
        "reviewed_once": once,
        "review_complete": complete,
        "decided": resolved,
    }
