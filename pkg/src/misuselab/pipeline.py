"""Workspace pipeline: checkout -> extract -> detect -> experiments -> exports.

Every stage is cached by content hash and rerunning a stage with unchanged
inputs is a no-op, so experiment runs are resumable.  All machine-readable
outputs are byte-deterministic: records carry no timestamps, keys are
sorted and orderings are total.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .benchmark.checkout import checkout, tree_hash
from .benchmark.dataset import Dataset, KnownMisuse, ProjectVersion
from .benchmark.experiments import (
    ExperimentResult,
    RubSuiteResult,
    RunStatus,
    finding_record,
    finding_id,
)
from .benchmark.metrics import VersionKey, percent
from .detectors import DetectorConfig
from .extract import ExtractionWarning, ParseError, parse_method_models
from .extract.factsfile import load_facts_file, write_facts_file
from .model import MethodUsageModel
from .muc import load_capability_matrix
from .review.stats import experiment_stats, load_experiment_export
from .review.store import ReviewStore

log = logging.getLogger(__name__)

EXTRACTOR_VERSION = 1


@dataclass
class Workspace:
    root: Path

    def __post_init__(self) -> None:
        self.root = Path(self.root)

    @property
    def checkouts(self) -> Path:
        return self.root / "checkouts"

    @property
    def facts(self) -> Path:
        return self.root / "facts"

    @property
    def detect_dir(self) -> Path:
        return self.root / "detect"

    @property
    def experiments(self) -> Path:
        return self.root / "experiments"

    @property
    def review_store_path(self) -> Path:
        return self.root / "review" / "store.jsonl"

    def facts_file(self, key: VersionKey) -> Path:
        return self.facts / key[0] / f"{key[1]}.facts.jsonl"


def _config_hash(config: DetectorConfig) -> str:
    payload = json.dumps(asdict(config), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# --- extract stage ----------------------------------------------------------


def java_files(work_dir: Path, version: ProjectVersion) -> list[Path]:
    files: list[Path] = []
    for root in version.source_roots:
        files.extend((work_dir / root).rglob("*.java"))
    return sorted(files)


def extract_version(
    dataset: Dataset,
    version: ProjectVersion,
    workspace: Workspace,
    warnings: list[ExtractionWarning] | None = None,
) -> Path:
    """Parse all Java files of the version into a facts file (cached)."""
    work_dir = checkout(version, dataset, workspace.root)
    facts_path = workspace.facts_file(version.key)
    meta_path = facts_path.with_suffix(".meta.json")
    current = {"tree_hash": tree_hash(work_dir), "extractor": EXTRACTOR_VERSION}
    if facts_path.is_file() and meta_path.is_file():
        cached = json.loads(meta_path.read_text(encoding="utf-8"))
        if {k: cached.get(k) for k in current} == current:
            return facts_path

    models: list[MethodUsageModel] = []
    collected: list[ExtractionWarning] = []
    for path in java_files(work_dir, version):
        relative = path.relative_to(work_dir).as_posix()
        try:
            models.extend(
                parse_method_models(
                    path.read_text(encoding="utf-8"),
                    relative,
                    project_id=version.project_id,
                    version_id=version.version_id,
                    warnings=collected,
                )
            )
        except ParseError as exc:
            collected.append(ExtractionWarning(relative, "<file>", None, str(exc)))
    models.sort(key=lambda m: (m.location.file_path, m.location.line or 0, m.location.method_name))
    facts_path.parent.mkdir(parents=True, exist_ok=True)
    write_facts_file(models, facts_path)
    meta_path.write_text(
        json.dumps(
            {**current, "warnings": [asdict(w) for w in collected], "model_count": len(models)},
            indent=2,
            sort_keys=True,
        ),
        encoding="utf-8",
    )
    if warnings is not None:
        warnings.extend(collected)
    return facts_path


def corpus_for(dataset: Dataset, workspace: Workspace, keys: Sequence[VersionKey]) -> dict[VersionKey, list[MethodUsageModel]]:
    corpora = {}
    for key in keys:
        facts_path = extract_version(dataset, dataset.version(key), workspace)
        corpora[key] = load_facts_file(facts_path)
    return corpora


def misuse_file_models(
    dataset: Dataset, workspace: Workspace, misuse: KnownMisuse
) -> list[MethodUsageModel]:
    """Models of exactly the file that contains the known misuse."""
    version = dataset.version(misuse.version_key)
    work_dir = checkout(version, dataset, workspace.root)
    path = work_dir / misuse.location.file_path
    if not path.is_file():
        raise FileNotFoundError(f"misuse file not in checkout: {misuse.location.file_path}")
    return parse_method_models(
        path.read_text(encoding="utf-8"),
        misuse.location.file_path,
        project_id=misuse.project_id,
        version_id=misuse.version_id,
    )


def crafted_models(dataset: Dataset, misuse: KnownMisuse) -> list[MethodUsageModel]:
    """Models of the crafted correct usage stored alongside the dataset."""
    path = dataset.crafted_usage_file(misuse)
    return parse_method_models(
        path.read_text(encoding="utf-8"),
        Path(misuse.crafted_usage_path).as_posix(),
        project_id=misuse.project_id,
        version_id=misuse.version_id,
    )


# --- export writers ---------------------------------------------------------


def _write_jsonl(path: Path, records: Sequence[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(record, sort_keys=True, ensure_ascii=False) for record in records]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def _run_record(run: RunStatus) -> dict:
    return {
        "detector_id": run.detector_id,
        "project": run.version[0],
        "version": run.version[1],
        "status": run.status,
        "finding_count": run.finding_count,
        "message": run.message,
    }


def _misuse_record(misuse: KnownMisuse) -> dict:
    return {
        "misuse_id": misuse.misuse_id,
        "project": misuse.project_id,
        "version": misuse.version_id,
        "file": misuse.location.file_path,
        "method": misuse.location.method_name,
        "line": misuse.location.line,
        "description": misuse.description,
        "fix_description": misuse.fix_description,
        "muc_labels": sorted(label.key() for label in misuse.muc_labels),
        "crafted_usage": misuse.crafted_usage_path,
    }


def export_experiment(
    workspace: Workspace,
    result: ExperimentResult,
    misuses: Sequence[KnownMisuse] = (),
    meta: Mapping | None = None,
) -> Path:
    directory = workspace.experiments / result.experiment
    directory.mkdir(parents=True, exist_ok=True)
    records = []
    for (detector_id, _version), findings in sorted(result.findings.items()):
        for rank, finding in enumerate(findings, start=1):
            records.append(finding_record(result.experiment, detector_id, finding, rank))
    _write_jsonl(directory / "findings.jsonl", records)
    _write_jsonl(directory / "runs.jsonl", [_run_record(r) for r in result.runs])
    hit_records = []
    for hit in result.potential_hits:
        hit_records.append(
            {
                "finding_id": finding_id(result.experiment, hit.finding.detector_id, hit.finding),
                "misuse_id": hit.misuse_id,
                "ambiguous": hit.ambiguous,
            }
        )
    _write_jsonl(directory / "potential_hits.jsonl", sorted(hit_records, key=lambda r: (r["finding_id"], r["misuse_id"])))
    _write_jsonl(directory / "misuses.jsonl", [_misuse_record(m) for m in misuses])
    meta_payload = {"experiment": result.experiment, **(meta or {})}
    (directory / "meta.json").write_text(
        json.dumps(meta_payload, indent=2, sort_keys=True), encoding="utf-8"
    )
    return directory


def export_rub_suite(
    workspace: Workspace,
    suite: RubSuiteResult,
    misuses: Sequence[KnownMisuse],
    meta: Mapping | None = None,
) -> Path:
    directory = workspace.experiments / "RUB"
    directory.mkdir(parents=True, exist_ok=True)
    findings_records = []
    hit_records = []
    run_records = []
    for result in suite.results:
        run_records.append({**_run_record(result.status), "misuse_id": result.misuse_id})
        for rank, finding in enumerate(result.findings, start=1):
            record = finding_record("RUB", result.detector_id, finding, rank)
            record["misuse_id"] = result.misuse_id
            findings_records.append(record)
        for hit in result.potential_hits:
            hit_records.append(
                {
                    "finding_id": finding_id("RUB", result.detector_id, hit.finding),
                    "misuse_id": hit.misuse_id,
                    "ambiguous": hit.ambiguous,
                }
            )
    _write_jsonl(directory / "findings.jsonl", findings_records)
    _write_jsonl(directory / "runs.jsonl", run_records)
    _write_jsonl(
        directory / "potential_hits.jsonl",
        sorted(hit_records, key=lambda r: (r["finding_id"], r["misuse_id"])),
    )
    _write_jsonl(directory / "misuses.jsonl", [_misuse_record(m) for m in misuses])
    meta_payload = {
        "experiment": "RUB",
        "empirical_rub": {d: percent(v) for d, v in sorted(suite.empirical.items())},
        "conceptual_rub": {d: percent(v) for d, v in sorted(suite.conceptual.items())},
        "potential_hit_table": {
            f"{r.detector_id}:{r.misuse_id}": r.hit for r in suite.results
        },
        **(meta or {}),
    }
    (directory / "meta.json").write_text(
        json.dumps(meta_payload, indent=2, sort_keys=True), encoding="utf-8"
    )
    return directory


# --- stats rendering --------------------------------------------------------

SUMMARY_COLUMNS = [
    "experiment",
    "detector",
    "total_findings",
    "reviewed",
    "confirmed",
    "precision",
    "kappa",
    "Uncommon",
    "Analysis",
    "Alternative",
    "Inside",
    "Dependent",
    "Bug",
    "Multiplicity",
    "Representation",
    "Matching",
    "fn-Analysis",
    "fn-Bug",
    "Lenient",
    "ExceptionHandling",
    "known_misuses",
    "actual_hits",
    "recall",
    "conceptual_rub",
]


def write_summary_csv(
    workspace: Workspace,
    experiment: str,
    store: ReviewStore,
    configured_reviewers: Sequence[str] | None = None,
) -> Path:
    directory = workspace.experiments / experiment
    export = load_experiment_export(directory)
    matrix = load_capability_matrix()
    rows = experiment_stats(export, store, matrix, configured_reviewers)
    out_path = directory / "summary.csv"
    with out_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.experiment,
                    row.detector_id,
                    row.total_findings,
                    row.reviewed,
                    row.confirmed,
                    percent(row.precision) if row.precision is not None else "",
                    f"{row.kappa:.2f}" if row.kappa is not None else "",
                    *[row.fp_root_causes[c] for c in ("Uncommon", "Analysis", "Alternative", "Inside", "Dependent", "Bug", "Multiplicity")],
                    *[row.fn_root_causes[c] for c in ("Representation", "Matching", "Analysis", "Bug", "Lenient", "ExceptionHandling")],
                    row.known_misuses if row.known_misuses is not None else "",
                    row.actual_hits if row.actual_hits is not None else "",
                    percent(row.recall) if row.recall is not None else "",
                    percent(row.conceptual_rub) if row.conceptual_rub is not None else "",
                ]
            )
    return out_path
