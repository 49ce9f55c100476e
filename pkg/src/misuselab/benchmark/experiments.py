"""The three experiments: per-project precision (P), recall upper bound
with crafted usages (RUB), and per-project recall (R).

Experiments produce findings, run statuses and potential hits; the
precision/recall numbers themselves exist only after the two-reviewer
gate, so they live in the stats layer, not here.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from ..detectors import (
    DetectorOutcome,
    ErrorMarker,
    PatternSource,
    RankedFindings,
    TimeoutMarker,
    default_config,
    run_detector,
    DetectorConfig,
)
from ..model import INFINITE, Finding, MethodUsageModel, SourceLocation
from ..muc import CapabilityMatrix
from .dataset import KnownMisuse
from .metrics import VersionKey, conceptual_rub, empirical_rub

log = logging.getLogger(__name__)


# --- potential hits ---------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PotentialHit:
    finding: Finding
    misuse_id: str
    ambiguous: bool = False  # finding matches several misuses: flag for review


def _normalize_path(path: str) -> str:
    path = path.replace("\\", "/")
    while path.startswith("./"):
        path = path[2:]
    return path


def _method_name_only(name: str) -> str:
    return name.split("(", 1)[0].strip()


def match_potential_hits(
    findings: Iterable[Finding], misuses: Iterable[KnownMisuse]
) -> list[PotentialHit]:
    """Pair findings with known misuses in the same file and method.

    File paths are compared normalized; method names by name only, so a
    finding may match several (e.g. overloaded) misuses and is then flagged
    for manual review.
    """
    misuse_list = list(misuses)
    hits: list[PotentialHit] = []
    for finding in findings:
        matched = [
            misuse
            for misuse in misuse_list
            if _normalize_path(finding.location.file_path)
            == _normalize_path(misuse.location.file_path)
            and _method_name_only(finding.location.method_name)
            == _method_name_only(misuse.location.method_name)
        ]
        for misuse in matched:
            hits.append(PotentialHit(finding, misuse.misuse_id, ambiguous=len(matched) > 1))
    return hits


# --- shared result shape ----------------------------------------------------


@dataclass(frozen=True, slots=True)
class RunStatus:
    detector_id: str
    version: VersionKey
    status: str  # "ok" | "timeout" | "error"
    finding_count: int = 0
    elapsed_seconds: float | None = None
    message: str | None = None


@dataclass(frozen=True)
class ExperimentResult:
    experiment: str  # "P" | "RUB" | "R"
    runs: tuple[RunStatus, ...]
    findings: Mapping[tuple[str, VersionKey], tuple[Finding, ...]]
    potential_hits: tuple[PotentialHit, ...]

    @property
    def ok(self) -> bool:
        return all(run.status == "ok" for run in self.runs)


def _status_of(outcome: DetectorOutcome, detector_id: str, version: VersionKey) -> RunStatus:
    if isinstance(outcome, TimeoutMarker):
        return RunStatus(detector_id, version, "timeout", elapsed_seconds=outcome.elapsed_seconds)
    if isinstance(outcome, ErrorMarker):
        return RunStatus(
            detector_id,
            version,
            "error",
            elapsed_seconds=outcome.elapsed_seconds,
            message=outcome.message,
        )
    return RunStatus(detector_id, version, "ok", finding_count=len(outcome.findings))


Corpora = Mapping[VersionKey, Sequence[MethodUsageModel]]
Configs = Mapping[str, DetectorConfig]


def _run_cells(
    detector_ids: Sequence[str],
    corpora: Corpora,
    configs: Configs,
    timeout_seconds: float | None,
    jobs: int,
    pattern_source: PatternSource | None = None,
) -> dict[tuple[str, VersionKey], DetectorOutcome]:
    cells = [
        (detector_id, version)
        for detector_id in detector_ids
        for version in sorted(corpora)
    ]

    def run_cell(cell: tuple[str, VersionKey]) -> tuple[tuple[str, VersionKey], DetectorOutcome]:
        detector_id, version = cell
        outcome = run_detector(
            detector_id,
            corpora[version],
            configs[detector_id],
            timeout_seconds=timeout_seconds,
            pattern_source=pattern_source,
        )
        return cell, outcome

    if jobs <= 1:
        results = dict(map(run_cell, cells))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(run_cell, cells))
    return results


# --- Experiment P -----------------------------------------------------------


def run_experiment_p(
    detector_ids: Sequence[str],
    corpora: Corpora,
    configs: Configs | None = None,
    top_n: int = 20,
    timeout_seconds: float | None = None,
    jobs: int = 1,
) -> ExperimentResult:
    """Per-version detection, truncated to the detector's top findings.

    The truncated findings are what reviewers assess; failures become run
    statuses instead of aborting the experiment.
    """
    configs = configs or {d: default_config(d) for d in detector_ids}
    outcomes = _run_cells(detector_ids, corpora, configs, timeout_seconds, jobs)
    runs = []
    findings: dict[tuple[str, VersionKey], tuple[Finding, ...]] = {}
    for (detector_id, version), outcome in sorted(outcomes.items()):
        runs.append(_status_of(outcome, detector_id, version))
        if isinstance(outcome, RankedFindings):
            findings[(detector_id, version)] = outcome.top(top_n)
    return ExperimentResult("P", tuple(runs), findings, ())


# --- Experiment RUB ---------------------------------------------------------

COPY_VERSION_PREFIX = "crafted-copy-"


def _relocate(model: MethodUsageModel, version_id: str) -> MethodUsageModel:
    return replace(model, location=replace(model.location, version_id=version_id))


def rub_corpus(
    misuse_models: Sequence[MethodUsageModel],
    crafted_models: Sequence[MethodUsageModel],
    copies: int,
) -> list[MethodUsageModel]:
    """Misuse-file models plus ``copies`` distinct-id copies of the crafted
    correct usage."""
    corpus = list(misuse_models)
    for i in range(copies):
        version_id = f"{COPY_VERSION_PREFIX}{i:02d}"
        corpus.extend(_relocate(model, version_id) for model in crafted_models)
    return corpus


def is_crafted_copy(location: SourceLocation) -> bool:
    return location.version_id.startswith(COPY_VERSION_PREFIX)


@dataclass(frozen=True)
class RubResult:
    detector_id: str
    misuse_id: str
    status: RunStatus
    findings: tuple[Finding, ...]
    potential_hits: tuple[PotentialHit, ...]

    @property
    def hit(self) -> bool:
        """At least one potential hit was produced (confirmation of hits
        against reviewers' decisions happens in the stats layer)."""
        return bool(self.potential_hits)


def run_experiment_rub(
    detector_id: str,
    misuse: KnownMisuse,
    misuse_models: Sequence[MethodUsageModel],
    crafted_models: Sequence[MethodUsageModel],
    copies: int = 50,
    min_support: int | None = None,
    config: DetectorConfig | None = None,
    timeout_seconds: float | None = None,
) -> RubResult:
    """Run one detector against one misuse with crafted-usage training data.

    Patterns are mined from the copy transactions only, which makes the
    experiment's isolation guarantee ("patterns come from the crafted
    usage") exact rather than merely likely.
    """
    if not crafted_models:
        raise ValueError(f"misuse {misuse.misuse_id!r} has no crafted usage models")
    support = min_support if min_support is not None else copies
    config = config or default_config(detector_id)
    config = replace(config, min_support=support)
    corpus = rub_corpus(misuse_models, crafted_models, copies)
    outcome = run_detector(
        detector_id,
        corpus,
        config,
        timeout_seconds=timeout_seconds,
        pattern_source=is_crafted_copy,
    )
    version = (misuse.project_id, misuse.version_id)
    status = _status_of(outcome, detector_id, version)
    if not isinstance(outcome, RankedFindings):
        return RubResult(detector_id, misuse.misuse_id, status, (), ())
    hits = match_potential_hits(outcome.findings, [misuse])
    return RubResult(detector_id, misuse.misuse_id, status, outcome.findings, tuple(hits))


@dataclass(frozen=True)
class RubSuiteResult:
    results: tuple[RubResult, ...]
    empirical: Mapping[str, Fraction]
    conceptual: Mapping[str, Fraction]

    def hits_of(self, detector_id: str) -> tuple[str, ...]:
        return tuple(
            r.misuse_id for r in self.results if r.detector_id == detector_id and r.hit
        )


def run_experiment_rub_suite(
    detector_ids: Sequence[str],
    misuses: Sequence[KnownMisuse],
    models_for: Callable[[KnownMisuse], tuple[Sequence[MethodUsageModel], Sequence[MethodUsageModel]]],
    matrix: CapabilityMatrix,
    copies: int = 50,
    configs: Configs | None = None,
    timeout_seconds: float | None = None,
) -> RubSuiteResult:
    """RUB over a whole misuse set; checks the upper-bound relation between
    conceptual and (pre-review) empirical recall per detector."""
    results = []
    for detector_id in detector_ids:
        for misuse in misuses:
            misuse_models, crafted_models = models_for(misuse)
            if not crafted_models:
                version = (misuse.project_id, misuse.version_id)
                results.append(
                    RubResult(
                        detector_id,
                        misuse.misuse_id,
                        RunStatus(detector_id, version, "error", message="crafted usage missing or unparseable"),
                        (),
                        (),
                    )
                )
                continue
            results.append(
                run_experiment_rub(
                    detector_id,
                    misuse,
                    misuse_models,
                    crafted_models,
                    copies=copies,
                    config=configs[detector_id] if configs else None,
                    timeout_seconds=timeout_seconds,
                )
            )
    labels = [m.muc_labels for m in misuses]
    empirical = {
        d: empirical_rub(
            sum(1 for r in results if r.detector_id == d and r.hit), len(misuses)
        )
        for d in detector_ids
    }
    conceptual = {d: conceptual_rub(matrix, d, labels) for d in detector_ids}
    for d in detector_ids:
        if conceptual[d] < empirical[d]:
            log.warning(
                "detector %s: empirical recall upper bound %s exceeds conceptual %s",
                d,
                empirical[d],
                conceptual[d],
            )
    return RubSuiteResult(tuple(results), empirical, conceptual)


# --- Experiment R -----------------------------------------------------------


def run_experiment_r(
    detector_ids: Sequence[str],
    corpora: Corpora,
    misuses: Sequence[KnownMisuse],
    configs: Configs | None = None,
    timeout_seconds: float | None = None,
    jobs: int = 1,
) -> ExperimentResult:
    """Per-version detection without crafted usages; all findings that land
    in a known misuse's file and method become potential hits."""
    configs = configs or {d: default_config(d) for d in detector_ids}
    outcomes = _run_cells(detector_ids, corpora, configs, timeout_seconds, jobs)
    runs = []
    findings: dict[tuple[str, VersionKey], tuple[Finding, ...]] = {}
    hits: list[PotentialHit] = []
    for (detector_id, version), outcome in sorted(outcomes.items()):
        runs.append(_status_of(outcome, detector_id, version))
        if isinstance(outcome, RankedFindings):
            findings[(detector_id, version)] = outcome.findings
            version_misuses = [m for m in misuses if m.version_key == version]
            hits.extend(match_potential_hits(outcome.findings, version_misuses))
    return ExperimentResult("R", tuple(runs), findings, tuple(hits))


# --- export records ---------------------------------------------------------


def _score_json(score: float) -> float | str:
    return "Infinite" if score == INFINITE else score


def finding_id(experiment: str, detector_id: str, finding: Finding) -> str:
    loc = finding.location
    payload = json.dumps(
        [
            experiment,
            detector_id,
            loc.project_id,
            loc.version_id,
            loc.file_path,
            loc.method_name,
            loc.line,
            sorted(finding.missing_facts),
            sorted(finding.present_facts),
            sorted(finding.pattern.items),
            finding.metadata.get("object", ""),
        ],
        sort_keys=True,
    )
    return hashlib.sha1(payload.encode()).hexdigest()[:16]


def finding_record(experiment: str, detector_id: str, finding: Finding, rank: int) -> dict:
    loc = finding.location
    return {
        "finding_id": finding_id(experiment, detector_id, finding),
        "experiment": experiment,
        "detector_id": detector_id,
        "rank": rank,
        "location": {
            "project": loc.project_id,
            "version": loc.version_id,
            "file": loc.file_path,
            "method": loc.method_name,
            "line": loc.line,
        },
        "score": _score_json(finding.score),
        "missing": sorted(finding.missing_facts),
        "present": sorted(finding.present_facts),
        "redundant": sorted(finding.redundant_facts),
        "pattern_support": finding.pattern.support,
        "pattern_items": sorted(finding.pattern.items),
        "metadata": dict(sorted(finding.metadata.items())),
    }
