"""Experiment metrics: precision/recall ratios, agreement, correlation,
findings-count normalization and version sampling.

Ratios are exact rationals; rendering to one-decimal percent happens only
at the output boundary.
"""

from __future__ import annotations

import random
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..muc import CapabilityMatrix, MucLabel, muc_matches

VersionKey = tuple[str, str]  # (project_id, version_id)


def _ratio(numerator: int, denominator: int, what: str) -> Fraction:
    if denominator <= 0:
        raise ZeroDivisionError(f"{what}: denominator must be positive")
    if numerator < 0 or numerator > denominator:
        raise ValueError(f"{what}: numerator must be within [0, denominator]")
    return Fraction(numerator, denominator)


def precision(confirmed: int, reviewed: int) -> Fraction:
    """True positives over reviewed findings."""
    return _ratio(confirmed, reviewed, "precision")


def recall(hits: int, known: int) -> Fraction:
    """Actual hits over known misuses."""
    return _ratio(hits, known, "recall")


def empirical_rub(hits: int, known: int) -> Fraction:
    """Fraction of known misuses actually found given crafted correct usages."""
    return _ratio(hits, known, "empirical recall upper bound")


def conceptual_rub(
    matrix: CapabilityMatrix, detector_id: str, misuse_labels: Sequence[Iterable[MucLabel]]
) -> Fraction:
    """Fraction of misuses whose labels the detector's capabilities match."""
    if not misuse_labels:
        raise ZeroDivisionError("conceptual recall upper bound needs at least one misuse")
    matching = sum(1 for labels in misuse_labels if muc_matches(matrix, detector_id, labels))
    return Fraction(matching, len(misuse_labels))


def percent(value: Fraction | float, decimals: int = 1) -> str:
    """Render a ratio as a percentage, e.g. Fraction(4, 39) -> '10.3%'."""
    as_decimal = Decimal(value.numerator) / Decimal(value.denominator) if isinstance(value, Fraction) else Decimal(repr(value))
    quantum = Decimal(1).scaleb(-decimals)
    return f"{(as_decimal * 100).quantize(quantum, rounding=ROUND_HALF_UP)}%"


def cohens_kappa(paired_decisions: Sequence[tuple[str, str]]) -> float:
    """Chance-corrected agreement of two reviewers over the same items.

    kappa = (p_o - p_e) / (1 - p_e) with p_e from the reviewers' marginal
    rates.  Degenerate marginals (p_e = 1) are defined as 1.0 under full
    agreement and rejected otherwise.
    """
    if not paired_decisions:
        raise ValueError("kappa needs at least one decision pair")
    n = len(paired_decisions)
    categories = sorted({d for pair in paired_decisions for d in pair})
    first_marginals = {c: sum(1 for a, _ in paired_decisions if a == c) for c in categories}
    second_marginals = {c: sum(1 for _, b in paired_decisions if b == c) for c in categories}
    observed = Fraction(sum(1 for a, b in paired_decisions if a == b), n)
    expected = sum(
        (Fraction(first_marginals[c], n) * Fraction(second_marginals[c], n) for c in categories),
        Fraction(0),
    )
    if expected == 1:
        if observed == 1:
            return 1.0
        raise ValueError("degenerate marginals (p_e = 1) with disagreement")
    return float((observed - expected) / (1 - expected))


def pearson_r(
    xs: Sequence[float | int | None], ys: Sequence[float | int | None]
) -> float:
    """Product-moment correlation; pairs with a missing side are dropped."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    pairs = [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None]
    if len(pairs) < 2:
        raise ValueError("need at least two complete pairs")
    n = len(pairs)
    mean_x = sum(x for x, _ in pairs) / n
    mean_y = sum(y for _, y in pairs) / n
    cov = sum((x - mean_x) * (y - mean_y) for x, y in pairs)
    var_x = sum((x - mean_x) ** 2 for x, _ in pairs)
    var_y = sum((y - mean_y) ** 2 for _, y in pairs)
    if var_x == 0 or var_y == 0:
        raise ValueError("correlation is undefined for a constant vector")
    return cov / (var_x * var_y) ** 0.5


CountsTable = Mapping[str, Mapping[VersionKey, int | None]]  # detector -> version -> count


def detector_maxima(counts: CountsTable) -> dict[str, int]:
    maxima: dict[str, int] = {}
    for detector_id, row in counts.items():
        produced = [c for c in row.values() if c is not None]
        if not produced:
            raise ValueError(f"detector {detector_id!r} has no successful runs")
        maxima[detector_id] = max(produced)
    return maxima


def normalized_findings(counts: CountsTable) -> dict[VersionKey, Fraction]:
    """Average, per version, of each detector's count normalized by that
    detector's maximum over the versions where it produced results.
    Detectors that failed on a version are skipped in its average."""
    maxima = detector_maxima(counts)
    versions = sorted({v for row in counts.values() for v in row})
    scores: dict[VersionKey, Fraction] = {}
    for version in versions:
        terms = []
        for detector_id, row in counts.items():
            count = row.get(version)
            if count is None:
                continue
            maximum = maxima[detector_id]
            terms.append(Fraction(count, maximum) if maximum else Fraction(0))
        if terms:
            scores[version] = sum(terms, Fraction(0)) / len(terms)
    return scores


def sample_versions(counts: CountsTable, seed: int) -> list[VersionKey]:
    """Pick 5 versions: 2 highest and 2 lowest by normalized findings plus
    one seeded-random version, at most one version per distinct project.

    Only versions where every detector produced results are eligible.
    """
    scores = normalized_findings(counts)
    eligible = sorted(
        version
        for version in scores
        if all(row.get(version) is not None for row in counts.values())
    )
    if len({project for project, _ in eligible}) < 5:
        raise ValueError("sampling needs versions from at least 5 distinct projects")

    chosen: list[VersionKey] = []

    def take(candidates: list[VersionKey]) -> None:
        for version in candidates:
            if all(version[0] != picked[0] for picked in chosen):
                chosen.append(version)
                return
        raise ValueError("not enough distinct projects to sample from")

    by_score_desc = sorted(eligible, key=lambda v: (-scores[v], v))
    by_score_asc = sorted(eligible, key=lambda v: (scores[v], v))
    take(by_score_desc)
    take(by_score_desc)
    take(by_score_asc)
    take(by_score_asc)
    remainder = [v for v in eligible if all(v[0] != picked[0] for picked in chosen)]
    if not remainder:
        raise ValueError("no distinct-project version left for the random pick")
    chosen.append(random.Random(seed).choice(remainder))
    return chosen
