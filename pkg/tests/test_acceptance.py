"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Tolerances are pinned here and nowhere else."""

import random
import shutil
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

DATASET_DIR = Path(__file__).resolve().parent.parent / "dataset"


def report(criterion: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] {criterion}: {status}{suffix}", file=sys.stderr)
    assert passed, f"{criterion}{suffix}"


# --- 1. miner vs oracle -------------------------------------------------------


def test_miner_vs_oracle_on_1000_random_corpora():
    from misuselab.mining import Transaction, brute_force_frequent, mine_closed_frequent

    rng = random.Random(0xC0FFEE)
    started = time.monotonic()
    discrepancies = 0
    for case in range(1000):
        n_items = rng.randint(1, 8)
        items = [f"i{k}" for k in range(n_items)]
        n_tx = rng.randint(0, 12)
        corpus = [
            Transaction.of(
                f"t{i}", rng.sample(items, rng.randint(0, n_items))
            )
            for i in range(n_tx)
        ]
        min_support = rng.randint(1, max(1, n_tx))
        mined = [
            (tuple(sorted(p.items)), p.support, tuple(sorted(p.supporting_ids)))
            for p in mine_closed_frequent(corpus, min_support)
        ]
        oracle = [
            (tuple(sorted(p.items)), p.support, tuple(sorted(p.supporting_ids)))
            for p in brute_force_frequent(corpus, min_support)
        ]
        if mined != oracle:
            discrepancies += 1
    elapsed = time.monotonic() - started
    report(
        "miner-vs-oracle",
        discrepancies == 0 and elapsed < 60.0,
        f"1000 corpora, {discrepancies} discrepancies, {elapsed:.1f}s",
    )


# --- 2. strangeness formula suite ---------------------------------------------


def test_type_usage_formula_suite():
    from misuselab.detectors import default_config, detect_type_usage, strangeness
    from misuselab.model import MethodSignature, MethodUsageModel, SourceLocation, UsageEvent

    exact = (
        strangeness(0, 50) == 1.0
        and strangeness(5, 0) == 0.0
        and strangeness(1, 49) == 1.0 - 1.0 / 50.0
    )

    def usage(method, calls, file):
        return MethodUsageModel(
            SourceLocation("p", "v", file, method, 1),
            (("x", "T"),),
            tuple(UsageEvent.call("x", MethodSignature(c), 1) for c in calls),
        )

    # Exactly at the threshold: |E|=3, |A|=97 gives 0.97, strictly not above.
    at_threshold = (
        [usage(f"e{i}", ["a"], f"E{i}.java") for i in range(4)]
        + [usage(f"a{i}", ["a", "b"], f"A{i}.java") for i in range(97)]
    )
    config = default_config("type-usage")
    border = detect_type_usage(at_threshold, config)
    gate_strict = not any(f.location.method_name.startswith("e") for f in border.findings)

    above = [usage(f"e{i}", ["a"], f"E{i}.java") for i in range(2)] + [
        usage(f"a{i}", ["a", "b"], f"A{i}.java") for i in range(49)
    ]
    reported = detect_type_usage(above, config)
    wanted = [f for f in reported.findings if f.location.method_name.startswith("e")]
    above_ok = len(wanted) == 2 and all(f.score == 1.0 - 1.0 / 50.0 for f in wanted)

    no_empty = all(f.missing_facts for f in border.findings + reported.findings)
    report(
        "strangeness-suite",
        exact and gate_strict and above_ok and no_empty,
        "formula exact, 0.97 gate strict-greater, no empty-missing findings",
    )


# --- shared RUB machinery ------------------------------------------------------


DETECTOR_IDS = ("call-set", "call-pair", "type-usage", "temporal")

# The two tolerated divergences between capabilities and potential hits,
# both on the formula detector: an unexpected hit through the
# exception-order fact, and an unexpected miss when the fix changes more
# facts than the matching distance allows.
DOCUMENTED_EXCEPTIONS = {
    ("temporal", "demo-004"),
    ("temporal", "demo-007"),
}


@pytest.fixture(scope="module")
def rub_suite(tmp_path_factory):
    from misuselab.benchmark.dataset import load_dataset
    from misuselab.benchmark.experiments import run_experiment_rub_suite
    from misuselab.muc import load_capability_matrix
    from misuselab.pipeline import Workspace, crafted_models, misuse_file_models

    workspace = Workspace(tmp_path_factory.mktemp("rub-ws"))
    dataset = load_dataset(DATASET_DIR)

    def models_for(misuse):
        return (
            misuse_file_models(dataset, workspace, misuse),
            crafted_models(dataset, misuse),
        )

    suite = run_experiment_rub_suite(
        DETECTOR_IDS,
        dataset.misuses,
        models_for,
        load_capability_matrix(),
        copies=50,
    )
    return dataset, suite


# --- 3. RUB micro-benchmark ----------------------------------------------------


def test_rub_micro_benchmark(rub_suite):
    from misuselab.muc import load_capability_matrix, muc_matches

    dataset, suite = rub_suite
    matrix = load_capability_matrix()

    corpus_big_enough = len(dataset.misuses) >= 10
    cells = {label for m in dataset.misuses for label in m.muc_labels}
    cells_spanned = len(cells) >= 6

    mismatches = set()
    for result in suite.results:
        misuse = dataset.misuse(result.misuse_id)
        predicted = muc_matches(matrix, result.detector_id, misuse.muc_labels)
        if predicted != result.hit:
            mismatches.add((result.detector_id, result.misuse_id))

    bound_holds = all(
        suite.conceptual[d] >= suite.empirical[d] for d in DETECTOR_IDS
    )
    report(
        "rub-micro-benchmark",
        corpus_big_enough
        and cells_spanned
        and mismatches == DOCUMENTED_EXCEPTIONS
        and bound_holds,
        f"{len(dataset.misuses)} misuses over {len(cells)} cells, "
        f"exceptions={sorted(mismatches)}, conceptual>=empirical per detector",
    )


# --- 4. RUB isolation ----------------------------------------------------------


def test_rub_isolation(rub_suite):
    from misuselab.mining import Transaction, mine_closed_frequent
    from misuselab.pipeline import Workspace, misuse_file_models

    dataset, suite = rub_suite

    # (a) every pattern backing a finding is supported by copies alone
    copy_marker = "crafted/"
    finding_patterns_clean = all(
        supporting.startswith(copy_marker)
        for result in suite.results
        for finding in result.findings
        for supporting in finding.pattern.supporting_ids
    )

    # (b) the misuse files alone can never reach the mining support
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        workspace = Workspace(Path(tmp))
        no_rogue_patterns = True
        for misuse in dataset.misuses:
            models = misuse_file_models(dataset, workspace, misuse)
            transactions = [
                Transaction(
                    f"t{i}", frozenset(e.signature.name for e in m.calls())
                )
                for i, m in enumerate(models)
            ]
            if mine_closed_frequent(transactions, 50):
                no_rogue_patterns = False
    report(
        "rub-isolation",
        finding_patterns_clean and no_rogue_patterns,
        "all pattern support comes from crafted-usage copies in 100% of runs",
    )


# --- 5. metric oracles -----------------------------------------------------------


def test_metric_oracles():
    import numpy as np

    from misuselab.benchmark.metrics import (
        cohens_kappa,
        pearson_r,
        percent,
        precision,
        recall,
        empirical_rub,
    )

    ratios_ok = (
        percent(precision(4, 39)) == "10.3%"
        and percent(precision(5, 44)) == "11.4%"
        and percent(recall(11, 53)) == "20.8%"
        and percent(empirical_rub(15, 64)) == "23.4%"
        and percent(Fraction(19, 64)) == "29.7%"
    )

    pairs = (
        [("misuse", "misuse")] * 20
        + [("misuse", "not-misuse")] * 5
        + [("not-misuse", "misuse")] * 10
        + [("not-misuse", "not-misuse")] * 15
    )
    kappa_ok = cohens_kappa(pairs) == 0.4

    rng = random.Random(8128)
    xs = [float(rng.randrange(1000)) for _ in range(64)]
    ys = [3.5 * x + rng.randrange(400) for x in xs]
    oracle = float(np.corrcoef(xs, ys)[0, 1])
    pearson_ok = abs(pearson_r(xs, ys) - oracle) < 1e-9

    report(
        "metric-oracles",
        ratios_ok and kappa_ok and pearson_ok,
        "precision/recall/rub percents, kappa 0.4 exact, pearson within 1e-9",
    )


# --- 6. normalization oracle -----------------------------------------------------


def test_normalization_oracle():
    from misuselab.benchmark.metrics import normalized_findings

    from test_metrics import findings_table

    scores = normalized_findings(findings_table())
    closure = round(float(scores[("closure", "319")]), 2)
    math_998 = round(float(scores[("commons-math", "998")]), 2)
    report(
        "normalization-oracle",
        closure == 0.74 and math_998 == 0.20,
        f"closure/319 -> {closure}, commons-math/998 -> {math_998} with failed runs skipped",
    )


# --- 7. determinism ---------------------------------------------------------------


def test_full_pipeline_determinism(tmp_path):
    from misuselab.cli import main

    started = time.monotonic()
    digests = []
    for run_index in (1, 2):
        workspace = tmp_path / f"run{run_index}"
        for argv in (
            ["exp", "rub", "--dataset", str(DATASET_DIR), "--workspace", str(workspace)],
            ["exp", "p", "--dataset", str(DATASET_DIR), "--workspace", str(workspace), "--seed", "7"],
            ["exp", "r", "--dataset", str(DATASET_DIR), "--workspace", str(workspace), "--seed", "7"],
        ):
            assert main(argv) == 0
        exports = sorted((workspace / "experiments").rglob("*"))
        digest = {
            str(p.relative_to(workspace)): p.read_bytes()
            for p in exports
            if p.is_file()
        }
        digests.append(digest)
        shutil.rmtree(workspace / "checkouts")
    elapsed = time.monotonic() - started
    report(
        "determinism",
        digests[0] == digests[1] and elapsed < 300.0,
        f"two seeded pipeline runs byte-identical in {elapsed:.1f}s",
    )


# --- 8. temporal detector on the writer fixture -----------------------------------


def test_temporal_missing_exception_fact(rub_suite):
    dataset, suite = rub_suite
    results = [
        r
        for r in suite.results
        if r.detector_id == "temporal" and r.misuse_id == "demo-004"
    ]
    assert len(results) == 1
    findings = results[0].findings
    ok = (
        len(findings) >= 1
        and all(set(f.missing_facts) == {"exc:write<close"} for f in findings)
        and results[0].hit
    )
    report(
        "temporal-exception-fact",
        ok,
        "unguarded writer vs 50 guarded copies misses exactly exc:write<close",
    )
