"""Command-line entry point.

Commands: checkout, extract, detect, exp {p,rub,r}, stats, serve,
validate-dataset.  Every flag can also come from an environment variable
(prefix MISUSELAB_) or a YAML config file; explicit flags win.  Progress
and warnings go to stderr, summary tables to stdout, machine-readable
records to files under the workspace.

Exit codes: 0 success, 1 partial failures (some detector cells errored or
timed out), 2 invalid invocation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import yaml

from .benchmark.checkout import CheckoutError, checkout
from .benchmark.dataset import Dataset, DatasetError, load_dataset
from .benchmark.experiments import (
    run_experiment_p,
    run_experiment_r,
    run_experiment_rub_suite,
)
from .benchmark.metrics import percent, sample_versions
from .detectors import DETECTORS, default_config
from .extract import ParseError
from .extract.factsfile import load_facts_file, write_facts_file
from .muc import load_capability_matrix
from .pipeline import (
    Workspace,
    corpus_for,
    crafted_models,
    export_experiment,
    export_rub_suite,
    extract_version,
    misuse_file_models,
    write_summary_csv,
)
from .review.store import ReviewStore

ENV_PREFIX = "MISUSELAB_"

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _warn(message: str) -> None:
    print(f"misuselab: {message}", file=sys.stderr)


def _setting(args: argparse.Namespace, name: str, config_file: dict, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None:
        return env
    if name in config_file:
        return config_file[name]
    return default


def _load_config_file(args: argparse.Namespace) -> dict:
    path = getattr(args, "config", None) or os.environ.get(ENV_PREFIX + "CONFIG")
    if not path:
        return {}
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must be a YAML mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _require_dataset(args: argparse.Namespace, config_file: dict) -> Dataset:
    dataset_path = _setting(args, "dataset", config_file)
    if not dataset_path:
        raise UsageError("--dataset is required (or MISUSELAB_DATASET)")
    path = Path(dataset_path)
    if not path.exists():
        raise UsageError(f"dataset path does not exist: {path}")
    return load_dataset(path)


def _workspace(args: argparse.Namespace, config_file: dict) -> Workspace:
    workspace_path = _setting(args, "workspace", config_file)
    if not workspace_path:
        raise UsageError("--workspace is required (or MISUSELAB_WORKSPACE)")
    workspace = Workspace(Path(workspace_path))
    workspace.root.mkdir(parents=True, exist_ok=True)
    return workspace


def _detector_ids(args: argparse.Namespace, config_file: dict) -> list[str]:
    raw = _setting(args, "detector", config_file, default="all")
    if isinstance(raw, str):
        names = [n.strip() for n in raw.split(",") if n.strip()]
    else:
        names = list(raw)
    if names == ["all"]:
        return sorted(DETECTORS)
    for name in names:
        if name not in DETECTORS:
            valid = ", ".join(sorted(DETECTORS))
            raise UsageError(f"unknown detector {name!r}; valid detectors: {valid}")
    return names


def _configs(args: argparse.Namespace, config_file: dict, detector_ids: Sequence[str]):
    min_support = _setting(args, "min_support", config_file)
    overrides = {}
    if min_support is not None:
        overrides["min_support"] = int(min_support)
    return {d: default_config(d, **overrides) for d in detector_ids}


def _versions(args: argparse.Namespace, dataset: Dataset) -> list:
    wanted = getattr(args, "version", None)
    if not wanted:
        return list(dataset.versions)
    versions = []
    for spec in wanted:
        project, _, version_id = spec.partition("/")
        matches = [
            v
            for v in dataset.versions
            if v.project_id == project and (not version_id or v.version_id == version_id)
        ]
        if not matches:
            raise UsageError(f"unknown version {spec!r}")
        versions.extend(matches)
    return versions


def _float_setting(args, name, config_file, default):
    value = _setting(args, name, config_file, default)
    return None if value in (None, "none") else float(value)


# --- commands ----------------------------------------------------------------


def cmd_validate_dataset(args, config_file) -> int:
    dataset = _require_dataset(args, config_file)
    rub_ready = sum(1 for m in dataset.misuses if m.crafted_usage_path)
    print(
        f"dataset ok: {len(dataset.versions)} versions, {len(dataset.misuses)} misuses "
        f"({rub_ready} with crafted usages)"
    )
    return EXIT_OK


def cmd_checkout(args, config_file) -> int:
    dataset = _require_dataset(args, config_file)
    workspace = _workspace(args, config_file)
    for version in _versions(args, dataset):
        work_dir = checkout(version, dataset, workspace.root)
        _warn(f"checked out {version.project_id}/{version.version_id} -> {work_dir}")
    return EXIT_OK


def cmd_extract(args, config_file) -> int:
    dataset = _require_dataset(args, config_file)
    workspace = _workspace(args, config_file)
    facts_out = _setting(args, "facts_out", config_file)
    for version in _versions(args, dataset):
        warnings = []
        facts_path = extract_version(dataset, version, workspace, warnings)
        for warning in warnings:
            _warn(f"extraction warning {warning.file_path}#{warning.method_name}: {warning.message}")
        _warn(f"extracted {version.project_id}/{version.version_id} -> {facts_path}")
        if facts_out:
            models = load_facts_file(facts_path)
            write_facts_file(models, Path(facts_out))
            _warn(f"facts copied to {facts_out}")
    return EXIT_OK


def cmd_detect(args, config_file) -> int:
    import hashlib
    from dataclasses import asdict

    from .detectors import run_detector, RankedFindings
    from .benchmark.experiments import finding_record

    workspace = _workspace(args, config_file)
    detector_ids = _detector_ids(args, config_file)
    configs = _configs(args, config_file, detector_ids)
    timeout = _float_setting(args, "timeout", config_file, 7200.0)

    facts_in = _setting(args, "facts_in", config_file)
    if facts_in:
        facts_paths = {("facts", Path(facts_in).stem): Path(facts_in)}
    else:
        dataset = _require_dataset(args, config_file)
        versions = _versions(args, dataset)
        facts_paths = {
            v.key: extract_version(dataset, v, workspace) for v in versions
        }

    failures = 0
    for key in sorted(facts_paths):
        facts_bytes = facts_paths[key].read_bytes()
        corpus = None
        for detector_id in detector_ids:
            out_dir = workspace.detect_dir / detector_id / key[0] / key[1]
            cache_key = hashlib.sha256(
                facts_bytes
                + json.dumps(asdict(configs[detector_id]), sort_keys=True, default=str).encode()
                + str(timeout).encode()
            ).hexdigest()
            cache_path = out_dir / ".cache.json"
            status_path = out_dir / "status.json"
            if cache_path.is_file() and status_path.is_file():
                if json.loads(cache_path.read_text()).get("key") == cache_key:
                    status = json.loads(status_path.read_text())
                    if status["status"] != "ok":
                        failures += 1
                    print(
                        f"{detector_id}\t{key[0]}/{key[1]}\t{status['status']}\t"
                        f"{status.get('finding_count', '')}\t(cached)"
                    )
                    continue
            if corpus is None:
                corpus = load_facts_file(facts_paths[key])
            outcome = run_detector(detector_id, corpus, configs[detector_id], timeout)
            out_dir.mkdir(parents=True, exist_ok=True)
            if isinstance(outcome, RankedFindings):
                records = [
                    finding_record("detect", detector_id, f, rank)
                    for rank, f in enumerate(outcome.findings, start=1)
                ]
                status = {"status": "ok", "finding_count": len(records)}
            else:
                records = []
                kind = type(outcome).__name__.removesuffix("Marker").lower()
                status = {"status": kind, "message": getattr(outcome, "message", None)}
                failures += 1
                _warn(f"{detector_id} on {key[0]}/{key[1]}: {kind}")
            (out_dir / "findings.jsonl").write_text(
                "".join(json.dumps(r, sort_keys=True) + "\n" for r in records),
                encoding="utf-8",
            )
            (out_dir / "status.json").write_text(
                json.dumps(status, indent=2, sort_keys=True), encoding="utf-8"
            )
            cache_path.write_text(json.dumps({"key": cache_key}), encoding="utf-8")
            print(f"{detector_id}\t{key[0]}/{key[1]}\t{status['status']}\t{status.get('finding_count', '')}")
    return EXIT_PARTIAL if failures else EXIT_OK


def _experiment_cache_key(dataset, detector_ids, configs, **params) -> str:
    import hashlib
    from dataclasses import asdict

    from .benchmark.checkout import tree_hash

    payload = json.dumps(
        {
            "dataset": tree_hash(dataset.root),
            "detectors": list(detector_ids),
            "configs": {d: asdict(c) for d, c in sorted(configs.items())},
            **params,
        },
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def _cached_experiment(workspace, name: str, cache_key: str) -> int | None:
    """Exit code replayed from exports when inputs are unchanged, else None."""
    directory = workspace.experiments / name
    meta_path = directory / "meta.json"
    if not meta_path.is_file():
        return None
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("cache_key") != cache_key:
        return None
    _warn(f"experiment {name}: cache hit, outputs unchanged")
    failures = 0
    if name == "RUB":
        print("detector\tpotential-hits\tempirical-rub\tconceptual-rub")
        hits_by_detector: dict[str, int] = {}
        for cell, hit in meta.get("potential_hit_table", {}).items():
            detector_id = cell.split(":", 1)[0]
            hits_by_detector[detector_id] = hits_by_detector.get(detector_id, 0) + bool(hit)
        for d, rub in sorted(meta.get("empirical_rub", {}).items()):
            print(f"{d}\t{hits_by_detector.get(d, 0)}\t{rub}\t{meta['conceptual_rub'][d]}")
    else:
        print("detector\tproject/version\tstatus\tfindings")
    runs_path = directory / "runs.jsonl"
    if runs_path.is_file():
        for line in runs_path.read_text(encoding="utf-8").splitlines():
            run = json.loads(line)
            if name != "RUB":
                print(
                    f"{run['detector_id']}\t{run['project']}/{run['version']}\t"
                    f"{run['status']}\t{run['finding_count']}"
                )
            if run["status"] != "ok":
                failures += 1
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_exp(args, config_file) -> int:
    dataset = _require_dataset(args, config_file)
    workspace = _workspace(args, config_file)
    detector_ids = _detector_ids(args, config_file)
    configs = _configs(args, config_file, detector_ids)
    timeout = _float_setting(args, "timeout", config_file, 7200.0)
    jobs = int(_setting(args, "jobs", config_file, os.cpu_count() or 1))
    seed = int(_setting(args, "seed", config_file, 0))
    top_n = int(_setting(args, "top_n", config_file, 20))
    experiment = args.experiment.lower()

    if experiment == "rub":
        wanted = getattr(args, "misuse", None)
        misuses = [m for m in dataset.misuses if m.crafted_usage_path]
        if wanted:
            misuses = [dataset.misuse(mid) for mid in wanted]
        if not misuses:
            raise UsageError("no misuses with crafted usages in the dataset")
        copies_setting = int(_setting(args, "copies", config_file, 50))
        cache_key = _experiment_cache_key(
            dataset,
            detector_ids,
            configs,
            experiment="RUB",
            misuses=sorted(m.misuse_id for m in misuses),
            copies=copies_setting,
            timeout=timeout,
        )
        cached = _cached_experiment(workspace, "RUB", cache_key)
        if cached is not None:
            return cached

        def models_for(misuse):
            try:
                return (
                    misuse_file_models(dataset, workspace, misuse),
                    crafted_models(dataset, misuse),
                )
            except (ParseError, FileNotFoundError) as exc:
                _warn(f"misuse {misuse.misuse_id}: {exc}")
                return ([], [])

        suite = run_experiment_rub_suite(
            detector_ids,
            misuses,
            models_for,
            load_capability_matrix(),
            copies=copies_setting,
            configs=configs,
            timeout_seconds=timeout,
        )
        export_rub_suite(
            workspace,
            suite,
            misuses,
            meta={
                "detectors": detector_ids,
                "copies": copies_setting,
                "top_n": top_n,
                "cache_key": cache_key,
            },
        )
        print("detector\tpotential-hits\tempirical-rub\tconceptual-rub")
        for d in detector_ids:
            hits = sum(1 for r in suite.results if r.detector_id == d and r.hit)
            print(f"{d}\t{hits}\t{percent(suite.empirical[d])}\t{percent(suite.conceptual[d])}")
        failed = any(r.status.status != "ok" for r in suite.results)
        return EXIT_PARTIAL if failed else EXIT_OK

    versions = _versions(args, dataset)
    keys = [v.key for v in versions]
    name = experiment.upper()
    cache_key = _experiment_cache_key(
        dataset,
        detector_ids,
        configs,
        experiment=name,
        versions=sorted(keys),
        top_n=top_n,
        seed=seed,
        timeout=timeout,
        no_sample=bool(getattr(args, "no_sample", False)),
    )
    cached = _cached_experiment(workspace, name, cache_key)
    if cached is not None:
        return cached
    corpora = corpus_for(dataset, workspace, keys)
    if experiment == "p":
        if len({k[0] for k in keys}) >= 5 and not getattr(args, "no_sample", False):
            counts = _full_counts(detector_ids, corpora, configs, timeout, jobs)
            keys = sample_versions(counts, seed)
            _warn(f"sampled versions: {keys}")
            corpora = {k: corpora[k] for k in keys}
        result = run_experiment_p(detector_ids, corpora, configs, top_n, timeout, jobs)
        export_experiment(
            workspace,
            result,
            misuses=[m for m in dataset.misuses if m.version_key in set(keys)],
            meta={
                "detectors": detector_ids,
                "top_n": top_n,
                "seed": seed,
                "cache_key": cache_key,
            },
        )
    elif experiment == "r":
        misuses = [m for m in dataset.misuses if m.version_key in set(keys)]
        result = run_experiment_r(detector_ids, corpora, misuses, configs, timeout, jobs)
        export_experiment(
            workspace,
            result,
            misuses=misuses,
            meta={"detectors": detector_ids, "cache_key": cache_key},
        )
    else:
        raise UsageError(f"unknown experiment {args.experiment!r}; use p, rub or r")

    print("detector\tproject/version\tstatus\tfindings")
    for run in result.runs:
        print(
            f"{run.detector_id}\t{run.version[0]}/{run.version[1]}\t{run.status}\t{run.finding_count}"
        )
    return EXIT_OK if result.ok else EXIT_PARTIAL


def _full_counts(detector_ids, corpora, configs, timeout, jobs):
    from .benchmark.experiments import _run_cells
    from .detectors import RankedFindings

    outcomes = _run_cells(detector_ids, corpora, configs, timeout, jobs)
    counts: dict[str, dict] = {d: {} for d in detector_ids}
    for (detector_id, key), outcome in outcomes.items():
        counts[detector_id][key] = (
            len(outcome.findings) if isinstance(outcome, RankedFindings) else None
        )
    return counts


def cmd_stats(args, config_file) -> int:
    workspace = _workspace(args, config_file)
    store_path = _setting(args, "store", config_file) or workspace.review_store_path
    store = ReviewStore(store_path)
    tokens_path = _setting(args, "tokens", config_file)
    reviewers = None
    if tokens_path:
        from .review.service import load_tokens

        reviewers = list(load_tokens(Path(tokens_path)).values())
    wanted = _setting(args, "experiment", config_file)
    names = [wanted] if wanted else sorted(
        p.name for p in workspace.experiments.iterdir() if p.is_dir()
    ) if workspace.experiments.is_dir() else []
    if not names:
        raise UsageError("no experiment exports under the workspace")
    for name in names:
        csv_path = write_summary_csv(workspace, name, store, reviewers)
        print(csv_path.read_text(encoding="utf-8"), end="")
    return EXIT_OK


def cmd_serve(args, config_file) -> int:
    import uvicorn

    from .review.service import create_app, load_tokens

    workspace = _workspace(args, config_file)
    tokens_path = _setting(args, "tokens", config_file)
    tokens = load_tokens(Path(tokens_path)) if tokens_path else {}
    if not tokens:
        _warn("no --tokens file given; write endpoints will reject everything")
    store_path = _setting(args, "store", config_file) or workspace.review_store_path
    static_dir = _setting(args, "static", config_file)
    port = int(_setting(args, "port", config_file, 8033))
    app = create_app(workspace.root, store_path, tokens, static_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="misuselab",
        description="API-misuse detectors, benchmark experiments and review service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, dataset=True, workspace=True) -> None:
        p.add_argument("--config", help="YAML config file; flags win over it")
        if dataset:
            p.add_argument("--dataset", help="dataset directory (index.yml + misuses/)")
        if workspace:
            p.add_argument("--workspace", help="working directory for all stages")

    p = sub.add_parser("validate-dataset", help="check the dataset schema")
    common(p, workspace=False)
    p.set_defaults(func=cmd_validate_dataset)

    p = sub.add_parser("checkout", help="materialize project versions")
    common(p)
    p.add_argument("--version", action="append", help="project or project/version; repeatable")
    p.set_defaults(func=cmd_checkout)

    p = sub.add_parser("extract", help="parse sources into facts files")
    common(p)
    p.add_argument("--version", action="append")
    p.add_argument("--facts-out", dest="facts_out", help="also copy the facts to this path")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("detect", help="run detectors over extracted facts")
    common(p)
    p.add_argument("--version", action="append")
    p.add_argument("--detector", help="comma-separated ids or 'all'")
    p.add_argument("--min-support", dest="min_support", type=int)
    p.add_argument("--timeout", type=float, help="seconds per detector run")
    p.add_argument("--facts-in", dest="facts_in", help="analyze a pre-extracted facts file")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("exp", help="run experiment p, rub or r")
    p.add_argument("experiment", choices=["p", "rub", "r"])
    common(p)
    p.add_argument("--version", action="append")
    p.add_argument("--detector")
    p.add_argument("--misuse", action="append", help="restrict rub to these misuse ids")
    p.add_argument("--min-support", dest="min_support", type=int)
    p.add_argument("--copies", type=int)
    p.add_argument("--top-n", dest="top_n", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--no-sample", dest="no_sample", action="store_true",
                   help="run on all versions instead of sampling five")
    p.set_defaults(func=cmd_exp)

    p = sub.add_parser("stats", help="compute reviewed experiment statistics")
    common(p, dataset=False)
    p.add_argument("--experiment")
    p.add_argument("--store", help="review store path (default: workspace)")
    p.add_argument("--tokens", help="token table defining the primary reviewers")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="serve the review API and UI")
    common(p, dataset=False)
    p.add_argument("--port", type=int)
    p.add_argument("--store")
    p.add_argument("--tokens")
    p.add_argument("--static", help="directory with built UI assets")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        config_file = _load_config_file(args)
        return args.func(args, config_file)
    except UsageError as exc:
        _warn(str(exc))
        return EXIT_USAGE
    except DatasetError as exc:
        _warn(str(exc))
        return EXIT_USAGE
    except (CheckoutError, ParseError) as exc:
        _warn(str(exc))
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
