import subprocess
from pathlib import Path

import pytest
import yaml

from misuselab.benchmark.checkout import CheckoutError, checkout, tree_hash
from misuselab.benchmark.dataset import (
    Dataset,
    DatasetError,
    GitRepo,
    KnownMisuse,
    LocalPath,
    ProjectVersion,
    load_dataset,
)
from misuselab.benchmark.experiments import (
    match_potential_hits,
    rub_corpus,
    run_experiment_p,
    run_experiment_r,
    run_experiment_rub,
)
from misuselab.model import (
    MethodSignature,
    MethodUsageModel,
    Pattern,
    Finding,
    SourceLocation,
    UsageEvent,
)
from misuselab.muc import MucLabel

DATASET_DIR = Path(__file__).resolve().parent.parent / "dataset"

MISSING_CALL = MucLabel.from_key("missing/method-call")


def model(method, calls_by_object, file="F.java", project="p", version="v"):
    events, objects = [], []
    for ref, call_names in calls_by_object.items():
        objects.append((ref, "T"))
        for name in call_names:
            events.append(UsageEvent.call(ref, MethodSignature(name), 1))
    return MethodUsageModel(
        SourceLocation(project, version, file, method, 1), tuple(objects), tuple(events)
    )


def finding_at(file, method, missing=("close",), detector="call-set"):
    pattern = Pattern(frozenset({"open", *missing}), 30, frozenset(f"t{i}" for i in range(30)))
    return Finding(
        detector_id=detector,
        location=SourceLocation("p", "v", file, method, 1),
        score=30.0,
        pattern=pattern,
        present_facts=frozenset({"open"}),
        missing_facts=frozenset(missing),
    )


def misuse_at(misuse_id, file, method, labels=frozenset({MISSING_CALL})):
    return KnownMisuse(
        misuse_id=misuse_id,
        project_id="p",
        version_id="v",
        location=SourceLocation("p", "v", file, method),
        description="d",
        muc_labels=labels,
        fix_description="f",
    )


class TestBundledDataset:
    def test_loads(self):
        dataset = load_dataset(DATASET_DIR)
        assert len(dataset.versions) == 1
        assert len(dataset.misuses) == 10
        assert all(m.crafted_usage_path for m in dataset.misuses)

    def test_spans_at_least_six_cells(self):
        dataset = load_dataset(DATASET_DIR)
        cells = {label for m in dataset.misuses for label in m.muc_labels}
        assert len(cells) >= 6

    def test_missing_field_reported_by_name(self, tmp_path):
        root = tmp_path / "ds"
        (root / "misuses").mkdir(parents=True)
        (root / "index.yml").write_text(
            yaml.safe_dump(
                {
                    "versions": [
                        {
                            "project": "x",
                            "version": "1",
                            "origin": {"type": "local", "path": "proj"},
                            "source_roots": ["src"],
                        }
                    ]
                }
            )
        )
        (root / "misuses" / "bad.yml").write_text(
            yaml.safe_dump(
                {
                    "id": "bad",
                    "project": "x",
                    "version": "1",
                    "file": "src/A.java",
                    "method": "m",
                    "description": "d",
                    "fix_description": "f",
                }
            )
        )
        with pytest.raises(DatasetError, match="muc_labels"):
            load_dataset(root)

    def test_full_commit_hash_required(self):
        with pytest.raises(ValueError, match="40-hex"):
            GitRepo(url="https://example.invalid/repo.git", commit="abc123")


class TestCheckout:
    def make_dataset(self, tmp_path) -> Dataset:
        project = tmp_path / "ds" / "proj" / "src"
        project.mkdir(parents=True)
        (project / "A.java").write_text("class A { void m(X x) { x.go(); } }\n")
        version = ProjectVersion("x", "1", LocalPath("proj"), ("src",))
        return Dataset(root=tmp_path / "ds", versions=(version,), misuses=())

    def test_local_checkout_copies_and_verifies_roots(self, tmp_path):
        dataset = self.make_dataset(tmp_path)
        work = checkout(dataset.versions[0], dataset, tmp_path / "ws")
        assert (work / "src" / "A.java").is_file()

    def test_repeated_checkout_is_idempotent(self, tmp_path):
        dataset = self.make_dataset(tmp_path)
        first = checkout(dataset.versions[0], dataset, tmp_path / "ws")
        hash_one = tree_hash(first)
        second = checkout(dataset.versions[0], dataset, tmp_path / "ws")
        assert first == second
        assert tree_hash(second) == hash_one

    def test_missing_source_root(self, tmp_path):
        dataset = self.make_dataset(tmp_path)
        bad = ProjectVersion("x", "2", LocalPath("proj"), ("nosuch",))
        with pytest.raises(CheckoutError, match="nosuch"):
            checkout(bad, Dataset(dataset.root, (bad,), ()), tmp_path / "ws")

    def _git(self, *args, cwd):
        subprocess.run(
            ["git", *args],
            cwd=cwd,
            check=True,
            capture_output=True,
            env={
                "GIT_AUTHOR_NAME": "t",
                "GIT_AUTHOR_EMAIL": "t@x",
                "GIT_COMMITTER_NAME": "t",
                "GIT_COMMITTER_EMAIL": "t@x",
                "PATH": "/usr/bin:/bin:/usr/local/bin",
            },
        )

    def test_git_checkout_detached_at_commit(self, tmp_path):
        repo = tmp_path / "origin"
        (repo / "src").mkdir(parents=True)
        (repo / "src" / "B.java").write_text("class B { }\n")
        self._git("init", "-q", cwd=repo)
        self._git("add", ".", cwd=repo)
        self._git("commit", "-q", "-m", "seed", cwd=repo)
        commit = subprocess.run(
            ["git", "rev-parse", "HEAD"], cwd=repo, capture_output=True, text=True, check=True
        ).stdout.strip()
        version = ProjectVersion("g", "1", GitRepo(str(repo), commit), ("src",))
        dataset = Dataset(root=tmp_path, versions=(version,), misuses=())
        work = checkout(version, dataset, tmp_path / "ws")
        assert (work / "src" / "B.java").is_file()
        head = subprocess.run(
            ["git", "-C", str(work), "rev-parse", "HEAD"], capture_output=True, text=True
        ).stdout.strip()
        assert head == commit
        # cache hit second time
        assert checkout(version, dataset, tmp_path / "ws") == work

    def test_git_bad_commit_named_in_error(self, tmp_path):
        repo = tmp_path / "origin"
        (repo / "src").mkdir(parents=True)
        (repo / "src" / "B.java").write_text("class B { }\n")
        self._git("init", "-q", cwd=repo)
        self._git("add", ".", cwd=repo)
        self._git("commit", "-q", "-m", "seed", cwd=repo)
        missing = "0" * 40
        version = ProjectVersion("g", "2", GitRepo(str(repo), missing), ("src",))
        with pytest.raises(CheckoutError, match=missing):
            checkout(version, Dataset(tmp_path, (version,), ()), tmp_path / "ws")


class TestPotentialHits:
    def test_same_file_and_method(self):
        hits = match_potential_hits(
            [finding_at("src/A.java", "parse")], [misuse_at("m1", "src/A.java", "parse")]
        )
        assert [(h.misuse_id, h.ambiguous) for h in hits] == [("m1", False)]

    def test_same_file_different_method(self):
        hits = match_potential_hits(
            [finding_at("src/A.java", "parse")], [misuse_at("m1", "src/A.java", "other")]
        )
        assert hits == []

    def test_overloads_match_both_and_flag_ambiguity(self):
        misuses = [
            misuse_at("m-int", "src/A.java", "foo(int)"),
            misuse_at("m-str", "src/A.java", "foo(String)"),
        ]
        hits = match_potential_hits([finding_at("src/A.java", "foo")], misuses)
        assert sorted(h.misuse_id for h in hits) == ["m-int", "m-str"]
        assert all(h.ambiguous for h in hits)

    def test_path_normalization(self):
        hits = match_potential_hits(
            [finding_at("src/A.java", "m")], [misuse_at("m1", "./src/A.java".lstrip("./") or "src/A.java", "m")]
        )
        assert len(hits) == 1

    def test_input_order_invariance(self):
        findings = [finding_at("src/A.java", "m"), finding_at("src/B.java", "n")]
        misuses = [misuse_at("m1", "src/B.java", "n"), misuse_at("m2", "src/A.java", "m")]
        forward = {(h.finding.location.file_path, h.misuse_id) for h in match_potential_hits(findings, misuses)}
        backward = {
            (h.finding.location.file_path, h.misuse_id)
            for h in match_potential_hits(list(reversed(findings)), list(reversed(misuses)))
        }
        assert forward == backward == {("src/A.java", "m2"), ("src/B.java", "m1")}


class TestExperimentP:
    def planted_corpus(self, families=20):
        """Independent api families of 50 clean usages plus one deviation.

        Every deviation gets flagged; only the first three are planted
        misuses, the rest are legitimate-but-uncommon usages the reviewers
        will reject, mirroring how false positives dominate top findings.
        """
        def family_model(method, calls, type_name, file):
            events = tuple(UsageEvent.call("x", MethodSignature(c), 1) for c in calls)
            return MethodUsageModel(
                SourceLocation("p", "v", file, method, 1), (("x", type_name),), events
            )

        corpus = []
        for fam in range(families):
            type_name = f"T{fam:02d}"
            corpus.extend(
                family_model(f"ok{fam:02d}x{i:02d}", [f"a{fam}", f"b{fam}"], type_name, f"Clean{fam:02d}x{i:02d}.java")
                for i in range(50)
            )
            corpus.append(
                family_model(f"dev{fam:02d}", [f"a{fam}"], type_name, f"Dev{fam:02d}.java")
            )
        return corpus

    def test_planted_precision_is_three_of_twenty(self):
        corpus = {("p", "v"): self.planted_corpus()}
        result = run_experiment_p(["type-usage"], corpus, top_n=20)
        findings = result.findings[("type-usage", ("p", "v"))]
        assert len(findings) == 20
        assert all(f.score == 1.0 for f in findings)
        # Reviewers confirm the three planted misuses, reject the other 17:
        planted = {"dev00", "dev01", "dev02"}
        confirmed = sum(1 for f in findings if f.location.method_name in planted)
        assert confirmed == 3
        from misuselab.benchmark.metrics import percent, precision

        assert percent(precision(confirmed, len(findings))) == "15.0%"

    def test_fewer_findings_than_top_n_all_reviewed(self):
        corpus = {("p", "v"): self.planted_corpus(families=7)}
        result = run_experiment_p(["type-usage"], corpus, top_n=20)
        assert len(result.findings[("type-usage", ("p", "v"))]) == 7

    def test_failures_do_not_abort(self):
        corpus = {("p", "v"): self.planted_corpus(families=2)}
        result = run_experiment_p(["call-set", "type-usage"], corpus, timeout_seconds=0)
        assert not result.ok
        assert all(r.status == "timeout" for r in result.runs)


class TestExperimentRub:
    def test_missing_call_produces_potential_hit(self):
        misuse_models = [model("work", {"x": ["open"]}, file="src/Bad.java")]
        crafted = [model("work", {"x": ["open", "close"]}, file="crafted/fix.java")]
        result = run_experiment_rub(
            "type-usage", misuse_at("m1", "src/Bad.java", "work"), misuse_models, crafted
        )
        assert result.hit
        assert result.findings[0].score == 1.0

    def test_corpus_has_distinct_copy_ids(self):
        crafted = [model("work", {"x": ["a", "b"]}, file="crafted/fix.java")]
        corpus = rub_corpus([], crafted, copies=50)
        assert len({m.location.version_id for m in corpus}) == 50

    def test_redundant_call_misuse_not_hit_by_any_detector(self):
        misuse_models = [model("work", {"x": ["open", "reset", "close"]}, file="src/Bad.java")]
        crafted = [model("work", {"x": ["open", "close"]}, file="crafted/fix.java")]
        misuse = misuse_at(
            "m1", "src/Bad.java", "work", labels=frozenset({MucLabel.from_key("redundant/method-call")})
        )
        for detector in ("call-set", "call-pair", "type-usage", "temporal"):
            result = run_experiment_rub(detector, misuse, misuse_models, crafted)
            assert not result.hit, detector


class TestExperimentR:
    def test_rub_hit_without_project_usages_is_not_an_r_hit(self):
        # The project contains one correct usage, far below mining support:
        # RUB finds the misuse thanks to the crafted copies, R does not.
        misuse_models = [model("work", {"x": ["open"]}, file="src/Bad.java")]
        crafted = [model("work", {"x": ["open", "close"]}, file="crafted/fix.java")]
        misuse = misuse_at("m1", "src/Bad.java", "work")
        rub = run_experiment_rub("call-set", misuse, misuse_models, crafted)
        assert rub.hit

        project_models = misuse_models + [
            model("fine", {"x": ["open", "close"]}, file="src/Fine.java")
        ]
        result = run_experiment_r(["call-set"], {("p", "v"): project_models}, [misuse])
        assert result.potential_hits == ()

    def test_detection_failure_recorded(self):
        result = run_experiment_r(
            ["call-set"],
            {("p", "v"): [model("m", {"x": ["a"]})]},
            [],
            configs={"call-set": __import__("misuselab.detectors", fromlist=["default_config"]).default_config("call-set", min_support=1)},
        )
        assert result.runs[0].status == "error"
