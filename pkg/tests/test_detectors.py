import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from misuselab.detectors import (
    ErrorMarker,
    RankedFindings,
    TimeoutMarker,
    conviction,
    default_config,
    detect_call_pairs,
    detect_call_set,
    detect_temporal,
    detect_type_usage,
    pattern_uniqueness,
    run_detector,
    strangeness,
)
from misuselab.mining import Transaction, mine_closed_frequent
from misuselab.model import (
    MethodSignature,
    MethodUsageModel,
    Pattern,
    SourceLocation,
    UsageEvent,
)


def model(method, calls_by_object, file="F.java", line=1, project="p", version="v"):
    events, objects = [], []
    for ref, call_names in calls_by_object.items():
        objects.append((ref, "T"))
        for offset, name in enumerate(call_names):
            events.append(UsageEvent.call(ref, MethodSignature(name), line + offset))
    return MethodUsageModel(
        SourceLocation(project, version, file, method, line), tuple(objects), tuple(events)
    )


def corpus(spec_list):
    return [
        model(f"m{i}", calls, file=f"F{i}.java") for i, calls in enumerate(spec_list)
    ]


class TestCallSetDetector:
    def test_single_rare_violation_found(self):
        models = corpus([{"x": ["open", "close"]}] * 50 + [{"x": ["open"]}])
        result = detect_call_set(models, default_config("call-set"))
        assert [sorted(f.missing_facts) for f in result.findings] == [["close"]]
        finding = result.findings[0]
        assert finding.pattern.support == 50
        assert finding.score == 50.0
        assert finding.location.method_name == "m50"

    def test_rarity_threshold_suppresses_common_deviations(self):
        models = corpus([{"x": ["open", "close"]}] * 50 + [{"x": ["open"]}] * 10)
        result = detect_call_set(models, default_config("call-set"))
        assert result.findings == ()  # 50/10 = 5 < 10

    def test_interprocedural_pruning(self):
        # The missing call happens inside a directly called helper.
        models = corpus([{"x": ["open", "close"]}] * 50)
        violator = model("useConn", {"x": ["open", "helper"]}, file="V.java")
        helper = model("helper", {"y": ["close"]}, file="V.java", line=30)
        with_depth = default_config("call-set", interprocedural_depth=3)
        without_depth = default_config("call-set")
        all_models = models + [violator, helper]
        assert any(
            f.location.method_name == "useConn"
            for f in detect_call_set(all_models, without_depth).findings
        )
        assert not any(
            f.location.method_name == "useConn"
            for f in detect_call_set(all_models, with_depth).findings
        )

    def test_min_support_precondition(self):
        with pytest.raises(ValueError):
            detect_call_set([], default_config("call-set", min_support=1))


def pair_model(method, pairs_by_object, file="F.java"):
    """Build a model whose per-object pair projection equals the given pairs
    by laying calls out linearly (works for transitive-closed pair sets)."""
    calls_by_object = {}
    for ref, sequence in pairs_by_object.items():
        calls_by_object[ref] = sequence
    return model(method, calls_by_object, file=file)


class TestCallPairDetector:
    def test_no_shared_fact_means_no_finding(self):
        # Pattern and usage without common facts are unrelated code.
        models = [
            pair_model(f"m{i}", {"x": ["hasNext", "next"]}, file=f"F{i}.java")
            for i in range(50)
        ]
        lone = model("m99", {"x": ["remove"]}, file="Lone.java")
        result = detect_call_pairs(models + [lone], default_config("call-pair"))
        assert result.findings == ()

    def test_scoring_u_s_over_v(self):
        models = [
            pair_model(f"m{i}", {"x": ["a", "b", "c"]}, file=f"F{i}.java")
            for i in range(50)
        ]
        violator = pair_model("m99", {"x": ["a", "b"]}, file="V.java")
        result = detect_call_pairs(models + [violator], default_config("call-pair"))
        assert len(result.findings) == 1
        finding = result.findings[0]
        # s = 50, v = 1, u = 1 (the closed subset pattern does not compete)
        assert finding.score == 50.0
        assert sorted(finding.missing_facts) == ["a>c", "b>c"]

    def test_max_missing_facts_cut_off(self):
        models = [
            pair_model(f"m{i}", {"x": ["a", "b", "c", "d"]}, file=f"F{i}.java")
            for i in range(50)
        ]
        # Violator shares only (a, b): misses 5 of 6 pattern pairs.
        violator = pair_model("m99", {"x": ["a", "b"]}, file="V.java")
        result = detect_call_pairs(models + [violator], default_config("call-pair"))
        assert result.findings == ()

    def test_uniqueness_floor(self):
        shared = Pattern(frozenset({"p", "q"}), 10, frozenset(f"t{i}" for i in range(10)))
        competitor = Pattern(frozenset({"p", "r"}), 10, frozenset(f"u{i}" for i in range(10)))
        assert pattern_uniqueness(shared, [shared, competitor]) == 0.5
        full_overlap = Pattern(frozenset({"p"}), 12, frozenset(f"v{i}" for i in range(12)))
        # A subset pattern does not compete; floor still applies elsewhere.
        assert pattern_uniqueness(shared, [shared, full_overlap]) == 1.0


class TestTypeUsageDetector:
    def test_strangeness_formula_edges(self):
        assert strangeness(0, 50) == 1.0
        assert strangeness(5, 0) == 0.0
        assert strangeness(1, 49) == pytest.approx(0.98)
        assert strangeness(0, 0) == 0.0

    def test_threshold_is_strictly_greater(self):
        # |E|=3, |A|=97 gives exactly 0.97: not reported.
        models = corpus(
            [{"x": ["a"]}] * 4 + [{"x": ["a", "b"]}] * 97
        )
        config = default_config("type-usage")
        result = detect_type_usage(models, config)
        assert all(f.score > 0.97 for f in result.findings)
        assert not any(f.location.method_name == "m0" for f in result.findings)

    def test_report_above_threshold(self):
        models = corpus([{"x": ["a"]}] * 2 + [{"x": ["a", "b"]}] * 49)
        result = detect_type_usage(models, default_config("type-usage"))
        # E=1, A=49: strangeness 1 - 1/50 = 0.98 > 0.97.
        reported = [f for f in result.findings if f.location.method_name in ("m0", "m1")]
        assert len(reported) == 2
        assert all(f.score == pytest.approx(0.98) for f in reported)
        assert all(sorted(f.missing_facts) == ["b"] for f in reported)

    def test_empty_missing_set_filtered(self):
        # Almost-similar usages always contribute one extra method, so an
        # empty candidate set cannot arise here; assert the filter anyway.
        models = corpus([{"x": ["a"]}] + [{"x": ["a", "b"]}] * 60)
        for finding in detect_type_usage(models, default_config("type-usage")).findings:
            assert finding.missing_facts

    def test_type_separation(self):
        # Same call sets on different receiver types never compare.
        a_models = corpus([{"x": ["a", "b"]}] * 30)
        strange = model("odd", {"x": ["a"]}, file="Odd.java")
        for m in a_models:
            assert m.objects[0][1] == "T"
        other_type = MethodUsageModel(
            SourceLocation("p", "v", "O.java", "other"),
            (("y", "U"),),
            (UsageEvent.call("y", MethodSignature("a")),),
        )
        result = detect_type_usage(a_models + [strange, other_type], default_config("type-usage"))
        assert [f.location.method_name for f in result.findings] == ["odd"]

    def test_subtype_aware_grouping(self):
        models = corpus([{"x": ["a", "b"]}] * 50)
        sub = MethodUsageModel(
            SourceLocation("p", "v", "S.java", "subber"),
            (("y", "SubT"),),
            (UsageEvent.call("y", MethodSignature("a")),),
        )
        flat = detect_type_usage(models + [sub], default_config("type-usage"))
        assert flat.findings == ()
        aware = detect_type_usage(
            models + [sub],
            default_config(
                "type-usage", subtype_aware=True, type_hierarchy=(("SubT", "T"),)
            ),
        )
        assert [f.location.method_name for f in aware.findings] == ["subber"]


class TestTemporalDetector:
    def test_violation_with_unrelated_context_has_finite_conviction(self):
        writers = corpus([{"w": ["write", "close"]}] * 30)
        violator = model("m98", {"w": ["write"]}, file="V.java")
        unrelated = corpus([{"z": ["log"]}] * 10)
        for i, m in enumerate(unrelated):
            unrelated[i] = model(f"u{i}", {"z": ["log"]}, file=f"U{i}.java")
        result = detect_temporal(
            writers + [violator] + unrelated, default_config("temporal", min_support=20)
        )
        assert len(result.findings) == 1
        score = result.findings[0].score
        assert math.isfinite(score) and score > 1.0

    def test_conviction_edge_cases(self):
        assert conviction(Fraction(0), Fraction(0)) == 1.0
        assert conviction(Fraction(1, 2), Fraction(1)) == math.inf
        assert conviction(Fraction(30, 41), Fraction(30, 31)) == pytest.approx(341 / 41)

    def test_conviction_is_one_without_unrelated_transactions(self):
        # The violating transaction itself contains P but not M, so conf
        # stays below 1 and, with P universal otherwise, conviction is
        # exactly (1 - supp(M)) / (1 - conf) = 1.
        writers = corpus([{"w": ["write", "close"]}] * 30)
        violator = model("m98", {"w": ["write"]}, file="V.java")
        result = detect_temporal(writers + [violator], default_config("temporal", min_support=20))
        assert [f.score for f in result.findings] == [1.0]

    def test_unguarded_writer_missing_exception_fact(self):
        from misuselab.extract import parse_method_models

        guarded = """
        class Guarded { void persist(Writer w, String v) {
            try { w.write(v); } finally { w.close(); } } }
        """
        unguarded = """
        class Unguarded { void persist(Writer w, String v) {
            w.write(v); w.close(); } }
        """
        copies = []
        for i in range(50):
            copies.extend(
                parse_method_models(guarded, f"copies/G{i}.java", "p", f"c{i}")
            )
        victim = parse_method_models(unguarded, "src/U.java", "p", "v")
        result = detect_temporal(
            victim + copies, default_config("temporal", min_support=50)
        )
        assert len(result.findings) == 1
        assert set(result.findings[0].missing_facts) == {"exc:write<close"}


class TestInvariants:
    def build_mixed_corpus(self):
        return (
            corpus([{"x": ["open", "close"]}] * 25 + [{"x": ["open"]}])
            + [model(f"w{i}", {"w": ["write", "close", "flush"]}, file=f"W{i}.java") for i in range(25)]
            + [model("w99", {"w": ["write", "close"]}, file="W99.java")]
        )

    def test_determinism_across_runs(self):
        models = self.build_mixed_corpus()
        for detect, det in [
            (detect_call_set, "call-set"),
            (detect_call_pairs, "call-pair"),
            (detect_type_usage, "type-usage"),
            (detect_temporal, "temporal"),
        ]:
            config = default_config(det, min_support=20)
            assert detect(models, config) == detect(models, config)

    def test_no_self_violation(self):
        # A usage containing all pattern facts is never reported against it.
        models = self.build_mixed_corpus()
        for detect, det in [
            (detect_call_set, "call-set"),
            (detect_call_pairs, "call-pair"),
            (detect_temporal, "temporal"),
        ]:
            config = default_config(det, min_support=20)
            for finding in detect(models, config).findings:
                assert finding.missing_facts or finding.redundant_facts

    def test_missing_fact_counts_bounded(self):
        models = self.build_mixed_corpus()
        for detect, det, bound in [
            (detect_call_pairs, "call-pair", 2),
            (detect_temporal, "temporal", 2),
        ]:
            config = default_config(det, min_support=20)
            for finding in detect(models, config).findings:
                assert 1 <= len(finding.missing_facts) <= bound
        for finding in detect_call_set(models, default_config("call-set", min_support=20)).findings:
            assert len(finding.missing_facts) >= 1

    @given(st.integers(0, 60), st.integers(0, 60), st.integers(0, 3))
    def test_strangeness_monotonicity(self, e, a, delta):
        if e + a == 0:
            return
        assert 0.0 <= strangeness(e, a) <= 1.0
        assert strangeness(e + delta, a) <= strangeness(e, a)
        if a + delta > 0:
            assert strangeness(e, a + delta) >= strangeness(e, a)


class TestRunner:
    def test_unknown_detector_lists_valid_names(self):
        with pytest.raises(ValueError, match="call-pair, call-set, temporal, type-usage"):
            run_detector("bogus", [], default_config("call-set"))

    def test_zero_timeout_forces_marker(self):
        outcome = run_detector("type-usage", [], default_config("type-usage"), 0)
        assert isinstance(outcome, TimeoutMarker)

    def test_generous_timeout_returns_findings(self):
        models = corpus([{"x": ["a", "b"]}] * 30 + [{"x": ["a"]}])
        outcome = run_detector(
            "type-usage", models, default_config("type-usage"), timeout_seconds=60
        )
        assert isinstance(outcome, RankedFindings)
        assert len(outcome.findings) == 1

    def test_crash_becomes_error_marker(self):
        # min_support below the call-set precondition triggers a ValueError
        # inside the worker, which must surface as an error marker.
        outcome = run_detector(
            "call-set", [], default_config("call-set", min_support=1), timeout_seconds=60
        )
        assert isinstance(outcome, ErrorMarker)
        assert "min_support" in outcome.message

    def test_hanging_detector_cancelled(self):
        # A corpus large enough to take a while; 1 ms must cut it off.
        models = corpus([{f"x": [f"c{j}" for j in range(8)]} for _ in range(400)])
        outcome = run_detector(
            "temporal", models, default_config("temporal", min_support=2), timeout_seconds=0.001
        )
        assert isinstance(outcome, TimeoutMarker)


class TestRubIsolation:
    def test_patterns_supported_exclusively_by_copies(self):
        from misuselab.benchmark.experiments import is_crafted_copy, rub_corpus

        misuse_models = [model("bad", {"x": ["open"]}, file="src/Bad.java")]
        crafted = [model("bad", {"x": ["open", "close"]}, file="crafted/Fix.java")]
        corpus_models = rub_corpus(misuse_models, crafted, copies=50)
        transactions = [
            Transaction(f"t{i}", frozenset(e.signature.name for e in m.calls()))
            for i, m in enumerate(corpus_models)
        ]
        eligible = [
            t
            for t, m in zip(transactions, corpus_models)
            if is_crafted_copy(m.location)
        ]
        copy_ids = {t.id for t in eligible}
        for pattern in mine_closed_frequent(eligible, 50):
            assert pattern.supporting_ids <= copy_ids
