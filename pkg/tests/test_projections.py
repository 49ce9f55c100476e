import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misuselab.extract import (
    FactsFileError,
    UnknownObjectError,
    load_facts_file,
    parse_method_models,
    to_call_pairs,
    to_call_set,
    to_temporal_facts,
    to_type_usages,
    write_facts_file,
)
from misuselab.extract.projections import TemporalFact, TemporalKind
from misuselab.model import (
    MethodSignature,
    MethodUsageModel,
    SourceLocation,
    UsageEvent,
)


def extract_one(body: str, params: str = "Iterator it"):
    source = f"class Fixture {{ void run({params}) {{ {body} }} }}"
    return parse_method_models(source, "Fixture.java", "p", "v")[0]


def names(signatures):
    return sorted(s.name for s in signatures)


def pair_names(pairs):
    return sorted((a.name, b.name) for a, b in pairs)


def fact_strings(facts):
    rendered = []
    for fact in facts:
        if fact.kind is TemporalKind.MUST_CALL:
            rendered.append(f"call {fact.first.name}")
        else:
            rendered.append(f"{fact.kind.value} {fact.first.name}<{fact.second.name}")
    return sorted(rendered)


class TestCallSet:
    def test_union_over_receivers(self):
        model = extract_one("a.open(); a.close(); b.log();", params="Res a, Log b")
        assert names(to_call_set(model).calls) == ["close", "log", "open"]

    def test_duplicates_collapse(self):
        model = extract_one("a.add(x); a.add(y);", params="List a, int x, int y")
        assert names(to_call_set(model).calls) == ["add"]

    def test_empty_model(self):
        model = extract_one("int x = 0;", params="int y")
        assert to_call_set(model).calls == frozenset()


class TestCallPairs:
    def test_single_ordering(self):
        model = extract_one("it.hasNext(); it.next();")
        assert pair_names(to_call_pairs(model, "it").pairs) == [("hasNext", "next")]

    def test_loop_yields_self_order_pair(self):
        # Hand enumeration of the once-unrolled loop:
        #   zero iterations -> ()
        #   one iteration   -> (hasNext, next)
        #   unrolled once   -> (hasNext, next, hasNext, next)
        # so the pair set must contain (hasNext, next) and the self-order
        # pair (hasNext, hasNext) that missing-iteration detection needs.
        model = extract_one("while (it.hasNext()) { it.next(); }")
        pairs = pair_names(to_call_pairs(model, "it").pairs)
        assert ("hasNext", "next") in pairs
        assert ("hasNext", "hasNext") in pairs

    def test_single_call_no_pairs(self):
        model = extract_one("it.next();")
        assert to_call_pairs(model, "it").pairs == frozenset()

    def test_unknown_object_rejected(self):
        model = extract_one("it.next();")
        with pytest.raises(UnknownObjectError):
            to_call_pairs(model, "nope")

    def test_exclusive_branches_never_pair(self):
        model = extract_one(
            "c.open(); if (ok) { c.send(); } else { c.keepAlive(); }",
            params="Conn c, boolean ok",
        )
        pairs = pair_names(to_call_pairs(model, "c").pairs)
        assert pairs == [("open", "keepAlive"), ("open", "send")]


class TestTypeUsages:
    def test_receiver_type_from_declaration(self):
        model = extract_one("it.hasNext(); it.next();")
        usages = to_type_usages(model)
        assert len(usages) == 1
        assert usages[0].receiver_type == "Iterator"
        assert names(usages[0].calls) == ["hasNext", "next"]

    def test_one_usage_per_object(self):
        model = extract_one("a.open(); b.log();", params="Res a, Log b")
        assert len(to_type_usages(model)) == 2

    def test_chained_receiver_usage_is_unknown_typed(self):
        model = extract_one("o.getX().m();", params="Box o")
        types = sorted(u.receiver_type for u in to_type_usages(model))
        assert types == ["?", "Box"]


class TestTemporalFacts:
    def test_guarded_writer_has_exception_fact(self):
        model = extract_one(
            "try { w.write(v); } finally { w.close(); }", params="Writer w, String v"
        )
        assert fact_strings(to_temporal_facts(model, "w")) == [
            "call close",
            "call write",
            "exc write<close",
            "order write<close",
        ]

    def test_unguarded_writer_lacks_exception_fact(self):
        model = extract_one("w.write(v); w.close();", params="Writer w, String v")
        assert fact_strings(to_temporal_facts(model, "w")) == [
            "call close",
            "call write",
            "order write<close",
        ]

    def test_single_call(self):
        model = extract_one("w.flush();", params="Writer w")
        assert fact_strings(to_temporal_facts(model, "w")) == ["call flush"]

    def test_binary_facts_reject_equal_signatures(self):
        with pytest.raises(ValueError):
            TemporalFact.precedes(MethodSignature("m"), MethodSignature("m"))

    def test_precedes_requires_a_witnessing_path(self):
        # a() and b() on exclusive branches never co-occur, so neither
        # ordering fact may appear.
        model = extract_one(
            "if (ok) { x.a(); } else { x.b(); }", params="Thing x, boolean ok"
        )
        assert fact_strings(to_temporal_facts(model, "x")) == ["call a", "call b"]


class TestProjectionProperties:
    BODIES = [
        ("it.hasNext(); it.next();", "Iterator it"),
        ("while (it.hasNext()) { it.next(); }", "Iterator it"),
        ("try { w.write(v); } finally { w.close(); }", "Writer w, String v"),
        ("c.open(); if (ok) { c.send(); } else { c.keepAlive(); }", "Conn c, boolean ok"),
        ("a.x(); b.y(); a.z();", "P a, Q b"),
    ]

    def test_projections_are_pure(self):
        for body, params in self.BODIES:
            first, second = extract_one(body, params), extract_one(body, params)
            assert first == second
            assert to_call_set(first) == to_call_set(second)
            for ref, _ in first.objects:
                assert to_call_pairs(first, ref) == to_call_pairs(second, ref)
                assert to_temporal_facts(first, ref) == to_temporal_facts(second, ref)

    def test_precedes_implies_pair(self):
        for body, params in self.BODIES:
            model = extract_one(body, params)
            for ref, _ in model.objects:
                pairs = to_call_pairs(model, ref).pairs
                for fact in to_temporal_facts(model, ref):
                    if fact.kind is TemporalKind.PRECEDES:
                        assert (fact.first, fact.second) in pairs


# --- facts file --------------------------------------------------------------


def location(i=0):
    return SourceLocation("p", "v", f"src/F{i}.java", "m", i + 1)


models_strategy = st.lists(
    st.builds(
        lambda i, n_calls: MethodUsageModel(
            location(i),
            (("x", "T"),),
            tuple(
                UsageEvent.call("x", MethodSignature(f"m{k}"), line=k + 1)
                for k in range(n_calls)
            ),
            exceptional_successors=frozenset(
                {(0, n_calls - 1)} if n_calls >= 2 else set()
            ),
        ),
        i=st.integers(0, 5),
        n_calls=st.integers(0, 4),
    ),
    max_size=6,
)


class TestFactsFile:
    @settings(max_examples=50, deadline=None)
    @given(models_strategy)
    def test_round_trip_identity(self, models):
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "facts.jsonl"
            write_facts_file(models, path)
            assert load_facts_file(path) == list(models)

    def test_empty_list_writes_header_only(self, tmp_path):
        path = tmp_path / "facts.jsonl"
        write_facts_file([], path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 and "usage-facts" in lines[0]
        assert load_facts_file(path) == []

    def test_extracted_models_round_trip(self, tmp_path):
        source = """
        class Rich {
            void work(Writer w, Iterator it, String v) {
                while (it.hasNext()) { it.next(); }
                try { w.write(v); } finally { w.close(); }
            }
        }
        """
        models = parse_method_models(source, "Rich.java", "p", "v")
        path = tmp_path / "facts.jsonl"
        write_facts_file(models, path)
        assert load_facts_file(path) == models

    def test_corrupt_line_reports_line_number(self, tmp_path):
        path = tmp_path / "facts.jsonl"
        write_facts_file(parse_method_models("class A { void m(X x) { x.go(); } }", "A.java"), path)
        lines = path.read_text().splitlines()
        lines.insert(1, "{not json")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(FactsFileError, match=":2"):
            load_facts_file(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "facts.jsonl"
        path.write_text('{"location": {}}\n')
        with pytest.raises(FactsFileError, match=":1"):
            load_facts_file(path)
