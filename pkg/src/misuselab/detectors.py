"""Four pattern-mining misuse detectors behind one interface.

* ``call-set``: frequent sets of called method names; a usage violating a
  pattern must share facts with it and be sufficiently rarer.
* ``call-pair``: per-object call-order pairs, scored by u*s/v.
* ``type-usage``: exactly/almost-similar type usages, scored by strangeness.
* ``temporal``: per-object must-call/ordering formulae, scored by the
  conviction of the association between present and missing facts.

All detectors are pure functions of (models, config); ``run_detector``
adds wall-clock timeout and crash capture in a worker process.
"""

from __future__ import annotations

import multiprocessing
import queue as queue_module
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .extract.projections import (
    TemporalKind,
    to_call_pairs,
    to_call_set,
    to_temporal_facts,
)
from .mining import Transaction, mine_closed_frequent
from .model import (
    INFINITE,
    Finding,
    MethodSignature,
    MethodUsageModel,
    Pattern,
    SignatureMode,
    SourceLocation,
)

PatternSource = Callable[[SourceLocation], bool]


@dataclass(frozen=True, slots=True)
class DetectorConfig:
    min_support: int
    rarity_factor: float = 10.0
    max_missing_facts: int = 2
    strangeness_threshold: float = 0.97
    signature_mode: SignatureMode = SignatureMode.NAME_ONLY
    interprocedural_depth: int = 0
    subtype_aware: bool = False
    type_hierarchy: tuple[tuple[str, str], ...] = ()  # (subtype, supertype)

    def __post_init__(self) -> None:
        if self.min_support < 1:
            raise ValueError("min_support must be positive")
        if self.rarity_factor <= 0:
            raise ValueError("rarity_factor must be positive")
        if self.max_missing_facts < 0:
            raise ValueError("max_missing_facts must be non-negative")
        if not (0.0 <= self.strangeness_threshold <= 1.0):
            raise ValueError("strangeness_threshold must be in [0, 1]")
        if self.interprocedural_depth < 0:
            raise ValueError("interprocedural_depth must be non-negative")


DEFAULT_MIN_SUPPORT: Mapping[str, int] = {
    "call-set": 15,
    "call-pair": 20,
    "type-usage": 1,  # unused: no mining stage
    "temporal": 20,
}


def default_config(detector_id: str, **overrides) -> DetectorConfig:
    if detector_id not in DEFAULT_MIN_SUPPORT:
        raise ValueError(_unknown_detector_message(detector_id))
    config = DetectorConfig(min_support=DEFAULT_MIN_SUPPORT[detector_id])
    return replace(config, **overrides) if overrides else config


@dataclass(frozen=True, slots=True)
class RankedFindings:
    detector_id: str
    findings: tuple[Finding, ...]

    def top(self, n: int) -> tuple[Finding, ...]:
        return self.findings[:n]


@dataclass(frozen=True, slots=True)
class TimeoutMarker:
    detector_id: str
    elapsed_seconds: float


@dataclass(frozen=True, slots=True)
class ErrorMarker:
    detector_id: str
    message: str
    elapsed_seconds: float


DetectorOutcome = RankedFindings | TimeoutMarker | ErrorMarker


@dataclass(frozen=True, slots=True)
class _Usage:
    id: str
    location: SourceLocation
    items: frozenset[str]
    object_ref: str | None = None
    receiver_type: str | None = None
    first_call_line: int | None = None


def _usage_ids(models: Sequence[MethodUsageModel]) -> list[str]:
    counters: dict[tuple[str, str], int] = {}
    ids = []
    for model in models:
        key = (model.location.file_path, model.location.method_name)
        seq = counters.get(key, 0)
        counters[key] = seq + 1
        ids.append(f"{key[0]}#{key[1]}#{seq}")
    return ids


def _rank(detector_id: str, findings: Iterable[Finding]) -> RankedFindings:
    return RankedFindings(detector_id, tuple(sorted(findings, key=Finding.sort_key)))


def _mining_input(usages: Sequence[_Usage], pattern_source: PatternSource | None) -> list[Transaction]:
    return [
        Transaction(u.id, u.items)
        for u in usages
        if pattern_source is None or pattern_source(u.location)
    ]


def _metadata(usage: _Usage) -> dict[str, str]:
    metadata = {}
    if usage.object_ref is not None:
        metadata["object"] = usage.object_ref
    if usage.receiver_type is not None:
        metadata["receiver_type"] = usage.receiver_type
    if usage.first_call_line is not None:
        metadata["first_call_line"] = str(usage.first_call_line)
    return metadata


# --- call-set detector ------------------------------------------------------


def _call_set_usages(models: Sequence[MethodUsageModel], mode: SignatureMode) -> list[_Usage]:
    usages = []
    for usage_id, model in zip(_usage_ids(models), models):
        call_set = to_call_set(model)
        calls = model.calls()
        usages.append(
            _Usage(
                id=usage_id,
                location=model.location,
                items=frozenset(sig.token(mode) for sig in call_set.calls),
                first_call_line=calls[0].line if calls else None,
            )
        )
    return usages


def _reachable_call_tokens(
    models: Sequence[MethodUsageModel],
    start_method: str,
    depth: int,
    mode: SignatureMode,
) -> frozenset[str]:
    """Call tokens of methods reachable from ``start_method`` in a name-based
    call graph, following call paths up to ``depth`` levels."""
    calls_by_method: dict[str, set[str]] = {}
    tokens_by_method: dict[str, set[str]] = {}
    for model in models:
        name = model.location.method_name
        calls_by_method.setdefault(name, set()).update(e.signature.name for e in model.calls())
        tokens_by_method.setdefault(name, set()).update(
            e.signature.token(mode) for e in model.calls()
        )
    reachable: set[str] = set()
    frontier = {start_method}
    for _ in range(depth):
        next_frontier: set[str] = set()
        for method in frontier:
            for callee in calls_by_method.get(method, ()):
                if callee in tokens_by_method and callee not in reachable:
                    reachable.add(callee)
                    next_frontier.add(callee)
        frontier = next_frontier
    tokens: set[str] = set()
    for method in reachable:
        tokens.update(tokens_by_method.get(method, ()))
    return frozenset(tokens)


def violating_usage_count(usages: Sequence[_Usage], shared: frozenset[str], pattern: Pattern) -> int:
    """Number of usages containing the shared facts but not the pattern.

    Isolated so the occurrence-count interpretation can be swapped out in
    experiments.
    """
    return sum(1 for u in usages if shared <= u.items and not pattern.items <= u.items)


def detect_call_set(
    models: Sequence[MethodUsageModel],
    config: DetectorConfig,
    pattern_source: PatternSource | None = None,
) -> RankedFindings:
    if config.min_support < 2:
        raise ValueError("call-set detection requires min_support >= 2")
    usages = _call_set_usages(models, config.signature_mode)
    patterns = mine_closed_frequent(_mining_input(usages, pattern_source), config.min_support)
    findings = []
    for usage in usages:
        for pattern in patterns:
            shared = usage.items & pattern.items
            if not shared or shared == pattern.items:
                continue
            violators = violating_usage_count(usages, shared, pattern)
            if violators == 0 or pattern.support / violators < config.rarity_factor:
                continue
            missing = pattern.items - usage.items
            if config.interprocedural_depth > 0:
                helper_tokens = _reachable_call_tokens(
                    models,
                    usage.location.method_name,
                    config.interprocedural_depth,
                    config.signature_mode,
                )
                if missing <= helper_tokens:
                    continue
            findings.append(
                Finding(
                    detector_id="call-set",
                    location=usage.location,
                    score=float(pattern.support),
                    pattern=pattern,
                    present_facts=shared,
                    missing_facts=missing,
                    metadata=_metadata(usage),
                )
            )
    return _rank("call-set", findings)


# --- call-pair detector -----------------------------------------------------


def _object_usages(
    models: Sequence[MethodUsageModel],
    facts_for: Callable[[MethodUsageModel, str], frozenset[str]],
) -> list[_Usage]:
    usages = []
    for usage_id, model in zip(_usage_ids(models), models):
        for object_ref, type_name in model.objects:
            calls = model.calls(object_ref)
            if not calls:
                continue
            usages.append(
                _Usage(
                    id=f"{usage_id}#{object_ref}",
                    location=model.location,
                    items=facts_for(model, object_ref),
                    object_ref=object_ref,
                    receiver_type=type_name,
                    first_call_line=calls[0].line,
                )
            )
    return usages


def _pair_token(pair: tuple[MethodSignature, MethodSignature], mode: SignatureMode) -> str:
    return f"{pair[0].token(mode)}>{pair[1].token(mode)}"


def pattern_uniqueness(pattern: Pattern, patterns: Sequence[Pattern]) -> float:
    """Fraction of the pattern's facts that no other incomparable pattern
    shares, floored at 1/|facts|.  Sub- and superset patterns do not count
    as competing patterns."""
    competitors = [
        other
        for other in patterns
        if other.items != pattern.items
        and not other.items < pattern.items
        and not pattern.items < other.items
    ]
    unique = [
        item
        for item in pattern.items
        if not any(item in other.items for other in competitors)
    ]
    size = len(pattern.items)
    return max(len(unique) / size, 1.0 / size)


def detect_call_pairs(
    models: Sequence[MethodUsageModel],
    config: DetectorConfig,
    pattern_source: PatternSource | None = None,
) -> RankedFindings:
    if config.min_support < 2:
        raise ValueError("call-pair detection requires min_support >= 2")
    mode = config.signature_mode

    def facts(model: MethodUsageModel, object_ref: str) -> frozenset[str]:
        return frozenset(_pair_token(p, mode) for p in to_call_pairs(model, object_ref).pairs)

    usages = _object_usages(models, facts)
    patterns = mine_closed_frequent(_mining_input(usages, pattern_source), config.min_support)

    violations: dict[int, list[tuple[_Usage, frozenset[str]]]] = {}
    for usage in usages:
        for index, pattern in enumerate(patterns):
            missing = pattern.items - usage.items
            if not missing or len(missing) > config.max_missing_facts:
                continue
            if not (pattern.items & usage.items):
                continue  # no shared fact: pattern and usage are unrelated
            violations.setdefault(index, []).append((usage, missing))

    findings = []
    for index, violating in violations.items():
        pattern = patterns[index]
        v = len(violating)
        if pattern.support / v < config.rarity_factor:
            continue
        u = pattern_uniqueness(pattern, patterns)
        score = u * pattern.support / v
        for usage, missing in violating:
            findings.append(
                Finding(
                    detector_id="call-pair",
                    location=usage.location,
                    score=score,
                    pattern=pattern,
                    present_facts=pattern.items & usage.items,
                    missing_facts=missing,
                    metadata=_metadata(usage),
                )
            )
    return _rank("call-pair", findings)


# --- type-usage detector ----------------------------------------------------


def _type_root(type_name: str, config: DetectorConfig) -> str:
    if not config.subtype_aware:
        return type_name
    hierarchy = dict(config.type_hierarchy)
    seen = {type_name}
    current = type_name
    while current in hierarchy:
        current = hierarchy[current]
        if current in seen:
            break
        seen.add(current)
    return current


def strangeness(exactly_similar: int, almost_similar: int) -> float:
    """1 - |E| / (|E| + |A|); 0.0 when the usage has no similar usages."""
    if exactly_similar < 0 or almost_similar < 0:
        raise ValueError("similarity counts must be non-negative")
    total = exactly_similar + almost_similar
    if total == 0:
        return 0.0
    return 1.0 - exactly_similar / total


def detect_type_usage(
    models: Sequence[MethodUsageModel],
    config: DetectorConfig,
    pattern_source: PatternSource | None = None,
) -> RankedFindings:
    mode = config.signature_mode

    def facts(model: MethodUsageModel, object_ref: str) -> frozenset[str]:
        return frozenset(e.signature.token(mode) for e in model.calls(object_ref))

    usages = [
        replace(u, receiver_type=_type_root(u.receiver_type or "?", config))
        for u in _object_usages(models, facts)
    ]

    by_type: dict[str, list[_Usage]] = {}
    for usage in usages:
        by_type.setdefault(usage.receiver_type or "?", []).append(usage)

    findings = []
    for usage in usages:
        population = [
            other
            for other in by_type[usage.receiver_type or "?"]
            if other.id != usage.id
            and (pattern_source is None or pattern_source(other.location))
        ]
        exactly = [o for o in population if o.items == usage.items]
        almost = [o for o in population if usage.items < o.items and len(o.items - usage.items) == 1]
        score = strangeness(len(exactly), len(almost))
        if score <= config.strangeness_threshold:
            continue
        missing = frozenset().union(*(o.items - usage.items for o in almost)) if almost else frozenset()
        if not missing:
            continue  # an empty candidate set is reported by nothing
        pattern = Pattern(
            items=usage.items | missing,
            support=len(almost),
            supporting_ids=frozenset(o.id for o in almost),
        )
        findings.append(
            Finding(
                detector_id="type-usage",
                location=usage.location,
                score=score,
                pattern=pattern,
                present_facts=usage.items,
                missing_facts=missing,
                metadata=_metadata(usage),
            )
        )
    return _rank("type-usage", findings)


# --- temporal detector ------------------------------------------------------


def conviction(supp_missing: Fraction, confidence: Fraction) -> float:
    """Association strength (1 - supp(M)) / (1 - conf(P -> M)).

    conf = 1 yields the Infinite sentinel; supp(M) = 0 with conf = 0 yields
    exactly 1.
    """
    if not (0 <= supp_missing <= 1 and 0 <= confidence <= 1):
        raise ValueError("supports and confidences are relative frequencies in [0, 1]")
    if confidence == 1:
        return INFINITE
    return float(Fraction(1 - supp_missing) / Fraction(1 - confidence))


def _temporal_token(fact, mode: SignatureMode) -> str:
    if fact.kind is TemporalKind.MUST_CALL:
        return f"call:{fact.first.token(mode)}"
    return f"{fact.kind.value}:{fact.first.token(mode)}<{fact.second.token(mode)}"


def detect_temporal(
    models: Sequence[MethodUsageModel],
    config: DetectorConfig,
    pattern_source: PatternSource | None = None,
) -> RankedFindings:
    if config.min_support < 2:
        raise ValueError("temporal detection requires min_support >= 2")
    mode = config.signature_mode

    def facts(model: MethodUsageModel, object_ref: str) -> frozenset[str]:
        return frozenset(_temporal_token(f, mode) for f in to_temporal_facts(model, object_ref))

    usages = _object_usages(models, facts)
    patterns = mine_closed_frequent(_mining_input(usages, pattern_source), config.min_support)

    total = len(usages)
    findings = []
    for usage in usages:
        for pattern in patterns:
            missing = pattern.items - usage.items
            if not missing or len(missing) > config.max_missing_facts:
                continue
            present = pattern.items & usage.items
            if not present:
                continue
            supp_missing = Fraction(
                sum(1 for u in usages if missing <= u.items), total
            )
            supp_present = Fraction(sum(1 for u in usages if present <= u.items), total)
            supp_both = Fraction(
                sum(1 for u in usages if (present | missing) <= u.items), total
            )
            confidence = supp_both / supp_present if supp_present else Fraction(0)
            score = conviction(supp_missing, confidence)
            findings.append(
                Finding(
                    detector_id="temporal",
                    location=usage.location,
                    score=score,
                    pattern=pattern,
                    present_facts=present,
                    missing_facts=missing,
                    metadata=_metadata(usage),
                )
            )
    return _rank("temporal", findings)


# --- runner -----------------------------------------------------------------


DETECTORS: Mapping[str, Callable[..., RankedFindings]] = {
    "call-set": detect_call_set,
    "call-pair": detect_call_pairs,
    "type-usage": detect_type_usage,
    "temporal": detect_temporal,
}


def _unknown_detector_message(detector_id: str) -> str:
    valid = ", ".join(sorted(DETECTORS))
    return f"unknown detector {detector_id!r}; valid detectors: {valid}"


def _worker(result_queue, detector_id, models, config, pattern_source) -> None:
    try:
        outcome = DETECTORS[detector_id](models, config, pattern_source=pattern_source)
        result_queue.put(("ok", outcome))
    except BaseException as exc:  # noqa: BLE001 - crash capture is the point
        result_queue.put(("error", f"{type(exc).__name__}: {exc}"))


def run_detector(
    detector_id: str,
    models: Sequence[MethodUsageModel],
    config: DetectorConfig,
    timeout_seconds: float | None = None,
    pattern_source: PatternSource | None = None,
) -> DetectorOutcome:
    """Run one detector with wall-clock timeout and crash capture.

    Timeouts and crashes surface as markers, never as silent empty results.
    A worker process is used whenever a timeout is set, so overrunning
    detections can be cancelled without hurting sibling runs.
    """
    if detector_id not in DETECTORS:
        raise ValueError(_unknown_detector_message(detector_id))
    start = time.monotonic()
    if timeout_seconds is not None and timeout_seconds <= 0:
        return TimeoutMarker(detector_id, 0.0)
    if timeout_seconds is None:
        try:
            return DETECTORS[detector_id](models, config, pattern_source=pattern_source)
        except Exception as exc:  # noqa: BLE001
            return ErrorMarker(detector_id, f"{type(exc).__name__}: {exc}", time.monotonic() - start)

    context = multiprocessing.get_context("fork")
    result_queue = context.Queue()
    process = context.Process(
        target=_worker,
        args=(result_queue, detector_id, models, config, pattern_source),
    )
    process.start()
    try:
        status, payload = result_queue.get(timeout=timeout_seconds)
    except queue_module.Empty:
        process.terminate()
        process.join()
        return TimeoutMarker(detector_id, time.monotonic() - start)
    process.join()
    elapsed = time.monotonic() - start
    if status == "ok":
        return payload
    return ErrorMarker(detector_id, payload, elapsed)
