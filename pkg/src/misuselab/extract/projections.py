"""Project usage models into the representations the detectors consume."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..model import UNKNOWN_TYPE, EventKind, MethodSignature, MethodUsageModel
from .paths import normal_paths


class UnknownObjectError(KeyError):
    pass


def _require_object(model: MethodUsageModel, object_ref: str) -> None:
    if all(ref != object_ref for ref, _ in model.objects):
        raise UnknownObjectError(
            f"{object_ref!r} is not an object of {model.location.file_path}#{model.location.method_name}"
        )


@dataclass(frozen=True, slots=True)
class CallSet:
    """All signatures a method calls, regardless of receiver."""

    context_method: MethodSignature
    calls: frozenset[MethodSignature]


@dataclass(frozen=True, slots=True)
class CallPairFacts:
    """Ordered call pairs observed on one object along some normal path."""

    object_ref: str
    pairs: frozenset[tuple[MethodSignature, MethodSignature]]


@dataclass(frozen=True, slots=True)
class TypeUsage:
    """The set of methods called on one object of a given type in a method."""

    receiver_type: str
    context_method: MethodSignature
    calls: frozenset[MethodSignature]

    def __post_init__(self) -> None:
        if not self.calls:
            raise ValueError("a type usage must have at least one call")


class TemporalKind(str, Enum):
    MUST_CALL = "call"
    PRECEDES = "order"
    FOLLOWS_ON_EXCEPTION = "exc"


@dataclass(frozen=True, slots=True)
class TemporalFact:
    kind: TemporalKind
    first: MethodSignature
    second: MethodSignature | None = None

    def __post_init__(self) -> None:
        if self.kind is TemporalKind.MUST_CALL:
            if self.second is not None:
                raise ValueError("must-call facts are unary")
        elif self.second is None or self.second == self.first:
            raise ValueError("binary temporal facts need two distinct signatures")

    @staticmethod
    def must_call(sig: MethodSignature) -> "TemporalFact":
        return TemporalFact(TemporalKind.MUST_CALL, sig)

    @staticmethod
    def precedes(a: MethodSignature, b: MethodSignature) -> "TemporalFact":
        return TemporalFact(TemporalKind.PRECEDES, a, b)

    @staticmethod
    def follows_on_exception(a: MethodSignature, b: MethodSignature) -> "TemporalFact":
        return TemporalFact(TemporalKind.FOLLOWS_ON_EXCEPTION, a, b)


def _context_signature(model: MethodUsageModel) -> MethodSignature:
    return MethodSignature(model.location.method_name)


def to_call_set(model: MethodUsageModel) -> CallSet:
    """Union of all called signatures in the method."""
    return CallSet(
        context_method=_context_signature(model),
        calls=frozenset(e.signature for e in model.calls()),
    )


def _object_call_sequences(model: MethodUsageModel, object_ref: str) -> list[tuple[MethodSignature, ...]]:
    """Per normal path, the sequence of signatures called on the object."""
    events = model.events
    sequences = []
    for path in normal_paths(model):
        sequences.append(
            tuple(
                events[i].signature
                for i in path
                if events[i].object_ref == object_ref
            )
        )
    return sequences


def to_call_pairs(model: MethodUsageModel, object_ref: str) -> CallPairFacts:
    """Pairs (a, b): a call to ``a`` precedes a call to ``b`` on some path.

    Calls repeated through loop unrolling yield self-order pairs, which is
    what lets pair-based detection notice a missing iteration.
    """
    _require_object(model, object_ref)
    pairs: set[tuple[MethodSignature, MethodSignature]] = set()
    for sequence in _object_call_sequences(model, object_ref):
        for i in range(len(sequence)):
            for j in range(i + 1, len(sequence)):
                pairs.add((sequence[i], sequence[j]))
    return CallPairFacts(object_ref, frozenset(pairs))


def to_type_usages(model: MethodUsageModel) -> list[TypeUsage]:
    """One type usage per tracked object with at least one call."""
    context = _context_signature(model)
    usages = []
    for ref, type_name in model.objects:
        calls = frozenset(e.signature for e in model.calls(ref))
        if calls:
            usages.append(TypeUsage(type_name or UNKNOWN_TYPE, context, calls))
    return usages


def to_temporal_facts(model: MethodUsageModel, object_ref: str) -> frozenset[TemporalFact]:
    """Must-call, all-paths ordering, and exception-path ordering facts."""
    _require_object(model, object_ref)
    facts: set[TemporalFact] = set()
    called = {e.signature for e in model.calls(object_ref)}
    for sig in called:
        facts.add(TemporalFact.must_call(sig))

    sequences = _object_call_sequences(model, object_ref)
    for a in called:
        for b in called:
            if a == b:
                continue
            witnessed = False
            holds = True
            for sequence in sequences:
                if a in sequence and b in sequence:
                    witnessed = True
                    if sequence.index(a) > sequence.index(b):
                        holds = False
                        break
            if witnessed and holds:
                facts.add(TemporalFact.precedes(a, b))

    events = model.events
    for i, j in model.exceptional_successors:
        first, second = events[i], events[j]
        if (
            first.kind is EventKind.CALL
            and second.kind is EventKind.CALL
            and first.object_ref == object_ref
            and second.object_ref == object_ref
            and first.signature != second.signature
        ):
            facts.add(TemporalFact.follows_on_exception(first.signature, second.signature))
    return frozenset(facts)
