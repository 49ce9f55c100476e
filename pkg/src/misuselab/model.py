"""Core domain types: method usage models, usage events, findings.

Everything in this module is an immutable value object. Instances are safe to
share across threads and to send to worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

INFINITE = math.inf


class SignatureMode(str, Enum):
    """Granularity at which two method signatures are compared."""

    NAME_ONLY = "name-only"
    NAME_AND_ARITY = "name-and-arity"
    FULL = "full"


@dataclass(frozen=True, slots=True, order=True)
class MethodSignature:
    """A method, identified by name, arity and (optionally) declaring type.

    ``declaring_type`` is ``None`` when the receiver's static type could not
    be resolved, which is the common case for source-only analysis.
    """

    name: str
    param_count: int = 0
    declaring_type: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("signature name must be non-empty")
        if self.param_count < 0:
            raise ValueError("param_count must be >= 0")

    def token(self, mode: SignatureMode = SignatureMode.NAME_ONLY) -> str:
        """Render this signature as a fact token at the given granularity."""
        if mode is SignatureMode.NAME_ONLY:
            return self.name
        if mode is SignatureMode.NAME_AND_ARITY:
            return f"{self.name}/{self.param_count}"
        prefix = self.declaring_type if self.declaring_type else "?"
        return f"{prefix}.{self.name}/{self.param_count}"


def signatures_equal(a: MethodSignature, b: MethodSignature, mode: SignatureMode) -> bool:
    """Compare two signatures at the requested granularity.

    ``FULL`` falls back to name-and-arity comparison when either declaring
    type is unknown; as a consequence full-mode equality is not transitive
    across partially-resolved signatures.
    """
    if a.name != b.name:
        return False
    if mode is SignatureMode.NAME_ONLY:
        return True
    if a.param_count != b.param_count:
        return False
    if mode is SignatureMode.NAME_AND_ARITY:
        return True
    if a.declaring_type is None or b.declaring_type is None:
        return True
    return a.declaring_type == b.declaring_type


def _check_relative(path: str) -> str:
    if not path:
        raise ValueError("file_path must be non-empty")
    if "\\" in path:
        raise ValueError(f"file_path must use forward slashes: {path!r}")
    if path.startswith("/"):
        raise ValueError(f"file_path must be relative: {path!r}")
    parts = path.split("/")
    if ".." in parts or "." in parts or "" in parts:
        raise ValueError(f"file_path must be normalized: {path!r}")
    return path


@dataclass(frozen=True, slots=True, order=True)
class SourceLocation:
    """Corpus-relative position of a method: project, version, file, method."""

    project_id: str
    version_id: str
    file_path: str
    method_name: str
    line: int | None = None

    def __post_init__(self) -> None:
        _check_relative(self.file_path)
        if self.line is not None and self.line <= 0:
            raise ValueError("line must be positive when present")

    def same_file_and_method(self, other: "SourceLocation") -> bool:
        return self.file_path == other.file_path and self.method_name == other.method_name


# --- usage events -----------------------------------------------------------
#
# An event list is a flat, ordered encoding of what a method body does to the
# objects it uses.  Structured statements are bracketed:
#
#   branch arm        BRANCH_ENTER ... BRANCH_EXIT
#   loop (cond+body)  LOOP_ENTER ... LOOP_EXIT
#   try body          TRY_ENTER ...           (extends to the next handler)
#   catch body        CATCH_ENTER(type) BRANCH_ENTER ... BRANCH_EXIT
#   finally body      FINALLY_ENTER BRANCH_ENTER ... BRANCH_EXIT
#
# Immediately adjacent branch regions (no event in between) are alternative
# arms of one conditional, e.g. then/else; a lone branch region may also be
# skipped entirely.


class EventKind(str, Enum):
    CALL = "call"
    NULL_CHECK = "null-check"
    VALUE_CHECK = "value-check"
    BRANCH_ENTER = "branch-enter"
    BRANCH_EXIT = "branch-exit"
    LOOP_ENTER = "loop-enter"
    LOOP_EXIT = "loop-exit"
    TRY_ENTER = "try-enter"
    CATCH_ENTER = "catch-enter"
    FINALLY_ENTER = "finally-enter"


_OBJECT_KINDS = {EventKind.CALL, EventKind.NULL_CHECK, EventKind.VALUE_CHECK}


@dataclass(frozen=True, slots=True)
class UsageEvent:
    """One step of a usage: a call, a check or a structural marker."""

    kind: EventKind
    object_ref: str | None = None
    signature: MethodSignature | None = None
    checked_method: str | None = None
    exception_type: str | None = None
    line: int | None = None

    def __post_init__(self) -> None:
        if self.kind in _OBJECT_KINDS and not self.object_ref:
            raise ValueError(f"{self.kind.value} event requires an object_ref")
        if self.kind is EventKind.CALL and self.signature is None:
            raise ValueError("call event requires a signature")
        if self.kind is EventKind.VALUE_CHECK and not self.checked_method:
            raise ValueError("value-check event requires a checked_method")

    @staticmethod
    def call(object_ref: str, signature: MethodSignature, line: int | None = None) -> "UsageEvent":
        return UsageEvent(EventKind.CALL, object_ref=object_ref, signature=signature, line=line)

    @staticmethod
    def null_check(object_ref: str, line: int | None = None) -> "UsageEvent":
        return UsageEvent(EventKind.NULL_CHECK, object_ref=object_ref, line=line)

    @staticmethod
    def value_check(object_ref: str, checked_method: str, line: int | None = None) -> "UsageEvent":
        return UsageEvent(
            EventKind.VALUE_CHECK, object_ref=object_ref, checked_method=checked_method, line=line
        )

    @staticmethod
    def marker(kind: EventKind, exception_type: str | None = None) -> "UsageEvent":
        return UsageEvent(kind, exception_type=exception_type)


UNKNOWN_TYPE = "?"


@dataclass(frozen=True, slots=True)
class MethodUsageModel:
    """Per-method extraction result.

    ``objects`` maps each tracked object to its static type (``UNKNOWN_TYPE``
    when unresolved).  ``exceptional_successors`` holds (i, j) event-index
    pairs stating that, on exception paths, event j still happens after
    event i.
    """

    location: SourceLocation
    objects: tuple[tuple[str, str], ...]
    events: tuple[UsageEvent, ...]
    exceptional_successors: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        known = {ref for ref, _ in self.objects}
        if len(known) != len(self.objects):
            raise ValueError("duplicate object_ref in objects")
        for event in self.events:
            if event.object_ref is not None and event.object_ref not in known:
                raise ValueError(f"event references undeclared object {event.object_ref!r}")
        n = len(self.events)
        for i, j in self.exceptional_successors:
            if not (0 <= i < j < n):
                raise ValueError(f"exceptional successor pair ({i}, {j}) out of order or range")

    def object_type(self, object_ref: str) -> str:
        for ref, type_name in self.objects:
            if ref == object_ref:
                return type_name
        raise KeyError(object_ref)

    def calls(self, object_ref: str | None = None) -> tuple[UsageEvent, ...]:
        return tuple(
            e
            for e in self.events
            if e.kind is EventKind.CALL and (object_ref is None or e.object_ref == object_ref)
        )


# --- findings ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Pattern:
    """A mined fact set together with its exact support."""

    items: frozenset[str]
    support: int
    supporting_ids: frozenset[str]

    def __post_init__(self) -> None:
        if self.support != len(self.supporting_ids):
            raise ValueError("support must equal |supporting_ids|")
        if self.support < 1:
            raise ValueError("support must be positive")

    def sort_key(self) -> tuple[int, tuple[str, ...]]:
        return (-self.support, tuple(sorted(self.items)))


@dataclass(frozen=True, slots=True)
class Finding:
    """A reported violation: a ranked deviation of a usage from a pattern."""

    detector_id: str
    location: SourceLocation
    score: float
    pattern: Pattern
    present_facts: frozenset[str] = frozenset()
    missing_facts: frozenset[str] = frozenset()
    redundant_facts: frozenset[str] = frozenset()
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.missing_facts and not self.redundant_facts:
            raise ValueError("a finding must have missing or redundant facts")
        if not (math.isfinite(self.score) or self.score == INFINITE):
            raise ValueError("score must be finite or the Infinite sentinel")

    def sort_key(self) -> tuple:
        # Descending score (Infinite first), then pattern support, then
        # location, then facts: a total, reproducible order.
        return (
            -self.score,
            -self.pattern.support,
            self.location,
            tuple(sorted(self.missing_facts)),
            tuple(sorted(self.present_facts)),
        )
