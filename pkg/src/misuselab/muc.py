"""Misuse taxonomy: violation kind x usage element, and detector capabilities.

The taxonomy is a fixed 2x7 grid.  Capability matrices are shipped as one
YAML file per detector under ``data/capabilities/`` and record, per grid
cell, whether the detector can detect that violation fully, partially, or
not at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import yaml


class ViolationKind(str, Enum):
    MISSING = "missing"
    REDUNDANT = "redundant"


class UsageElement(str, Enum):
    METHOD_CALL = "method-call"
    NULL_CHECK_CONDITION = "null-check-condition"
    VALUE_OR_STATE_CONDITION = "value-or-state-condition"
    SYNCHRONIZATION_CONDITION = "synchronization-condition"
    CONTEXT_CONDITION = "context-condition"
    ITERATION = "iteration"
    EXCEPTION_HANDLING = "exception-handling"


@dataclass(frozen=True, slots=True, order=True)
class MucLabel:
    kind: ViolationKind
    element: UsageElement

    def key(self) -> str:
        return f"{self.kind.value}/{self.element.value}"

    @staticmethod
    def from_key(key: str) -> "MucLabel":
        kind_part, sep, element_part = key.partition("/")
        if not sep:
            raise ValueError(f"label key must look like '<kind>/<element>': {key!r}")
        return MucLabel(ViolationKind(kind_part), UsageElement(element_part))


ALL_LABELS: tuple[MucLabel, ...] = tuple(
    MucLabel(kind, element) for kind in ViolationKind for element in UsageElement
)


class Capability(str, Enum):
    FULL = "full"
    PARTIAL = "partial"
    NONE = "none"


class UnknownDetectorError(KeyError):
    pass


@dataclass(frozen=True)
class CapabilityMatrix:
    """Per-detector grid of detection capabilities, total over all 14 cells."""

    rows: Mapping[str, Mapping[MucLabel, Capability]]

    def __post_init__(self) -> None:
        for detector_id, cells in self.rows.items():
            missing = set(ALL_LABELS) - set(cells)
            if missing:
                keys = ", ".join(sorted(label.key() for label in missing))
                raise ValueError(f"capability row {detector_id!r} is not total; missing {keys}")

    def detector_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.rows))

    def capability(self, detector_id: str, label: MucLabel) -> Capability:
        try:
            return self.rows[detector_id][label]
        except KeyError:
            raise UnknownDetectorError(detector_id) from None


def muc_matches(matrix: CapabilityMatrix, detector_id: str, labels: Iterable[MucLabel]) -> bool:
    """True iff the detector can (at least partially) detect any of the labels."""
    if detector_id not in matrix.rows:
        raise UnknownDetectorError(detector_id)
    row = matrix.rows[detector_id]
    return any(row[label] is not Capability.NONE for label in labels)


def muc_histogram(label_sets: Sequence[Iterable[MucLabel]]) -> dict[MucLabel, int]:
    """Count, per grid cell, how many input label sets contain that label.

    Multi-label inputs are counted once per cell they touch, so cells may sum
    to more than the number of inputs.
    """
    counts = {label: 0 for label in ALL_LABELS}
    for index, labels in enumerate(label_sets):
        label_set = set(labels)
        if not label_set:
            raise ValueError(f"label set at index {index} is empty")
        for label in label_set:
            counts[label] += 1
    return counts


# --- capability files -------------------------------------------------------


def load_capability_file(path: Path) -> tuple[str, dict[MucLabel, Capability]]:
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict) or "detector" not in data or "capabilities" not in data:
        raise ValueError(f"{path}: capability file needs 'detector' and 'capabilities' keys")
    cells = {
        MucLabel.from_key(key): Capability(value)
        for key, value in data["capabilities"].items()
    }
    return str(data["detector"]), cells


def load_capability_matrix(directory: Path | None = None) -> CapabilityMatrix:
    """Load all capability files from a directory (default: bundled data)."""
    if directory is None:
        directory = Path(str(resources.files("misuselab").joinpath("data/capabilities")))
    rows: dict[str, dict[MucLabel, Capability]] = {}
    for path in sorted(directory.glob("*.yml")):
        detector_id, cells = load_capability_file(path)
        if detector_id in rows:
            raise ValueError(f"duplicate capability row for {detector_id!r}")
        rows[detector_id] = cells
    if not rows:
        raise ValueError(f"no capability files found under {directory}")
    return CapabilityMatrix(rows)


def write_capability_file(path: Path, detector_id: str, cells: Mapping[MucLabel, Capability]) -> None:
    payload = {
        "detector": detector_id,
        "capabilities": {label.key(): cells[label].value for label in ALL_LABELS},
    }
    path.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
