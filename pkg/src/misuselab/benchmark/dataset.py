"""Misuse dataset: one YAML file per misuse plus an index of project versions."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import yaml

from ..model import SourceLocation
from ..muc import MucLabel
from .metrics import VersionKey


class DatasetError(Exception):
    def __init__(self, path: Path | str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = str(path)
        self.message = message


@dataclass(frozen=True, slots=True)
class GitRepo:
    url: str
    commit: str

    def __post_init__(self) -> None:
        if not re.fullmatch(r"[0-9a-f]{40}", self.commit):
            raise ValueError(f"commit must be a full 40-hex hash: {self.commit!r}")


@dataclass(frozen=True, slots=True)
class LocalPath:
    path: str


@dataclass(frozen=True, slots=True)
class ProjectVersion:
    project_id: str
    version_id: str
    origin: GitRepo | LocalPath
    source_roots: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.source_roots:
            raise ValueError("a project version needs at least one source root")

    @property
    def key(self) -> VersionKey:
        return (self.project_id, self.version_id)


@dataclass(frozen=True, slots=True)
class KnownMisuse:
    misuse_id: str
    project_id: str
    version_id: str
    location: SourceLocation
    description: str
    muc_labels: frozenset[MucLabel]
    fix_description: str
    crafted_usage_path: str | None = None

    def __post_init__(self) -> None:
        if not self.muc_labels:
            raise ValueError("a misuse needs at least one taxonomy label")

    @property
    def version_key(self) -> VersionKey:
        return (self.project_id, self.version_id)


@dataclass(frozen=True)
class Dataset:
    root: Path
    versions: tuple[ProjectVersion, ...]
    misuses: tuple[KnownMisuse, ...]

    def version(self, key: VersionKey) -> ProjectVersion:
        for version in self.versions:
            if version.key == key:
                return version
        raise KeyError(key)

    def misuse(self, misuse_id: str) -> KnownMisuse:
        for misuse in self.misuses:
            if misuse.misuse_id == misuse_id:
                return misuse
        raise KeyError(misuse_id)

    def misuses_of(self, key: VersionKey) -> tuple[KnownMisuse, ...]:
        return tuple(m for m in self.misuses if m.version_key == key)

    def crafted_usage_file(self, misuse: KnownMisuse) -> Path:
        if misuse.crafted_usage_path is None:
            raise DatasetError(
                self.root, f"misuse {misuse.misuse_id!r} has no crafted usage"
            )
        return self.root / misuse.crafted_usage_path


def _require(mapping: dict, key: str, path: Path, kind: type = str):
    if key not in mapping or mapping[key] is None:
        raise DatasetError(path, f"missing required field {key!r}")
    value = mapping[key]
    if kind is str and not isinstance(value, str):
        raise DatasetError(path, f"field {key!r} must be a string")
    return value


def _parse_version(entry: dict, path: Path) -> ProjectVersion:
    project = _require(entry, "project", path)
    version = _require(entry, "version", path)
    origin_raw = _require(entry, "origin", path, kind=dict)
    if not isinstance(origin_raw, dict) or "type" not in origin_raw:
        raise DatasetError(path, "field 'origin' must be a map with a 'type'")
    if origin_raw["type"] == "git":
        origin: GitRepo | LocalPath = GitRepo(
            url=_require(origin_raw, "url", path), commit=_require(origin_raw, "commit", path)
        )
    elif origin_raw["type"] == "local":
        origin = LocalPath(path=_require(origin_raw, "path", path))
    else:
        raise DatasetError(path, f"unknown origin type {origin_raw['type']!r}")
    roots = entry.get("source_roots")
    if not isinstance(roots, list) or not roots or not all(isinstance(r, str) for r in roots):
        raise DatasetError(path, "field 'source_roots' must be a non-empty list of paths")
    try:
        return ProjectVersion(project, version, origin, tuple(roots))
    except ValueError as exc:
        raise DatasetError(path, str(exc)) from exc


def _parse_misuse(raw: dict, path: Path) -> KnownMisuse:
    misuse_id = _require(raw, "id", path)
    project = _require(raw, "project", path)
    version = _require(raw, "version", path)
    file_path = _require(raw, "file", path)
    method = _require(raw, "method", path)
    description = _require(raw, "description", path)
    fix_description = _require(raw, "fix_description", path)
    labels_raw = raw.get("muc_labels")
    if not isinstance(labels_raw, list) or not labels_raw:
        raise DatasetError(path, "missing required field 'muc_labels'")
    try:
        labels = frozenset(MucLabel.from_key(str(key)) for key in labels_raw)
    except ValueError as exc:
        raise DatasetError(path, f"bad muc_labels entry: {exc}") from exc
    line = raw.get("line")
    if line is not None and (not isinstance(line, int) or line <= 0):
        raise DatasetError(path, "field 'line' must be a positive integer")
    crafted = raw.get("crafted_usage")
    if crafted is not None and not isinstance(crafted, str):
        raise DatasetError(path, "field 'crafted_usage' must be a path string")
    try:
        location = SourceLocation(project, version, file_path, method, line)
        return KnownMisuse(
            misuse_id=misuse_id,
            project_id=project,
            version_id=version,
            location=location,
            description=description,
            muc_labels=labels,
            fix_description=fix_description,
            crafted_usage_path=crafted,
        )
    except ValueError as exc:
        raise DatasetError(path, str(exc)) from exc


def load_dataset(root: Path | str) -> Dataset:
    """Load and validate a dataset directory; raises DatasetError on schema
    violations, naming the offending file and field."""
    root = Path(root)
    index_path = root / "index.yml"
    if not index_path.is_file():
        raise DatasetError(index_path, "dataset index not found")
    index = yaml.safe_load(index_path.read_text(encoding="utf-8"))
    if not isinstance(index, dict) or not isinstance(index.get("versions"), list):
        raise DatasetError(index_path, "index must contain a 'versions' list")
    versions = tuple(_parse_version(entry, index_path) for entry in index["versions"])
    if len({v.key for v in versions}) != len(versions):
        raise DatasetError(index_path, "duplicate project/version entries")

    misuse_dir = root / "misuses"
    misuses: list[KnownMisuse] = []
    if misuse_dir.is_dir():
        for path in sorted(misuse_dir.glob("*.yml")):
            raw = yaml.safe_load(path.read_text(encoding="utf-8"))
            if not isinstance(raw, dict):
                raise DatasetError(path, "misuse file must be a YAML mapping")
            misuses.append(_parse_misuse(raw, path))
    if len({m.misuse_id for m in misuses}) != len(misuses):
        raise DatasetError(misuse_dir, "duplicate misuse ids")

    known_versions = {v.key for v in versions}
    for misuse in misuses:
        if misuse.version_key not in known_versions:
            raise DatasetError(
                root / "misuses" / f"{misuse.misuse_id}.yml",
                f"misuse references unknown version {misuse.version_key}",
            )
        if misuse.crafted_usage_path is not None:
            crafted = root / misuse.crafted_usage_path
            if not crafted.is_file():
                raise DatasetError(crafted, "crafted_usage file does not exist")
    return Dataset(root=root, versions=versions, misuses=tuple(misuses))
