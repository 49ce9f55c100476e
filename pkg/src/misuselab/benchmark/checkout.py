"""Obtain project-version working directories, cached by content hash."""

from __future__ import annotations

import hashlib
import shutil
import subprocess
from pathlib import Path

from .dataset import Dataset, GitRepo, LocalPath, ProjectVersion


class CheckoutError(Exception):
    pass


def tree_hash(directory: Path) -> str:
    """Content hash over relative paths and file bytes, order-independent."""
    digest = hashlib.sha256()
    for path in sorted(directory.rglob("*")):
        if ".git" in path.parts or not path.is_file():
            continue
        digest.update(str(path.relative_to(directory)).encode())
        digest.update(b"\0")
        digest.update(path.read_bytes())
        digest.update(b"\0")
    return digest.hexdigest()


def _verify_source_roots(version: ProjectVersion, work_dir: Path) -> None:
    for root in version.source_roots:
        if not (work_dir / root).is_dir():
            raise CheckoutError(
                f"{version.project_id}/{version.version_id}: missing source root {root!r}"
            )


def checkout(version: ProjectVersion, dataset: Dataset, workspace: Path) -> Path:
    """Materialize the version under the workspace; repeated calls are
    cache hits with identical content."""
    work_dir = workspace / "checkouts" / version.project_id / version.version_id
    marker = work_dir.parent / f".{version.version_id}.tree-hash"

    if isinstance(version.origin, LocalPath):
        source = dataset.root / version.origin.path
        if not source.is_dir():
            raise CheckoutError(f"local origin does not exist: {source}")
        expected = tree_hash(source)
        if work_dir.is_dir() and marker.is_file() and marker.read_text() == expected:
            _verify_source_roots(version, work_dir)
            return work_dir
        if work_dir.exists():
            shutil.rmtree(work_dir)
        shutil.copytree(source, work_dir)
        _verify_source_roots(version, work_dir)
        marker.parent.mkdir(parents=True, exist_ok=True)
        marker.write_text(tree_hash(work_dir))
        return work_dir

    origin: GitRepo = version.origin
    if work_dir.is_dir() and (work_dir / ".git").is_dir():
        head = subprocess.run(
            ["git", "-C", str(work_dir), "rev-parse", "HEAD"],
            capture_output=True,
            text=True,
        )
        if head.returncode == 0 and head.stdout.strip() == origin.commit:
            _verify_source_roots(version, work_dir)
            return work_dir
        shutil.rmtree(work_dir)
    work_dir.parent.mkdir(parents=True, exist_ok=True)
    clone = subprocess.run(
        ["git", "clone", "--quiet", origin.url, str(work_dir)],
        capture_output=True,
        text=True,
    )
    if clone.returncode != 0:
        raise CheckoutError(f"git clone failed for {origin.url}: {clone.stderr.strip()}")
    detach = subprocess.run(
        ["git", "-C", str(work_dir), "checkout", "--quiet", "--detach", origin.commit],
        capture_output=True,
        text=True,
    )
    if detach.returncode != 0:
        raise CheckoutError(
            f"commit {origin.commit} not found in {origin.url}: {detach.stderr.strip()}"
        )
    _verify_source_roots(version, work_dir)
    marker.write_text(tree_hash(work_dir))
    return work_dir
