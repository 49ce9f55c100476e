"""Lossless facts-file round trip for extracted usage models.

Format: UTF-8, newline-delimited JSON.  The first line is a header object;
each following line is one method model with exactly the fields
``location``, ``objects``, ``events`` and ``exceptional_successors``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from ..model import (
    EventKind,
    MethodSignature,
    MethodUsageModel,
    SourceLocation,
    UsageEvent,
)

HEADER = {"format": "usage-facts", "version": 1}


class FactsFileError(Exception):
    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


def _signature_to_json(sig: MethodSignature) -> list:
    return [sig.name, sig.param_count, sig.declaring_type]


def _signature_from_json(data) -> MethodSignature:
    name, param_count, declaring_type = data
    return MethodSignature(name, param_count, declaring_type)


def _event_to_json(event: UsageEvent) -> dict:
    record: dict = {"kind": event.kind.value}
    if event.object_ref is not None:
        record["object"] = event.object_ref
    if event.signature is not None:
        record["signature"] = _signature_to_json(event.signature)
    if event.checked_method is not None:
        record["checked_method"] = event.checked_method
    if event.exception_type is not None:
        record["exception_type"] = event.exception_type
    if event.line is not None:
        record["line"] = event.line
    return record


def _event_from_json(data: dict) -> UsageEvent:
    signature = data.get("signature")
    return UsageEvent(
        kind=EventKind(data["kind"]),
        object_ref=data.get("object"),
        signature=_signature_from_json(signature) if signature is not None else None,
        checked_method=data.get("checked_method"),
        exception_type=data.get("exception_type"),
        line=data.get("line"),
    )


def model_to_record(model: MethodUsageModel) -> dict:
    loc = model.location
    return {
        "location": {
            "project": loc.project_id,
            "version": loc.version_id,
            "file": loc.file_path,
            "method": loc.method_name,
            "line": loc.line,
        },
        "objects": [[ref, type_name] for ref, type_name in model.objects],
        "events": [_event_to_json(e) for e in model.events],
        "exceptional_successors": sorted([i, j] for i, j in model.exceptional_successors),
    }


def model_from_record(record: dict) -> MethodUsageModel:
    loc = record["location"]
    return MethodUsageModel(
        location=SourceLocation(
            project_id=loc["project"],
            version_id=loc["version"],
            file_path=loc["file"],
            method_name=loc["method"],
            line=loc.get("line"),
        ),
        objects=tuple((ref, type_name) for ref, type_name in record["objects"]),
        events=tuple(_event_from_json(e) for e in record["events"]),
        exceptional_successors=frozenset((i, j) for i, j in record["exceptional_successors"]),
    )


def write_facts_file(models: Sequence[MethodUsageModel], path: Path | str) -> None:
    path = Path(path)
    lines = [json.dumps(HEADER, sort_keys=True)]
    lines.extend(
        json.dumps(model_to_record(model), sort_keys=True, ensure_ascii=False)
        for model in models
    )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_facts_file(path: Path | str) -> list[MethodUsageModel]:
    path = Path(path)
    models: list[MethodUsageModel] = []
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FactsFileError(str(path), line_no, f"malformed JSON: {exc.msg}") from exc
            if line_no == 1:
                if not isinstance(record, dict) or record.get("format") != HEADER["format"]:
                    raise FactsFileError(str(path), 1, "missing or unrecognized header")
                continue
            try:
                models.append(model_from_record(record))
            except (KeyError, TypeError, ValueError) as exc:
                raise FactsFileError(str(path), line_no, f"malformed record: {exc}") from exc
    return models


def iter_models(paths: Iterable[Path | str]) -> list[MethodUsageModel]:
    models: list[MethodUsageModel] = []
    for path in paths:
        models.extend(load_facts_file(path))
    return models
