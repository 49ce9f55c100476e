"""Enumerate normal execution paths over a model's flat event list.

The flat encoding is decoded back into a region tree:

* plain branch regions are optional; immediately adjacent branch regions
  (``BRANCH_EXIT`` directly followed by ``BRANCH_ENTER``) form one
  alternative group of which exactly one arm executes,
* loop regions (condition followed by body) execute zero, one or two
  times -- the single unrolling that makes self-order relations visible,
* catch regions never execute on normal paths, finally regions always do.

Paths are sequences of call-event indices.  Enumeration is capped; beyond
the cap, derived ordering facts hold only over the enumerated prefix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..model import EventKind, MethodUsageModel

log = logging.getLogger(__name__)

MAX_PATHS = 256


@dataclass
class _Region:
    kind: str  # "seq" | "branch" | "loop" | "catch" | "finally"
    start: int
    end: int = -1
    children: list["_Region | int"] = field(default_factory=list)


def _build_tree(model: MethodUsageModel) -> _Region:
    root = _Region("seq", 0)
    stack = [root]
    pending_marker: str | None = None
    for index, event in enumerate(model.events):
        kind = event.kind
        if kind is EventKind.CALL:
            stack[-1].children.append(index)
            pending_marker = None
        elif kind is EventKind.BRANCH_ENTER:
            region = _Region(pending_marker or "branch", index)
            stack[-1].children.append(region)
            stack.append(region)
            pending_marker = None
        elif kind in (EventKind.BRANCH_EXIT, EventKind.LOOP_EXIT):
            if len(stack) > 1:
                stack[-1].end = index
                stack.pop()
            pending_marker = None
        elif kind is EventKind.LOOP_ENTER:
            region = _Region("loop", index)
            stack[-1].children.append(region)
            stack.append(region)
            pending_marker = None
        elif kind is EventKind.CATCH_ENTER:
            pending_marker = "catch"
        elif kind is EventKind.FINALLY_ENTER:
            pending_marker = "finally"
        else:  # TRY_ENTER, NULL_CHECK, VALUE_CHECK: transparent for paths
            if kind is not EventKind.TRY_ENTER:
                pending_marker = None
    return root


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.truncated = False

    def trim(self, paths: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
        if len(paths) > self.limit:
            self.truncated = True
            return paths[: self.limit]
        return paths


def _dedupe(paths: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, ...]] = []
    for path in paths:
        if path not in seen:
            seen.add(path)
            out.append(path)
    return out


def _concat(lefts: list[tuple[int, ...]], rights: list[tuple[int, ...]], budget: _Budget) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for left in lefts:
        for right in rights:
            out.append(left + right)
            if len(out) > budget.limit:
                budget.truncated = True
                return out[: budget.limit]
    return out


def _region_paths(region: _Region, budget: _Budget) -> list[tuple[int, ...]]:
    if region.kind == "catch":
        return [()]  # exceptions do not occur on normal paths
    if region.kind == "loop":
        body = _seq_paths(region.children, budget)
        once = body
        twice = _concat(body, body, budget)
        return budget.trim(_dedupe([()] + once + twice))
    if region.kind in ("branch", "finally", "seq"):
        return _seq_paths(region.children, budget)
    raise AssertionError(region.kind)


def _seq_paths(children: list[_Region | int], budget: _Budget) -> list[tuple[int, ...]]:
    paths: list[tuple[int, ...]] = [()]
    index = 0
    while index < len(children):
        child = children[index]
        if isinstance(child, int):
            paths = _concat(paths, [(child,)], budget)
            index += 1
            continue
        if child.kind == "branch":
            # Collect a maximal run of flat-adjacent branch arms.
            arms = [child]
            scan = index + 1
            while (
                scan < len(children)
                and isinstance(children[scan], _Region)
                and children[scan].kind == "branch"
                and children[scan].start == arms[-1].end + 1
            ):
                arms.append(children[scan])
                scan += 1
            alternatives: list[tuple[int, ...]] = []
            for arm in arms:
                alternatives.extend(_region_paths(arm, budget))
            if len(arms) == 1:
                alternatives.append(())  # a lone arm may be skipped entirely
            paths = _concat(paths, budget.trim(_dedupe(alternatives)), budget)
            index = scan
            continue
        paths = _concat(paths, _region_paths(child, budget), budget)
        index += 1
    return budget.trim(_dedupe(paths))


def normal_paths(model: MethodUsageModel, max_paths: int = MAX_PATHS) -> list[tuple[int, ...]]:
    """All normal-execution call-index sequences, loop bodies unrolled once.

    Returns at most ``max_paths`` paths; logs a warning when truncating.
    """
    budget = _Budget(max_paths)
    paths = _region_paths(_build_tree(model), budget)
    if budget.truncated:
        log.warning(
            "path enumeration capped at %d for %s#%s; ordering facts cover the enumerated prefix only",
            max_paths,
            model.location.file_path,
            model.location.method_name,
        )
    return paths
