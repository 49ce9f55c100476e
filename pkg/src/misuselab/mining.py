"""Closed frequent itemset mining over transactions of opaque fact tokens.

One miner serves the call-set, call-pair and temporal-fact detectors; a
brute-force enumerator over the item universe acts as its test oracle.
Both exclude the empty itemset and return patterns in a deterministic
order: descending support, then lexicographic item tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import Pattern


@dataclass(frozen=True, slots=True)
class Transaction:
    """One usage, reduced to a set of fact tokens."""

    id: str
    items: frozenset[str]

    @staticmethod
    def of(id: str, items: Iterable[str]) -> "Transaction":
        return Transaction(id, frozenset(items))


def _check_unique_ids(transactions: Sequence[Transaction]) -> None:
    seen: set[str] = set()
    for t in transactions:
        if t.id in seen:
            raise ValueError(f"duplicate transaction id {t.id!r}")
        seen.add(t.id)


def _sorted_patterns(patterns: Iterable[Pattern]) -> list[Pattern]:
    return sorted(patterns, key=Pattern.sort_key)


def mine_closed_frequent(transactions: Sequence[Transaction], min_support: int) -> list[Pattern]:
    """Mine exactly the closed frequent itemsets with exact supports.

    A frequent itemset is closed when no strict superset has the same
    support.  Uses prefix-preserving closure extension, so the output is
    independent of transaction order.
    """
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    _check_unique_ids(transactions)
    if not transactions:
        return []

    tidsets: dict[str, set[int]] = {}
    for index, t in enumerate(transactions):
        for item in t.items:
            tidsets.setdefault(item, set()).add(index)
    frequent_items = sorted(item for item, tids in tidsets.items() if len(tids) >= min_support)
    if not frequent_items:
        return []
    order = {item: rank for rank, item in enumerate(frequent_items)}
    itemsets = [t.items for t in transactions]

    results: list[Pattern] = []

    def closure(tids: frozenset[int]) -> frozenset[str]:
        common = frozenset.intersection(*(itemsets[i] for i in tids))
        return frozenset(item for item in common if item in order)

    def expand(closed: frozenset[str], tids: frozenset[int], core_rank: int) -> None:
        results.append(
            Pattern(
                items=closed,
                support=len(tids),
                supporting_ids=frozenset(transactions[i].id for i in tids),
            )
        )
        for item in frequent_items[core_rank:]:
            if item in closed:
                continue
            new_tids = frozenset(i for i in tids if item in itemsets[i])
            if len(new_tids) < min_support:
                continue
            new_closed = closure(new_tids)
            # Prefix test: reject extensions whose closure reaches back
            # before the core item; those are found via another branch.
            if any(order[extra] < order[item] for extra in new_closed - closed):
                continue
            expand(new_closed, new_tids, order[item] + 1)

    all_tids = frozenset(range(len(transactions)))
    root = closure(all_tids)
    if len(all_tids) >= min_support and root:
        expand(root, all_tids, 0)
    elif len(all_tids) >= min_support:
        for item in frequent_items:
            tids = frozenset(tidsets[item])
            new_closed = closure(tids)
            if any(order[extra] < order[item] for extra in new_closed):
                continue
            expand(new_closed, tids, order[item] + 1)
    return _sorted_patterns(results)


MAX_ORACLE_ITEMS = 20


def brute_force_frequent(transactions: Sequence[Transaction], min_support: int) -> list[Pattern]:
    """Oracle: enumerate every subset of the item universe, filter closed.

    Refuses universes above MAX_ORACLE_ITEMS items; meant for tests and
    spot checks, not production corpora.
    """
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    _check_unique_ids(transactions)
    universe = sorted(set().union(*(t.items for t in transactions)) if transactions else set())
    if len(universe) > MAX_ORACLE_ITEMS:
        raise ValueError(f"item universe too large for oracle ({len(universe)} > {MAX_ORACLE_ITEMS})")

    patterns: list[Pattern] = []
    n = len(universe)
    for mask in range(1, 1 << n):
        items = frozenset(universe[i] for i in range(n) if mask & (1 << i))
        supporting = [t for t in transactions if items <= t.items]
        if len(supporting) < min_support:
            continue
        closure = frozenset.intersection(*(t.items for t in supporting))
        if closure != items:
            continue  # some equal-support superset exists
        patterns.append(
            Pattern(
                items=items,
                support=len(supporting),
                supporting_ids=frozenset(t.id for t in supporting),
            )
        )
    return _sorted_patterns(patterns)
