"""Sort-and-accumulate selectors: FIFO, LIFO, HVF, LVF and HPF.

All five share one procedure: sort the pool by a policy key and take the
shortest prefix whose value covers the target.  Accumulation stops as soon
as the target is reached; results are fee-free (the simulator applies fees
where configured).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .domain import SelectionResult, Utxo, UtxoPool, priority, result_for
from .errors import InsufficientFunds

KEYS = ("age", "value", "priority")
DIRECTIONS = ("ascending", "descending")


@dataclass(frozen=True, slots=True)
class SortPolicy:
    """Sort key and direction; the five named selectors are fixed policies."""

    key: str
    direction: str

    def __post_init__(self):
        if self.key not in KEYS:
            raise ValueError(f"unknown sort key: {self.key}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown sort direction: {self.direction}")


FIFO = SortPolicy("age", "descending")
LIFO = SortPolicy("age", "ascending")
HVF = SortPolicy("value", "descending")
LVF = SortPolicy("value", "ascending")
HPF = SortPolicy("priority", "descending")

POLICY_BY_NAME = {"fifo": FIFO, "lifo": LIFO, "hvf": HVF, "lvf": LVF, "hpf": HPF}


def policy_key(utxo: Utxo, policy: SortPolicy) -> int:
    if policy.key == "age":
        return utxo.age
    if policy.key == "value":
        return utxo.value
    return priority(utxo)


def tie_break(a: Utxo, b: Utxo, policy: SortPolicy) -> int:
    """Ordering of two utxos under a policy; equal keys fall back to id."""
    ka, kb = policy_key(a, policy), policy_key(b, policy)
    if ka != kb:
        if policy.direction == "descending":
            return -1 if ka > kb else 1
        return -1 if ka < kb else 1
    if a.id == b.id:
        return 0
    return -1 if a.id < b.id else 1


def sorted_pool(pool: UtxoPool, policy: SortPolicy) -> list[Utxo]:
    """The full stably-sorted pool under a policy with id tie-break."""
    sign = -1 if policy.direction == "descending" else 1
    return sorted(pool.members_unordered(),
                  key=lambda u: (sign * policy_key(u, policy), u.id))


def select_primitive(pool: UtxoPool, target: int, policy: SortPolicy) -> SelectionResult:
    """Shortest policy-sorted prefix whose value covers the target.

    Uses a heap so only the consumed prefix pays the sorting cost; the
    result is identical to taking a prefix of ``sorted_pool``.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    if pool.total_value < target:
        raise InsufficientFunds(
            f"pool value {pool.total_value} cannot cover target {target}")
    sign = -1 if policy.direction == "descending" else 1
    heap = [(sign * policy_key(u, policy), u.id, u)
            for u in pool.members_unordered()]
    heapq.heapify(heap)
    chosen: list[Utxo] = []
    remain = target
    while remain > 0:
        _, _, utxo = heapq.heappop(heap)
        chosen.append(utxo)
        remain -= utxo.value
    return result_for(chosen, target)
