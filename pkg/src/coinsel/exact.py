"""Exact subset-search oracles.

Brute-force and pruned-enumeration routines used as the backend of the
optimization-based selectors and as ground truth in the property tests.
Everything here is deterministic: ties are broken lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from .errors import CapExceeded, Infeasible

DEFAULT_CAP = 24
SUBSET_CAP = 20
DP_SUM_CAP = 10_000_000


def subset_min_inputs(values: Sequence[int], target: int,
                      cap: int = SUBSET_CAP) -> tuple[int, ...]:
    """Minimum-cardinality index subset with value >= target.

    Ties go to the smaller value sum, then to lexicographic indices.
    """
    n = len(values)
    if n > cap:
        raise CapExceeded(f"{n} values exceed enumeration cap {cap}")
    if sum(values) < target:
        raise Infeasible(f"total {sum(values)} cannot cover target {target}")
    if target <= 0:
        return ()
    for k in range(1, n + 1):
        best = None
        for combo in combinations(range(n), k):
            s = sum(values[i] for i in combo)
            if s < target:
                continue
            key = (s, combo)
            if best is None or key < best:
                best = key
        if best is not None:
            return best[1]
    raise Infeasible("unreachable: total covers target")  # pragma: no cover


def subset_exact_match(values: Sequence[int], target: int,
                       cap: int = SUBSET_CAP) -> tuple[int, ...] | None:
    """Some index subset summing exactly to target, or None.

    Deterministic choice: lexicographically smallest index set among the
    minimum-cardinality matches.  Uses pseudo-polynomial DP when the value
    total is small enough, enumeration otherwise.
    """
    if target == 0:
        return ()
    n = len(values)
    if sum(values) <= DP_SUM_CAP:
        return _exact_match_dp(values, target)
    if n > cap:
        raise CapExceeded(f"{n} values exceed enumeration cap {cap}")
    for k in range(1, n + 1):
        for combo in combinations(range(n), k):
            if sum(values[i] for i in combo) == target:
                return combo
    return None


def _exact_match_dp(values: Sequence[int], target: int) -> tuple[int, ...] | None:
    # dp maps reachable sum -> best (cardinality, index tuple); indices are
    # added in ascending order so tuple comparison is the lexicographic rule.
    dp: dict[int, tuple[int, tuple[int, ...]]] = {0: (0, ())}
    for i, v in enumerate(values):
        if v > target:
            continue
        updates = {}
        for s, (card, idx) in dp.items():
            ns = s + v
            if ns > target:
                continue
            cand = (card + 1, idx + (i,))
            cur = dp.get(ns)
            pend = updates.get(ns)
            if (cur is None or cand < cur) and (pend is None or cand < pend):
                updates[ns] = cand
        dp.update(updates)
    hit = dp.get(target)
    return hit[1] if hit is not None else None


@dataclass(frozen=True, slots=True)
class Constraint:
    """Linear constraint sum(coeffs * x) <op> rhs with op in <=, >=, ==."""

    coeffs: tuple[int, ...]
    op: str
    rhs: int

    def holds(self, x: Sequence[int]) -> bool:
        lhs = sum(c * xi for c, xi in zip(self.coeffs, x))
        if self.op == "<=":
            return lhs <= self.rhs
        if self.op == ">=":
            return lhs >= self.rhs
        if self.op == "==":
            return lhs == self.rhs
        raise ValueError(f"unknown op: {self.op}")


@dataclass(frozen=True, slots=True)
class BinaryProgram:
    """Binary program: linear weights plus an optional leaf hook.

    ``leaf(x)`` returns (feasible, extra objective term) and carries any
    change-dependent logic that is not linear in the variables.
    """

    n: int
    weights: tuple[int, ...]
    sense: str = "min"
    constraints: tuple[Constraint, ...] = ()
    leaf: Callable[[tuple[int, ...]], tuple[bool, float]] | None = None

    def __post_init__(self):
        if len(self.weights) != self.n:
            raise ValueError("weights length must equal n")
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown sense: {self.sense}")


def solve_binary(program: BinaryProgram, cap: int = DEFAULT_CAP,
                 prune: bool = True):
    """Global optimum of a BinaryProgram by 0-first DFS enumeration.

    Pruning (when no leaf hook is present) cuts branches whose best
    attainable linear objective cannot beat the incumbent.  The 0-first
    visiting order plus strict-improvement updates make the returned
    assignment the lexicographically smallest optimum.

    Returns (assignment tuple, objective value); raises Infeasible.
    """
    n = program.n
    if n > cap:
        raise CapExceeded(f"{n} variables exceed solver cap {cap}")
    minimizing = program.sense == "min"
    weights = program.weights
    # Best-case contribution of the still-unassigned suffix.
    if minimizing:
        tail = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            tail[i] = tail[i + 1] + min(0, weights[i])
    else:
        tail = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            tail[i] = tail[i + 1] + max(0, weights[i])
    can_prune = prune and program.leaf is None

    best_obj = None
    best_x = None
    x = [0] * n

    def visit(i: int, partial):
        nonlocal best_obj, best_x
        if can_prune and best_obj is not None:
            bound = partial + tail[i]
            if minimizing and bound >= best_obj:
                return
            if not minimizing and bound <= best_obj:
                return
        if i == n:
            xt = tuple(x)
            if not all(c.holds(xt) for c in program.constraints):
                return
            obj = partial
            if program.leaf is not None:
                ok, extra = program.leaf(xt)
                if not ok:
                    return
                obj = obj + extra
            if best_obj is None or (obj < best_obj if minimizing else obj > best_obj):
                best_obj = obj
                best_x = xt
            return
        for bit in (0, 1):
            x[i] = bit
            visit(i + 1, partial + weights[i] * bit)
        x[i] = 0

    visit(0, 0)
    if best_x is None:
        raise Infeasible("no assignment satisfies the constraints")
    return best_x, best_obj
