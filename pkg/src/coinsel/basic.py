"""Greedy, Random Draw, Random-Improve, Knapsack and Branch-and-Bound.

The randomized selectors take either a ``Splitmix64`` generator or a bare
integer seed; the same seed always reproduces the same selection.  The
knapsack and branch-and-bound inner loops run in the compiled core when it
is available.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _backend
from .domain import (FeeParams, SelectionResult, Utxo, UtxoPool,
                     effective_value, result_for)
from .errors import InsufficientFunds, MaxInputsExceeded
from .rng import Splitmix64, as_rng


def _require_funds(pool: UtxoPool, target: int) -> None:
    if target <= 0:
        raise ValueError("target must be positive")
    if pool.total_value < target:
        raise InsufficientFunds(
            f"pool value {pool.total_value} cannot cover target {target}")


def _descending(pool: UtxoPool) -> list[Utxo]:
    return sorted(pool.members_unordered(), key=lambda u: (-u.value, u.id))


def select_greedy(pool: UtxoPool, target: int) -> SelectionResult:
    """Descending pass over utxos that fit the remaining target, then a
    smallest-first fill for any remainder."""
    _require_funds(pool, target)
    desc = _descending(pool)
    chosen: list[Utxo] = []
    taken: set[str] = set()
    remain = target
    for u in desc:
        if remain > 0 and u.value <= remain:
            chosen.append(u)
            taken.add(u.id)
            remain -= u.value
    if remain > 0:
        for u in reversed(desc):  # ascending value, then descending id
            if u.id in taken:
                continue
            chosen.append(u)
            remain -= u.value
            if remain <= 0:
                break
    return result_for(chosen, target)


def _draw_without_replacement(utxos: list[Utxo], amount_of, threshold: int,
                              rng: Splitmix64):
    """Uniform draws without replacement until the accumulated amount
    reaches ``threshold``.  Returns (chosen, remaining order list, count)."""
    order = list(range(len(utxos)))
    m = len(order)
    chosen: list[Utxo] = []
    acc = 0
    while acc < threshold:
        if m == 0:
            raise InsufficientFunds("candidates exhausted during random draw")
        j = rng.next_below(m)
        i = order[j]
        order[j] = order[m - 1]
        m -= 1
        u = utxos[i]
        chosen.append(u)
        acc += amount_of(u)
    return chosen, order, m, acc


def select_random_draw(pool: UtxoPool, target: int,
                       rng: Splitmix64 | int) -> SelectionResult:
    """Uniform draws without replacement until the target is covered."""
    _require_funds(pool, target)
    rng = as_rng(rng)
    candidates = list(pool)  # ascending id: draw indices are reproducible
    chosen, _, _, _ = _draw_without_replacement(
        candidates, lambda u: u.value, target, rng)
    return result_for(chosen, target)


def select_random_improve(pool: UtxoPool, target: int, max_inputs: int,
                          rng: Splitmix64 | int) -> SelectionResult:
    """Random draw, then random additions kept only while they move the
    total strictly closer to 2*target without exceeding 3*target."""
    _require_funds(pool, target)
    if max_inputs < 1:
        raise ValueError("max_inputs must be at least 1")
    rng = as_rng(rng)
    candidates = list(pool)
    chosen, order, m, acc = _draw_without_replacement(
        candidates, lambda u: u.value, target, rng)
    if len(chosen) > max_inputs:
        raise MaxInputsExceeded(
            f"covering the target needs {len(chosen)} inputs, cap is {max_inputs}")
    ideal = 2 * target
    high = 3 * target
    while m > 0 and len(chosen) < max_inputs:
        j = rng.next_below(m)
        i = order[j]
        order[j] = order[m - 1]
        m -= 1
        u = candidates[i]
        trial = acc + u.value
        if abs(ideal - trial) < abs(ideal - acc) and trial <= high:
            chosen.append(u)
            acc = trial
        else:
            break  # first non-improving draw ends phase two
    return result_for(chosen, target)


def select_knapsack(pool: UtxoPool, target: int, repeats: int,
                    rng: Splitmix64 | int) -> SelectionResult:
    """Stochastic two-pass knapsack, best selection over ``repeats`` attempts."""
    _require_funds(pool, target)
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    rng = as_rng(rng)
    desc = _descending(pool)
    values = [u.value for u in desc]
    mask, exact, rng.state = _backend.knapsack_select(
        values, target, repeats, rng.state)
    if mask is None:
        raise InsufficientFunds("knapsack found no covering selection")
    chosen = [u for u, bit in zip(desc, mask) if bit]
    return result_for(chosen, target, exact_flag=exact)


@dataclass(frozen=True, slots=True)
class BnbParams:
    """Branch-and-bound knobs: search budget, fallback change floor, branch
    order, and the fee constants that shape the match window."""

    rounds: int = 1000
    min_change: int = 0
    branch_policy: str = "randomized"
    fee: FeeParams = field(default_factory=FeeParams)

    def __post_init__(self):
        if self.rounds <= 0:
            raise ValueError("rounds must be positive")
        if self.branch_policy not in ("randomized", "inclusion_first"):
            raise ValueError(f"unknown branch policy: {self.branch_policy}")
        if self.min_change < 0:
            raise ValueError("min_change must be non-negative")


def select_bnb(pool: UtxoPool, target: int, params: BnbParams,
               rng: Splitmix64 | int) -> SelectionResult:
    """Depth-first search for a changeless match, random-draw fallback.

    The match window is [target + fee(header) + fee(output),
    window start + fee(input) + fee(output)]: a hit saves exactly one
    change output now and one input later, so anything inside the window
    beats creating change.  Utxos with non-positive effective value can
    never help reach the window and are excluded.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    rng = as_rng(rng)
    fee = params.fee
    f = fee.fee_per_byte
    candidates = [u for u in pool.members_unordered()
                  if effective_value(u, fee) > 0]
    candidates.sort(key=lambda u: (-effective_value(u, fee), u.id))
    eff = [effective_value(u, fee) for u in candidates]
    eff_total = sum(eff)
    lower = target + fee.header_bytes * f + fee.output_bytes * f
    upper = lower + fee.input_bytes * f + fee.output_bytes * f
    mask = None
    if eff_total >= lower:
        mask, rng.state = _backend.bnb_search(
            eff, lower, upper, params.rounds,
            params.branch_policy == "randomized", rng.state)
    if mask is not None:
        chosen = [u for u, bit in zip(candidates, mask) if bit]
        value = sum(u.value for u in chosen)
        return SelectionResult(
            inputs=frozenset(u.id for u in chosen),
            input_value=value,
            change_value=0,
            fee_paid=value - target,
            exact_match=True,
        )
    # Fallback: random draw against effective values up to target + min_change.
    floor = target + params.min_change
    if eff_total < floor:
        raise InsufficientFunds(
            f"effective pool value {eff_total} cannot cover {floor}")
    by_id = sorted(candidates, key=lambda u: u.id)
    chosen, _, _, acc = _draw_without_replacement(
        by_id, lambda u: effective_value(u, fee), floor, rng)
    value = sum(u.value for u in chosen)
    change = acc - target
    return SelectionResult(
        inputs=frozenset(u.id for u in chosen),
        input_value=value,
        change_value=change,
        fee_paid=value - target - change,
        exact_match=(change == 0),
    )
