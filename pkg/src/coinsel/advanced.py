"""Optimization-based selectors: two-phase size/pool ILP, knapsack with
leverage, myopic/strategic two-period selection, and greedy + genetic.

These all run on the exact enumeration backend in :mod:`coinsel.exact`;
instance sizes are capped accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .basic import select_greedy
from .domain import (FeeParams, PayRequestSet, SelectionResult, Utxo,
                     UtxoPool, result_for)
from .errors import CapExceeded, Infeasible, InsufficientFunds
from .exact import BinaryProgram, solve_binary, subset_min_inputs
from .rng import Splitmix64

# Pair searches (leverage, strategic) enumerate 3^n subset pairs, so their
# cap is tighter than the single-subset cap.
SOLVER_CAP = 20
PAIR_CAP = 12

CHANGE_ID = "__change1__"


def tx_size(n_inputs: int, n_outputs: int, has_change: bool,
            fee: FeeParams) -> int:
    """Transaction bytes: header + per-input + per-output + optional change."""
    size = fee.header_bytes + fee.input_bytes * n_inputs + fee.output_bytes * n_outputs
    if has_change:
        size += fee.change_output_bytes
    return size


@dataclass(frozen=True, slots=True)
class IlpParams:
    """Fee/change parameters plus the phase-2 size slack factor gamma."""

    fee: FeeParams
    gamma: float

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must be in (0, 1)")


def _ilp_leaf(values, sizes, out_value, out_size, params: IlpParams,
              size_bound: float | None):
    """Feasibility and change bookkeeping shared by both ILP phases.

    For an assignment, the change output either does not exist (c = 0) or
    occupies beta bytes and holds at least min_change.  Returns a closure
    mapping x -> (feasible, y, change_value, change_size); the no-change
    case is preferred when both are feasible since it is smaller in phase 1
    and scores higher in phase 2.
    """
    fee = params.fee
    alpha = fee.fee_per_byte
    beta = fee.change_output_bytes

    def evaluate(x):
        in_v = sum(v for v, xi in zip(values, x) if xi)
        in_s = sum(s for s, xi in zip(sizes, x) if xi)
        y0 = in_s + out_size
        if y0 <= fee.max_tx_bytes and (size_bound is None or y0 <= size_bound):
            if in_v - out_value - alpha * y0 == 0:
                return True, y0, 0, 0
        yb = y0 + beta
        if yb <= fee.max_tx_bytes and (size_bound is None or yb <= size_bound):
            c = in_v - out_value - alpha * yb
            if c >= fee.min_change:
                return True, yb, c, beta
        return False, 0, 0, 0

    return evaluate


def select_ilp_two_phase(pool: UtxoPool, requests: PayRequestSet,
                         params: IlpParams, cap: int = SOLVER_CAP) -> SelectionResult:
    """Phase 1 minimizes transaction size; phase 2 maximizes consumed
    inputs (net of any change output) within a (1+gamma) size slack."""
    utxos = list(pool)
    n = len(utxos)
    if n > cap:
        raise CapExceeded(f"{n} utxos exceed solver cap {cap}")
    fee = params.fee
    out_value = requests.total
    out_size = fee.output_bytes * len(requests)
    if out_value < fee.dust_threshold:
        raise Infeasible("payment outputs fall below the dust threshold")
    values = [u.value for u in utxos]
    sizes = [u.size_bytes for u in utxos]

    eval_any = _ilp_leaf(values, sizes, out_value, out_size, params, None)

    def leaf_phase1(x):
        ok, y, _, _ = eval_any(x)
        return ok, (y - sum(s for s, xi in zip(sizes, x) if xi))

    phase1 = BinaryProgram(n=n, weights=tuple(sizes), sense="min",
                           leaf=leaf_phase1)
    _, y_opt = solve_binary(phase1, cap=cap)

    bound = (1 + params.gamma) * y_opt
    eval_bounded = _ilp_leaf(values, sizes, out_value, out_size, params, bound)

    def leaf_phase2(x):
        ok, _, _, c_size = eval_bounded(x)
        if not ok:
            return False, 0
        return True, (-1 if c_size else 0)

    phase2 = BinaryProgram(n=n, weights=(1,) * n, sense="max",
                           leaf=leaf_phase2)
    x2, _ = solve_binary(phase2, cap=cap)
    ok, y, change, _ = eval_bounded(x2)
    assert ok
    chosen = [u for u, xi in zip(utxos, x2) if xi]
    return SelectionResult(
        inputs=frozenset(u.id for u in chosen),
        input_value=sum(u.value for u in chosen),
        change_value=change,
        fee_paid=fee.fee_per_byte * y,
        exact_match=(change == 0),
    )


@dataclass(frozen=True, slots=True)
class LeverageProblem:
    """Inputs of the leverage search: pool, ordered requests and fee terms.

    ``fee.max_overpay`` is the largest tip a change-free transaction may
    leave, ``fee.dust_threshold`` the smallest admissible change output.
    """

    pool: UtxoPool
    requests: PayRequestSet
    fee: FeeParams
    o2_cap: int = 2


def _subset_sums(values):
    sums = [0] * (1 << len(values))
    for i, v in enumerate(values):
        step = 1 << i
        for mask in range(step):
            sums[step + mask] = sums[mask] + v
    return sums


def _mask_ids(utxos, mask):
    return tuple(utxos[i].id for i in range(len(utxos)) if mask >> i & 1)


def select_knapsack_leverage(problem: LeverageProblem):
    """Change-free single transaction if one exists; otherwise a leverage
    pair whose first change feeds a change-free second transaction; else a
    plain fallback transaction with change.

    Returns (first SelectionResult, second SelectionResult or None).  In a
    leverage pair the second transaction spends the first one's change,
    listed among its inputs under the pseudo-id ``__change1__``.  Tips are
    folded into ``fee_paid``.
    """
    utxos = list(problem.pool)
    n = len(utxos)
    if n > SOLVER_CAP:
        raise CapExceeded(f"{n} utxos exceed solver cap {SOLVER_CAP}")
    fee = problem.fee
    alpha = fee.fee_per_byte
    requests = problem.requests.targets
    m = len(requests)
    out_total = sum(requests)
    values = [u.value for u in utxos]
    sums = _subset_sums(values)

    def popcount(mask):
        return bin(mask).count("1")

    # Stage 1: change-free transaction serving every request, tip <= H.
    best = None
    for mask in range(1, 1 << n):
        k = popcount(mask)
        w = tx_size(k, m, False, fee)
        r = sums[mask] - out_total - alpha * w
        if 0 <= r <= fee.max_overpay:
            key = (w * alpha + r, k, _mask_ids(utxos, mask))
            if best is None or key < best[0]:
                best = (key, mask, r, w)
    if best is not None:
        _, mask, r, w = best
        chosen = [u for i, u in enumerate(utxos) if mask >> i & 1]
        res = SelectionResult(
            inputs=frozenset(u.id for u in chosen),
            input_value=sums[mask],
            change_value=0,
            fee_paid=w * alpha + r,
            exact_match=True,
        )
        return res, None

    # Stage 2: leverage pair.  tau1 serves the requests outside O2 and must
    # leave change >= D; tau2 spends that change plus disjoint inputs to
    # serve O2 change-free.
    if n <= PAIR_CAP and m >= 2:
        pair = _leverage_pair(utxos, values, sums, requests, problem, fee)
        if pair is not None:
            return pair

    # Stage 3: fallback single transaction with change >= D, no tip.
    best = None
    for mask in range(1, 1 << n):
        k = popcount(mask)
        w = tx_size(k, m, True, fee)
        c = sums[mask] - out_total - alpha * w
        if c >= max(fee.dust_threshold, 1):
            key = (w * alpha, k, _mask_ids(utxos, mask))
            if best is None or key < best[0]:
                best = (key, mask, c, w)
    if best is None:
        raise Infeasible("no transaction can serve the requests")
    _, mask, c, w = best
    chosen = [u for i, u in enumerate(utxos) if mask >> i & 1]
    res = SelectionResult(
        inputs=frozenset(u.id for u in chosen),
        input_value=sums[mask],
        change_value=c,
        fee_paid=w * alpha,
        exact_match=False,
    )
    return res, None


def _request_subsets(m, cap):
    """Nonempty proper subsets of request indices with size <= cap."""
    from itertools import combinations
    for k in range(1, min(cap, m - 1) + 1):
        yield from combinations(range(m), k)


def _leverage_pair(utxos, values, sums, requests, problem, fee):
    alpha = fee.fee_per_byte
    n = len(utxos)
    full = (1 << n) - 1
    best = None
    for o2 in _request_subsets(len(requests), problem.o2_cap):
        o2_set = set(o2)
        out2 = sum(requests[j] for j in o2)
        m2 = len(o2)
        out1 = sum(requests[j] for j in range(len(requests)) if j not in o2_set)
        m1 = len(requests) - m2
        for s1 in range(1, 1 << n):
            w1 = tx_size(bin(s1).count("1"), m1, True, fee)
            c1 = sums[s1] - out1 - alpha * w1
            if c1 < max(fee.dust_threshold, 1):
                continue
            comp = full & ~s1
            s2 = comp
            while True:
                w2 = tx_size(bin(s2).count("1") + 1, m2, False, fee)
                r2 = sums[s2] + c1 - out2 - alpha * w2
                if 0 <= r2 <= fee.max_overpay:
                    obj = (w1 + w2) * alpha + r2
                    key = (obj, bin(s1).count("1") + bin(s2).count("1"),
                           _mask_ids(utxos, s1), _mask_ids(utxos, s2), o2)
                    if best is None or key < best[0]:
                        best = (key, s1, s2, o2, c1, r2, w1, w2)
                if s2 == 0:
                    break
                s2 = (s2 - 1) & comp
    if best is None:
        return None
    _, s1, s2, o2, c1, r2, w1, w2 = best
    alpha = fee.fee_per_byte
    first = SelectionResult(
        inputs=frozenset(_mask_ids(utxos, s1)),
        input_value=sums[s1],
        change_value=c1,
        fee_paid=w1 * alpha,
        exact_match=False,
    )
    second = SelectionResult(
        inputs=frozenset(_mask_ids(utxos, s2)) | {CHANGE_ID},
        input_value=sums[s2] + c1,
        change_value=0,
        fee_paid=w2 * alpha + r2,
        exact_match=True,
    )
    return first, second


def select_myopic(pool: UtxoPool, t1: int, t2: int,
                  cap: int = SOLVER_CAP) -> tuple[SelectionResult, SelectionResult]:
    """Two sequential minimum-cardinality selections; the second period may
    spend the first period's change."""
    if t1 <= 0 or t2 <= 0:
        raise ValueError("both targets must be positive")
    utxos = list(pool)
    if len(utxos) > cap:
        raise CapExceeded(f"{len(utxos)} utxos exceed solver cap {cap}")
    idx1 = subset_min_inputs([u.value for u in utxos], t1, cap=cap)
    s1 = [utxos[i] for i in idx1]
    res1 = result_for(s1, t1)
    remaining = [u for i, u in enumerate(utxos) if i not in set(idx1)]
    if res1.change_value > 0:
        remaining.append(Utxo(id=CHANGE_ID, value=res1.change_value,
                              address_id=CHANGE_ID))
    remaining.sort(key=lambda u: u.id)
    idx2 = subset_min_inputs([u.value for u in remaining], t2, cap=cap)
    res2 = result_for([remaining[i] for i in idx2], t2)
    return res1, res2


@dataclass(frozen=True, slots=True)
class StrategicParams:
    """Privacy weight lambda and the two known targets."""

    lam: float
    targets: tuple[int, int]

    def __post_init__(self):
        if not 0 <= self.lam <= 1:
            raise ValueError("lambda must be in [0, 1]")
        if min(self.targets) <= 0:
            raise ValueError("both targets must be positive")


def select_strategic(pool: UtxoPool, params: StrategicParams,
                     cap: int = PAIR_CAP) -> tuple[SelectionResult, SelectionResult]:
    """Joint two-period selection minimizing
    (1-lambda) * |S1 union S2| + lambda * [address reuse or change reuse].

    S2 draws from the pool minus S1, optionally plus the first period's
    change.  Ties go to the smaller joint cardinality, then lexicographic
    ids.
    """
    t1, t2 = params.targets
    lam = params.lam
    utxos = list(pool)
    n = len(utxos)
    if n > cap:
        raise CapExceeded(f"{n} utxos exceed pair-search cap {cap}")
    values = [u.value for u in utxos]
    sums = _subset_sums(values)
    addresses = sorted({u.address_id for u in utxos})
    addr_bit = {a: 1 << i for i, a in enumerate(addresses)}
    addr_mask = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        addr_mask[mask] = addr_mask[mask ^ low] | addr_bit[utxos[low.bit_length() - 1].address_id]
    full = (1 << n) - 1

    best_key = None
    tied = []
    for s1 in range(1, 1 << n):
        if sums[s1] < t1:
            continue
        c1 = sums[s1] - t1
        comp = full & ~s1
        k1 = bin(s1).count("1")
        for use_c1 in (0, 1):
            if use_c1 and c1 == 0:
                continue
            base2 = c1 if use_c1 else 0
            s2 = comp
            while True:
                if sums[s2] + base2 >= t2 and (s2 or use_c1):
                    size = k1 + bin(s2).count("1") + use_c1
                    indicator = 1 if (use_c1 or (addr_mask[s1] & addr_mask[s2])) else 0
                    obj = (1 - lam) * size + lam * indicator
                    key = (obj, size)
                    if best_key is None or key < best_key:
                        best_key = key
                        tied = [(s1, s2, use_c1)]
                    elif key == best_key:
                        tied.append((s1, s2, use_c1))
                if s2 == 0:
                    break
                s2 = (s2 - 1) & comp
    if best_key is None:
        raise Infeasible("no disjoint selections cover both targets")

    def lex_key(entry):
        s1, s2, use_c1 = entry
        ids2 = _mask_ids(utxos, s2)
        if use_c1:
            ids2 = tuple(sorted(ids2 + (CHANGE_ID,)))
        return (_mask_ids(utxos, s1), ids2)

    s1, s2, use_c1 = min(tied, key=lex_key)
    chosen1 = [u for i, u in enumerate(utxos) if s1 >> i & 1]
    res1 = result_for(chosen1, t1)
    ids2 = set(_mask_ids(utxos, s2))
    value2 = sums[s2]
    if use_c1:
        ids2.add(CHANGE_ID)
        value2 += res1.change_value
    res2 = SelectionResult(
        inputs=frozenset(ids2),
        input_value=value2,
        change_value=value2 - t2,
        fee_paid=0,
        exact_match=(value2 == t2),
    )
    return res1, res2


def fitness(candidate, target: int) -> Fraction:
    """1 / (value - target + count); larger is better, 1 is the maximum."""
    chosen = list(candidate)
    if not chosen:
        raise ValueError("candidate must not be empty")
    value = sum(u.value for u in chosen)
    if value < target:
        raise ValueError("candidate does not cover the target")
    return Fraction(1, value - target + len(chosen))


@dataclass(frozen=True, slots=True)
class GeneticParams:
    """Population/generation counts, operator rates and the run seed."""

    population: int = 50
    generations: int = 200
    crossover_prob: float = 0.8
    mutation_prob: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if not 0 <= self.crossover_prob <= 1:
            raise ValueError("crossover_prob must be in [0, 1]")
        if not 0 <= self.mutation_prob <= 1:
            raise ValueError("mutation_prob must be in [0, 1]")


def select_greedy_genetic(pool: UtxoPool, target: int,
                          params: GeneticParams) -> SelectionResult:
    """Greedy-seeded genetic search over inclusion bitstrings.

    Individuals are bitmasks over the value-descending utxo order; children
    that fall below the target are repaired by greedily re-adding the
    largest missing utxos.  The best individual ever seen is returned, so
    the result is never worse than the greedy seed.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    total = pool.total_value
    if total < target:
        raise InsufficientFunds(
            f"pool value {total} cannot cover target {target}")
    if total == target:
        return result_for(list(pool), target)
    singles = [u for u in pool.members_unordered() if u.value >= target]
    if singles:
        best_single = min(singles, key=lambda u: (u.value, u.id))
        return result_for([best_single], target)

    desc = sorted(pool.members_unordered(), key=lambda u: (-u.value, u.id))
    values = [u.value for u in desc]
    n = len(desc)
    rng = Splitmix64(params.seed)

    def mask_sum(mask):
        return sum(values[i] for i in range(n) if mask >> i & 1)

    def repair(mask):
        s = mask_sum(mask)
        for i in range(n):
            if s >= target:
                break
            if not mask >> i & 1:
                mask |= 1 << i
                s += values[i]
        return mask, s

    def score(s, mask):
        return Fraction(1, s - target + bin(mask).count("1"))

    greedy_ids = select_greedy(pool, target).inputs
    greedy_mask = 0
    for i, u in enumerate(desc):
        if u.id in greedy_ids:
            greedy_mask |= 1 << i

    def draw_feasible():
        # Rejection-sample a feasible subset; fall back to greedy repair if
        # feasibility is too rare to hit by luck.
        for _ in range(64):
            mask = 0
            for i in range(n):
                if rng.next_bool():
                    mask |= 1 << i
            if mask_sum(mask) >= target:
                return mask
        mask, _ = repair(mask)
        return mask

    population = [greedy_mask]
    for _ in range(params.population - 1):
        population.append(draw_feasible())

    def finish(mask):
        chosen = [desc[i] for i in range(n) if mask >> i & 1]
        return result_for(chosen, target)

    best_mask = None
    best_fit = None
    best_sum = None
    for mask in population:
        s = mask_sum(mask)
        fit = score(s, mask)
        if best_fit is None or fit > best_fit:
            best_fit, best_mask, best_sum = fit, mask, s
    if best_sum == target:
        return finish(best_mask)

    for _ in range(params.generations - 1):
        fits = [float(score(mask_sum(m), m)) for m in population]
        cum = []
        acc = 0.0
        for f in fits:
            acc += f
            cum.append(acc)
        survivors = []
        for _ in range(params.population):
            pick = rng.next_double() * acc
            lo = 0
            while lo < len(cum) - 1 and cum[lo] < pick:
                lo += 1
            survivors.append(population[lo])
        for a in range(0, len(survivors) - 1, 2):
            if rng.next_double() < params.crossover_prob and n > 1:
                cut = 1 + rng.next_below(n - 1)
                low = (1 << cut) - 1
                x, y = survivors[a], survivors[a + 1]
                survivors[a] = (x & low) | (y & ~low)
                survivors[a + 1] = (y & low) | (x & ~low)
        next_pop = []
        for mask in survivors:
            for i in range(n):
                if rng.next_double() < params.mutation_prob:
                    mask ^= 1 << i
            mask, s = repair(mask)
            next_pop.append(mask)
            fit = score(s, mask)
            if fit > best_fit:
                best_fit, best_mask, best_sum = fit, mask, s
        population = next_pop
        if best_sum == target:
            return finish(best_mask)

    return finish(best_mask)
