"""Pure-Python fallback kernels for the hot selection loops.

These mirror the compiled core in ``_core.pyx`` exactly, including the
SplitMix64 draw sequence, so a given seed selects the same utxos whichever
backend is active.  Keep the two files in lockstep; the parity tests compare
them draw for draw.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1


def _next_u64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), state


def knapsack_select(values, target, repeats, state):
    """Repeated two-pass stochastic knapsack over value-descending utxos.

    Per attempt: pass 1 includes each utxo with probability 1/2, pass 2
    force-includes the remainder.  An exact hit returns immediately; an
    overshoot is recorded if it beats the best seen, then the last-added
    utxo is removed so smaller utxos can still be probed.

    Returns (selection mask or None, exact flag, new rng state).
    """
    n = len(values)
    best_sum = None
    best_mask = None
    for _ in range(repeats):
        included = bytearray(n)
        sel = 0
        reached = False
        for phase in (1, 2):
            if reached:
                break
            for i in range(n):
                if included[i]:
                    continue
                if phase == 1:
                    word, state = _next_u64(state)
                    if not (word & 1):
                        continue
                included[i] = 1
                sel += values[i]
                if sel == target:
                    return bytes(included), True, state
                if sel > target:
                    reached = True
                    if best_sum is None or sel < best_sum:
                        best_sum = sel
                        best_mask = bytes(included)
                    included[i] = 0
                    sel -= values[i]
    return best_mask, False, state


def bnb_search(eff, lower, upper, rounds, randomized, state):
    """Bounded DFS for a selection with effective value in [lower, upper].

    ``eff`` must be sorted descending.  Each recursion step spends one round;
    the search gives up when the budget runs out.  ``randomized`` picks the
    branch order per node by coin flip, otherwise inclusion goes first.

    Returns (selection mask or None, new rng state).
    """
    n = len(eff)
    chosen = bytearray(n)
    budget = [rounds]
    state_box = [state]

    def recurse(depth, current):
        budget[0] -= 1
        if current > upper:
            return None
        if current >= lower:
            return bytes(chosen)
        if budget[0] <= 0:
            return None
        if depth >= n:
            return None
        if randomized:
            word, state_box[0] = _next_u64(state_box[0])
            include_first = bool(word & 1)
        else:
            include_first = True
        for include in ((True, False) if include_first else (False, True)):
            if include:
                chosen[depth] = 1
                found = recurse(depth + 1, current + eff[depth])
                chosen[depth] = 0
            else:
                found = recurse(depth + 1, current)
            if found is not None:
                return found
        return None

    result = recurse(0, 0)
    return result, state_box[0]
