# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot selection loops.

Semantics (including the SplitMix64 draw sequence) must match ``_pure.py``
bit for bit; the parity tests enforce this.
"""

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc


cdef inline uint64_t _next_u64(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


def knapsack_select(int64_t[::1] values, int64_t target, long long repeats,
                    unsigned long long state):
    """See _pure.knapsack_select."""
    cdef Py_ssize_t n = values.shape[0]
    cdef uint64_t s = state
    cdef char* included = <char*>malloc(n if n > 0 else 1)
    cdef char* best_mask = <char*>malloc(n if n > 0 else 1)
    cdef bint have_best = False
    cdef int64_t best_sum = 0
    cdef int64_t sel
    cdef bint reached
    cdef long long attempt
    cdef int phase
    cdef Py_ssize_t i, k
    if included == NULL or best_mask == NULL:
        free(included)
        free(best_mask)
        raise MemoryError()
    try:
        for attempt in range(repeats):
            for i in range(n):
                included[i] = 0
            sel = 0
            reached = False
            for phase in range(1, 3):
                if reached:
                    break
                for i in range(n):
                    if included[i]:
                        continue
                    if phase == 1 and not (_next_u64(&s) & 1):
                        continue
                    included[i] = 1
                    sel += values[i]
                    if sel == target:
                        return bytes(included[:n]), True, s
                    if sel > target:
                        reached = True
                        if not have_best or sel < best_sum:
                            have_best = True
                            best_sum = sel
                            for k in range(n):
                                best_mask[k] = included[k]
                        included[i] = 0
                        sel -= values[i]
        if have_best:
            return bytes(best_mask[:n]), False, s
        return None, False, s
    finally:
        free(included)
        free(best_mask)


cdef bytes _bnb_recurse(int64_t[::1] eff, int64_t lower, int64_t upper,
                        long long* budget, bint randomized, uint64_t* state,
                        char* chosen, Py_ssize_t depth, int64_t current):
    cdef Py_ssize_t n = eff.shape[0]
    cdef bint include_first
    cdef bint take
    cdef int leg
    cdef bytes found
    budget[0] -= 1
    if current > upper:
        return None
    if current >= lower:
        return bytes(chosen[:n])
    if budget[0] <= 0:
        return None
    if depth >= n:
        return None
    if randomized:
        include_first = <bint>(_next_u64(state) & 1)
    else:
        include_first = True
    for leg in range(2):
        take = include_first if leg == 0 else (not include_first)
        if take:
            chosen[depth] = 1
            found = _bnb_recurse(eff, lower, upper, budget, randomized, state,
                                 chosen, depth + 1, current + eff[depth])
            chosen[depth] = 0
        else:
            found = _bnb_recurse(eff, lower, upper, budget, randomized, state,
                                 chosen, depth + 1, current)
        if found is not None:
            return found
    return None


def bnb_search(int64_t[::1] eff, int64_t lower, int64_t upper,
               long long rounds, bint randomized, unsigned long long state):
    """See _pure.bnb_search."""
    cdef Py_ssize_t n = eff.shape[0]
    cdef uint64_t s = state
    cdef long long budget = rounds
    cdef char* chosen = <char*>malloc(n if n > 0 else 1)
    cdef Py_ssize_t i
    cdef bytes result
    if chosen == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            chosen[i] = 0
        result = _bnb_recurse(eff, lower, upper, &budget, randomized, &s,
                              chosen, 0, 0)
        return result, s
    finally:
        free(chosen)
