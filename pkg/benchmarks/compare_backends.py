"""Benchmark the compiled selection kernels against the pure-Python fallback.

Usage:
    python benchmarks/compare_backends.py [--pools N] [--size N] [--repeats N]

Both backends are driven with identical inputs and seeds, so results are
cross-checked for equality while timing.  If the compiled core is
unavailable the script reports that and times the pure backend alone.
"""

import argparse
import random
import time

from coinsel import _backend, _pure

# _backend routes to the compiled kernels (plus input conversion) when they
# are available; comparing it against _pure therefore measures the speedup a
# caller actually sees.
core = _backend if _backend.HAVE_CORE else None


def make_cases(pools, size, seed):
    rand = random.Random(seed)
    cases = []
    for _ in range(pools):
        values = sorted((rand.randint(1, 10_000) for _ in range(size)),
                        reverse=True)
        target = rand.randint(1, sum(values) // 2)
        cases.append((values, target, rand.getrandbits(64)))
    return cases


def time_knapsack(module, cases, repeats):
    start = time.perf_counter()
    results = [module.knapsack_select(values, target, repeats, state)
               for values, target, state in cases]
    return time.perf_counter() - start, results


def time_bnb(module, cases, rounds):
    start = time.perf_counter()
    results = [module.bnb_search(values, target, target + 100, rounds,
                                 True, state)
               for values, target, state in cases]
    return time.perf_counter() - start, results


def row(name, pure_s, compiled_s):
    speedup = f"{pure_s / compiled_s:6.1f}x" if compiled_s else "    n/a"
    compiled = f"{compiled_s * 1e3:13.1f}" if compiled_s else "          n/a"
    print(f"{name:<18}{pure_s * 1e3:10.1f}{compiled}{speedup:>10}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pools", type=int, default=200)
    parser.add_argument("--size", type=int, default=30)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--rounds", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()

    print(f"compiled core available: {_backend.HAVE_CORE}")
    print(f"{args.pools} pools of {args.size} utxos, "
          f"knapsack repeats={args.repeats}, bnb rounds={args.rounds}")
    print(f"{'kernel':<18}{'pure ms':>10}{'compiled ms':>13}{'speedup':>10}")

    cases = make_cases(args.pools, args.size, args.seed)

    pure_t, pure_res = time_knapsack(_pure, cases, args.repeats)
    compiled_t = None
    if core:
        compiled_t, compiled_res = time_knapsack(core, cases, args.repeats)
        assert pure_res == compiled_res, "knapsack backends disagree"
    row("knapsack_select", pure_t, compiled_t)

    pure_t, pure_res = time_bnb(_pure, cases, args.rounds)
    compiled_t = None
    if core:
        compiled_t, compiled_res = time_bnb(core, cases, args.rounds)
        assert pure_res == compiled_res, "bnb backends disagree"
    row("bnb_search", pure_t, compiled_t)


if __name__ == "__main__":
    main()
