"""Command-line front end: one-shot selection, simulation runs, and
cross-algorithm comparison under a shared workload stream.

stdout carries machine-readable JSON/CSV only; diagnostics go to stderr.
Exit codes: 0 success, 1 infeasible/insufficient or scenario failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

from .advanced import (GeneticParams, IlpParams, LeverageProblem,
                       StrategicParams, select_greedy_genetic,
                       select_ilp_two_phase, select_knapsack_leverage,
                       select_myopic, select_strategic)
from .basic import (BnbParams, select_bnb, select_greedy, select_knapsack,
                    select_random_draw, select_random_improve)
from .domain import FeeParams, PayRequestSet, load_pool
from .errors import CoinSelError, Infeasible, InsufficientFunds
from .primitive import POLICY_BY_NAME, select_primitive
from .simulate import SIM_ALGOS, config_from_dict, export_metrics, run_simulation

SELECT_ALGOS = ("fifo", "lifo", "hvf", "lvf", "hpf",
                "greedy", "randomdraw", "randomimprove", "knapsack", "bnb",
                "ilp", "leverage", "myopic", "strategic", "genetic")

TWO_RESULT_ALGOS = ("leverage", "myopic", "strategic")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coinsel",
        description="Coin selection algorithms and wallet simulation")
    sub = parser.add_subparsers(dest="verb", required=True)

    sel = sub.add_parser("select", help="run one selector against a pool file")
    sel.add_argument("pool", help="JSON pool file")
    sel.add_argument("--algo", required=True, choices=SELECT_ALGOS)
    sel.add_argument("--target", required=True, type=int)
    sel.add_argument("--seed", type=int, default=0,
                     help="64-bit seed for randomized selectors")
    sel.add_argument("--rounds", type=int, default=1000)
    sel.add_argument("--repeats", type=int, default=1000)
    sel.add_argument("--max-inputs", type=int, default=0,
                     help="0 means no limit")
    sel.add_argument("--fee-per-byte", type=int, default=0)
    sel.add_argument("--min-change", type=int, default=0)
    sel.add_argument("--dust-threshold", type=int, default=0)
    sel.add_argument("--max-overpay", type=int, default=0)
    sel.add_argument("--branch-policy", default="randomized",
                     choices=("randomized", "inclusion_first"))
    sel.add_argument("--gamma", type=float, default=0.5)
    sel.add_argument("--lambda", dest="lam", type=float, default=0.5)
    sel.add_argument("--population", type=int, default=50)
    sel.add_argument("--generations", type=int, default=200)
    sel.add_argument("--t2", type=int, default=0,
                     help="second target / second request value")

    sim = sub.add_parser("simulate", help="run one simulation scenario")
    sim.add_argument("--config", required=True, help="JSON config file")
    sim.add_argument("--out", required=True, help="output directory")

    cmp_ = sub.add_parser("compare",
                          help="run several algorithms on one workload")
    cmp_.add_argument("--config", required=True, help="JSON config file")
    cmp_.add_argument("--algos", required=True,
                      help="comma-separated algorithm list")
    cmp_.add_argument("--out", required=True, help="output directory")
    return parser


def _fee_params(args) -> FeeParams:
    return FeeParams(
        fee_per_byte=args.fee_per_byte,
        dust_threshold=args.dust_threshold,
        min_change=max(args.min_change, 1),
        max_overpay=args.max_overpay,
    )


def _requests(args) -> PayRequestSet:
    targets = [args.target]
    if args.t2:
        targets.append(args.t2)
    return PayRequestSet(tuple(sorted(targets, reverse=True)))


def cmd_select(args) -> int:
    pool = load_pool(args.pool)
    algo = args.algo
    max_inputs = args.max_inputs if args.max_inputs > 0 else max(len(pool), 1)
    try:
        if algo in POLICY_BY_NAME:
            result = select_primitive(pool, args.target, POLICY_BY_NAME[algo])
        elif algo == "greedy":
            result = select_greedy(pool, args.target)
        elif algo == "randomdraw":
            result = select_random_draw(pool, args.target, args.seed)
        elif algo == "randomimprove":
            result = select_random_improve(pool, args.target, max_inputs, args.seed)
        elif algo == "knapsack":
            result = select_knapsack(pool, args.target, args.repeats, args.seed)
        elif algo == "bnb":
            params = BnbParams(rounds=args.rounds, min_change=args.min_change,
                               branch_policy=args.branch_policy,
                               fee=FeeParams(fee_per_byte=args.fee_per_byte))
            result = select_bnb(pool, args.target, params, args.seed)
        elif algo == "ilp":
            result = select_ilp_two_phase(
                pool, _requests(args), IlpParams(fee=_fee_params(args),
                                                 gamma=args.gamma))
        elif algo == "genetic":
            result = select_greedy_genetic(
                pool, args.target,
                GeneticParams(population=args.population,
                              generations=args.generations, seed=args.seed))
        elif algo == "leverage":
            first, second = select_knapsack_leverage(
                LeverageProblem(pool=pool, requests=_requests(args),
                                fee=_fee_params(args)))
            print(json.dumps({"first": first.to_dict(),
                              "second": second.to_dict() if second else None},
                             sort_keys=True))
            return 0
        elif algo == "myopic":
            if args.t2 <= 0:
                print("myopic requires --t2", file=sys.stderr)
                return 2
            first, second = select_myopic(pool, args.target, args.t2)
            print(json.dumps({"first": first.to_dict(),
                              "second": second.to_dict()}, sort_keys=True))
            return 0
        else:  # strategic
            if args.t2 <= 0:
                print("strategic requires --t2", file=sys.stderr)
                return 2
            first, second = select_strategic(
                pool, StrategicParams(lam=args.lam,
                                      targets=(args.target, args.t2)))
            print(json.dumps({"first": first.to_dict(),
                              "second": second.to_dict()}, sort_keys=True))
            return 0
    except (InsufficientFunds, Infeasible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(result.to_dict(), sort_keys=True))
    return 0


def _load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def cmd_simulate(args) -> int:
    try:
        config = _load_config(args.config)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    report = run_simulation(config)
    export_metrics(report, args.out)
    print(json.dumps(report.summary(), sort_keys=True))
    return 0


def cmd_compare(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if len(algos) < 2:
        print("compare needs at least two algorithms", file=sys.stderr)
        return 1
    unknown = [a for a in algos if a not in SIM_ALGOS]
    if unknown:
        print(f"unknown algorithms: {', '.join(unknown)}", file=sys.stderr)
        return 1
    try:
        base = _load_config(args.config)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    reports = {}
    for algo in algos:
        try:
            reports[algo] = run_simulation(replace(base, algorithm=algo))
        except CoinSelError as exc:
            print(f"scenario {algo} failed: {exc}", file=sys.stderr)
            return 1
    os.makedirs(args.out, exist_ok=True)

    path = os.path.join(args.out, "pool_size.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration"] + algos)
        for i in range(base.iterations + 1):
            writer.writerow([i] + [reports[a].pool_size_series[i] for a in algos])

    path = os.path.join(args.out, "input_counts.csv")
    all_counts = sorted({k for r in reports.values()
                         for k in r.input_count_histogram})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["inputs"] + algos)
        for k in all_counts:
            writer.writerow(
                [k] + [reports[a].input_count_histogram.get(k, 0) for a in algos])

    summaries = {a: reports[a].summary() for a in algos}
    with open(os.path.join(args.out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summaries, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(summaries, sort_keys=True))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verb == "select":
        return cmd_select(args)
    if args.verb == "simulate":
        return cmd_simulate(args)
    return cmd_compare(args)


if __name__ == "__main__":
    sys.exit(main())
