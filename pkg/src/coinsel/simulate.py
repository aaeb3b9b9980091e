"""Wallet workload simulation: iterated targets and deposits against one
selector, collecting pool-size, input-count and dust metrics.

Deposits and targets come from one NumPy PCG64 stream seeded by
``workload_seed``, so every algorithm run against the same seed sees the
identical (target, deposits) sequence.  All selector randomness comes from
a separate SplitMix64 stream seeded by ``algorithm_seed``.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .advanced import GeneticParams, IlpParams, select_greedy_genetic, select_ilp_two_phase
from .basic import (BnbParams, select_bnb, select_greedy, select_knapsack,
                    select_random_draw, select_random_improve)
from .domain import (FeeParams, PayRequestSet, SelectionResult, Utxo,
                     UtxoPool, utxo_to_dict)
from .errors import Infeasible, InsufficientFunds
from .primitive import POLICY_BY_NAME, select_primitive
from .rng import Splitmix64

PRIMITIVE_ALGOS = ("fifo", "lifo", "hvf", "lvf", "hpf")
BASIC_ALGOS = ("greedy", "randomdraw", "randomimprove", "knapsack", "bnb")
ADVANCED_SIM_ALGOS = ("genetic", "ilp")
SIM_ALGOS = PRIMITIVE_ALGOS + BASIC_ALGOS + ADVANCED_SIM_ALGOS

AGE_KEYED = {"fifo", "lifo", "hpf"}

# Histogram of final pool values, per the evaluation figures: fixed-width
# buckets up to 2000 plus one overflow bucket.
HIST_BUCKET = 50
HIST_RANGE = 2000

# Advanced selectors run on a bounded candidate window because their exact
# backend caps instance size: the largest utxos plus seeded-random others.
WINDOW_SIZE = 20


@dataclass(frozen=True, slots=True)
class WorkloadSpec:
    """Distribution of one draw stream: normal (truncated positive) or poisson."""

    kind: str
    mean: int
    stddev: int = 0

    def __post_init__(self):
        if self.kind not in ("normal", "poisson"):
            raise ValueError(f"unknown workload kind: {self.kind}")
        if self.mean <= 0:
            raise ValueError("mean must be positive")
        if self.stddev < 0:
            raise ValueError("stddev must be non-negative")


def sample(workload: WorkloadSpec, rng: np.random.Generator) -> int:
    """One positive integer draw; normal samples are redrawn until > 0."""
    while True:
        if workload.kind == "normal":
            value = int(round(rng.normal(workload.mean, workload.stddev)))
        else:
            value = int(rng.poisson(workload.mean))
        if value > 0:
            return value


@dataclass(frozen=True, slots=True)
class SimConfig:
    initial_balance: int = 100_000
    iterations: int = 10_000
    deposits_per_iteration: int = 3
    deposit_workload: WorkloadSpec = WorkloadSpec("normal", 1000, 250)
    target_workload: WorkloadSpec = WorkloadSpec("normal", 3000, 500)
    algorithm: str = "hvf"
    algorithm_params: dict = field(default_factory=dict)
    workload_seed: int = 1
    algorithm_seed: int = 2
    dust_threshold: int = 10
    fee_params: FeeParams | None = None  # None = fee-free accounting

    def __post_init__(self):
        if self.initial_balance <= 0:
            raise ValueError("initial_balance must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.deposits_per_iteration < 0:
            raise ValueError("deposits_per_iteration must be non-negative")
        if self.algorithm not in SIM_ALGOS:
            raise ValueError(f"unknown algorithm: {self.algorithm}")


def config_from_dict(data: dict) -> SimConfig:
    """Parse the JSON config file format (field names mirror SimConfig)."""
    kwargs = dict(data)
    for key in ("deposit_workload", "target_workload"):
        if key in kwargs:
            kwargs[key] = WorkloadSpec(**kwargs[key])
    fee_mode = kwargs.pop("fee_mode", "off")
    if fee_mode != "off":
        kwargs["fee_params"] = FeeParams(**fee_mode)
    return SimConfig(**kwargs)


@dataclass(slots=True)
class MetricsReport:
    """Per-iteration series plus end-of-run aggregates for one scenario."""

    algorithm: str
    iterations: int
    pool_size_series: list[int]
    dust_count_series: list[int]
    input_count_histogram: dict[int, int]
    value_histogram: list[tuple[int, int | None, int]]
    insufficient_events: int
    final_pool: UtxoPool
    fee_total: int

    def mean_inputs(self) -> float:
        total = sum(k * v for k, v in self.input_count_histogram.items())
        count = sum(self.input_count_histogram.values())
        return total / count if count else 0.0

    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "iterations": self.iterations,
            "final_pool_size": self.pool_size_series[-1],
            "final_total_value": self.final_pool.total_value,
            "final_dust_count": self.dust_count_series[-1],
            "mean_inputs": round(self.mean_inputs(), 6),
            "max_inputs": max(self.input_count_histogram, default=0),
            "payments": sum(self.input_count_histogram.values()),
            "insufficient_events": self.insufficient_events,
            "fee_total": self.fee_total,
        }


def _value_histogram(pool: UtxoPool) -> list[tuple[int, int | None, int]]:
    buckets = [0] * (HIST_RANGE // HIST_BUCKET)
    overflow = 0
    for u in pool.members_unordered():
        if u.value >= HIST_RANGE:
            overflow += 1
        else:
            buckets[u.value // HIST_BUCKET] += 1
    rows: list[tuple[int, int | None, int]] = [
        (i * HIST_BUCKET, (i + 1) * HIST_BUCKET, count)
        for i, count in enumerate(buckets)
    ]
    rows.append((HIST_RANGE, None, overflow))
    return rows


def _window_pool(pool: UtxoPool, rng: Splitmix64, size: int = WINDOW_SIZE) -> UtxoPool:
    """Candidate window for capped selectors: largest half plus random half."""
    utxos = sorted(pool.members_unordered(), key=lambda u: (-u.value, u.id))
    if len(utxos) <= size:
        return pool
    top = utxos[:size // 2]
    rest = sorted(utxos[size // 2:], key=lambda u: u.id)
    extra = []
    for _ in range(size - len(top)):
        extra.append(rest.pop(rng.next_below(len(rest))))
    return UtxoPool(top + extra)


def _make_selector(config: SimConfig, rng: Splitmix64):
    algo = config.algorithm
    params = config.algorithm_params
    fee = config.fee_params or FeeParams()
    if algo in PRIMITIVE_ALGOS:
        policy = POLICY_BY_NAME[algo]
        return lambda pool, target: select_primitive(pool, target, policy)
    if algo == "greedy":
        return lambda pool, target: select_greedy(pool, target)
    if algo == "randomdraw":
        return lambda pool, target: select_random_draw(pool, target, rng)
    if algo == "randomimprove":
        max_inputs = params.get("max_inputs")
        return lambda pool, target: select_random_improve(
            pool, target, max_inputs if max_inputs else len(pool), rng)
    if algo == "knapsack":
        repeats = params.get("repeats", 1000)
        return lambda pool, target: select_knapsack(pool, target, repeats, rng)
    if algo == "bnb":
        bnb = BnbParams(
            rounds=params.get("rounds", 1000),
            min_change=params.get("min_change", 0),
            branch_policy=params.get("branch_policy", "randomized"),
            fee=fee,
        )
        return lambda pool, target: select_bnb(pool, target, bnb, rng)
    if algo == "genetic":
        def run_genetic(pool, target):
            gp = GeneticParams(
                population=params.get("population", 50),
                generations=params.get("generations", 200),
                crossover_prob=params.get("crossover_prob", 0.8),
                mutation_prob=params.get("mutation_prob", 0.02),
                seed=rng.next_u64(),
            )
            return select_greedy_genetic(_window_pool(pool, rng), target, gp)
        return run_genetic
    if algo == "ilp":
        ilp = IlpParams(fee=fee, gamma=params.get("gamma", 0.5))
        return lambda pool, target: select_ilp_two_phase(
            _window_pool(pool, rng), PayRequestSet((target,)), ilp)
    raise ValueError(f"unknown algorithm: {algo}")  # pragma: no cover


def run_simulation(config: SimConfig) -> MetricsReport:
    """Run one scenario: see the module docstring for the stream contract.

    Per iteration: draw a target; skip the payment (recording an
    insufficient event) if the pool cannot cover it, otherwise select,
    remove the inputs and add any change with age 0; then add the
    deposits.  Utxo ages advance once per iteration.
    """
    workload_rng = np.random.default_rng(config.workload_seed)
    algo_rng = Splitmix64(config.algorithm_seed)
    selector = _make_selector(config, algo_rng)
    needs_age = config.algorithm in AGE_KEYED
    dust_limit = config.dust_threshold

    pool = UtxoPool()
    birth: dict[str, int] = {}

    def add_utxo(utxo: Utxo, now: int):
        pool.add(utxo)
        birth[utxo.id] = now
        return 1 if utxo.value < dust_limit else 0

    dust_count = add_utxo(
        Utxo(id="init", value=config.initial_balance, address_id="addr-init"), 0)

    pool_sizes = [len(pool)]
    dust_series = [dust_count]
    input_hist: dict[int, int] = {}
    insufficient = 0
    fee_total = 0

    def aged_view(now: int) -> UtxoPool:
        view = UtxoPool()
        for u in pool.members_unordered():
            view.add(Utxo(id=u.id, value=u.value, size_bytes=u.size_bytes,
                          age=now - birth[u.id], address_id=u.address_id))
        return view

    for t in range(1, config.iterations + 1):
        target = sample(config.target_workload, workload_rng)
        result: SelectionResult | None = None
        if pool.total_value < target:
            insufficient += 1
        else:
            view = aged_view(t) if needs_age else pool
            try:
                result = selector(view, target)
            except (InsufficientFunds, Infeasible):
                insufficient += 1
        if result is not None:
            for uid in result.inputs:
                removed = pool.remove(uid)
                del birth[uid]
                if removed.value < dust_limit:
                    dust_count -= 1
            n_inputs = len(result.inputs)
            input_hist[n_inputs] = input_hist.get(n_inputs, 0) + 1
            fee_total += result.fee_paid
            if result.change_value > 0:
                dust_count += add_utxo(
                    Utxo(id=f"c{t}", value=result.change_value,
                         address_id=f"addr-c{t}"), t)
        for k in range(config.deposits_per_iteration):
            value = sample(config.deposit_workload, workload_rng)
            dust_count += add_utxo(
                Utxo(id=f"d{t}-{k}", value=value, address_id=f"addr-d{t}-{k}"), t)
        pool_sizes.append(len(pool))
        dust_series.append(dust_count)

    final_pool = aged_view(config.iterations)
    return MetricsReport(
        algorithm=config.algorithm,
        iterations=config.iterations,
        pool_size_series=pool_sizes,
        dust_count_series=dust_series,
        input_count_histogram=input_hist,
        value_histogram=_value_histogram(final_pool),
        insufficient_events=insufficient,
        final_pool=final_pool,
        fee_total=fee_total,
    )


def _write_csv(path: str, header: list[str], rows) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def export_metrics(report: MetricsReport, out_dir: str) -> list[str]:
    """Write the CSV series and summary.json; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    path = os.path.join(out_dir, "pool_size.csv")
    _write_csv(path, ["iteration", "size"],
               enumerate(report.pool_size_series))
    written.append(path)

    path = os.path.join(out_dir, "input_counts.csv")
    _write_csv(path, ["inputs", "transactions"],
               sorted(report.input_count_histogram.items()))
    written.append(path)

    path = os.path.join(out_dir, "value_histogram.csv")
    _write_csv(path, ["bucket_low", "bucket_high", "count"],
               [(low, "" if high is None else high, count)
                for low, high, count in report.value_histogram])
    written.append(path)

    path = os.path.join(out_dir, "dust.csv")
    _write_csv(path, ["iteration", "count"],
               enumerate(report.dust_count_series))
    written.append(path)

    path = os.path.join(out_dir, "summary.json")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    written.append(path)
    return written


def final_pool_snapshot(report: MetricsReport) -> list[dict]:
    return [utxo_to_dict(u) for u in report.final_pool]
