"""Core data model: UTXOs, pools, fee parameters and selection results.

Amounts are unsigned integers in base units.  Decimal token values from the
literature are represented scaled by 100 so that subset-sum arithmetic stays
exact; floating point would break exact-match detection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import AmountError, CapExceeded

# Amounts must stay within a signed 64-bit word so the compiled kernels can
# operate on them directly.
MAX_AMOUNT = (1 << 63) - 1

DEFAULT_ENUMERATION_CAP = 20


def check_amount(value: int, what: str = "amount") -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise AmountError(f"{what} must be an integer, got {value!r}")
    if value < 0:
        raise AmountError(f"{what} must be non-negative, got {value}")
    if value > MAX_AMOUNT:
        raise AmountError(f"{what} overflows 63-bit range: {value}")
    return value


def checked_sum(values: Iterable[int], what: str = "sum") -> int:
    total = sum(values)
    if total > MAX_AMOUNT:
        raise AmountError(f"{what} overflows 63-bit range: {total}")
    return total


@dataclass(frozen=True, slots=True)
class Utxo:
    """One unspent output: value, byte size, confirmation age and address."""

    id: str
    value: int
    size_bytes: int = 148
    age: int = 0
    address_id: str = ""

    def __post_init__(self):
        check_amount(self.value, "utxo value")
        if self.size_bytes <= 0:
            raise ValueError(f"size_bytes must be positive, got {self.size_bytes}")
        if self.age < 0:
            raise ValueError(f"age must be non-negative, got {self.age}")


@dataclass(frozen=True, slots=True)
class FeeParams:
    """Fee rate, per-field byte constants and change thresholds.

    The byte constants (10, 148, 34) are the standard header / input /
    output sizes used throughout the fee formulas.
    """

    fee_per_byte: int = 0
    header_bytes: int = 10
    input_bytes: int = 148
    output_bytes: int = 34
    dust_threshold: int = 0
    min_change: int = 1
    change_output_bytes: int = 34
    max_tx_bytes: int = 100_000
    max_overpay: int = 0

    def __post_init__(self):
        for name in ("header_bytes", "input_bytes", "output_bytes",
                     "change_output_bytes", "max_tx_bytes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        check_amount(self.fee_per_byte, "fee_per_byte")
        check_amount(self.dust_threshold, "dust_threshold")
        check_amount(self.min_change, "min_change")
        check_amount(self.max_overpay, "max_overpay")


@dataclass(frozen=True, slots=True)
class SelectionResult:
    """Chosen inputs plus the implied change, fee and exact-match flag."""

    inputs: frozenset[str]
    input_value: int
    change_value: int
    fee_paid: int
    exact_match: bool

    def __post_init__(self):
        check_amount(self.input_value, "input_value")
        check_amount(self.change_value, "change_value")
        check_amount(self.fee_paid, "fee_paid")

    def to_dict(self) -> dict:
        return {
            "inputs": sorted(self.inputs),
            "input_value": self.input_value,
            "change_value": self.change_value,
            "fee_paid": self.fee_paid,
            "exact_match": self.exact_match,
        }


def result_for(utxos: Iterable[Utxo], target: int, *,
               fee_paid: int = 0, exact_flag: bool | None = None) -> SelectionResult:
    """Build a SelectionResult from chosen utxos under the fee-free contract.

    change = input_value - target - fee_paid; exact_match means no change
    output is created.
    """
    chosen = list(utxos)
    value = checked_sum(u.value for u in chosen)
    change = value - target - fee_paid
    if change < 0:
        raise AmountError("selection does not cover target plus fee")
    exact = (change == 0) if exact_flag is None else exact_flag
    return SelectionResult(
        inputs=frozenset(u.id for u in chosen),
        input_value=value,
        change_value=change,
        fee_paid=fee_paid,
        exact_match=exact,
    )


@dataclass(frozen=True, slots=True)
class PayRequestSet:
    """Payment requests ordered by decreasing value."""

    targets: tuple[int, ...]

    def __post_init__(self):
        if not self.targets:
            raise ValueError("at least one payment request is required")
        for t in self.targets:
            check_amount(t, "request")
            if t == 0:
                raise ValueError("requests must be positive")
        if list(self.targets) != sorted(self.targets, reverse=True):
            raise ValueError("requests must be in descending order")

    @property
    def total(self) -> int:
        return sum(self.targets)

    def __len__(self) -> int:
        return len(self.targets)


class UtxoPool:
    """A wallet's set of spendable utxos, keyed by unique id.

    The pool is a single-writer collection: selectors only read it, so a
    fully-built pool can be shared across threads.  Iteration order is by
    ascending id unless an algorithm sorts explicitly, which keeps every
    result independent of hash ordering.
    """

    __slots__ = ("_utxos", "_total")

    def __init__(self, utxos: Iterable[Utxo] = ()):
        self._utxos: dict[str, Utxo] = {}
        self._total = 0
        for u in utxos:
            self.add(u)

    def add(self, utxo: Utxo) -> None:
        if utxo.id in self._utxos:
            raise ValueError(f"duplicate utxo id: {utxo.id}")
        self._utxos[utxo.id] = utxo
        self._total = checked_sum((self._total, utxo.value), "pool total")

    def remove(self, utxo_id: str) -> Utxo:
        utxo = self._utxos.pop(utxo_id)
        self._total -= utxo.value
        return utxo

    def get(self, utxo_id: str) -> Utxo:
        return self._utxos[utxo_id]

    def __contains__(self, utxo_id: str) -> bool:
        return utxo_id in self._utxos

    def __len__(self) -> int:
        return len(self._utxos)

    def __iter__(self) -> Iterator[Utxo]:
        for uid in sorted(self._utxos):
            yield self._utxos[uid]

    def members_unordered(self) -> Iterable[Utxo]:
        """Members in unspecified order, for callers that sort themselves."""
        return self._utxos.values()

    @property
    def total_value(self) -> int:
        return self._total

    def copy(self) -> "UtxoPool":
        clone = UtxoPool()
        clone._utxos = dict(self._utxos)
        clone._total = self._total
        return clone


def total_value(pool: UtxoPool) -> int:
    """Sum of member values (maintained incrementally by the pool)."""
    return pool.total_value


def effective_value(utxo: Utxo, fee: FeeParams) -> int:
    """Value minus the fee the input itself adds; may be negative."""
    return utxo.value - fee.fee_per_byte * utxo.size_bytes


def priority(utxo: Utxo) -> int:
    """Value times confirmation age."""
    p = utxo.value * utxo.age
    if p > MAX_AMOUNT:
        raise AmountError(f"priority overflows 63-bit range: {p}")
    return p


def reachable_sums(pool: UtxoPool, cap: int = DEFAULT_ENUMERATION_CAP) -> set[int]:
    """All nonzero subset sums of the pool (the value-range metric)."""
    if len(pool) > cap:
        raise CapExceeded(f"pool has {len(pool)} utxos, enumeration cap is {cap}")
    sums = {0}
    for u in pool:
        sums |= {s + u.value for s in sums}
    sums.discard(0)
    return sums


def utxo_from_dict(obj: dict) -> Utxo:
    """Parse one pool-file entry; size/age/address fall back to defaults."""
    return Utxo(
        id=str(obj["id"]),
        value=int(obj["value"]),
        size_bytes=int(obj.get("size", 148)),
        age=int(obj.get("age", 0)),
        address_id=str(obj.get("address", "")),
    )


def utxo_to_dict(utxo: Utxo) -> dict:
    return {
        "id": utxo.id,
        "value": utxo.value,
        "size": utxo.size_bytes,
        "age": utxo.age,
        "address": utxo.address_id,
    }


def pool_from_json(text: str) -> UtxoPool:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("pool file must contain a JSON array")
    return UtxoPool(utxo_from_dict(obj) for obj in data)


def load_pool(path) -> UtxoPool:
    with open(path, "r", encoding="utf-8") as fh:
        return pool_from_json(fh.read())
