"""Shared fixture builders for the test suite."""

from coinsel import Utxo, UtxoPool


def make_pool(values, ages=None, addresses=None, sizes=None):
    """Build a pool with ids u0, u1, ... in the order given."""
    utxos = []
    for i, value in enumerate(values):
        utxos.append(Utxo(
            id=f"u{i}",
            value=value,
            size_bytes=sizes[i] if sizes else 148,
            age=ages[i] if ages else 0,
            address_id=addresses[i] if addresses else f"a{i}",
        ))
    return UtxoPool(utxos)


def values_of(pool, result):
    """Sorted values of the selected inputs."""
    return sorted(pool.get(uid).value for uid in result.inputs)
