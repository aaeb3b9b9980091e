"""Backend selection: compiled core when available, pure Python otherwise.

Set COINSEL_PURE=1 to force the pure-Python kernels (used by the parity
tests and the backend benchmark).
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("COINSEL_PURE"):
    _core = None
else:
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None

HAVE_CORE = _core is not None


def backend_name() -> str:
    return "compiled" if HAVE_CORE else "pure"


def knapsack_select(values, target, repeats, state):
    if _core is not None:
        import numpy as np
        arr = np.asarray(values, dtype=np.int64)
        return _core.knapsack_select(arr, target, repeats, state)
    return _pure.knapsack_select(values, target, repeats, state)


def bnb_search(eff, lower, upper, rounds, randomized, state):
    if _core is not None:
        import numpy as np
        arr = np.asarray(eff, dtype=np.int64)
        return _core.bnb_search(arr, lower, upper, rounds, randomized, state)
    return _pure.bnb_search(eff, lower, upper, rounds, randomized, state)
