"""Coin selection algorithms for UTXO-based ledgers.

Fourteen selectors (five sort-and-accumulate policies, five heuristic
selectors, four optimization-based ones), exact subset-search oracles, and
a seeded wallet simulator with CSV/JSON metrics export.

The knapsack and branch-and-bound inner loops run in a compiled extension
when it is available; ``backend()`` reports which kernels are active.
"""

from ._backend import backend_name as backend
from .advanced import (GeneticParams, IlpParams, LeverageProblem,
                       StrategicParams, fitness, select_greedy_genetic,
                       select_ilp_two_phase, select_knapsack_leverage,
                       select_myopic, select_strategic, tx_size)
from .basic import (BnbParams, select_bnb, select_greedy, select_knapsack,
                    select_random_draw, select_random_improve)
from .domain import (FeeParams, PayRequestSet, SelectionResult, Utxo,
                     UtxoPool, effective_value, load_pool, pool_from_json,
                     priority, reachable_sums, total_value)
from .errors import (AmountError, CapExceeded, CoinSelError, Infeasible,
                     InsufficientFunds, MaxInputsExceeded)
from .exact import (BinaryProgram, Constraint, solve_binary,
                    subset_exact_match, subset_min_inputs)
from .primitive import (FIFO, HPF, HVF, LIFO, LVF, SortPolicy,
                        select_primitive, tie_break)
from .rng import Splitmix64
from .simulate import (MetricsReport, SimConfig, WorkloadSpec,
                       export_metrics, run_simulation, sample)

__version__ = "0.1.0"
