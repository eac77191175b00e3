"""Numerical algebraic Bethe ansatz for spin-1/2 XXX and XXZ chains."""

import os

_threads = os.environ.get("BETHEKIT_THREADS")
if _threads:
    # BLAS pools read these once, at numpy import time
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)


def worker_count() -> int:
    """Worker cap from BETHEKIT_THREADS (default: CPU count)."""
    value = os.environ.get("BETHEKIT_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return os.cpu_count() or 1


from . import betheroots, chain, detformulas, observables, rmatrix, tensoralg, vectors  # noqa: E402
from .betheroots import BetheRootSet, ground_state_roots, homotopy_all  # noqa: E402
from .chain import ChainSpec, xxx_chain, xxz_chain  # noqa: E402
from .rmatrix import Normalization  # noqa: E402
from .tensoralg import BetheKitError, BudgetError, ConvergenceError, PreconditionError  # noqa: E402

__all__ = [
    "BetheKitError",
    "BetheRootSet",
    "BudgetError",
    "ChainSpec",
    "ConvergenceError",
    "Normalization",
    "PreconditionError",
    "betheroots",
    "chain",
    "detformulas",
    "ground_state_roots",
    "homotopy_all",
    "observables",
    "rmatrix",
    "tensoralg",
    "vectors",
    "worker_count",
    "xxx_chain",
    "xxz_chain",
]
