"""Per-scale sweep engines.

The sweep enumerates maximal greedy nets for every candidate scale in
descending order, skipping directly between scales at which the net actually
changes (all scales within a run share the net, hence the cells, medoids and
empirical risk). Two engines implement the same contract:

  * ``sweep1d``  -- instances on the real line with absolute loss and labels
                    drawn from the candidate set; backed by a compiled kernel
                    (``_sweep1d``) when available, with a NumPy fallback.
  * ``generic``  -- any space, driven by a distance matrix or on-demand rows.

Set ``MEDOIDNET_NO_KERNEL=1`` to force the NumPy fallback.
"""

import os

from .runs import SweepRun, QCoefficients
from .generic import generic_sweep, generic_rep_query
from .sweep1d import sweep_1d_numpy, rep_query_1d

try:  # compiled kernel is optional; the fallback is behaviorally identical
    if os.environ.get("MEDOIDNET_NO_KERNEL"):
        _kernel = None
    else:
        from . import _sweep1d as _kernel
except ImportError:
    _kernel = None

KERNEL_AVAILABLE = _kernel is not None
BACKEND_1D = "compiled" if KERNEL_AVAILABLE else "numpy"


def sweep_1d(x_sorted, label_idx, cand_values, coeffs=None):
    """Run the 1D sweep with the best available backend."""
    if _kernel is not None:
        return _kernel.sweep_1d_kernel(x_sorted, label_idx, cand_values, coeffs)
    return sweep_1d_numpy(x_sorted, label_idx, cand_values, coeffs)


__all__ = [
    "SweepRun", "QCoefficients", "generic_sweep", "generic_rep_query",
    "sweep_1d", "sweep_1d_numpy", "rep_query_1d",
    "KERNEL_AVAILABLE", "BACKEND_1D",
]
