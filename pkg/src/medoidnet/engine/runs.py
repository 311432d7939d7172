"""Shared data types for the sweep engines."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class QCoefficients:
    """Scale-selection bound split as

        q(alpha, d) = alpha * (a_base + a_sqrt * sqrt(d))
                      + k_lin * d + k_sqrt * sqrt(d) + const

    so engines can evaluate it cheaply and prune: the alpha-free part
    ``q0(d)`` lower-bounds q for any alpha >= 0 and is increasing in d.
    """

    a_base: float
    a_sqrt: float
    k_lin: float
    k_sqrt: float
    const: float

    def q(self, alpha: float, d: int) -> float:
        sd = math.sqrt(d)
        return alpha * (self.a_base + self.a_sqrt * sd) \
            + self.k_lin * d + self.k_sqrt * sd + self.const

    def q0(self, d: int) -> float:
        return self.k_lin * d + self.k_sqrt * math.sqrt(d) + self.const

    def should_stop(self, d: int, best_q: float) -> bool:
        # strict inequality with a relative margin: never prunes a run whose
        # exact bound value could still tie the incumbent
        return self.q0(d) > best_q * (1.0 + 1e-9) + 1e-12


@dataclass
class SweepRun:
    """One maximal run of scales sharing an identical net.

    The net is in force for every scale in (gamma_lo, gamma_hi]; gamma_hi is
    +inf for the first run and gamma_lo is 0.0 for the last. Positions refer
    to the order-sorted instance domain.
    """

    gamma_hi: float
    gamma_lo: float
    center_positions: np.ndarray   # sorted-domain positions, ascending
    medoid_idx: np.ndarray         # engine's medoid candidate index per cell
    cell_of: np.ndarray            # cell index per sorted-domain position
    alpha_engine: float            # engine-internal empirical risk estimate

    @property
    def d(self) -> int:
        return len(self.center_positions)
