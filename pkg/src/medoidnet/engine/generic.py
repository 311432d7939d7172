"""Distance-matrix sweep engine for arbitrary spaces.

Greedy nets are rebuilt only at scales where the net actually changes: with
the accepted set fixed, a point's accept/reject decision flips exactly when
gamma crosses its minimum distance to the centers preceding it in scan
order, so the next change scale is the largest such distance among the
currently rejected points.

This engine performs a full sweep (no pruning): net sizes are provably
monotone under scale decrease only for the 1D engine.
"""

from __future__ import annotations

import math
from typing import Iterator, Optional

import numpy as np

from .runs import SweepRun


class GenericGeometry:
    """Sorted-domain distance access, matrix-backed or on-demand."""

    def __init__(self, cache, perm):
        # cache: netting.DistanceCache over the original instance order
        self.n = cache.n
        self.perm = np.asarray(perm)
        m = cache.matrix
        if m is not None:
            self.matrix = m[np.ix_(self.perm, self.perm)]
            self._cache = None
        else:
            self.matrix = None
            self._cache = cache

    def row(self, i: int) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[i]
        return self._cache.row(int(self.perm[i]))[self.perm]

    def sorted_unique(self) -> np.ndarray:
        if self.matrix is None:
            raise RuntimeError("sorted distance list requires the matrix")
        iu = np.triu_indices(self.n, k=1)
        vals = np.unique(self.matrix[iu])
        return vals[vals > 0]


def _net_at(geom: GenericGeometry, gamma: float):
    """Greedy net plus per-point minimum distance to preceding centers."""
    n = geom.n
    alive = np.ones(n, dtype=bool)
    centers = []
    rows = []
    while True:
        idx = int(np.argmax(alive))
        if not alive[idx]:
            break
        centers.append(idx)
        row = geom.row(idx)
        rows.append(row)
        alive &= row >= gamma
        if not alive.any():
            break
    centers = np.asarray(centers)
    rows = np.asarray(rows)
    prefix_min = np.minimum.accumulate(rows, axis=0)
    # rank[j] = number of centers at positions < j (>= 1 for j >= 1)
    rank = np.searchsorted(centers, np.arange(n), side="left")
    m = np.full(n, math.inf)
    nz = rank > 0
    m[nz] = prefix_min[rank[nz] - 1, np.arange(n)[nz]]
    return centers, m


def _evaluate(centers: np.ndarray, m_to_prior: np.ndarray,
              geom: GenericGeometry, loss_cols: np.ndarray):
    """Voronoi cells, per-cell medoids and the engine risk estimate."""
    n = geom.n
    d = len(centers)
    if d == 1:
        cell_of = np.zeros(n, dtype=np.int64)
    else:
        dist_to_centers = np.stack([geom.row(int(c)) for c in centers], axis=0)
        cell_of = np.argmin(dist_to_centers, axis=0)  # first argmin = order tie rule
    medoids = np.empty(d, dtype=np.int64)
    total = 0.0
    for ci in range(d):
        members = np.flatnonzero(cell_of == ci)
        costs = loss_cols[:, members].sum(axis=1)
        mi = int(np.argmin(costs))  # candidates are order-sorted
        medoids[ci] = mi
        total += float(costs[mi])
    return cell_of, medoids, total / n


def generic_sweep(geom: GenericGeometry, loss_cols: np.ndarray) -> Iterator[SweepRun]:
    """Yield runs in descending scale order.

    ``loss_cols[c, j]`` is the loss between candidate c and the label of the
    sorted-domain point j.
    """
    gamma_hi = math.inf
    centers = np.array([0])
    row0 = geom.row(0)
    m = row0.copy()
    m[0] = math.inf
    while True:
        cell_of, medoids, alpha = _evaluate(centers, m, geom, loss_cols)
        rejected = np.ones(geom.n, dtype=bool)
        rejected[centers] = False
        gamma_lo = float(m[rejected].max()) if rejected.any() else 0.0
        yield SweepRun(gamma_hi, gamma_lo, centers, medoids, cell_of, alpha)
        if gamma_lo <= 0.0:
            return
        gamma_hi = gamma_lo
        centers, m = _net_at(geom, gamma_hi)


def generic_rep_query(sorted_unique: np.ndarray, gamma_lo: float,
                      gamma_hi: float) -> float:
    """Smallest candidate scale in (gamma_lo, gamma_hi]; +inf if none."""
    i = int(np.searchsorted(sorted_unique, gamma_lo, side="right"))
    if i < len(sorted_unique) and (math.isinf(gamma_hi) or sorted_unique[i] <= gamma_hi):
        return float(sorted_unique[i])
    return math.inf
