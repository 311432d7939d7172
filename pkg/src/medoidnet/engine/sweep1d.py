"""NumPy sweep engine for real-line instances with absolute-loss labels.

Requires every label to be a member of the candidate grid, which lets the
per-cell medoid search run on label histograms with two prefix passes
instead of a quadratic scan. The compiled kernel in ``_sweep1d`` implements
the identical contract; this module is the import-time fallback and the
benchmark baseline.

All comparisons that define the geometry (greedy acceptance, Voronoi
boundaries, next-change scales) are made on exact float predicates of the
form ``x[j] - x[i] <op> gamma``; ``searchsorted`` only supplies a starting
guess that is then fixed up, so the output is bit-identical to the reference
implementations in ``netting``.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .runs import QCoefficients, SweepRun


def _greedy_1d(x: np.ndarray, gamma: float) -> np.ndarray:
    n = len(x)
    centers = [0]
    c = 0
    while True:
        j = int(np.searchsorted(x, x[c] + gamma, side="left"))
        while j < n and x[j] - x[c] < gamma:
            j += 1
        while j - 1 > c and x[j - 1] - x[c] >= gamma:
            j -= 1
        if j >= n:
            break
        centers.append(j)
        c = j
    return np.asarray(centers, dtype=np.int64)


def _next_change(x: np.ndarray, centers: np.ndarray) -> float:
    # per segment, the largest min-distance-to-prior-centers among rejected
    # points is attained at the segment's last point
    ends = np.append(centers[1:], len(x)) - 1
    return float((x[ends] - x[centers]).max())


def _cell_bounds(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = len(centers)
    n = len(x)
    bounds = np.empty(d + 1, dtype=np.int64)
    bounds[0] = 0
    bounds[d] = n
    if d == 1:
        return bounds
    a = x[centers[:-1]]
    b = x[centers[1:]]
    guess = np.searchsorted(x, 0.5 * (a + b), side="right")
    for k in range(d - 1):
        jj = int(guess[k])
        av = float(a[k])
        bv = float(b[k])
        # first index strictly closer to the right center; ties stay left
        while jj < n and (x[jj] - av) <= (bv - x[jj]):
            jj += 1
        while jj > 0 and (x[jj - 1] - av) > (bv - x[jj - 1]):
            jj -= 1
        bounds[k + 1] = jj
    return bounds


def _medoids_abs(x, lab, gv, bounds, ncand):
    """Histogram medoids for absolute loss on a sorted candidate grid."""
    d = len(bounds) - 1
    cell_sizes = np.diff(bounds)
    cell_of = np.repeat(np.arange(d), cell_sizes)
    flat = cell_of * ncand + lab
    hist = np.bincount(flat, minlength=d * ncand).reshape(d, ncand).astype(np.float64)
    pc = np.cumsum(hist, axis=1)
    ps = np.cumsum(hist * gv, axis=1)
    tot_c = pc[:, -1:]
    tot_s = ps[:, -1:]
    cost = gv * pc - ps + (tot_s - ps) - gv * (tot_c - pc)
    med = np.argmin(cost, axis=1)
    total = 0.0
    for k in range(d):  # sequential accumulation, bit-identical to the kernel
        total += float(cost[k, med[k]])
    return cell_of, med.astype(np.int64), total


def sweep_1d_numpy(x: np.ndarray, lab: np.ndarray, gv: np.ndarray,
                   coeffs: Optional[QCoefficients] = None) -> list:
    """Descending-scale sweep; returns the evaluated runs.

    With ``coeffs`` given, stops once the alpha-free part of the bound at the
    current net size exceeds the best bound value seen (net sizes only grow
    as gamma shrinks on the line, so no later run can win).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    lab = np.ascontiguousarray(lab, dtype=np.int64)
    gv = np.ascontiguousarray(gv, dtype=np.float64)
    n = len(x)
    ncand = len(gv)
    runs = []
    best_q = math.inf
    centers = np.array([0], dtype=np.int64)
    gamma_hi = math.inf
    while True:
        bounds = _cell_bounds(x, centers)
        cell_of, med, total = _medoids_abs(x, lab, gv, bounds, ncand)
        alpha = total / n
        gamma_lo = _next_change(x, centers)
        runs.append(SweepRun(gamma_hi, gamma_lo, centers, med, cell_of, alpha))
        if coeffs is not None:
            best_q = min(best_q, coeffs.q(alpha, len(centers)))
        if gamma_lo <= 0.0:
            break
        gamma_hi = gamma_lo
        centers = _greedy_1d(x, gamma_hi)
        if coeffs is not None and coeffs.should_stop(len(centers), best_q):
            break
    return runs


def rep_query_1d(x_sorted: np.ndarray, gamma_lo: float, gamma_hi: float) -> float:
    """Smallest pairwise distance strictly above gamma_lo (and <= gamma_hi).

    Works on deduplicated values; a +-2 index window around the searchsorted
    guess covers rounding of ``x + gamma_lo``, so the result is exact.
    """
    xu = np.unique(x_sorted)
    n = len(xu)
    if n < 2:
        return math.inf
    guess = np.searchsorted(xu, xu + gamma_lo, side="right")
    best = math.inf
    base = np.arange(n)
    for off in (-2, -1, 0, 1, 2):
        idx = guess + off
        ok = (idx > base) & (idx < n)
        if not ok.any():
            continue
        diffs = xu[idx[ok]] - xu[base[ok]]
        diffs = diffs[diffs > gamma_lo]
        if diffs.size:
            best = min(best, float(diffs.min()))
    if math.isinf(gamma_hi) or best <= gamma_hi:
        return best
    return math.inf
