# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernel for real-line instances with grid labels.

Behavioral contract is shared with ``sweep1d.sweep_1d_numpy``: identical
geometry (greedy acceptance, next-change scales, cell boundaries) from the
same exact float predicates; per-cell medoid costs may differ from the NumPy
path in the last bits because summation order differs, which the callers
treat as a tie-region concern and resolve canonically.
"""

import math

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

from .runs import SweepRun

cnp.import_array()


cdef inline double _q_of(double alpha, long d, double a_base, double a_sqrt,
                         double k_lin, double k_sqrt, double q_const) nogil:
    cdef double sd = sqrt(<double> d)
    return alpha * (a_base + a_sqrt * sd) + k_lin * d + k_sqrt * sd + q_const


def sweep_1d_kernel(x_in, lab_in, gv_in, coeffs=None):
    """Descending-scale sweep; mirrors ``sweep_1d_numpy`` with C loops."""
    cdef cnp.ndarray[double, ndim=1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef cnp.ndarray[long, ndim=1] lab = np.ascontiguousarray(lab_in, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] gv = np.ascontiguousarray(gv_in, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t ncand = gv.shape[0]

    cdef bint prune = coeffs is not None
    cdef double a_base = 0.0, a_sqrt = 0.0, k_lin = 0.0, k_sqrt = 0.0, q_const = 0.0
    if prune:
        a_base = coeffs.a_base
        a_sqrt = coeffs.a_sqrt
        k_lin = coeffs.k_lin
        k_sqrt = coeffs.k_sqrt
        q_const = coeffs.const

    cdef cnp.ndarray[long, ndim=1] centers = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] bounds = np.empty(n + 1, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] hist = np.zeros(ncand, dtype=np.float64)
    cdef cnp.ndarray[long, ndim=1] cell_of = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] med
    cdef cnp.ndarray[long, ndim=1] centers_out

    cdef double gamma_hi = INFINITY
    cdef double gamma_lo, last, dx, best_q = INFINITY
    cdef double cnt_tot, sum_tot, cnt_le, sum_le, g, cost, best_cost, total, alpha
    cdef Py_ssize_t d, i, j, k, lo, hi, best_c
    cdef list runs = []

    # first net (gamma = +inf): exactly the order-first point
    centers[0] = 0
    d = 1

    while True:
        # Voronoi boundaries: first index strictly closer to the right
        # center; exact ties stay with the left (order-smaller) one
        bounds[0] = 0
        bounds[d] = n
        j = 0
        for k in range(d - 1):
            if j < centers[k]:
                j = centers[k]
            while j < n and (x[j] - x[centers[k]]) <= (x[centers[k + 1]] - x[j]):
                j += 1
            bounds[k + 1] = j

        # per-cell histogram medoid under absolute loss on the sorted grid
        med = np.empty(d, dtype=np.int64)
        total = 0.0
        for k in range(d):
            lo = bounds[k]
            hi = bounds[k + 1]
            for i in range(ncand):
                hist[i] = 0.0
            for i in range(lo, hi):
                hist[lab[i]] += 1.0
                cell_of[i] = k
            cnt_tot = 0.0
            sum_tot = 0.0
            for i in range(ncand):
                cnt_tot += hist[i]
                sum_tot += hist[i] * gv[i]
            cnt_le = 0.0
            sum_le = 0.0
            best_cost = INFINITY
            best_c = 0
            for i in range(ncand):
                cnt_le += hist[i]
                sum_le += hist[i] * gv[i]
                g = gv[i]
                cost = g * cnt_le - sum_le + (sum_tot - sum_le) - g * (cnt_tot - cnt_le)
                if cost < best_cost:
                    best_cost = cost
                    best_c = i
            med[k] = best_c
            total += best_cost
        alpha = total / n

        # largest min-distance-to-prior-centers among rejected points;
        # within a segment it is attained at the segment's last point
        gamma_lo = 0.0
        for k in range(d):
            hi = centers[k + 1] - 1 if k + 1 < d else n - 1
            dx = x[hi] - x[centers[k]]
            if dx > gamma_lo:
                gamma_lo = dx

        centers_out = centers[:d].copy()
        runs.append(SweepRun(gamma_hi, gamma_lo, centers_out, med,
                             cell_of.copy(), alpha))
        if prune:
            cost = _q_of(alpha, d, a_base, a_sqrt, k_lin, k_sqrt, q_const)
            if cost < best_q:
                best_q = cost

        if gamma_lo <= 0.0:
            break
        gamma_hi = gamma_lo

        # greedy net at the new scale: accept iff >= gamma from the last
        # accepted center (earlier centers are farther on the line)
        centers[0] = 0
        d = 1
        last = x[0]
        for i in range(1, n):
            if x[i] - last >= gamma_hi:
                centers[d] = i
                d += 1
                last = x[i]

        if prune and (k_lin * d + k_sqrt * sqrt(<double> d) + q_const
                      > best_q * (1.0 + 1e-9) + 1e-12):
            break

    return runs
