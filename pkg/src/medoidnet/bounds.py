"""Generalization-bound evaluators and the default truncation schedules.

All formulas are implemented exactly as printed, including the non-tight
constants; the constants are load-bearing in the tests and in scale
selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import PreconditionError

_LN_4E2 = math.log(4.0) + 2.0  # ln(4 e^2)


@dataclass(frozen=True)
class BoundParams:
    """Parameters (n, alpha, k, b, delta, L) shared by the bound evaluators.

    The formulas consume delta only through ln(1/delta); for confidences too
    extreme to represent as a float (e.g. exp(-sqrt(n)) at n around 1e6,
    which underflows), pass ``ln_inv_delta`` explicitly and set delta to any
    placeholder in (0, 1].
    """

    n: int
    alpha: float
    k: int
    b: int
    delta: float
    L: float
    ln_inv_delta: float = None

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be >= 1")
        if self.ln_inv_delta is None:
            if not (0.0 < self.delta < 1.0):
                raise PreconditionError("delta must lie in (0, 1)")
        elif self.ln_inv_delta <= 0.0:
            raise PreconditionError("ln(1/delta) must be positive")
        if self.alpha < 0:
            raise PreconditionError("alpha must be nonnegative")
        if self.k < 0 or self.b < 0:
            raise PreconditionError("k and b must be nonnegative")
        if self.L < 0:
            raise PreconditionError("L must be nonnegative")

    def log_inv_delta(self) -> float:
        if self.ln_inv_delta is not None:
            return self.ln_inv_delta
        return -math.log(self.delta)


def _ln_conf(p: "BoundParams") -> float:
    # ln(4 e^2 / delta)
    return _LN_4E2 + p.log_inv_delta()


def q_bound(p: BoundParams) -> float:
    """The scale-selection bound

        Q(n, a, k, b, d, L) = (20 sqrt(k/n) + 20 sqrt(b/n)
                               + 15 sqrt(ln(4e^2/d)/n) + 1) a
            + (6L+18) k/n + 8L sqrt(k/n)
            + (2L+12) b/n + 7L sqrt(b/n)
            + (3L+10) ln(4e^2/d)/n + 6L sqrt(ln(4e^2/d)/n).
    """
    n, a, k, b, L = p.n, p.alpha, p.k, p.b, p.L
    lt = _ln_conf(p)
    sk = math.sqrt(k / n)
    sb = math.sqrt(b / n)
    sl = math.sqrt(lt / n)
    return ((20.0 * sk + 20.0 * sb + 15.0 * sl + 1.0) * a
            + (6.0 * L + 18.0) * k / n + 8.0 * L * sk
            + (2.0 * L + 12.0) * b / n + 7.0 * L * sb
            + (3.0 * L + 10.0) * lt / n + 6.0 * L * sl)


def q_bound_coefficients(n: int, b: int, delta: float, L: float) -> tuple:
    """Split Q into q = alpha*(A + 20 sqrt(k/n)) + c_lin*k + c_sqrt*sqrt(k) + B.

    Used by the sweep engines to evaluate Q incrementally and to prune:
    the k-only part is increasing in k, so Q(alpha, k) >= c_lin*k
    + c_sqrt*sqrt(k) + B for every alpha >= 0.
    """
    p0 = BoundParams(n, 0.0, 0, b, delta, L)
    lt = _ln_conf(p0)
    a_base = 1.0 + 20.0 * math.sqrt(b / n) + 15.0 * math.sqrt(lt / n)
    c_lin = (6.0 * L + 18.0) / n
    c_sqrt = 8.0 * L / math.sqrt(n)
    const = q_bound(p0)
    return a_base, 20.0 / math.sqrt(n), c_lin, c_sqrt, const


def q_monotone_check(p: BoundParams, p2: BoundParams) -> bool:
    """Check the monotonicity of Q along a single-field change in alpha or k."""
    diffs = [f for f in ("n", "alpha", "k", "b", "delta", "L")
             if getattr(p, f) != getattr(p2, f)]
    if any(f not in ("alpha", "k") for f in diffs) or len(diffs) > 1:
        raise PreconditionError("params must differ in alpha only or in k only")
    lo, hi = (p, p2)
    if diffs and getattr(p, diffs[0]) > getattr(p2, diffs[0]):
        lo, hi = p2, p
    return q_bound(lo) <= q_bound(hi)


def compression_deviation_bound(p: BoundParams, mode: str) -> float:
    """Closed-form deviation bounds for semi-stable compression schemes.

    mode="hoeffding"        two-sided bound for fixed size k and b side bits,
                            requires n > 2k
    mode="bernstein"        one-sided interpolating bound, requires n > 4k+4
    mode="sample_dependent" the bound with the adaptive complexity term T
    mode="final"            the fully simplified form; equals q_bound - alpha

    Each returns the deviation term only; alpha enters exactly where the
    printed formula multiplies it.
    """
    n, a, k, b, L = p.n, p.alpha, p.k, p.b, p.L
    ln4d = math.log(4.0) + p.log_inv_delta()
    if mode == "hoeffding":
        if n <= 2 * k:
            raise PreconditionError("the fixed-size bound requires n > 2k")
        return (math.sqrt(4.0 * L * L / (n - 2 * k) * (k * math.log(4.0) + ln4d))
                + math.sqrt(L * L / (n - 2 * k) * b * math.log(2.0)))
    if mode == "bernstein":
        if n <= 4 * k + 4:
            raise PreconditionError("the interpolating fixed-size bound requires n > 4k + 4")
        t = ln4d + k * math.log(4.0)
        bl2 = b * math.log(2.0)
        return (a * (5.0 * math.sqrt(8.0 * t / n) + 4.0 * math.sqrt(8.0 * bl2 / n))
                + 2.0 * L * math.sqrt(8.0 * t / n)
                + (28.0 + 8.0 * L) * t / (3.0 * n)
                + L * math.sqrt(8.0 * bl2 / n)
                + 28.0 * bl2 / (3.0 * n))
    if mode == "sample_dependent":
        t = math.log(4.0 * (k + 1) * (k + 2) * (b + 1) * (b + 2)) \
            + p.log_inv_delta() + k * math.log(4.0)
        bl2 = b * math.log(2.0)
        return (a * (5.0 * math.sqrt(8.0 * t / n) + 4.0 * math.sqrt(8.0 * bl2 / n))
                + 2.0 * L * math.sqrt(8.0 * t / n)
                + (28.0 + 8.0 * L) * t / (3.0 * n)
                + L * math.sqrt(8.0 * bl2 / n)
                + 28.0 * bl2 / (3.0 * n))
    if mode == "final":
        lt = _ln_conf(p)
        sk = math.sqrt(k / n)
        sb = math.sqrt(b / n)
        sl = math.sqrt(lt / n)
        b_one = 20.0 * sk + 20.0 * sb + 15.0 * sl
        b_two = ((6.0 * L + 18.0) * k / n + 8.0 * L * sk
                 + (2.0 * L + 12.0) * b / n + 7.0 * L * sb
                 + (3.0 * L + 10.0) * lt / n + 6.0 * L * sl)
        return b_one * a + b_two
    raise PreconditionError(f"unknown bound mode {mode!r}")


def empirical_bernstein_bound(mean: float, n: int, delta: float, L: float) -> float:
    """High-probability upper deviation for i.i.d. variables in [0, L]:

        mean*sqrt(2 ln(4/d)/(n-1)) + L*sqrt(2 ln(4/d)/(n-1))
        + 7 L ln(4/d) / (3 (n-1)).
    """
    if n < 2:
        raise PreconditionError("n must be >= 2")
    if not (0.0 < delta < 1.0):
        raise PreconditionError("delta must lie in (0, 1)")
    if not (0.0 <= mean <= L) and L > 0:
        raise PreconditionError("mean must lie in [0, L]")
    r = math.sqrt(2.0 * math.log(4.0 / delta) / (n - 1))
    return mean * r + L * r + 7.0 * L * math.log(4.0 / delta) / (3.0 * (n - 1))


@dataclass(frozen=True)
class Schedules:
    """Sample-size-indexed confidence and truncation schedules."""

    delta_n: Callable[[int], float]
    b_n: Callable[[int], int]
    L_n: Callable[[int], float]
    eps_n: Callable[[int], float]


def default_schedules() -> Schedules:
    """delta_n = exp(-sqrt(n)), b_n = ceil(sqrt(n)),
    L_n = max(1, n^(1/8)), eps_n = n^(-1/4).

    The growth rates keep L_n^2 * max(b_n, ln(4e^2/delta_n)) in o(n) with
    room to spare, and sum(delta_n) converges.
    """
    return Schedules(
        delta_n=lambda n: math.exp(-math.sqrt(n)),
        b_n=lambda n: max(1, math.ceil(math.sqrt(n))),
        L_n=lambda n: max(1.0, n ** 0.125),
        eps_n=lambda n: n ** -0.25,
    )
