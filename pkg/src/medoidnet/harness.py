"""Synthetic distributions with known Bayes risk, risk estimators, baselines
and the convergence experiment runner."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .bounds import default_schedules, empirical_bernstein_bound
from .errors import PreconditionError, UnsupportedOperationError
from .learners import (
    MedoidModel,
    countable_med_net,
    ctbl_unbdd,
    fin_med_net,
    medoid_net,
)
from .spaces import (
    LabeledSample,
    RealLine,
    SpaceDescriptor,
    discrete_space,
    get_space,
)

MC_DELTA = 0.05
SURROGATE_CAP_QUANTILE = 0.999


@dataclass
class SyntheticDistribution:
    """A sampling law with analytically known Bayes quantities where possible.

    ``conditional`` is (x_names, x_probs, cond) with cond[i][j] = P(y_j | x_i)
    for finite-support distributions; ``loss_cap`` is an exact loss range for
    Bernstein half-widths, or None when only a heuristic cap exists.
    """

    dist_id: str
    instance_space: SpaceDescriptor
    label_space: SpaceDescriptor
    sampler: Callable
    conditional: Optional[tuple] = None
    bayes_risk: Optional[float] = None
    bayes_predictor: Optional[Callable] = None
    loss_cap: Optional[float] = None
    experimental: bool = False


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _default_multiclass_table():
    x_names = ["x1", "x2", "x3", "x4", "x5"]
    y_names = ["y1", "y2", "y3", "y4"]
    px = [0.3, 0.25, 0.2, 0.15, 0.1]
    cond = [
        [0.70, 0.10, 0.10, 0.10],
        [0.20, 0.60, 0.10, 0.10],
        [0.10, 0.10, 0.50, 0.30],
        [0.25, 0.25, 0.25, 0.25],
        [0.05, 0.15, 0.40, 0.40],
    ]
    return x_names, px, y_names, cond


def make_distribution(dist_id: str, params: Optional[dict] = None) -> SyntheticDistribution:
    """Construct a built-in distribution by id.

    ids: singleton4, lipschitz_identity, laplace_regression, finite_multiclass
    and the experimental cauchy_identity.
    """
    params = dict(params or {})
    if dist_id == "singleton4":
        xsp = get_space("singleton")
        ysp = get_space("fourpoint")

        def sampler(seed, n):
            idx = _rng(seed).integers(0, 3, size=n)
            names = ["a", "b", "c"]
            return LabeledSample(tuple(("x", names[i]) for i in idx))

        conditional = (["x"], [1.0], [[1 / 3, 1 / 3, 1 / 3, 0.0]])
        return SyntheticDistribution(
            dist_id, xsp, ysp, sampler, conditional=conditional,
            bayes_risk=0.5, bayes_predictor=lambda x: "o", loss_cap=1.0)

    if dist_id == "lipschitz_identity":
        xsp = RealLine("real")
        ysp = RealLine("real")

        def sampler(seed, n):
            xs = _rng(seed).uniform(0.0, 1.0, size=n)
            return LabeledSample(tuple((float(v), float(v)) for v in xs))

        return SyntheticDistribution(
            dist_id, xsp, ysp, sampler,
            bayes_risk=0.0, bayes_predictor=lambda x: x)

    if dist_id == "laplace_regression":
        s = float(params.pop("s", 0.25))
        xsp = RealLine("real")
        ysp = RealLine("real")

        def g(x):
            return x * (1.0 - x)

        def sampler(seed, n, _s=s):
            r = _rng(seed)
            xs = r.uniform(0.0, 1.0, size=n)
            noise = r.laplace(0.0, _s, size=n)
            return LabeledSample(tuple(
                (float(x), float(g(x) + w)) for x, w in zip(xs, noise)))

        # mean absolute deviation of Laplace(0, s) about its median is s
        return SyntheticDistribution(
            dist_id, xsp, ysp, sampler, bayes_risk=s, bayes_predictor=g)

    if dist_id == "finite_multiclass":
        x_names, px, y_names, cond = params.pop("table", None) or _default_multiclass_table()
        xsp = discrete_space(x_names, "discrete:" + ",".join(x_names))
        ysp = discrete_space(y_names, "discrete:" + ",".join(y_names))
        px_arr = np.asarray(px)
        cond_arr = np.asarray(cond)
        if abs(px_arr.sum() - 1.0) > 1e-9 or np.abs(cond_arr.sum(axis=1) - 1.0).max() > 1e-9:
            raise PreconditionError("marginal and conditional rows must sum to 1")

        def sampler(seed, n):
            r = _rng(seed)
            xi = r.choice(len(x_names), size=n, p=px_arr)
            u = r.random(n)
            cum = np.cumsum(cond_arr, axis=1)
            yi = (u[:, None] > cum[xi]).sum(axis=1)
            return LabeledSample(tuple(
                (x_names[a], y_names[b]) for a, b in zip(xi, yi)))

        conditional = (list(x_names), [float(p) for p in px], cond_arr.tolist())
        dist = SyntheticDistribution(
            dist_id, xsp, ysp, sampler, conditional=conditional,
            loss_cap=float(ysp.diameter))
        dist.bayes_predictor = bayes_predictor_from_table(dist)
        dist.bayes_risk = exact_risk(dist.bayes_predictor, dist)
        return dist

    if dist_id == "cauchy_identity":
        xsp = RealLine("real")
        ysp = RealLine("real")

        def sampler(seed, n):
            xs = _rng(seed).standard_cauchy(size=n)
            return LabeledSample(tuple((float(v), float(v)) for v in xs))

        return SyntheticDistribution(
            dist_id, xsp, ysp, sampler, bayes_risk=0.0,
            bayes_predictor=lambda x: x, experimental=True)

    raise PreconditionError(f"unknown distribution id {dist_id!r}")


def bayes_predictor_from_table(dist: SyntheticDistribution) -> Callable:
    """Pointwise conditional-expected-loss minimizer, ties lexicographic."""
    x_names, _, cond = dist.conditional
    ysp = dist.label_space
    y_names = list(ysp.enumeration())
    table = {}
    for i, xn in enumerate(x_names):
        best = None
        for y in y_names:
            e = sum(ysp.dist(y, y2) * cond[i][j] for j, y2 in enumerate(y_names))
            key = ysp.order_key(y)
            if best is None or e < best[0] or (e == best[0] and key < best[1]):
                best = (e, key, y)
        table[xn] = best[2]
    return lambda x: table[x]


def exact_risk(predictor, dist: SyntheticDistribution) -> float:
    """Closed-form risk where the distribution admits one."""
    pred = predictor.predictor() if isinstance(predictor, MedoidModel) else predictor
    if dist.conditional is not None:
        x_names, px, cond = dist.conditional
        ysp = dist.label_space
        y_names = list(ysp.enumeration())
        total = 0.0
        for i, xn in enumerate(x_names):
            yhat = pred(xn)
            total += px[i] * sum(
                ysp.dist(yhat, y2) * cond[i][j] for j, y2 in enumerate(y_names))
        return total
    if predictor is dist.bayes_predictor or pred is dist.bayes_predictor:
        if dist.bayes_risk is not None:
            return dist.bayes_risk
    raise UnsupportedOperationError(
        f"{dist.dist_id!r} has no closed-form risk for this predictor; "
        "use monte_carlo_risk")


@dataclass(frozen=True)
class MonteCarloRisk:
    estimate: float
    halfwidth: float
    cap: float
    cap_is_heuristic: bool


def _predict_bulk(predictor, xs, instance_space):
    if isinstance(predictor, MedoidModel):
        return predictor.predict_many(xs, instance_space)
    return [predictor(x) for x in xs]


def monte_carlo_risk(predictor, dist: SyntheticDistribution, m: int,
                     seed) -> MonteCarloRisk:
    """Mean loss over m fresh draws plus a 95% empirical-Bernstein half-width.

    Distributions without an exact loss range use the 0.999 quantile of the
    observed losses as a surrogate cap, flagged via ``cap_is_heuristic``.
    """
    if m < 2:
        raise PreconditionError("m must be >= 2")
    fresh = dist.sampler(seed, m)
    xs = fresh.instances
    ys = fresh.labels
    preds = _predict_bulk(predictor, xs, dist.instance_space)
    ysp = dist.label_space
    if ysp.value_kind == "scalar":
        losses = np.abs(np.asarray(preds, dtype=np.float64)
                        - np.asarray(ys, dtype=np.float64))
    else:
        losses = np.asarray([ysp.dist(p, y) for p, y in zip(preds, ys)])
    est = float(losses.mean())
    if dist.loss_cap is not None:
        cap, heuristic = float(dist.loss_cap), False
    else:
        cap, heuristic = float(np.quantile(losses, SURROGATE_CAP_QUANTILE)), True
    hw = empirical_bernstein_bound(min(est, cap) if cap > 0 else 0.0,
                                   m, MC_DELTA, cap)
    return MonteCarloRisk(est, hw, cap, heuristic)


class KnnPredictor:
    """k-NN plurality vote over observed labels, all ties lexicographic."""

    def __init__(self, sample: LabeledSample, k: int,
                 instance_space: SpaceDescriptor, label_space: SpaceDescriptor):
        if not (1 <= k <= sample.n):
            raise PreconditionError("k must satisfy 1 <= k <= n")
        self.k = k
        self.instance_space = instance_space
        self.label_space = label_space
        # neighbor priority on distance ties: order-smaller instance, then
        # earlier sample position
        instances = sample.instances
        labels = sample.labels
        order = sorted(range(sample.n),
                       key=lambda i: (instance_space.order_key(instances[i]), i))
        self.xs = [instances[i] for i in order]
        self.ys = [labels[i] for i in order]
        self._enc = instance_space.encode(self.xs)
        lab_order = sorted({label_space.order_key(y) for y in self.ys})
        self._label_values = sorted({y for y in self.ys}, key=label_space.order_key)
        self._codes = {label_space.order_key(y): i
                       for i, y in enumerate(self._label_values)}
        self._ycodes = np.asarray([self._codes[label_space.order_key(y)]
                                   for y in self.ys])
        del lab_order

    def __call__(self, x):
        return self.predict_many([x])[0]

    def predict_many(self, xs) -> list:
        if not xs:
            return []
        out = []
        enc_q = self.instance_space.encode(list(xs))
        chunk = max(1, int(2_000_000 // max(1, len(self.xs))))
        nlab = len(self._label_values)
        for start in range(0, len(xs), chunk):
            d = self.instance_space.cross(enc_q[start:start + chunk], self._enc)
            # stable argsort: distance ties fall back to column order, which
            # is the (order_key, position) neighbor priority
            nbr = np.argsort(d, axis=1, kind="stable")[:, :self.k]
            votes = self._ycodes[nbr]
            counts = np.zeros((votes.shape[0], nlab), dtype=np.int64)
            np.add.at(counts, (np.arange(votes.shape[0])[:, None], votes), 1)
            picks = np.argmax(counts, axis=1)  # first argmax = order-smallest label
            out.extend(self._label_values[p] for p in picks)
        return out


def majority_vote_baseline(sample: LabeledSample, k: int,
                           instance_space: SpaceDescriptor,
                           label_space: SpaceDescriptor) -> KnnPredictor:
    return KnnPredictor(sample, k, instance_space, label_space)


def true_medoid_oracle(dist: SyntheticDistribution, region: Sequence) -> object:
    """Label minimizing the exact conditional expected loss over a region
    (a set of instance elements); ties lexicographic."""
    if dist.conditional is None:
        raise UnsupportedOperationError(
            "true medoid oracle needs a finite-support conditional")
    x_names, px, cond = dist.conditional
    region_set = set(region)
    idxs = [i for i, xn in enumerate(x_names) if xn in region_set]
    if not idxs:
        raise PreconditionError("region has no probability mass")
    ysp = dist.label_space
    y_names = list(ysp.enumeration())
    best = None
    for y in y_names:
        score = sum(px[i] * sum(ysp.dist(y, y2) * cond[i][j]
                                for j, y2 in enumerate(y_names))
                    for i in idxs)
        key = ysp.order_key(y)
        if best is None or score < best[0] or (score == best[0] and key < best[1]):
            best = (score, key, y)
    return best[2]


def estimate_missing_mass(dist: SyntheticDistribution, sample: LabeledSample,
                          gamma: float, m: int, seed) -> float:
    """Monte Carlo mass of instance space at distance >= gamma from every
    sample instance (open balls, per the missing-mass definition)."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    fresh = dist.sampler(seed, m).instances
    xsp = dist.instance_space
    enc_s = xsp.encode(sample.instances)
    enc_f = xsp.encode(fresh)
    missed = 0
    chunk = max(1, int(2_000_000 // max(1, sample.n)))
    for start in range(0, m, chunk):
        d = xsp.cross(enc_f[start:start + chunk], enc_s)
        missed += int((d.min(axis=1) >= gamma).sum())
    return missed / m


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

LEARNER_IDS = ("fin", "countable", "unbounded", "separable", "knn1", "knn_sqrt")


@dataclass
class ExperimentRow:
    n: int
    trial: int
    learner_id: str
    estimated_risk: float
    alpha_star: Optional[float]
    q_star: Optional[float]
    selected_gamma: Optional[float]
    d: Optional[int]
    wall_time: float


@dataclass
class ExperimentResult:
    rows: list = field(default_factory=list)

    CSV_HEADER = ["n", "trial", "learner", "estimated_risk", "alpha_star",
                  "q_star", "selected_gamma", "d", "wall_time"]

    def to_csv(self, path: str, timing: bool = True) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.CSV_HEADER)
            for r in self.rows:
                w.writerow([
                    r.n, r.trial, r.learner_id, repr(r.estimated_risk),
                    "" if r.alpha_star is None else repr(r.alpha_star),
                    "" if r.q_star is None else repr(r.q_star),
                    "" if r.selected_gamma is None else
                    ("inf" if math.isinf(r.selected_gamma) else repr(r.selected_gamma)),
                    "" if r.d is None else r.d,
                    repr(r.wall_time if timing else 0.0),
                ])

    def to_jsonl(self, path: str, timing: bool = True) -> None:
        with open(path, "w") as fh:
            for r in self.rows:
                doc = {
                    "n": r.n, "trial": r.trial, "learner": r.learner_id,
                    "estimated_risk": r.estimated_risk,
                    "alpha_star": r.alpha_star, "q_star": r.q_star,
                    "selected_gamma": ("inf" if r.selected_gamma is not None
                                       and math.isinf(r.selected_gamma)
                                       else r.selected_gamma),
                    "d": r.d, "wall_time": r.wall_time if timing else 0.0,
                }
                fh.write(json.dumps(doc, sort_keys=True) + "\n")

    def median_risk_by_n(self, learner_id: str) -> dict:
        by_n = {}
        for r in self.rows:
            if r.learner_id == learner_id:
                by_n.setdefault(r.n, []).append(r.estimated_risk)
        return {n: float(np.median(v)) for n, v in sorted(by_n.items())}


def schedules_with_overrides(overrides: Optional[dict]):
    """Default schedules with any of delta/bits/ltrunc/eps pinned to constants."""
    base = default_schedules()
    ov = dict(overrides or {})
    from .bounds import Schedules
    return Schedules(
        delta_n=(lambda n: ov["delta"]) if ov.get("delta") is not None else base.delta_n,
        b_n=(lambda n: ov["bits"]) if ov.get("bits") is not None else base.b_n,
        L_n=(lambda n: ov["ltrunc"]) if ov.get("ltrunc") is not None else base.L_n,
        eps_n=(lambda n: ov["eps"]) if ov.get("eps") is not None else base.eps_n,
    )


def train_learner(learner_id: str, sample: LabeledSample,
                  dist: SyntheticDistribution, overrides: Optional[dict] = None):
    """Train one learner/baseline on a sample; returns a predictor object."""
    overrides = dict(overrides or {})
    sched = schedules_with_overrides(overrides)
    n = sample.n
    delta = sched.delta_n(n)
    bits = sched.b_n(n)
    if learner_id == "fin":
        return fin_med_net(sample, delta, dist.label_space, dist.instance_space)
    if learner_id == "countable":
        return countable_med_net(sample, delta, bits, dist.label_space,
                                 dist.instance_space)
    if learner_id == "unbounded":
        return ctbl_unbdd(sample, delta, bits, sched.L_n(n), dist.label_space,
                          dist.instance_space)
    if learner_id == "separable":
        return medoid_net(sample, sched, dist.label_space, dist.instance_space)
    if learner_id == "knn1":
        return majority_vote_baseline(sample, 1, dist.instance_space,
                                      dist.label_space)
    if learner_id == "knn_sqrt":
        k = min(n, math.ceil(math.sqrt(n)))
        return majority_vote_baseline(sample, k, dist.instance_space,
                                      dist.label_space)
    raise PreconditionError(
        f"unknown learner id {learner_id!r}; valid: {', '.join(LEARNER_IDS)}")


def _risk_of(predictor, dist: SyntheticDistribution, mc_draws: int, seed) -> float:
    if dist.conditional is not None:
        return exact_risk(predictor, dist)
    return monte_carlo_risk(predictor, dist, mc_draws, seed).estimate


def convergence_experiment(learner_id: str, dist: SyntheticDistribution,
                           n_grid: Sequence[int], trials: int, seed: int,
                           mc_draws: int = 100_000, threads: int = 1,
                           overrides: Optional[dict] = None) -> ExperimentResult:
    """Train/evaluate over an (n, trial) grid; rows are merged in a fixed
    order so output is independent of the parallelism degree."""
    if list(n_grid) != sorted(n_grid):
        raise PreconditionError("n_grid must be sorted ascending")

    def one(task):
        n, trial = task
        sample = dist.sampler([seed, n, trial], n)
        t0 = time.perf_counter()
        predictor = train_learner(learner_id, sample, dist, overrides)
        wall = time.perf_counter() - t0
        risk = _risk_of(predictor, dist, mc_draws, [seed, n, trial, 7])
        if isinstance(predictor, MedoidModel):
            return ExperimentRow(n, trial, learner_id, risk,
                                 predictor.alpha_star, predictor.q_star,
                                 predictor.selected_gamma, predictor.d, wall)
        return ExperimentRow(n, trial, learner_id, risk,
                             None, None, None, None, wall)

    tasks = [(n, t) for n in n_grid for t in range(trials)]
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, tasks))
    else:
        rows = [one(t) for t in tasks]
    rows.sort(key=lambda r: (r.n, r.trial, r.learner_id))
    return ExperimentResult(rows)
