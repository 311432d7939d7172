"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines. Every tolerance and budget is pinned here, not calibrated elsewhere.
"""

import math
import time

import numpy as np
import pytest

from medoidnet import (
    BoundParams,
    LabeledSample,
    assign_voronoi,
    build_gamma_net,
    candidate_scales,
    compression_deviation_bound,
    default_schedules,
    empirical_bernstein_bound,
    empirical_medoid,
    exact_risk,
    fin_med_net,
    get_space,
    majority_vote_baseline,
    make_distribution,
    medoid_net,
    monte_carlo_risk,
    nn_predict,
    q_bound,
    select_scale,
)
from medoidnet.medoid import medoid_cost

from reference_bounds import (
    bernstein_reference,
    empirical_bernstein_reference,
    final_reference,
    hoeffding_reference,
    q_reference,
    rel_err,
    sample_dependent_reference,
)

REAL = get_space("real")


def report(num, name, ok, detail=""):
    print(f"\nACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def test_criterion_1_counterexample_separation():
    """singleton4, n=2000, 20 seeds: the medoid learner returns the center
    label (exact risk 1/2) while k-NN majority vote stays on observed labels
    (exact risk 2/3)."""
    t0 = time.perf_counter()
    dist = make_distribution("singleton4")
    n = 2000
    delta = math.exp(-math.sqrt(n))
    k = math.ceil(math.sqrt(n))
    center_hits = 0
    knn_observed = 0
    for seed in range(20):
        sample = dist.sampler([seed, n], n)
        model = fin_med_net(sample, delta, dist.label_space, dist.instance_space)
        label = model.net_points[0][1]
        if label == "o":
            center_hits += 1
            assert exact_risk(model, dist) == 0.5
        knn = majority_vote_baseline(sample, k, dist.instance_space,
                                     dist.label_space)
        vote = knn("x")
        if vote in ("a", "b", "c"):
            knn_observed += 1
            assert exact_risk(knn, dist) == 2.0 / 3.0
    elapsed = time.perf_counter() - t0
    ok = center_hits >= 19 and knn_observed == 20 and elapsed < 10.0
    assert report(1, "counterexample separation", ok,
                  f"(center {center_hits}/20, observed-vote {knn_observed}/20, "
                  f"{elapsed:.1f}s)")


def test_criterion_2_noiseless_convergence():
    """lipschitz_identity: median Monte-Carlo risk strictly decreasing over
    n in {64, 256, 1024, 4096}, final median <= 0.05."""
    t0 = time.perf_counter()
    dist = make_distribution("lipschitz_identity")
    sched = default_schedules()
    medians = []
    for n in [64, 256, 1024, 4096]:
        risks = []
        for trial in range(5):
            sample = dist.sampler([11, n, trial], n)
            model = medoid_net(sample, sched, dist.label_space,
                               dist.instance_space)
            risks.append(monte_carlo_risk(model, dist, 100_000,
                                          [11, n, trial, 7]).estimate)
        medians.append(float(np.median(risks)))
    elapsed = time.perf_counter() - t0
    decreasing = all(a > b for a, b in zip(medians, medians[1:]))
    ok = decreasing and medians[-1] <= 0.05 and elapsed < 600.0
    assert report(2, "noiseless convergence trend", ok,
                  f"(medians {[round(m, 4) for m in medians]}, {elapsed:.1f}s)")


def test_criterion_3_noisy_regression():
    """laplace_regression s=0.25 at n=10000: Monte-Carlo risk within 15%
    relative of the Bayes risk 0.25 in at least 4 of 5 trials."""
    t0 = time.perf_counter()
    dist = make_distribution("laplace_regression", {"s": 0.25})
    sched = default_schedules()
    n = 10_000
    hits = 0
    risks = []
    for trial in range(5):
        sample = dist.sampler([13, n, trial], n)
        model = medoid_net(sample, sched, dist.label_space, dist.instance_space)
        r = monte_carlo_risk(model, dist, 100_000, [13, n, trial, 7]).estimate
        risks.append(r)
        if abs(r - 0.25) <= 0.15 * 0.25:
            hits += 1
    elapsed = time.perf_counter() - t0
    ok = hits >= 4 and elapsed < 900.0
    assert report(3, "noisy regression target", ok,
                  f"(within-band {hits}/5, risks {[round(r, 4) for r in risks]}, "
                  f"{elapsed:.1f}s)")


def test_criterion_4_bound_validity():
    """finite_multiclass, 200 trials at n=500, delta=0.1: the fraction of
    trials with true risk above the reported bound must stay within
    delta + 0.05 slack."""
    t0 = time.perf_counter()
    dist = make_distribution("finite_multiclass")
    n, delta, trials = 500, 0.1, 200
    violations = 0
    for trial in range(trials):
        sample = dist.sampler([17, n, trial], n)
        model = fin_med_net(sample, delta, dist.label_space, dist.instance_space)
        if exact_risk(model, dist) > model.q_star:
            violations += 1
    frac = violations / trials
    elapsed = time.perf_counter() - t0
    ok = frac <= delta + 0.05 and elapsed < 300.0
    assert report(4, "bound validity", ok,
                  f"(violations {violations}/{trials}, {elapsed:.1f}s)")


def test_criterion_5_semistability():
    """1000 randomized (sample, gamma, deletion) cases: deleting non-center
    points reproduces the identical net, and with side information held
    fixed the identical predictor. Zero failures allowed."""
    rng = np.random.default_rng(20240819)
    spaces = [REAL, get_space("r2_l2"), get_space("discrete:p,q,r,s,t")]
    failures = 0
    for case in range(1000):
        space = spaces[case % 3]
        n = int(rng.integers(4, 28))
        if space.value_kind == "scalar":
            xs = [float(v) for v in rng.uniform(0, 1, n)]
            probes = [float(v) for v in rng.uniform(0, 1, 5)]
        elif space.value_kind == "vector":
            xs = [tuple(v) for v in rng.uniform(0, 1, (n, 2))]
            probes = [tuple(v) for v in rng.uniform(0, 1, (5, 2))]
        else:
            xs = [space.names[i] for i in rng.integers(0, len(space.names), n)]
            probes = list(space.names)
        labels = [float(v) for v in rng.integers(0, 5, n)]
        sample = LabeledSample(tuple(zip(xs, labels)))
        scales = [g for g in candidate_scales(sample, space)
                  if not math.isinf(g)]
        gamma = float(rng.choice(scales)) if scales else math.inf
        net = build_gamma_net(xs, gamma, space)
        # side information: medoid labels of the full sample, held fixed
        assignment = assign_voronoi(xs, net, space)
        cells = assignment.cells(net.d)
        side_info = [empirical_medoid([labels[i] for i in members],
                                      [0.0, 1.0, 2.0, 3.0, 4.0],
                                      get_space("integers"))
                     for members in cells]
        pts = [(xs[i], si) for i, si in zip(net.center_indices, side_info)]
        non_centers = [i for i in range(n) if i not in net.center_indices]
        if non_centers:
            keep_out = rng.choice(non_centers,
                                  size=int(rng.integers(1, len(non_centers) + 1)),
                                  replace=False)
            kept = [x for i, x in enumerate(xs) if i not in set(keep_out)]
        else:
            kept = list(xs)
        net2 = build_gamma_net(kept, gamma, space)
        centers1 = [xs[i] for i in net.center_indices]
        centers2 = [kept[i] for i in net2.center_indices]
        if centers1 != centers2:
            failures += 1
            continue
        pts2 = [(kept[i], si) for i, si in zip(net2.center_indices, side_info)]
        if any(nn_predict(pts, p, space) != nn_predict(pts2, p, space)
               for p in probes):
            failures += 1
    assert report(5, "semi-stability suite", failures == 0,
                  f"(failures {failures}/1000)")


def test_criterion_6_bound_oracle_equivalence():
    """All bound evaluators vs the independent arbitrary-precision oracle
    at 1e-12 relative error on 1000 random tuples, plus the algebraic
    identity final + alpha == q."""
    rng = np.random.default_rng(20240820)
    worst = 0.0
    identity_worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(30, 50_000))
        k = int(rng.integers(0, max(1, n // 6)))
        p = BoundParams(n=n, alpha=float(rng.uniform(0, 2)), k=k,
                        b=int(rng.integers(0, 100)),
                        delta=float(rng.uniform(1e-6, 0.99)),
                        L=float(rng.uniform(0, 8)))
        pairs = [
            (q_bound(p), q_reference(p.n, p.alpha, p.k, p.b, p.delta, p.L)),
            (compression_deviation_bound(p, "hoeffding"),
             hoeffding_reference(p.n, p.k, p.b, p.delta, p.L)),
            (compression_deviation_bound(p, "bernstein"),
             bernstein_reference(p.n, p.alpha, p.k, p.b, p.delta, p.L)),
            (compression_deviation_bound(p, "sample_dependent"),
             sample_dependent_reference(p.n, p.alpha, p.k, p.b, p.delta, p.L)),
            (compression_deviation_bound(p, "final"),
             final_reference(p.n, p.alpha, p.k, p.b, p.delta, p.L)),
            (empirical_bernstein_bound(min(p.alpha, p.L), p.n + 2, p.delta, p.L),
             empirical_bernstein_reference(min(p.alpha, p.L), p.n + 2,
                                           p.delta, p.L)),
        ]
        worst = max(worst, max(float(rel_err(g, w)) for g, w in pairs))
        lhs = compression_deviation_bound(p, "final") + p.alpha
        identity_worst = max(identity_worst,
                             abs(lhs - q_bound(p)) / max(1.0, q_bound(p)))
    ok = worst < 1e-12 and identity_worst < 1e-12
    assert report(6, "bound-formula oracle equivalence", ok,
                  f"(worst rel err {worst:.2e}, identity {identity_worst:.2e})")


def test_criterion_7_medoid_brute_force():
    """1000 random (cell, candidate) cases with sizes up to 64: the medoid
    matches an independent exhaustive minimizer, tie-breaks included."""
    rng = np.random.default_rng(20240821)
    spaces = [get_space("integers"), REAL, get_space("fourpoint")]
    failures = 0
    for case in range(1000):
        space = spaces[case % 3]
        csize = int(rng.integers(0, 65))
        ksize = int(rng.integers(1, 65))
        if space.value_kind == "name":
            names = space.names
            cell = [names[i] for i in rng.integers(0, len(names), csize)]
            cands = sorted({names[i] for i in rng.integers(0, len(names), ksize)},
                           key=space.order_key)
        elif case % 2:
            cell = [float(v) for v in rng.integers(-20, 21, csize)]
            cands = sorted({float(v) for v in rng.integers(-20, 21, ksize)})
        else:
            cell = [float(v) for v in rng.uniform(-5, 5, csize)]
            cands = sorted({float(v) for v in rng.uniform(-5, 5, ksize)})
        got = empirical_medoid(cell, cands, space)
        # independent oracle: order-sorted scan with exact summation
        best = None
        for cand in sorted(cands, key=space.order_key):
            cost = math.fsum(space.dist(cand, y) for y in cell)
            if best is None or cost < best[0]:
                best = (cost, cand)
        want = best[1] if cell else min(cands, key=space.order_key)
        if got != want:
            failures += 1
    assert report(7, "medoid brute-force equivalence", failures == 0,
                  f"(failures {failures}/1000)")


def test_criterion_8_geometry_invariants():
    """1000 random nets: packing, covering, Voronoi completeness, and the
    select_scale argmin certificate. Zero failures allowed."""
    rng = np.random.default_rng(20240822)
    failures = 0
    for case in range(1000):
        n = int(rng.integers(2, 40))
        xs = [float(v) for v in rng.uniform(0, 1, n)]
        gamma = float(rng.uniform(0.02, 1.2))
        net = build_gamma_net(xs, gamma, REAL)
        centers = [xs[i] for i in net.center_indices]
        packing = all(abs(a - b) >= gamma
                      for i, a in enumerate(centers) for b in centers[i + 1:])
        covering = all(min(abs(x - c) for c in centers) < gamma for x in xs)
        assignment = assign_voronoi(xs, net, REAL)
        partition = sorted(i for cell in assignment.cells(net.d)
                           for i in cell) == list(range(n))
        argmin_ok = all(
            abs(xs[i] - centers[c]) == min(abs(xs[i] - cv) for cv in centers)
            for i, c in enumerate(assignment.cell_of))
        # select_scale certificate on a random per-scale table
        rows = [(float(g), float(rng.uniform(0, 1)), int(rng.integers(1, n + 1)))
                for g in rng.uniform(0.01, 2.0, int(rng.integers(1, 6)))]
        if rng.random() < 0.3:
            rows.append((math.inf, rows[0][1], rows[0][2]))
        sample = LabeledSample(tuple((x, 0.0) for x in xs))
        gsel, qsel = select_scale(sample, rows, 3, 0.1, 1.0)
        qs = [(q_bound(BoundParams(n, a, d, 3, 0.1, 1.0)), g) for g, a, d in rows]
        qmin = min(q for q, _ in qs)
        ties = [g for q, g in qs if q == qmin]
        finite = [g for g in ties if not math.isinf(g)]
        expected = min(finite) if finite else math.inf
        cert = qsel == qmin and gsel == expected
        if not (packing and covering and partition and argmin_ok and cert):
            failures += 1
    assert report(8, "geometry invariants", failures == 0,
                  f"(failures {failures}/1000)")


def _q3_sup_gap(n: int, L: float = 1.0) -> float:
    """sup over alpha in [0, L] of (Q - alpha) with the default schedules
    (delta_n = exp(-sqrt(n)), k_n = b_n = ceil(sqrt(n))); the sup is at
    alpha = L since Q is affine increasing in alpha."""
    k = b = math.ceil(math.sqrt(n))
    p = BoundParams(n, L, k, b, 0.5, L, ln_inv_delta=math.sqrt(n))
    return q_bound(p) - L


def test_criterion_9_q3_trend_decreasing():
    """The bound gap is strictly decreasing along n = 10^2 .. 10^6."""
    t0 = time.perf_counter()
    gaps = [_q3_sup_gap(n) for n in [100, 1000, 10_000, 100_000, 1_000_000]]
    decreasing = all(a > b for a, b in zip(gaps, gaps[1:]))
    elapsed = time.perf_counter() - t0
    ok = decreasing and elapsed < 1.0
    assert report("9a", "bound-gap trend strictly decreasing", ok,
                  f"(gaps {[round(g, 3) for g in gaps]}, {elapsed:.3f}s)")


def test_criterion_9_q3_gap_below_5_percent_at_1e6():
    """Criterion as stated: the gap at n = 10^6 must be below 0.05.

    This is unattainable under the printed bound: with delta_n = exp(-sqrt(n))
    the confidence term alone satisfies 6 L sqrt(ln(4e^2/delta_n)/n)
    = 6 sqrt((ln(4e^2) + 1000)/1e6) ~ 0.19 > 0.05 at n = 1e6 and L = 1, for
    any k_n, b_n. The assertion is kept as written; see the decisions ledger.
    """
    gap = _q3_sup_gap(1_000_000)
    floor = 6.0 * math.sqrt((math.log(4.0) + 2.0 + 1000.0) / 1e6)
    report("9b", "bound gap below 0.05 at n=1e6", gap < 0.05,
           f"(gap {gap:.3f}; confidence-term floor alone is {floor:.3f})")
    assert gap < 0.05, (
        f"gap at n=1e6 is {gap:.3f}; the printed formula's confidence term "
        f"floor is {floor:.3f} > 0.05, so this criterion cannot be met")
