"""Cross-checks between the sweep engines and the reference operations."""

import math

import numpy as np
import pytest

from medoidnet import (
    DistanceCache,
    GammaNet,
    LabeledSample,
    assign_voronoi,
    build_gamma_net,
    candidate_scales,
    empirical_medoid,
    get_space,
)
from medoidnet.medoid import medoid_cost
from medoidnet.engine import (
    KERNEL_AVAILABLE,
    generic_rep_query,
    generic_sweep,
    rep_query_1d,
    sweep_1d,
    sweep_1d_numpy,
)
from medoidnet.engine.generic import GenericGeometry
from medoidnet.netting import order_permutation

REAL = get_space("real")


def make_1d_case(seed, n=40, ncand=7, duplicates=False):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, n)
    if duplicates:
        x[rng.integers(0, n, n // 4)] = x[0]
    x = np.sort(x)
    gv = np.sort(rng.uniform(-1, 2, ncand))
    lab = rng.integers(0, ncand, n).astype(np.int64)
    return x, lab, gv


def runs_equal(a, b):
    assert len(a) == len(b)
    for ra, rb in zip(a, b):
        assert ra.gamma_hi == rb.gamma_hi
        assert ra.gamma_lo == rb.gamma_lo
        assert np.array_equal(ra.center_positions, rb.center_positions)
        assert np.array_equal(ra.cell_of, rb.cell_of)
        assert np.array_equal(ra.medoid_idx, rb.medoid_idx)
        assert ra.alpha_engine == rb.alpha_engine


@pytest.mark.skipif(not KERNEL_AVAILABLE, reason="compiled kernel not built")
class TestKernelMatchesNumpy:
    def test_random_cases(self):
        for seed in range(25):
            x, lab, gv = make_1d_case(seed)
            runs_equal(sweep_1d_numpy(x, lab, gv), sweep_1d(x, lab, gv))

    def test_with_duplicates(self):
        for seed in range(10):
            x, lab, gv = make_1d_case(seed, duplicates=True)
            runs_equal(sweep_1d_numpy(x, lab, gv), sweep_1d(x, lab, gv))

    def test_single_point(self):
        x = np.array([0.25])
        lab = np.array([0], dtype=np.int64)
        gv = np.array([0.0, 1.0])
        runs_equal(sweep_1d_numpy(x, lab, gv), sweep_1d(x, lab, gv))


class TestEngineAgainstReference:
    """Every run's net, cells and medoids must equal the reference ops."""

    def check_runs(self, runs, x, lab, gv, space):
        xs = [float(v) for v in x]
        candidates = [float(v) for v in gv]
        covered_lo = math.inf
        for run in runs:
            gamma = run.gamma_hi
            net = build_gamma_net(xs, gamma, space)
            assert list(net.center_indices) == list(run.center_positions)
            assignment = assign_voronoi(xs, GammaNet(gamma, net.center_indices),
                                        space)
            assert list(assignment.cell_of) == list(run.cell_of)
            for ci, members in enumerate(assignment.cells(net.d)):
                cell = [candidates[lab[i]] for i in members]
                med = empirical_medoid(cell, candidates, space)
                # the engine's screening pick must achieve the minimum cost up
                # to summation rounding; selection canonicalizes the winner
                ca = medoid_cost(candidates[run.medoid_idx[ci]], cell, space)
                cb = medoid_cost(med, cell, space)
                assert ca <= cb * (1 + 1e-12) + 1e-12
            # runs tile (0, inf] without gaps
            assert run.gamma_hi == covered_lo or covered_lo == math.inf
            covered_lo = run.gamma_lo
        assert covered_lo == 0.0

    def test_numpy_engine(self):
        for seed in range(10):
            x, lab, gv = make_1d_case(seed, n=30, ncand=5)
            self.check_runs(sweep_1d_numpy(x, lab, gv), x, lab, gv, REAL)

    @pytest.mark.skipif(not KERNEL_AVAILABLE, reason="compiled kernel not built")
    def test_kernel_engine(self):
        for seed in range(10):
            x, lab, gv = make_1d_case(seed, n=30, ncand=5)
            self.check_runs(sweep_1d(x, lab, gv), x, lab, gv, REAL)

    def test_every_candidate_scale_is_covered_by_its_run(self):
        # the net at any scale inside a run equals the run's net
        for seed in range(6):
            x, lab, gv = make_1d_case(seed, n=20, ncand=4)
            xs = [float(v) for v in x]
            runs = sweep_1d_numpy(x, lab, gv)
            scales = candidate_scales(
                LabeledSample(tuple((v, 0.0) for v in xs)), REAL)
            for g in scales:
                run = next(r for r in runs if r.gamma_lo < g <= r.gamma_hi
                           or (math.isinf(g) and math.isinf(r.gamma_hi)))
                net = build_gamma_net(xs, g, REAL)
                assert list(net.center_indices) == list(run.center_positions)


class TestGenericEngine:
    def test_matches_1d_engine_on_the_line(self):
        for seed in range(8):
            x, lab, gv = make_1d_case(seed, n=25, ncand=5)
            xs = [float(v) for v in x]
            runs_np = sweep_1d_numpy(x, lab, gv)
            cache = DistanceCache(REAL, xs)
            geom = GenericGeometry(cache, order_permutation(REAL, xs))
            labels = [float(gv[i]) for i in lab]
            loss_cols = REAL.cross(REAL.encode([float(v) for v in gv]),
                                   REAL.encode(labels))
            runs_gen = list(generic_sweep(geom, loss_cols))
            assert len(runs_np) == len(runs_gen)
            cands = [float(v) for v in gv]
            for a, b in zip(runs_np, runs_gen):
                assert a.gamma_hi == b.gamma_hi
                assert a.gamma_lo == b.gamma_lo
                assert np.array_equal(a.center_positions, b.center_positions)
                assert np.array_equal(a.cell_of, b.cell_of)
                # engines sum costs differently; picks agree up to rounding
                for ci in range(a.d):
                    cell = [cands[lab[p]] for p in np.flatnonzero(a.cell_of == ci)]
                    ca = medoid_cost(cands[a.medoid_idx[ci]], cell, REAL)
                    cb = medoid_cost(cands[b.medoid_idx[ci]], cell, REAL)
                    assert abs(ca - cb) <= 1e-12 * (1 + ca + cb)

    def test_finite_space(self):
        space = get_space("discrete:u,v,w")
        xs = ["v", "u", "v", "w", "u", "u"]
        cache = DistanceCache(space, xs)
        perm = order_permutation(space, xs)
        labels = ["u"] * 6
        loss_cols = space.cross(space.encode(["u", "v", "w"]),
                                space.encode([labels[i] for i in perm]))
        runs = list(generic_sweep(GenericGeometry(cache, perm), loss_cols))
        # scales: {1, inf}; run 1 covers (1, inf] with a single center,
        # run 2 covers (0, 1] with one center per distinct value
        assert [r.d for r in runs] == [1, 3]
        assert runs[0].gamma_lo == 1.0


class TestRepQueries:
    def brute(self, xs, lo, hi):
        diffs = sorted({abs(a - b) for a in xs for b in xs if abs(a - b) > lo})
        for v in diffs:
            if math.isinf(hi) or v <= hi:
                return v
            break
        return math.inf

    def test_1d_matches_brute_force(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            xs = np.sort(rng.uniform(0, 1, rng.integers(2, 15)))
            lo = float(rng.uniform(0, 0.8))
            got = rep_query_1d(xs, lo, math.inf)
            assert got == self.brute(list(xs), lo, math.inf)

    def test_1d_zero_threshold_with_duplicates(self):
        xs = np.array([0.0, 0.0, 0.3, 0.3, 1.0])
        assert rep_query_1d(xs, 0.0, math.inf) == 0.3

    def test_generic(self):
        xs = [0.0, 0.5, 1.2]
        cache = DistanceCache(REAL, xs)
        su = cache.sorted_unique()
        assert generic_rep_query(su, 0.0, math.inf) == 0.5
        assert generic_rep_query(su, 0.5, math.inf) == 1.2 - 0.5
        assert generic_rep_query(su, 1.2, math.inf) == math.inf
        assert generic_rep_query(su, 0.5, 0.6) == math.inf
