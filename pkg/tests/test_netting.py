import math

import numpy as np
import pytest

from medoidnet import (
    LabeledSample,
    PreconditionError,
    RealVector,
    assign_voronoi,
    build_gamma_net,
    candidate_scales,
    get_space,
    nn_predict,
)

REAL = get_space("real")


def sample_of(instances, labels=None):
    labels = labels if labels is not None else [0.0] * len(instances)
    return LabeledSample(tuple(zip(instances, labels)))


class TestCandidateScales:
    def test_three_points(self):
        ss = candidate_scales(sample_of([0.0, 0.5, 1.2]), REAL)
        assert list(ss) == [0.5, 1.2 - 0.5, 1.2, math.inf]

    def test_duplicates_only(self):
        ss = candidate_scales(sample_of([0.0, 0.0]), REAL)
        assert list(ss) == [math.inf]

    def test_single_point(self):
        ss = candidate_scales(sample_of([0.3]), REAL)
        assert list(ss) == [math.inf]


class TestBuildGammaNet:
    def test_examples(self):
        xs = [0.0, 0.5, 1.2]
        assert build_gamma_net(xs, 1.0, REAL).center_indices == (0, 2)
        assert build_gamma_net(xs, 0.4, REAL).center_indices == (0, 1, 2)
        assert build_gamma_net(xs, math.inf, REAL).center_indices == (0,)

    def test_order_first_point_not_arrival_first(self):
        xs = [1.2, 0.5, 0.0]
        net = build_gamma_net(xs, math.inf, REAL)
        assert xs[net.center_indices[0]] == 0.0

    def test_packing_and_covering(self):
        rng = np.random.default_rng(11)
        for trial in range(50):
            xs = list(rng.uniform(0, 1, rng.integers(2, 40)))
            gamma = float(rng.uniform(0.05, 0.8))
            net = build_gamma_net(xs, gamma, REAL)
            centers = [xs[i] for i in net.center_indices]
            for i, a in enumerate(centers):
                for b in centers[i + 1:]:
                    assert abs(a - b) >= gamma
            for x in xs:
                assert min(abs(x - c) for c in centers) < gamma

    def test_determinism_under_permutation(self):
        rng = np.random.default_rng(5)
        xs = list(rng.uniform(0, 1, 25))
        net1 = build_gamma_net(xs, 0.2, REAL)
        order = list(rng.permutation(len(xs)))
        xs2 = [xs[i] for i in order]
        net2 = build_gamma_net(xs2, 0.2, REAL)
        assert [xs[i] for i in net1.center_indices] == \
               [xs2[i] for i in net2.center_indices]

    def test_deletion_stability(self):
        # removing non-center points must reproduce the identical net
        rng = np.random.default_rng(7)
        for trial in range(100):
            xs = list(rng.uniform(0, 1, rng.integers(3, 30)))
            gamma = float(rng.uniform(0.05, 0.9))
            net = build_gamma_net(xs, gamma, REAL)
            center_vals = [xs[i] for i in net.center_indices]
            non_centers = [i for i in range(len(xs)) if i not in net.center_indices]
            if not non_centers:
                continue
            drop = set(rng.choice(non_centers,
                                  size=rng.integers(1, len(non_centers) + 1),
                                  replace=False))
            kept = [x for i, x in enumerate(xs) if i not in drop]
            net2 = build_gamma_net(kept, gamma, REAL)
            assert [kept[i] for i in net2.center_indices] == center_vals

    def test_vector_space(self):
        sp = RealVector(2, 2)
        xs = [(0.0, 0.0), (0.0, 0.9), (5.0, 0.0)]
        net = build_gamma_net(xs, 1.0, sp)
        assert net.center_indices == (0, 2)


class TestVoronoi:
    def test_examples(self):
        xs = [0.0, 0.5, 1.2]
        net = build_gamma_net(xs, 1.0, REAL)
        assert assign_voronoi(xs, net, REAL).cell_of == (0, 0, 1)

    def test_exact_tie_to_order_smaller_center(self):
        xs = [0.0, 1.2, 0.6]
        net = build_gamma_net(xs, 1.0, REAL)
        assert [xs[i] for i in net.center_indices] == [0.0, 1.2]
        assert assign_voronoi(xs, net, REAL).cell_of == (0, 1, 0)

    def test_single_cell(self):
        xs = [0.3, 0.4, 0.5]
        net = build_gamma_net(xs, math.inf, REAL)
        assert assign_voronoi(xs, net, REAL).cell_of == (0, 0, 0)

    def test_partition(self):
        rng = np.random.default_rng(2)
        xs = list(rng.uniform(0, 1, 30))
        net = build_gamma_net(xs, 0.15, REAL)
        assignment = assign_voronoi(xs, net, REAL)
        cells = assignment.cells(net.d)
        assert sum(len(c) for c in cells) == len(xs)
        assert sorted(i for c in cells for i in c) == list(range(len(xs)))


class TestNNPredict:
    MODEL = [(0.0, "a"), (1.2, "b")]

    def test_nearest(self):
        assert nn_predict(self.MODEL, 0.5, REAL) == "a"
        assert nn_predict(self.MODEL, 1.1, REAL) == "b"

    def test_exact_instance(self):
        assert nn_predict(self.MODEL, 1.2, REAL) == "b"

    def test_tie_to_order_smaller_instance(self):
        assert nn_predict(self.MODEL, 0.6, REAL) == "a"
        shuffled = [(1.2, "b"), (0.0, "a")]
        assert nn_predict(shuffled, 0.6, REAL) == "a"

    def test_empty_model(self):
        with pytest.raises(PreconditionError):
            nn_predict([], 0.0, REAL)
