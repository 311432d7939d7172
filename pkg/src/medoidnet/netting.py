"""Scale sets, greedy gamma-nets, Voronoi assignment and 1-NN prediction.

These are the reference implementations: direct, deterministic, and close to
the definitions. The per-scale sweep engines in ``engine`` reproduce their
behavior on bulk data and are cross-checked against them in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .spaces import Element, LabeledSample, SpaceDescriptor

DEFAULT_MATRIX_CAP = 4096


@dataclass(frozen=True)
class ScaleSet:
    """Sorted distinct positive candidate scales, always ending in +inf."""

    scales: tuple

    def __post_init__(self):
        sc = tuple(self.scales)
        if not sc or sc[-1] != math.inf:
            raise PreconditionError("scale set must terminate with +inf")
        if any(s <= 0 for s in sc):
            raise PreconditionError("scales must be positive")
        if any(sc[i] >= sc[i + 1] for i in range(len(sc) - 1)):
            raise PreconditionError("scales must be strictly increasing")

    def __iter__(self):
        return iter(self.scales)

    def __len__(self):
        return len(self.scales)


@dataclass(frozen=True)
class GammaNet:
    """A gamma-net over a sample: scale plus ordered center indices."""

    gamma: float
    center_indices: tuple  # indices into the source instance list, selection order

    @property
    def d(self) -> int:
        return len(self.center_indices)


@dataclass(frozen=True)
class VoronoiAssignment:
    """Maps each sample index to the position of its cell's center."""

    cell_of: tuple

    def cells(self, d: int) -> list:
        out = [[] for _ in range(d)]
        for i, c in enumerate(self.cell_of):
            out[c].append(i)
        return out


class DistanceCache:
    """Instance distances, memoized as a full matrix below a size cap."""

    def __init__(self, space: SpaceDescriptor, instances: Sequence[Element],
                 cap: int = DEFAULT_MATRIX_CAP):
        self.space = space
        self.instances = list(instances)
        self.enc = space.encode(self.instances)
        self.n = len(self.instances)
        self._matrix = None
        self._cap = cap

    @property
    def matrix(self) -> Optional[np.ndarray]:
        if self._matrix is None and self.n <= self._cap:
            self._matrix = self.space.pairwise(self.enc)
        return self._matrix

    def row(self, i: int) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[i]
        return self.space.cross(self.enc[i:i + 1], self.enc)[0]

    def sorted_unique(self) -> np.ndarray:
        m = self.matrix
        if m is None:
            raise PreconditionError(
                f"n={self.n} exceeds the distance-matrix cap {self._cap}")
        iu = np.triu_indices(self.n, k=1)
        return np.unique(m[iu])


def candidate_scales(sample: LabeledSample, space: SpaceDescriptor,
                     cache: Optional[DistanceCache] = None) -> ScaleSet:
    """Distinct positive pairwise instance distances plus +inf."""
    sample.require_nonempty()
    cache = cache or DistanceCache(space, sample.instances)
    if cache.n == 1:
        vals = np.empty(0)
    else:
        vals = cache.sorted_unique()
    vals = vals[vals > 0]
    return ScaleSet(tuple(float(v) for v in vals) + (math.inf,))


def order_permutation(space: SpaceDescriptor, instances: Sequence[Element]) -> list:
    """Indices sorted by the space's total order, stable on duplicates."""
    return sorted(range(len(instances)),
                  key=lambda i: (space.order_key(instances[i]), i))


def build_gamma_net(instances: Sequence[Element], gamma: float,
                    space: SpaceDescriptor) -> GammaNet:
    """Greedy maximal gamma-net, iterating points in the space's total order.

    A point is accepted iff its distance to every previously accepted center
    is >= gamma. The net is therefore a deterministic function of the point
    set, which is what makes the compression scheme semi-stable. For
    gamma = +inf exactly the order-first point is accepted.
    """
    if not instances:
        raise PreconditionError("instances must be nonempty")
    perm = order_permutation(space, instances)
    if math.isinf(gamma):
        return GammaNet(gamma, (perm[0],))
    if gamma <= 0:
        raise PreconditionError("gamma must be positive")
    centers = []
    for i in perm:
        x = instances[i]
        if all(space.dist(x, instances[c]) >= gamma for c in centers):
            centers.append(i)
    return GammaNet(gamma, tuple(centers))


def assign_voronoi(instances: Sequence[Element], net: GammaNet,
                   space: SpaceDescriptor) -> VoronoiAssignment:
    """Nearest-center assignment; exact ties go to the earliest center.

    Centers are in the net's selection order, which is the space order, so
    the tie rule is the lexicographic one.
    """
    cells = []
    centers = [instances[c] for c in net.center_indices]
    for x in instances:
        best = 0
        bd = space.dist(x, centers[0])
        for j in range(1, len(centers)):
            d = space.dist(x, centers[j])
            if d < bd:
                bd, best = d, j
        cells.append(best)
    return VoronoiAssignment(tuple(cells))


def nn_predict(model_points: Sequence[tuple], x: Element,
               space: SpaceDescriptor) -> Element:
    """1-NN label of x among (instance, label) pairs; ties go to the
    order-smallest instance."""
    if not model_points:
        raise PreconditionError("model_points must be nonempty")
    best = None
    for pos, (xi, yi) in enumerate(model_points):
        d = space.dist(x, xi)
        key = space.order_key(xi)
        cand = (d, key, pos)
        if best is None or cand < best[0]:
            best = (cand, yi)
    return best[1]
