"""Empirical medoid labels over Voronoi cells."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import PreconditionError
from .netting import GammaNet, VoronoiAssignment
from .spaces import Element, LabeledSample, SpaceDescriptor


@dataclass(frozen=True)
class RelabeledNet:
    """A gamma-net whose centers carry medoid labels from a candidate set."""

    net: GammaNet
    labels: tuple
    candidate_set_descriptor: str


def empirical_medoid(cell_labels: Sequence[Element], candidates: Sequence[Element],
                     space: SpaceDescriptor) -> Element:
    """The candidate minimizing the summed loss to the cell's labels.

    Ties are broken toward the order-smallest candidate; an empty cell
    yields the order-first candidate. The search is exhaustive over the
    candidate set, deliberately: exactness anchors every downstream test.
    Costs are summed with ``math.fsum`` so that mathematically equal costs
    compare equal regardless of label order and the tie rule is meaningful.
    """
    if not candidates:
        raise PreconditionError("candidates must be nonempty")
    if not cell_labels:
        return min(candidates, key=space.order_key)
    best = None
    for cand in candidates:
        cost = math.fsum(space.dist(cand, y) for y in cell_labels)
        key = space.order_key(cand)
        if best is None or cost < best[0] or (cost == best[0] and key < best[1]):
            best = (cost, key, cand)
    return best[2]


def medoid_cost(label: Element, cell_labels: Sequence[Element],
                space: SpaceDescriptor) -> float:
    return math.fsum(space.dist(label, y) for y in cell_labels)


def relabel_net(sample: LabeledSample, net: GammaNet, assignment: VoronoiAssignment,
                candidates: Sequence[Element], space: SpaceDescriptor,
                descriptor: str = "custom") -> RelabeledNet:
    """Per-cell empirical medoids over the original sample labels."""
    if len(assignment.cell_of) != sample.n:
        raise PreconditionError("assignment does not cover the sample")
    labels = sample.labels
    cells = assignment.cells(net.d)
    out = tuple(
        empirical_medoid([labels[i] for i in members], candidates, space)
        for members in cells
    )
    return RelabeledNet(net, out, descriptor)
