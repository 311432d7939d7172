"""The learners: scale sweep, bound-minimizing selection, model output.

Every learner follows the same template: enumerate candidate scales from the
sample's pairwise instance distances, build the greedy net / Voronoi cells /
medoid relabeling per scale, and return the 1-NN predictor at the scale
minimizing the generalization bound. The variants differ only in how the
medoid candidate set and the bound parameters (b, L) are formed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import engine
from .bounds import BoundParams, Schedules, q_bound, q_bound_coefficients
from .errors import PreconditionError, UnsupportedOperationError
from .medoid import empirical_medoid
from .netting import DistanceCache, order_permutation
from .spaces import (
    Element,
    FiniteSpace,
    IntegerSpace,
    LabeledSample,
    NetSpace,
    RealLine,
    SpaceDescriptor,
    get_space,
    project_to_eps_net,
)

MODEL_FORMAT_VERSION = 1


def empirical_risk(predictor: Callable[[Element], Element],
                   sample: LabeledSample, space: SpaceDescriptor) -> float:
    """Mean loss of a predictor over a sample.

    Summed with ``math.fsum`` so the value is independent of sample order;
    model fields store exactly this quantity.
    """
    sample.require_nonempty()
    losses = [space.dist(predictor(x), y) for x, y in sample.pairs]
    return math.fsum(losses) / sample.n


def select_scale(sample: LabeledSample, per_scale: Sequence[tuple],
                 bits: int, delta: float, L: float) -> tuple:
    """Bound-minimizing scale from explicit (gamma, alpha, d) records.

    Exact ties go to the smallest gamma, with +inf ordered last.
    """
    if not per_scale:
        raise PreconditionError("per_scale must be nonempty")
    best = None
    for gamma, alpha, d in per_scale:
        q = q_bound(BoundParams(sample.n, alpha, d, bits, delta, L))
        key = (q, math.isinf(gamma), gamma)
        if best is None or key < best[0]:
            best = (key, gamma, q)
    return best[1], best[2]


@dataclass(frozen=True)
class MedoidModel:
    """A trained predictor: relabeled net points plus selection diagnostics."""

    instance_space_id: str
    label_space_id: str
    learner_variant: str
    selected_gamma: float
    net_points: tuple            # ((instance, medoid label), ...) in net order
    alpha_star: float
    q_star: float
    schedules_used: dict

    @property
    def d(self) -> int:
        return len(self.net_points)

    def predictor(self, instance_space: Optional[SpaceDescriptor] = None):
        space = instance_space or get_space(self.instance_space_id)
        pts = self.net_points
        if len(pts) == 1:
            y = pts[0][1]
            return lambda x: y

        def predict(x):
            best = None
            for xi, yi in pts:
                d = space.dist(x, xi)
                if best is None or d < best[0]:
                    best = (d, yi)
            return best[1]

        return predict

    def predict_many(self, xs: Sequence[Element],
                     instance_space: Optional[SpaceDescriptor] = None) -> list:
        """Vectorized batch prediction; tie handling matches nn_predict."""
        space = instance_space or get_space(self.instance_space_id)
        if not xs:
            return []
        if len(self.net_points) == 1:
            return [self.net_points[0][1]] * len(xs)
        if space.value_kind == "scalar":
            centers = np.asarray([x for x, _ in self.net_points])
            labels = [y for _, y in self.net_points]
            q = np.asarray([float(v) for v in xs])
            idx = np.clip(np.searchsorted(centers, q), 1, len(centers) - 1)
            left = centers[idx - 1]
            right = centers[idx]
            pick = np.where((q - left) <= (right - q), idx - 1, idx)
            return [labels[i] for i in pick]
        enc_c = space.encode([x for x, _ in self.net_points])
        enc_q = space.encode(list(xs))
        dist = space.cross(enc_q, enc_c)
        picks = np.argmin(dist, axis=1)  # first argmin = net order = space order
        labels = [y for _, y in self.net_points]
        return [labels[i] for i in picks]

    # -- serialization ------------------------------------------------------
    def to_json_dict(self, instance_space=None, label_space=None) -> dict:
        isp = instance_space or get_space(self.instance_space_id)
        lsp = label_space or get_space(self.label_space_id)
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "learner_variant": self.learner_variant,
            "instance_space_id": self.instance_space_id,
            "label_space_id": self.label_space_id,
            "selected_gamma": "inf" if math.isinf(self.selected_gamma)
                              else self.selected_gamma,
            "alpha_star": self.alpha_star,
            "q_star": self.q_star,
            "schedules_used": self.schedules_used,
            "net_points": [[isp.element_to_json(x), lsp.element_to_json(y)]
                           for x, y in self.net_points],
        }

    def save(self, path: str, instance_space=None, label_space=None) -> None:
        doc = self.to_json_dict(instance_space, label_space)
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, doc: dict, instance_space=None, label_space=None):
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise PreconditionError(
                f"unsupported model format {doc.get('format_version')!r}")
        isp = instance_space or get_space(doc["instance_space_id"])
        lsp = label_space or get_space(doc["label_space_id"])
        gamma = doc["selected_gamma"]
        gamma = math.inf if gamma == "inf" else float(gamma)
        pts = tuple((isp.element_from_json(x), lsp.element_from_json(y))
                    for x, y in doc["net_points"])
        return cls(doc["instance_space_id"], doc["label_space_id"],
                   doc["learner_variant"], gamma, pts,
                   float(doc["alpha_star"]), float(doc["q_star"]),
                   dict(doc["schedules_used"]))

    @classmethod
    def load(cls, path: str, instance_space=None, label_space=None):
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh), instance_space, label_space)


# ---------------------------------------------------------------------------
# shared sweep core
# ---------------------------------------------------------------------------

def _abs_scalar(space: SpaceDescriptor) -> bool:
    if isinstance(space, NetSpace):
        return _abs_scalar(space.parent)
    return isinstance(space, (RealLine, IntegerSpace))


def _run_sweep(sample: LabeledSample, instance_space: SpaceDescriptor,
               label_space: SpaceDescriptor, candidates: list,
               bits: int, delta: float, L_for_q: float,
               variant: str, schedules_used: dict,
               candidate_desc: str) -> MedoidModel:
    """Sweep all candidate scales, pick the bound minimizer, build the model.

    Engines compute per-run geometry and a screening risk estimate; the few
    runs within a hair of the minimum are re-labeled through the reference
    medoid and re-scored with order-independent summation, so the stored
    alpha_star / q_star are exactly reproducible from the public operations.
    """
    sample.require_nonempty()
    n = sample.n
    instances = sample.instances
    labels = sample.labels
    perm = order_permutation(instance_space, instances)
    labels_sorted = [labels[i] for i in perm]
    candidates = sorted(candidates, key=label_space.order_key)
    coeffs = engine.QCoefficients(*q_bound_coefficients(n, bits, delta, L_for_q))

    use_1d = _abs_scalar(instance_space) and _abs_scalar(label_space)
    runs = None
    rep_query = None
    if use_1d:
        x_sorted = np.asarray([float(instances[i]) for i in perm], dtype=np.float64)
        gv = np.asarray([float(c) for c in candidates], dtype=np.float64)
        lab_vals = np.asarray([float(y) for y in labels_sorted], dtype=np.float64)
        idx = np.searchsorted(gv, lab_vals)
        ok = (idx < len(gv))
        if ok.all() and (gv[idx] == lab_vals).all():
            runs = engine.sweep_1d(x_sorted, idx.astype(np.int64), gv, coeffs)
            rep_query = lambda lo, hi: engine.rep_query_1d(x_sorted, lo, hi)
    if runs is None:
        cache = DistanceCache(instance_space, instances)
        geom = engine.generic.GenericGeometry(cache, perm)
        cand_enc = label_space.encode(candidates)
        lab_enc = label_space.encode(labels_sorted)
        loss_cols = label_space.cross(cand_enc, lab_enc)
        runs = list(engine.generic_sweep(geom, loss_cols))
        su = geom.sorted_unique() if geom.matrix is not None else None
        if su is not None:
            rep_query = lambda lo, hi: engine.generic_rep_query(su, lo, hi)
        else:
            rep_query = lambda lo, hi: _rep_on_demand(cache, lo, hi)

    # screening pass
    qs = [coeffs.q(r.alpha_engine, r.d) for r in runs]
    q_min = min(qs)
    margin = q_min * (1.0 + 1e-9) + 1e-12
    shortlist = [i for i, q in enumerate(qs) if q <= margin]

    # canonical pass over the shortlist
    best = None
    for i in shortlist:
        run = runs[i]
        cell_labels, cells = _cells_of(run, labels_sorted)
        meds = [empirical_medoid(cl, candidates, label_space) for cl in cell_labels]
        losses = [label_space.dist(meds[c], labels_sorted[p])
                  for p, c in enumerate(run.cell_of)]
        alpha = math.fsum(losses) / n
        q = q_bound(BoundParams(n, alpha, run.d, bits, delta, L_for_q))
        rep = rep_query(run.gamma_lo, run.gamma_hi)
        key = (q, math.isinf(rep), rep)
        if best is None or key < best[0]:
            best = (key, run, meds, alpha, q, rep)

    _, run, meds, alpha_star, q_star, rep = best
    net_points = tuple(
        (instances[perm[p]], meds[c]) for c, p in enumerate(run.center_positions)
    )
    return MedoidModel(
        instance_space_id=instance_space.space_id,
        label_space_id=(label_space.parent.space_id
                        if isinstance(label_space, NetSpace) else label_space.space_id),
        learner_variant=variant,
        selected_gamma=rep,
        net_points=net_points,
        alpha_star=alpha_star,
        q_star=q_star,
        schedules_used=dict(schedules_used,
                            candidate_set=candidate_desc,
                            bits=bits, delta=delta, q_loss_range=L_for_q),
    )


def _cells_of(run, labels_sorted):
    cells = [[] for _ in range(run.d)]
    for p, c in enumerate(run.cell_of):
        cells[int(c)].append(p)
    cell_labels = [[labels_sorted[p] for p in members] for members in cells]
    return cell_labels, cells


def _rep_on_demand(cache: DistanceCache, lo: float, hi: float) -> float:
    best = math.inf
    for i in range(cache.n):
        row = cache.row(i)[i + 1:]
        cand = row[row > lo]
        if cand.size:
            best = min(best, float(cand.min()))
    if math.isinf(hi) or best <= hi:
        return best
    return math.inf


def _finite_elements(space: SpaceDescriptor) -> Optional[list]:
    if isinstance(space, (FiniteSpace, NetSpace)):
        return list(space.enumeration())
    return None


# ---------------------------------------------------------------------------
# the learners
# ---------------------------------------------------------------------------

def fin_med_net(sample: LabeledSample, delta: float,
                label_space: SpaceDescriptor,
                instance_space: SpaceDescriptor) -> MedoidModel:
    """Finite label spaces: medoid candidates are all of Y,
    b = ceil(log2 |Y|) side-information bits, L = the loss range of Y."""
    elements = _finite_elements(label_space)
    if elements is None:
        raise PreconditionError(
            "label space is not finite; use countable_med_net or medoid_net")
    bits = math.ceil(math.log2(len(elements))) if len(elements) > 1 else 0
    return _run_sweep(sample, instance_space, label_space, elements,
                      bits, delta, label_space.diameter, "fin",
                      {}, "full finite label space")


def countable_med_net(sample: LabeledSample, delta: float, bits: int,
                      label_space: SpaceDescriptor,
                      instance_space: SpaceDescriptor) -> MedoidModel:
    """Countable bounded label spaces: candidates are the first 2**bits
    elements under the canonical enumeration."""
    if bits < 0:
        raise PreconditionError("bits must be nonnegative")
    enum = label_space.enumeration()
    if enum is None:
        raise UnsupportedOperationError(
            f"label space {label_space.space_id!r} has no canonical enumeration")
    if not math.isfinite(label_space.diameter):
        raise PreconditionError(
            "label space has unbounded diameter; use ctbl_unbdd")
    limit = 1 << bits
    candidates = []
    for y in enum:
        if len(candidates) >= limit:
            break
        candidates.append(y)
    return _run_sweep(sample, instance_space, label_space, candidates,
                      bits, delta, label_space.diameter, "countable",
                      {}, f"cardinality-truncated, 2^{bits} first elements")


def truncate_labels(sample: LabeledSample, label_space: SpaceDescriptor,
                    L_trunc: float, anchor: Optional[Element] = None) -> LabeledSample:
    """Project every label onto the closed L-ball about the anchor."""
    if L_trunc <= 0:
        raise PreconditionError("L_trunc must be positive")
    y0 = anchor if anchor is not None else label_space.anchor
    if y0 is None:
        raise PreconditionError("label space has no anchor")
    ball = None
    out = []
    for x, y in sample.pairs:
        if label_space.dist(y0, y) <= L_trunc:
            out.append((x, y))
            continue
        proj = label_space.ball_project(y, y0, L_trunc)
        if proj is None:
            if ball is None:
                ball = label_space.ball_elements(y0, L_trunc)
                if not ball:
                    raise UnsupportedOperationError(
                        "label space supports neither ball projection nor "
                        "ball enumeration")
            proj = project_to_eps_net(label_space, y, ball)
        out.append((x, proj))
    return LabeledSample(tuple(out))


def ctbl_unbdd(sample: LabeledSample, delta: float, bits: int, L_trunc: float,
               label_space: SpaceDescriptor, instance_space: SpaceDescriptor,
               anchor: Optional[Element] = None) -> MedoidModel:
    """Countable metric label spaces, unbounded diameter allowed.

    Training labels are truncated to the closed L-ball about the anchor and
    the countable learner then runs inside the truncated space; its medoid
    candidates are the ball-restricted enumeration, cardinality-limited to
    2**bits. The bound's loss-range parameter is the truncation radius
    L_trunc, matching how the selection bound is invoked with the truncated
    space's schedule.
    """
    if not label_space.is_metric:
        raise PreconditionError("ctbl_unbdd requires a metric label space")
    y0 = anchor if anchor is not None else label_space.anchor
    if y0 is None:
        raise PreconditionError("label space has no anchor")
    truncated = truncate_labels(sample, label_space, L_trunc, y0)
    ball = label_space.ball_elements(y0, L_trunc)
    if ball is None:
        raise UnsupportedOperationError(
            f"label space {label_space.space_id!r} cannot enumerate a ball; "
            "discretize through medoid_net instead")
    if not ball:
        raise PreconditionError("the truncation ball contains no elements")
    limit = 1 << bits if bits < 63 else len(ball)
    candidates = ball[:min(limit, len(ball))]
    return _run_sweep(truncated, instance_space, label_space, candidates,
                      bits, delta, L_trunc, "unbounded",
                      {"L_trunc": L_trunc},
                      f"ball-restricted enumeration, radius {L_trunc!r}")


def project_labels(sample: LabeledSample, net: Sequence[Element],
                   label_space: SpaceDescriptor) -> LabeledSample:
    """Replace each label with its closest net element (ties order-smallest)."""
    ys = sample.labels
    if label_space.value_kind == "scalar":
        gv = np.asarray([float(v) for v in net])
        order = np.argsort(gv, kind="stable")
        gv_sorted = gv[order]
        arr = np.asarray([float(y) for y in ys])
        idx = np.clip(np.searchsorted(gv_sorted, arr), 1, len(gv_sorted) - 1) \
            if len(gv_sorted) > 1 else np.zeros(len(arr), dtype=np.int64)
        if len(gv_sorted) > 1:
            left = gv_sorted[idx - 1]
            right = gv_sorted[idx]
            pick = np.where((arr - left) <= (right - arr), idx - 1, idx)
        else:
            pick = idx
        net_sorted = [net[i] for i in order]
        return LabeledSample(tuple(
            (x, net_sorted[p]) for (x, _), p in zip(sample.pairs, pick)))
    return LabeledSample(tuple(
        (x, project_to_eps_net(label_space, y, net)) for x, y in sample.pairs))


def medoid_net(sample: LabeledSample, schedules: Schedules,
               label_space: SpaceDescriptor,
               instance_space: SpaceDescriptor) -> MedoidModel:
    """Separable label spaces: discretize through an eps-net, then run the
    truncated countable learner with the scheduled (delta, bits, L)."""
    sample.require_nonempty()
    n = sample.n
    eps = schedules.eps_n(n)
    net = label_space.eps_net(eps)
    if net is None:
        raise UnsupportedOperationError(
            f"label space {label_space.space_id!r} has no eps-net oracle")
    if label_space.anchor is None:
        raise PreconditionError("label space has no anchor")
    net_space = NetSpace(label_space, net)
    projected = project_labels(sample, net, label_space)
    model = ctbl_unbdd(projected, schedules.delta_n(n), schedules.b_n(n),
                       schedules.L_n(n), net_space, instance_space,
                       anchor=net_space.anchor)
    sched = dict(model.schedules_used, eps=eps)
    return MedoidModel(
        instance_space_id=model.instance_space_id,
        label_space_id=label_space.space_id,
        learner_variant="separable",
        selected_gamma=model.selected_gamma,
        net_points=model.net_points,
        alpha_star=model.alpha_star,
        q_star=model.q_star,
        schedules_used=sched,
    )
