"""Instance and label space abstractions plus the built-in spaces.

A space bundles a loss/distance function, a total order, and optional
capabilities (canonical enumeration, eps-net oracle, closed-ball helpers).
Spaces are immutable after construction and all operations are pure.

Element representation by kind:
  * ``scalar`` -- Python float (real line, integers)
  * ``vector`` -- tuple of floats (R^d)
  * ``name``   -- string (finite alphabets)
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .errors import InvalidElementError, PreconditionError, UnsupportedOperationError

Element = Any


class SpaceDescriptor:
    """A metric (or general-loss) space with a fixed total order.

    Subclasses fill in distance, order and the optional capabilities.
    ``is_metric`` distinguishes true metrics from arbitrary loss functions;
    the triangle inequality is only asserted for the former.
    """

    space_id: str
    value_kind: str  # "scalar" | "vector" | "name"
    diameter: float
    anchor: Optional[Element]
    is_metric: bool = True

    # -- mandatory ---------------------------------------------------------
    def dist(self, a: Element, b: Element) -> float:
        raise NotImplementedError

    def order_key(self, a: Element):
        """Sort key realizing the space's total order."""
        raise NotImplementedError

    def contains(self, a: Element) -> bool:
        raise NotImplementedError

    # -- optional capabilities --------------------------------------------
    def enumeration(self) -> Optional[Sequence[Element]]:
        """Elements in canonical injection order (omega), or None."""
        return None

    def eps_net(self, eps: float) -> Optional[list]:
        """A countable eps-cover of the space, or None if no oracle."""
        return None

    def ball_elements(self, center: Element, radius: float) -> Optional[list]:
        """All elements of the closed ball, enumeration-ordered, or None."""
        enum = self.enumeration()
        if enum is None:
            return None
        return [y for y in enum if self.dist(center, y) <= radius]

    def ball_project(self, y: Element, center: Element, radius: float) -> Optional[Element]:
        """Exact closed-ball projection when a closed form exists."""
        return None

    # -- array helpers used by the sweep engines ---------------------------
    def encode(self, elements: Sequence[Element]) -> np.ndarray:
        raise NotImplementedError

    def decode(self, arr: np.ndarray) -> list:
        raise NotImplementedError

    def pairwise(self, enc: np.ndarray) -> np.ndarray:
        """Full distance matrix for encoded elements."""
        raise NotImplementedError

    def cross(self, enc_a: np.ndarray, enc_b: np.ndarray) -> np.ndarray:
        """Distance matrix between two encoded element arrays."""
        raise NotImplementedError

    # -- serialization ------------------------------------------------------
    def element_to_json(self, a: Element):
        if self.value_kind == "vector":
            return list(a)
        return a

    def element_from_json(self, obj) -> Element:
        if self.value_kind == "vector":
            return tuple(float(v) for v in obj)
        if self.value_kind == "scalar":
            return float(obj)
        return str(obj)

    def _check(self, a: Element) -> Element:
        if not self.contains(a):
            raise InvalidElementError(f"{a!r} is not an element of space {self.space_id!r}")
        return a

    def __repr__(self):
        return f"<{type(self).__name__} {self.space_id!r}>"


class RealLine(SpaceDescriptor):
    """The real line with absolute loss; eps-nets are pitch-eps grids.

    The grid is anchored at 0 and clipped to ``box``; the box is what makes
    the eps-net oracle constructible on an unbounded space.
    """

    value_kind = "scalar"
    diameter = math.inf
    is_metric = True

    def __init__(self, space_id: str = "real", box: tuple = (-16.0, 16.0)):
        if box[0] > 0.0 or box[1] < 0.0 or box[0] >= box[1]:
            raise PreconditionError("box must be a nondegenerate interval containing 0")
        self.space_id = space_id
        self.box = (float(box[0]), float(box[1]))
        self.anchor = 0.0

    def dist(self, a, b):
        return abs(float(a) - float(b))

    def order_key(self, a):
        return float(a)

    def contains(self, a):
        return isinstance(a, (int, float)) and math.isfinite(a)

    def eps_net(self, eps: float):
        if eps <= 0:
            raise PreconditionError("eps must be positive")
        lo = math.ceil(self.box[0] / eps - 1e-9)
        hi = math.floor(self.box[1] / eps + 1e-9)
        return [k * eps for k in range(lo, hi + 1)]

    def ball_project(self, y, center, radius):
        return min(max(float(y), center - radius), center + radius)

    def encode(self, elements):
        return np.asarray(elements, dtype=np.float64)

    def decode(self, arr):
        return [float(v) for v in arr]

    def pairwise(self, enc):
        return np.abs(enc[:, None] - enc[None, :])

    def cross(self, enc_a, enc_b):
        return np.abs(np.asarray(enc_a)[:, None] - np.asarray(enc_b)[None, :])


class RealVector(SpaceDescriptor):
    """R^d with the l1 or l2 metric; lexicographic coordinate order."""

    value_kind = "vector"
    diameter = math.inf
    is_metric = True

    def __init__(self, dim: int, p: int = 2, space_id: Optional[str] = None,
                 box: tuple = (-16.0, 16.0)):
        if dim < 1 or p not in (1, 2):
            raise PreconditionError("dim must be >= 1 and p in {1, 2}")
        self.dim = dim
        self.p = p
        self.space_id = space_id or f"r{dim}_l{p}"
        self.box = (float(box[0]), float(box[1]))
        self.anchor = tuple(0.0 for _ in range(dim))

    def dist(self, a, b):
        if self.p == 1:
            return float(sum(abs(x - y) for x, y in zip(a, b)))
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))

    def order_key(self, a):
        return tuple(float(v) for v in a)

    def contains(self, a):
        try:
            return len(a) == self.dim and all(math.isfinite(float(v)) for v in a)
        except TypeError:
            return False

    def eps_net(self, eps: float):
        if eps <= 0:
            raise PreconditionError("eps must be positive")
        pitch = eps / math.sqrt(self.dim)
        lo = math.ceil(self.box[0] / pitch - 1e-9)
        hi = math.floor(self.box[1] / pitch + 1e-9)
        if (hi - lo + 1) ** self.dim > 2_000_000:
            raise PreconditionError(
                f"eps-net of pitch {pitch:g} over box {self.box} is too large")
        axes = [np.arange(lo, hi + 1) * pitch] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        return [tuple(row) for row in pts]  # ij meshgrid ravel = lexicographic

    def ball_project(self, y, center, radius):
        if self.p != 2:
            return None  # l1 projection is not unique; no closed form shipped
        d = self.dist(y, center)
        if d <= radius:
            return tuple(float(v) for v in y)
        t = radius / d
        return tuple(c + t * (v - c) for v, c in zip(y, center))

    def encode(self, elements):
        return np.asarray([tuple(e) for e in elements], dtype=np.float64)

    def decode(self, arr):
        return [tuple(float(v) for v in row) for row in arr]

    def pairwise(self, enc):
        diff = enc[:, None, :] - enc[None, :, :]
        if self.p == 1:
            return np.abs(diff).sum(axis=2)
        return np.sqrt((diff ** 2).sum(axis=2))

    def cross(self, enc_a, enc_b):
        diff = np.asarray(enc_a)[:, None, :] - np.asarray(enc_b)[None, :, :]
        if self.p == 1:
            return np.abs(diff).sum(axis=2)
        return np.sqrt((diff ** 2).sum(axis=2))


class FiniteSpace(SpaceDescriptor):
    """A finite set of named elements with an explicit loss matrix.

    The total order and the canonical enumeration are both the construction
    order of ``names``.
    """

    value_kind = "name"

    def __init__(self, space_id: str, names: Sequence[str], loss: np.ndarray,
                 is_metric: bool = True, anchor: Optional[str] = None):
        loss = np.asarray(loss, dtype=np.float64)
        if loss.shape != (len(names), len(names)):
            raise PreconditionError("loss matrix shape must match the element count")
        if len(set(names)) != len(names):
            raise PreconditionError("element names must be distinct")
        self.space_id = space_id
        self.names = list(names)
        self._index = {nm: i for i, nm in enumerate(self.names)}
        self.loss_matrix = loss
        self.is_metric = is_metric
        self.diameter = float(loss.max()) if len(names) else 0.0
        self.anchor = anchor if anchor is not None else self.names[0]

    def dist(self, a, b):
        return float(self.loss_matrix[self._index[self._check(a)],
                                      self._index[self._check(b)]])

    def order_key(self, a):
        return self._index[self._check(a)]

    def contains(self, a):
        return a in self._index

    def enumeration(self):
        return list(self.names)

    def eps_net(self, eps: float):
        if eps <= 0:
            raise PreconditionError("eps must be positive")
        return list(self.names)

    def ball_project(self, y, center, radius):
        best = None
        for cand in self.names:
            if self.dist(center, cand) <= radius:
                d = self.dist(y, cand)
                if best is None or d < best[0]:
                    best = (d, cand)
        return None if best is None else best[1]

    def encode(self, elements):
        return np.asarray([self._index[self._check(e)] for e in elements], dtype=np.int64)

    def decode(self, arr):
        return [self.names[int(i)] for i in arr]

    def pairwise(self, enc):
        return self.loss_matrix[np.ix_(enc, enc)]

    def cross(self, enc_a, enc_b):
        return self.loss_matrix[np.ix_(np.asarray(enc_a), np.asarray(enc_b))]


class IntegerSpace(SpaceDescriptor):
    """The integers with absolute loss; canonical enumeration 0, 1, -1, 2, -2, ..."""

    value_kind = "scalar"
    diameter = math.inf
    is_metric = True

    def __init__(self, space_id: str = "integers", enum_limit: int = 1_000_000):
        self.space_id = space_id
        self.anchor = 0.0
        self.enum_limit = enum_limit

    def dist(self, a, b):
        return abs(float(a) - float(b))

    def order_key(self, a):
        return float(a)

    def contains(self, a):
        return isinstance(a, (int, float)) and float(a).is_integer()

    def enumeration(self):
        out = [0.0]
        k = 1
        while len(out) < self.enum_limit:
            out.append(float(k))
            out.append(float(-k))
            k += 1
        return out

    def ball_elements(self, center, radius):
        lo = math.ceil(center - radius)
        hi = math.floor(center + radius)
        ks = sorted(range(lo, hi + 1), key=lambda k: (abs(k), -k))  # 0,1,-1,2,-2 order
        return [float(k) for k in ks]

    def ball_project(self, y, center, radius):
        lo = math.ceil(center - radius)
        hi = math.floor(center + radius)
        if lo > hi:
            return None
        v = min(max(float(y), lo), hi)
        below, above = math.floor(v), math.ceil(v)
        # nearest integer in [lo, hi]; exact midpoint goes to the smaller one
        if below < lo:
            return float(above)
        if above > hi or (v - below) <= (above - v):
            return float(below)
        return float(above)

    def encode(self, elements):
        return np.asarray(elements, dtype=np.float64)

    def decode(self, arr):
        return [float(v) for v in arr]

    def pairwise(self, enc):
        return np.abs(enc[:, None] - enc[None, :])

    def cross(self, enc_a, enc_b):
        return np.abs(np.asarray(enc_a)[:, None] - np.asarray(enc_b)[None, :])


class NetSpace(SpaceDescriptor):
    """A finite sub-space over explicit elements of a parent space.

    Used for label spaces discretized through an eps-net: elements remain
    parent elements, distance and order are inherited, the canonical
    enumeration is the net construction order.
    """

    def __init__(self, parent: SpaceDescriptor, elements: Sequence[Element],
                 space_id: Optional[str] = None):
        if not elements:
            raise PreconditionError("net space needs at least one element")
        self.parent = parent
        self.elements = list(elements)
        self.value_kind = parent.value_kind
        self.space_id = space_id or f"{parent.space_id}#net{len(self.elements)}"
        self.is_metric = parent.is_metric
        self._keys = {parent.order_key(e): i for i, e in enumerate(self.elements)}
        self.diameter = max(
            (parent.dist(a, b) for a in self.elements for b in self.elements),
            default=0.0,
        ) if len(self.elements) <= 4096 else math.inf
        anchor = parent.anchor
        if anchor is not None:
            self.anchor = min(
                self.elements,
                key=lambda y: (parent.dist(anchor, y), parent.order_key(y)),
            )
        else:
            self.anchor = self.elements[0]

    def dist(self, a, b):
        return self.parent.dist(a, b)

    def order_key(self, a):
        return self.parent.order_key(a)

    def contains(self, a):
        try:
            return self.parent.order_key(a) in self._keys
        except Exception:
            return False

    def enumeration(self):
        return list(self.elements)

    def encode(self, elements):
        return self.parent.encode(elements)

    def decode(self, arr):
        return self.parent.decode(arr)

    def pairwise(self, enc):
        return self.parent.pairwise(enc)

    def cross(self, enc_a, enc_b):
        return self.parent.cross(enc_a, enc_b)

    def element_to_json(self, a):
        return self.parent.element_to_json(a)

    def element_from_json(self, obj):
        return self.parent.element_from_json(obj)


@dataclass(frozen=True)
class LabeledSample:
    """An ordered training sample of (instance, label) pairs."""

    pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((x, y) for x, y in self.pairs))

    @property
    def n(self) -> int:
        return len(self.pairs)

    @cached_property
    def instances(self) -> list:
        return [x for x, _ in self.pairs]

    @cached_property
    def labels(self) -> list:
        return [y for _, y in self.pairs]

    def require_nonempty(self):
        if self.n < 1:
            raise PreconditionError("sample must contain at least one pair")
        return self


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def evaluate_loss(space: SpaceDescriptor, y: Element, y2: Element) -> float:
    """Loss between two elements; raises InvalidElementError for foreign elements."""
    space._check(y)
    space._check(y2)
    return space.dist(y, y2)


def validate_metric_axioms(space: SpaceDescriptor, probe_set: Sequence[Element]) -> list:
    """Exhaustively check identity, symmetry and (for metrics) the triangle
    inequality over a probe set. Returns a list of human-readable violations;
    empty means none found."""
    if not probe_set:
        raise PreconditionError("probe_set must be nonempty")
    report = []
    tol = 1e-12
    for x in probe_set:
        d = space.dist(x, x)
        if d != 0.0:
            report.append(f"identity: dist({x!r},{x!r}) = {d!r} != 0")
    for x in probe_set:
        for y in probe_set:
            d = space.dist(x, y)
            if d < 0:
                report.append(f"nonnegativity: dist({x!r},{y!r}) = {d!r} < 0")
            d2 = space.dist(y, x)
            if d != d2:
                report.append(f"symmetry: dist({x!r},{y!r}) = {d!r} != {d2!r}")
    if space.is_metric:
        for x in probe_set:
            for y in probe_set:
                for z in probe_set:
                    lhs = space.dist(x, z)
                    rhs = space.dist(x, y) + space.dist(y, z)
                    if lhs > rhs + tol:
                        report.append(
                            f"triangle: dist({x!r},{z!r}) = {lhs!r} > {rhs!r}")
    # the total order must be strict: exactly one of <, ==, > per pair
    for x in probe_set:
        for y in probe_set:
            kx, ky = space.order_key(x), space.order_key(y)
            if (kx == ky) != (space.dist(x, y) == 0.0) and space.is_metric:
                # equal order keys must denote the same element of a metric space
                if kx == ky:
                    report.append(f"order: {x!r} and {y!r} share an order key")
    return report


def enumerate_labels(space: SpaceDescriptor, b: int) -> list:
    """The first 2**b elements under the canonical injection omega."""
    if b < 0:
        raise PreconditionError("b must be nonnegative")
    enum = space.enumeration()
    if enum is None:
        raise UnsupportedOperationError(
            f"space {space.space_id!r} has no canonical enumeration")
    limit = 1 << b
    out = []
    for y in enum:
        if len(out) >= limit:
            break
        out.append(y)
    return out


def project_to_eps_net(space: SpaceDescriptor, y: Element, net: Sequence[Element]) -> Element:
    """Closest net element to y; exact ties go to the order-smaller element."""
    if not net:
        raise PreconditionError("net must be nonempty")
    best = None
    for cand in net:
        d = space.dist(y, cand)
        key = space.order_key(cand)
        if best is None or d < best[0] or (d == best[0] and key < best[1]):
            best = (d, key, cand)
    return best[2]


def diameter_truncate(space: SpaceDescriptor, y: Element, L: float) -> Element:
    """Project y onto the closed L-ball about the space anchor.

    Uses the closed ball (rather than the open one) so the minimizer is
    always attained.
    """
    if L <= 0:
        raise PreconditionError("L must be positive")
    if space.anchor is None:
        raise PreconditionError(f"space {space.space_id!r} has no anchor")
    y0 = space.anchor
    if space.dist(y0, y) <= L:
        return y
    exact = space.ball_project(y, y0, L)
    if exact is not None:
        return exact
    ball = space.ball_elements(y0, L)
    if ball is None:
        raise UnsupportedOperationError(
            f"space {space.space_id!r} supports neither exact ball projection "
            "nor ball enumeration; discretize through an eps-net first")
    if not ball:
        raise PreconditionError(f"closed {L}-ball about the anchor is empty")
    return project_to_eps_net(space, y, ball)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _fourpoint() -> FiniteSpace:
    loss = np.array([
        [0.0, 1.0, 1.0, 0.5],
        [1.0, 0.0, 1.0, 0.5],
        [1.0, 1.0, 0.0, 0.5],
        [0.5, 0.5, 0.5, 0.0],
    ])
    return FiniteSpace("fourpoint", ["a", "b", "c", "o"], loss)


def _singleton() -> FiniteSpace:
    return FiniteSpace("singleton", ["x"], np.zeros((1, 1)))


_BUILTINS: dict = {
    "real": lambda: RealLine(),
    "integers": lambda: IntegerSpace(),
    "fourpoint": _fourpoint,
    "singleton": _singleton,
}

_CUSTOM: dict = {}


def register_space(space: SpaceDescriptor) -> SpaceDescriptor:
    _CUSTOM[space.space_id] = space
    return space


def discrete_space(names: Sequence[str], space_id: Optional[str] = None) -> FiniteSpace:
    """Discrete (0/1) metric over a finite alphabet."""
    k = len(names)
    loss = np.ones((k, k)) - np.eye(k)
    return FiniteSpace(space_id or "discrete:" + ",".join(names), names, loss)


def finite_space_from_csv(path: str, space_id: Optional[str] = None,
                          is_metric: bool = True) -> FiniteSpace:
    """Load a finite space from a square CSV loss matrix.

    Expected layout: header row of element names, one leading name column.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise PreconditionError(f"{path}: expected a header row plus data rows")
    names = [c.strip() for c in rows[0][1:]]
    k = len(names)
    if len(rows) - 1 != k:
        raise PreconditionError(
            f"{path}: {len(rows) - 1} data rows for {k} header names")
    loss = np.zeros((k, k))
    for i, row in enumerate(rows[1:]):
        if len(row) != k + 1:
            raise PreconditionError(f"{path}: row {i + 2} has {len(row)} cells, expected {k + 1}")
        if row[0].strip() != names[i]:
            raise PreconditionError(f"{path}: row {i + 2} name {row[0]!r} != header {names[i]!r}")
        loss[i] = [float(c) for c in row[1:]]
    sid = space_id or f"csv:{path}"
    return FiniteSpace(sid, names, loss, is_metric=is_metric)


def get_space(space_id: str) -> SpaceDescriptor:
    """Resolve a space by id.

    Recognized forms: built-in ids, registered custom ids,
    ``r{d}_l{1|2}`` for R^d, and ``discrete:a,b,c`` alphabets.
    """
    if space_id in _CUSTOM:
        return _CUSTOM[space_id]
    if space_id in _BUILTINS:
        return _BUILTINS[space_id]()
    if space_id.startswith("discrete:"):
        names = [s for s in space_id[len("discrete:"):].split(",") if s]
        if not names:
            raise PreconditionError(f"no element names in {space_id!r}")
        return discrete_space(names, space_id)
    if space_id.startswith("r") and "_l" in space_id:
        stem, _, p = space_id[1:].partition("_l")
        if stem.isdigit() and p in ("1", "2"):
            return RealVector(int(stem), int(p), space_id)
    raise PreconditionError(f"unknown space id {space_id!r}")
