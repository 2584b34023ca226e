"""Conic subsets of base space x (R^n minus 0) and their calculus.

Two representations share one interface:

* :class:`ExactSet` wraps a membership predicate together with a *fiber*
  callable (representative unit directions over a base point) and a
  :class:`BaseSet` describing the projection onto base space.
* :class:`SampledSet` is a finite list of ``(point, unit direction, score)``.

Mixed operations go through ``member`` / ``fiber`` / ``base_points`` so that
predicates and estimator output can be compared directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .core import angle_between, unit


# ------------------------------------------------------------- tolerances

@dataclass(frozen=True)
class Tolerance:
    """Position tolerance (length) and angle tolerance (radians)."""

    position: float = 1e-9
    angle: float = 1e-6

    @classmethod
    def for_grid(cls, grid, directions=None) -> "Tolerance":
        """Two grid cells and 1.5 cone caps."""
        cap = directions.cap_half_angle if directions is not None else math.pi / 32
        if grid.dim == 1:
            cap = math.radians(1.0)
        return cls(2.0 * grid.h, 1.5 * cap)

    def shrunk(self, factor: float) -> "Tolerance":
        return Tolerance(self.position * factor, self.angle * factor)


EXACT_TOL = Tolerance()


def _pt(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


# --------------------------------------------------------------- base sets

class BaseSet:
    """Subset of base space used for supports and WF projections."""

    dim: int

    def contains(self, x, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def sample(self, box, step: float) -> np.ndarray:
        """Points of the set inside ``box = (lo, hi)`` at roughly ``step`` spacing."""
        raise NotImplementedError

    def is_empty(self) -> bool:
        return False


def _box_arrays(box, dim):
    lo, hi = box
    return (np.broadcast_to(np.asarray(lo, dtype=float), (dim,)),
            np.broadcast_to(np.asarray(hi, dtype=float), (dim,)))


def _in_box(pts, box, dim, slack=1e-12):
    lo, hi = _box_arrays(box, dim)
    return np.all((pts >= lo - slack) & (pts <= hi + slack), axis=1)


@dataclass(frozen=True)
class Everywhere(BaseSet):
    dim: int

    def contains(self, x, tol=1e-9):
        return True

    def sample(self, box, step):
        lo, hi = _box_arrays(box, self.dim)
        axes = [np.arange(l, h + 0.5 * step, step) for l, h in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class Nowhere(BaseSet):
    dim: int

    def contains(self, x, tol=1e-9):
        return False

    def sample(self, box, step):
        return np.zeros((0, self.dim))

    def is_empty(self):
        return True


@dataclass(frozen=True)
class Points(BaseSet):
    points: Tuple[Tuple[float, ...], ...]

    @property
    def dim(self):
        return len(self.points[0])

    @classmethod
    def of(cls, *pts) -> "Points":
        return cls(tuple(tuple(float(v) for v in _pt(p)) for p in pts))

    def contains(self, x, tol=1e-9):
        x = _pt(x)
        return any(np.linalg.norm(x - np.asarray(p)) <= tol for p in self.points)

    def sample(self, box, step):
        pts = np.asarray(self.points, dtype=float)
        return pts[_in_box(pts, box, self.dim)]


@dataclass(frozen=True)
class Line(BaseSet):
    """Affine line ``anchor + t * direction``."""

    anchor: Tuple[float, ...]
    direction: Tuple[float, ...]

    @property
    def dim(self):
        return len(self.anchor)

    def _ud(self):
        return unit(np.asarray(self.direction, dtype=float))

    def distance(self, x):
        d = _pt(x) - np.asarray(self.anchor)
        u = self._ud()
        return float(np.linalg.norm(d - np.dot(d, u) * u))

    def contains(self, x, tol=1e-9):
        return self.distance(x) <= tol

    def sample(self, box, step):
        lo, hi = _box_arrays(box, self.dim)
        span = float(np.linalg.norm(hi - lo)) + float(np.linalg.norm(np.asarray(self.anchor)))
        m = int(math.ceil(span / step))
        t = step * np.arange(-m, m + 1)
        pts = np.asarray(self.anchor)[None, :] + t[:, None] * self._ud()[None, :]
        return pts[_in_box(pts, box, self.dim)]


@dataclass(frozen=True)
class Circle(BaseSet):
    center: Tuple[float, float]
    radius: float

    dim = 2

    def contains(self, x, tol=1e-9):
        return abs(np.linalg.norm(_pt(x) - np.asarray(self.center)) - self.radius) <= tol

    def sample(self, box, step):
        m = max(8, int(math.ceil(2 * math.pi * self.radius / step)))
        a = 2 * math.pi * np.arange(m) / m
        pts = np.asarray(self.center)[None, :] + self.radius * np.stack([np.cos(a), np.sin(a)], 1)
        return pts[_in_box(pts, box, 2)]


@dataclass(frozen=True)
class Custom(BaseSet):
    """Base set given by a distance-like test and a sampler."""

    dim: int
    test: Callable[[np.ndarray, float], bool]
    sampler: Callable[[object, float], np.ndarray]

    def contains(self, x, tol=1e-9):
        return bool(self.test(_pt(x), tol))

    def sample(self, box, step):
        pts = np.asarray(self.sampler(box, step), dtype=float).reshape(-1, self.dim)
        return pts[_in_box(pts, box, self.dim)]


@dataclass(frozen=True)
class Union(BaseSet):
    parts: Tuple[BaseSet, ...]

    @property
    def dim(self):
        return self.parts[0].dim

    def contains(self, x, tol=1e-9):
        return any(p.contains(x, tol) for p in self.parts)

    def sample(self, box, step):
        chunks = [p.sample(box, step) for p in self.parts]
        chunks = [c for c in chunks if len(c)]
        if not chunks:
            return np.zeros((0, self.dim))
        return _dedupe_points(np.concatenate(chunks, axis=0))

    def is_empty(self):
        return all(p.is_empty() for p in self.parts)


@dataclass(frozen=True)
class Intersection(BaseSet):
    a: BaseSet
    b: BaseSet
    tol: float = 1e-9

    @property
    def dim(self):
        return self.a.dim

    def contains(self, x, tol=1e-9):
        return self.a.contains(x, tol) and self.b.contains(x, tol)

    def sample(self, box, step):
        if isinstance(self.a, Line) and isinstance(self.b, Line) and self.a.dim == 2:
            p = _line_meet(self.a, self.b)
            if p is None:
                return np.zeros((0, 2))
            pts = p[None, :]
            return pts[_in_box(pts, box, 2)]
        for first, second in ((self.a, self.b), (self.b, self.a)):
            if isinstance(first, (Points, Line, Circle)) or isinstance(second, Everywhere):
                pts = first.sample(box, step)
                keep = [second.contains(p, max(self.tol, 0.5 * step)) for p in pts]
                return pts[np.asarray(keep, dtype=bool)] if len(pts) else pts
        pts = self.a.sample(box, step)
        keep = [self.b.contains(p, max(self.tol, 0.5 * step)) for p in pts]
        return pts[np.asarray(keep, dtype=bool)] if len(pts) else pts

    def is_empty(self):
        return self.a.is_empty() or self.b.is_empty()


@dataclass(frozen=True)
class Product(BaseSet):
    """Cartesian product ``a x b`` (dimensions add)."""

    a: BaseSet
    b: BaseSet

    @property
    def dim(self):
        return self.a.dim + self.b.dim

    def contains(self, x, tol=1e-9):
        x = _pt(x)
        return self.a.contains(x[: self.a.dim], tol) and self.b.contains(x[self.a.dim:], tol)

    def sample(self, box, step):
        lo, hi = _box_arrays(box, self.dim)
        da = self.a.dim
        pa = self.a.sample((lo[:da], hi[:da]), step)
        pb = self.b.sample((lo[da:], hi[da:]), step)
        if not len(pa) or not len(pb):
            return np.zeros((0, self.dim))
        ia, ib = np.meshgrid(np.arange(len(pa)), np.arange(len(pb)), indexing="ij")
        return np.concatenate([pa[ia.ravel()], pb[ib.ravel()]], axis=1)

    def is_empty(self):
        return self.a.is_empty() or self.b.is_empty()


def _line_meet(a: Line, b: Line):
    p, u = np.asarray(a.anchor), a._ud()
    q, v = np.asarray(b.anchor), b._ud()
    m = np.array([[u[0], -v[0]], [u[1], -v[1]]])
    if abs(np.linalg.det(m)) < 1e-14:
        return p if b.contains(p) else None
    t = np.linalg.solve(m, q - p)
    return p + t[0] * u


def _dedupe_points(pts, tol=1e-12):
    if len(pts) == 0:
        return pts
    keys = np.round(pts / max(tol, 1e-12)).astype(np.int64) if tol > 0 else pts
    _, idx = np.unique(keys, axis=0, return_index=True)
    return pts[np.sort(idx)]


# ----------------------------------------------------------------- verdict

@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ok == (self.witness is not None):
            raise ValueError("a failing verdict needs a witness and a passing one none")


class ProductUndefined(ValueError):
    """Raised when a product bound is requested for a violating pair."""

    def __init__(self, verdict: Verdict):
        super().__init__(f"product condition violated at {verdict.witness}")
        self.verdict = verdict


# ------------------------------------------------------------- conic sets

DEFAULT_BOX = 2.0
DEFAULT_STEP = 1.0 / 16


class ConicSet:
    dim: int
    tag: str
    box: float = DEFAULT_BOX

    @property
    def form(self) -> str:
        raise NotImplementedError

    def member(self, x, k, tol: Tolerance = EXACT_TOL) -> bool:
        k = _pt(k)
        if not np.any(k):
            raise ValueError("zero covector is never a member")
        return self._member(_pt(x), unit(k), tol)

    def fiber(self, x, tol: Tolerance = EXACT_TOL) -> np.ndarray:
        """Representative unit directions over ``x`` (shape ``(m, dim)``)."""
        raise NotImplementedError

    def base_points(self, box=None, step: float = DEFAULT_STEP) -> np.ndarray:
        raise NotImplementedError

    def is_empty(self) -> bool:
        raise NotImplementedError

    def default_box(self):
        b = self.box
        return (-b * np.ones(self.dim), b * np.ones(self.dim))

    def to_samples(self, box=None, step: float = DEFAULT_STEP,
                   tol: Tolerance = EXACT_TOL) -> "SampledSet":
        if isinstance(self, SampledSet):
            return self
        pts, dirs = [], []
        for x in self.base_points(box, step):
            for d in self.fiber(x, tol):
                pts.append(x)
                dirs.append(d)
        return SampledSet.from_lists(self.dim, pts, dirs, tag=self.tag)


class ExactSet(ConicSet):
    """Predicate-backed conic set."""

    def __init__(self, dim: int, predicate, fiber, base: BaseSet, tag: str = "",
                 box: float = DEFAULT_BOX, zero_hits=()):
        self.dim = dim
        self._pred = predicate
        self._fiber = fiber
        self.base = base
        self.tag = tag
        self.box = box
        self.zero_hits = tuple(zero_hits)

    form = "exact"

    def _member(self, x, k, tol):
        if not self.base.contains(x, tol.position):
            return False
        return bool(self._pred(x, k, tol))

    def fiber(self, x, tol=EXACT_TOL):
        x = _pt(x)
        if not self.base.contains(x, tol.position):
            return np.zeros((0, self.dim))
        f = np.asarray(self._fiber(x, tol), dtype=float).reshape(-1, self.dim)
        return f

    def base_points(self, box=None, step=DEFAULT_STEP):
        return self.base.sample(box if box is not None else self.default_box(), step)

    def is_empty(self):
        return self.base.is_empty()

    def __repr__(self):
        return f"ExactSet(dim={self.dim}, tag={self.tag!r})"


class SampledSet(ConicSet):
    """Finite list of (point, unit direction, score) rows."""

    form = "sampled"

    def __init__(self, dim, points, directions, scores=None, tag="", extra=None,
                 zero_hits=()):
        pts = np.asarray(points, dtype=float).reshape(-1, dim)
        dirs = np.asarray(directions, dtype=float).reshape(-1, dim)
        if len(pts) != len(dirs):
            raise ValueError("points and directions differ in length")
        if len(dirs):
            norms = np.linalg.norm(dirs, axis=1)
            if np.any(norms == 0):
                raise ValueError("sampled conic sets never hold a zero direction")
            dirs = dirs / norms[:, None]
        self.dim = dim
        self.points = pts
        self.directions = dirs
        self.scores = (np.ones(len(pts)) if scores is None
                       else np.clip(np.asarray(scores, dtype=float).reshape(-1), 0.0, 1.0))
        self.tag = tag
        self.extra = dict(extra or {})
        self.zero_hits = tuple(zero_hits)

    @classmethod
    def from_lists(cls, dim, points, directions, scores=None, tag="", extra=None):
        if not len(points):
            return cls(dim, np.zeros((0, dim)), np.zeros((0, dim)), tag=tag)
        return cls(dim, np.asarray(points), np.asarray(directions), scores, tag, extra)

    @classmethod
    def empty(cls, dim, tag="empty"):
        return cls(dim, np.zeros((0, dim)), np.zeros((0, dim)), tag=tag)

    def __len__(self):
        return len(self.points)

    def _member(self, x, k, tol):
        if not len(self.points):
            return False
        near = np.linalg.norm(self.points - x[None, :], axis=1) <= tol.position
        if not near.any():
            return False
        ang = angle_between(self.directions[near], k[None, :])
        return bool(np.any(ang <= tol.angle))

    def fiber(self, x, tol=EXACT_TOL):
        x = _pt(x)
        if not len(self.points):
            return np.zeros((0, self.dim))
        near = np.linalg.norm(self.points - x[None, :], axis=1) <= tol.position
        return self.directions[near]

    def base_points(self, box=None, step=DEFAULT_STEP):
        pts = _dedupe_points(self.points)
        if box is not None:
            pts = pts[_in_box(pts, box, self.dim)]
        return pts

    def is_empty(self):
        return len(self.points) == 0

    @property
    def base(self) -> BaseSet:
        if self.is_empty():
            return Nowhere(self.dim)
        return Points(tuple(tuple(p) for p in self.base_points()))

    def __repr__(self):
        return f"SampledSet(dim={self.dim}, n={len(self)}, tag={self.tag!r})"


def empty_set(dim: int) -> SampledSet:
    return SampledSet.empty(dim)


# ----------------------------------------------------------- helpers

def sphere_directions(dim: int, count: int = 64) -> np.ndarray:
    """Unit directions covering the sphere (1D: both signs)."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        a = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(a), np.sin(a)], 1)
    rng = np.random.default_rng(12345)
    v = rng.normal(size=(count * dim, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def all_directions(dim: int, count: int = 64):
    """Fiber callable for the full cone R^n minus 0."""
    dirs = sphere_directions(dim, count)
    return lambda x, tol: dirs


def axis_pm(dim: int, axis: int):
    e = np.zeros(dim)
    e[axis] = 1.0
    return np.stack([e, -e])


def _sector_angle(k, a, b):
    """Angle from ``k`` to the open cone {alpha a + beta b : alpha, beta > 0}."""
    g = np.array([[a @ a, a @ b], [a @ b, b @ b]])
    det = np.linalg.det(g)
    if abs(det) < 1e-14:
        return float(min(angle_between(k, a), angle_between(k, b)))
    st = np.linalg.solve(g, np.array([a @ k, b @ k]))
    kp = st[0] * a + st[1] * b
    if st[0] >= 0 and st[1] >= 0 and np.linalg.norm(kp) > 0:
        return float(angle_between(k, kp))
    return float(min(angle_between(k, a), angle_between(k, b)))


def _pair_sums(a_dirs, b_dirs, tol: Tolerance):
    """Unit representatives of sums plus a flag for zero-section contact."""
    out = []
    zero = False
    for a in a_dirs:
        for b in b_dirs:
            if angle_between(a, -b) <= tol.angle + 1e-12:
                zero = True
                out.extend([a, -a])
                continue
            for t in (0.25, 0.5, 0.75):
                s = (1 - t) * a + t * b
                if np.linalg.norm(s) > 1e-12:
                    out.append(unit(s))
    if not out:
        return np.zeros((0, len(a_dirs[0]) if len(a_dirs) else 0)), zero
    return _dedupe_dirs(np.asarray(out)), zero


def _dedupe_dirs(d, tol=1e-9):
    if len(d) == 0:
        return d
    keep = []
    for v in d:
        if not any(np.linalg.norm(v - w) <= tol for w in keep):
            keep.append(v)
    return np.asarray(keep)


def _candidate_points(a: ConicSet, b: ConicSet, box, step, tol: Tolerance):
    """Base points of ``a`` lying over the base of ``b`` (and vice versa)."""
    box = box if box is not None else a.default_box()
    pts = []
    for first, second in ((a, b), (b, a)):
        for x in first.base_points(box, step):
            if isinstance(second, SampledSet):
                if len(second.points) and np.min(np.linalg.norm(second.points - x, axis=1)) <= tol.position:
                    pts.append(x)
            elif second.base.contains(x, max(tol.position, 1e-9)):
                pts.append(x)
    if not pts:
        return np.zeros((0, a.dim))
    return _dedupe_points(np.asarray(pts), 1e-9)


# -------------------------------------------------------------- operations

def _check_dims(a: ConicSet, b: ConicSet):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def member(s: ConicSet, x, k, tol: Tolerance = EXACT_TOL) -> bool:
    return s.member(x, k, tol)


def union(a: ConicSet, b: ConicSet, dedupe_tol: float = 1e-9) -> ConicSet:
    """Membership-level union; sampled inputs are concatenated and deduplicated."""
    _check_dims(a, b)
    if isinstance(a, SampledSet) and isinstance(b, SampledSet):
        pts = np.concatenate([a.points, b.points])
        dirs = np.concatenate([a.directions, b.directions])
        scores = np.concatenate([a.scores, b.scores])
        keep = []
        for i in range(len(pts)):
            dup = False
            for j in keep:
                if (np.linalg.norm(pts[i] - pts[j]) <= dedupe_tol
                        and np.linalg.norm(dirs[i] - dirs[j]) <= dedupe_tol):
                    scores[j] = max(scores[j], scores[i])
                    dup = True
                    break
            if not dup:
                keep.append(i)
        return SampledSet(a.dim, pts[keep], dirs[keep], scores[keep],
                          tag=f"{a.tag} | {b.tag}")

    def pred(x, k, tol):
        return a.member(x, k, tol) or b.member(x, k, tol)

    def fib(x, tol):
        parts = [f for f in (a.fiber(x, tol), b.fiber(x, tol)) if len(f)]
        return _dedupe_dirs(np.concatenate(parts)) if parts else np.zeros((0, a.dim))

    return ExactSet(a.dim, pred, fib, Union((a.base, b.base)), tag=f"({a.tag}) U ({b.tag})",
                    box=max(a.box, b.box))


def oplus(a: ConicSet, b: ConicSet, box=None, step: float = DEFAULT_STEP,
          tol: Tolerance = EXACT_TOL) -> ExactSet:
    """Fiberwise sums ``{(x, k+q)}``; zero sums are listed in ``zero_hits``."""
    _check_dims(a, b)
    dim = a.dim
    base = Intersection(a.base, b.base)

    def pred(x, k, t):
        for da in a.fiber(x, t):
            for db in b.fiber(x, t):
                if angle_between(da, -db) <= t.angle + 1e-12:
                    if min(angle_between(k, da), angle_between(k, -da)) <= t.angle:
                        return True
                elif _sector_angle(k, da, db) <= t.angle:
                    return True
        return False

    def fib(x, t):
        return _pair_sums(a.fiber(x, t), b.fiber(x, t), t)[0]

    hits = []
    for x in _candidate_points(a, b, box, step, tol):
        fa, fb = a.fiber(x, tol), b.fiber(x, tol)
        if len(fa) and len(fb) and _pair_sums(fa, fb, tol)[1]:
            hits.append(tuple(float(v) for v in x))
    return ExactSet(dim, pred, fib, base, tag=f"({a.tag}) (+) ({b.tag})",
                    box=max(a.box, b.box), zero_hits=hits)


def hormander_check(wf_u: ConicSet, wf_v: ConicSet, box=None, step: float = DEFAULT_STEP,
                    tol: Tolerance = EXACT_TOL) -> Verdict:
    """Search for ``(x, k)`` in ``wf_u`` with ``(x, -k)`` in ``wf_v``."""
    _check_dims(wf_u, wf_v)
    checked = 0
    for x in _candidate_points(wf_u, wf_v, box, step, tol):
        for first, second, sign in ((wf_u, wf_v, 1.0), (wf_v, wf_u, -1.0)):
            for k in first.fiber(x, tol):
                checked += 1
                if second.member(x, -k, tol):
                    kk = k if sign > 0 else -k
                    return Verdict(False, (tuple(map(float, x)), tuple(map(float, kk))),
                                   {"checked": checked})
    return Verdict(True, None, {"checked": checked})


def product_wf_bound(wf_u: ConicSet, supp_u: BaseSet, wf_v: ConicSet, supp_v: BaseSet,
                     box=None, step: float = DEFAULT_STEP,
                     tol: Tolerance = EXACT_TOL) -> ExactSet:
    """``S_plus | S_u | S_v`` for a pair satisfying the product condition.

    ``S_u`` is the part of ``wf_u`` over ``supp_v``; ``S_plus`` are fiber sums.
    """
    verdict = hormander_check(wf_u, wf_v, box, step, tol)
    if not verdict.ok:
        raise ProductUndefined(verdict)
    splus = oplus(wf_u, wf_v, box, step, tol)
    dim = wf_u.dim

    def pred(x, k, t):
        if supp_v.contains(x, t.position) and wf_u.member(x, k, t):
            return True
        if supp_u.contains(x, t.position) and wf_v.member(x, k, t):
            return True
        return splus.member(x, k, t)

    def fib(x, t):
        parts = []
        if supp_v.contains(x, t.position):
            parts.append(wf_u.fiber(x, t))
        if supp_u.contains(x, t.position):
            parts.append(wf_v.fiber(x, t))
        parts.append(splus.fiber(x, t))
        parts = [p for p in parts if len(p)]
        return _dedupe_dirs(np.concatenate(parts)) if parts else np.zeros((0, dim))

    base = Union((Intersection(wf_u.base, supp_v), Intersection(wf_v.base, supp_u),
                  splus.base))
    return ExactSet(dim, pred, fib, base, tag=f"bound[{wf_u.tag} * {wf_v.tag}]",
                    box=max(wf_u.box, wf_v.box))


def pullback_wf(f: Callable, jacobian: Callable, wf_u: ConicSet, base_points,
                tol: Tolerance = EXACT_TOL, zero_tol: float = 1e-12):
    """Pull ``wf_u`` back along ``f``.

    Returns ``(pulled, samples, verdict)``: an exact set with predicate
    ``(x, k o df_x)``, its sampled version over ``base_points``, and the
    verdict of the N_f check evaluated on ``base_points``.
    """
    base_points = np.atleast_2d(np.asarray(base_points, dtype=float))
    src_dim = base_points.shape[1]

    def covectors(x, t):
        y = _pt(f(x))
        jac = np.atleast_2d(np.asarray(jacobian(x), dtype=float))
        out, hits = [], []
        for k in wf_u.fiber(y, t):
            c = k @ jac
            if np.linalg.norm(c) <= zero_tol * max(1.0, np.linalg.norm(k)):
                hits.append(k)
            else:
                out.append(unit(c))
        return out, hits

    def pred(x, q, t):
        cs, _ = covectors(x, t)
        return any(angle_between(q, c) <= t.angle for c in cs)

    def fib(x, t):
        cs, _ = covectors(x, t)
        return np.asarray(cs).reshape(-1, src_dim)

    def on_base(x, t):
        y = _pt(f(x))
        return wf_u.base.contains(y, t) if isinstance(wf_u, ExactSet) else len(wf_u.fiber(y, Tolerance(t, 0))) > 0

    base = Custom(src_dim, on_base, lambda box, step: base_points)
    pulled = ExactSet(src_dim, pred, fib, base, tag=f"pullback[{wf_u.tag}]",
                      box=wf_u.box)

    pts, dirs, witness = [], [], None
    for x in base_points:
        if not on_base(x, tol.position):
            continue
        cs, hits = covectors(x, tol)
        if hits and witness is None:
            witness = (tuple(map(float, _pt(f(x)))), tuple(map(float, hits[0])))
            witness_src = tuple(map(float, x))
        for c in cs:
            pts.append(x)
            dirs.append(c)
    samples = SampledSet.from_lists(src_dim, pts, dirs, tag=pulled.tag)
    if witness is None:
        verdict = Verdict(True, None, {"base_points": len(base_points)})
    else:
        verdict = Verdict(False, witness, {"source_point": witness_src})
    return pulled, samples, verdict


def tensor_wf(wf_u: ConicSet, supp_u: BaseSet, wf_v: ConicSet, supp_v: BaseSet,
              arc_samples: int = 5) -> ExactSet:
    """Wavefront bound for ``u (x) v`` on the product space."""
    du, dv = wf_u.dim, wf_v.dim
    dim = du + dv

    def split(z):
        z = _pt(z)
        return z[:du], z[du:]

    def pred(z, w, t):
        x, y = split(z)
        k, q = split(w)
        nk, nq = np.linalg.norm(k), np.linalg.norm(q)
        small = math.sin(t.angle) + 1e-12
        k_zero, q_zero = nk <= small, nq <= small
        if not k_zero and not q_zero:
            if wf_u.member(x, k, t) and wf_v.member(y, q, t):
                return True
        if k_zero and supp_u.contains(x, t.position) and nq > 0 and wf_v.member(y, q, t):
            return True
        if q_zero and supp_v.contains(y, t.position) and nk > 0 and wf_u.member(x, k, t):
            return True
        return False

    def fib(z, t):
        x, y = split(z)
        fu, fv = wf_u.fiber(x, t), wf_v.fiber(y, t)
        out = []
        for a in fu:
            for b in fv:
                for th in np.linspace(0, np.pi / 2, arc_samples + 2)[1:-1]:
                    out.append(np.concatenate([np.cos(th) * a, np.sin(th) * b]))
        if supp_u.contains(x, t.position):
            out.extend(np.concatenate([np.zeros(du), b]) for b in fv)
        if supp_v.contains(y, t.position):
            out.extend(np.concatenate([a, np.zeros(dv)]) for a in fu)
        return np.asarray(out).reshape(-1, dim)

    base = Union((Product(wf_u.base, wf_v.base), Product(supp_u, wf_v.base),
                  Product(wf_u.base, supp_v)))
    return ExactSet(dim, pred, fib, base, tag=f"{wf_u.tag} (x) {wf_v.tag}",
                    box=max(wf_u.box, wf_v.box))


def kernel_wf_from_difference(wf_v: ConicSet) -> ExactSet:
    """``{(x, y; k, -k) : (x - y; k) in wf_v}`` for kernels ``u(x, y) = v(x - y)``."""
    d = wf_v.dim
    dim = 2 * d

    def split(z):
        z = _pt(z)
        return z[:d], z[d:]

    def pred(z, w, t):
        x, y = split(z)
        k, q = split(w)
        p = 0.5 * (k - q)
        if np.linalg.norm(p) == 0:
            return False
        if angle_between(w, np.concatenate([p, -p])) > t.angle:
            return False
        return wf_v.member(x - y, p, t)

    def fib(z, t):
        x, y = split(z)
        f = wf_v.fiber(x - y, t)
        return np.asarray([unit(np.concatenate([k, -k])) for k in f]).reshape(-1, dim)

    def on_base(z, tol):
        x, y = split(z)
        return wf_v.base.contains(x - y, tol) if isinstance(wf_v, ExactSet) else len(
            wf_v.fiber(x - y, Tolerance(tol, 0))) > 0

    def sampler(box, step):
        lo, hi = _box_arrays(box, dim)
        diffs = wf_v.base_points((lo[:d] - hi[d:], hi[:d] - lo[d:]), step)
        ys = Everywhere(d).sample((lo[d:], hi[d:]), step)
        if not len(diffs) or not len(ys):
            return np.zeros((0, dim))
        out = [np.concatenate([y + s, y]) for s in diffs for y in ys]
        return np.asarray(out)

    base = Nowhere(dim) if wf_v.is_empty() else Custom(dim, on_base, sampler)
    return ExactSet(dim, pred, fib, base, tag=f"kernel[{wf_v.tag}]", box=wf_v.box)
