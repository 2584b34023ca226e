"""Planar domain boundaries, conormal predicates and line-intersection counts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence

import numpy as np

from . import kernels
from .conic import Custom, ExactSet, SampledSet, Tolerance
from .core import Grid, SampledField, angle_between, unit, uniform_directions
from .errors import MalformedInput, ParameterError

DENSE = 4096


# ------------------------------------------------------------- boundaries

class Boundary2D:
    """Closed boundary of a planar domain."""

    def dense(self, m: int = DENSE):
        """Points and tangents along the boundary (``(m, 2)`` each)."""
        raise NotImplementedError

    def polyline(self, m: int = DENSE) -> np.ndarray:
        return self.dense(m)[0]

    def bbox(self):
        p = self.polyline()
        return p.min(axis=0), p.max(axis=0)


@dataclass(frozen=True)
class Polygon(Boundary2D):
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs at least 3 vertices in the plane")
        if np.allclose(v[0], v[-1]):
            v = v[:-1]
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        if _signed_area(v) == 0:
            raise ValueError("degenerate polygon")
        if not _is_simple(v):
            raise ValueError("polygon edges intersect")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def edges(self):
        v = self.vertices
        return v, np.roll(v, -1, axis=0)

    def dense(self, m: int = DENSE):
        a, b = self.edges()
        lengths = np.linalg.norm(b - a, axis=1)
        per = np.maximum(1, np.round(m * lengths / lengths.sum()).astype(int))
        pts, tans = [], []
        for p, q, k in zip(a, b, per):
            s = np.arange(k)[:, None] / k
            pts.append(p + s * (q - p))
            tans.append(np.repeat((q - p)[None, :], k, axis=0))
        return np.concatenate(pts), np.concatenate(tans)

    def polyline(self, m: int = DENSE) -> np.ndarray:
        return np.asarray(self.vertices)

    def nearest(self, x):
        """Nearest boundary point, its unit normal, and whether it is a vertex."""
        a, b = self.edges()
        d = b - a
        t = np.clip(np.sum((x - a) * d, axis=1) / np.sum(d * d, axis=1), 0.0, 1.0)
        p = a + t[:, None] * d
        dist = np.linalg.norm(p - x, axis=1)
        i = int(np.argmin(dist))
        vertex = t[i] <= 1e-12 or t[i] >= 1 - 1e-12
        nrm = unit(np.array([d[i, 1], -d[i, 0]]))
        return p[i], nrm, float(dist[i]), vertex


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    return o1 * o2 < 0 and o3 * o4 < 0


def _is_simple(v):
    n = len(v)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                return False
    return True


@dataclass(frozen=True)
class ParametricCurve(Boundary2D):
    """Closed regular curve ``t in [0, 1) -> gamma(t)`` with derivative ``dgamma``."""

    gamma: Callable
    dgamma: Callable
    name: str = "curve"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.arange(DENSE) / DENSE
        sp = np.linalg.norm(self.dgamma(t), axis=1)
        if not np.all(sp > 0):
            raise ValueError("curve is not regular (vanishing derivative)")
        if not np.allclose(self.gamma(np.array([0.0])), self.gamma(np.array([1.0])), atol=1e-9):
            raise ValueError("curve is not closed")

    def dense(self, m: int = DENSE):
        t = np.arange(m) / m
        return self.gamma(t), self.dgamma(t)

    def _d2(self, t, h=1e-6):
        return (self.dgamma(t + h) - self.dgamma(t - h)) / (2 * h)

    def nearest(self, x):
        t = np.arange(DENSE) / DENSE
        p = self.gamma(t)
        i = int(np.argmin(np.sum((p - x) ** 2, axis=1)))
        tc = np.array([t[i]])
        for _ in range(8):
            g = self.gamma(tc)[0]
            d1 = self.dgamma(tc)[0]
            d2 = self._d2(tc)[0]
            f = np.dot(g - x, d1)
            fp = np.dot(d1, d1) + np.dot(g - x, d2)
            if fp <= 0:
                break
            step = f / fp
            step = float(np.clip(step, -1.0 / DENSE, 1.0 / DENSE))
            tc = tc - step
            if abs(step) < 1e-15:
                break
        g = self.gamma(tc)[0]
        d1 = self.dgamma(tc)[0]
        nrm = unit(np.array([d1[1], -d1[0]]))
        return g, nrm, float(np.linalg.norm(g - x)), False

    def critical_points(self, nu, m: int = DENSE):
        """Parameters and offsets where ``nu . gamma'`` vanishes (support lines)."""
        t = np.arange(m) / m
        gp = self.dgamma(t) @ nu
        s = np.where(gp >= 0, 1, -1)
        idx = np.flatnonzero(s != np.roll(s, -1))
        out_t = []
        for i in idx:
            t0, t1 = t[i], t[i] + 1.0 / m
            g0, g1 = gp[i], gp[(i + 1) % m]
            tc = t0 + (t1 - t0) * g0 / (g0 - g1) if g0 != g1 else t0
            for _ in range(6):
                f = float(self.dgamma(np.array([tc]))[0] @ nu)
                fp = float(self._d2(np.array([tc]))[0] @ nu)
                if fp == 0:
                    break
                step = float(np.clip(f / fp, -1.0 / m, 1.0 / m))
                tc -= step
                if abs(step) < 1e-15:
                    break
            out_t.append(tc % 1.0)
        out_t = np.sort(np.asarray(out_t))
        if len(out_t) == 0:
            return out_t, out_t
        return out_t, self.gamma(out_t) @ nu


def circle(r: float = 1.0, cx: float = 0.0, cy: float = 0.0) -> ParametricCurve:
    w = 2 * math.pi

    def g(t):
        t = np.asarray(t, dtype=float)
        return np.stack([cx + r * np.cos(w * t), cy + r * np.sin(w * t)], axis=-1)

    def dg(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-r * w * np.sin(w * t), r * w * np.cos(w * t)], axis=-1)

    return ParametricCurve(g, dg, "circle", {"r": r, "cx": cx, "cy": cy})


def ellipse(a: float = 1.0, b: float = 0.5, cx: float = 0.0, cy: float = 0.0,
            angle: float = 0.0) -> ParametricCurve:
    w = 2 * math.pi
    ca, sa = math.cos(angle), math.sin(angle)

    def g(t):
        t = np.asarray(t, dtype=float)
        u, v = a * np.cos(w * t), b * np.sin(w * t)
        return np.stack([cx + ca * u - sa * v, cy + sa * u + ca * v], axis=-1)

    def dg(t):
        t = np.asarray(t, dtype=float)
        u, v = -a * w * np.sin(w * t), b * w * np.cos(w * t)
        return np.stack([ca * u - sa * v, sa * u + ca * v], axis=-1)

    return ParametricCurve(g, dg, "ellipse", {"a": a, "b": b, "cx": cx, "cy": cy, "angle": angle})


def star(r0: float = 0.8, amp: float = 0.2, lobes: int = 5, cx: float = 0.0,
         cy: float = 0.0) -> ParametricCurve:
    """Star-shaped curve ``r(theta) = r0 (1 + amp cos(lobes theta))``."""
    if not 0 <= amp < 1:
        raise ValueError("star amplitude must lie in [0, 1)")
    w = 2 * math.pi
    m = int(lobes)

    def g(t):
        th = w * np.asarray(t, dtype=float)
        r = r0 * (1 + amp * np.cos(m * th))
        return np.stack([cx + r * np.cos(th), cy + r * np.sin(th)], axis=-1)

    def dg(t):
        th = w * np.asarray(t, dtype=float)
        r = r0 * (1 + amp * np.cos(m * th))
        dr = -r0 * amp * m * np.sin(m * th)
        return w * np.stack([dr * np.cos(th) - r * np.sin(th),
                             dr * np.sin(th) + r * np.cos(th)], axis=-1)

    return ParametricCurve(g, dg, "star", {"r0": r0, "amp": amp, "lobes": m, "cx": cx, "cy": cy})


BUILTIN_CURVES = {"circle": circle, "ellipse": ellipse, "star": star}


def boundary_from_json(obj) -> Boundary2D:
    """Parse ``{"polygon": [[x, y], ...]}`` or ``{"curve": name, "params": {...}}``."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"boundary JSON does not parse: {exc}")
    if not isinstance(obj, dict):
        raise MalformedInput("boundary JSON must be an object")
    try:
        if "polygon" in obj:
            return Polygon(np.asarray(obj["polygon"], dtype=float))
        if "curve" in obj:
            name = obj["curve"]
            if name not in BUILTIN_CURVES:
                raise MalformedInput(f"unknown curve {name!r}; known: {sorted(BUILTIN_CURVES)}")
            return BUILTIN_CURVES[name](**obj.get("params", {}))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(f"invalid boundary: {exc}")
    raise MalformedInput('boundary JSON needs a "polygon" or "curve" key')


# -------------------------------------------------------------- conormal

def conormal_bundle(b: Boundary2D) -> ExactSet:
    """Boundary points paired with both unit normals (vertices excluded)."""

    def near(x, tol):
        p, nrm, dist, vertex = b.nearest(np.asarray(x, dtype=float))
        return (not vertex) and dist <= tol, nrm

    def pred(x, k, tol):
        ok, nrm = near(x, tol.position)
        return ok and min(angle_between(k, nrm), angle_between(k, -nrm)) <= tol.angle

    def fib(x, tol):
        ok, nrm = near(x, tol.position)
        return np.stack([nrm, -nrm]) if ok else np.zeros((0, 2))

    def sampler(box, step):
        pts, _ = b.dense()
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1).mean()
        stride = max(1, int(step / max(seg, 1e-12)))
        pts = pts[::stride]
        if isinstance(b, Polygon):
            keep = [not b.nearest(p)[3] for p in pts]
            pts = pts[np.asarray(keep, dtype=bool)]
        return pts

    base = Custom(2, lambda x, tol: near(x, tol)[0], sampler)
    return ExactSet(2, pred, fib, base, tag="conormal")


# ----------------------------------------------------------- rasterizing

def rasterize_char(b: Boundary2D, grid: Grid) -> SampledField:
    """Even-odd indicator of the enclosed domain at grid nodes."""
    if grid.dim != 2:
        raise ParameterError("rasterization needs a 2D grid")
    lo, hi = b.bbox()
    if np.any(lo < grid.lower()) or np.any(hi > grid.upper()):
        raise ParameterError("boundary leaves the grid")
    poly = b.polyline()
    p, q = poly, np.roll(poly, -1, axis=0)
    xs, ys = grid.axis(0), grid.axis(1)
    vals = np.zeros(grid.shape)
    for j, y in enumerate(ys):
        up = (p[:, 1] <= y) & (q[:, 1] > y)
        down = (q[:, 1] <= y) & (p[:, 1] > y)
        m = up | down
        if not m.any():
            continue
        pm, qm = p[m], q[m]
        xc = pm[:, 0] + (y - pm[:, 1]) * (qm[:, 0] - pm[:, 0]) / (qm[:, 1] - pm[:, 1])
        xc.sort()
        left = np.searchsorted(xc, xs, side="right")
        vals[:, j] = (left % 2 == 1)
    return SampledField(grid, vals.astype(complex), (tuple(lo), tuple(hi)))


# ------------------------------------------------------ intersection counts

class LineCount(NamedTuple):
    count: int
    tangent: bool


def _curve_counts(b: ParametricCurve, nus, offsets, tol):
    nus = np.atleast_2d(nus)
    offsets = np.asarray(offsets, dtype=float)
    counts = np.zeros((len(nus), len(offsets)), dtype=np.int64)
    flags = np.zeros((len(nus), len(offsets)), dtype=np.uint8)
    for d, nu in enumerate(nus):
        _, gc = b.critical_points(nu)
        if len(gc) == 0:
            continue
        g0, g1 = gc, np.roll(gc, -1)
        tang = np.abs(gc[:, None] - offsets[None, :]) <= tol
        e0 = g0[:, None] - offsets[None, :]
        e1 = g1[:, None] - offsets[None, :]
        cross = (e0 * e1 < 0) & (np.abs(e0) > tol) & (np.abs(e1) > tol)
        counts[d] = cross.sum(axis=0) + tang.sum(axis=0)
        flags[d] = tang.any(axis=0)
    return counts, flags


def _counts(b: Boundary2D, nus, offsets, tol):
    nus = np.atleast_2d(np.asarray(nus, dtype=float))
    offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
    if isinstance(b, Polygon):
        v = b.vertices
        return kernels.polygon_crossings(v[:, 0], v[:, 1], nus[:, 0], nus[:, 1], offsets, tol)
    return _curve_counts(b, nus, offsets, tol)


def line_intersections(b: Boundary2D, nu, a: float, tol: float = 1e-9) -> LineCount:
    """Number of points where ``{nu . x = a}`` meets the boundary.

    A tangential contact counts once and sets ``tangent``.
    """
    nu = unit(np.asarray(nu, dtype=float))
    c, f = _counts(b, nu[None, :], [a], tol)
    return LineCount(int(c[0, 0]), bool(f[0, 0]))


@dataclass(frozen=True)
class IntersectionSignature:
    angles: np.ndarray
    directions: np.ndarray
    offsets: np.ndarray
    counts: np.ndarray
    tangent: np.ndarray
    jump_offsets: tuple

    @property
    def offset_step(self) -> float:
        return float(np.min(np.diff(self.offsets))) if len(self.offsets) > 1 else 0.0


def _jumps(counts_row, offsets):
    change = np.flatnonzero(counts_row[1:] != counts_row[:-1])
    if len(change) == 0:
        return []
    mids = 0.5 * (offsets[change] + offsets[change + 1])
    groups, cur = [], [0]
    for i in range(1, len(change)):
        if change[i] - change[i - 1] <= 1:
            cur.append(i)
        else:
            groups.append(cur)
            cur = [i]
    groups.append(cur)
    return sorted(float(np.mean(mids[g])) for g in groups)


def intersection_signature(b: Boundary2D, directions, offsets, tol: float = 1e-9):
    """Count table over a direction grid and an offset grid, with jump offsets."""
    if np.isscalar(directions):
        dirs = uniform_directions(2, int(directions)).vectors
    elif hasattr(directions, "vectors"):
        dirs = directions.vectors
    else:
        dirs = np.asarray(directions, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    if np.any(np.diff(offsets) <= 0):
        raise ParameterError("offsets must be strictly increasing")
    counts, flags = _counts(b, dirs, offsets, tol)
    jumps = tuple(tuple(_jumps(counts[d], offsets)) for d in range(len(dirs)))
    angles = np.arctan2(dirs[:, 1], dirs[:, 0])
    return IntersectionSignature(angles, dirs, offsets, counts, flags.astype(bool), jumps)


def wf_from_signature(sig: IntersectionSignature, b: Boundary2D) -> SampledSet:
    """Boundary points whose support line sits at a jump offset, with +-nu.

    Rows that could not be matched to a smooth tangency (polygon vertices,
    missing critical points) carry ``flagged=True`` in ``extra``.
    """
    step = sig.offset_step
    pts, dirs, flagged = [], [], []

    def emit(p, nu, flag):
        for s in (1.0, -1.0):
            pts.append(np.asarray(p, dtype=float))
            dirs.append(s * nu)
            flagged.append(flag)

    for nu, jumps in zip(sig.directions, sig.jump_offsets):
        for a in jumps:
            if isinstance(b, Polygon):
                v = b.vertices
                pa, pb = b.edges()
                d = pb - pa
                nrm = np.stack([d[:, 1], -d[:, 0]], 1) / np.linalg.norm(d, axis=1)[:, None]
                par = np.abs(np.abs(nrm @ nu) - 1) <= 1e-9
                edge_off = pa @ nu
                hit = np.flatnonzero(par & (np.abs(edge_off - a) <= 2 * step))
                if len(hit):
                    for e in hit:
                        for s in np.linspace(0.1, 0.9, 5):
                            emit(pa[e] + s * d[e], nu, False)
                    continue
                i = int(np.argmin(np.abs(v @ nu - a)))
                emit(v[i], nu, True)
            else:
                tc, gc = b.critical_points(nu)
                if len(tc) == 0:
                    continue
                i = int(np.argmin(np.abs(gc - a)))
                flag = bool(abs(gc[i] - a) > 2 * step)
                emit(b.gamma(np.array([tc[i]]))[0], nu, flag)
    out = SampledSet.from_lists(2, pts, dirs, tag="signature")
    out.extra["flagged"] = flagged
    return out


def support_offsets(b: Boundary2D, margin: float = 0.1, count: int = 401) -> np.ndarray:
    """Symmetric offset grid covering every support value of ``b``."""
    pts = b.polyline()
    rmax = float(np.max(np.linalg.norm(pts, axis=1)))
    return np.linspace(-(rmax + margin), rmax + margin, count)
