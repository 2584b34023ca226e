"""Analytic reference distributions.

Each entry provides a regularized sampler onto a grid, its closed-form
spectrum where one is known, and an exact wavefront-set predicate used as a
test oracle.  Transforms follow ``F(u)(k) = int dx exp(+i k.x) u(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import conic
from .conic import (BaseSet, Circle, Custom, Everywhere, ExactSet, Line, Nowhere,
                    Points, Tolerance, all_directions, axis_pm, sphere_directions)
from .core import Grid, SampledField, Window, angle_between, centered_grid, unit

KINDS = (
    "delta", "heaviside", "bv", "sum", "tensor-delta-1", "tensor-delta-2",
    "halfplane", "disk", "domain", "gaussian", "wightman", "feynman", "feynman-massless",
)
ORACLE_ONLY = ("wightman", "feynman", "feynman-massless")


@dataclass(frozen=True)
class CatalogDistribution:
    """Tagged analytic distribution.

    ``eps`` is the sampler regularization; ``None`` means four grid spacings.
    """

    kind: str
    x0: tuple = (0.0,)
    sign: int = 1
    a: float = 1.0
    radius: float = 1.0
    width: float = 0.25
    mass: float = 0.0
    boundary: object = None
    eps: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "sum" and self.a == 0:
            raise ValueError("shifted sum needs a != 0")
        if self.kind == "disk" and self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.eps is not None and self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def dim(self) -> int:
        if self.kind == "delta":
            return len(self.x0)
        if self.kind in ("heaviside", "bv", "sum"):
            return 1
        if self.kind in ORACLE_ONLY:
            return 4
        if self.kind == "gaussian":
            return len(self.x0)
        return 2

    @property
    def oracle_only(self) -> bool:
        return self.kind in ORACLE_ONLY

    @property
    def ident(self) -> str:
        return self.label or self.kind

    def with_eps(self, eps: float) -> "CatalogDistribution":
        return CatalogDistribution(self.kind, self.x0, self.sign, self.a, self.radius,
                                   self.width, self.mass, self.boundary, eps, self.label)


def from_id(ident: str) -> CatalogDistribution:
    """Parse a catalog id such as ``"bv+"``, ``"sum:a=1.0"`` or ``"disk:r=0.5"``."""
    s = ident.strip()
    name, _, arg = s.partition(":")
    params = {}
    if arg:
        for part in arg.split(","):
            key, eq, val = part.partition("=")
            if not eq:
                raise ValueError(f"malformed parameter {part!r} in {ident!r}")
            params[key.strip()] = float(val)
    try:
        if name == "delta":
            dim = int(params.pop("dim", 1))
            x0 = params.pop("x0", 0.0)
            x0 = (x0,) if dim == 1 else (x0, params.pop("y0", 0.0))
            out = CatalogDistribution("delta", x0=x0, label=s)
        elif name == "heaviside":
            out = CatalogDistribution("heaviside", label=s)
        elif name in ("bv+", "bv-"):
            out = CatalogDistribution("bv", sign=1 if name == "bv+" else -1, label=s)
        elif name == "sum":
            out = CatalogDistribution("sum", a=params.pop("a", 1.0), label=s)
        elif name in ("tensor-delta-1", "tensor-delta-2", "halfplane"):
            out = CatalogDistribution(name, label=s)
        elif name == "disk":
            out = CatalogDistribution("disk", radius=params.pop("r", 1.0), label=s)
        elif name == "gaussian":
            dim = int(params.pop("dim", 1))
            out = CatalogDistribution("gaussian", x0=(0.0,) * dim, width=params.pop("s", 0.25),
                                      label=s)
        elif name in ("wightman", "feynman"):
            out = CatalogDistribution(name, mass=params.pop("m", 0.0), label=s)
        elif name == "feynman-massless":
            out = CatalogDistribution(name, label=s)
        else:
            raise ValueError(f"unknown catalog id {ident!r}")
    except TypeError as exc:
        raise ValueError(str(exc))
    if "eps" in params:
        out = out.with_eps(params.pop("eps"))
    if params:
        raise ValueError(f"unused parameters {sorted(params)} in {ident!r}")
    return out


CATALOG_IDS = (
    "delta", "delta:dim=2", "heaviside", "bv+", "bv-", "sum:a=1.0", "tensor-delta-1",
    "tensor-delta-2", "halfplane", "disk:r=1.0", "gaussian", "gaussian:dim=2",
    "wightman:m=1.0", "feynman:m=1.0", "feynman-massless",
)

SAMPLED_IDS = tuple(i for i in CATALOG_IDS if not from_id(i).oracle_only)


def default_grid(d: CatalogDistribution) -> Grid:
    """Grid used when none is given: 1D n=1024 on [-2, 2), 2D n=256 on [-1.5, 1.5)^2."""
    if d.dim == 1:
        return centered_grid(1, 4.0, 1024)
    if d.dim == 2:
        return centered_grid(2, 3.0, 256)
    raise ValueError(f"{d.ident} has no sampler")


# ------------------------------------------------------------------ sampling

def _box_cell_average(x, center, eps, h):
    """Average of the box (1/eps) 1[|t - center| <= eps/2] over each cell."""
    lo = np.maximum(x - h / 2, center - eps / 2)
    hi = np.minimum(x + h / 2, center + eps / 2)
    return np.clip(hi - lo, 0.0, None) / (h * eps)


def _disk_rect_area(r, x0, x1, y0, y1):
    """Exact area of the rectangle ``[x0, x1] x [y0, y1]`` inside the disk of radius ``r``."""
    def arc(x):  # antiderivative of sqrt(r^2 - x^2)
        x = min(max(x, -r), r)
        return 0.5 * (x * math.sqrt(max(r * r - x * x, 0.0)) + r * r * math.asin(x / r))

    cuts = {x0, x1}
    for y in (None, y0, y1):
        if y is None:
            s = r
        elif abs(y) < r:
            s = math.sqrt(r * r - y * y)
        else:
            continue
        cuts.update(c for c in (s, -s) if x0 < c < x1)
    cuts = sorted(cuts)
    area = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = 0.5 * (a + b)
        if abs(m) >= r:
            continue
        s = math.sqrt(r * r - m * m)
        if min(y1, s) <= max(y0, -s):
            continue
        # between consecutive cuts each bound is either a rectangle side or the arc
        top = y1 * (b - a) if y1 < s else arc(b) - arc(a)
        bot = y0 * (b - a) if y0 > -s else -(arc(b) - arc(a))
        area += top - bot
    return area


def _disk_cell_average(X, Y, r, h):
    """Fraction of each ``h x h`` cell centered at ``(X, Y)`` inside the disk."""
    d_near = np.hypot(np.maximum(np.abs(X) - h / 2, 0), np.maximum(np.abs(Y) - h / 2, 0))
    d_far = np.hypot(np.abs(X) + h / 2, np.abs(Y) + h / 2)
    out = (d_far <= r).astype(float)
    for i, j in zip(*np.nonzero((d_near < r) & (d_far > r))):
        x, y = X[i, j], Y[i, j]
        out[i, j] = _disk_rect_area(r, x - h / 2, x + h / 2, y - h / 2, y + h / 2) / (h * h)
    return out


def sample(d: CatalogDistribution, g: Grid) -> SampledField:
    """Regularized node values of ``d`` on ``g``."""
    if d.oracle_only:
        raise ValueError(f"{d.ident} is oracle-only and has no sampler")
    if g.dim != d.dim:
        raise ValueError(f"{d.ident} lives in dimension {d.dim}, grid has {g.dim}")
    h = g.h
    eps = 4.0 * h if d.eps is None else d.eps
    if eps < h * (1 - 1e-12):
        raise ValueError(f"eps={eps} is below the grid spacing {h}")
    coords = g.coords()
    hint = None
    if d.kind == "delta":
        vals = np.ones(g.shape)
        for c, x0, hi in zip(coords, d.x0, g.spacing):
            vals = vals * _box_cell_average(c, x0, eps, hi)
        lo_b = tuple(x0 - eps / 2 - hh for x0, hh in zip(d.x0, g.spacing))
        hi_b = tuple(x0 + eps / 2 + hh for x0, hh in zip(d.x0, g.spacing))
        hint = (lo_b, hi_b)
    elif d.kind == "heaviside":
        vals = (coords[0] >= 0).astype(float)
    elif d.kind == "bv":
        vals = 1.0 / (coords[0] + 1j * d.sign * eps)
    elif d.kind == "sum":
        x = coords[0]
        vals = 1.0 / (x + 1j * eps) + 1.0 / (x + d.a - 1j * eps)
    elif d.kind == "tensor-delta-1":
        vals = _box_cell_average(coords[0], 0.0, eps, g.spacing[0])
    elif d.kind == "tensor-delta-2":
        vals = _box_cell_average(coords[1], 0.0, eps, g.spacing[1])
    elif d.kind == "halfplane":
        vals = (coords[1] >= 0).astype(float)
    elif d.kind == "disk":
        vals = _disk_cell_average(coords[0], coords[1], d.radius, h)
        hint = ((-d.radius,) * 2, (d.radius,) * 2)
    elif d.kind == "domain":
        from .geometry import rasterize_char
        return rasterize_char(d.boundary, g)
    elif d.kind == "gaussian":
        r2 = sum(c ** 2 for c in coords)
        vals = np.exp(-r2 / (2 * d.width ** 2))
    else:  # pragma: no cover - guarded by KINDS
        raise ValueError(d.kind)
    return SampledField(g, np.asarray(vals, dtype=complex), hint)


# -------------------------------------------------------------- transforms

def _theta(k):
    return np.heaviside(k, 0.5)


def exact_fourier(d: CatalogDistribution) -> Optional[Callable]:
    """Closed-form spectrum ``k -> u_hat(k)`` or ``None`` when unavailable."""
    if d.kind == "delta":
        x0 = np.asarray(d.x0)

        def f(k):
            k = np.asarray(k, dtype=float)
            if len(x0) == 1:
                return np.exp(1j * k * x0[0])
            return np.exp(1j * np.tensordot(k, x0, axes=([-1], [0])))
        return f
    if d.kind == "bv":
        if d.sign > 0:
            return lambda k: -2j * np.pi * _theta(-np.asarray(k, dtype=float))
        return lambda k: 2j * np.pi * _theta(np.asarray(k, dtype=float))
    if d.kind == "sum":
        a = d.a

        def f(k):
            k = np.asarray(k, dtype=float)
            return -2j * np.pi * _theta(-k) + 2j * np.pi * np.exp(-1j * k * a) * _theta(k)
        return f
    return None


def regularized_fourier(d: CatalogDistribution, eps: float) -> Optional[Callable]:
    """Spectrum of the eps-regularized boundary values, ``exp(-eps |k|)`` damped."""
    if d.kind == "bv":
        base = exact_fourier(d)
        return lambda k: base(k) * np.exp(-eps * np.abs(np.asarray(k, dtype=float)))
    if d.kind == "sum":
        base = exact_fourier(d)
        return lambda k: base(k) * np.exp(-eps * np.abs(np.asarray(k, dtype=float)))
    return None


# -------------------------------------------------------------- exact WF

def _dir_match(k, options, tol):
    return any(angle_between(k, o) <= tol for o in options)


def _wf_1d(points_dirs, tag):
    """WF given as a list of (point, allowed directions) in 1D."""
    pts = tuple((p,) for p, _ in points_dirs)

    def pred(x, k, tol):
        for p, dirs in points_dirs:
            if abs(x[0] - p) <= tol.position and _dir_match(k, dirs, tol.angle):
                return True
        return False

    def fib(x, tol):
        out = []
        for p, dirs in points_dirs:
            if abs(x[0] - p) <= tol.position:
                out.extend(dirs)
        return np.asarray(out, dtype=float).reshape(-1, 1)

    return ExactSet(1, pred, fib, Points(pts), tag=tag)


def _conormal_line(axis: int, tag: str):
    """Line {x_axis = 0} in R^2 with normal covectors along that axis."""
    dirs = axis_pm(2, axis)
    other = np.zeros(2)
    other[1 - axis] = 1.0
    base = Line((0.0, 0.0), tuple(other))

    def pred(x, k, tol):
        return abs(x[axis]) <= tol.position and _dir_match(k, dirs, tol.angle)

    return ExactSet(2, pred, lambda x, tol: dirs, base, tag=tag)


def _light_cone_base(include_origin=True) -> Custom:
    def test(x, tol):
        r = np.linalg.norm(x[1:])
        return abs(abs(x[0]) - r) <= tol * math.sqrt(2) or (include_origin and np.linalg.norm(x) <= tol)

    def sampler(box, step):
        lo, hi = box
        rmax = float(min(np.min(np.abs(lo)), np.min(np.abs(hi))))
        dirs = sphere_directions(3, 32)
        radii = np.arange(step, rmax + 1e-12, max(step, rmax / 8))
        pts = [np.zeros(4)] if include_origin else []
        for r in radii:
            for n in dirs:
                for s in (1.0, -1.0):
                    pts.append(np.concatenate([[s * r], r * n]))
        return np.asarray(pts)

    return Custom(4, test, sampler)


def _future_null(k):
    """Nearest unit future-lightlike direction to ``k`` (None if spatial part is 0)."""
    sp = np.linalg.norm(k[1:])
    if sp == 0:
        return None
    return unit(np.concatenate([[1.0], k[1:] / sp]))


def _wightman_wf(tag):
    null_dirs = np.asarray([unit(np.concatenate([[1.0], n])) for n in sphere_directions(3, 32)])

    def pred(x, k, tol):
        target = _future_null(k)
        if target is None or k[0] <= 0 or angle_between(k, target) > tol.angle:
            return False
        if np.linalg.norm(x) <= tol.position:
            return True
        line = unit(np.concatenate([[target[0]], -target[1:]]))
        dist = np.linalg.norm(x - np.dot(x, line) * line)
        return dist <= tol.position

    def fib(x, tol):
        if np.linalg.norm(x) <= tol.position:
            return null_dirs
        if abs(x[0]) <= tol.position:
            return np.zeros((0, 4))
        return unit(np.sign(x[0]) * np.concatenate([[x[0]], -x[1:]]))[None, :]

    return ExactSet(4, pred, fib, _light_cone_base(), tag=tag)


def _feynman_wf(tag):
    all4 = sphere_directions(4, 64)

    def pred(x, k, tol):
        if np.linalg.norm(x) <= tol.position:
            return True
        if abs(abs(x[0]) - np.linalg.norm(x[1:])) > tol.position * math.sqrt(2):
            return False
        if abs(x[0]) <= tol.position:
            return False
        return angle_between(k, np.concatenate([[x[0]], -x[1:]])) <= tol.angle

    def fib(x, tol):
        if np.linalg.norm(x) <= tol.position:
            return all4
        if abs(x[0]) <= tol.position:
            return np.zeros((0, 4))
        return unit(np.concatenate([[x[0]], -x[1:]]))[None, :]

    return ExactSet(4, pred, fib, _light_cone_base(), tag=tag)


def exact_wf(d: CatalogDistribution) -> conic.ConicSet:
    """Closed-form wavefront set of ``d`` as an exact conic set."""
    plus, minus = [1.0], [-1.0]
    if d.kind == "delta":
        if len(d.x0) == 1:
            return _wf_1d([(d.x0[0], [plus, minus])], "WF(delta)")
        return ExactSet(2, lambda x, k, tol: True, all_directions(2), Points.of(d.x0),
                        tag="WF(delta)")
    if d.kind == "heaviside":
        return _wf_1d([(0.0, [plus, minus])], "WF(theta)")
    if d.kind == "bv":
        dirs = [minus] if d.sign > 0 else [plus]
        return _wf_1d([(0.0, dirs)], "WF(bv+)" if d.sign > 0 else "WF(bv-)")
    if d.kind == "sum":
        return _wf_1d([(0.0, [minus]), (-d.a, [plus])], f"WF(sum:a={d.a})")
    if d.kind == "tensor-delta-1":
        return _conormal_line(0, "WF(delta_1)")
    if d.kind in ("tensor-delta-2", "halfplane"):
        return _conormal_line(1, "WF(delta_2)" if d.kind == "tensor-delta-2" else "WF(halfplane)")
    if d.kind == "disk":
        from .geometry import circle
        from .geometry import conormal_bundle
        s = conormal_bundle(circle(d.radius))
        s.tag = f"WF(disk:r={d.radius})"
        return s
    if d.kind == "domain":
        from .geometry import conormal_bundle
        return conormal_bundle(d.boundary)
    if d.kind == "gaussian":
        return conic.SampledSet.empty(len(d.x0), "WF(smooth)")
    if d.kind == "wightman":
        return _wightman_wf(f"WF(Delta+ m={d.mass})")
    if d.kind in ("feynman", "feynman-massless"):
        return _feynman_wf("WF(DeltaF)")
    raise ValueError(d.kind)  # pragma: no cover


def singular_support(d: CatalogDistribution) -> BaseSet:
    return exact_wf(d).base


def support(d: CatalogDistribution) -> BaseSet:
    """Support of the (unregularized) distribution."""
    if d.kind == "delta":
        return Points.of(d.x0)
    if d.kind == "tensor-delta-1":
        return Line((0.0, 0.0), (0.0, 1.0))
    if d.kind == "tensor-delta-2":
        return Line((0.0, 0.0), (1.0, 0.0))
    if d.kind == "heaviside":
        return Custom(1, lambda x, tol: x[0] >= -tol,
                      lambda box, step: np.arange(0.0, box[1][0] + step / 2, step)[:, None])
    if d.kind == "halfplane":
        return Custom(2, lambda x, tol: x[1] >= -tol,
                      lambda box, step: Everywhere(2).sample(((box[0][0], 0.0), box[1]), step))
    if d.kind == "disk":
        r = d.radius
        return Custom(2, lambda x, tol: np.linalg.norm(x) <= r + tol,
                      lambda box, step: [p for p in Everywhere(2).sample(box, step)
                                         if np.linalg.norm(p) <= r])
    return Everywhere(d.dim)


def describe_wf(d: CatalogDistribution) -> str:
    """Human-readable wavefront description for listings."""
    text = {
        "delta": "{(x0; k) : k != 0}",
        "heaviside": "{(0; k) : k != 0}",
        "tensor-delta-1": "{(0, y; l, 0) : l != 0}",
        "tensor-delta-2": "{(x, 0; 0, l) : l != 0}",
        "halfplane": "{(x, 0; 0, l) : l != 0}",
        "gaussian": "empty (smooth)",
        "wightman": "{(x; k) : k0 = |k|, x = l (k0, -k), l real}",
        "feynman": "{(0; k) : k != 0} U {(x; l (x0, -x)) : x^2 = 0, x0 != 0, l > 0}",
        "feynman-massless": "{(0; k) : k != 0} U {(x; l (x0, -x)) : x^2 = 0, x0 != 0, l > 0}",
    }
    if d.kind == "bv":
        return "{(0; k) : k < 0}" if d.sign > 0 else "{(0; k) : k > 0}"
    if d.kind == "sum":
        return f"{{(0; k) : k < 0}} U {{({-d.a}; k) : k > 0}}"
    if d.kind == "disk":
        return f"{{(x; l x) : |x| = {d.radius}, l != 0}}"
    if d.kind == "domain":
        return "conormal bundle of the boundary"
    return text[d.kind]


# --------------------------------------------------------- bound constant

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

def _smoothstep_derivative(t):
    """d/dt of the plateau transition on (0, 1); zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = (t > 0) & (t < 1)
    tm = t[m]
    a = np.exp(-1.0 / (1.0 - tm))
    b = np.exp(-1.0 / tm)
    da = -a / (1.0 - tm) ** 2
    db = b / tm ** 2
    out[m] = (da * b - a * db) / (a + b) ** 2
    return out


def window_derivative_1d(w: Window, x):
    """Analytic derivative of a 1D window."""
    x = np.asarray(x, dtype=float)
    c = w.center[0]
    r = np.abs(x - c)
    sgn = np.sign(x - c)
    bump = w.radial(r) if w.sigma is None else Window(w.center, w.r1, w.r2).radial(r)
    dbump = _smoothstep_derivative((r - w.r1) / (w.r2 - w.r1)) / (w.r2 - w.r1)
    if w.sigma is None:
        return sgn * dbump
    g = np.exp(-r ** 2 / (2 * w.sigma ** 2))
    dg = -r / w.sigma ** 2 * g
    return sgn * (dg * bump + g * dbump)


def heaviside_ft_bound_constant(window: Window, n: int = 4096) -> float:
    """``C = ||f'||_1 + ||f||_1 + |f(0)|`` by trapezoid quadrature.

    Any 1D window ``f`` then satisfies ``|F(theta f)(k)| <= C / (1 + |k|)``.
    """
    if window.dim != 1:
        raise ValueError("the bound constant is defined for 1D windows")
    c = window.center[0]
    x = np.linspace(c - window.r2, c + window.r2, n + 1)
    f = window.radial(np.abs(x - c))
    df = window_derivative_1d(window, x)
    l1 = _trapezoid(np.abs(f), x)
    d1 = _trapezoid(np.abs(df), x)
    f0 = float(window.radial(abs(0.0 - c)))
    return float(d1 + l1 + abs(f0))
