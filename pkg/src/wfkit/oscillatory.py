"""Wavefront bounds from phase functions of oscillatory integrals.

For ``u(x) = int dxi a(x, xi) exp(i phi(x, xi))`` with ``phi`` homogeneous of
degree one in ``xi`` the singular directions are confined to
``{(x, -d_x phi(x, xi)) : d_xi phi(x, xi) = 0}``.  Everything here is a
bound; equality is only claimed through the independent oracle checks.

Phase callables are vectorized: ``phi(x, xi)`` takes one base point ``x``
(shape ``(n,)``) and fiber points ``xi`` of shape ``(..., s)``.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional

import numpy as np

from . import catalog, conic
from .conic import SampledSet, Tolerance
from .core import angle_between, unit
from .errors import MalformedInput

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class PhaseFunction:
    """Phase ``phi(x, xi)`` on ``R^n x (R^s minus 0)`` with its gradients."""

    n: int
    s: int
    phi: Callable
    dx_phi: Callable
    dxi_phi: Callable
    homogeneous: bool = True
    name: str = ""

    def check(self, samples: int = 64, seed: int = 0):
        """Numerical homogeneity and gradient checks on random samples.

        Returns ``(homogeneity_error, gradient_error)``: the largest
        ``|phi(x, 2 xi) - 2 phi(x, xi)| / (1 + |phi|)`` and the largest
        relative gap between analytic and central-difference gradients.
        """
        rng = np.random.default_rng(seed)
        hom, grad = 0.0, 0.0
        step = 1e-5
        for _ in range(samples):
            x = rng.uniform(-1.5, 1.5, self.n)
            xi = rng.normal(size=self.s)
            xi /= np.linalg.norm(xi)
            v = float(self.phi(x, xi))
            hom = max(hom, abs(float(self.phi(x, 2 * xi)) - 2 * v) / (1 + abs(v)))
            gx = np.asarray(self.dx_phi(x, xi), dtype=float)
            gxi = np.asarray(self.dxi_phi(x, xi), dtype=float)
            fx = np.array([(self.phi(x + step * e, xi) - self.phi(x - step * e, xi)) / (2 * step)
                           for e in np.eye(self.n)], dtype=float)
            fxi = np.array([(self.phi(x, xi + step * e) - self.phi(x, xi - step * e)) / (2 * step)
                            for e in np.eye(self.s)], dtype=float)
            for a, b in ((gx, fx), (gxi, fxi)):
                grad = max(grad, float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(a))))
        return hom, grad


# ----------------------------------------------------------- built-in phases

def circle_phase(radius: float = 1.0) -> PhaseFunction:
    """``phi = (x1^2 + x2^2 - r^2) xi`` with a single fiber variable."""
    r2 = radius ** 2

    def phi(x, xi):
        return (x[0] ** 2 + x[1] ** 2 - r2) * np.asarray(xi)[..., 0]

    def dx(x, xi):
        xi = np.asarray(xi)[..., 0]
        return np.stack([2 * x[0] * xi, 2 * x[1] * xi], axis=-1)

    def dxi(x, xi):
        return np.full(np.shape(xi), x[0] ** 2 + x[1] ** 2 - r2)

    return PhaseFunction(2, 1, phi, dx, dxi, True, "circle")


def wightman_phase() -> PhaseFunction:
    """``phi = -x0 |xi| - x.xi`` on ``R^4 x R^3`` (large-|xi| form)."""

    def phi(x, xi):
        xi = np.asarray(xi, dtype=float)
        return -x[0] * np.linalg.norm(xi, axis=-1) - xi @ x[1:]

    def dx(x, xi):
        xi = np.asarray(xi, dtype=float)
        nrm = np.linalg.norm(xi, axis=-1, keepdims=True)
        return np.concatenate([-nrm, -xi], axis=-1)

    def dxi(x, xi):
        xi = np.asarray(xi, dtype=float)
        return -x[0] * xi / np.linalg.norm(xi, axis=-1, keepdims=True) - x[1:]

    return PhaseFunction(4, 3, phi, dx, dxi, True, "wightman")


def _poly_eval(terms, x):
    return sum(c * np.prod([x[i] ** e for i, e in enumerate(ex)]) for c, *ex in terms)


def _poly_grad(terms, x):
    n = len(x)
    g = np.zeros(n)
    for c, *ex in terms:
        for i in range(n):
            if ex[i] == 0:
                continue
            d = list(ex)
            d[i] -= 1
            g[i] += c * ex[i] * np.prod([x[j] ** e for j, e in enumerate(d)])
    return g


def linear_phase(polys) -> PhaseFunction:
    """``phi = sum_i phi_i(x) xi_i`` with polynomial coefficients.

    Each ``phi_i`` is a list of terms ``[coef, e_1, ..., e_n]`` meaning
    ``coef * x_1^e_1 ... x_n^e_n``; ``n`` is read off the term length.
    """
    polys = [[[float(v) for v in t] for t in p] for p in polys]
    if not polys or any(not p for p in polys):
        raise MalformedInput("linear phase needs non-empty polynomial lists")
    n = len(polys[0][0]) - 1
    if n < 1 or any(len(t) != n + 1 for p in polys for t in p):
        raise MalformedInput("every term must be [coef, e_1, ..., e_n] with one n")
    if any(e < 0 or e != int(e) for p in polys for t in p for e in t[1:]):
        raise MalformedInput("exponents must be non-negative integers")
    polys = [[(t[0], *(int(e) for e in t[1:])) for t in p] for p in polys]
    s = len(polys)

    def coeffs(x):
        return np.array([_poly_eval(p, x) for p in polys])

    def grads(x):
        return np.array([_poly_grad(p, x) for p in polys])  # (s, n)

    def phi(x, xi):
        return np.asarray(xi, dtype=float) @ coeffs(np.asarray(x, dtype=float))

    def dx(x, xi):
        return np.asarray(xi, dtype=float) @ grads(np.asarray(x, dtype=float))

    def dxi(x, xi):
        c = coeffs(np.asarray(x, dtype=float))
        return np.broadcast_to(c, np.shape(xi)).copy()

    return PhaseFunction(n, s, phi, dx, dxi, True, "linear")


def phase_from_id(ident: str) -> PhaseFunction:
    """``circle``, ``circle:r=R``, ``wightman`` or ``linear:[[...], ...]``."""
    ident = ident.strip()
    if ident == "circle":
        return circle_phase()
    if ident.startswith("circle:"):
        key, _, val = ident[len("circle:"):].partition("=")
        if key != "r":
            raise MalformedInput(f"unknown circle option {key!r}")
        try:
            return circle_phase(float(val))
        except ValueError:
            raise MalformedInput(f"bad radius {val!r}")
    if ident == "wightman":
        return wightman_phase()
    if ident.startswith("linear:"):
        try:
            polys = ast.literal_eval(ident[len("linear:"):])
        except (ValueError, SyntaxError):
            raise MalformedInput(f"cannot parse polynomial list in {ident!r}")
        if not isinstance(polys, (list, tuple)):
            raise MalformedInput("linear phase expects a list of polynomials")
        return linear_phase(polys)
    raise MalformedInput(f"unknown phase id {ident!r}")


PHASE_IDS = ("circle", "wightman", "linear:[[[1,2,0],[1,0,2],[-1,0,0]]]")


# ------------------------------------------------------------ sphere search

@lru_cache(maxsize=None)
def _icosphere_centroids(level: int = 3) -> np.ndarray:
    """Unit centroids of the faces of a ``level``-times subdivided icosahedron."""
    t = (1 + math.sqrt(5)) / 2
    v = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    verts = [np.asarray(p, float) / np.linalg.norm(p) for p in v]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    tris = [tuple(verts[i] for i in f) for f in faces]
    for _ in range(level):
        nxt = []
        for a, b, c in tris:
            ab, bc, ca = unit(a + b), unit(b + c), unit(c + a)
            nxt += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        tris = nxt
    return np.asarray([unit(a + b + c) for a, b, c in tris])


def sphere_samples(s: int) -> np.ndarray:
    """Search samples on the unit sphere of ``R^s``: 2, 720 or 1280 points."""
    if s == 1:
        return np.array([[1.0], [-1.0]])
    if s == 2:
        a = 2 * np.pi * np.arange(720) / 720
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    if s == 3:
        return _icosphere_centroids(3)
    raise ValueError("fiber dimension above 3 is not supported")


def _spacing(s: int) -> float:
    return {1: 0.0, 2: 2 * np.pi / 720, 3: 0.12}[s]


def _tangent_basis(xi):
    """Orthonormal basis of the tangent space of the sphere at ``xi``."""
    q, _ = np.linalg.qr(np.column_stack([xi, np.eye(len(xi))]))
    return q[:, 1:len(xi)]


def _jac_xi(p: PhaseFunction, x, xi, step=1e-6):
    cols = [(p.dxi_phi(x, xi + step * e) - p.dxi_phi(x, xi - step * e)) / (2 * step)
            for e in np.eye(p.s)]
    return np.column_stack(cols)


def _refine(p: PhaseFunction, x, xi, iters: int = 40):
    """Damped Gauss-Newton for ``d_xi phi = 0`` restricted to the unit sphere."""
    g = np.asarray(p.dxi_phi(x, xi), dtype=float)
    r = float(np.linalg.norm(g))
    for _ in range(iters):
        if r < 1e-14:
            break
        T = _tangent_basis(xi)
        J = _jac_xi(p, x, xi) @ T
        delta, *_ = np.linalg.lstsq(J, -g, rcond=None)
        lam = 1.0
        while lam > 1e-6:
            cand = unit(xi + lam * (T @ delta))
            gc = np.asarray(p.dxi_phi(x, cand), dtype=float)
            rc = float(np.linalg.norm(gc))
            if rc < r:
                xi, g, r = cand, gc, rc
                break
            lam *= 0.5
        else:
            break
    return xi, r


def _dedupe(dirs, tol=1e-6):
    out = []
    for d in dirs:
        if all(angle_between(d, e) > tol for e in out):
            out.append(d)
    return out


def critical_directions(p: PhaseFunction, x) -> List[np.ndarray]:
    """Unit ``xi`` with ``|d_xi phi(x, xi)| < 1e-8``.

    Dense sphere sampling seeds a damped Gauss-Newton refinement; samples
    that already satisfy the residual bound are kept as they are (this
    covers whole critical spheres, as for the light-cone phase at the tip).
    """
    if not p.homogeneous:
        raise ValueError("critical_directions needs a homogeneous phase")
    x = np.asarray(x, dtype=float)
    samples = sphere_samples(p.s)
    res = np.linalg.norm(np.asarray(p.dxi_phi(x, samples), dtype=float).reshape(len(samples), -1),
                         axis=1)
    if p.s == 1:
        return [samples[i] for i in range(2) if res[i] < RESIDUAL_TOL]
    exact = [samples[i] for i in np.flatnonzero(res < RESIDUAL_TOL)]
    if len(exact) == len(samples):
        return exact
    # Seeds: samples whose residual is within one sample spacing times the
    # local Lipschitz scale of d_xi phi.
    lip = max(float(np.linalg.norm(_jac_xi(p, x, samples[i]), 2))
              for i in np.argsort(res)[:8])
    seeds = np.flatnonzero((res >= RESIDUAL_TOL) & (res <= 2 * _spacing(p.s) * max(lip, 1e-12)))
    found = list(exact)
    for i in seeds[np.argsort(res[seeds])][:64]:
        xi, r = _refine(p, x, samples[i])
        if r < RESIDUAL_TOL:
            found.append(xi)
    found = _dedupe(found)
    found.sort(key=lambda v: tuple(np.round(v, 12)))
    return found


# --------------------------------------------------------------- the bound

def wf_bound_from_phase(p: PhaseFunction, x_grid) -> SampledSet:
    """Sampled bound ``{(x, unit(-d_x phi(x, xi))) : d_xi phi(x, xi) = 0}``.

    Points where ``d_x phi`` vanishes at a critical ``xi`` are listed in
    ``extra["degenerate"]`` and never emitted.
    """
    xs = np.atleast_2d(np.asarray(x_grid, dtype=float)).reshape(-1, p.n)
    pts, dirs, gen, degenerate = [], [], [], []
    for x in xs:
        for xi in critical_directions(p, x):
            q = -np.asarray(p.dx_phi(x, xi), dtype=float)
            if np.linalg.norm(q) <= 1e-12:
                if not degenerate or degenerate[-1] != x.tolist():
                    degenerate.append(x.tolist())
                continue
            pts.append(x)
            dirs.append(unit(q))
            gen.append(xi.tolist())
    out = SampledSet.from_lists(p.n, pts, dirs, tag=f"phase[{p.name}]")
    out.extra["xi"] = gen
    out.extra["degenerate"] = degenerate
    return out


def project_to_critical(p: PhaseFunction, points, iters: int = 30, tol: float = 1e-12):
    """Move points onto ``{x : d_xi phi(x, +1) = 0}`` (one fiber variable).

    Newton steps along the gradient of ``F(x) = d_xi phi(x, 1)``; points
    that do not converge are dropped.  Used to turn a lattice into base
    points on the critical manifold.
    """
    if p.s != 1:
        raise ValueError("projection is implemented for one fiber variable")
    one = np.array([1.0])
    out = []
    step = 1e-6
    for x in np.atleast_2d(np.asarray(points, dtype=float)):
        y = x.copy()
        for _ in range(iters):
            F = float(np.asarray(p.dxi_phi(y, one)).ravel()[0])
            if abs(F) < tol:
                break
            g = np.array([(float(np.asarray(p.dxi_phi(y + step * e, one)).ravel()[0])
                           - float(np.asarray(p.dxi_phi(y - step * e, one)).ravel()[0]))
                          / (2 * step) for e in np.eye(p.n)])
            gg = float(g @ g)
            if gg == 0:
                break
            y = y - F * g / gg
        if abs(float(np.asarray(p.dxi_phi(y, one)).ravel()[0])) < RESIDUAL_TOL:
            out.append(y)
    return np.asarray(out).reshape(-1, p.n)


def lattice_near_critical(p: PhaseFunction, box: float, step: float):
    """Lattice points of ``[-box, box]^n`` within one step of the critical set, projected."""
    axes = [np.arange(-box, box + 1e-12, step)] * p.n
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p.n)
    return project_to_critical(p, pts)


def light_cone_samples(n: int, seed: int = 0, include_origin: bool = False,
                       rmin: float = 0.1, rmax: float = 2.0):
    """Random points ``(t, |t| n)`` on the double light cone (both sheets)."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = rng.uniform(rmin, rmax, n)
    sgn = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    pts = np.column_stack([sgn * r, r[:, None] * d])
    if include_origin:
        pts = np.vstack([np.zeros(4), pts])
    return pts


# ---------------------------------------------------- Feynman two-route check

@dataclass
class FeynmanReport:
    ok: bool
    n_samples: int
    witnesses: list = field(default_factory=list)
    origin_ok: bool = True
    spacelike_ok: bool = True
    info: dict = field(default_factory=dict)


def feynman_route_causal(x) -> List[np.ndarray]:
    """Fiber at ``x != 0`` from the Wightman phase, reflected for ``x0 < 0``.

    Near a future cone point the Feynman propagator coincides with the
    Wightman function; near a past cone point it coincides with the
    Wightman function at ``-x``, whose wavefront set is the reflection
    ``(x, k) -> (-x, -k)``.
    """
    x = np.asarray(x, dtype=float)
    p = wightman_phase()
    if x[0] > 0:
        b = wf_bound_from_phase(p, x)
        return [d for d in b.directions]
    if x[0] < 0:
        b = wf_bound_from_phase(p, -x)
        return [-d for d in b.directions]
    return []


def _minkowski_square(x):
    x = np.asarray(x, dtype=float)
    return x[0] ** 2 - float(x[1:] @ x[1:])


def _minkowski_jacobian(x):
    x = np.asarray(x, dtype=float)
    return np.concatenate([[2 * x[0]], -2 * x[1:]])[None, :]


def feynman_route_pullback(points):
    """Pull ``WF((t - i0)^{-1}) = {(0; k > 0)}`` back along ``x0^2 - |x|^2``."""
    wf_t = catalog.exact_wf(catalog.from_id("bv-"))
    return conic.pullback_wf(_minkowski_square, _minkowski_jacobian, wf_t, points,
                             tol=Tolerance(1e-9, 1e-9))


def feynman_wf_oracle_check(n_samples: int = 1000, seed: int = 0,
                            angle_tol: float = 1e-6) -> FeynmanReport:
    """Cross-check the two constructions of the cone part of ``WF(Delta_F)``.

    Cone samples away from the origin must give identical fibers from the
    causal gluing route and from the pull-back route.  The origin is
    checked separately: ``Delta_F`` is a fundamental solution, so
    ``WF(delta_0)`` (all directions at 0) lies inside ``WF(Delta_F)``; the
    pull-back route cannot reach it because ``df`` vanishes there.
    """
    pts = light_cone_samples(n_samples, seed)
    pulled, samples, verdict = feynman_route_pullback(pts)
    witnesses = []
    per_point = {}
    for x, k in zip(samples.points, samples.directions):
        per_point.setdefault(tuple(x), []).append(k)
    exact = catalog.exact_wf(catalog.from_id("feynman-massless"))
    tol = Tolerance(1e-9, angle_tol)
    for x in pts:
        a = feynman_route_causal(x)
        b = per_point.get(tuple(x), [])
        if not a or not b:
            witnesses.append({"x": x.tolist(), "reason": "empty fiber",
                              "causal": len(a), "pullback": len(b)})
            continue
        for ka in a:
            if not any(angle_between(ka, kb) <= angle_tol for kb in b):
                witnesses.append({"x": x.tolist(), "k": ka.tolist(), "missing_in": "pullback"})
            if not exact.member(x, ka, tol):
                witnesses.append({"x": x.tolist(), "k": ka.tolist(), "missing_in": "exact"})
        for kb in b:
            if not any(angle_between(kb, ka) <= angle_tol for ka in a):
                witnesses.append({"x": x.tolist(), "k": kb.tolist(), "missing_in": "causal"})

    # Spacelike points: both routes must be empty.
    rng = np.random.default_rng(seed + 1)
    space_ok = True
    for _ in range(16):
        d = unit(rng.normal(size=3))
        r = rng.uniform(0.2, 2.0)
        x = np.concatenate([[rng.uniform(-0.9, 0.9) * r], r * d])
        _, s2, _ = feynman_route_pullback(x[None, :])
        if feynman_route_causal(x):
            space_ok = False
            witnesses.append({"x": x.tolist(), "reason": "spacelike point has causal fiber"})
        if len(s2):
            space_ok = False
            witnesses.append({"x": x.tolist(), "reason": "spacelike point has pull-back fiber"})

    # Origin: WF(delta) is contained in WF(Delta_F).
    origin_dirs = conic.sphere_directions(4, 64)
    origin_ok = all(exact.member(np.zeros(4), k, tol) for k in origin_dirs)
    _, _, v0 = feynman_route_pullback(np.zeros((1, 4)))
    info = {"pullback_verdict_at_origin": v0.ok, "origin_directions": len(origin_dirs),
            "pullback_verdict": verdict.ok}
    ok = not witnesses and origin_ok and space_ok and verdict.ok
    return FeynmanReport(ok, len(pts), witnesses, origin_ok, space_ok, info)
