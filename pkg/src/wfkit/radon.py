"""Line integrals of windowed fields and the Radon-side (sign-symmetric) estimator.

``R(f u)(nu, s)`` integrates ``f u`` over the line ``{x : nu.x = s}``.  The
field is extended off the nodes by bilinear interpolation, so every routine
here acts on one well-defined continuous function.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .conic import SampledSet
from .core import SampledField, Window, unit, worker_count
from .errors import ParameterError, WindowClipped


@dataclass(frozen=True)
class RadonProfile:
    """Samples of ``s -> R(f u)(nu, s)`` on uniform offsets.

    ``derivative_growth[m]`` is ``max |Delta^m R| / ds^m`` for ``m = 0..m_max``
    (forward differences at the sampling step).
    """

    direction: np.ndarray
    offsets: np.ndarray
    values: np.ndarray
    derivative_growth: np.ndarray

    @property
    def step(self) -> float:
        return float(self.offsets[1] - self.offsets[0])

    def integral(self) -> complex:
        """Trapezoid integral over the offsets."""
        w = np.full(len(self.offsets), self.step)
        w[0] = w[-1] = 0.5 * self.step
        return complex(np.dot(w, self.values))


def _check(field: SampledField, window: Window):
    if field.grid.dim != 2:
        raise ParameterError("Radon transforms are implemented for 2D fields only")
    if window.dim != 2:
        raise ParameterError("window must be 2D")
    if not window.inside(field.grid):
        raise WindowClipped(f"window at {window.center} with r2={window.r2} leaves the grid")


def _lattice(anchor: float, center: float, half: float, step: float) -> np.ndarray:
    """Points ``anchor + j step`` covering ``[center - half, center + half]``."""
    lo = int(math.floor((center - half - anchor) / step + 1e-9))
    hi = int(math.ceil((center + half - anchor) / step - 1e-9))
    return anchor + step * np.arange(lo, hi + 1)


def default_offsets(window: Window, nu, step: float, pad: float, anchor: float = 0.0) -> np.ndarray:
    """Offsets ``anchor + j step`` covering the window's projection onto ``nu`` plus ``pad``."""
    return _lattice(anchor, float(np.dot(nu, window.center)), window.r2 + pad, step)


def _axis_aligned(nu) -> bool:
    return bool(min(abs(nu[0]), abs(nu[1])) < 1e-12)


def growth(values, step: float, m_max: int) -> np.ndarray:
    out = np.zeros(m_max + 1)
    for m in range(m_max + 1):
        d = np.diff(values, m) if m else np.asarray(values)
        out[m] = float(np.abs(d).max()) / step ** m if d.size else 0.0
    return out


def _integrate(img, grid, nu, offsets, tmin, tmax, dt):
    """Line integrals with parameter nodes ``tmin + j dt`` up to ``tmax``."""
    x0, y0 = grid.origin
    h = grid.h
    re = kernels.line_integrals(np.ascontiguousarray(img.real), x0, y0, h, nu[0], nu[1],
                                offsets, tmin, tmax, dt)
    if np.iscomplexobj(img) and np.any(img.imag):
        im = kernels.line_integrals(np.ascontiguousarray(img.imag), x0, y0, h, nu[0], nu[1],
                                    offsets, tmin, tmax, dt)
        return re + 1j * im
    return re.astype(complex)


def _profile(img, grid, window: Window, nu, offsets, m_max: int, offset_step, line_step):
    h = grid.h
    if offsets is None:
        offsets = default_offsets(window, nu, offset_step or 0.5 * h, 2 * h,
                                  anchor=float(np.dot(nu, grid.origin)))
    offsets = np.asarray(offsets, dtype=float)
    if offsets.ndim != 1 or len(offsets) < m_max + 2:
        raise ParameterError("need a 1D list of at least m_max + 2 offsets")
    steps = np.diff(offsets)
    if np.any(np.abs(steps - steps[0]) > 1e-9 * max(1.0, abs(steps[0]))) or steps[0] <= 0:
        raise ParameterError("offsets must be increasing and uniform")
    perp = np.array([-nu[1], nu[0]])
    dt = line_step or h
    t = _lattice(float(perp @ grid.origin), float(perp @ window.center), window.r2 + 2 * h, dt)
    vals = _integrate(img, grid, nu, offsets, t[0], t[-1], dt)
    return RadonProfile(nu, offsets, vals, growth(vals, float(steps[0]), m_max))


def radon(field: SampledField, window: Window, nu, offsets=None, m_max: int = 3,
          offset_step: Optional[float] = None, line_step: Optional[float] = None) -> RadonProfile:
    """Radon profile of ``window * field`` in direction ``nu``.

    Defaults: offsets every ``h/2`` over the window's projection (plus two
    cells), line quadrature step ``h`` (trapezoid rule on the interpolant).
    Offsets and line nodes sit on lattices through the projections of the
    grid origin, so for axis-aligned ``nu`` they fall on grid rows/columns.
    """
    _check(field, window)
    nu = unit(np.asarray(nu, dtype=float))
    img = field.values * window.on_grid(field.grid)
    return _profile(img, field.grid, window, nu, offsets, m_max, offset_step, line_step)


# ----------------------------------------------------------- Fourier slice

def fourier_slice(field: SampledField, window: Window, nu, kmax_frac: float = 0.5,
                  nk: int = 129) -> float:
    """Largest relative gap between the two routes to ``F(f u)(k nu)``.

    Route one sums the windowed samples against ``exp(i k nu.x)`` and
    multiplies by the transform of the bilinear hat, giving the exact
    transform of the interpolant.  Route two transforms a finely sampled
    Radon profile in ``s``.  Both describe the same function, so the gap is
    quadrature error only.  For axis-aligned ``nu`` the profile is piecewise
    linear between lattice offsets and route two gets the same hat factor,
    which makes it exact.
    """
    _check(field, window)
    g = field.grid
    h = g.h
    nu = unit(np.asarray(nu, dtype=float))
    kmax = kmax_frac * g.nyquist
    k = np.linspace(-kmax, kmax, nk)
    img = field.values * window.on_grid(g)
    if not np.any(img):
        return 0.0
    X, Y = g.coords()
    proj = (nu[0] * X + nu[1] * Y).ravel()
    a = h * h * (np.exp(1j * np.outer(k, proj)) @ img.ravel())
    a *= np.sinc(k * nu[0] * h / (2 * np.pi)) ** 2 * np.sinc(k * nu[1] * h / (2 * np.pi)) ** 2
    prof = radon(field, window, nu, m_max=0, offset_step=h / 8, line_step=h / 4)
    s = prof.offsets
    w = np.full(len(s), prof.step)
    w[0] = w[-1] = 0.5 * prof.step
    b = np.exp(1j * np.outer(k, s)) @ (prof.values * w)
    if _axis_aligned(nu):
        b *= np.sinc(k * prof.step / (2 * np.pi)) ** 2
    return float(np.abs(a - b).max() / np.abs(a).max())


# ----------------------------------------------------------- estimator

@dataclass(frozen=True)
class RadonParams:
    """Settings for :func:`estimate_wf_pm`; ``None`` lengths scale with ``h``.

    A direction is non-smooth at ``x`` when, for some sub-direction of its
    cap, the m-th difference quotient grows by at least ``growth_threshold``
    per halving of the offset step, the m-th difference is at least
    ``amplitude_floor`` times the profile maximum, and the offending offset
    lies within ``locus_cells`` grid cells of ``nu.x``.
    """

    r1: Optional[float] = None
    r2: Optional[float] = None
    directions: int = 32
    sub_directions: int = 3
    m_max: int = 3
    growth_threshold: float = 2.0
    amplitude_floor: float = 0.2
    locus_cells: float = 2.0

    def resolve(self, grid) -> "RadonParams":
        h = grid.h
        r2 = 40 * h if self.r2 is None else self.r2
        r1 = (r2 / 4 if self.r2 is not None else 10 * h) if self.r1 is None else self.r1
        out = replace(self, r1=r1, r2=r2)
        out.validate()
        return out

    def validate(self):
        if not (self.r1 > 0 and self.r2 > self.r1):
            raise ParameterError("window radii need 0 < r1 < r2")
        if self.directions < 4:
            raise ParameterError("need at least 4 directions")
        if self.sub_directions < 1:
            raise ParameterError("need at least one sub-direction")
        if self.m_max < 1:
            raise ParameterError("m_max must be at least 1")
        if self.growth_threshold <= 1 or self.amplitude_floor <= 0 or self.locus_cells <= 0:
            raise ParameterError("thresholds must be positive (growth > 1)")

    def window(self, center) -> Window:
        return Window(tuple(np.asarray(center, dtype=float)), self.r1, self.r2)

    def angles(self) -> np.ndarray:
        """Direction angles in ``[0, pi)``; the sign is symmetrized later."""
        return math.pi * np.arange(self.directions) / self.directions

    @property
    def cap_half_angle(self) -> float:
        return math.pi / (2 * self.directions)

    def as_dict(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v)
                for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class Smoothness:
    smooth: bool
    ratio: float
    amplitude: float
    locus: float


def _difference_stats(values, m: int, stride: int):
    """Max |Delta^m| over every phase of a ``stride``-subsampled profile."""
    best, where = 0.0, 0
    for p in range(stride):
        sub = values[p::stride]
        if len(sub) <= m:
            continue
        d = np.abs(np.diff(sub, m))
        i = int(np.argmax(d))
        if d[i] > best:
            best, where = float(d[i]), p + stride * i + (stride * m) // 2
    return best, where


def jump_locus(prof: RadonProfile, cells: int = 4) -> float:
    """Offset of the steepest change (centroid of |Delta R| around its peak)."""
    d = np.abs(np.diff(prof.values))
    mid = 0.5 * (prof.offsets[1:] + prof.offsets[:-1])
    i = int(np.argmax(d))
    lo, hi = max(0, i - cells), min(len(d), i + cells + 1)
    wsum = d[lo:hi].sum()
    return float(mid[i] if wsum == 0 else np.dot(d[lo:hi], mid[lo:hi]) / wsum)


def smoothness(prof: RadonProfile, x, h: float, params: RadonParams) -> Smoothness:
    """Ratio test on a profile sampled at ``h/2``.

    The m-th difference quotients at steps ``h`` and ``2h`` come from the
    even/odd (and mod-4) sub-profiles, so a single profile serves both.
    """
    m = params.m_max
    vals = prof.values
    peak = float(np.abs(vals).max())
    if peak == 0:
        return Smoothness(True, 1.0, 0.0, math.nan)
    stride = max(1, int(round(h / prof.step)))
    d1, _ = _difference_stats(vals, m, stride)
    d2, _ = _difference_stats(vals, m, 2 * stride)
    ratio = (d1 / h ** m) / (d2 / (2 * h) ** m) if d2 > 0 else (math.inf if d1 > 0 else 1.0)
    amp = d1 / peak
    loc = jump_locus(prof)
    near = abs(loc - float(np.dot(prof.direction, x))) <= params.locus_cells * h
    singular = ratio >= params.growth_threshold and amp >= params.amplitude_floor and near
    return Smoothness(not singular, float(ratio), float(amp), loc)


def _sub_angles(a: float, params: RadonParams) -> np.ndarray:
    n = params.sub_directions
    if n == 1:
        return np.array([a])
    c = params.cap_half_angle
    return a + np.linspace(-c / 2, c / 2, n)


def classify_point(field: SampledField, x, params: RadonParams):
    """Per-direction smoothness at ``x``: list of (angle, Smoothness)."""
    g = field.grid
    win = params.window(x)
    _check(field, win)
    img = field.values * win.on_grid(g)
    out = []
    for a in params.angles():
        worst = None
        for b in _sub_angles(a, params):
            nu = np.array([math.cos(b), math.sin(b)])
            prof = _profile(img, g, win, nu, None, params.m_max, None, None)
            sm = smoothness(prof, x, g.h, params)
            if worst is None or (not sm.smooth and worst.smooth) or \
                    (sm.smooth == worst.smooth and sm.amplitude > worst.amplitude):
                worst = sm
        out.append((float(a), worst))
    return out


def estimate_wf_pm(field: SampledField, base_points, params: Optional[RadonParams] = None,
                   threads: Optional[int] = None) -> SampledSet:
    """Sign-symmetric wavefront estimate from Radon smoothness.

    Every non-smooth direction ``nu`` at ``x`` yields both ``(x, nu)`` and
    ``(x, -nu)``; the score is ``min(1, ratio / 2^m)``.
    """
    g = field.grid
    if g.dim != 2:
        raise ParameterError("Radon estimation needs a 2D field")
    params = (params or RadonParams()).resolve(g)
    pts = np.atleast_2d(np.asarray(base_points, dtype=float)).reshape(-1, 2)
    for x in pts:
        if not params.window(x).inside(g):
            raise WindowClipped(f"base point {tuple(x)} is closer than r2={params.r2:.4g} "
                                f"to the grid boundary")

    def work(x):
        rows = []
        for a, sm in classify_point(field, x, params):
            if sm.smooth:
                continue
            nu = np.array([math.cos(a), math.sin(a)])
            score = min(1.0, sm.ratio / 2 ** params.m_max)
            rows.append((x, nu, score, sm))
            rows.append((x, -nu, score, sm))
        return rows

    nthreads = threads or worker_count()
    if nthreads > 1 and len(pts) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            chunks = list(ex.map(work, pts))
    else:
        chunks = [work(x) for x in pts]
    rows = [r for c in chunks for r in c]
    rows.sort(key=lambda r: (tuple(r[0]), math.atan2(r[1][1], r[1][0]) % (2 * math.pi)))
    if rows:
        out = SampledSet(2, [r[0] for r in rows], [r[1] for r in rows],
                         [r[2] for r in rows], tag="radon")
    else:
        out = SampledSet.empty(2, "radon")
    out.extra["ratio"] = [r[3].ratio for r in rows]
    out.extra["amplitude"] = [r[3].amplitude for r in rows]
    out.extra["locus"] = [r[3].locus for r in rows]
    out.extra["params"] = params.as_dict()
    return out


def sign_symmetrize(s: SampledSet) -> SampledSet:
    """``{(x, k)} union {(x, -k)}`` with duplicates removed, canonical order."""
    if len(s) == 0:
        return SampledSet.empty(s.dim, s.tag)
    pts = np.concatenate([s.points, s.points])
    dirs = np.concatenate([s.directions, -s.directions])
    scores = np.concatenate([s.scores, s.scores])
    key = np.round(np.concatenate([pts, dirs], axis=1), 9)
    _, idx = np.unique(key, axis=0, return_index=True)
    idx = np.sort(idx)
    order = sorted(idx, key=lambda i: (tuple(pts[i]), math.atan2(dirs[i][-1], dirs[i][0])
                                       % (2 * math.pi)))
    return SampledSet(s.dim, pts[order], dirs[order], scores[order], tag=s.tag)
