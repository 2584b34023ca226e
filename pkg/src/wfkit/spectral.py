"""Fourier transforms, directional decay profiles and the Fourier-side estimator.

The transform convention is ``F(u)(k) = int dx exp(+i k.x) u(x)`` with inverse
``u(x) = int dk/(2 pi)^n exp(-i k.x) F(u)(k)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from . import kernels
from .conic import SampledSet
from .core import (DirectionSet, Grid, SampledField, Window, make_grid,
                   uniform_directions, worker_count)
from .errors import ParameterError, WindowClipped


# ---------------------------------------------------------------- transforms

@dataclass(frozen=True)
class SpectralField:
    """Samples of the forward transform at ``k_m = 2 pi fftfreq(n, h)``.

    Values are stored in FFT order; ``shifted()`` gives the centered layout.
    """

    source: Grid
    values: np.ndarray
    convention: str = "physicist e^{+ik.x}"

    @property
    def dim(self):
        return self.source.dim

    @property
    def grid(self) -> Grid:
        """Frequency-space grid in centered order (spacing 2 pi / extent)."""
        n = self.source.n
        ext = tuple(2 * math.pi / s for s in self.source.spacing)
        org = tuple(-math.pi / s for s in self.source.spacing)
        return make_grid(self.dim, org, ext, n)

    def k(self, axis: int = 0) -> np.ndarray:
        return self.source.wavenumbers(axis)

    def kmesh(self):
        if self.dim == 1:
            return (self.k(0),)
        return tuple(np.meshgrid(self.k(0), self.k(1), indexing="ij"))

    def shifted(self):
        return np.fft.fftshift(self.values)

    def at(self, index) -> complex:
        return complex(self.values[tuple(np.atleast_1d(index))])


def _origin_phase(grid: Grid, sign: float) -> np.ndarray:
    ks = grid.wavenumbers(0)
    if grid.dim == 1:
        return np.exp(sign * 1j * ks * grid.origin[0])
    k0, k1 = np.meshgrid(ks, grid.wavenumbers(1), indexing="ij")
    return np.exp(sign * 1j * (k0 * grid.origin[0] + k1 * grid.origin[1]))


def dft(field: SampledField) -> SpectralField:
    """Riemann-sum approximation of the forward transform on the FFT lattice."""
    g = field.grid
    scale = float(np.prod(g.spacing)) * g.n ** g.dim
    vals = scale * np.fft.ifftn(field.values) * _origin_phase(g, +1.0)
    return SpectralField(g, vals)


def idft(spec: SpectralField) -> SampledField:
    """Inverse of :func:`dft`."""
    g = spec.source
    scale = 1.0 / float(np.prod([g.n * s for s in g.spacing]))
    vals = scale * np.fft.fftn(spec.values * _origin_phase(g, -1.0))
    return SampledField(g, vals)


def dft_direct(field: SampledField) -> SpectralField:
    """Direct O(N^2) summation of the same transform (reference oracle)."""
    g = field.grid
    vol = float(np.prod(g.spacing))
    if g.dim == 1:
        x = g.axis(0)
        k = g.wavenumbers(0)
        mat = np.exp(1j * np.outer(k, x))
        return SpectralField(g, vol * mat @ field.values)
    x0, x1 = g.axis(0), g.axis(1)
    k0, k1 = g.wavenumbers(0), g.wavenumbers(1)
    e0 = np.exp(1j * np.outer(k0, x0))
    e1 = np.exp(1j * np.outer(k1, x1))
    return SpectralField(g, vol * e0 @ field.values @ e1.T)


def localized_spectrum(field: SampledField, window: Window) -> SpectralField:
    """Transform of ``window * field``; the window must fit inside the grid."""
    if window.dim != field.grid.dim:
        raise ParameterError("window and field dimensions differ")
    if not window.inside(field.grid):
        raise WindowClipped(f"window at {window.center} with r2={window.r2} leaves the grid")
    w = window.on_grid(field.grid)
    return dft(SampledField(field.grid, field.values * w))


# ------------------------------------------------------------- parameters

@dataclass(frozen=True)
class EstimatorParams:
    """Estimator settings.  ``None`` fields are filled by :meth:`resolve`.

    Lengths are physical; wavenumbers are angular.  Window: a Gaussian of
    width ``sigma`` times the plateau bump with radii ``r1 < r2``.  Cone caps
    are ``pi / directions`` wide but never narrower than ``min_cap``: the
    window's spectrum already blurs angles on that scale, so extra
    directions refine the sampling without changing what each cap sees.
    """

    r1: Optional[float] = None
    r2: Optional[float] = None
    sigma: Optional[float] = None
    directions: Optional[int] = None
    k_min: Optional[float] = None
    count: Optional[int] = None
    ratio: Optional[float] = None
    min_cap: Optional[float] = None
    p_thr: float = 4.0
    floor_rel: float = 1e-12
    dominance: float = 0.5
    residual_bound: float = 1.0

    def resolve(self, grid: Grid) -> "EstimatorParams":
        h = grid.h
        nyq = grid.nyquist
        if grid.dim == 1:
            d = dict(sigma=8 * h, r1=36 * h, r2=64 * h, directions=2,
                     k_min=0.04375 * nyq, count=4, ratio=2.0)
        else:
            d = dict(sigma=5 * h, r1=22.5 * h, r2=40 * h, directions=32,
                     k_min=0.35 * nyq, count=3, ratio=math.sqrt(2.0), min_cap=math.pi / 32)
        vals = {k: (getattr(self, k) if getattr(self, k) is not None else v) for k, v in d.items()}
        if self.sigma is None and self.r2 is not None:
            vals["sigma"] = self.r2 / 8.0
        if self.r1 is None and self.r2 is not None:
            vals["r1"] = min(d["r1"] / d["r2"] * self.r2, 0.9 * self.r2)
        out = replace(self, **vals)
        out.validate(grid)
        return out

    def validate(self, grid: Grid):
        if not (self.r1 > 0 and self.r2 > self.r1):
            raise ParameterError("window radii need 0 < r1 < r2")
        if self.sigma is not None and self.sigma <= 0:
            raise ParameterError("sigma must be positive")
        if self.min_cap is not None and not 0 < self.min_cap < math.pi / 2:
            raise ParameterError("min_cap must lie in (0, pi/2)")
        if self.p_thr <= 0:
            raise ParameterError("p_thr must be positive")
        if self.count < 3:
            raise ParameterError("at least 3 radii are needed for a decay fit")
        if self.ratio <= 1:
            raise ParameterError("radius ratio must exceed 1")
        if grid.dim == 2 and self.directions < 4:
            raise ParameterError("need at least 4 directions")
        kfloor = 4 * 2 * math.pi / max(grid.extent)
        if self.k_min < kfloor * (1 - 1e-12):
            raise ParameterError(f"k_min={self.k_min:.4g} is below 4*(2pi/extent)={kfloor:.4g}")
        if self.radii()[-1] > 0.8 * grid.nyquist * (1 + 1e-12):
            raise ParameterError("largest radius exceeds 0.8 * Nyquist")
        if self.floor_rel < 0 or not 0 <= self.dominance < 1:
            raise ParameterError("floor_rel must be >= 0 and dominance in [0, 1)")

    def radii(self) -> np.ndarray:
        return self.k_min * self.ratio ** np.arange(self.count)

    def window(self, center) -> Window:
        return Window(tuple(np.atleast_1d(np.asarray(center, dtype=float))), self.r1,
                      self.r2, self.sigma)

    def direction_set(self, dim: int) -> DirectionSet:
        d = uniform_directions(dim, self.directions)
        if dim == 1 or self.min_cap is None or d.cap_half_angle >= self.min_cap:
            return d
        return DirectionSet(dim, d.vectors, self.min_cap)

    def as_dict(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v)
                for k, v in self.__dict__.items()}


# ---------------------------------------------------------- decay profiles

@dataclass(frozen=True)
class DecayProfile:
    direction: np.ndarray
    cap_half_angle: float
    radii: np.ndarray
    amplitudes: np.ndarray
    fitted_exponent: float
    fit_residual: float
    available: bool
    floor: float = 0.0


class Classification(NamedTuple):
    label: str
    low_confidence: bool = False


FAST = "FAST"
SLOW = "SLOW"


def annulus_bounds(radii, nyquist):
    radii = np.asarray(radii, dtype=float)
    lo = radii / math.sqrt(2.0)
    hi = np.minimum(radii * math.sqrt(2.0), nyquist)
    return lo, hi


def _polar(spec: SpectralField):
    if spec.dim == 1:
        k = spec.k(0)
        return np.abs(k), np.where(k >= 0, 0.0, np.pi)
    kx, ky = spec.kmesh()
    return np.hypot(kx, ky), np.arctan2(ky, kx)


def _angle_of(direction) -> float:
    d = np.atleast_1d(np.asarray(direction, dtype=float))
    if len(d) == 1:
        return 0.0 if d[0] > 0 else math.pi
    return math.atan2(d[1], d[0])


def cap_amplitudes(spec: SpectralField, dir_angles, cap, radii) -> np.ndarray:
    """``(len(dir_angles), len(radii))`` maxima of ``|spec|`` over cap annuli."""
    r, a = _polar(spec)
    lo, hi = annulus_bounds(radii, spec.source.nyquist)
    if spec.dim == 1:
        cap = min(cap, math.pi / 2 - 1e-9)
    return kernels.cap_max(np.abs(spec.values), r, a, np.asarray(dir_angles, dtype=float),
                           float(cap), lo, hi)


def fit_decay(radii, amplitudes, floor):
    """Least-squares slope of log amplitude against log radius.

    Returns ``(exponent, residual, available)``.  When the amplitude at the
    largest radius is at or below ``floor`` the spectrum has decayed into the
    noise floor and the exponent is ``-inf``.
    """
    radii = np.asarray(radii, dtype=float)
    amps = np.asarray(amplitudes, dtype=float)
    usable = amps > floor
    if not usable[-1]:
        return -math.inf, 0.0, True
    if usable.sum() < 3:
        return math.nan, math.nan, False
    lx = np.log(radii[usable])
    ly = np.log(amps[usable])
    coef = np.polyfit(lx, ly, 1)
    res = ly - np.polyval(coef, lx)
    return float(coef[0]), float(np.sqrt(np.mean(res ** 2))), True


def decay_profile(spec: SpectralField, direction, cap_half_angle: float, radii,
                  floor: Optional[float] = None) -> DecayProfile:
    """Cone-cap decay profile of ``spec`` around ``direction``."""
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise ParameterError("radii must be strictly increasing")
    if radii[-1] > spec.source.nyquist:
        raise ParameterError("radii exceed the Nyquist wavenumber")
    amps = cap_amplitudes(spec, [_angle_of(direction)], cap_half_angle, radii)[0]
    if floor is None:
        floor = 1e-12 * float(np.abs(spec.values).max())
    p, res, ok = fit_decay(radii, amps, floor)
    return DecayProfile(np.atleast_1d(np.asarray(direction, dtype=float)), float(cap_half_angle),
                        radii, amps, p, res, ok, float(floor))


def tail_slope(p: DecayProfile) -> float:
    """Log-log slope between the two largest radii (``-inf`` past the floor)."""
    a0, a1 = p.amplitudes[-2], p.amplitudes[-1]
    if a1 <= p.floor:
        return -math.inf
    if a0 <= p.floor:
        return math.inf
    return float(math.log(a1 / a0) / math.log(p.radii[-1] / p.radii[-2]))


def classify_direction(p: DecayProfile, params: EstimatorParams) -> Classification:
    """FAST when the fitted exponent is at most ``-p_thr`` with a trusted fit.

    The fit is trusted when its residual is within ``residual_bound`` or when
    the slope between the two largest radii is itself at most ``-p_thr``, so
    a bent log-log profile counts as fast only if its tail agrees.
    """
    if not p.available:
        return Classification(SLOW, True)
    if p.fitted_exponent <= -params.p_thr and (
            p.fit_residual <= params.residual_bound or tail_slope(p) <= -params.p_thr):
        return Classification(FAST, False)
    return Classification(SLOW, False)


def _score(p: DecayProfile, params: EstimatorParams) -> float:
    if not p.available:
        return 1.0
    return float(np.clip((p.fitted_exponent + params.p_thr) / params.p_thr, 0.0, 1.0))


def _profiles_at(spec: SpectralField, dirs: DirectionSet, params: EstimatorParams):
    radii = params.radii()
    amps = cap_amplitudes(spec, dirs.angles(), dirs.cap_half_angle, radii)
    peak = float(np.abs(spec.values).max())
    floor = max(params.floor_rel * peak, params.dominance * float(amps[:, -1].max()))
    out = []
    for i, v in enumerate(dirs.vectors):
        p, res, ok = fit_decay(radii, amps[i], floor)
        out.append(DecayProfile(v, dirs.cap_half_angle, radii, amps[i], p, res, ok, floor))
    return out


def _check_base_points(field: SampledField, pts, params: EstimatorParams):
    g = field.grid
    for x in pts:
        w = params.window(x)
        if not w.inside(g):
            raise WindowClipped(f"base point {tuple(x)} is closer than r2={params.r2:.4g} "
                                f"to the grid boundary")


def profile_point(field: SampledField, x, params: EstimatorParams):
    """Decay profiles for every direction at base point ``x``."""
    params = params if params.directions is not None else params.resolve(field.grid)
    spec = localized_spectrum(field, params.window(x))
    return _profiles_at(spec, params.direction_set(field.grid.dim), params)


def estimate_wf(field: SampledField, base_points, params: Optional[EstimatorParams] = None,
                threads: Optional[int] = None) -> SampledSet:
    """Sampled wavefront estimate: every SLOW (point, direction) pair.

    Each row carries ``score`` (normalized exponent deficit in [0, 1]); the
    fitted exponents and low-confidence flags are in ``extra``.
    """
    g = field.grid
    params = (params or EstimatorParams()).resolve(g)
    pts = np.atleast_2d(np.asarray(base_points, dtype=float)).reshape(-1, g.dim)
    _check_base_points(field, pts, params)
    dirs = params.direction_set(g.dim)

    def work(x):
        spec = localized_spectrum(field, params.window(x))
        rows = []
        for prof in _profiles_at(spec, dirs, params):
            c = classify_direction(prof, params)
            if c.label == SLOW:
                rows.append((x, prof.direction, _score(prof, params), prof.fitted_exponent,
                             c.low_confidence))
        return rows

    nthreads = threads or worker_count()
    if nthreads > 1 and len(pts) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            chunks = list(ex.map(work, pts))
    else:
        chunks = [work(x) for x in pts]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (tuple(r[0]), _angle_of(r[1]) % (2 * math.pi)))
    if not rows:
        out = SampledSet.empty(g.dim, "fourier")
    else:
        out = SampledSet(g.dim, [r[0] for r in rows], [r[1] for r in rows],
                         [r[2] for r in rows], tag="fourier")
    out.extra["exponent"] = [float(r[3]) for r in rows]
    out.extra["low_confidence"] = [bool(r[4]) for r in rows]
    out.extra["params"] = params.as_dict()
    return out


# ---------------------------------------------------------- frequency set

@dataclass(frozen=True)
class FrequencySet:
    directions: DirectionSet
    in_sigma_cap: np.ndarray
    in_sigma_ray: np.ndarray
    exponents_cap: np.ndarray
    exponents_ray: np.ndarray

    @property
    def agree(self) -> bool:
        return bool(np.array_equal(self.in_sigma_cap, self.in_sigma_ray))


def _require_compact(field: SampledField):
    if field.support_hint is None:
        raise ParameterError("frequency_set needs a field with a support hint")
    g = field.grid
    lo, hi = (np.asarray(b) for b in field.support_hint)
    if np.any(lo <= g.lower() + g.h) or np.any(hi >= g.upper() - g.h):
        raise ParameterError("support hint touches the grid boundary (not compact)")


def frequency_set(field: SampledField, params: Optional[EstimatorParams] = None,
                  ray_samples: int = 5) -> FrequencySet:
    """Directions in which the (compactly supported) field is not fast decaying.

    Variant "cap": one decay fit on cone-cap maxima per direction.
    Variant "ray": separate fits along ``ray_samples`` rays spread across the
    cap on a denser radius ladder; a direction is in the set unless every
    ray decays fast.
    """
    _require_compact(field)
    g = field.grid
    params = (params or EstimatorParams()).resolve(g)
    dirs = params.direction_set(g.dim)
    spec = dft(field)
    peak = float(np.abs(spec.values).max())

    cap_prof = _profiles_at(spec, dirs, params)
    exp_cap = np.array([p.fitted_exponent if p.available else np.nan for p in cap_prof])
    in_cap = np.array([classify_direction(p, params).label == SLOW for p in cap_prof])

    radii = params.radii()
    dense = np.exp(np.linspace(np.log(radii[0]), np.log(radii[-1]), 2 * len(radii) - 1))
    angles = dirs.angles()
    if g.dim == 1:
        offs = np.zeros(1)
        sub_cap = dirs.cap_half_angle
    else:
        offs = np.linspace(-dirs.cap_half_angle, dirs.cap_half_angle, ray_samples)
        sub_cap = dirs.cap_half_angle / 4
    ray_angles = (angles[:, None] + offs[None, :]).ravel()
    amps = cap_amplitudes(spec, ray_angles, sub_cap, dense)
    floor = max(params.floor_rel * peak, params.dominance * float(amps[:, -1].max()))
    worst = np.full(len(angles), -np.inf)
    for i in range(len(angles)):
        for j in range(len(offs)):
            a = amps[i * len(offs) + j]
            p, res, ok = fit_decay(dense, a, floor)
            prof = DecayProfile(dirs.vectors[i], sub_cap, dense, a, p, res, ok, floor)
            if classify_direction(prof, params).label == SLOW and p <= -params.p_thr:
                p = np.inf
            worst[i] = max(worst[i], p)
    in_ray = worst > -params.p_thr
    return FrequencySet(dirs, in_cap, in_ray, exp_cap, worst)
