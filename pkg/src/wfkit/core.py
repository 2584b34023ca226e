"""Grids, sampled fields, plateau windows and direction sets.

Everything here is immutable after construction and safe to share between
worker threads.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np


def _as_tuple(v, dim: int) -> Tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.size == 1:
        arr = np.repeat(arr, dim)
    if arr.size != dim:
        raise ValueError(f"expected {dim} components, got {arr.size}")
    return tuple(float(a) for a in arr)


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` samples per axis.

    Node ``i`` along an axis sits at ``origin + i * spacing`` with
    ``spacing = extent / n``.
    """

    dim: int
    origin: Tuple[float, ...]
    extent: Tuple[float, ...]
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if not is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if any(e <= 0 for e in self.extent):
            raise ValueError("extent must be positive")

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(e / self.n for e in self.extent)

    @property
    def h(self) -> float:
        """Spacing along the first axis (grids are usually square)."""
        return self.spacing[0]

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def nyquist(self) -> float:
        """Smallest per-axis Nyquist wavenumber pi/h."""
        return min(math.pi / s for s in self.spacing)

    def axis(self, i: int = 0) -> np.ndarray:
        return self.origin[i] + self.spacing[i] * np.arange(self.n)

    def coords(self) -> Tuple[np.ndarray, ...]:
        """Node coordinates as arrays of shape ``self.shape`` (ij indexing)."""
        if self.dim == 1:
            return (self.axis(0),)
        return tuple(np.meshgrid(self.axis(0), self.axis(1), indexing="ij"))

    def point(self, index) -> np.ndarray:
        idx = np.atleast_1d(np.asarray(index, dtype=float))
        return np.asarray(self.origin) + idx * np.asarray(self.spacing)

    def nearest_index(self, x) -> Tuple[int, ...]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.rint((x - np.asarray(self.origin)) / np.asarray(self.spacing))
        return tuple(int(i) for i in idx)

    def lower(self) -> np.ndarray:
        return np.asarray(self.origin, dtype=float)

    def upper(self) -> np.ndarray:
        """Coordinate of the last node along each axis."""
        return np.asarray(self.origin) + (self.n - 1) * np.asarray(self.spacing)

    def wavenumbers(self, i: int = 0) -> np.ndarray:
        """Angular wavenumbers in FFT order, ``2*pi*fftfreq(n, h)``."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.spacing[i])


def make_grid(dim: int, origin, extent, n: int) -> Grid:
    """Build a :class:`Grid`; ``origin`` and ``extent`` may be scalars."""
    return Grid(dim=int(dim), origin=_as_tuple(origin, dim),
                extent=_as_tuple(extent, dim), n=int(n))


def centered_grid(dim: int, extent: float, n: int) -> Grid:
    """Grid covering ``[-extent/2, extent/2)`` along every axis."""
    return make_grid(dim, -extent / 2.0, extent, n)


@dataclass(frozen=True)
class SampledField:
    """Complex node values on a grid.

    ``support_hint`` is an optional box ``(lo, hi)`` that contains every
    node where the field is nonzero.
    """

    grid: Grid
    values: np.ndarray
    support_hint: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.support_hint is not None:
            lo, hi = (tuple(float(v) for v in np.atleast_1d(b)) for b in self.support_hint)
            object.__setattr__(self, "support_hint", (lo, hi))

    def with_values(self, values, support_hint=None) -> "SampledField":
        return SampledField(self.grid, values, support_hint)

    def __add__(self, other: "SampledField") -> "SampledField":
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        return SampledField(self.grid, self.values + other.values)

    def scaled(self, c: complex) -> "SampledField":
        return SampledField(self.grid, c * self.values, self.support_hint)

    def nonzero_box(self, rtol: float = 0.0):
        """Bounding box of nodes with ``|value| > rtol * max|value|``."""
        mag = np.abs(self.values)
        mask = mag > rtol * mag.max() if mag.max() > 0 else mag > 0
        if not mask.any():
            return None
        coords = self.grid.coords()
        lo = tuple(float(c[mask].min()) for c in coords)
        hi = tuple(float(c[mask].max()) for c in coords)
        return lo, hi


# ---------------------------------------------------------------- windows

def _psi(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smoothstep(t):
    """C-infinity step: 1 for t <= 0, 0 for t >= 1, symmetric about t = 1/2.

    Built from psi(s) = exp(-1/s) as psi(1-t) / (psi(1-t) + psi(t)).
    """
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    a = _psi(1.0 - t)
    b = _psi(t)
    return a / (a + b)


def plateau_profile(r, r1: float, r2: float):
    """Radial plateau bump: 1 for r <= r1, 0 for r >= r2."""
    return smoothstep((np.asarray(r, dtype=float) - r1) / (r2 - r1))


@dataclass(frozen=True)
class Window:
    """Radial smooth cutoff.

    With ``sigma=None`` this is the plateau bump (exactly 1 on ``|x-c| <= r1``,
    exactly 0 on ``|x-c| >= r2``).  Setting ``sigma`` multiplies the bump by
    a Gaussian ``exp(-|x-c|^2 / (2 sigma^2))``; the result is still smooth,
    compactly supported and equal to 1 at the center, and its spectrum decays
    like a Gaussian, which the decay estimator relies on.
    """

    center: Tuple[float, ...]
    r1: float
    r2: float
    sigma: Optional[float] = None

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(np.asarray(self.center, dtype=float)))
        object.__setattr__(self, "center", c)
        if not (self.r1 > 0 and self.r2 > self.r1):
            raise ValueError("window needs 0 < r1 < r2")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def radial(self, r):
        val = plateau_profile(r, self.r1, self.r2)
        if self.sigma is not None:
            val = val * np.exp(-np.asarray(r, dtype=float) ** 2 / (2.0 * self.sigma ** 2))
        return val

    def on_grid(self, grid: Grid) -> np.ndarray:
        coords = grid.coords()
        r2 = sum((c - x0) ** 2 for c, x0 in zip(coords, self.center))
        return self.radial(np.sqrt(r2))

    def inside(self, grid: Grid) -> bool:
        """True when the support disc lies within the grid's node range."""
        c = np.asarray(self.center)
        return bool(np.all(c - self.r2 >= grid.lower()) and np.all(c + self.r2 <= grid.upper()))

    def moved(self, center) -> "Window":
        return Window(tuple(np.atleast_1d(center)), self.r1, self.r2, self.sigma)


def eval_window(w: Window, x) -> np.ndarray:
    """Evaluate ``w`` at point(s) ``x`` (last axis = coordinates in 2D)."""
    x = np.asarray(x, dtype=float)
    c = np.asarray(w.center)
    if w.dim == 1:
        r = np.abs(x - c[0])
    else:
        r = np.linalg.norm(x - c, axis=-1)
    out = w.radial(r)
    return float(out) if np.ndim(out) == 0 else out


def default_window(grid: Grid, center=None, r1: Optional[float] = None,
                   r2: Optional[float] = None) -> Window:
    """Plateau window with r1 = 8 h and r2 = 2 r1 unless given."""
    h = grid.h
    r1 = 8.0 * h if r1 is None else r1
    r2 = 2.0 * r1 if r2 is None else r2
    if center is None:
        center = (0.0,) * grid.dim
    return Window(tuple(np.atleast_1d(center)), r1, r2)


# ------------------------------------------------------------- directions

@dataclass(frozen=True)
class DirectionSet:
    dim: int
    vectors: np.ndarray
    cap_half_angle: float

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if self.dim == 1:
            v = v.reshape(-1, 1)
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("directions must be unit vectors")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def __len__(self):
        return self.vectors.shape[0]

    def angles(self) -> np.ndarray:
        if self.dim == 1:
            return np.where(self.vectors[:, 0] > 0, 0.0, np.pi)
        return np.arctan2(self.vectors[:, 1], self.vectors[:, 0])


def uniform_directions(dim: int, count: int) -> DirectionSet:
    """Equally spaced unit directions; in 1D always ``{+1, -1}``."""
    if dim == 1:
        return DirectionSet(1, np.array([[1.0], [-1.0]]), np.pi / 2)
    if count < 4:
        raise ValueError("need at least 4 directions")
    a = 2.0 * np.pi * np.arange(count) / count
    v = np.stack([np.cos(a), np.sin(a)], axis=1)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return DirectionSet(2, v, np.pi / count)


def angle_between(a, b) -> np.ndarray:
    """Angle in radians between vectors along the last axis (broadcasting)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    c = np.sum(a * b, axis=-1) / (na * nb)
    return np.arccos(np.clip(c, -1.0, 1.0))


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ValueError("zero vector has no direction")
    return v / n


def worker_count() -> int:
    """Worker cap from ``WFKIT_THREADS`` (default: CPU count, at most 8)."""
    env = os.environ.get("WFKIT_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"WFKIT_THREADS must be an integer, got {env!r}")
        if n < 1:
            raise ValueError("WFKIT_THREADS must be >= 1")
        return n
    return max(1, min(8, os.cpu_count() or 1))
