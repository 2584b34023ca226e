import math
import os

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wfkit import kernels
from wfkit.kernels import pure

try:
    from wfkit import _kernels as compiled
except ImportError:  # pragma: no cover - depends on the build
    compiled = None

BACKENDS = [pure] + ([compiled] if compiled is not None else [])
needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def _cap_inputs(rng, n=32):
    mag = np.abs(rng.normal(size=(n, n)))
    k = np.arange(-n // 2, n // 2)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    rad, ang = np.hypot(kx, ky).astype(float), np.arctan2(ky, kx)
    dirs = 2 * np.pi * np.arange(12) / 12
    lo = np.array([1.0, 3.0, 6.0])
    return mag, rad, ang, dirs, math.pi / 12, lo, 2 * lo


# ----------------------------------------------------------- oracles

@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_cap_max_against_loop(impl):
    args = _cap_inputs(np.random.default_rng(1))
    mag, rad, ang, dirs, cap, lo, hi = args
    out = impl.cap_max(*args)
    ref = np.zeros((len(dirs), len(lo)))
    for d, a in enumerate(dirs):
        for j in range(len(lo)):
            for v, r, t in zip(mag.ravel(), rad.ravel(), ang.ravel()):
                diff = abs((t - a + math.pi) % (2 * math.pi) - math.pi)
                if diff <= cap and lo[j] <= r < hi[j]:
                    ref[d, j] = max(ref[d, j], v)
    assert np.array_equal(out, ref)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_line_integrals_exact_on_linear_image(impl):
    # The bilinear interpolant of a linear function is the function itself, and
    # the trapezoid rule integrates it exactly.
    n, h, x0, y0 = 64, 0.05, -1.6, -1.6
    xs = x0 + h * np.arange(n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    a, b, c = 0.7, -1.3, 2.0
    img = a * X + b * Y + c
    th = 0.4
    nux, nuy = math.cos(th), math.sin(th)
    offs = np.linspace(-0.5, 0.5, 9)
    tmin, tmax, dt = -0.8, 0.8, 0.01
    out = impl.line_integrals(img, x0, y0, h, nux, nuy, offs, tmin, tmax, dt)
    # a x + b y along s nu + t nu_perp: (a nux + b nuy) s + (-a nuy + b nux) t + c.
    ref = ((a * nux + b * nuy) * offs + c) * (tmax - tmin)
    ref += (-a * nuy + b * nux) * 0.5 * (tmax ** 2 - tmin ** 2)
    assert np.allclose(out, ref, rtol=0, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_line_integrals_zero_outside_nodes(impl):
    img = np.ones((8, 8))
    out = impl.line_integrals(img, 0.0, 0.0, 1.0, 1.0, 0.0, np.array([-5.0, 20.0]), -3.0, 3.0, 0.5)
    assert np.all(out == 0)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_polygon_crossings_square(impl):
    vx = np.array([0.0, 1.0, 1.0, 0.0])
    vy = np.array([0.0, 0.0, 1.0, 1.0])
    nux, nuy = np.array([1.0, math.sqrt(0.5)]), np.array([0.0, math.sqrt(0.5)])
    offs = np.array([-0.5, 0.0, 0.5, 1.0, 1.5])
    c, f = impl.polygon_crossings(vx, vy, nux, nuy, offs, 1e-12)
    # x = a: an edge lies on the line at a = 0 and a = 1.
    assert list(c[0]) == [0, 1, 2, 1, 0] and list(f[0]) == [0, 1, 0, 1, 0]
    # (x + y)/sqrt2 = a: single vertices touch at a = 0 and a = sqrt2.
    c2, f2 = impl.polygon_crossings(vx, vy, nux[1:], nuy[1:], np.array([0.0, 0.5, math.sqrt(2)]), 1e-12)
    assert list(c2[0]) == [1, 2, 1] and list(f2[0]) == [1, 0, 1]


# ------------------------------------------------------- backend agreement

@needs_ext
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_compiled_matches_pure_cap_max(seed):
    args = _cap_inputs(np.random.default_rng(seed), 16)
    assert np.array_equal(compiled.cap_max(*args), pure.cap_max(*args))


@needs_ext
@given(seed=st.integers(0, 2 ** 32 - 1), th=st.floats(0, 2 * math.pi))
def test_compiled_matches_pure_line_integrals(seed, th):
    rng = np.random.default_rng(seed)
    img = rng.normal(size=(40, 40))
    args = (img, -1.0, -1.0, 0.05, math.cos(th), math.sin(th), np.linspace(-1.2, 1.2, 25),
            -1.3, 1.3, 0.025)
    assert np.allclose(compiled.line_integrals(*args), pure.line_integrals(*args),
                       rtol=0, atol=1e-12)


@needs_ext
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_compiled_matches_pure_polygon_crossings(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 30))
    t = np.sort(rng.uniform(0, 2 * np.pi, m))
    r = rng.uniform(0.5, 1.5, m)
    vx, vy = r * np.cos(t), r * np.sin(t)
    nd = np.linspace(0, np.pi, 8, endpoint=False)
    args = (vx, vy, np.cos(nd), np.sin(nd), np.linspace(-1.6, 1.6, 33), 1e-9)
    a, b = compiled.polygon_crossings(*args), pure.polygon_crossings(*args)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_backend_selection_is_reported():
    assert kernels.BACKEND in ("cython", "python")
    if compiled is not None and os.environ.get("WFKIT_PURE", "") in ("", "0"):
        assert kernels.BACKEND == "cython"
