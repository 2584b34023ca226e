"""Compiled vs numpy kernels: agreement check and timings.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Exits 1 if
the two backends disagree beyond round-off or if the extension is missing.
"""

import argparse
import math
import sys
import time

import numpy as np

from wfkit import catalog, kernels
from wfkit.kernels import pure


def _time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    """(name, compiled call, numpy call, comparison) for each kernel."""
    d = catalog.from_id("disk:r=1.0")
    g = catalog.default_grid(d)
    mag = np.abs(rng.normal(size=g.shape))
    kx, ky = np.meshgrid(g.wavenumbers(0), g.wavenumbers(1), indexing="ij")
    rad, ang = np.hypot(kx, ky), np.arctan2(ky, kx)
    dirs = 2 * np.pi * np.arange(32) / 32
    radii = 0.35 * g.nyquist * math.sqrt(2) ** np.arange(3)
    lo, hi = radii / math.sqrt(2), np.minimum(radii * math.sqrt(2), g.nyquist)
    cap_args = (mag, rad, ang, dirs, math.pi / 32, lo, hi)

    img = catalog.sample(d, g).values.real.copy()
    offs = np.arange(-0.5, 0.5, g.h / 2)
    nu = (math.cos(0.3), math.sin(0.3))
    line_args = (img, g.origin[0], g.origin[1], g.h, nu[0], nu[1], offs, -0.5, 0.5, g.h)

    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    vx, vy = np.cos(t) * (1 + 0.2 * np.cos(5 * t)), np.sin(t) * (1 + 0.2 * np.cos(5 * t))
    nd = np.linspace(0, np.pi, 64, endpoint=False)
    poly_args = (vx, vy, np.cos(nd), np.sin(nd), np.linspace(-1.3, 1.3, 401), 1e-9)

    def same_float(a, b):
        return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))

    def same_pair(a, b):
        return float(max(np.sum(np.asarray(a[0]) != np.asarray(b[0])),
                         np.sum(np.asarray(a[1]) != np.asarray(b[1]))))

    return [
        ("cap_max", lambda: kernels.cap_max(*cap_args), lambda: pure.cap_max(*cap_args),
         same_float, 0.0),
        ("line_integrals", lambda: kernels.line_integrals(*line_args),
         lambda: pure.line_integrals(*line_args), same_float, 1e-12),
        ("polygon_crossings", lambda: kernels.polygon_crossings(*poly_args),
         lambda: pure.polygon_crossings(*poly_args), same_pair, 0.0),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"backend: {kernels.BACKEND}")
    if kernels.BACKEND != "cython":
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    ok = True
    print(f"{'kernel':<18} {'compiled [ms]':>14} {'numpy [ms]':>12} {'speedup':>8} {'max diff':>10}")
    for name, fast, slow, compare, tol in cases(rng):
        tf, a = _time(fast, args.repeat)
        ts, b = _time(slow, args.repeat)
        diff = compare(a, b)
        ok &= diff <= tol
        print(f"{name:<18} {1e3 * tf:>14.2f} {1e3 * ts:>12.2f} {ts / tf:>8.1f} {diff:>10.2e}")
    print("agreement:", "ok" if ok else "FAILED")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
