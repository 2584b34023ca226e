"""Pure numpy implementations of the hot loops.

These mirror ``_kernels.pyx`` exactly and are used whenever the compiled
extension is unavailable (or ``WFKIT_PURE=1``).
"""

import numpy as np


def cap_max(mag, radius, angle, dir_angles, cap, lo, hi):
    """Max of ``mag`` over cone-cap annuli.

    ``out[d, j]`` is the maximum of ``mag`` over nodes whose angle lies within
    ``cap`` of ``dir_angles[d]`` and whose radius lies in ``[lo[j], hi[j])``.
    Empty cells give 0.
    """
    mag = np.ascontiguousarray(mag, dtype=np.float64).ravel()
    radius = np.ascontiguousarray(radius, dtype=np.float64).ravel()
    angle = np.ascontiguousarray(angle, dtype=np.float64).ravel()
    nd, nr = len(dir_angles), len(lo)
    out = np.zeros((nd, nr))
    rmasks = [(radius >= lo[j]) & (radius < hi[j]) for j in range(nr)]
    for d in range(nd):
        diff = np.abs(np.mod(angle - dir_angles[d] + np.pi, 2 * np.pi) - np.pi)
        amask = diff <= cap
        for j in range(nr):
            m = amask & rmasks[j]
            if m.any():
                out[d, j] = mag[m].max()
    return out


def line_integrals(img, x0, y0, h, nux, nuy, offsets, tmin, tmax, dt):
    """Trapezoid integrals of the bilinear interpolant of ``img`` along lines.

    Line ``j`` is ``{offsets[j] * nu + t * nu_perp : tmin <= t <= tmax}`` with
    ``nu_perp = (-nuy, nux)``.  ``img[i, k]`` is the value at
    ``(x0 + i h, y0 + k h)``; the interpolant is zero outside the node range.
    """
    img = np.ascontiguousarray(img, dtype=np.float64)
    n0, n1 = img.shape
    offsets = np.asarray(offsets, dtype=np.float64)
    nt = int(np.floor((tmax - tmin) / dt + 1e-9)) + 1
    t = tmin + dt * np.arange(nt)
    w = np.full(nt, dt)
    w[0] = w[-1] = 0.5 * dt
    px = offsets[:, None] * nux - t[None, :] * nuy
    py = offsets[:, None] * nuy + t[None, :] * nux
    fx = (px - x0) / h
    fy = (py - y0) / h
    ix = np.floor(fx).astype(np.int64)
    iy = np.floor(fy).astype(np.int64)
    ax = fx - ix
    ay = fy - iy
    vals = np.zeros_like(fx)
    for di, wx in ((0, 1 - ax), (1, ax)):
        for dj, wy in ((0, 1 - ay), (1, ay)):
            ii = ix + di
            jj = iy + dj
            ok = (ii >= 0) & (ii < n0) & (jj >= 0) & (jj < n1)
            v = np.zeros_like(fx)
            v[ok] = img[ii[ok], jj[ok]]
            vals += wx * wy * v
    return vals @ w


def _count_cyclic(g, tol):
    """Crossings of a closed polygon with a line from signed vertex offsets."""
    s = np.where(np.abs(g) <= tol, 0, np.sign(g)).astype(int)
    n = len(s)
    nz = np.flatnonzero(s)
    if len(nz) == 0:
        return 0, 1
    start = nz[0]
    s = np.roll(s, -start)
    count = 0
    flag = 0
    i = 0
    while i < n:
        j = i + 1
        if j < n and s[j] == 0:
            k = j
            while k < n and s[k] == 0:
                k += 1
            flag = 1
            count += 1
            i = k
            continue
        if s[i] * s[j % n] < 0:
            count += 1
        i = j
    return count, flag


def polygon_crossings(vx, vy, nux, nuy, offsets, tol):
    """Counts and tangency flags for every (direction, offset) pair.

    A run of vertices lying on the line counts as one intersection (either a
    transversal pass through a vertex or a touch) and raises the flag.
    """
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    nd, na = len(nux), len(offsets)
    counts = np.zeros((nd, na), dtype=np.int64)
    flags = np.zeros((nd, na), dtype=np.uint8)
    for d in range(nd):
        proj = vx * nux[d] + vy * nuy[d]
        for a in range(na):
            c, f = _count_cyclic(proj - offsets[a], tol)
            counts[d, a] = c
            flags[d, a] = f
    return counts, flags
