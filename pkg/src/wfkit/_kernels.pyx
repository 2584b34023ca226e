# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, floor, fmod, M_PI

cnp.import_array()


def cap_max(mag, radius, angle, dir_angles, double cap, lo, hi):
    cdef double[::1] m = np.ascontiguousarray(mag, dtype=np.float64).ravel()
    cdef double[::1] r = np.ascontiguousarray(radius, dtype=np.float64).ravel()
    cdef double[::1] a = np.ascontiguousarray(angle, dtype=np.float64).ravel()
    cdef double[::1] da = np.ascontiguousarray(dir_angles, dtype=np.float64)
    cdef double[::1] rl = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[::1] rh = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t nd = da.shape[0], nr = rl.shape[0], npts = m.shape[0]
    out_arr = np.zeros((nd, nr))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, d, j
    cdef double diff, ri, mi, twopi = 2.0 * M_PI
    cdef bint any_r
    for i in range(npts):
        ri = r[i]
        any_r = False
        for j in range(nr):
            if ri >= rl[j] and ri < rh[j]:
                any_r = True
                break
        if not any_r:
            continue
        mi = m[i]
        for d in range(nd):
            diff = fmod(a[i] - da[d] + M_PI, twopi)
            if diff < 0:
                diff += twopi
            diff = fabs(diff - M_PI)
            if diff <= cap:
                for j in range(nr):
                    if ri >= rl[j] and ri < rh[j] and mi > out[d, j]:
                        out[d, j] = mi
    return out_arr


def line_integrals(img, double x0, double y0, double h, double nux, double nuy,
                   offsets, double tmin, double tmax, double dt):
    cdef double[:, ::1] im = np.ascontiguousarray(img, dtype=np.float64)
    cdef double[::1] off = np.ascontiguousarray(offsets, dtype=np.float64)
    cdef Py_ssize_t n0 = im.shape[0], n1 = im.shape[1], no = off.shape[0]
    cdef Py_ssize_t nt = <Py_ssize_t>floor((tmax - tmin) / dt + 1e-9) + 1
    out_arr = np.zeros(no)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, q, ix, iy
    cdef double s, t, px, py, fx, fy, ax, ay, v, acc, w
    for j in range(no):
        s = off[j]
        acc = 0.0
        for q in range(nt):
            t = tmin + dt * q
            px = s * nux - t * nuy
            py = s * nuy + t * nux
            fx = (px - x0) / h
            fy = (py - y0) / h
            ix = <Py_ssize_t>floor(fx)
            iy = <Py_ssize_t>floor(fy)
            ax = fx - ix
            ay = fy - iy
            v = 0.0
            if ix >= 0 and ix < n0 and iy >= 0 and iy < n1:
                v += (1 - ax) * (1 - ay) * im[ix, iy]
            if ix + 1 >= 0 and ix + 1 < n0 and iy >= 0 and iy < n1:
                v += ax * (1 - ay) * im[ix + 1, iy]
            if ix >= 0 and ix < n0 and iy + 1 >= 0 and iy + 1 < n1:
                v += (1 - ax) * ay * im[ix, iy + 1]
            if ix + 1 >= 0 and ix + 1 < n0 and iy + 1 >= 0 and iy + 1 < n1:
                v += ax * ay * im[ix + 1, iy + 1]
            w = 0.5 * dt if (q == 0 or q == nt - 1) else dt
            acc += w * v
        out[j] = acc
    return out_arr


cdef inline int _sgn(double g, double tol):
    if fabs(g) <= tol:
        return 0
    return 1 if g > 0 else -1


def polygon_crossings(vx, vy, nux, nuy, offsets, double tol):
    cdef double[::1] x = np.ascontiguousarray(vx, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(vy, dtype=np.float64)
    cdef double[::1] ux = np.ascontiguousarray(nux, dtype=np.float64)
    cdef double[::1] uy = np.ascontiguousarray(nuy, dtype=np.float64)
    cdef double[::1] off = np.ascontiguousarray(offsets, dtype=np.float64)
    cdef Py_ssize_t nv = x.shape[0], nd = ux.shape[0], na = off.shape[0]
    counts_arr = np.zeros((nd, na), dtype=np.int64)
    flags_arr = np.zeros((nd, na), dtype=np.uint8)
    cdef long long[:, ::1] counts = counts_arr
    cdef unsigned char[:, ::1] flags = flags_arr
    sg_arr = np.zeros(nv, dtype=np.intc)
    cdef int[::1] sg = sg_arr
    cdef Py_ssize_t d, a, i, j, k, start
    cdef long long c
    cdef unsigned char f
    cdef int found
    for d in range(nd):
        for a in range(na):
            found = 0
            start = 0
            for i in range(nv):
                sg[i] = _sgn(x[i] * ux[d] + y[i] * uy[d] - off[a], tol)
                if sg[i] != 0 and not found:
                    found = 1
                    start = i
            if not found:
                counts[d, a] = 0
                flags[d, a] = 1
                continue
            c = 0
            f = 0
            i = 0
            while i < nv:
                j = i + 1
                if j < nv and sg[(start + j) % nv] == 0:
                    k = j
                    while k < nv and sg[(start + k) % nv] == 0:
                        k += 1
                    f = 1
                    c += 1
                    i = k
                    continue
                if sg[(start + i) % nv] * sg[(start + j) % nv] < 0:
                    c += 1
                i = j
            counts[d, a] = c
            flags[d, a] = f
    return counts_arr, flags_arr
