# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sup |Psi_z| kernel; same algorithm as ``_psi_fallback``."""
from libc.math cimport hypot, sqrt, fabs
from libc.stdlib cimport malloc, free

import numpy as np

cdef double POLE_EPS = 1e-14
cdef double XATOL = 1e-13
cdef double FATOL = 1e-16
cdef int MAXITER = 500


cdef inline double _neg_weight(double x, double y, double sr, double si,
                               double pr, double pi) nogil:
    cdef double r2 = x * x + y * y
    if r2 >= 1.0:
        return 0.0
    cdef double z2r = x * x - y * y
    cdef double z2i = 2.0 * x * y
    cdef double dr = 1.0 - (sr * x - si * y) + (pr * z2r - pi * z2i)
    cdef double di = -(sr * y + si * x) + (pr * z2i + pi * z2r)
    cdef double den = sqrt(dr * dr + di * di)
    if den < POLE_EPS:
        return 0.0
    return -(1.0 - r2) / den


cdef double _nelder_mead(double x0, double y0, double h, double sr, double si,
                         double pr, double pi) nogil:
    cdef double vx[3]
    cdef double vy[3]
    cdef double fv[3]
    cdef double tx, ty, tf, cx, cy, wx, wy, rx, ry, fr, ex, ey, fe, kx, ky, fk
    cdef double spread
    cdef int it, i, j
    vx[0] = x0; vy[0] = y0
    vx[1] = x0 + h; vy[1] = y0
    vx[2] = x0; vy[2] = y0 + h
    for i in range(3):
        fv[i] = _neg_weight(vx[i], vy[i], sr, si, pr, pi)
    for it in range(MAXITER):
        # stable insertion sort of three vertices
        for i in range(1, 3):
            j = i
            while j > 0 and fv[j] < fv[j - 1]:
                tx = vx[j]; vx[j] = vx[j - 1]; vx[j - 1] = tx
                ty = vy[j]; vy[j] = vy[j - 1]; vy[j - 1] = ty
                tf = fv[j]; fv[j] = fv[j - 1]; fv[j - 1] = tf
                j -= 1
        spread = 0.0
        for i in range(1, 3):
            spread = max(spread, fabs(vx[i] - vx[0]))
            spread = max(spread, fabs(vy[i] - vy[0]))
        if spread <= XATOL and max(fabs(fv[1] - fv[0]), fabs(fv[2] - fv[0])) <= FATOL:
            break
        cx = 0.5 * (vx[0] + vx[1])
        cy = 0.5 * (vy[0] + vy[1])
        wx = vx[2]; wy = vy[2]
        rx = cx + (cx - wx); ry = cy + (cy - wy)
        fr = _neg_weight(rx, ry, sr, si, pr, pi)
        if fr < fv[0]:
            ex = cx + 2.0 * (cx - wx); ey = cy + 2.0 * (cy - wy)
            fe = _neg_weight(ex, ey, sr, si, pr, pi)
            if fe < fr:
                vx[2] = ex; vy[2] = ey; fv[2] = fe
            else:
                vx[2] = rx; vy[2] = ry; fv[2] = fr
            continue
        if fr < fv[1]:
            vx[2] = rx; vy[2] = ry; fv[2] = fr
            continue
        if fr < fv[2]:
            kx = cx + 0.5 * (rx - cx); ky = cy + 0.5 * (ry - cy)
            fk = _neg_weight(kx, ky, sr, si, pr, pi)
            if fk <= fr:
                vx[2] = kx; vy[2] = ky; fv[2] = fk
                continue
        else:
            kx = cx + 0.5 * (wx - cx); ky = cy + 0.5 * (wy - cy)
            fk = _neg_weight(kx, ky, sr, si, pr, pi)
            if fk < fv[2]:
                vx[2] = kx; vy[2] = ky; fv[2] = fk
                continue
        for i in range(1, 3):
            vx[i] = vx[0] + 0.5 * (vx[i] - vx[0])
            vy[i] = vy[0] + 0.5 * (vy[i] - vy[0])
            fv[i] = _neg_weight(vx[i], vy[i], sr, si, pr, pi)
    return min(fv[0], min(fv[1], fv[2]))


cdef double _psi_sup(double complex a, double complex s, double complex p,
                     int n_radii, int n_angles, double eps, int n_top,
                     double* gx, double* gy, double* gw, int* top) nogil:
    cdef double amod = hypot(a.real, a.imag)
    if amod == 0.0:
        return 0.0
    cdef double sr = s.real, si = s.imag, pr = p.real, pi = p.imag
    cdef int n = 1 + n_radii * n_angles
    cdef int i, k, j, t, m
    cdef double r, th, best, h, f
    for i in range(n):
        gw[i] = -_neg_weight(gx[i], gy[i], sr, si, pr, pi)
    # stable top-n selection: first index among the maxima of the remainder;
    # weights are >= 0, so chosen cells are retired by setting them to -1
    m = n_top if n_top < n else n
    for t in range(m):
        k = 0
        for i in range(1, n):
            if gw[i] > gw[k]:
                k = i
        top[t] = k
        if t == 0:
            best = gw[k]
        gw[k] = -1.0
    h = 0.5 * (1.0 - eps) / n_radii
    for t in range(m):
        f = -_nelder_mead(gx[top[t]], gy[top[t]], h, sr, si, pr, pi)
        if f > best:
            best = f
    return amod * best


def _make_grid(int n_radii, int n_angles, double eps):
    radii = np.arange(1, n_radii + 1) / n_radii * (1.0 - eps)
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    x = np.concatenate([[0.0], (radii[:, None] * np.cos(theta)[None, :]).ravel()])
    y = np.concatenate([[0.0], (radii[:, None] * np.sin(theta)[None, :]).ravel()])
    return np.ascontiguousarray(x), np.ascontiguousarray(y)


def psi_sup_batch(a, s, p, int n_radii=64, int n_angles=256, double eps=1e-4, int n_top=5):
    cdef double complex[::1] av = np.ascontiguousarray(a, dtype=complex)
    cdef double complex[::1] sv = np.ascontiguousarray(s, dtype=complex)
    cdef double complex[::1] pv = np.ascontiguousarray(p, dtype=complex)
    cdef Py_ssize_t count = av.shape[0], i
    xg, yg = _make_grid(n_radii, n_angles, eps)
    cdef double[::1] gx = xg
    cdef double[::1] gy = yg
    cdef int n = gx.shape[0]
    out = np.empty(count)
    cdef double[::1] ov = out
    cdef double* gw = <double*> malloc(n * sizeof(double))
    cdef int* top = <int*> malloc((n_top if n_top > 0 else 1) * sizeof(int))
    if gw == NULL or top == NULL:
        free(gw); free(top)
        raise MemoryError()
    try:
        with nogil:
            for i in range(count):
                ov[i] = _psi_sup(av[i], sv[i], pv[i], n_radii, n_angles, eps, n_top,
                                 &gx[0], &gy[0], gw, top)
    finally:
        free(gw)
        free(top)
    return out


def psi_sup(a, s, p, int n_radii=64, int n_angles=256, double eps=1e-4, int n_top=5):
    return float(psi_sup_batch([a], [s], [p], n_radii, n_angles, eps, n_top)[0])
