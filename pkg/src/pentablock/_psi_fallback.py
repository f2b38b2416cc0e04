"""Pure-Python implementation of the sup |Psi_z| kernel.

Mirrors ``_psi_kernel.pyx`` operation for operation so the two backends agree
to rounding.  The grid pass is vectorized with numpy; the Nelder-Mead polish
runs in plain Python.
"""
import math

import numpy as np

POLE_EPS = 1e-14
XATOL = 1e-13
FATOL = 1e-16
MAXITER = 500


def _neg_weight(x, y, sr, si, pr, pi):
    # -(1 - |z|^2) / |1 - s z + p z^2|; 0 outside the disc or at a pole
    r2 = x * x + y * y
    if r2 >= 1.0:
        return 0.0
    z2r = x * x - y * y
    z2i = 2.0 * x * y
    dr = 1.0 - (sr * x - si * y) + (pr * z2r - pi * z2i)
    di = -(sr * y + si * x) + (pr * z2i + pi * z2r)
    den = math.sqrt(dr * dr + di * di)
    if den < POLE_EPS:
        return 0.0
    return -(1.0 - r2) / den


def _nelder_mead(x0, y0, h, sr, si, pr, pi):
    xs = [[x0, y0], [x0 + h, y0], [x0, y0 + h]]
    fs = [_neg_weight(v[0], v[1], sr, si, pr, pi) for v in xs]
    for _ in range(MAXITER):
        order = sorted(range(3), key=lambda i: fs[i])
        xs = [xs[i] for i in order]
        fs = [fs[i] for i in order]
        spread_x = max(abs(xs[i][j] - xs[0][j]) for i in (1, 2) for j in (0, 1))
        if spread_x <= XATOL and max(abs(fs[1] - fs[0]), abs(fs[2] - fs[0])) <= FATOL:
            break
        cx = 0.5 * (xs[0][0] + xs[1][0])
        cy = 0.5 * (xs[0][1] + xs[1][1])
        wx, wy = xs[2]
        rx, ry = cx + (cx - wx), cy + (cy - wy)
        fr = _neg_weight(rx, ry, sr, si, pr, pi)
        if fr < fs[0]:
            ex, ey = cx + 2.0 * (cx - wx), cy + 2.0 * (cy - wy)
            fe = _neg_weight(ex, ey, sr, si, pr, pi)
            if fe < fr:
                xs[2], fs[2] = [ex, ey], fe
            else:
                xs[2], fs[2] = [rx, ry], fr
            continue
        if fr < fs[1]:
            xs[2], fs[2] = [rx, ry], fr
            continue
        if fr < fs[2]:
            kx, ky = cx + 0.5 * (rx - cx), cy + 0.5 * (ry - cy)
            fk = _neg_weight(kx, ky, sr, si, pr, pi)
            if fk <= fr:
                xs[2], fs[2] = [kx, ky], fk
                continue
        else:
            kx, ky = cx + 0.5 * (wx - cx), cy + 0.5 * (wy - cy)
            fk = _neg_weight(kx, ky, sr, si, pr, pi)
            if fk < fs[2]:
                xs[2], fs[2] = [kx, ky], fk
                continue
        for i in (1, 2):
            xs[i] = [xs[0][0] + 0.5 * (xs[i][0] - xs[0][0]), xs[0][1] + 0.5 * (xs[i][1] - xs[0][1])]
            fs[i] = _neg_weight(xs[i][0], xs[i][1], sr, si, pr, pi)
    return min(fs)


def _grid(n_radii, n_angles, eps):
    radii = np.arange(1, n_radii + 1) / n_radii * (1.0 - eps)
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    x = np.concatenate([[0.0], (radii[:, None] * np.cos(theta)[None, :]).ravel()])
    y = np.concatenate([[0.0], (radii[:, None] * np.sin(theta)[None, :]).ravel()])
    return x, y


def psi_sup(a, s, p, n_radii=64, n_angles=256, eps=1e-4, n_top=5):
    """Refined lower bound of ``sup_{|z|<1} |a| (1-|z|^2) / |1 - s z + p z^2|``."""
    amod = abs(a)
    if amod == 0.0:
        return 0.0
    sr, si, pr, pi = s.real, s.imag, p.real, p.imag
    x, y = _grid(n_radii, n_angles, eps)
    r2 = x * x + y * y
    z2r = x * x - y * y
    z2i = 2.0 * x * y
    dr = 1.0 - (sr * x - si * y) + (pr * z2r - pi * z2i)
    di = -(sr * y + si * x) + (pr * z2i + pi * z2r)
    den = np.sqrt(dr * dr + di * di)
    w = np.where(den < POLE_EPS, 0.0, (1.0 - r2) / np.where(den < POLE_EPS, 1.0, den))
    top = np.argsort(-w, kind="stable")[:n_top]
    best = float(w[top[0]])
    h = 0.5 * (1.0 - eps) / n_radii
    for idx in top:
        f = _nelder_mead(float(x[idx]), float(y[idx]), h, sr, si, pr, pi)
        best = max(best, -f)
    return amod * best


def psi_sup_batch(a, s, p, n_radii=64, n_angles=256, eps=1e-4, n_top=5):
    a = np.asarray(a, dtype=complex)
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    out = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        out[i] = psi_sup(complex(a[i]), complex(s[i]), complex(p[i]), n_radii, n_angles, eps, n_top)
    return out
