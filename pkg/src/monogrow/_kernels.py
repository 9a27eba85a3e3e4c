"""Hot numeric kernels: log-scaled 2x2 transfer-matrix chains.

Every propagation in the package reduces to a product of piece factors

    F_p = exp(dt_p * (k_p J - z d_p K_p)) * exp(-k_p dt_p J),

where K_p = xi xi^T J for the unit direction xi = (cos a_p, sin a_p), k_p is
the angle slope on the piece and d_p the (constant) trace density.  Pieces
with k_p = 0 reduce to the linear factor I - z (d_p dt_p) K_p, so Hamburger
segments, frozen-midpoint cells and exact linear-angle ramps all go through
the same chain.

The matrix in the exponential is traceless, hence

    exp(A) = cosh(mu) I + sinh(mu)/mu * A,    mu^2 = a11^2 + a12 a21,

and cosh/sinh are evaluated with an explicit exp(-|Re mu|) scaling that is
absorbed into the running log-scale, so the chain never overflows even when
||W|| passes 1e300.  The unit part is renormalized by its spectral norm
whenever the max-entry magnitude leaves [1e-2, 1e2].

Two implementations are kept in sync: a numba @njit scalar loop (the fast
path) and a vectorized numpy loop over the z batch (the fallback).  Set
MONOGROW_DISABLE_NUMBA=1 to force the numpy path; benchmarks/bench_kernels.py
compares the two.
"""

from __future__ import annotations

import cmath
import math
import os

import numpy as np

RENORM_LO = 1e-2
RENORM_HI = 1e2
_SMALL_MU = 1e-4


def _numba_requested() -> bool:
    flag = os.environ.get("MONOGROW_DISABLE_NUMBA", "").strip().lower()
    return flag not in {"1", "true", "yes", "on"}


def _transfer_chain_scalar(dt, slope, dens, cos0, sin0, zs):
    n = zs.shape[0]
    units = np.empty((n, 4), np.complex128)
    logs = np.empty(n, np.float64)
    for iz in range(n):
        z = zs[iz]
        w11 = 1.0 + 0.0j
        w12 = 0.0 + 0.0j
        w21 = 0.0 + 0.0j
        w22 = 1.0 + 0.0j
        ls = 0.0
        for p in range(dt.shape[0]):
            h = dt[p]
            k = slope[p]
            d = dens[p]
            c0 = cos0[p]
            s0 = sin0[p]
            alpha = 0.0
            if k == 0.0:
                # linear factor I - z (h d) xi xi^T J: the exponential is exact
                zm = z * (h * d)
                f11 = 1.0 - zm * (c0 * s0)
                f12 = zm * (c0 * c0)
                f21 = -zm * (s0 * s0)
                f22 = 1.0 + zm * (c0 * s0)
            else:
                zd = z * d
                a11 = -h * zd * (c0 * s0)
                a12 = h * (-k + zd * c0 * c0)
                a21 = h * (k - zd * s0 * s0)
                mu2 = a11 * a11 + a12 * a21
                mu = cmath.sqrt(mu2)
                if abs(mu) < _SMALL_MU:
                    ch = 1.0 + mu2 * (0.5 + mu2 / 24.0)
                    sc = 1.0 + mu2 * (1.0 / 6.0 + mu2 / 120.0)
                else:
                    alpha = abs(mu.real)
                    e1 = cmath.exp(mu - alpha)
                    e2 = cmath.exp(-mu - alpha)
                    ch = 0.5 * (e1 + e2)
                    sc = 0.5 * (e1 - e2) / mu
                f11 = ch + sc * a11
                f12 = sc * a12
                f21 = sc * a21
                f22 = ch - sc * a11
                dphi = k * h
                cr = math.cos(dphi)
                sr = math.sin(dphi)
                g11 = f11 * cr - f12 * sr
                g12 = f11 * sr + f12 * cr
                g21 = f21 * cr - f22 * sr
                g22 = f21 * sr + f22 * cr
                f11, f12, f21, f22 = g11, g12, g21, g22
            n11 = w11 * f11 + w12 * f21
            n12 = w11 * f12 + w12 * f22
            n21 = w21 * f11 + w22 * f21
            n22 = w21 * f12 + w22 * f22
            w11, w12, w21, w22 = n11, n12, n21, n22
            ls += alpha
            m = max(abs(w11), abs(w12), abs(w21), abs(w22))
            if m > RENORM_HI or m < RENORM_LO:
                s = _spectral_norm_scalar(w11, w12, w21, w22)
                w11 /= s
                w12 /= s
                w21 /= s
                w22 /= s
                ls += math.log(s)
        s = _spectral_norm_scalar(w11, w12, w21, w22)
        units[iz, 0] = w11 / s
        units[iz, 1] = w12 / s
        units[iz, 2] = w21 / s
        units[iz, 3] = w22 / s
        logs[iz] = ls + math.log(s)
    return units, logs


def _spectral_norm_scalar(w11, w12, w21, w22):
    t = (
        w11.real * w11.real + w11.imag * w11.imag
        + w12.real * w12.real + w12.imag * w12.imag
        + w21.real * w21.real + w21.imag * w21.imag
        + w22.real * w22.real + w22.imag * w22.imag
    )
    det = w11 * w22 - w12 * w21
    dd = det.real * det.real + det.imag * det.imag
    disc = t * t - 4.0 * dd
    if disc < 0.0:
        disc = 0.0
    return math.sqrt(0.5 * (t + math.sqrt(disc)))


def _spectral_norm_batch(w11, w12, w21, w22):
    t = (
        np.abs(w11) ** 2 + np.abs(w12) ** 2 + np.abs(w21) ** 2 + np.abs(w22) ** 2
    )
    det = w11 * w22 - w12 * w21
    disc = np.maximum(t * t - 4.0 * np.abs(det) ** 2, 0.0)
    return np.sqrt(0.5 * (t + np.sqrt(disc)))


def _transfer_chain_numpy(dt, slope, dens, cos0, sin0, zs):
    """Vectorized-over-z fallback: python loop over pieces, numpy over z."""
    n = zs.shape[0]
    w11 = np.ones(n, np.complex128)
    w12 = np.zeros(n, np.complex128)
    w21 = np.zeros(n, np.complex128)
    w22 = np.ones(n, np.complex128)
    ls = np.zeros(n, np.float64)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for p in range(dt.shape[0]):
            h = dt[p]
            k = slope[p]
            d = dens[p]
            c0 = cos0[p]
            s0 = sin0[p]
            if k == 0.0:
                zm = zs * (h * d)
                f11 = 1.0 - zm * (c0 * s0)
                f12 = zm * (c0 * c0)
                f21 = -zm * (s0 * s0)
                f22 = 1.0 + zm * (c0 * s0)
                alpha = 0.0
            else:
                zd = zs * d
                a11 = -h * zd * (c0 * s0)
                a12 = h * (-k + zd * c0 * c0)
                a21 = h * (k - zd * s0 * s0)
                mu2 = a11 * a11 + a12 * a21
                mu = np.sqrt(mu2)
                big = np.abs(mu) >= _SMALL_MU
                alpha = np.where(big, np.abs(mu.real), 0.0)
                safe_mu = np.where(big, mu, 1.0)
                e1 = np.exp(mu - alpha)
                e2 = np.exp(-mu - alpha)
                ch_big = 0.5 * (e1 + e2)
                sc_big = 0.5 * (e1 - e2) / safe_mu
                ch_small = 1.0 + mu2 * (0.5 + mu2 / 24.0)
                sc_small = 1.0 + mu2 * (1.0 / 6.0 + mu2 / 120.0)
                ch = np.where(big, ch_big, ch_small)
                sc = np.where(big, sc_big, sc_small)
                f11 = ch + sc * a11
                f12 = sc * a12
                f21 = sc * a21
                f22 = ch - sc * a11
                dphi = k * h
                cr = math.cos(dphi)
                sr = math.sin(dphi)
                f11, f12, f21, f22 = (
                    f11 * cr - f12 * sr,
                    f11 * sr + f12 * cr,
                    f21 * cr - f22 * sr,
                    f21 * sr + f22 * cr,
                )
            n11 = w11 * f11 + w12 * f21
            n12 = w11 * f12 + w12 * f22
            n21 = w21 * f11 + w22 * f21
            n22 = w21 * f12 + w22 * f22
            w11, w12, w21, w22 = n11, n12, n21, n22
            ls += alpha
            m = np.maximum(
                np.maximum(np.abs(w11), np.abs(w12)),
                np.maximum(np.abs(w21), np.abs(w22)),
            )
            mask = (m > RENORM_HI) | (m < RENORM_LO)
            if mask.any():
                s = _spectral_norm_batch(w11[mask], w12[mask], w21[mask], w22[mask])
                w11[mask] /= s
                w12[mask] /= s
                w21[mask] /= s
                w22[mask] /= s
                ls[mask] += np.log(s)
    s = _spectral_norm_batch(w11, w12, w21, w22)
    units = np.empty((n, 4), np.complex128)
    units[:, 0] = w11 / s
    units[:, 1] = w12 / s
    units[:, 2] = w21 / s
    units[:, 3] = w22 / s
    return units, ls + np.log(s)


_SPLIT = 134217729.0  # 2**27 + 1


def _comp_horner_scalar(c, x):
    """Compensated Horner at one point; sign-reliable near roots."""
    s = c[-1]
    comp = 0.0
    for i in range(c.shape[0] - 2, -1, -1):
        p = s * x
        ca = _SPLIT * s
        a1 = ca - (ca - s)
        a2 = s - a1
        cb = _SPLIT * x
        b1 = cb - (cb - x)
        b2 = x - b1
        ep = ((a1 * b1 - p) + a1 * b2 + a2 * b1) + a2 * b2
        ss = p + c[i]
        bb = ss - p
        es = (p - (ss - bb)) + (c[i] - bb)
        comp = comp * x + (ep + es)
        s = ss
    return s + comp


def _poly_sign_scalar(c, c_rev, deg, x):
    if -1.0 <= x <= 1.0:
        v = _comp_horner_scalar(c, x)
    else:
        v = _comp_horner_scalar(c_rev, 1.0 / x)
        if (deg % 2 == 1) and (x < 0.0):
            v = -v
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


def _poly_signs_loop(c, c_rev, deg, xs):
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        out[i] = _poly_sign_scalar(c, c_rev, deg, xs[i])
    return out


def _poly_bisect_loop(c, c_rev, deg, lo, hi, slo):
    out = np.empty(lo.shape[0])
    for i in range(lo.shape[0]):
        a = lo[i]
        b = hi[i]
        sa = slo[i]
        for _ in range(90):
            tol = 1e-12 * max(1.0, abs(a), abs(b))
            if b - a <= tol:
                break
            m = 0.5 * (a + b)
            sm = _poly_sign_scalar(c, c_rev, deg, m)
            if sm == 0.0:
                a = m
                b = m
                break
            if sm == sa:
                a = m
            else:
                b = m
        out[i] = 0.5 * (a + b)
    return out


if _numba_requested():
    try:
        from numba import njit

        _spectral_norm_scalar = njit(cache=True)(_spectral_norm_scalar)
        _transfer_chain_jit = njit(cache=True)(_transfer_chain_scalar)
        _comp_horner_scalar = njit(cache=True)(_comp_horner_scalar)
        _poly_sign_scalar = njit(cache=True)(_poly_sign_scalar)
        poly_signs_fast = njit(cache=True)(_poly_signs_loop)
        poly_bisect_fast = njit(cache=True)(_poly_bisect_loop)
        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - mirror has numba preinstalled
        HAVE_NUMBA = False
        poly_signs_fast = None
        poly_bisect_fast = None
else:
    HAVE_NUMBA = False
    poly_signs_fast = None
    poly_bisect_fast = None


def transfer_chain(dt, slope, dens, cos0, sin0, zs):
    """Propagate the chain for a batch of spectral parameters.

    Returns (units, logs): units[i] holds the spectral-norm-1 entries
    (w11, w12, w21, w22) and logs[i] the natural log of ||W(z_i)||, which
    doubles as the log-scale of the represented matrix.
    """
    dt = np.ascontiguousarray(dt, np.float64)
    slope = np.ascontiguousarray(slope, np.float64)
    dens = np.ascontiguousarray(dens, np.float64)
    cos0 = np.ascontiguousarray(cos0, np.float64)
    sin0 = np.ascontiguousarray(sin0, np.float64)
    zs = np.ascontiguousarray(np.atleast_1d(zs), np.complex128)
    if HAVE_NUMBA:
        return _transfer_chain_jit(dt, slope, dens, cos0, sin0, zs)
    return _transfer_chain_numpy(dt, slope, dens, cos0, sin0, zs)


def transfer_chain_numpy(dt, slope, dens, cos0, sin0, zs):
    """Fallback path, exposed for the equivalence tests and the benchmark."""
    dt = np.ascontiguousarray(dt, np.float64)
    slope = np.ascontiguousarray(slope, np.float64)
    dens = np.ascontiguousarray(dens, np.float64)
    cos0 = np.ascontiguousarray(cos0, np.float64)
    sin0 = np.ascontiguousarray(sin0, np.float64)
    zs = np.ascontiguousarray(np.atleast_1d(zs), np.complex128)
    return _transfer_chain_numpy(dt, slope, dens, cos0, sin0, zs)


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    a1 = ca - (ca - a)
    a2 = a - a1
    cb = _SPLIT * b
    b1 = cb - (cb - b)
    b2 = b - b1
    err = ((a1 * b1 - p) + a1 * b2 + a2 * b1) + a2 * b2
    return p, err


def compensated_horner(coeffs, x):
    """Evaluate a real polynomial (ascending coefficients) at points x.

    Error-free-transform Horner: result is as accurate as if computed in
    roughly twice the working precision, which keeps sign decisions reliable
    during root isolation on ill-conditioned polynomials.
    """
    x = np.asarray(x, np.float64)
    s = np.full_like(x, coeffs[-1], np.float64)
    c = np.zeros_like(x)
    for a in coeffs[-2::-1]:
        p, ep = _two_prod(s, x)
        s, es = _two_sum(p, a)
        c = c * x + (ep + es)
    return s + c
