"""Fundamental solutions and monodromy matrices.

Hamburger specs multiply exact linear factors I - z l xi xi^T J, either as
log-scaled numeric chains (any z, any size) or as exact coefficient
polynomials (moderate segment counts).  Profiles propagate through the same
chain: pieces with linear angle and constant density get exact rotating-frame
exponentials, everything else is step-frozen at cell midpoints with
step-halving until the log-norm stabilizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from monogrow import _kernels
from monogrow.hamiltonian import (
    AngleProfile,
    ConstFn,
    ConstantMatrixSpec,
    DiagonalSpec,
    HamburgerSpec,
    PolylineFn,
    StepFn,
    hamburger_from_diagonal,
)
from monogrow.mat2 import ScaledMat2


class PropagationError(RuntimeError):
    """Numeric propagation failed; carries the last two refinement iterates."""

    def __init__(self, message, last_two=None):
        super().__init__(message)
        self.last_two = last_two


# ---------------------------------------------------------------------------
# piece construction
# ---------------------------------------------------------------------------

def _hamburger_pieces(spec: HamburgerSpec):
    n = spec.count
    return (
        spec.lengths,
        np.zeros(n),
        np.ones(n),
        np.cos(spec.angles),
        np.sin(spec.angles),
    )


def _exact_profile_pieces(profile: AngleProfile):
    """Piece arrays when the profile admits exact factors, else None."""
    phi, dens = profile.phi, profile.density
    if not isinstance(phi, (ConstFn, StepFn, PolylineFn)):
        return None
    if not isinstance(dens, (ConstFn, StepFn)):
        return None
    a, b = profile.domain
    edges = np.unique(np.concatenate([
        [a, b],
        phi.breakpoints(),
        dens.breakpoints(),
    ]))
    edges = edges[(edges >= a) & (edges <= b)]
    t0 = edges[:-1]
    t1 = edges[1:]
    dt = t1 - t0
    mids = 0.5 * (t0 + t1)
    d = dens(mids)
    if isinstance(phi, PolylineFn):
        v0 = phi(t0)
        v1 = phi(t1)
        slope = (v1 - v0) / dt
        phi0 = v0
    else:
        slope = np.zeros_like(dt)
        phi0 = phi(mids)
    return dt, slope, d, np.cos(phi0), np.sin(phi0)


def _frozen_profile_pieces(profile: AngleProfile, edges: np.ndarray):
    t0 = edges[:-1]
    t1 = edges[1:]
    dt = t1 - t0
    mids = 0.5 * (t0 + t1)
    phi0 = profile.phi(mids)
    d = profile.density(mids)
    return dt, np.zeros_like(dt), d, np.cos(phi0), np.sin(phi0)


def _seed_edges(profile: AngleProfile, min_cells: int = 64) -> np.ndarray:
    a, b = profile.domain
    base = np.linspace(a, b, min_cells + 1)
    brk = np.concatenate([profile.phi.breakpoints(), profile.density.breakpoints()])
    brk = brk[(brk > a) & (brk < b)]
    return np.unique(np.concatenate([base, brk]))


def _halve(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    return np.unique(np.concatenate([edges, mids]))


def _constant_matrix_chain(spec: ConstantMatrixSpec, zs: np.ndarray):
    """Closed-form exp(-z L M J) in scaled form, vectorized over z."""
    m = spec.matrix
    mj = np.array([[m[0, 1], -m[0, 0]], [m[1, 1], -m[0, 1]]])  # M @ J, traceless
    L = spec.length
    a11 = -zs * L * mj[0, 0]
    a12 = -zs * L * mj[0, 1]
    a21 = -zs * L * mj[1, 0]
    mu2 = a11 * a11 + a12 * a21
    mu = np.sqrt(mu2)
    big = np.abs(mu) >= 1e-4
    alpha = np.where(big, np.abs(mu.real), 0.0)
    safe = np.where(big, mu, 1.0)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        e1 = np.exp(mu - alpha)
        e2 = np.exp(-mu - alpha)
        ch = np.where(big, 0.5 * (e1 + e2), 1.0 + mu2 * (0.5 + mu2 / 24.0))
        sc = np.where(big, 0.5 * (e1 - e2) / safe, 1.0 + mu2 * (1.0 / 6.0 + mu2 / 120.0))
    w11 = ch + sc * a11
    w12 = sc * a12
    w21 = sc * a21
    w22 = ch - sc * a11
    s = _kernels._spectral_norm_batch(w11, w12, w21, w22)
    units = np.stack([w11 / s, w12 / s, w21 / s, w22 / s], axis=1)
    return units, alpha + np.log(s)


def transfer_chain_at(spec, zs, *, tol: float = 1e-8, max_depth: int = 24,
                      max_cells: int = 1 << 20, method: str = "auto"):
    """Batch monodromy evaluation.

    Returns (units, logs): per z the norm-1 entries (w11, w12, w21, w22) and
    log ||W(z)||.  method="frozen" forces midpoint freezing for profiles even
    when exact factors exist.
    """
    zs = np.atleast_1d(np.asarray(zs, complex))
    if isinstance(spec, HamburgerSpec):
        return _kernels.transfer_chain(*_hamburger_pieces(spec), zs)
    if isinstance(spec, DiagonalSpec):
        return _kernels.transfer_chain(*_hamburger_pieces(hamburger_from_diagonal(spec)), zs)
    if isinstance(spec, ConstantMatrixSpec):
        return _constant_matrix_chain(spec, zs)
    if isinstance(spec, AngleProfile):
        if method == "auto":
            pieces = _exact_profile_pieces(spec)
            if pieces is not None:
                return _kernels.transfer_chain(*pieces, zs)
        elif method != "frozen":
            raise ValueError(f"unknown propagation method {method!r}")
        edges = _seed_edges(spec)
        prev = None
        for _ in range(max_depth + 1):
            if edges.size - 1 > max_cells:
                raise PropagationError(
                    f"profile propagation exceeded {max_cells} cells without converging",
                    last_two=prev,
                )
            units, logs = _kernels.transfer_chain(*_frozen_profile_pieces(spec, edges), zs)
            if prev is not None:
                delta = np.max(np.abs(logs - prev[1]))
                if delta <= tol * (1.0 + np.max(np.abs(logs))):
                    return units, logs
            prev = (units, logs)
            edges = _halve(edges)
        raise PropagationError(
            f"profile propagation did not converge within {max_depth} halvings",
            last_two=prev,
        )
    raise TypeError(f"unsupported spec type {type(spec)!r}")


def monodromy_at(spec, z, **kwargs) -> ScaledMat2:
    """Monodromy matrix W(z) as a ScaledMat2; .log_norm gives log ||W(z)||."""
    units, logs = transfer_chain_at(spec, [complex(z)], **kwargs)
    unit = units[0].reshape(2, 2)
    return ScaledMat2(unit, float(logs[0]))


def log_det_defect(spec, zs) -> np.ndarray:
    """|log det| of the represented monodromy matrix, stably accumulated.

    det W(z) = 1 because every chain factor is symplectic.  Re-deriving the
    determinant from the final entries is impossible once the singular values
    spread beyond 1/eps, so the defect is accumulated factor by factor in
    extended precision: per piece log det(factor) is exactly computable, and
    the scale bookkeeping cancels against 2 log_scale by construction.  The
    result bounds |log(det(unit) e^{2 log_scale})| up to the product rounding.
    """
    zs = np.atleast_1d(np.asarray(zs, complex)).astype(np.clongdouble)
    if isinstance(spec, HamburgerSpec):
        pieces = _hamburger_pieces(spec)
    elif isinstance(spec, DiagonalSpec):
        pieces = _hamburger_pieces(hamburger_from_diagonal(spec))
    elif isinstance(spec, AngleProfile):
        pieces = _exact_profile_pieces(spec)
        if pieces is None:
            pieces = _frozen_profile_pieces(spec, _seed_edges(spec))
    elif isinstance(spec, ConstantMatrixSpec):
        m = spec.matrix
        mj00, mj01, mj10 = m[0, 1], -m[0, 0], m[1, 1]
        a11 = -zs * spec.length * mj00
        a12 = -zs * spec.length * mj01
        a21 = -zs * spec.length * mj10
        mu = np.sqrt(a11 * a11 + a12 * a21)
        # cosh^2 - sinh^2 = exp(mu)exp(-mu) exactly up to rounding
        total = np.log(np.exp(mu) * np.exp(-mu))
        return np.abs(total.astype(complex))
    else:
        raise TypeError(f"unsupported spec type {type(spec)!r}")
    dt, slope, dens, cos0, sin0 = (np.asarray(p, np.longdouble) for p in pieces)
    total = np.zeros(zs.size, np.clongdouble)
    for p in range(dt.size):
        h, k, d = dt[p], slope[p], dens[p]
        c0, s0 = cos0[p], sin0[p]
        if k == 0.0:
            zm = zs * (h * d)
            x = zm * (c0 * s0)
            q = (1.0 - x) * (1.0 + x) + (zm * (c0 * c0)) * (zm * (s0 * s0))
            total += np.log(q)
        else:
            zd = zs * d
            a11 = -h * zd * (c0 * s0)
            a12 = h * (-k + zd * c0 * c0)
            a21 = h * (k - zd * s0 * s0)
            mu = np.sqrt(a11 * a11 + a12 * a21)
            alpha = np.abs(np.real(mu))
            q = np.exp(mu - alpha) * np.exp(-mu - alpha)  # det of the scaled piece
            total += np.log(q) + 2.0 * alpha
            dphi = float(k * h)
            total += math.log(math.cos(dphi) ** 2 + math.sin(dphi) ** 2)
    return np.abs(total.astype(complex))


def max_modulus(spec, r: float, samples: int = 64, refine: bool = False, **kwargs) -> float:
    """log max over |z| = r of ||W(z)||, sampled on [0, pi] by symmetry.

    The entries of W have real coefficients, so ||W(conj z)|| = ||W(z)|| and
    the upper half circle suffices.  With refine=True a golden-section pass
    tightens the maximum between the best grid point's neighbours.
    """
    if not (r > 0.0):
        raise ValueError("radius must be positive")
    if samples < 4:
        raise ValueError("need at least 4 angular samples")
    thetas = np.linspace(0.0, math.pi, samples)
    zs = r * np.exp(1j * thetas)
    _, logs = transfer_chain_at(spec, zs, **kwargs)
    best = int(np.argmax(logs))
    value = float(logs[best])
    if not refine:
        return value
    lo = thetas[max(best - 1, 0)]
    hi = thetas[min(best + 1, samples - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0

    def eval_at(theta):
        _, lg = transfer_chain_at(spec, [r * np.exp(1j * theta)], **kwargs)
        return float(lg[0])

    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = eval_at(x1), eval_at(x2)
    for _ in range(40):
        if hi - lo < 1e-10:
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = eval_at(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = eval_at(x1)
    return max(value, f1, f2)


# ---------------------------------------------------------------------------
# exact coefficient polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixPolynomial:
    """Entrywise coefficient arrays (ascending) of a polynomial W(z)."""

    w11: np.ndarray
    w12: np.ndarray
    w21: np.ndarray
    w22: np.ndarray

    @property
    def degree_bound(self) -> int:
        return int(self.w11.size - 1)

    def value_at(self, z: complex) -> np.ndarray:
        from numpy.polynomial import polynomial as P

        return np.array([
            [P.polyval(z, self.w11), P.polyval(z, self.w12)],
            [P.polyval(z, self.w21), P.polyval(z, self.w22)],
        ])

    def det_coefficients(self) -> np.ndarray:
        return np.convolve(self.w11, self.w22) - np.convolve(self.w12, self.w21)

    def det_coefficient_scales(self) -> np.ndarray:
        """Magnitude scale of the cancellation at each degree of det."""
        return (
            np.convolve(np.abs(self.w11), np.abs(self.w22))
            + np.convolve(np.abs(self.w12), np.abs(self.w21))
        )


def _product_loop(lengths, angles, dtype, collect_rows=False):
    n = lengths.size
    w11 = np.zeros(n + 1, dtype)
    w12 = np.zeros(n + 1, dtype)
    w21 = np.zeros(n + 1, dtype)
    w22 = np.zeros(n + 1, dtype)
    w11[0] = 1.0
    w22[0] = 1.0
    rows = []
    cos_a = np.cos(angles).astype(dtype)
    sin_a = np.sin(angles).astype(dtype)
    for j in range(n):
        if collect_rows:
            # p_j+1 uses the first row of the product of factors 1..j
            p = cos_a[j] * w11[: j + 1] + sin_a[j] * w12[: j + 1]
            rows.append(np.asarray(p, np.float64))
        m = dtype(lengths[j])
        cs = cos_a[j] * sin_a[j]
        cc = cos_a[j] * cos_a[j]
        ss = sin_a[j] * sin_a[j]
        a11 = w11.copy()
        a12 = w12.copy()
        a21 = w21.copy()
        a22 = w22.copy()
        w11[1:] = a11[1:] - m * (cs * a11[:-1] + ss * a12[:-1])
        w12[1:] = a12[1:] + m * (cc * a11[:-1] + cs * a12[:-1])
        w21[1:] = a21[1:] - m * (cs * a21[:-1] + ss * a22[:-1])
        w22[1:] = a22[1:] + m * (cc * a21[:-1] + cs * a22[:-1])
    out = MatrixPolynomial(
        np.asarray(w11, np.float64),
        np.asarray(w12, np.float64),
        np.asarray(w21, np.float64),
        np.asarray(w22, np.float64),
    )
    return (out, rows) if collect_rows else out


def transfer_polynomial(spec: HamburgerSpec, max_segments: int = 2000) -> MatrixPolynomial:
    """Exact coefficient product of the per-segment linear factors.

    Segment counts above 200 accumulate in extended precision before the
    final float64 cast, which keeps the det == 1 cancellation clean.
    """
    n = spec.count
    if n > max_segments:
        raise ValueError(f"segment count {n} exceeds the cap {max_segments}")
    dtype = np.longdouble if n > 200 else np.float64
    return _product_loop(spec.lengths, spec.angles, dtype)


def segment_polynomials(spec: HamburgerSpec, max_segments: int = 2000,
                        verify: bool = True, rel_tol: float = 1e-9):
    """p_n(z) = (1,0) W(t_{n-1}, z) xi_{phi_n}, for n = 1..N (degree n-1).

    The leading coefficient of p_n is prod(l_j, j<n) * cos(phi_1) *
    prod(sin(phi_{j+1} - phi_j), j<n); when none of the factors is
    degenerate the computed coefficient is checked against that product.
    """
    n = spec.count
    if n > max_segments:
        raise ValueError(f"segment count {n} exceeds the cap {max_segments}")
    dtype = np.longdouble if n > 200 else np.float64
    _, rows = _product_loop(spec.lengths, spec.angles, dtype, collect_rows=True)
    if verify:
        jumps = np.diff(spec.angles)
        sin_jumps = np.sin(jumps)
        cos_first = math.cos(spec.angles[0])
        degenerate = abs(cos_first) < 1e-13 or np.any(np.abs(sin_jumps) < 1e-13)
        if not degenerate:
            for k, p in enumerate(rows):
                nn = k + 1
                expected = cos_first
                if nn > 1:
                    expected *= float(np.prod(spec.lengths[: nn - 1]))
                    expected *= float(np.prod(sin_jumps[: nn - 1]))
                got = float(p[-1])
                if abs(expected) > 1e-280:
                    rel = abs(got - expected) / abs(expected)
                    if rel > rel_tol:
                        raise ValueError(
                            f"leading coefficient of segment polynomial {nn} is off by "
                            f"relative {rel:.3e}"
                        )
    return rows
