"""Closed-form 2x2 matrix arithmetic.

Spectral norms come from the singular-value quadratic of m^H m, solved with
the numerically stable root pairing (larger root from the sum formula, the
smaller one implied by the product), so no iterative SVD is ever needed.
ScaledMat2 carries a separate natural-log scale so products whose norms pass
1e300 stay representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SYMPLECTIC_J = np.array([[0.0, -1.0], [1.0, 0.0]])

UNIT_NORM_TOL = 1e-12


def unit_direction(angle: float) -> np.ndarray:
    """Unit column (cos angle, sin angle)."""
    return np.array([math.cos(angle), math.sin(angle)])


def _as_mat2(m) -> np.ndarray:
    m = np.asarray(m)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def spectral_norm(m) -> float:
    """Largest singular value of a real or complex 2x2 matrix."""
    m = _as_mat2(m)
    peak = float(np.max(np.abs(m)))
    if peak == 0.0:
        return 0.0
    # exact power-of-two prescaling keeps t^2 inside the double range
    scale = math.ldexp(1.0, -int(math.floor(math.log2(peak))))
    a, b, c, d = (complex(v) * scale for v in m.ravel())
    t = (
        a.real * a.real + a.imag * a.imag
        + b.real * b.real + b.imag * b.imag
        + c.real * c.real + c.imag * c.imag
        + d.real * d.real + d.imag * d.imag
    )
    det = a * d - b * c
    dd = det.real * det.real + det.imag * det.imag
    disc = max(t * t - 4.0 * dd, 0.0)
    return math.sqrt(0.5 * (t + math.sqrt(disc))) / scale


def singular_values(m) -> tuple[float, float]:
    """(largest, smallest) singular values; the small one via the product rule."""
    m = _as_mat2(m)
    smax = spectral_norm(m)
    if smax == 0.0:
        return 0.0, 0.0
    return smax, abs(np.linalg.det(m)) / smax


def rotation_distortion(a: float, psi: float) -> np.ndarray:
    """diag(a, 1/a) times the rotation by -psi; determinant 1."""
    if not (a > 0.0) or not math.isfinite(a):
        raise ValueError("distortion parameter must be a positive real")
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[a * c, a * s], [-s / a, c / a]])


def rotation_distortion_inverse(a: float, psi: float) -> np.ndarray:
    """Exact inverse (rotation by psi times diag(1/a, a)); no solve needed."""
    if not (a > 0.0) or not math.isfinite(a):
        raise ValueError("distortion parameter must be a positive real")
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c / a, -s * a], [s / a, c * a]])


class FrameNorms(NamedTuple):
    distortion: float
    conjugation: float
    transition: float


def _angle_difference_cos_sin(phi: float, psi: float) -> tuple[float, float]:
    # difference identities keep full relative accuracy near multiples of pi,
    # consistent with matrices assembled from sin/cos of each angle separately
    cp, sp = math.cos(phi), math.sin(phi)
    cq, sq = math.cos(psi), math.sin(psi)
    return abs(cp * cq + sp * sq), abs(sp * cq - cp * sq)


def frame_norms(a: float, psi: float, phi: float, b: float) -> FrameNorms:
    """Spectral norms of the three frame-change matrices, in closed form.

    distortion  = ||Omega(a, psi)||                      = max(a, 1/a)
    conjugation = ||Omega xi_phi xi_phi^T J Omega^{-1}|| = a^2 cos^2 + sin^2/a^2
    transition  = ||Omega(a, psi) Omega(b, phi)^{-1}||   via the exact
                  singular-value formula built from the v_+/v_- vectors.
    """
    if not (a > 0.0 and b > 0.0):
        raise ValueError("distortion parameters must be positive")
    co, si = _angle_difference_cos_sin(phi, psi)
    n1 = max(a, 1.0 / a)
    n2 = a * a * co * co + si * si / (a * a)
    r, p = a / b, a * b
    vp = (max(r, 1.0 / r) * co, max(p, 1.0 / p) * si)
    vm = (min(r, 1.0 / r) * co, min(p, 1.0 / p) * si)
    dif = math.hypot(vp[0] - vm[0], vp[1] - vm[1])
    tot = math.hypot(vp[0] + vm[0], vp[1] + vm[1])
    n3 = math.sqrt(1.0 + dif * 0.5 * (dif + tot))
    return FrameNorms(n1, n2, n3)


def transition_vectors(a: float, psi: float, phi: float, b: float):
    """The v_+ / v_- pair entering the transition-norm sandwich."""
    co, si = _angle_difference_cos_sin(phi, psi)
    r, p = a / b, a * b
    vp = np.array([max(r, 1.0 / r) * co, max(p, 1.0 / p) * si])
    vm = np.array([min(r, 1.0 / r) * co, min(p, 1.0 / p) * si])
    return vp, vm


@dataclass(frozen=True)
class ScaledMat2:
    """A 2x2 matrix exp(log_scale) * unit with ||unit|| = 1 up to 1e-12."""

    unit: np.ndarray
    log_scale: float

    @classmethod
    def from_matrix(cls, m, log_scale: float = 0.0) -> "ScaledMat2":
        m = _as_mat2(m)
        s = spectral_norm(m)
        if s == 0.0:
            raise ValueError("cannot scale the zero matrix")
        return cls(m / s, log_scale + math.log(s))

    @classmethod
    def identity(cls) -> "ScaledMat2":
        return cls(np.eye(2), 0.0)

    def matrix(self) -> np.ndarray:
        return self.unit * math.exp(self.log_scale)

    @property
    def log_norm(self) -> float:
        return self.log_scale + math.log(spectral_norm(self.unit))

    def renormalized(self) -> "ScaledMat2":
        return ScaledMat2.from_matrix(self.unit, self.log_scale)

    def entry(self, i: int, j: int) -> complex:
        """Entry value including the scale; overflows to inf past 1e308."""
        return complex(self.unit[i, j]) * math.exp(self.log_scale)

    def log_det(self) -> complex:
        """Complex log of det: log|det unit| + 2 log_scale + i arg."""
        det = complex(np.linalg.det(self.unit))
        if det == 0:
            return complex(-math.inf, 0.0)
        return complex(math.log(abs(det)) + 2.0 * self.log_scale, math.atan2(det.imag, det.real))
