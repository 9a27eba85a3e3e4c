"""Spectra as real zeros of w22, counting functions, and order fits.

Hamburger systems of moderate size go through exact coefficient polynomials
with complete real-root isolation (all roots of w22 are real and simple for
this class, so a sign-change bisection over a dense seed set accounts for the
full degree).  Larger systems and non-polynomial kinds use a scaled sign scan
of w22 on the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from monogrow import _kernels
from monogrow._kernels import compensated_horner
from monogrow.hamiltonian import (
    AngleProfile,
    ConstantMatrixSpec,
    DiagonalSpec,
    HamburgerSpec,
    hamburger_from_diagonal,
)
from monogrow.monodromy import transfer_chain_at, transfer_polynomial
from monogrow.hamiltonian import cut as cut_spec

_POLY_MODE_CAP = 512


class ZeroIsolationError(RuntimeError):
    """Root isolation did not account for the full polynomial degree."""


@dataclass(frozen=True)
class ZeroSet:
    zeros: np.ndarray
    radius_cap: float
    method: str
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        z = np.sort(np.asarray(self.zeros, float))
        object.__setattr__(self, "zeros", z)

    def close_pairs(self, tol_scale: float = 1e-10):
        """Adjacent zeros closer than tol_scale * radius_cap (possible ties)."""
        gaps = np.diff(self.zeros)
        return [
            (float(self.zeros[i]), float(self.zeros[i + 1]))
            for i in np.nonzero(gaps <= tol_scale * self.radius_cap)[0]
        ]


def counting_function(zeros: ZeroSet, r: float) -> int:
    if r > zeros.radius_cap * (1 + 1e-12):
        raise ValueError(f"count requested at r={r} beyond the cap {zeros.radius_cap}")
    return int(np.count_nonzero(np.abs(zeros.zeros) <= r))


# ---------------------------------------------------------------------------
# polynomial mode
# ---------------------------------------------------------------------------

def _poly_signs(c: np.ndarray, c_rev: np.ndarray, deg: int, xs: np.ndarray) -> np.ndarray:
    """Sign of the polynomial, overflow-free.

    For |x| <= 1 a compensated Horner on the coefficients is exact enough;
    for |x| > 1 the sign comes from the reversed polynomial at 1/x (values
    bounded by the coefficient sum) times the sign of x**deg.
    """
    if _kernels.poly_signs_fast is not None:
        return _kernels.poly_signs_fast(c, c_rev, deg, np.ascontiguousarray(xs))
    out = np.empty(xs.size)
    inner = np.abs(xs) <= 1.0
    if inner.any():
        out[inner] = np.sign(compensated_horner(c, xs[inner]))
    outer = ~inner
    if outer.any():
        xo = xs[outer]
        q = np.sign(compensated_horner(c_rev, 1.0 / xo))
        parity = np.where((deg % 2 == 1) & (xo < 0), -1.0, 1.0)
        out[outer] = q * parity
    return out


def _bisect_brackets(c, c_rev, deg, lo, hi, slo):
    """Sign bisection to relative 1e-12 on all brackets at once."""
    if _kernels.poly_bisect_fast is not None:
        return _kernels.poly_bisect_fast(
            c, c_rev, deg,
            np.ascontiguousarray(lo), np.ascontiguousarray(hi), np.ascontiguousarray(slo),
        )
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(90):
        tol = 1e-12 * np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        smid = _poly_signs(c, c_rev, deg, mid)
        hit = smid == 0.0
        move_lo = (smid == slo) & ~hit
        lo = np.where(hit, mid, np.where(move_lo, mid, lo))
        hi = np.where(hit, mid, np.where(move_lo, hi, mid))
    return 0.5 * (lo + hi)


def _trimmed(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, float)
    # drop exactly vanished leading coefficients (degenerate angle data)
    while c.size > 1 and (c[-1] == 0.0 or abs(c[-1]) < 1e-300):
        c = c[:-1]
    return c


def _poly_real_roots(coeffs: np.ndarray) -> np.ndarray:
    """All real roots of a real polynomial whose roots are known to be real.

    Derivative recursion: the roots of each derivative separate the roots of
    the next polynomial up (Rolle), so between consecutive critical points
    the polynomial is monotone and a sign change pins down exactly one root.
    This is complete for real-rooted polynomials regardless of how the roots
    spread across magnitudes.
    """
    chain = [_trimmed(coeffs)]
    if chain[0].size <= 1:
        return np.empty(0)
    while chain[-1].size > 2:
        c = chain[-1]
        chain.append(_trimmed(c[1:] * np.arange(1, c.size)))
    crit = np.empty(0)
    for c in reversed(chain):
        deg = c.size - 1
        if deg == 1:
            crit = np.asarray([-c[0] / c[1]])
            continue
        c_rev = c[::-1].copy()
        bound = 1.0 + float(np.max(np.abs(c[:-1]))) / abs(c[-1])
        cand = np.concatenate([[-bound], crit[np.abs(crit) < bound], [bound]])
        cand = np.unique(cand)
        signs = _poly_signs(c, c_rev, deg, cand)
        nz = signs != 0
        roots = [float(x) for x in cand[~nz]]
        xs, sg = cand[nz], signs[nz]
        flips = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
        if flips.size:
            found = _bisect_brackets(c, c_rev, deg, xs[flips], xs[flips + 1], sg[flips])
            roots.extend(float(x) for x in found)
        crit = np.sort(np.asarray(roots))
    deg = chain[0].size - 1
    if crit.size != deg:
        raise ZeroIsolationError(
            f"isolated {crit.size} real roots for degree {deg}; "
            "this contradicts reality/simplicity of the w22 zeros"
        )
    return crit


# ---------------------------------------------------------------------------
# scan mode
# ---------------------------------------------------------------------------

def _scan_zeros(spec, R: float, grid: int) -> tuple[np.ndarray, tuple[str, ...]]:
    xs = np.linspace(-R, R, grid)
    units, _ = transfer_chain_at(spec, xs.astype(complex))
    vals = np.real(units[:, 3])
    sign = np.sign(vals)
    sign[sign == 0] = 1.0
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    lo = xs[flips]
    hi = xs[flips + 1]
    slo = sign[flips]
    for _ in range(80):
        tol = 1e-10 * np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
        if lo.size == 0 or np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        u, _ = transfer_chain_at(spec, mid.astype(complex))
        smid = np.sign(np.real(u[:, 3]))
        smid[smid == 0] = 1.0
        move_lo = smid == slo
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_lo, hi, mid)
    zeros = 0.5 * (lo + hi)
    warnings = ()
    if zeros.size >= 2:
        step = xs[1] - xs[0]
        if np.min(np.diff(np.sort(zeros))) < 4.0 * step:
            warnings = ("adjacent zeros closer than 4 grid steps; increase the grid",)
    return zeros, warnings


def zeros_w22(spec, R: float, method: str = "auto", grid: int = 8192) -> ZeroSet:
    """Real zeros of w22 with |x| <= R.

    Polynomial mode (Hamburger up to 512 segments) isolates the full degree
    and is complete; scan mode detects sign changes on a uniform grid and is
    complete up to the grid resolution.
    """
    if not (R > 0):
        raise ValueError("radius cap must be positive")
    if method == "auto":
        poly_ok = isinstance(spec, HamburgerSpec) and spec.count <= _POLY_MODE_CAP
        if not poly_ok and isinstance(spec, DiagonalSpec):
            poly_ok = hamburger_from_diagonal(spec).count <= _POLY_MODE_CAP
        method = "poly" if poly_ok else "scan"
    if method == "poly":
        ham = hamburger_from_diagonal(spec) if isinstance(spec, DiagonalSpec) else spec
        if not isinstance(ham, HamburgerSpec):
            raise ValueError("polynomial mode needs a Hamburger-representable spec")
        poly = transfer_polynomial(ham, max_segments=_POLY_MODE_CAP)
        roots = _poly_real_roots(poly.w22)
        return ZeroSet(roots[np.abs(roots) <= R], R, "poly")
    if method == "scan":
        zeros, warnings = _scan_zeros(spec, R, grid)
        return ZeroSet(zeros, R, "scan", warnings)
    raise ValueError(f"unknown zero-finding method {method!r}")


# ---------------------------------------------------------------------------
# eigenvalue density and the cut comparison
# ---------------------------------------------------------------------------

def eigenvalue_density(spec, R: float, **kwargs) -> tuple[float, float]:
    """(empirical n(R) / 2R, predicted (1/pi) int sqrt(det H))."""
    if isinstance(spec, ConstantMatrixSpec):
        det = float(np.linalg.det(spec.matrix))
        predicted = math.sqrt(max(det, 0.0)) * spec.length / math.pi
    else:
        predicted = 0.0  # det H = 0 a.e. for the other kinds
    zs = zeros_w22(spec, R, **kwargs)
    empirical = counting_function(zs, R) / (2.0 * R)
    return empirical, predicted


@dataclass(frozen=True)
class CutZeroReport:
    radii: np.ndarray
    count_original: np.ndarray
    count_cut: np.ndarray

    @property
    def max_violation(self) -> int:
        return int(np.max(self.count_cut - self.count_original - 2))

    @property
    def ok(self) -> bool:
        return self.max_violation <= 0


def cut_zero_count_report(spec: HamburgerSpec, keep, R: float, grid_points: int = 128) -> CutZeroReport:
    """Counting functions of w22 zeros before and after a segment cut.

    Removing whole segments can raise the zero count by at most 2 at every
    radius; the report evaluates both counts on a grid joined with the exact
    jump locations of the cut spec's counting function.
    """
    cut_s = cut_spec(spec, keep)
    z_orig = zeros_w22(spec, R, method="poly")
    z_cut = zeros_w22(cut_s, R, method="poly")
    base = np.linspace(0.0, R, grid_points)
    radii = np.unique(np.concatenate([base, np.abs(z_cut.zeros), np.abs(z_orig.zeros)]))
    radii = radii[radii <= R]
    n_orig = np.searchsorted(np.sort(np.abs(z_orig.zeros)), radii, side="right")
    n_cut = np.searchsorted(np.sort(np.abs(z_cut.zeros)), radii, side="right")
    return CutZeroReport(radii, n_orig.astype(int), n_cut.astype(int))


# ---------------------------------------------------------------------------
# order fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderFit:
    slope: float
    intercept: float
    residual: float
    r_range: tuple[float, float]


def fit_order(radii, values=None) -> OrderFit:
    """Least-squares slope of log(value) against log(r).

    The curve convention is that value already is log max ||W||, so the slope
    is the fitted exponential order.  Accepts (radii, values) arrays or a
    curve object with .radii() / .values_for().
    """
    if values is None:
        rows = radii.rows  # duck-typed GrowthCurve with a single tag
        radii = np.asarray([r for r, _, _ in rows], float)
        values = np.asarray([v for _, _, v in rows], float)
    radii = np.asarray(radii, float)
    values = np.asarray(values, float)
    keep = values > 1.0
    if np.count_nonzero(keep) < 8:
        raise ValueError("need at least 8 curve points with value > 1 to fit an order")
    x = np.log(radii[keep])
    y = np.log(values[keep])
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    return OrderFit(
        float(coef[0]),
        float(coef[1]),
        float(np.sqrt(np.mean(resid ** 2))),
        (float(radii[keep].min()), float(radii[keep].max())),
    )
