"""Power-series lower bounds for the maximum modulus of Hamburger systems.

The generating series F(x) = sum_n [prod_{j<=n} l_{j+1} l_j sin^2(phi_{j+1}
- phi_j)] x^n has nonnegative coefficients that decay roughly like
exp(-c n^2 log n) for the standard families, so everything is carried in log
space and summed with log-sum-exp; (1/2) log F(r^2) bounds log max ||W||
from below up to a logarithmic slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from monogrow.hamiltonian import HamburgerSpec


@dataclass(frozen=True)
class LogSeries:
    """log of the series coefficients; -inf marks exact zeros."""

    log_coeffs: np.ndarray

    def __post_init__(self):
        lc = np.asarray(self.log_coeffs, float)
        object.__setattr__(self, "log_coeffs", lc)
        if lc.size < 1 or lc[0] != 0.0:
            raise ValueError("the constant coefficient must be exactly 1 (log 0.0)")
        if np.any(np.isnan(lc)) or np.any(lc == np.inf):
            raise ValueError("log coefficients must be < +inf and not NaN")


def logsumexp(values: np.ndarray) -> float:
    values = np.asarray(values, float)
    finite = values[values > -np.inf]
    if finite.size == 0:
        return -math.inf
    m = float(finite.max())
    return m + math.log(float(np.sum(np.exp(finite - m))))


def jump_series(spec: HamburgerSpec, n_max: int | None = None) -> LogSeries:
    """Log coefficients of the jump-product series, truncated at n_max.

    Coefficient n needs segments up to index n+1, so at most count-1 terms
    beyond the constant one are available; a zero jump makes every later
    coefficient exactly zero (-inf in log form).
    """
    avail = spec.count - 1
    n = avail if n_max is None else min(int(n_max), avail)
    lengths = spec.lengths
    jumps = np.diff(spec.angles)[: n]
    with np.errstate(divide="ignore"):
        steps = (
            np.log(lengths[1 : n + 1])
            + np.log(lengths[: n])
            + 2.0 * np.log(np.abs(np.sin(jumps)))
        )
    out = np.empty(n + 1)
    out[0] = 0.0
    out[1:] = np.cumsum(steps)
    # one -inf step zeroes the tail for good
    dead = np.isneginf(out)
    if dead.any():
        out[np.argmax(dead):] = -np.inf
        out[0] = 0.0
    return LogSeries(out)


def lower_bound_at(series: LogSeries, r: float) -> float:
    """(1/2) log F(r^2), evaluated stably in log space."""
    if not (r > 0.0):
        raise ValueError("radius must be positive")
    n = np.arange(series.log_coeffs.size, dtype=float)
    return 0.5 * logsumexp(series.log_coeffs + 2.0 * n * math.log(r))


def effective_terms(series: LogSeries, r: float, rel: float = 1e-16) -> int:
    """Index past which the remaining terms are below rel of the total."""
    n = np.arange(series.log_coeffs.size, dtype=float)
    terms = series.log_coeffs + 2.0 * n * math.log(r)
    total = logsumexp(terms)
    if total == -math.inf:
        return 0
    keep = np.nonzero(terms >= total + math.log(rel))[0]
    return int(keep[-1]) + 1 if keep.size else 1


def liminf_coefficient_bound(series: LogSeries, g_inverse, n_lo: int, n_hi: int) -> float:
    """min over n in [n_lo, n_hi] of log(g^{-1}(n)) + log_coeffs[n] / n.

    Finite-range surrogate for the liminf of log(g^{-1}(n) |a_n|^{1/n});
    g_inverse must be increasing on the range.
    """
    n_hi = min(n_hi, series.log_coeffs.size - 1)
    if n_lo < 1 or n_lo > n_hi:
        raise ValueError("empty coefficient range")
    ns = np.arange(n_lo, n_hi + 1)
    ginv = np.asarray(g_inverse(ns.astype(float)), float)
    if np.any(np.diff(ginv) < 0):
        raise ValueError("g_inverse must be nondecreasing on the range")
    vals = np.log(ginv) + series.log_coeffs[ns] / ns
    return float(np.min(vals))


@dataclass(frozen=True)
class LowerRateReport:
    min_ratio: float
    argmin: int
    ratios: np.ndarray
    rate_index: float

    def rate(self, r):
        raise NotImplementedError


def lower_rate_report(spec: HamburgerSpec, f, n_check: int):
    """Check l_{j+1} l_j sin^2(jump_j) >= const / f(j) and predict the rate.

    Returns the minimal ratio f(j) * l_{j+1} l_j sin^2(jump_j) over
    j <= n_check with its argmin, plus the predicted lower-rate function
    r -> g(r^2) where g is the asymptotic inverse of f.
    """
    from monogrow.regvar import PowerLaw, asymptotic_inverse

    n = min(int(n_check), spec.count - 1)
    if n < 1:
        raise ValueError("need at least two segments")
    js = np.arange(1, n + 1, dtype=float)
    fv = np.asarray(f(js), float)
    if np.any(fv <= 0):
        raise ValueError("the comparison law must be positive on the range")
    jumps = np.diff(spec.angles)[:n]
    prods = spec.lengths[1 : n + 1] * spec.lengths[:n] * np.sin(jumps) ** 2
    ratios = fv * prods
    arg = int(np.argmin(ratios))
    try:
        g = asymptotic_inverse(f)
    except TypeError:
        # unknown form: keep the rate shape as the pure power of matching index
        g = PowerLaw(1.0 / f.index)

    class _Report(LowerRateReport):
        def rate(self, r):
            r = np.asarray(r, float)
            return g(r ** 2)

    return _Report(float(ratios[arg]), arg + 1, ratios, g.index * 2.0)


def fit_log_slack(radii, lower_vals, upper_vals):
    """Least-squares (offset, slope) of lower - upper against log r."""
    radii = np.asarray(radii, float)
    d = np.asarray(lower_vals, float) - np.asarray(upper_vals, float)
    x = np.log(radii)
    a = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(a, d, rcond=None)
    return float(coef[0]), float(coef[1])
