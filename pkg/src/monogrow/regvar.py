"""Regularly varying functions and moduli of continuity as evaluable objects.

A regularly varying function behaves like c * r**rho with slowly varying
corrections; here the supported forms are pure powers, powers with log /
log-log factors, and monotone tables (log-log interpolated, end-slope
extrapolated).  Moduli of continuity are the same shapes viewed at 0+.

growth_envelope converts a modulus omega into the increasing bijection
Gamma(r) = 1/x where x solves x * omega(x) = 1/r; it is the bound-generating
currency of the recipe for continuous rotation angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d


# ---------------------------------------------------------------------------
# regularly varying forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerLaw:
    """scale * r**index."""

    index: float
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def __call__(self, r):
        return self.scale * np.power(np.asarray(r, float), self.index)

    def scaled(self, factor: float) -> "PowerLaw":
        return PowerLaw(self.index, self.scale * factor)


@dataclass(frozen=True)
class PowerLogLaw:
    """scale * r**index * log(e + r)**log_exp * log(log(e**e + r))**loglog_exp.

    The shifted logarithms keep the form positive and evaluable on all of
    r >= 1 while changing nothing asymptotically.
    """

    index: float
    log_exp: float = 0.0
    loglog_exp: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def __call__(self, r):
        r = np.asarray(r, float)
        if np.any(r <= 0):
            raise ValueError("power-log form needs positive arguments")
        out = self.scale * np.power(r, self.index)
        if self.log_exp:
            out = out * np.power(np.log(math.e + r), self.log_exp)
        if self.loglog_exp:
            out = out * np.power(np.log(np.log(math.exp(math.e) + r)), self.loglog_exp)
        return out

    def scaled(self, factor: float) -> "PowerLogLaw":
        return PowerLogLaw(self.index, self.log_exp, self.loglog_exp, self.scale * factor)


@dataclass(frozen=True)
class CustomLaw:
    """An arbitrary positive callable with a declared index."""

    fn: object
    index: float

    def __call__(self, r):
        return self.fn(np.asarray(r, float))


class TableLaw:
    """Monotone samples with log-log interpolation and end-slope extrapolation."""

    def __init__(self, rs, values):
        rs = np.asarray(rs, float)
        values = np.asarray(values, float)
        if rs.size < 2 or rs.size != values.size:
            raise ValueError("table needs matching sample arrays of length >= 2")
        if not np.all(np.diff(rs) > 0):
            raise ValueError("table abscissae must be strictly increasing")
        if not np.all(values > 0):
            raise ValueError("table values must be positive")
        if np.any(np.diff(values) < 0):
            raise ValueError("table values must be nondecreasing")
        self.rs = rs
        self.values = values
        self._lx = np.log(rs)
        self._ly = np.log(values)
        # collapse exactly repeated values so end slopes are well defined
        self._lo_slope = self._end_slope(head=True)
        self._hi_slope = self._end_slope(head=False)

    def _end_slope(self, head: bool) -> float:
        lx, ly = self._lx, self._ly
        if head:
            for k in range(1, lx.size):
                if ly[k] > ly[0]:
                    return (ly[k] - ly[0]) / (lx[k] - lx[0])
        else:
            for k in range(lx.size - 2, -1, -1):
                if ly[k] < ly[-1]:
                    return (ly[-1] - ly[k]) / (lx[-1] - lx[k])
        return 0.0

    @property
    def index(self) -> float:
        return self._hi_slope

    def __call__(self, r):
        r = np.asarray(r, float)
        if np.any(r <= 0):
            raise ValueError("table form is defined for positive arguments")
        lx = np.log(r)
        out = np.interp(lx, self._lx, self._ly)
        below = lx < self._lx[0]
        above = lx > self._lx[-1]
        if np.any(below):
            out = np.where(below, self._ly[0] + self._lo_slope * (lx - self._lx[0]), out)
        if np.any(above):
            out = np.where(above, self._ly[-1] + self._hi_slope * (lx - self._lx[-1]), out)
        return np.exp(out)


class ComposedLaw:
    """outer(inner(r)); index multiplies, used for predicted envelopes."""

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner

    @property
    def index(self) -> float:
        return self.outer.index * self.inner.index

    def __call__(self, r):
        return self.outer(self.inner(r))


class IteratedInverseLaw:
    """Inverse of c r^rho L(r) with the slowly varying part L iterated out.

    Solving c r**rho L(r) = x as the fixed point r = (x / (c L(r)))**(1/rho);
    L varies slowly, so a handful of iterations leaves f(g(x))/x within
    rounding of 1 at any usable x, where the one-shot first-order correction
    would still be far off (it converges only like 1 - loglog x / log x).
    """

    def __init__(self, f: "PowerLogLaw", iterations: int = 6):
        self.f = f
        self.iterations = iterations
        self.index = 1.0 / f.index

    def _slow_part(self, r):
        out = np.ones_like(r)
        if self.f.log_exp:
            out = out * np.power(np.log(math.e + r), self.f.log_exp)
        if self.f.loglog_exp:
            out = out * np.power(np.log(np.log(math.exp(math.e) + r)), self.f.loglog_exp)
        return out

    def __call__(self, x):
        x = np.asarray(x, float)
        inv_rho = 1.0 / self.f.index
        r = np.power(x / self.f.scale, inv_rho)
        for _ in range(self.iterations):
            r = np.power(x / (self.f.scale * self._slow_part(r)), inv_rho)
        return r


# ---------------------------------------------------------------------------
# moduli of continuity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerModulus:
    """omega(delta) = scale * delta**exponent with exponent in (0, 1]."""

    exponent: float
    scale: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.exponent <= 1.0):
            raise ValueError("modulus exponent must lie in (0, 1]")
        if self.scale <= 0:
            raise ValueError("modulus scale must be positive")

    def __call__(self, delta):
        return self.scale * np.power(np.asarray(delta, float), self.exponent)

    def envelope_exact(self, r: float) -> float:
        # x * c x^a = 1/r  =>  Gamma = (c r)**(1/(1+a))
        return (self.scale * r) ** (1.0 / (1.0 + self.exponent))


class TableModulus(TableLaw):
    """Estimated modulus: a nondecreasing positive table near 0."""

    def __init__(self, deltas, values):
        values = np.asarray(values, float)
        if np.any(values <= 0):
            raise ValueError("modulus table must be strictly positive; "
                             "a vanishing modulus means a constant angle")
        super().__init__(deltas, values)


class InverseEnvelopeModulus:
    """The modulus whose growth envelope is exactly a given increasing g.

    omega(x) = 1 / (x * g^{-1}(1/x)); by construction growth_envelope(omega, r)
    equals g(r), so sharpness constructions can prescribe their envelope.
    """

    def __init__(self, g):
        self.g = g

    def __call__(self, delta):
        delta = np.asarray(delta, float)
        out = np.empty(delta.shape)
        flat = delta.ravel()
        res = out.ravel()
        for i, d in enumerate(flat):
            if d <= 0:
                raise ValueError("modulus argument must be positive")
            res[i] = 1.0 / (d * _monotone_inverse(self.g, 1.0 / d))
        return out if delta.shape else float(res[0])

    def envelope_exact(self, r: float) -> float:
        return float(self.g(np.asarray(r, float)))


def envelope_prescribed_modulus(g):
    """The modulus whose growth envelope is exactly g.

    For a pure power g(r) = c r**rho this is the power modulus
    c**(1/rho) * x**(1/rho - 1); other increasing forms go through the
    generic numeric inversion.
    """
    if isinstance(g, PowerLaw):
        return PowerModulus(1.0 / g.index - 1.0, g.scale ** (1.0 / g.index))
    return InverseEnvelopeModulus(g)


def _scalar(f, x: float) -> float:
    return float(np.asarray(f(np.asarray(x))).reshape(-1)[0])


def _monotone_inverse(f, y: float, lo: float = 1e-300, hi: float = 1e300) -> float:
    """Solve f(x) = y for an increasing positive f by log-space bisection."""
    llo, lhi = math.log(lo), math.log(hi)
    # bracket
    a, b = 0.0, 0.0
    x = 1.0
    fa = _scalar(f, x)
    if fa < y:
        a = math.log(x)
        while True:
            x *= 8.0
            if math.log(x) > lhi:
                raise ValueError("monotone inverse: no upper bracket")
            if _scalar(f, x) >= y:
                b = math.log(x)
                break
    else:
        b = math.log(x)
        while True:
            x /= 8.0
            if math.log(x) < llo:
                raise ValueError("monotone inverse: no lower bracket")
            if _scalar(f, x) <= y:
                a = math.log(x)
                break
    for _ in range(200):
        mid = 0.5 * (a + b)
        if _scalar(f, math.exp(mid)) < y:
            a = mid
        else:
            b = mid
        if b - a <= 1e-14 * max(1.0, abs(b)):
            break
    return math.exp(0.5 * (a + b))


def growth_envelope(omega, r: float) -> float:
    """Gamma(r) = 1/x where x * omega(x) = 1/r, solved to relative 1e-12.

    Power moduli use the closed form; anything else goes through log-space
    bisection of the increasing bijection x -> x * omega(x).
    """
    if not (r > 0.0):
        raise ValueError("envelope argument must be positive")
    exact = getattr(omega, "envelope_exact", None)
    if exact is not None:
        return float(exact(r))
    x = _monotone_inverse(lambda t: t * omega(t), 1.0 / r)
    return 1.0 / x


def modulus_from_envelope(gamma_fn, delta: float) -> float:
    """Recover omega(delta) = 1/(delta * Gamma^{-1}(1/delta)) from an envelope."""
    if delta <= 0:
        raise ValueError("modulus argument must be positive")
    r = _monotone_inverse(lambda t: np.asarray([gamma_fn(float(t))]), 1.0 / delta)
    return 1.0 / (delta * r)


# ---------------------------------------------------------------------------
# asymptotic inverses
# ---------------------------------------------------------------------------

def asymptotic_inverse(f, check_range=(10.0, 1e12)):
    """A regularly varying g with f(g(x)) ~ g(f(x)) ~ x.

    Power forms invert exactly; power-log forms keep first-order log
    corrections; tables invert by swapping the sample axes.  The returned
    object carries .checked_from, the first scanned x from which
    f(g(x))/x stayed inside [0.9, 1.1].
    """
    if f.index <= 0:
        raise ValueError("asymptotic inverse requires a positive index")
    if isinstance(f, PowerLaw):
        g = PowerLaw(1.0 / f.index, f.scale ** (-1.0 / f.index))
    elif isinstance(f, PowerLogLaw):
        g = IteratedInverseLaw(f)
    elif isinstance(f, TableLaw):
        g = TableLaw(f.values, f.rs)
    else:
        raise TypeError(f"cannot invert form {type(f)!r}")
    xs = np.geomspace(check_range[0], check_range[1], 60)
    checked_from = math.inf
    ok_from = None
    for x in xs:
        try:
            ratio = float(f(np.asarray(g(np.asarray(x))))) / x
        except ValueError:
            ok_from = None
            continue
        if 0.9 <= ratio <= 1.1:
            if ok_from is None:
                ok_from = x
        else:
            ok_from = None
    if ok_from is not None:
        checked_from = ok_from
    object.__setattr__(g, "checked_from", checked_from)
    return g


def compose(outer, inner) -> ComposedLaw:
    return ComposedLaw(outer, inner)


# ---------------------------------------------------------------------------
# modulus estimation and the geometric-mean ratio
# ---------------------------------------------------------------------------

def estimate_modulus(profile, delta_grid, *, t_floor: float = 0.0,
                     min_points: int = 1 << 16, points_per_delta: int = 1000,
                     max_points: int = 1 << 24) -> TableModulus:
    """Sliding-window estimate of sup |phi(t) - phi(s)| over |t - s| <= delta.

    The angle is sampled on a uniform grid with at least points_per_delta
    points per smallest delta (capped at max_points); each window statistic
    is a moving max minus moving min, so the estimate is a true lower bound
    of the modulus and nondecreasing in delta by construction.
    """
    deltas = np.asarray(delta_grid, float)
    if deltas.size < 1 or np.any(deltas <= 0) or np.any(np.diff(deltas) <= 0):
        raise ValueError("delta grid must be positive and increasing")
    a, b = profile.domain
    a = max(a, t_floor)
    if not (a < b):
        raise ValueError("evaluation floor leaves an empty domain")
    span = b - a
    n = int(min(max(min_points, math.ceil(points_per_delta * span / deltas[0])), max_points))
    ts = np.linspace(a, b, n)
    vals = profile.phi(ts)
    h = span / (n - 1)
    out = np.empty(deltas.size)
    for i, d in enumerate(deltas):
        w = max(int(math.floor(d / h)) + 1, 2)
        if w >= n:
            out[i] = float(vals.max() - vals.min())
            continue
        hi = maximum_filter1d(vals, size=w, mode="nearest")
        lo = minimum_filter1d(vals, size=w, mode="nearest")
        out[i] = float((hi - lo).max())
    out = np.maximum.accumulate(out)
    if out[0] <= 0.0:
        raise ValueError("estimated modulus vanishes: the angle is constant at this resolution")
    return TableModulus(deltas, out)


def geometric_mean_ratio(f, n: int) -> float:
    """e**index * (prod f(j), j<=n)**(1/n) / f(n), accumulated in log space.

    Tends to 1 as n grows for any regularly varying f; f must be positive
    and evaluable on the integers 1..n and expose its index.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    js = np.arange(1, n + 1, dtype=float)
    vals = np.asarray(f(js), float)
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("law must be positive and finite on 1..n")
    logs = np.log(vals)
    mean = float(np.mean(logs))
    return math.exp(f.index + mean - logs[-1])
