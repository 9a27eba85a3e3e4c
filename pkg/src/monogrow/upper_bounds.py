"""Upper bounds for log||W(z)|| from partition / frame / distortion data.

Given a partition y_0 < ... < y_N of the base interval, frame angles psi_j
and distortions a_j in (0, 1], the bound is

    log||W(z)|| <= |z| (aligned + mismatch) + transitions + endpoints

with
    aligned     = sum a_j^2   int cos^2(phi - psi_j) dTr,
    mismatch    = sum a_j^-2  int sin^2(phi - psi_j) dTr,
    transitions = sum log( max(a_j/a_{j+1}, a_{j+1}/a_j) |cos(psi_j - psi_{j+1})|
                           + |sin(psi_j - psi_{j+1})| / (a_j a_{j+1}) ),
    endpoints   = -log a_1 - log a_N.

All integrals reduce to per-cell (mass, complex moment) pairs
(int dTr, int e^{2 i phi} dTr), which are exact for Hamburger specs and for
piecewise-linear angle data, and adaptive quadrature otherwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from monogrow._quad import adaptive_simpson, complex_adaptive_simpson
from monogrow.hamiltonian import (
    AngleProfile,
    ConstFn,
    ConstantMatrixSpec,
    DiagonalSpec,
    HamburgerSpec,
    PolylineFn,
    StepFn,
    hamburger_from_diagonal,
    total_trace_mass,
)
from monogrow.mat2 import frame_norms
from monogrow.regvar import growth_envelope

A_FLOOR = 1e-8


@dataclass(frozen=True)
class BoundData:
    """Partition, frame angles and distortions feeding the bound."""

    partition: np.ndarray
    frames: np.ndarray
    distortions: np.ndarray

    def __post_init__(self):
        part = np.asarray(self.partition, float)
        frames = np.asarray(self.frames, float)
        dist = np.asarray(self.distortions, float)
        object.__setattr__(self, "partition", part)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "distortions", dist)
        if part.ndim != 1 or part.size < 2:
            raise ValueError("partition needs at least two points")
        if not np.all(np.diff(part) > 0):
            raise ValueError("partition must be strictly increasing")
        n = part.size - 1
        if frames.size != n or dist.size != n:
            raise ValueError("frames and distortions must have one entry per cell")
        if not np.all((dist > 0) & (dist <= 1.0)):
            raise ValueError("distortions must lie in (0, 1]")

    @property
    def cells(self) -> int:
        return int(self.partition.size - 1)


@dataclass(frozen=True)
class BoundValue:
    aligned: float
    mismatch: float
    transitions: float
    endpoints: float

    def __post_init__(self):
        for name in ("aligned", "mismatch", "transitions", "endpoints"):
            v = getattr(self, name)
            if v < -1e-12 or not math.isfinite(v):
                raise ValueError(f"bound part {name} must be nonnegative, got {v}")

    def total_at(self, z_abs: float) -> float:
        return abs(z_abs) * (self.aligned + self.mismatch) + self.transitions + self.endpoints


# ---------------------------------------------------------------------------
# cell integrals
# ---------------------------------------------------------------------------

def _linear_cells(profile: AngleProfile):
    """(t0, t1, slope, phi_at_t0, density) piece arrays, or None."""
    phi, dens = profile.phi, profile.density
    if not isinstance(phi, (ConstFn, StepFn, PolylineFn)):
        return None
    if not isinstance(dens, (ConstFn, StepFn)):
        return None
    a, b = profile.domain
    edges = np.unique(np.concatenate([[a, b], phi.breakpoints(), dens.breakpoints()]))
    edges = edges[(edges >= a) & (edges <= b)]
    t0, t1 = edges[:-1], edges[1:]
    mid = 0.5 * (t0 + t1)
    d = dens(mid)
    if isinstance(phi, PolylineFn):
        v0, v1 = phi(t0), phi(t1)
        slope = (v1 - v0) / (t1 - t0)
        phi0 = v0
    else:
        slope = np.zeros_like(t0)
        phi0 = phi(mid)
    return t0, t1, slope, phi0, d


def _hamburger_cells(spec: HamburgerSpec):
    b = spec.boundaries()
    return b[:-1], b[1:], np.zeros(spec.count), spec.angles, np.ones(spec.count)


def _moment_over(cells, a: float, b: float) -> tuple[float, complex]:
    """(mass, int e^{2 i phi} dTr) over [a, b] from linear-angle pieces."""
    t0, t1, slope, phi0, dens = cells
    lo = np.maximum(t0, a)
    hi = np.minimum(t1, b)
    sel = hi > lo
    if not np.any(sel):
        return 0.0, 0.0j
    lo, hi = lo[sel], hi[sel]
    k, p0, d, s0 = slope[sel], phi0[sel], dens[sel], t0[sel]
    dt = hi - lo
    mass = float(np.sum(d * dt))
    phi_lo = p0 + k * (lo - s0)
    base = d * np.exp(2j * phi_lo)
    mom = np.where(
        k == 0.0,
        base * dt,
        base * np.where(k == 0.0, 1.0, (np.exp(2j * k * dt) - 1.0) / (2j * np.where(k == 0.0, 1.0, k))),
    )
    return mass, complex(np.sum(mom))


_ABS_SIN_FLOOR = None


def _abs_sin_antiderivative(x):
    # F(x) = int_0^x |sin u| du, unfolded over the pi-periodicity
    n = np.floor(x / math.pi)
    return 2.0 * n + 1.0 - np.cos(x - math.pi * n)


def _abs_sin_over(cells, a: float, b: float, frame: float) -> float:
    """int |sin(phi - frame)| dTr over [a, b] from linear-angle pieces."""
    t0, t1, slope, phi0, dens = cells
    lo = np.maximum(t0, a)
    hi = np.minimum(t1, b)
    sel = hi > lo
    if not np.any(sel):
        return 0.0
    lo, hi = lo[sel], hi[sel]
    k, p0, d, s0 = slope[sel], phi0[sel], dens[sel], t0[sel]
    phi_lo = p0 + k * (lo - s0) - frame
    phi_hi = p0 + k * (hi - s0) - frame
    flat = np.abs(np.sin(phi_lo)) * (hi - lo)
    with np.errstate(divide="ignore", invalid="ignore"):
        ramp = (_abs_sin_antiderivative(phi_hi) - _abs_sin_antiderivative(phi_lo)) / np.where(k == 0.0, 1.0, k)
    vals = d * np.where(k == 0.0, flat, ramp)
    return float(np.sum(vals))


class _CellIntegrals:
    """Per-partition (mass, moment) provider for a det-zero spec."""

    def __init__(self, spec):
        if isinstance(spec, DiagonalSpec):
            spec = hamburger_from_diagonal(spec)
        if isinstance(spec, HamburgerSpec):
            self.cells = _hamburger_cells(spec)
            self.profile = None
            self.domain = (0.0, spec.total_length)
            self.unit_density = True
        elif isinstance(spec, AngleProfile):
            self.cells = _linear_cells(spec)
            self.profile = spec
            self.domain = spec.domain
            self.unit_density = isinstance(spec.density, ConstFn) and spec.density.value == 1.0
        elif isinstance(spec, ConstantMatrixSpec):
            raise ValueError("the bound applies to det H = 0 specs only; "
                             "constant-matrix systems are settled by the eigenvalue density")
        else:
            raise TypeError(f"unsupported spec type {type(spec)!r}")

    def moments(self, partition: np.ndarray):
        n = partition.size - 1
        mass = np.empty(n)
        mom = np.empty(n, complex)
        for j in range(n):
            a, b = float(partition[j]), float(partition[j + 1])
            if self.cells is not None:
                mass[j], mom[j] = _moment_over(self.cells, a, b)
            else:
                prof = self.profile
                seeds = np.concatenate([prof.phi.breakpoints(), prof.density.breakpoints()])
                mass[j] = adaptive_simpson(lambda t: prof.density(t), a, b, 1e-12, seeds=seeds)
                mom[j] = complex_adaptive_simpson(
                    lambda t: prof.density(t) * np.exp(2j * prof.phi(t)), a, b, 1e-12, seeds=seeds
                )
        return mass, mom

    def abs_sin(self, partition: np.ndarray, frames: np.ndarray) -> np.ndarray:
        n = partition.size - 1
        out = np.empty(n)
        for j in range(n):
            a, b = float(partition[j]), float(partition[j + 1])
            if self.cells is not None:
                out[j] = _abs_sin_over(self.cells, a, b, float(frames[j]))
            else:
                prof = self.profile
                seeds = np.concatenate([prof.phi.breakpoints(), prof.density.breakpoints()])
                out[j] = adaptive_simpson(
                    lambda t: prof.density(t) * np.abs(np.sin(prof.phi(t) - frames[j])),
                    a, b, 1e-12, seeds=seeds,
                )
        return out


def _check_partition(data: BoundData, domain, tol_scale=1e-9):
    a, b = domain
    span = b - a
    if abs(data.partition[0] - a) > tol_scale * span or abs(data.partition[-1] - b) > tol_scale * span:
        raise ValueError("partition must span the spec's base interval")


def _transition_sum(frames, dist, exact=False):
    total = 0.0
    for j in range(frames.size - 1):
        dpsi = frames[j] - frames[j + 1]
        if exact:
            total += math.log(frame_norms(dist[j], frames[j], frames[j + 1], dist[j + 1]).transition)
        else:
            ratio = max(dist[j] / dist[j + 1], dist[j + 1] / dist[j])
            total += math.log(ratio * abs(math.cos(dpsi)) + abs(math.sin(dpsi)) / (dist[j] * dist[j + 1]))
    return total


def evaluate_bound(spec, data: BoundData, exact_transitions: bool = False) -> BoundValue:
    """Evaluate the four bound parts for the given data.

    exact_transitions replaces each transition summand by the exact norm of
    the frame-change matrix; the gain is at most (N-1)/2 * log 2.
    """
    integ = _CellIntegrals(spec)
    _check_partition(data, integ.domain)
    mass, mom = integ.moments(data.partition)
    rot = np.exp(-2j * data.frames)
    proj = np.real(rot * mom)
    a2 = data.distortions ** 2
    aligned = float(np.sum(a2 * 0.5 * (mass + proj)))
    mismatch = float(np.sum(0.5 * (mass - proj) / a2))
    transitions = _transition_sum(data.frames, data.distortions, exact_transitions)
    endpoints = -math.log(data.distortions[0]) - math.log(data.distortions[-1])
    return BoundValue(max(aligned, 0.0), max(mismatch, 0.0), max(transitions, 0.0), max(endpoints, 0.0))


# ---------------------------------------------------------------------------
# the continuity recipe
# ---------------------------------------------------------------------------

def modulus_recipe(profile: AngleProfile, z_abs: float, modulus) -> tuple[BoundData, BoundValue]:
    """Equidistant data generated from the modulus of continuity.

    delta = 1 / envelope((L/l) |z|) and a = sqrt(omega(delta)); frames are the
    angle at the right cell ends.  The returned value is the budget form, for
    which |z|*aligned = |z|*mismatch = transitions = l/delta holds exactly and
    the total equals 3 l Gamma((L/l)|z|) + log(1/omega(delta)).
    """
    if not (z_abs > 0):
        raise ValueError("radius must be positive")
    a0, b0 = profile.domain
    l, L = total_trace_mass(profile)
    delta = 1.0 / growth_envelope(modulus, (L / l) * z_abs)
    omega_delta = float(modulus(np.asarray(delta)))
    if not (delta < l):
        raise ValueError(f"radius too small for the recipe: delta={delta:.3g} >= l={l:.3g}")
    if not (omega_delta <= 1.0):
        raise ValueError(f"radius too small for the recipe: omega(delta)={omega_delta:.3g} > 1")
    if omega_delta <= 0.0:
        raise ValueError("modulus must be positive at positive arguments")
    n = int(math.ceil(l / delta))
    part = np.empty(n + 1)
    part[: n] = a0 + delta * np.arange(n)
    part[n] = b0
    frames = profile.phi(part[1:])
    a = math.sqrt(omega_delta)
    data = BoundData(part, frames, np.full(n, a))
    budget = BoundValue(
        omega_delta * L,
        omega_delta * L,
        l / delta,
        -2.0 * math.log(a),
    )
    return data, budget


# ---------------------------------------------------------------------------
# power-law order conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderConditionRow:
    r: float
    lhs: tuple[float, float, float, float]
    limits: tuple[float, float, float, float]

    @property
    def ok(self) -> tuple[bool, bool, bool, bool]:
        return tuple(l <= c for l, c in zip(self.lhs, self.limits))


@dataclass(frozen=True)
class OrderConditionsReport:
    d: float
    constant: float
    rows: tuple[OrderConditionRow, ...]

    @property
    def all_ok(self) -> bool:
        return all(all(row.ok) for row in self.rows)

    @property
    def implied_bound_constant(self) -> float:
        return 4.0 * self.constant

    def violations(self):
        out = []
        for row in self.rows:
            for i, ok in enumerate(row.ok):
                if not ok:
                    out.append((row.r, i + 1, row.lhs[i], row.limits[i]))
        return out


def check_order_conditions(spec, d: float, family: Callable[[float], BoundData],
                           C: float, r_grid: Sequence[float]) -> OrderConditionsReport:
    """Check the four power-law conditions implying log||W|| <= 4C |z|^d.

    Per radius r the data family must satisfy
      (1) sum a_j^-2 int |sin(phi - psi_j)| dt   <= C r^(d-1)
      (2) sum a_j^2 (y_j - y_{j-1})              <= C r^(d-1)
      (3) sum log(1 + |sin(psi_j - psi_{j+1})| / (a_j a_{j+1})) <= C r^d
      (4) -log a_1 - log a_N + sum |log(a_{j+1}/a_j)|           <= C r^(d-1)
    for a trace-normed spec (unit density).
    """
    if not (0.0 < d < 1.0):
        raise ValueError("the order exponent must lie in (0, 1)")
    integ = _CellIntegrals(spec)
    if not integ.unit_density:
        raise ValueError("order conditions require a trace-normed spec (density 1)")
    rows = []
    for r in r_grid:
        data = family(float(r))
        _check_partition(data, integ.domain)
        a = data.distortions
        s1 = float(np.sum(integ.abs_sin(data.partition, data.frames) / a ** 2))
        s2 = float(np.sum(a ** 2 * np.diff(data.partition)))
        dpsi = data.frames[:-1] - data.frames[1:]
        s3 = float(np.sum(np.log1p(np.abs(np.sin(dpsi)) / (a[:-1] * a[1:]))))
        s4 = float(-math.log(a[0]) - math.log(a[-1]) + np.sum(np.abs(np.log(a[1:] / a[:-1]))))
        low = C * r ** (d - 1.0)
        high = C * r ** d
        rows.append(OrderConditionRow(float(r), (s1, s2, s3, s4), (low, low, high, low)))
    return OrderConditionsReport(d, C, tuple(rows))


# ---------------------------------------------------------------------------
# per-radius optimization
# ---------------------------------------------------------------------------

def _golden_min(fn, lo: float, hi: float, iters: int = 70) -> tuple[float, float]:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv * (hi - lo)
    x2 = lo + inv * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if hi - lo < 1e-12:
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv * (hi - lo)
            f2 = fn(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _descend(integ: _CellIntegrals, partition: np.ndarray, z_abs: float,
             a_floor: float, rel_tol: float, max_sweeps: int):
    mass, mom = integ.moments(partition)
    frames = 0.5 * np.angle(np.where(mom == 0, 1.0, mom))
    proj = np.real(np.exp(-2j * frames) * mom)
    ic = np.maximum(0.5 * (mass + proj), 0.0)
    is_ = np.maximum(0.5 * (mass - proj), 0.0)
    n = mass.size
    dpsi = frames[:-1] - frames[1:] if n > 1 else np.empty(0)
    abs_cos = np.abs(np.cos(dpsi))
    abs_sin = np.abs(np.sin(dpsi))
    u = np.zeros(n)  # log distortions, start at a = 1
    lo = math.log(a_floor)

    def trans_term(j, uj, ujp1):
        return math.log(math.exp(abs(uj - ujp1)) * abs_cos[j] + abs_sin[j] * math.exp(-uj - ujp1))

    def total(uvec):
        t = z_abs * float(np.sum(ic * np.exp(2 * uvec)) + np.sum(is_ * np.exp(-2 * uvec)))
        for j in range(n - 1):
            t += trans_term(j, uvec[j], uvec[j + 1])
        return t - uvec[0] - uvec[-1]

    best = total(u)
    for _ in range(max_sweeps):
        for j in range(n):
            def local(uj):
                t = z_abs * (ic[j] * math.exp(2 * uj) + is_[j] * math.exp(-2 * uj))
                if j > 0:
                    t += trans_term(j - 1, u[j - 1], uj)
                if j < n - 1:
                    t += trans_term(j, uj, u[j + 1])
                if j == 0:
                    t -= uj
                if j == n - 1:
                    t -= uj
                return t

            u_best, f_best = _golden_min(local, lo, 0.0)
            if f_best < local(u[j]):
                u[j] = u_best
        now = total(u)
        if best - now <= rel_tol * (1.0 + abs(now)):
            best = min(best, now)
            break
        best = now
    a = np.exp(u)
    data = BoundData(partition, frames, a)
    value = BoundValue(
        float(np.sum(ic * a ** 2)),
        float(np.sum(is_ / a ** 2)),
        max(sum(trans_term(j, u[j], u[j + 1]) for j in range(n - 1)), 0.0),
        float(-u[0] - u[-1]),
    )
    return data, value


def optimize_bound(spec, z_abs: float, strategy: str = "dyadic_scan", *,
                   modulus=None, max_dyadic_exp: int = 6, a_floor: float = A_FLOOR,
                   rel_tol: float = 1e-6, max_sweeps: int = 60):
    """Pick bound data for a fixed radius.

    recipe            - the modulus recipe (profiles with a modulus only);
    coordinate_descent- circular-mean frames on a fixed partition, then cyclic
                        golden-section over each log-distortion (floored at
                        a_floor, since the total need not be coercive as
                        interior distortions vanish);
    dyadic_scan       - coordinate descent over equidistant partitions of
                        2^0..2^K cells plus, when a modulus is available, the
                        recipe data; smallest cell count wins ties.
    """
    if not (z_abs > 0):
        raise ValueError("radius must be positive")
    integ = _CellIntegrals(spec)

    recipe_result = None
    if isinstance(spec, AngleProfile) and modulus is not None:
        try:
            recipe_result = modulus_recipe(spec, z_abs, modulus)
        except ValueError:
            recipe_result = None

    if strategy == "recipe":
        if not isinstance(spec, AngleProfile):
            raise ValueError("the recipe strategy applies to angle profiles only")
        if modulus is None:
            raise ValueError("the recipe strategy needs a modulus of continuity")
        return modulus_recipe(spec, z_abs, modulus)

    if strategy == "coordinate_descent":
        if isinstance(spec, (HamburgerSpec, DiagonalSpec)):
            ham = hamburger_from_diagonal(spec) if isinstance(spec, DiagonalSpec) else spec
            partition = ham.boundaries()
        else:
            if recipe_result is None:
                raise ValueError("profile coordinate descent needs a feasible recipe partition")
            partition = recipe_result[0].partition
        data, value = _descend(integ, partition, z_abs, a_floor, rel_tol, max_sweeps)
        if recipe_result is not None:
            rec_eval = evaluate_bound(spec, recipe_result[0])
            if rec_eval.total_at(z_abs) < value.total_at(z_abs):
                data, value = recipe_result[0], rec_eval
        return data, value

    if strategy == "dyadic_scan":
        a0, b0 = integ.domain
        candidates = []
        for k in range(max_dyadic_exp + 1):
            cells = 1 << k
            partition = np.linspace(a0, b0, cells + 1)
            candidates.append(_descend(integ, partition, z_abs, a_floor, rel_tol, max_sweeps))
        if recipe_result is not None:
            rec_data, _ = recipe_result
            candidates.append((rec_data, evaluate_bound(spec, rec_data)))
            candidates.append(_descend(integ, rec_data.partition, z_abs, a_floor, rel_tol, max_sweeps))
        best = min(
            range(len(candidates)),
            key=lambda i: (candidates[i][1].total_at(z_abs), candidates[i][0].cells),
        )
        return candidates[best]

    raise ValueError(f"unknown strategy {strategy!r}")
