"""Hamiltonian representations on a compact interval and their transforms.

Four spec kinds are supported:

* HamburgerSpec      - piecewise-constant rotation angle (lengths + angles),
* AngleProfile       - H(t) = density(t) * xi_phi(t) xi_phi(t)^T with an
                       evaluable angle map and trace density,
* DiagonalSpec       - H = diag(h1, h2) with {0,1}-valued indicator steps,
* ConstantMatrixSpec - a constant positive semidefinite matrix.

Angle/density maps are small named forms (constant, power, chirp, polygon
tables, steps) so the standard families evaluate exactly; a generic
piecewise-linear table covers user data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from monogrow._quad import adaptive_simpson


# ---------------------------------------------------------------------------
# profile function forms
# ---------------------------------------------------------------------------

class ConstFn:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, t):
        t = np.asarray(t, float)
        return np.full(t.shape, self.value)

    def breakpoints(self):
        return np.empty(0)

    def definite_integral(self, a, b):
        return self.value * (b - a)

    def compose_power(self, kappa):
        return self

    def __repr__(self):
        return f"ConstFn({self.value})"


class PowerFn:
    """c * t**p, defined as 0 at t = 0 for p > 0."""

    def __init__(self, coeff: float, exponent: float):
        self.coeff = float(coeff)
        self.exponent = float(exponent)

    def __call__(self, t):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.coeff * np.power(np.maximum(t, 0.0), self.exponent)
        if self.exponent > 0:
            out = np.where(t <= 0.0, 0.0, out)
        return out

    def breakpoints(self):
        return np.empty(0)

    def definite_integral(self, a, b):
        p1 = self.exponent + 1.0
        if p1 <= 0:
            raise ValueError("power density is not integrable at 0")
        return self.coeff * (b ** p1 - a ** p1) / p1

    def compose_power(self, kappa):
        return PowerFn(self.coeff, self.exponent * kappa)

    def __repr__(self):
        return f"PowerFn({self.coeff}, {self.exponent})"


class PolylineFn:
    """Piecewise-linear interpolation through strictly increasing nodes."""

    def __init__(self, ts, values):
        self.ts = np.asarray(ts, float)
        self.values = np.asarray(values, float)
        if self.ts.ndim != 1 or self.ts.size < 2 or self.ts.size != self.values.size:
            raise ValueError("polyline needs matching node arrays of length >= 2")
        if not np.all(np.diff(self.ts) > 0):
            raise ValueError("polyline nodes must be strictly increasing")
        if not (np.all(np.isfinite(self.ts)) and np.all(np.isfinite(self.values))):
            raise ValueError("polyline nodes must be finite")

    def __call__(self, t):
        return np.interp(np.asarray(t, float), self.ts, self.values)

    def breakpoints(self):
        return self.ts[1:-1].copy()

    def definite_integral(self, a, b):
        grid = np.unique(np.concatenate([[a, b], self.ts[(self.ts > a) & (self.ts < b)]]))
        vals = self(grid)
        return float(np.trapz(vals, grid))

    def compose_power(self, kappa):
        return PowerCompose(self, kappa)

    def __repr__(self):
        return f"PolylineFn(<{self.ts.size} nodes>)"


class StepFn:
    """Right-continuous step function on edges[0] <= ... <= edges[K]."""

    def __init__(self, edges, values):
        self.edges = np.asarray(edges, float)
        self.values = np.asarray(values, float)
        if self.edges.size != self.values.size + 1:
            raise ValueError("step function needs len(edges) == len(values) + 1")
        if not np.all(np.diff(self.edges) > 0):
            raise ValueError("step edges must be strictly increasing")

    def __call__(self, t):
        t = np.asarray(t, float)
        idx = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, self.values.size - 1)
        return self.values[idx]

    def breakpoints(self):
        return self.edges[1:-1].copy()

    def definite_integral(self, a, b):
        lo = np.maximum(self.edges[:-1], a)
        hi = np.minimum(self.edges[1:], b)
        return float(np.sum(self.values * np.maximum(hi - lo, 0.0)))

    def compose_power(self, kappa):
        return StepFn(np.power(self.edges, 1.0 / kappa), self.values)

    def __repr__(self):
        return f"StepFn(<{self.values.size} steps>)"


class ChirpFn:
    """t**gamma * sin(t**-beta) on (0, 1], zero at the origin."""

    def __init__(self, gamma: float, beta: float):
        if gamma <= 0 or beta <= 0:
            raise ValueError("chirp exponents must be positive")
        self.gamma = float(gamma)
        self.beta = float(beta)

    def __call__(self, t):
        t = np.asarray(t, float)
        out = np.zeros(t.shape)
        pos = t > 0.0
        tp = t[pos]
        out[pos] = tp ** self.gamma * np.sin(tp ** (-self.beta))
        return out

    def breakpoints(self):
        return np.empty(0)

    def compose_power(self, kappa):
        return ChirpFn(self.gamma * kappa, self.beta * kappa)

    def __repr__(self):
        return f"ChirpFn({self.gamma}, {self.beta})"


class PowerCompose:
    """base(t**kappa); used when composition has no simpler closed form."""

    def __init__(self, base, kappa: float):
        self.base = base
        self.kappa = float(kappa)

    def __call__(self, t):
        t = np.asarray(t, float)
        return self.base(np.power(np.maximum(t, 0.0), self.kappa))

    def breakpoints(self):
        inner = self.base.breakpoints()
        return np.power(inner[inner > 0], 1.0 / self.kappa)

    def compose_power(self, kappa):
        return PowerCompose(self.base, self.kappa * kappa)

    def __repr__(self):
        return f"PowerCompose({self.base!r}, {self.kappa})"


class ReparamDensity:
    """kappa * t**(kappa-1) * base(t**kappa): the density pushforward."""

    def __init__(self, base, kappa: float):
        self.base = base
        self.kappa = float(kappa)

    def __call__(self, t):
        t = np.asarray(t, float)
        tk = np.power(np.maximum(t, 0.0), self.kappa)
        return self.kappa * np.power(np.maximum(t, 0.0), self.kappa - 1.0) * self.base(tk)

    def breakpoints(self):
        inner = self.base.breakpoints()
        return np.power(inner[inner > 0], 1.0 / self.kappa)

    def definite_integral(self, a, b):
        # substitution u = t**kappa makes this the base integral
        return fn_integral(self.base, a ** self.kappa, b ** self.kappa)

    def __repr__(self):
        return f"ReparamDensity({self.base!r}, {self.kappa})"


ProfileFn = Union[ConstFn, PowerFn, PolylineFn, StepFn, ChirpFn, PowerCompose, ReparamDensity]


def fn_integral(fn, a: float, b: float, tol: float = 1e-10) -> float:
    """Definite integral of a profile form; closed form when available."""
    if b <= a:
        return 0.0
    direct = getattr(fn, "definite_integral", None)
    if direct is not None:
        return float(direct(a, b))
    seeds = fn.breakpoints()
    return adaptive_simpson(lambda t: fn(t), a, b, tol=tol, seeds=seeds)


# ---------------------------------------------------------------------------
# spec kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HamburgerSpec:
    """Piecewise-constant angle: segment lengths l_j > 0 and angles phi_j."""

    lengths: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        lengths = np.asarray(self.lengths, float)
        angles = np.asarray(self.angles, float)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "angles", angles)
        if lengths.ndim != 1 or lengths.size < 1 or lengths.size != angles.size:
            raise ValueError("lengths and angles must be 1-d arrays of equal length >= 1")
        if not np.all(np.isfinite(lengths)) or not np.all(np.isfinite(angles)):
            raise ValueError("lengths and angles must be finite")
        if not np.all(lengths > 0):
            raise ValueError("all segment lengths must be strictly positive")

    @property
    def count(self) -> int:
        return int(self.lengths.size)

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())

    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.lengths)])


@dataclass(frozen=True)
class AngleProfile:
    """H(t) = density(t) * xi_phi(t) xi_phi(t)^T on [domain[0], domain[1]]."""

    domain: tuple[float, float]
    phi: ProfileFn
    density: ProfileFn = field(default_factory=lambda: ConstFn(1.0))

    def __post_init__(self):
        a, b = self.domain
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError("profile domain must be a finite interval [a, b] with a < b")
        probe = np.linspace(a, b, 17)
        if not np.all(np.isfinite(self.phi(probe))):
            raise ValueError("angle map must be finite on the domain")
        dens = self.density(probe[1:])
        if not np.all(np.isfinite(dens)) or not np.all(dens >= 0.0) or not np.any(dens > 0.0):
            raise ValueError("trace density must be nonnegative, finite and not identically zero")


@dataclass(frozen=True)
class DiagonalSpec:
    """H = diag(h1, h2), h1 the indicator of the given intervals, h2 = 1 - h1."""

    domain: tuple[float, float]
    h1_intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        a, b = self.domain
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError("diagonal domain must be a finite interval with a < b")
        ivs = tuple((float(x0), float(x1)) for x0, x1 in self.h1_intervals)
        object.__setattr__(self, "h1_intervals", ivs)
        prev = a
        for x0, x1 in ivs:
            if x0 < prev - 1e-12 or x1 <= x0 or x1 > b + 1e-12:
                raise ValueError("h1 intervals must be disjoint, increasing and inside the domain")
            prev = x1

    def h1_measure(self) -> float:
        return float(sum(x1 - x0 for x0, x1 in self.h1_intervals))


@dataclass(frozen=True)
class ConstantMatrixSpec:
    """Constant H(t) = M >= 0 on an interval of the given length."""

    matrix: np.ndarray
    length: float

    def __post_init__(self):
        m = np.asarray(self.matrix, float)
        object.__setattr__(self, "matrix", m)
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise ValueError("constant Hamiltonian must be a finite 2x2 matrix")
        if abs(m[0, 1] - m[1, 0]) > 1e-12 * (1.0 + np.abs(m).max()):
            raise ValueError("constant Hamiltonian must be symmetric")
        eigs = np.linalg.eigvalsh(m)
        if eigs[0] < -1e-12 * max(1.0, eigs[-1]):
            raise ValueError("constant Hamiltonian must be positive semidefinite")
        if np.abs(m).max() == 0.0:
            raise ValueError("constant Hamiltonian must be nonzero")
        if not (self.length > 0.0 and math.isfinite(self.length)):
            raise ValueError("length must be a positive real")


HamiltonianSpec = Union[HamburgerSpec, AngleProfile, DiagonalSpec, ConstantMatrixSpec]


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def reparameterize(profile: AngleProfile, kappa_exponent: float) -> AngleProfile:
    """Pull the profile back along t -> t**kappa on [0, 1].

    The angle becomes phi(t**kappa) and the density picks up the Jacobian
    kappa * t**(kappa-1); the monodromy matrix is unchanged.
    """
    a, b = profile.domain
    if abs(a) > 1e-12 or abs(b - 1.0) > 1e-12:
        raise ValueError("reparameterization requires the domain [0, 1]")
    if not (kappa_exponent > 1.0):
        raise ValueError("reparameterization exponent must exceed 1")
    kappa = float(kappa_exponent)
    new_phi = profile.phi.compose_power(kappa)
    dens = profile.density
    if isinstance(dens, ConstFn):
        new_dens = PowerFn(dens.value * kappa, kappa - 1.0)
    elif isinstance(dens, PowerFn):
        new_dens = PowerFn(dens.coeff * kappa, dens.exponent * kappa + kappa - 1.0)
    else:
        new_dens = ReparamDensity(dens, kappa)
    return AngleProfile((0.0, 1.0), new_phi, new_dens)


def cut(spec: HamburgerSpec, keep) -> HamburgerSpec:
    """Keep the listed segments (1-based indices) in their original order.

    This realizes, at the Hamiltonian level, the removal of the complementary
    union of whole indivisible segments followed by reparameterization onto
    [0, sum of kept lengths].  Cuts through the interior of a segment are not
    meaningful here and are rejected by construction.
    """
    idx = sorted(set(int(k) for k in keep))
    if not idx:
        raise ValueError("keep set must be nonempty")
    if idx[0] < 1 or idx[-1] > spec.count:
        raise ValueError(f"segment indices must lie in 1..{spec.count}")
    sel = np.array(idx, int) - 1
    return HamburgerSpec(spec.lengths[sel], spec.angles[sel])


def diagonal_to_profile(spec: DiagonalSpec) -> AngleProfile:
    """Convert diag(h1, h2) to the angle form of [[1, -m], [-m, m^2]].

    Time is rescaled by x = integral of h1; each h2 stretch collapses to a
    jump of the nondecreasing step function m, and the profile on
    [0, h1-measure] has angle -arctan(m) and trace density 1 + m^2.
    """
    total_h1 = spec.h1_measure()
    if total_h1 <= 0.0:
        raise ValueError("h1 must not vanish almost everywhere")
    a, b = spec.domain
    edges = [0.0]
    m_values = []
    x = 0.0
    m_acc = 0.0
    prev = a
    for x0, x1 in spec.h1_intervals:
        if x0 > prev:
            m_acc += x0 - prev  # h2 stretch compresses to a jump at x
        edges.append(x + (x1 - x0))
        m_values.append(m_acc)
        x += x1 - x0
        prev = x1
    # a trailing h2 stretch would jump at the right endpoint: no effect
    edges = np.asarray(edges)
    m_values = np.asarray(m_values)
    phi = StepFn(edges, -np.arctan(m_values))
    dens = StepFn(edges, 1.0 + m_values ** 2)
    return AngleProfile((0.0, float(edges[-1])), phi, dens)


def hamburger_from_diagonal(spec: DiagonalSpec) -> HamburgerSpec:
    """Diagonal indicator specs are piecewise constant of angle 0 or pi/2."""
    a, b = spec.domain
    lengths = []
    angles = []
    prev = a
    for x0, x1 in spec.h1_intervals:
        if x0 > prev + 1e-15:
            lengths.append(x0 - prev)
            angles.append(math.pi / 2)
        lengths.append(x1 - x0)
        angles.append(0.0)
        prev = x1
    if b > prev + 1e-15:
        lengths.append(b - prev)
        angles.append(math.pi / 2)
    return HamburgerSpec(np.asarray(lengths), np.asarray(angles))


def profile_from_hamburger(spec: HamburgerSpec) -> AngleProfile:
    """Step-angle profile with unit density; useful for cross checks."""
    edges = spec.boundaries()
    return AngleProfile((0.0, float(edges[-1])), StepFn(edges, spec.angles.copy()))


def total_trace_mass(spec: HamiltonianSpec) -> tuple[float, float]:
    """(domain length, integral of Tr H)."""
    if isinstance(spec, HamburgerSpec):
        total = spec.total_length
        return total, total
    if isinstance(spec, AngleProfile):
        a, b = spec.domain
        return b - a, fn_integral(spec.density, a, b)
    if isinstance(spec, DiagonalSpec):
        a, b = spec.domain
        return b - a, b - a
    if isinstance(spec, ConstantMatrixSpec):
        return spec.length, float(np.trace(spec.matrix)) * spec.length
    raise TypeError(f"unsupported spec type {type(spec)!r}")


# ---------------------------------------------------------------------------
# JSON document schema
# ---------------------------------------------------------------------------

def _require_keys(obj: dict, required: set[str], context: str, optional: set[str] = frozenset()):
    keys = set(obj)
    unknown = keys - required - optional
    if unknown:
        raise ValueError(f"unknown key {sorted(unknown)[0]!r} in {context}")
    missing = required - keys
    if missing:
        raise ValueError(f"missing key {sorted(missing)[0]!r} in {context}")


def _fn_from_json(obj: dict, context: str) -> ProfileFn:
    if not isinstance(obj, dict) or "name" not in obj:
        raise ValueError(f"{context} must be an object with a 'name' key")
    name = obj["name"]
    if name == "const":
        _require_keys(obj, {"name", "value"}, context)
        return ConstFn(float(obj["value"]))
    if name in ("table", "polygon"):
        _require_keys(obj, {"name", "t", "value"}, context)
        return PolylineFn(obj["t"], obj["value"])
    if name == "step":
        _require_keys(obj, {"name", "edges", "values"}, context)
        return StepFn(obj["edges"], obj["values"])
    if name == "chirp":
        _require_keys(obj, {"name", "gamma", "beta"}, context)
        return ChirpFn(float(obj["gamma"]), float(obj["beta"]))
    if name == "power":
        _require_keys(obj, {"name", "coeff", "exponent"}, context)
        return PowerFn(float(obj["coeff"]), float(obj["exponent"]))
    raise ValueError(f"unknown function form {name!r} in {context}")


def _fn_to_json(fn: ProfileFn) -> dict:
    if isinstance(fn, ConstFn):
        return {"name": "const", "value": fn.value}
    if isinstance(fn, PolylineFn):
        return {"name": "table", "t": fn.ts.tolist(), "value": fn.values.tolist()}
    if isinstance(fn, StepFn):
        return {"name": "step", "edges": fn.edges.tolist(), "values": fn.values.tolist()}
    if isinstance(fn, ChirpFn):
        return {"name": "chirp", "gamma": fn.gamma, "beta": fn.beta}
    if isinstance(fn, PowerFn):
        return {"name": "power", "coeff": fn.coeff, "exponent": fn.exponent}
    raise ValueError(f"function form {fn!r} has no JSON representation")


def spec_from_dict(doc: dict) -> HamiltonianSpec:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("system document must be an object with a 'kind' key")
    kind = doc["kind"]
    if kind == "hamburger":
        _require_keys(doc, {"kind", "lengths", "angles"}, "hamburger spec")
        return HamburgerSpec(np.asarray(doc["lengths"], float), np.asarray(doc["angles"], float))
    if kind == "profile":
        _require_keys(doc, {"kind", "domain", "phi"}, "profile spec", optional={"density"})
        domain = doc["domain"]
        if not (isinstance(domain, (list, tuple)) and len(domain) == 2):
            raise ValueError("profile domain must be a pair [a, b]")
        phi = _fn_from_json(doc["phi"], "profile phi")
        dens = _fn_from_json(doc["density"], "profile density") if "density" in doc else ConstFn(1.0)
        return AngleProfile((float(domain[0]), float(domain[1])), phi, dens)
    if kind == "diagonal":
        _require_keys(doc, {"kind", "domain", "h1_intervals"}, "diagonal spec")
        domain = doc["domain"]
        ivs = tuple((float(p[0]), float(p[1])) for p in doc["h1_intervals"])
        return DiagonalSpec((float(domain[0]), float(domain[1])), ivs)
    if kind == "constant":
        _require_keys(doc, {"kind", "matrix", "length"}, "constant spec")
        return ConstantMatrixSpec(np.asarray(doc["matrix"], float), float(doc["length"]))
    raise ValueError(f"unknown spec kind {kind!r}")


def dump_spec(spec: HamiltonianSpec) -> dict:
    if isinstance(spec, HamburgerSpec):
        return {"kind": "hamburger", "lengths": spec.lengths.tolist(), "angles": spec.angles.tolist()}
    if isinstance(spec, AngleProfile):
        return {
            "kind": "profile",
            "domain": [spec.domain[0], spec.domain[1]],
            "phi": _fn_to_json(spec.phi),
            "density": _fn_to_json(spec.density),
        }
    if isinstance(spec, DiagonalSpec):
        return {
            "kind": "diagonal",
            "domain": [spec.domain[0], spec.domain[1]],
            "h1_intervals": [[x0, x1] for x0, x1 in spec.h1_intervals],
        }
    if isinstance(spec, ConstantMatrixSpec):
        return {"kind": "constant", "matrix": spec.matrix.tolist(), "length": spec.length}
    raise TypeError(f"unsupported spec type {type(spec)!r}")


def load_spec(source) -> HamiltonianSpec:
    """Parse a spec from a dict, a JSON string, or a file path."""
    if isinstance(source, dict):
        return spec_from_dict(source)
    text = source
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and not source.lstrip().startswith("{"):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON in system document: {exc}") from exc
    return spec_from_dict(doc)
