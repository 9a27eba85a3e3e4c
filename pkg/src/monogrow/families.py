"""Generators for the standard example families.

* chirp_profile      - t**gamma * sin(t**-beta) rotation angles on [0, 1];
* polygon_profile    - piecewise-linear angles alternating plateaus and ramps
                       with plateau jumps prescribed by an amplitude function;
* sharpness_family   - polygon data derived from a growth law g and a length
                       law m so that the upper envelope is g(r) and the lower
                       envelope is (n o g)(r) with n the asymptotic inverse
                       of m;
* cantor_diagonal    - diag(h1, h2) systems whose h1 support is a shifted
                       Cantor-stage interval family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from monogrow.hamiltonian import (
    AngleProfile,
    ChirpFn,
    ConstFn,
    DiagonalSpec,
    HamburgerSpec,
    PolylineFn,
)
from monogrow.regvar import (
    PowerLaw,
    PowerLogLaw,
    asymptotic_inverse,
    compose,
    envelope_prescribed_modulus,
)

CHIRP_BETA_CAP = 4.0


def chirp_profile(gamma: float, beta: float) -> AngleProfile:
    """Unit-density chirp-angle profile on [0, 1].

    gamma <= beta keeps the angle outside bounded variation (the interesting
    regime); beta is capped at 4 so modulus-estimation grids stay adequate
    near the documented evaluation floor t >= 1e-4.
    """
    if gamma > beta:
        raise ValueError("chirp requires gamma <= beta")
    if beta > CHIRP_BETA_CAP:
        raise ValueError(f"chirp beta capped at {CHIRP_BETA_CAP}")
    return AngleProfile((0.0, 1.0), ChirpFn(gamma, beta), ConstFn(1.0))


@dataclass(frozen=True)
class PolygonParams:
    """Plateau lengths l_j, ramp lengths m_j and the plateau-jump amplitude.

    The amplitude function pi must be nondecreasing near 0 with pi(x)/x
    nonincreasing (checked on the ramp lengths) and pi(m_1) < pi/2.
    """

    plateau_lengths: np.ndarray
    ramp_lengths: np.ndarray
    amplitude: object

    def __post_init__(self):
        l = np.asarray(self.plateau_lengths, float)
        m = np.asarray(self.ramp_lengths, float)
        object.__setattr__(self, "plateau_lengths", l)
        object.__setattr__(self, "ramp_lengths", m)
        if l.size < 2 or l.size != m.size:
            raise ValueError("need matching plateau/ramp sequences of length >= 2")
        if not (np.all(l > 0) and np.all(m > 0)):
            raise ValueError("lengths must be positive")
        if np.any(np.diff(m) > 1e-15):
            raise ValueError("ramp lengths must be nonincreasing")
        if np.any(m > l * (1 + 1e-12)):
            raise ValueError("ramp lengths must not exceed plateau lengths")
        amp = np.asarray(self.amplitude(m), float)
        if np.any(amp <= 0):
            raise ValueError("amplitude must be positive on the ramp lengths")
        # m is nonincreasing, so pi nondecreasing means amp nonincreasing in j
        if np.any(np.diff(amp) > 1e-12 * amp[:-1]):
            raise ValueError("amplitude must be nondecreasing in its argument")
        ratio = amp / m
        if np.any(np.diff(ratio) < -1e-12 * ratio[:-1]):
            raise ValueError("amplitude(x)/x must be nonincreasing in x")
        if not (amp[0] < math.pi / 2):
            raise ValueError("amplitude at the first ramp must stay below pi/2")

    @property
    def count(self) -> int:
        return int(self.plateau_lengths.size)

    def plateau_angles(self) -> np.ndarray:
        amp = np.asarray(self.amplitude(self.ramp_lengths), float)
        signs = np.where(np.arange(self.count - 1) % 2 == 0, 1.0, -1.0)
        out = np.empty(self.count)
        out[0] = 0.0
        out[1:] = np.cumsum(signs * amp[:-1])
        return out

    def amplitude_jump_ratio(self) -> float:
        amp = np.asarray(self.amplitude(self.ramp_lengths), float)
        return float(np.max(amp[:-1] / amp[1:]))


def polygon_profile(params: PolygonParams) -> tuple[AngleProfile, HamburgerSpec]:
    """The polygon-angle profile and its plateau Hamburger companion.

    The companion keeps exactly the plateaus (cutting out all ramps), which
    is the Hamiltonian realized by removing the ramp set and reparameterizing.
    """
    l = params.plateau_lengths
    m = params.ramp_lengths
    phis = params.plateau_angles()
    starts = np.concatenate([[0.0], np.cumsum(l + m)[:-1]])
    ends = starts + l
    ts = np.empty(2 * params.count)
    vs = np.empty(2 * params.count)
    ts[0::2] = starts
    ts[1::2] = ends
    vs[0::2] = phis
    vs[1::2] = phis
    profile = AngleProfile((0.0, float(ends[-1])), PolylineFn(ts, vs), ConstFn(1.0))
    return profile, HamburgerSpec(l.copy(), phis)


def polygon_discretization(params: PolygonParams, ramp_steps: int = 4):
    """Full Hamburger discretization (plateaus plus frozen ramp sub-steps).

    Returns (spec, plateau_indices): cutting the spec down to the plateau
    indices reproduces the polygon companion exactly.
    """
    l = params.plateau_lengths
    m = params.ramp_lengths
    phis = params.plateau_angles()
    lengths = []
    angles = []
    plateau_idx = []
    for j in range(params.count):
        lengths.append(l[j])
        angles.append(phis[j])
        plateau_idx.append(len(lengths))  # 1-based
        if j < params.count - 1:
            step = m[j] / ramp_steps
            for k in range(ramp_steps):
                frac = (k + 0.5) / ramp_steps
                lengths.append(step)
                angles.append(phis[j] + frac * (phis[j + 1] - phis[j]))
    return HamburgerSpec(np.asarray(lengths), np.asarray(angles)), plateau_idx


@dataclass(frozen=True)
class SharpnessParams:
    """Growth law g (index in (1/2, 1)) and a length law m with convergent
    integral of 1/m; the polygon uses l_j = m_j = 1/m(j) for j <= segments."""

    g: object
    m: object
    segments: int = 5000

    def __post_init__(self):
        if not (0.5 < self.g.index < 1.0):
            raise ValueError("growth index must lie in (1/2, 1)")
        if not _reciprocal_integral_converges(self.m):
            raise ValueError("1/m must have a convergent integral at infinity")
        if self.segments < 2:
            raise ValueError("need at least two segments")


def _reciprocal_integral_converges(m) -> bool:
    idx = m.index
    if idx > 1.0:
        return True
    if idx == 1.0 and isinstance(m, PowerLogLaw):
        if m.log_exp > 1.0:
            return True
        if m.log_exp == 1.0 and m.loglog_exp > 1.0:
            return True
    return False


@dataclass(frozen=True)
class SharpnessFamily:
    profile: AngleProfile
    hamburger: HamburgerSpec
    upper: object
    lower: object
    modulus: object
    polygon: PolygonParams
    rescale_doublings: int


def sharpness_family(params: SharpnessParams) -> SharpnessFamily:
    """Polygon data whose envelope is exactly g, with lower envelope n o g.

    The amplitude is the modulus whose growth envelope equals g; if its value
    at the first ramp reaches pi/2 the length law is doubled (at most 60
    times) until the construction is admissible, and the number of doublings
    is reported.
    """
    g = params.g
    amplitude = envelope_prescribed_modulus(g)
    m_law = params.m
    doublings = 0
    while True:
        first_ramp = 1.0 / float(m_law(np.asarray(1.0)))
        if float(amplitude(np.asarray(first_ramp))) < math.pi / 2:
            break
        if doublings >= 60:
            raise ValueError("amplitude at the first ramp stayed above pi/2 after 60 doublings")
        m_law = m_law.scaled(2.0)
        doublings += 1
    js = np.arange(1, params.segments + 1, dtype=float)
    lengths = 1.0 / np.asarray(m_law(js), float)
    poly = PolygonParams(lengths, lengths.copy(), amplitude)
    profile, hamburger = polygon_profile(poly)
    n_law = asymptotic_inverse(m_law)
    return SharpnessFamily(
        profile=profile,
        hamburger=hamburger,
        upper=g,
        lower=compose(n_law, g),
        modulus=amplitude,
        polygon=poly,
        rescale_doublings=doublings,
    )


def cantor_diagonal(p_target: float, depth: int, removal: float | None = None) -> DiagonalSpec:
    """diag(h1, h2) on [0, 2] from a middle-removal Cantor construction.

    h1 is the indicator of the shifted contiguous intervals mu([0, a_j]) + I_j
    where I_j are the removed middles up to the given stage and mu is the
    natural self-similar measure (mass 2^-d per stage-d survivor).  The
    removal fraction defaults to the value making the level sums of
    lengths**p_target decay with ratio 1/2; explicit fractions (for example
    the classic 1/3) are accepted as long as the decay ratio stays below 0.95.
    """
    if not (0.0 < p_target < 1.0):
        raise ValueError("the summability exponent must lie in (0, 1)")
    if not (1 <= depth <= 20):
        raise ValueError("depth must lie in 1..20")
    if removal is None:
        theta = 1.0 - 2.0 * 4.0 ** (-1.0 / p_target)
    else:
        theta = float(removal)
    if not (0.0 < theta < 1.0):
        raise ValueError("removal fraction must lie in (0, 1)")
    level_ratio = 2.0 * ((1.0 - theta) / 2.0) ** p_target
    if level_ratio > 0.95:
        raise ValueError(
            f"no convergence margin: level ratio {level_ratio:.3f} > 0.95 "
            f"for removal {theta:.3f} and exponent {p_target}"
        )
    survivors = [(0.0, 1.0, 0.0)]  # (a, b, mu mass to the left of a)
    removed = []
    for level in range(1, depth + 1):
        mass = 0.5 ** level  # each child carries half the parent mass
        nxt = []
        for a, b, mu_left in survivors:
            width = b - a
            ra = a + 0.5 * width * (1.0 - theta)
            rb = ra + width * theta
            removed.append((ra, rb, mu_left + mass))
            nxt.append((a, ra, mu_left))
            nxt.append((rb, b, mu_left + mass))
        survivors = nxt
    removed.sort()
    intervals = tuple((mu_left + ra, mu_left + rb) for ra, rb, mu_left in removed)
    return DiagonalSpec((0.0, 2.0), intervals)
