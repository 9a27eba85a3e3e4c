import math

import numpy as np
import pytest

from monogrow.families import PolygonParams, polygon_profile
from monogrow.hamiltonian import AngleProfile, ChirpFn, PolylineFn
from monogrow.regvar import (
    CustomLaw,
    PowerLaw,
    PowerLogLaw,
    PowerModulus,
    TableLaw,
    TableModulus,
    asymptotic_inverse,
    envelope_prescribed_modulus,
    estimate_modulus,
    geometric_mean_ratio,
    growth_envelope,
    modulus_from_envelope,
)


# --- growth envelopes -------------------------------------------------------

def test_envelope_power_closed_form():
    for c, alpha in ((1.0, 0.5), (2.0, 1.0), (0.3, 0.25)):
        mod = PowerModulus(alpha, c)
        for r in (10.0, 1e4, 1e8):
            expected = (c * r) ** (1.0 / (1.0 + alpha))
            assert abs(growth_envelope(mod, r) - expected) < 1e-10 * expected


def test_envelope_identity_modulus():
    assert abs(growth_envelope(PowerModulus(1.0), 100.0) - 10.0) < 1e-9


def test_envelope_table_matches_analytic():
    deltas = np.geomspace(1e-9, 1.0, 60)
    table = TableModulus(deltas, np.sqrt(deltas))
    for r in (1e2, 1e5):
        expected = r ** (2.0 / 3.0)
        got = growth_envelope(table, r)
        assert abs(got - expected) < 1e-9 * expected


def test_envelope_monotone_in_modulus():
    small = PowerModulus(0.5, 1.0)
    large = PowerModulus(0.5, 2.0)  # pointwise larger
    for r in (10.0, 1e3, 1e7):
        assert growth_envelope(small, r) <= growth_envelope(large, r)


def test_envelope_round_trip_recovers_modulus():
    mod = PowerModulus(0.5, 1.3)
    gamma = lambda r: growth_envelope(mod, r)
    for delta in np.geomspace(1e-6, 1e-1, 9):
        back = modulus_from_envelope(gamma, delta)
        assert abs(back - float(mod(delta))) < 1e-8 * float(mod(delta))


def test_envelope_prescribed_modulus_exact():
    g = PowerLaw(2.0 / 3.0, 1.7)
    mod = envelope_prescribed_modulus(g)
    for r in (10.0, 1e5):
        assert abs(growth_envelope(mod, r) - float(g(r))) < 1e-10 * float(g(r))


# --- asymptotic inverses ------------------------------------------------------

def test_inverse_of_square():
    g = asymptotic_inverse(PowerLaw(2.0))
    xs = np.geomspace(10, 1e8, 10)
    assert np.allclose(g(xs), np.sqrt(xs), rtol=1e-12)


def test_inverse_power_log_round_trip():
    f = PowerLogLaw(1.0, 1.0, 2.0)  # r log r loglog^2 r
    g = asymptotic_inverse(f)
    assert g.index == 1.0
    xs = np.geomspace(1e4, 1e14, 12)
    ratios = np.asarray(f(np.asarray(g(xs)))) / xs
    assert np.all(np.abs(ratios - 1.0) < 1e-2)
    assert g.checked_from <= 1e4
    # asymptotic shape x / (log x loglog^2 x), up to the slow drift
    shape = xs / (np.log(np.e + xs) * np.log(np.log(np.exp(np.e) + xs)) ** 2)
    assert np.all(np.asarray(g(xs)) / shape > 1.0)
    assert np.all(np.asarray(g(xs)) / shape < 3.0)


def test_inverse_table_round_trip():
    rs = np.geomspace(1.0, 1e6, 80)
    f = TableLaw(rs, rs ** 1.5)
    g = asymptotic_inverse(f)
    back = g(np.asarray(f(rs)))
    assert np.max(np.abs(back / rs - 1.0)) < 1e-6


def test_inverse_rejects_nonpositive_index():
    with pytest.raises(ValueError):
        asymptotic_inverse(PowerLaw(-1.0))


# --- modulus estimation ---------------------------------------------------------

def test_estimated_modulus_linear_angle():
    prof = AngleProfile((0.0, 1.0), PolylineFn([0.0, 1.0], [0.0, 3.0]))
    deltas = np.geomspace(1e-3, 0.2, 8)
    mod = estimate_modulus(prof, deltas)
    assert np.max(np.abs(mod(deltas) / (3.0 * deltas) - 1.0)) < 1e-2


def test_estimated_modulus_polygon_plateau_scales():
    # at the ramp scales the modulus equals the plateau jump amplitude
    amp = PowerModulus(0.5, 0.8)
    m = 1.0 / np.arange(1.0, 40.0) ** 1.5
    params = PolygonParams(m.copy(), m.copy(), amp)
    profile, _ = polygon_profile(params)
    scales = m[[3, 6, 10]]
    mod = estimate_modulus(profile, np.sort(scales), min_points=1 << 18)
    got = mod(np.sort(scales))
    expected = np.asarray(amp(np.sort(scales)))
    assert np.max(np.abs(got / expected - 1.0)) < 5e-3


def test_estimated_modulus_chirp_slope():
    prof = AngleProfile((0.0, 1.0), ChirpFn(1.0, 1.0))
    deltas = np.geomspace(1e-4, 1e-1, 12)
    mod = estimate_modulus(prof, deltas, t_floor=1e-4)
    x = np.log(deltas)
    y = np.log(np.asarray(mod(deltas)))
    slope = np.polyfit(x, y, 1)[0]
    assert abs(slope - 0.5) < 0.05  # Holder exponent gamma/(beta+1)


def test_estimated_envelope_growth_limits():
    prof = AngleProfile((0.0, 1.0), ChirpFn(1.0, 1.0))
    mod = estimate_modulus(prof, np.geomspace(1e-4, 1e-1, 12), t_floor=1e-4)
    rs = np.geomspace(1e3, 1e9, 7)
    gammas = np.array([growth_envelope(mod, r) for r in rs])
    ratios_linear = gammas / rs
    assert np.all(np.diff(ratios_linear) < 0)    # Gamma(r)/r decays to 0
    assert ratios_linear[-1] < 1e-2
    assert np.all(gammas / np.sqrt(rs) > 0.5)    # sqrt r = O(Gamma)


def test_estimate_modulus_validation():
    prof = AngleProfile((0.0, 1.0), PolylineFn([0.0, 1.0], [0.0, 1.0]))
    with pytest.raises(ValueError):
        estimate_modulus(prof, [0.2, 0.1])
    with pytest.raises(ValueError):
        estimate_modulus(prof, [-0.1, 0.2])


# --- geometric-mean ratio --------------------------------------------------------

def test_geometric_mean_ratio_stirling():
    # f(j) = j: ratio = e (n!)^(1/n) / n -> 1
    assert abs(geometric_mean_ratio(PowerLaw(1.0), 100_000) - 1.0) < 1e-3


def test_geometric_mean_ratio_constant():
    assert geometric_mean_ratio(PowerLaw(0.0), 1000) == pytest.approx(1.0, abs=1e-12)


def test_geometric_mean_ratio_power_log_band():
    for rho in (0.5, 1.5, 3.0):
        for k1 in (0.0, 1.0):
            f = PowerLogLaw(rho, k1)
            r = geometric_mean_ratio(f, 100_000)
            assert 0.9 <= r <= 1.1, (rho, k1, r)


def test_geometric_mean_ratio_custom_law():
    f = CustomLaw(lambda j: j ** 2 * np.log(j + 1.0), 2.0)
    r = geometric_mean_ratio(f, 10_000)
    assert 0.85 < r < 1.0  # slowly-varying deficit exp(-1/log n)


def test_table_law_validation():
    with pytest.raises(ValueError):
        TableLaw([1.0, 2.0], [1.0, 0.5])  # decreasing values
    with pytest.raises(ValueError):
        TableModulus([1e-3, 1e-2], [0.0, 0.1])  # vanishing modulus
