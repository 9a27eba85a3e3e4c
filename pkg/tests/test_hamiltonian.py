import json
import math

import numpy as np
import pytest

from monogrow.hamiltonian import (
    AngleProfile,
    ChirpFn,
    ConstFn,
    ConstantMatrixSpec,
    DiagonalSpec,
    HamburgerSpec,
    PolylineFn,
    PowerFn,
    StepFn,
    cut,
    diagonal_to_profile,
    dump_spec,
    hamburger_from_diagonal,
    load_spec,
    reparameterize,
    total_trace_mass,
)
from monogrow.monodromy import monodromy_at


# --- reparameterization --------------------------------------------------

def test_reparameterize_chirp_exponents_and_density():
    prof = AngleProfile((0.0, 1.0), ChirpFn(1.0, 1.0))
    out = reparameterize(prof, 2.0)
    assert isinstance(out.phi, ChirpFn)
    assert out.phi.gamma == 2.0 and out.phi.beta == 2.0
    ts = np.linspace(0.05, 1.0, 9)
    assert np.allclose(out.density(ts), 2.0 * ts)


def test_reparameterize_constant_angle_fixed():
    prof = AngleProfile((0.0, 1.0), ConstFn(0.4))
    out = reparameterize(prof, 3.0)
    ts = np.linspace(0, 1, 7)
    assert np.allclose(out.phi(ts), 0.4)
    assert np.allclose(out.density(ts[1:]), 3.0 * ts[1:] ** 2)


def test_reparameterize_polyline_node_preimages():
    prof = AngleProfile((0.0, 1.0), PolylineFn([0.0, 0.5, 1.0], [0.0, 1.0, -1.0]))
    out = reparameterize(prof, 2.0)
    pre = np.sqrt([0.0, 0.5, 1.0])
    assert np.allclose(out.phi(pre), [0.0, 1.0, -1.0])


def test_reparameterize_preserves_trace_mass():
    prof = AngleProfile((0.0, 1.0), ChirpFn(1.0, 1.0))
    for kappa in (2.0, 4.0):
        out = reparameterize(prof, kappa)
        l, L = total_trace_mass(out)
        assert abs(l - 1.0) < 1e-12
        assert abs(L - 1.0) < 1e-8


def test_reparameterize_monodromy_invariant():
    prof = AngleProfile((0.0, 1.0), PolylineFn([0.0, 0.3, 1.0], [0.1, 0.9, 0.4]))
    out = reparameterize(prof, 2.0)
    for z in (1.5 + 0.5j, -3.0 + 2.0j):
        a = monodromy_at(prof, z)
        b = monodromy_at(out, z, tol=1e-10)
        assert abs(a.log_norm - b.log_norm) < 1e-6 * (1 + abs(a.log_norm))


def test_reparameterize_rejects_bad_input():
    prof = AngleProfile((0.0, 1.0), ConstFn(0.0))
    with pytest.raises(ValueError):
        reparameterize(prof, 1.0)
    shifted = AngleProfile((0.0, 2.0), ConstFn(0.0))
    with pytest.raises(ValueError):
        reparameterize(shifted, 2.0)


# --- cutting -------------------------------------------------------------

def test_cut_keep_all_is_identity():
    spec = HamburgerSpec([1.0, 2.0, 3.0], [0.0, 0.3, 0.9])
    out = cut(spec, {1, 2, 3})
    assert np.array_equal(out.lengths, spec.lengths)
    assert np.array_equal(out.angles, spec.angles)


def test_cut_selected_indices():
    spec = HamburgerSpec([1.0, 2.0, 3.0], [0.0, math.pi / 4, math.pi / 2])
    out = cut(spec, {1, 3})
    assert np.allclose(out.lengths, [1.0, 3.0])
    assert np.allclose(out.angles, [0.0, math.pi / 2])


def test_cut_single_segment_monodromy_is_linear_factor():
    spec = HamburgerSpec([0.7, 1.3, 0.4], [0.2, 1.1, -0.5])
    for j in (1, 2, 3):
        single = cut(spec, {j})
        z = 2.0 - 1.0j
        got = monodromy_at(single, z).matrix()
        l = spec.lengths[j - 1]
        phi = spec.angles[j - 1]
        xi = np.array([math.cos(phi), math.sin(phi)])
        J = np.array([[0.0, -1.0], [1.0, 0.0]])
        expected = np.eye(2) - z * l * np.outer(xi, xi) @ J
        assert np.allclose(got, expected, atol=1e-12)


def test_cut_composes():
    spec = HamburgerSpec(np.arange(1.0, 8.0), np.linspace(0, 2, 7))
    first = cut(spec, {1, 3, 4, 6})        # kept original indices
    second = cut(first, {2, 4})            # relabeled -> originals {3, 6}
    direct = cut(spec, {3, 6})
    assert np.array_equal(second.lengths, direct.lengths)
    assert np.array_equal(second.angles, direct.angles)


def test_cut_rejects_bad_keep():
    spec = HamburgerSpec([1.0, 2.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        cut(spec, set())
    with pytest.raises(ValueError):
        cut(spec, {0, 1})
    with pytest.raises(ValueError):
        cut(spec, {3})


# --- diagonal to profile -------------------------------------------------

def test_diagonal_all_h1():
    diag = DiagonalSpec((0.0, 1.0), (((0.0, 1.0)),))
    prof = diagonal_to_profile(diag)
    assert prof.domain == (0.0, 1.0)
    ts = np.linspace(0, 1, 9)
    assert np.allclose(prof.phi(ts), 0.0)
    assert np.allclose(prof.density(ts), 1.0)


def test_diagonal_mass_after_all_h1():
    diag = DiagonalSpec((0.0, 1.0), ((0.0, 0.5),))
    prof = diagonal_to_profile(diag)
    assert abs(prof.domain[1] - 0.5) < 1e-15
    ts = np.linspace(0, 0.5, 9)
    assert np.allclose(prof.phi(ts), 0.0)  # trailing h2 mass never registers


def test_diagonal_mass_before_all_h1():
    diag = DiagonalSpec((0.0, 1.0), ((0.5, 1.0),))
    prof = diagonal_to_profile(diag)
    assert abs(prof.domain[1] - 0.5) < 1e-15
    ts = np.linspace(0, 0.5, 9)
    assert np.allclose(prof.phi(ts), -math.atan(0.5))
    assert np.allclose(prof.density(ts), 1.25)


def test_diagonal_profile_monotonicity_invariants():
    diag = DiagonalSpec((0.0, 2.0), ((0.1, 0.4), (0.6, 0.9), (1.5, 1.9)))
    prof = diagonal_to_profile(diag)
    ts = np.linspace(*prof.domain, 200)
    phi = prof.phi(ts)
    assert np.all(np.diff(phi) <= 1e-15)
    assert np.all(phi <= 0.0) and np.all(phi > -math.pi / 2)
    assert np.all(prof.density(ts) >= 1.0)


def test_diagonal_rejects_empty_h1():
    with pytest.raises(ValueError):
        diagonal_to_profile(DiagonalSpec((0.0, 1.0), ()))


def test_hamburger_from_diagonal_partitions_exactly():
    diag = DiagonalSpec((0.0, 2.0), ((0.25, 0.5), (1.0, 1.25)))
    ham = hamburger_from_diagonal(diag)
    assert abs(ham.total_length - 2.0) < 1e-15
    assert set(np.round(ham.angles, 12)) <= {0.0, round(math.pi / 2, 12)}


# --- trace mass ----------------------------------------------------------

def test_trace_mass_hamburger():
    assert total_trace_mass(HamburgerSpec([1.0, 2.0, 3.0], [0, 0, 0])) == (6.0, 6.0)


def test_trace_mass_const_density():
    prof = AngleProfile((0.0, 1.0), ConstFn(0.0), ConstFn(2.0))
    assert total_trace_mass(prof) == (1.0, 2.0)


def test_trace_mass_linear_density():
    prof = AngleProfile((0.0, 1.0), ConstFn(0.0), PowerFn(2.0, 1.0))
    l, L = total_trace_mass(prof)
    assert l == 1.0
    assert abs(L - 1.0) < 1e-10


def test_trace_mass_positive_for_all_kinds():
    specs = [
        HamburgerSpec([0.1], [0.0]),
        AngleProfile((0.0, 1.0), ConstFn(0.3)),
        DiagonalSpec((0.0, 2.0), ((0.2, 0.8),)),
        ConstantMatrixSpec(np.diag([4.0, 1.0]), 0.5),
    ]
    for spec in specs:
        _, L = total_trace_mass(spec)
        assert L > 0


# --- JSON schema ---------------------------------------------------------

def test_json_round_trip_all_kinds():
    specs = [
        HamburgerSpec([1.0, 0.5], [0.0, 1.2]),
        AngleProfile((0.0, 1.0), ChirpFn(1.0, 2.0), ConstFn(1.0)),
        AngleProfile((0.0, 2.0), PolylineFn([0, 1, 2], [0.0, 0.5, 0.25]), StepFn([0, 1, 2], [1.0, 2.0])),
        DiagonalSpec((0.0, 2.0), ((0.25, 0.5), (1.0, 1.5))),
        ConstantMatrixSpec(np.eye(2), 1.0),
    ]
    for spec in specs:
        doc = dump_spec(spec)
        again = load_spec(json.dumps(doc))
        assert type(again) is type(spec)
        assert json.dumps(dump_spec(again), sort_keys=True) == json.dumps(doc, sort_keys=True)


def test_json_rejects_unknown_keys():
    with pytest.raises(ValueError, match="bogus"):
        load_spec({"kind": "hamburger", "lengths": [1], "angles": [0], "bogus": 1})
    with pytest.raises(ValueError, match="extra"):
        load_spec({"kind": "profile", "domain": [0, 1],
                   "phi": {"name": "const", "value": 0.0, "extra": 2}})


def test_json_rejects_unknown_kind_and_name():
    with pytest.raises(ValueError, match="kind"):
        load_spec({"kind": "mystery"})
    with pytest.raises(ValueError, match="form"):
        load_spec({"kind": "profile", "domain": [0, 1], "phi": {"name": "spline"}})


def test_json_invalid_text():
    with pytest.raises(ValueError, match="JSON"):
        load_spec("{not json")


# --- validation ----------------------------------------------------------

def test_hamburger_validation():
    with pytest.raises(ValueError):
        HamburgerSpec([], [])
    with pytest.raises(ValueError):
        HamburgerSpec([1.0, -1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        HamburgerSpec([1.0], [np.inf])


def test_constant_matrix_validation():
    with pytest.raises(ValueError):
        ConstantMatrixSpec(np.array([[1.0, 1.0], [0.0, 1.0]]), 1.0)  # not symmetric
    with pytest.raises(ValueError):
        ConstantMatrixSpec(np.diag([1.0, -0.5]), 1.0)  # indefinite
    with pytest.raises(ValueError):
        ConstantMatrixSpec(np.zeros((2, 2)), 1.0)
