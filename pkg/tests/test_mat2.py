import math

import numpy as np
import pytest

from monogrow.mat2 import (
    ScaledMat2,
    frame_norms,
    rotation_distortion,
    rotation_distortion_inverse,
    spectral_norm,
    transition_vectors,
    unit_direction,
)


def test_spectral_norm_identity():
    assert spectral_norm(np.eye(2)) == 1.0


def test_spectral_norm_diagonal():
    assert spectral_norm(np.diag([2.0, 0.5])) == 2.0


def test_spectral_norm_shear_golden_ratio():
    # brute-force oracle: SVD via eigenvalues of m^T m
    m = np.array([[1.0, 1.0], [0.0, 1.0]])
    eigs = np.linalg.eigvalsh(m.T @ m)
    assert abs(spectral_norm(m) - math.sqrt(eigs[-1])) < 1e-15
    assert abs(spectral_norm(m) - (1 + math.sqrt(5)) / 2) < 1e-15


def test_spectral_norm_rejects_nonfinite():
    with pytest.raises(ValueError):
        spectral_norm(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        spectral_norm(np.ones((3, 2)))


def test_rotation_distortion_identity():
    assert np.allclose(rotation_distortion(1.0, 0.0), np.eye(2))


def test_rotation_distortion_no_rotation():
    assert np.allclose(rotation_distortion(2.0, 0.0), np.diag([2.0, 0.5]))


def test_rotation_distortion_quarter_turn():
    # hand multiplication of diag(2, 1/2) and the rotation by -pi/2
    got = rotation_distortion(2.0, math.pi / 2)
    assert np.allclose(got, [[0.0, 2.0], [-0.5, 0.0]], atol=1e-15)


def test_rotation_distortion_rejects_bad_a():
    with pytest.raises(ValueError):
        rotation_distortion(0.0, 1.0)
    with pytest.raises(ValueError):
        rotation_distortion(-2.0, 1.0)


def test_rotation_distortion_determinant_one():
    for a in np.geomspace(1e-6, 1.0, 25):
        for psi in np.linspace(-10, 10, 21):
            assert abs(np.linalg.det(rotation_distortion(a, psi)) - 1.0) < 1e-14


def test_frame_norms_unitary_case():
    assert frame_norms(1.0, 0.3, 0.3, 1.0) == (1.0, 1.0, 1.0)


def test_frame_norms_aligned_conjugation():
    # aligned frames keep only the cos part: a^2
    assert abs(frame_norms(2.0, 0.7, 0.7, 1.0).conjugation - 4.0) < 1e-15


def test_frame_norms_transition_example():
    # closed form gives ||C||^2 = 1 + (3/2)(3/2 + 5/2)/2 = 4
    n3 = frame_norms(2.0, 0.5, 0.5, 1.0).transition
    assert abs(n3 - 2.0) < 1e-14
    m = rotation_distortion(2.0, 0.5) @ np.linalg.inv(rotation_distortion(1.0, 0.5))
    assert abs(n3 - np.linalg.svd(m, compute_uv=False)[0]) < 1e-13


def test_frame_norms_rejects_bad_parameters():
    with pytest.raises(ValueError):
        frame_norms(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        frame_norms(1.0, 0.0, 0.0, -1.0)


def test_closed_forms_match_svd_on_random_data():
    # brute-force oracle: SVD of the explicitly assembled matrices; the
    # assembly runs in extended precision because the conjugation product
    # cancels through intermediates of size 1/a^2
    rng = np.random.default_rng(7)
    n = 10_000
    a = np.exp(rng.uniform(np.log(1e-4), 0.0, n))
    b = np.exp(rng.uniform(np.log(1e-4), 0.0, n))
    psi = rng.uniform(-7, 7, n)
    phi = rng.uniform(-7, 7, n)
    J = np.array([[0.0, -1.0], [1.0, 0.0]], np.longdouble)
    for i in range(n):
        omega = rotation_distortion(a[i], psi[i]).astype(np.longdouble)
        omega_inv = rotation_distortion_inverse(a[i], psi[i]).astype(np.longdouble)
        direction = unit_direction(phi[i]).astype(np.longdouble)
        conj = (omega @ np.outer(direction, direction) @ J @ omega_inv).astype(float)
        trans = (omega @ rotation_distortion_inverse(b[i], phi[i]).astype(np.longdouble)).astype(float)
        got = frame_norms(a[i], psi[i], phi[i], b[i])
        s1 = np.linalg.svd(omega.astype(float), compute_uv=False)[0]
        s2 = np.linalg.svd(conj, compute_uv=False)[0]
        s3 = np.linalg.svd(trans, compute_uv=False)[0]
        assert abs(got.distortion - s1) <= 1e-12 * s1
        assert abs(got.conjugation - s2) <= 1e-12 * s2
        assert abs(got.transition - s3) <= 1e-12 * s3


def test_transition_norm_sandwich():
    rng = np.random.default_rng(8)
    for _ in range(2000):
        a, b = np.exp(rng.uniform(np.log(1e-3), 0.0, 2))
        psi, phi = rng.uniform(-7, 7, 2)
        n3 = frame_norms(a, psi, phi, b).transition
        vp, _ = transition_vectors(a, psi, phi, b)
        l2sq = float(vp @ vp)
        l1sq = float(np.sum(np.abs(vp))) ** 2
        assert l2sq <= n3 ** 2 * (1 + 1e-12)
        assert n3 ** 2 <= l1sq * (1 + 1e-12)
        assert l1sq <= 2 * l2sq * (1 + 1e-12)


def test_scaled_mat2_renormalize_idempotent():
    rng = np.random.default_rng(9)
    for _ in range(50):
        m = rng.normal(0, 1, (2, 2)) * np.exp(rng.uniform(-200, 200))
        s = ScaledMat2.from_matrix(m)
        assert abs(spectral_norm(s.unit) - 1.0) < 1e-12
        again = s.renormalized()
        assert abs(again.log_scale - s.log_scale) < 1e-12


def test_scaled_mat2_round_trip():
    m = np.array([[3.0, -1.0], [0.5, 2.0]])
    s = ScaledMat2.from_matrix(m)
    assert np.allclose(s.matrix(), m, rtol=1e-14)
    assert abs(s.log_norm - math.log(spectral_norm(m))) < 1e-14
