import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from cvwitness.fock import TruncatedState, expectation, photon_pmf, quadrature_covariance
from cvwitness.gaussian import Beamsplit, Displace, Rotate, Squeeze, apply_gaussian_op, apply_passive
from cvwitness.states import HermiteGaussian, PMTransform, build, covariance_matrix
from oracles import annihilation, hg_appendix_moments, mode_ops


def fock(n, m, cutoff):
    psi = np.zeros((cutoff + 1, cutoff + 1))
    psi[n, m] = 1.0
    return TruncatedState.pure(psi, exact_support=True)


@given(st.floats(-10, 10))
def test_rotation_phase_on_single_photon(theta):
    out = apply_gaussian_op(fock(1, 0, 2), Rotate("a", theta))
    amp = out.components[0][1][1, 0]
    assert abs(amp - np.exp(-1j * theta)) < 1e-12
    np.testing.assert_allclose(photon_pmf(out), photon_pmf(fock(1, 0, 2)), atol=1e-15)


@pytest.mark.parametrize("gamma", [0.3, 1.0 + 0.5j, -1.2j])
def test_displaced_vacuum(gamma):
    out = apply_gaussian_op(fock(0, 0, 30), Displace("a", gamma), check_tail=False)
    assert abs(expectation(out, (0, 1, 0, 0), check=False) - gamma) < 1e-8


@pytest.mark.parametrize("r", [0.2, 0.6])
def test_squeeze_matches_expm(r):
    # brute-force exp(½(ξ* a² − ξ a†²)) on a large space, then truncate
    big = 80
    a = annihilation(big)
    u = expm(0.5 * (r * a @ a - r * a.T @ a.T))
    vac = np.zeros(big)
    vac[0] = 1
    ref = (u @ vac)[:61]
    out = apply_gaussian_op(fock(0, 0, 60), Squeeze("a", r), check_tail=False)
    np.testing.assert_allclose(out.components[0][1][:, 0], ref, atol=1e-10)
    _, cov = quadrature_covariance(out, check=False)
    assert cov[0, 0] == pytest.approx(0.5 * math.exp(-2 * r), rel=1e-8)


@pytest.mark.parametrize("t,phase", [(0.5, 0.0), (0.3, 0.7), (0.9, -2.0)])
def test_beamsplitter_transforms_moments(t, phase):
    # Heisenberg oracle: ⟨a_i† a_j⟩_out = Σ conj(u_ik) u_jl ⟨a_k† a_l⟩_in
    rng = np.random.default_rng(1)
    D = 3
    psi = rng.normal(size=(D + 1, D + 1)) + 1j * rng.normal(size=(D + 1, D + 1))
    psi /= np.linalg.norm(psi)
    u = Beamsplit(t, phase).matrix()
    out = TruncatedState.pure(apply_passive(psi, u), exact_support=True)
    dim = 2 * D + 1
    big = np.zeros((dim, dim), dtype=complex)
    big[: D + 1, : D + 1] = psi
    rho = np.outer(big.ravel(), big.ravel().conj())
    a, b = mode_ops(dim)
    ops = [a, b]
    m_in = np.array([[np.trace(rho @ ops[k].conj().T @ ops[l]) for l in range(2)] for k in range(2)])
    m_out = u.conj() @ m_in @ u.T
    assert abs(expectation(out, (1, 1, 0, 0)) - m_out[0, 0]) < 1e-10
    assert abs(expectation(out, (0, 0, 1, 1)) - m_out[1, 1]) < 1e-10
    assert abs(expectation(out, (1, 0, 0, 1)) - m_out[0, 1]) < 1e-10
    first_in = np.array([np.trace(rho @ o) for o in ops])
    first_out = u @ first_in
    assert abs(expectation(out, (0, 1, 0, 0)) - first_out[0]) < 1e-10
    assert abs(expectation(out, (0, 0, 0, 1)) - first_out[1]) < 1e-10
    assert abs(np.linalg.norm(out.components[0][1]) - 1) < 1e-12


@pytest.mark.parametrize("sp,sm", [(1.0, 1.0), (0.7, 1.3), (1.4, 0.8)])
def test_hermite_gaussian_second_moments(sp, sm):
    state = build(HermiteGaussian(sp, sm))
    _, cov = quadrature_covariance(state)
    ref = hg_appendix_moments(sp, sm)
    assert cov[0, 0] == pytest.approx(ref["x1x1"], abs=1e-8)
    assert cov[2, 2] == pytest.approx(ref["x2x2"], abs=1e-8)
    assert cov[0, 2] == pytest.approx(ref["x1x2"], abs=1e-8)
    assert cov[1, 1] == pytest.approx(ref["p1p1"], abs=1e-8)
    assert cov[1, 3] == pytest.approx(ref["p1p2"], abs=1e-8)
    if sp == sm == 1.0:
        assert cov[0, 0] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("transform", [PMTransform(phi=math.pi / 4), PMTransform(xi=2.0),
                                       PMTransform(xi=2.0, squeeze_axis="s"),
                                       PMTransform(phi=0.3, xi=1.5)])
def test_transformed_covariance_matches_fock(transform):
    family = HermiteGaussian(1.0, 1.0, transform)
    _, cov = quadrature_covariance(build(family))
    np.testing.assert_allclose(cov, covariance_matrix(family), atol=1e-8)


def test_xi_scales_pm_variances():
    base = covariance_matrix(HermiteGaussian(1.0, 1.0))
    sq = covariance_matrix(HermiteGaussian(1.0, 1.0, PMTransform(xi=2.0)))
    r_plus = np.array([1, 0, 1, 0])
    s_minus = np.array([0, 1, 0, -1])
    assert r_plus @ sq @ r_plus == pytest.approx(4 * (r_plus @ base @ r_plus))
    assert s_minus @ sq @ s_minus == pytest.approx((s_minus @ base @ s_minus) / 4)


@pytest.mark.parametrize("t,phase", [(0.5, math.pi), (0.3, 0.4)])
def test_sector_maps_stay_unitary_at_high_photon_number(t, phase):
    from cvwitness.gaussian import passive_sector_maps

    u = Beamsplit(t, phase).matrix()
    key = tuple(np.round(u.ravel(), 15))
    maps = passive_sector_maps(key, 120, 120)
    for total in (1, 60, 120):
        _, mat = maps[total]
        assert np.abs(mat.conj().T @ mat - np.eye(mat.shape[1])).max() < 1e-12
    # single-photon sector reproduces u (rows ordered |0,1⟩, |1,0⟩)
    _, one = maps[1]
    assert abs(one[1, 1] - u[0, 0]) < 1e-14 and abs(one[0, 1] - u[1, 0]) < 1e-14
