import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steadyfront.errors import DomainError, NotHyperbolicError
from steadyfront.gas import (
    GasModel,
    GasState,
    char_slope,
    eigensystem,
    entropy,
    entropy_fluxes,
    flux_jacobians,
    fluxes,
    jump_residual,
    kappa,
    lambda_gradient,
    rvec,
    sound_speed,
    state_distance,
    thermo,
)

M = GasModel()
UB = GasState(2.0, 0.0, 1.0, 1.0)

near_ubar = st.tuples(*[st.floats(-0.1, 0.1)] * 4).map(lambda d: GasState.from_array(UB.as_array() + np.array(d)))


def fd_gradient(fun, state, h=1e-6):
    base = state.as_array()
    out = np.empty(4)
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        out[k] = (fun(GasState.from_array(base + e)) - fun(GasState.from_array(base - e))) / (2 * h)
    return out


def test_model_validation():
    with pytest.raises(ValueError):
        GasModel(gamma=1.0)
    with pytest.raises(ValueError):
        GasModel(kappa_eos=0.0)
    with pytest.raises(ValueError):
        GasModel(c_v=-1.0)


def test_sound_speed_examples():
    assert sound_speed(UB, M) == pytest.approx(math.sqrt(1.4), abs=1e-10)
    assert sound_speed(UB, M) == pytest.approx(1.1832159566, abs=1e-10)
    assert sound_speed(GasState(0.3, 0.1, 1 / 1.4, 1.0), M) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        sound_speed(GasState(2.0, 0.0, 0.0, 1.0), M)
    with pytest.raises(DomainError):
        sound_speed(GasState(2.0, 0.0, 1.0, -1.0), M)


def test_thermo_examples():
    t = thermo(UB, M)
    assert t.internal_energy == pytest.approx(2.5)
    assert t.total_energy == pytest.approx(4.5)
    assert t.mach == pytest.approx(1.6903, abs=1e-4)
    assert t.entropy == pytest.approx(0.0, abs=1e-15)
    rho = 1.3
    assert entropy(GasState(1.0, 0.0, rho ** 1.4, rho), M) == pytest.approx(0.0, abs=1e-14)
    assert thermo(GasState(0.0, 0.0, 1.0, 1.0), M).mach == 0.0


def test_flux_examples():
    W, H = fluxes(UB, M)
    np.testing.assert_allclose(W, [2, 5, 0, 11], atol=1e-14)
    np.testing.assert_allclose(H, [0, 0, 1, 0], atol=1e-14)
    W, H = fluxes(GasState(0.0, 0.0, 0.7, 0.4), M)
    np.testing.assert_allclose(W, [0, 0.7, 0, 0], atol=1e-15)
    np.testing.assert_allclose(H, [0, 0, 0.7, 0], atol=1e-15)


@given(near_ubar)
def test_flux_symmetry(s):
    W, H = fluxes(s, M)
    Wm, Hm = fluxes(GasState(s.u, -s.v, s.p, s.rho), M)
    np.testing.assert_allclose(Hm[[0, 1]], -H[[0, 1]], atol=1e-13)
    np.testing.assert_allclose(Wm[2], -W[2], atol=1e-13)
    np.testing.assert_allclose(Wm[[0, 1, 3]], W[[0, 1, 3]], atol=1e-13)
    np.testing.assert_allclose(Hm[[2, 3]], H[[2, 3]] * np.array([1, -1]), atol=1e-13)


def test_jump_residual_zero_for_equal_states():
    assert np.all(jump_residual(UB, UB, 0.3, M) == 0.0)


def test_entropy_fluxes():
    s = GasState(2.0, 0.1, 1.2, 0.9)
    S = entropy(s, M)
    assert entropy_fluxes(s, M) == pytest.approx((0.9 * 2.0 * S, 0.9 * 0.1 * S))


def test_eigen_example():
    es = eigensystem(UB, M)
    c2 = 1.4
    lam = math.sqrt(c2) * math.sqrt(4 - c2) / (4 - c2)
    assert es.lambdas[0] == pytest.approx(-lam, abs=1e-12)
    assert es.lambdas[3] == pytest.approx(lam, abs=1e-12)
    assert es.lambdas[3] == pytest.approx(0.7338, abs=1e-4)
    assert es.lambdas[1] == es.lambdas[2] == 0.0
    assert es.kappas[0] > 0 and es.kappas[1] > 0


@given(near_ubar)
def test_reflection_symmetry_of_slopes(s):
    m = GasState(s.u, -s.v, s.p, s.rho)
    assert char_slope(1, m, M) == pytest.approx(-char_slope(4, s, M), abs=1e-12)
    assert char_slope(4, m, M) == pytest.approx(-char_slope(1, s, M), abs=1e-12)


def test_subsonic_rejected():
    with pytest.raises(NotHyperbolicError):
        eigensystem(GasState(1.0, 0.0, 1.0, 1.0), M)


@settings(max_examples=60)
@given(near_ubar)
def test_characteristic_determinant_vanishes(s):
    JW, JH = flux_jacobians(s, M)
    es = eigensystem(s, M)
    for lam in es.lambdas:
        assert abs(np.linalg.det(lam * JW - JH)) < 1e-6
    for lam, r in zip(es.lambdas, es.rvecs):
        assert np.max(np.abs((lam * JW - JH) @ r)) < 1e-6
    assert es.lambdas[0] < es.lambdas[1] < es.lambdas[3]


def test_printed_slope_without_sound_speed_fails_determinant():
    s = GasState(2.0, 0.05, 1.0, 1.0)
    c2 = 1.4
    q2 = s.u ** 2 + s.v ** 2
    lam = (s.u * s.v + math.sqrt(q2 - c2)) / (s.u ** 2 - c2)
    JW, JH = flux_jacobians(s, M)
    assert abs(np.linalg.det(lam * JW - JH)) > 1e-3


@settings(max_examples=60)
@given(near_ubar)
def test_normalisation_against_finite_differences(s):
    for j in (1, 4):
        grad = fd_gradient(lambda t: char_slope(j, t, M), s)
        np.testing.assert_allclose(grad, lambda_gradient(j, s, M), atol=1e-6)
        assert rvec(j, s, M) @ grad == pytest.approx(1.0, abs=1e-4)
        assert kappa(j, s, M) > 0
    grad_flow = fd_gradient(lambda t: t.v / t.u, s)
    assert rvec(2, s, M) @ grad_flow == pytest.approx(0.0, abs=1e-4)
    assert rvec(3, s, M) @ grad_flow == pytest.approx(0.0, abs=1e-4)


def test_state_distance():
    assert state_distance(UB, GasState(2.1, -0.3, 1.0, 1.05)) == pytest.approx(0.3)
