import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steadyfront.errors import ConsistencyError, CurveRangeError
from steadyfront.gas import GasModel, GasState, char_slope, fluxes, jump_residual, rvec, sound_speed
from steadyfront.wavecurves import (
    branch_kind,
    contact_strengths,
    hugoniot_state,
    phi_composite,
    phi_contact,
    phi_gnl,
    psi_contact,
    psi_gnl,
    shock_slope,
    strength,
)

M = GasModel()
UB = GasState(2.0, 0.0, 1.0, 1.0)
near_ubar = st.tuples(*[st.floats(-0.08, 0.08)] * 4).map(lambda d: GasState.from_array(UB.as_array() + np.array(d)))
alpha = st.floats(-0.1, 0.1)


def arr(s):
    return s.as_array()


def test_contact_examples():
    assert phi_contact(0.0, 0.0, UB) == UB
    np.testing.assert_allclose(arr(phi_contact(0.1, 0.0, UB)), [2 * math.exp(0.1), 0, 1, 1], rtol=1e-15)
    assert phi_contact(0.1, 0.0, UB).u == pytest.approx(2.2103, abs=1e-4)
    np.testing.assert_allclose(arr(phi_contact(0.0, 0.2, UB)), [2, 0, 1, math.exp(0.2)], rtol=1e-15)


@given(near_ubar, alpha, alpha)
def test_contact_preserves_pressure_and_angle(s, a2, a3):
    t = phi_contact(a2, a3, s)
    assert t.p == s.p
    assert t.v / t.u == pytest.approx(s.v / s.u, abs=1e-15)
    np.testing.assert_allclose(contact_strengths(s, t), (a2, a3), atol=1e-12)
    np.testing.assert_allclose(arr(psi_contact(a2, a3, t)), arr(s), atol=1e-14)


def test_branch_kinds():
    assert branch_kind(1, 0.0) == "rarefaction"
    assert branch_kind(4, -0.1) == "shock"
    assert branch_kind(2, -0.3) == "vortex-sheet"
    assert branch_kind(3, 0.3) == "entropy-wave"
    with pytest.raises(ValueError):
        branch_kind(5, 0.1)


def test_phi_gnl_zero_is_identity():
    for j in (1, 4):
        assert phi_gnl(j, 0.0, UB, M) == UB
        assert psi_gnl(j, 0.0, UB, M) == UB


def test_rarefaction_strength_is_slope_increment():
    top = phi_gnl(4, 0.05, UB, M)
    assert char_slope(4, top, M) - char_slope(4, UB, M) == pytest.approx(0.05, abs=1e-8)
    top = phi_gnl(1, 0.05, UB, M)
    assert char_slope(1, top, M) - char_slope(1, UB, M) == pytest.approx(0.05, abs=1e-8)


def test_shock_branch_satisfies_jump_conditions():
    top = phi_gnl(1, -0.05, UB, M)
    s = shock_slope(1, UB, top, M)
    n = math.sqrt(1 + s * s)
    assert np.max(np.abs(jump_residual(UB, top, s, M))) / n < 1e-8
    assert top.rho > UB.rho


@settings(max_examples=40)
@given(near_ubar, st.sampled_from([1, 4]), alpha)
def test_inverse_maps_round_trip(s, j, a):
    above = phi_gnl(j, a, s, M)
    np.testing.assert_allclose(arr(psi_gnl(j, a, above, M)), arr(s), atol=1e-9)
    np.testing.assert_allclose(strength(j, s, above, M), a, atol=1e-9)


def test_round_trip_example():
    above = phi_gnl(4, 0.03, UB, M)
    np.testing.assert_allclose(arr(psi_gnl(4, 0.03, above, M)), arr(UB), atol=1e-9)


@pytest.mark.parametrize("j", [1, 4])
@pytest.mark.parametrize("base", [UB, GasState(2.05, -0.04, 0.97, 1.03)])
def test_tangents_are_eigenvectors(j, base):
    h = 1e-6
    fwd = (arr(phi_gnl(j, h, base, M)) - arr(phi_gnl(j, -h, base, M))) / (2 * h)
    np.testing.assert_allclose(fwd, rvec(j, base, M), atol=1e-4)
    # both branches separately share the tangent
    np.testing.assert_allclose((arr(phi_gnl(j, h, base, M)) - arr(base)) / h, rvec(j, base, M), atol=1e-4)
    np.testing.assert_allclose((arr(base) - arr(phi_gnl(j, -h, base, M))) / h, rvec(j, base, M), atol=1e-4)
    bwd = (arr(psi_gnl(j, h, base, M)) - arr(psi_gnl(j, -h, base, M))) / (2 * h)
    np.testing.assert_allclose(bwd, -rvec(j, base, M), atol=1e-4)


def test_composite_tangents():
    h = 1e-6
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        d = (arr(phi_composite(e, UB, M)[0]) - arr(phi_composite(-e, UB, M)[0])) / (2 * h)
        np.testing.assert_allclose(d, rvec(k + 1, UB, M), atol=1e-4)


def test_composite_examples():
    top, (u1, u2) = phi_composite((0, 0, 0, 0), UB, M)
    assert top == u1 == u2 == UB
    top, _ = phi_composite((0, 0.1, 0, 0), UB, M)
    np.testing.assert_allclose(arr(top), arr(phi_contact(0.1, 0.0, UB)), atol=1e-15)


def test_integral_curve_relations():
    """Along the simple-wave curve: dp = c^2 drho, du + lambda dv = 0, rho(lambda u - v) dv = dp."""
    for j in (1, 4):
        for a in np.linspace(0.0, 0.08, 5):
            s = phi_gnl(j, a, UB, M)
            h = 1e-6
            d = (arr(phi_gnl(j, a + h, UB, M)) - arr(phi_gnl(j, max(a - h, 0.0), UB, M))) / (h + min(a, h))
            du, dv, dp, drho = d
            lam = char_slope(j, s, M)
            c2 = sound_speed(s, M) ** 2
            assert dp - c2 * drho == pytest.approx(0.0, abs=1e-6)
            assert du + lam * dv == pytest.approx(0.0, abs=1e-6)
            assert s.rho * (lam * s.u - s.v) * dv - dp == pytest.approx(0.0, abs=1e-6)


def test_pressure_monotonicity_along_branches():
    alphas = np.linspace(-0.1, 0.1, 21)
    p1 = [phi_gnl(1, a, UB, M).p for a in alphas]
    p4 = [phi_gnl(4, a, UB, M).p for a in alphas]
    assert np.all(np.diff(p1) < 0)
    assert np.all(np.diff(p4) > 0)
    # compressive branches raise the density across the shock from the upstream side
    assert phi_gnl(1, -0.05, UB, M).rho > UB.rho
    assert psi_gnl(4, -0.05, UB, M).rho > UB.rho


def test_shock_slope_properties():
    # zero-strength limit
    tiny = phi_gnl(4, -1e-7, UB, M)
    assert shock_slope(4, UB, tiny, M) == pytest.approx(char_slope(4, UB, M), abs=1e-6)
    # a 4-shock with upstream (upper) state UB and density 1.05 behind it
    g = M.gamma
    ratio = 1.05
    p = (ratio * (g + 1) - (g - 1)) / ((g + 1) - ratio * (g - 1))
    lower = hugoniot_state(4, UB, p, M)
    assert lower.rho == pytest.approx(1.05, rel=1e-12)
    s = shock_slope(4, lower, UB, M)
    assert s > char_slope(4, UB, M)
    assert s < char_slope(4, lower, M)
    assert np.max(np.abs(jump_residual(lower, UB, s, M))) < 1e-8
    with pytest.raises(ConsistencyError):
        shock_slope(4, lower, GasState(UB.u + 0.01, UB.v, UB.p, UB.rho), M)
    with pytest.raises(ConsistencyError):
        shock_slope(4, UB, lower, M)


def test_validity_radius():
    with pytest.raises(CurveRangeError):
        phi_gnl(4, 0.31, UB, M)
    with pytest.raises(CurveRangeError):
        phi_gnl(1, 0.05, GasState(1.0, 0.0, 1.0, 1.0), M)


def test_strength_state_equivalence():
    rng = np.random.default_rng(3)
    ratios = []
    for _ in range(300):
        a = rng.uniform(-1, 1, 4)
        a *= rng.uniform(0.001, 0.2) / np.abs(a).sum()
        top, _ = phi_composite(a, UB, M)
        ratios.append(np.max(np.abs(arr(top) - arr(UB))) / np.abs(a).sum())
    B = max(max(ratios), 1.0 / min(ratios))
    assert B < 10.0
