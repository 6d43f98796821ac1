import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steadyfront.errors import ConsistencyError, RiemannRangeError
from steadyfront.gas import GasModel, GasState, char_slope, char_slopes, jump_residual, kappa
from steadyfront.riemann import (
    BoundaryFan,
    WaveFan,
    boundary_response,
    reflect_at_boundary,
    reflection_coefficient,
    reflection_coefficient_angle_form,
    solve_free_boundary,
    solve_standard,
    split_fan,
    step_count,
)
from steadyfront.wavecurves import phi_composite, phi_gnl, shock_slope

M = GasModel()
UB = GasState(2.0, 0.0, 1.0, 1.0)


def arr(s):
    return s.as_array()


def test_equal_states_give_no_waves():
    fan = solve_standard(UB, UB, M)
    assert fan.alphas == (0.0, 0.0, 0.0, 0.0)


def test_round_trip_example():
    target = (-0.02, 0.05, 0.01, 0.03)
    above, _ = phi_composite(target, UB, M)
    fan = solve_standard(UB, above, M)
    np.testing.assert_allclose(fan.alphas, target, atol=1e-8)
    assert fan.kinds == ("shock", "vortex-sheet", "entropy-wave", "rarefaction")
    assert all(type(a) is float for a in fan.alphas)


def test_entropy_wave_example():
    fan = solve_standard(UB, GasState(2.0, 0.0, 1.0, math.exp(0.2)), M)
    np.testing.assert_allclose(fan.alphas, (0, 0, 0.2, 0), atol=1e-12)


strengths = st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda a: sum(map(abs, a)) > 1e-3)


@settings(max_examples=60)
@given(strengths, st.floats(0.0, 0.15))
def test_round_trip_property(a, total):
    a = np.array(a) * total / np.abs(a).sum()
    above, _ = phi_composite(a, UB, M)
    fan = solve_standard(UB, above, M)
    np.testing.assert_allclose(fan.alphas, a, atol=1e-8)
    top, _ = phi_composite(fan.alphas, fan.below, M)
    np.testing.assert_allclose(arr(top), arr(above), atol=1e-9)


def test_fan_slopes_ordered():
    above, _ = phi_composite((-0.03, 0.02, -0.01, -0.02), UB, M)
    fan = solve_standard(UB, above, M)
    ff = split_fan(fan, 0.01, (0.0, 0.0), M).fronts
    slopes = [f.slope for f in ff]
    assert slopes == sorted(slopes)
    assert [f.family for f in ff] == [1, 2, 4]


def test_out_of_range_data():
    with pytest.raises(RiemannRangeError):
        solve_standard(UB, GasState(2.0, 0.0, 3.0, 1.0), M)


def test_free_boundary_trivial():
    fb = solve_free_boundary(UB, 1.0, M)
    assert fb.alpha4 == 0.0
    assert fb.middle == UB
    assert fb.slope == 0.0


def test_free_boundary_pressure_and_k1():
    above = GasState(2.0, 0.0, 1.01, 1.0)
    fb = solve_free_boundary(above, 1.0, M)
    assert abs(fb.middle.p - 1.0) < 1e-12
    assert fb.slope == fb.middle.v / fb.middle.u
    lam4 = char_slopes(UB, M)[1]
    k1 = 1.0 / (kappa(4, UB, M) * UB.rho * UB.u * lam4)
    assert boundary_response(UB, 1.0, M) == pytest.approx(k1, rel=1e-12)
    assert fb.alpha4 / 0.01 == pytest.approx(k1, rel=0.05)
    # the 4-wave is a rarefaction when the still gas is at lower pressure
    assert fb.alpha4 > 0
    assert solve_free_boundary(GasState(2.0, 0.0, 0.99, 1.0), 1.0, M).alpha4 < 0


def test_free_boundary_slope_bound():
    rng = np.random.default_rng(0)
    ratios = []
    for _ in range(1000):
        d = rng.uniform(-1, 1, 4)
        d *= rng.uniform(1e-4, 0.05) / np.abs(d).max()
        above = GasState.from_array(arr(UB) + d)
        fb = solve_free_boundary(above, 1.0, M)
        assert abs(fb.middle.p - 1.0) < 1e-12
        ratios.append(abs(fb.slope) / np.abs(d).max())
    k1_prime = max(ratios)
    assert k1_prime < 5.0


def test_reflection_zero_incident():
    a4, right, k = reflect_at_boundary(UB, 0.0, 1.0, M)
    assert a4 == 0.0 and right == UB and k == 0.0


def test_reflection_requires_boundary_pressure():
    with pytest.raises(ConsistencyError):
        reflect_at_boundary(GasState(2.0, 0.0, 1.01, 1.0), 0.01, 1.0, M)


def fd_reflection(left, h=1e-5):
    return (reflect_at_boundary(left, h, left.p, M)[0] - reflect_at_boundary(left, -h, left.p, M)[0]) / (2 * h)


def test_reflection_at_zero_angle():
    assert fd_reflection(UB) == pytest.approx(-1.0, abs=1e-3)
    assert reflection_coefficient(UB, M) == pytest.approx(1.0, abs=1e-12)
    assert reflection_coefficient_angle_form(UB, M) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("v", [-0.05, -0.02, 0.02, 0.05])
def test_reflection_coefficient_matches_finite_difference(v):
    left = GasState(2.0, v, 1.0, 1.0)
    assert fd_reflection(left) == pytest.approx(-reflection_coefficient(left, M), abs=1e-3)
    assert reflection_coefficient(left, M) > 0


def test_reflection_coefficient_versus_slope_ratio_form():
    # the slope-ratio expression only agrees with the exact factor at v = 0
    left = GasState(2.0, -0.05, 1.0, 1.0)
    assert reflection_coefficient(left, M) == pytest.approx(0.929, abs=1e-3)
    assert reflection_coefficient_angle_form(left, M) == pytest.approx(1.115, abs=1e-3)
    assert fd_reflection(left) == pytest.approx(-reflection_coefficient(left, M), abs=1e-3)


def test_reflection_second_order_remainder():
    a1 = 0.01
    a4, _, _ = reflect_at_boundary(UB, a1, 1.0, M)
    assert abs(a4 + reflection_coefficient(UB, M) * a1) < 5 * a1 ** 2


def test_step_count_rule():
    assert step_count(0.095, 0.03) == 3
    assert step_count(0.001, 0.03) == 1
    assert step_count(0.045, 0.03) == 2
    for a in np.linspace(0.016, 0.3, 50):
        nu = step_count(a, 0.03)
        assert a / 0.03 - 0.5 <= nu < a / 0.03 + 0.5


def test_split_rarefaction():
    above = phi_gnl(4, 0.095, UB, M)
    fan = WaveFan((0, 0, 0, 0.095), UB, above, (UB, UB), ("rarefaction",) * 4)
    ff = split_fan(fan, 0.03, (1.0, 2.0), M).fronts
    assert len(ff) == 3
    assert sum(f.strength for f in ff) == pytest.approx(0.095, abs=1e-15)
    for f in ff:
        assert f.strength == pytest.approx(0.095 / 3)
        assert 0.75 * 0.03 <= f.strength <= 1.5 * 0.03
        assert f.slope == char_slope(4, f.below, M)
        assert f.anchor == (1.0, 2.0)
    assert ff[-1].above == above
    for lo, hi in zip(ff, ff[1:]):
        assert lo.above == hi.below
        assert hi.slope - lo.slope == pytest.approx(0.095 / 3, abs=1e-12)


def test_split_shock_and_contact():
    above, _ = phi_composite((0, 0.1, -0.05, -0.04), UB, M)
    fan = solve_standard(UB, above, M)
    ff = split_fan(fan, 0.01, (0, 0), M).fronts
    assert [f.kind for f in ff] == ["contact", "shock"]
    c, s = ff
    assert c.strength == pytest.approx((0.1, -0.05), abs=1e-9)
    assert c.slope == pytest.approx(c.below.v / c.below.u, abs=1e-15)
    assert c.slope == pytest.approx(c.above.v / c.above.u, abs=1e-12)
    assert s.slope == pytest.approx(shock_slope(4, s.below, s.above, M), abs=1e-12)
    assert np.max(np.abs(jump_residual(s.below, s.above, s.slope, M))) < 1e-8
    # Lax: the 4-shock is slower than the characteristics behind it and faster than ahead
    assert char_slope(4, s.above, M) < s.slope < char_slope(4, s.below, M)


def test_split_boundary_fan_and_delta_check():
    fb = solve_free_boundary(GasState(2.0, 0.0, 1.05, 1.0), 1.0, M)
    assert isinstance(fb, BoundaryFan)
    ff = split_fan(fb, 0.01, (0, 0), M).fronts
    assert all(f.family == 4 for f in ff)
    assert sum(f.strength for f in ff) == pytest.approx(fb.alpha4, abs=1e-14)
    with pytest.raises(ValueError):
        split_fan(fb, 0.0, (0, 0), M)


def test_fronts_inside_wedge():
    rng = np.random.default_rng(1)
    lam_star = 0.0
    lam_lo, lam_hi = math.inf, -math.inf
    for _ in range(200):
        s = GasState.from_array(arr(UB) + rng.uniform(-0.1, 0.1, 4))
        l1, l4 = char_slopes(s, M)
        lam_lo, lam_hi = min(lam_lo, l1), max(lam_hi, l4)
        lam_star = max(lam_star, l1 + 0.1, -l4 + 0.1)
    for _ in range(100):
        a = rng.uniform(-1, 1, 4)
        a *= 0.1 / np.abs(a).sum()
        above, _ = phi_composite(a, UB, M)
        for f in split_fan(solve_standard(UB, above, M), 0.01, (0, 0), M):
            assert lam_lo - 0.05 < f.slope < lam_hi + 0.05
            if f.family == 1:
                assert f.slope < lam_star
            if f.family == 4:
                assert f.slope > -lam_star
