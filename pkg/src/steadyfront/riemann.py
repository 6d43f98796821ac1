"""Riemann solvers: two-state, free boundary, boundary reflection, and the
delta-approximate fan splitter.

The standard problem is reduced to one monotone scalar equation in the middle
pressure: the 1-curve from the lower state and the 4-curve (backwards) from
the upper state must reach the same flow angle there.  The remaining
difference between the two middle states is a pure contact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from scipy.optimize import brentq

from .errors import ConsistencyError, CurveRangeError, RiemannRangeError
from .gas import GasModel, GasState, char_slope, rvec_pressure
from .wavecurves import (
    CURVE_LIMIT,
    _rarefaction_to_slope,
    branch_kind,
    contact_strengths,
    hugoniot_slope,
    phi_gnl,
    strength,
    wave_state,
)

ZERO_WAVE = 1e-12


@dataclass(frozen=True)
class WaveFan:
    alphas: tuple[float, float, float, float]
    below: GasState
    above: GasState
    middles: tuple[GasState, GasState]
    kinds: tuple[str, str, str, str]


@dataclass(frozen=True)
class BoundaryFan:
    alpha4: float
    middle: GasState
    slope: float
    above: GasState
    pbar: float


@dataclass(frozen=True)
class FanFront:
    slope: float
    family: int
    kind: str
    strength: Union[float, tuple[float, float]]
    below: GasState
    above: GasState
    anchor: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class FrontFan:
    fronts: tuple[FanFront, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.fronts)

    def __iter__(self):
        return iter(self.fronts)


def _angle(s: GasState) -> float:
    return math.atan2(s.v, s.u)


def solve_standard(below: GasState, above: GasState, model: GasModel) -> WaveFan:
    """Admissible four-wave solution joining ``below`` (lower) to ``above`` (upper)."""

    def middles(p):
        return wave_state(1, below, p, True, model), wave_state(4, above, p, False, model)

    def f(p):
        u1, u2 = middles(p)
        return _angle(u1) - _angle(u2)

    if below == above:
        return WaveFan((0.0, 0.0, 0.0, 0.0), below, above, (below, below), _kinds((0.0, 0.0, 0.0, 0.0)))
    # f decreases in p: the 1-curve turns the flow down and the 4-curve up as p grows
    lo = min(below.p, above.p)
    hi = max(below.p, above.p)
    try:
        for _ in range(60):
            f_lo, f_hi = f(lo), f(hi)
            if f_lo >= 0.0 >= f_hi:
                break
            if f_lo < 0.0:
                lo *= 0.95
            if f_hi > 0.0:
                hi *= 1.05
        else:
            raise RiemannRangeError("Riemann data out of local range: no pressure bracket")
        if f_lo == 0.0:
            p_star = lo
        elif f_hi == 0.0:
            p_star = hi
        else:
            p_star = brentq(f, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=200)
        u1, u2 = middles(p_star)
    except CurveRangeError as exc:
        raise RiemannRangeError(f"Riemann data out of local range: {exc}") from None
    a1 = strength(1, below, u1, model)
    a4 = strength(4, u2, above, model)
    a2, a3 = contact_strengths(u1, u2)
    alphas = (float(a1), float(a2), float(a3), float(a4))
    if max(abs(a) for a in alphas) > CURVE_LIMIT:
        raise RiemannRangeError(f"Riemann data out of local range: strengths {alphas}")
    return WaveFan(alphas, below, above, (u1, u2), _kinds(alphas))


def _kinds(alphas) -> tuple[str, str, str, str]:
    return tuple(branch_kind(j, a) for j, a in zip((1, 2, 3, 4), alphas))


def solve_free_boundary(above: GasState, pbar: float, model: GasModel) -> BoundaryFan:
    """Single 4-wave bringing ``above`` down to the still-gas pressure ``pbar``."""
    try:
        middle = wave_state(4, above, pbar, False, model)
    except CurveRangeError as exc:
        raise RiemannRangeError(f"free-boundary data out of local range: {exc}") from None
    alpha4 = strength(4, middle, above, model)
    if abs(alpha4) > CURVE_LIMIT:
        raise CurveRangeError(f"free-boundary 4-wave strength {alpha4} beyond validity radius")
    return BoundaryFan(alpha4, middle, middle.v / middle.u, above, pbar)


def reflect_at_boundary(left: GasState, alpha1: float, pbar: float, model: GasModel) -> tuple[float, GasState, float]:
    """Reflect a 1-wave of strength ``alpha1`` sitting on the boundary state ``left``.

    Returns ``(alpha4, right, new_slope)``: the reflected 4-wave strength, the
    new boundary-adjacent state and the deflected boundary slope.
    """
    if abs(left.p - pbar) > 1e-9 * max(1.0, abs(pbar)):
        raise ConsistencyError(f"boundary state pressure {left.p} differs from {pbar}")
    if alpha1 == 0.0:
        return 0.0, left, left.v / left.u
    incident_top = phi_gnl(1, alpha1, left, model)
    fan = solve_free_boundary(incident_top, pbar, model)
    return fan.alpha4, fan.middle, fan.slope


def reflection_coefficient(left: GasState, model: GasModel) -> float:
    """Linear reflection factor K2 with ``alpha4 = -K2 * alpha1 + O(alpha1^2)``.

    Equals ``-r_1^(3) / r_4^(3)`` at ``left``.
    """
    return -rvec_pressure(1, left, model) / rvec_pressure(4, left, model)


def reflection_coefficient_angle_form(left: GasState, model: GasModel) -> float:
    """The slope-ratio expression ``(v/u - lambda_1) / (v/u + lambda_4)``.

    Coincides with :func:`reflection_coefficient` only when ``v = 0``; kept
    for comparison.
    """
    t = left.v / left.u
    return (t - char_slope(1, left, model)) / (t + char_slope(4, left, model))


def boundary_response(above: GasState, pbar: float, model: GasModel) -> float:
    """K1 = 1 / r_4^(3): first-order ratio alpha4 / (p_above - pbar)."""
    return 1.0 / rvec_pressure(4, above, model)


# -- delta-approximate splitting ----------------------------------------------

def step_count(alpha: float, delta: float) -> int:
    """Nearest integer to alpha/delta, but at least one step."""
    return max(1, int(math.floor(alpha / delta + 0.5)))


def _gnl_fronts(family: int, alpha: float, lower: GasState, upper: GasState, delta: float,
                model: GasModel, anchor) -> list[FanFront]:
    if abs(alpha) <= ZERO_WAVE:
        return []
    if alpha < 0.0:
        s = hugoniot_slope(family, lower, upper.p, model)
        return [FanFront(s, family, "shock", alpha, lower, upper, anchor)]
    nu = step_count(alpha, delta)
    piece = alpha / nu
    lam0 = char_slope(family, lower, model)
    out = []
    prev = lower
    for k in range(1, nu + 1):
        nxt = upper if k == nu else _rarefaction_to_slope(family, lower, lam0 + k * piece, model)
        out.append(FanFront(char_slope(family, prev, model), family, "rarefaction", piece, prev, nxt, anchor))
        prev = nxt
    return out


def split_fan(fan: Union[WaveFan, BoundaryFan], delta: float, origin, model: GasModel) -> FrontFan:
    """Replace each wave of ``fan`` by straight fronts emanating from ``origin``.

    Shocks become one front at the shock slope; contacts one front at the flow
    slope carrying ``(alpha2, alpha3)``; rarefactions of strength alpha become
    ``nu`` steps of strength alpha/nu, each moving at the characteristic slope
    of its lower state.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    anchor = (float(origin[0]), float(origin[1]))
    if isinstance(fan, BoundaryFan):
        return FrontFan(tuple(_gnl_fronts(4, fan.alpha4, fan.middle, fan.above, delta, model, anchor)))
    a1, a2, a3, a4 = fan.alphas
    u1, u2 = fan.middles
    fronts = _gnl_fronts(1, a1, fan.below, u1, delta, model, anchor)
    if abs(a2) > ZERO_WAVE or abs(a3) > ZERO_WAVE:
        fronts.append(FanFront(u1.v / u1.u, 2, "contact", (a2, a3), u1, u2, anchor))
    fronts += _gnl_fronts(4, a4, u2, fan.above, delta, model, anchor)
    return FrontFan(tuple(fronts))
