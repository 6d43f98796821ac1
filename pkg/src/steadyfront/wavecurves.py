"""Elementary wave curves through a state and the strength-parameterised maps.

Conventions
-----------
``phi_*`` maps a lower state to the upper state across a wave of the given
family; ``psi_*`` is the inverse (upper to lower).  Strength ``alpha`` for the
genuinely nonlinear families 1 and 4 is

* ``lambda_j(upper) - lambda_j(lower)`` on the rarefaction branch (alpha >= 0),
  which is the integral-curve parameter once r_j is normalised;
* ``(p_upper - p_lower) / r_j^(3)(lower)`` on the shock branch (alpha < 0),
  so both branches share the tangent r_j at alpha = 0.

Both branches are evaluated in closed form.  Integral curves of r_j are the
Prandtl-Meyer simple waves (isentropic, constant Bernoulli head, constant
``theta -+ nu(M)``); shock states follow from the oblique Hugoniot relations
written in terms of the normal mass flux.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, CurveRangeError, NotHyperbolicError
from .gas import GasModel, GasState, char_slope, char_slopes, rvec, rvec_pressure

CURVE_LIMIT = 0.3

_SIGMA = {1: -1.0, 4: 1.0}


@dataclass(frozen=True)
class WaveBranch:
    family: int
    kind: str
    strength: float


def branch_kind(family: int, alpha: float) -> str:
    if family == 2:
        return "vortex-sheet"
    if family == 3:
        return "entropy-wave"
    if family in (1, 4):
        return "rarefaction" if alpha >= 0.0 else "shock"
    raise ValueError(f"unknown family {family}")


def _sigma(family: int) -> float:
    try:
        return _SIGMA[family]
    except KeyError:
        raise ValueError(f"genuinely nonlinear family must be 1 or 4, got {family}") from None


def _check_alpha(alpha: float) -> None:
    if not abs(alpha) <= CURVE_LIMIT:
        raise CurveRangeError(f"|alpha| = {abs(alpha):.3g} exceeds the validity radius {CURVE_LIMIT}")


def _supersonic(state: GasState, model: GasModel) -> GasState:
    try:
        char_slopes(state, model)
    except (NotHyperbolicError, ValueError) as exc:
        raise CurveRangeError(f"curve left validity region: {exc}") from None
    return state


# -- contacts -----------------------------------------------------------------

def phi_contact(alpha2: float, alpha3: float, base: GasState) -> GasState:
    """Vortex sheet (scales velocity) followed by entropy wave (scales density)."""
    s = math.exp(alpha2)
    return GasState(base.u * s, base.v * s, base.p, base.rho * math.exp(alpha3))


def psi_contact(alpha2: float, alpha3: float, above: GasState) -> GasState:
    return phi_contact(-alpha2, -alpha3, above)


def contact_strengths(below: GasState, above: GasState) -> tuple[float, float]:
    """(alpha2, alpha3) of a contact joining two states of equal p and flow angle."""
    q_b = math.hypot(below.u, below.v)
    q_a = math.hypot(above.u, above.v)
    return math.log(q_a / q_b), math.log(above.rho / below.rho)


# -- simple-wave (rarefaction) curve ------------------------------------------

def prandtl_meyer(mach: float, gamma: float) -> float:
    """Prandtl-Meyer angle nu(M) for M >= 1."""
    if mach < 1.0:
        raise CurveRangeError(f"Prandtl-Meyer angle needs M >= 1, got {mach}")
    g = math.sqrt((gamma + 1.0) / (gamma - 1.0))
    b = math.sqrt(mach * mach - 1.0)
    return g * math.atan(b / g) - math.atan(b)


def isentrope_state(family: int, base: GasState, p: float, model: GasModel) -> GasState:
    """State at pressure ``p`` on the family-j integral curve through ``base``."""
    sigma = _sigma(family)
    g = model.gamma
    if not p > 0.0:
        raise CurveRangeError(f"non-positive pressure {p} on simple-wave curve")
    rho = base.rho * (p / base.p) ** (1.0 / g)
    c2_0 = g * base.p / base.rho
    c2 = g * p / rho
    q0 = math.hypot(base.u, base.v)
    q2 = q0 * q0 + 2.0 / (g - 1.0) * (c2_0 - c2)
    if not q2 > c2:
        raise CurveRangeError("simple-wave curve reached the sonic line")
    q = math.sqrt(q2)
    theta0 = math.atan2(base.v, base.u)
    dnu = prandtl_meyer(q / math.sqrt(c2), g) - prandtl_meyer(q0 / math.sqrt(c2_0), g)
    # family 4 keeps theta + nu fixed, family 1 keeps theta - nu fixed
    theta = theta0 - sigma * dnu
    return _supersonic(GasState(q * math.cos(theta), q * math.sin(theta), p, rho), model)


def _rarefaction_to_slope(family: int, base: GasState, target: float, model: GasModel) -> GasState:
    """State on the integral curve through ``base`` where lambda_j equals ``target``."""
    p = base.p
    state = base
    for _ in range(60):
        lam = char_slope(family, state, model)
        err = target - lam
        if abs(err) <= 1e-15 * max(1.0, abs(target)):
            return state
        step = err * rvec_pressure(family, state, model)
        p_new = p + step
        if not p_new > 0.5 * p:
            break
        p = p_new
        try:
            state = isentrope_state(family, base, p, model)
        except CurveRangeError:
            break
        if abs(step) <= 4e-16 * p:
            return state

    def f(pp):
        return char_slope(family, isentrope_state(family, base, pp, model), model) - target

    lo, hi = base.p, base.p
    # lambda_4 increases with p, lambda_1 decreases with p
    increasing = family == 4
    need_up = (target > char_slope(family, base, model)) == increasing
    for _ in range(60):
        if need_up:
            hi *= 1.25
        else:
            lo *= 0.8
        try:
            if f(lo) * f(hi) <= 0.0:
                p = brentq(f, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=200)
                return isentrope_state(family, base, p, model)
        except CurveRangeError:
            break
    raise CurveRangeError("no state on the simple-wave curve matches the requested strength")


# -- Hugoniot locus -----------------------------------------------------------

def hugoniot_state(family: int, known: GasState, p: float, model: GasModel) -> GasState:
    """State across a family-j shock from ``known`` with pressure ``p`` on the other side.

    The relations are symmetric in which side is known: the mass flux across
    the shock is ``m^2 = rho a / 2`` with ``a = (g+1) p + (g-1) p_known``, the
    tangential velocity is continuous and the normal velocity jumps from
    ``m/rho`` to ``m/rho'``.
    """
    sigma = _sigma(family)
    g = model.gamma
    p0, rho0 = known.p, known.rho
    if not p > 0.0:
        raise CurveRangeError(f"non-positive pressure {p} on Hugoniot locus")
    a = (g + 1.0) * p + (g - 1.0) * p0
    rho = rho0 * a / ((g - 1.0) * p + (g + 1.0) * p0)
    m = math.sqrt(0.5 * rho0 * a)
    w0 = m / rho0
    w1 = m / rho
    q0 = math.hypot(known.u, known.v)
    if not w0 < q0:
        raise CurveRangeError("shock too strong for the incoming flow")
    phi = math.atan2(known.v, known.u) + sigma * math.asin(w0 / q0)
    nx, ny = math.sin(phi), -math.cos(phi)
    du = sigma * (w1 - w0)
    return _supersonic(GasState(known.u + du * nx, known.v + du * ny, p, rho), model)


def hugoniot_slope(family: int, known: GasState, p: float, model: GasModel) -> float:
    """Slope dy/dx of the shock through ``known`` with pressure ``p`` on the other side."""
    sigma = _sigma(family)
    g = model.gamma
    a = (g + 1.0) * p + (g - 1.0) * known.p
    w0 = math.sqrt(0.5 * known.rho * a) / known.rho
    q0 = math.hypot(known.u, known.v)
    return math.tan(math.atan2(known.v, known.u) + sigma * math.asin(w0 / q0))


def is_shock(family: int, p_lower: float, p_upper: float) -> bool:
    """Compressive iff upstream pressure is below downstream pressure.

    The upstream side is the lower state for family 1 and the upper state
    for family 4.
    """
    _sigma(family)
    return p_lower < p_upper if family == 1 else p_upper < p_lower


def wave_state(family: int, known: GasState, p: float, known_is_lower: bool, model: GasModel) -> GasState:
    """State at pressure ``p`` on the admissible family-j curve through ``known``.

    Picks the shock or the simple-wave branch according to the entropy
    condition; used by the Riemann solvers.
    """
    lower_p, upper_p = (known.p, p) if known_is_lower else (p, known.p)
    if lower_p != upper_p and is_shock(family, lower_p, upper_p):
        return hugoniot_state(family, known, p, model)
    return isentrope_state(family, known, p, model)


# -- strength-parameterised maps ----------------------------------------------

def phi_gnl(family: int, alpha: float, base: GasState, model: GasModel) -> GasState:
    """Upper state across a family-j wave of strength ``alpha`` above ``base``."""
    _sigma(family)
    _check_alpha(alpha)
    _supersonic(base, model)
    if alpha == 0.0:
        return base
    if alpha > 0.0:
        return _rarefaction_to_slope(family, base, char_slope(family, base, model) + alpha, model)
    p = base.p + alpha * rvec_pressure(family, base, model)
    return hugoniot_state(family, base, p, model)


def psi_gnl(family: int, alpha: float, above: GasState, model: GasModel) -> GasState:
    """Lower state below a family-j wave of strength ``alpha`` under ``above``."""
    _sigma(family)
    _check_alpha(alpha)
    _supersonic(above, model)
    if alpha == 0.0:
        return above
    if alpha > 0.0:
        return _rarefaction_to_slope(family, above, char_slope(family, above, model) - alpha, model)

    p_up = above.p

    def g(pl):
        lower = hugoniot_state(family, above, pl, model)
        return p_up - pl - alpha * rvec_pressure(family, lower, model)

    width = abs(alpha * rvec_pressure(family, above, model))
    direction = 1.0 if family == 4 else -1.0
    near = p_up
    far = p_up + direction * 2.0 * width
    if far == near:
        # the pressure jump is below floating-point resolution
        return above
    for _ in range(40):
        if g(near) * g(far) <= 0.0:
            pl = brentq(g, min(near, far), max(near, far), xtol=1e-16, rtol=1e-15, maxiter=200)
            return hugoniot_state(family, above, pl, model)
        near, far = far, p_up + 2.0 * (far - p_up)
        if not far > 0.0:
            break
    raise CurveRangeError("inverse shock map failed to bracket the lower pressure")


def phi_composite(alphas, below: GasState, model: GasModel) -> tuple[GasState, tuple[GasState, GasState]]:
    """Compose 1-wave, vortex sheet, entropy wave and 4-wave from ``below``.

    Returns the top state and the two middle states (U1 above the 1-wave,
    U2 below the 4-wave).
    """
    a1, a2, a3, a4 = (float(a) for a in alphas)
    u1 = phi_gnl(1, a1, below, model)
    u2 = phi_contact(a2, a3, u1)
    top = phi_gnl(4, a4, u2, model)
    return top, (u1, u2)


def strength(family: int, below: GasState, above: GasState, model: GasModel) -> float:
    """Strength of the family-j wave joining ``below`` to ``above`` (assumed connected)."""
    if is_shock(family, below.p, above.p):
        return (above.p - below.p) / rvec_pressure(family, below, model)
    return char_slope(family, above, model) - char_slope(family, below, model)


def shock_slope(family: int, below: GasState, above: GasState, model: GasModel, tol: float = 1e-7) -> float:
    """Slope of the family-j shock joining ``below`` and ``above``.

    Raises ``ConsistencyError`` when the pair is not on an admissible
    Hugoniot branch.
    """
    if below.p == above.p:
        if max(abs(below.u - above.u), abs(below.v - above.v), abs(below.rho - above.rho)) > tol:
            raise ConsistencyError("equal pressures but distinct states: not a shock")
        return char_slope(family, below, model)
    if not is_shock(family, below.p, above.p):
        raise ConsistencyError("pressure jump has the rarefaction sign; no admissible shock")
    predicted = hugoniot_state(family, below, above.p, model)
    gap = np.max(np.abs(predicted.as_array() - above.as_array()))
    if gap > tol * max(1.0, float(np.max(np.abs(above.as_array())))):
        raise ConsistencyError(f"states are not Hugoniot-related (mismatch {gap:.3e})")
    return hugoniot_slope(family, below, above.p, model)


def tangent(family: int, state: GasState, model: GasModel) -> np.ndarray:
    """Tangent of the family-j wave curve at ``state`` (the eigenvector r_j)."""
    return rvec(family, state, model)
