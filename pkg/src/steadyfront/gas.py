"""Polytropic gas, steady Euler fluxes and the supersonic eigensystem.

States are primitive ``U = (u, v, p, rho)``.  The steady system is written
``d/dx W(U) + d/dy H(U) = 0`` and is hyperbolic in x while ``u > c``.

Two transcription issues in the source formulas are resolved here:

* the genuinely nonlinear slopes carry the sound speed on the root,
  ``lambda = (u v -+ c sqrt(u^2 + v^2 - c^2)) / (u^2 - c^2)``; without the
  factor ``c`` the characteristic determinant does not vanish;
* the internal energy is ``e = p / ((gamma - 1) rho)``, the only choice
  consistent with the enthalpy appearing in the energy flux.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NotHyperbolicError


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4
    kappa_eos: float = 1.0
    c_v: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.kappa_eos > 0.0:
            raise ValueError(f"kappa_eos must be positive, got {self.kappa_eos}")
        if not self.c_v > 0.0:
            raise ValueError(f"c_v must be positive, got {self.c_v}")


@dataclass(frozen=True)
class GasState:
    u: float
    v: float
    p: float
    rho: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.p, self.rho])

    @classmethod
    def from_array(cls, a) -> "GasState":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @property
    def angle(self) -> float:
        """Flow slope v/u, the speed of both linearly degenerate families."""
        return self.v / self.u

    def check(self) -> "GasState":
        if not (self.p > 0.0 and self.rho > 0.0) or not all(
            math.isfinite(t) for t in (self.u, self.v, self.p, self.rho)
        ):
            raise DomainError(f"non-physical state {self}")
        return self


def state_distance(a: GasState, b: GasState) -> float:
    """Max-norm distance in (u, v, p, rho)."""
    return max(abs(a.u - b.u), abs(a.v - b.v), abs(a.p - b.p), abs(a.rho - b.rho))


def sound_speed(state: GasState, model: GasModel) -> float:
    state.check()
    return math.sqrt(model.gamma * state.p / state.rho)


class Thermo(NamedTuple):
    entropy: float
    internal_energy: float
    total_energy: float
    mach: float


def entropy(state: GasState, model: GasModel) -> float:
    state.check()
    return model.c_v * math.log(state.p / (model.kappa_eos * state.rho ** model.gamma))


def thermo(state: GasState, model: GasModel) -> Thermo:
    c = sound_speed(state, model)
    e = state.p / ((model.gamma - 1.0) * state.rho)
    q2 = state.u ** 2 + state.v ** 2
    return Thermo(entropy(state, model), e, 0.5 * q2 + e, math.sqrt(q2) / c)


def fluxes(state: GasState, model: GasModel) -> tuple[np.ndarray, np.ndarray]:
    """Flux vectors ``W(U)`` (x-direction) and ``H(U)`` (y-direction)."""
    u, v, p, rho = state.u, state.v, state.p, state.rho
    g = model.gamma
    h_tot = g * p / ((g - 1.0) * rho) + 0.5 * (u * u + v * v)
    W = np.array([rho * u, rho * u * u + p, rho * u * v, rho * u * h_tot])
    H = np.array([rho * v, rho * u * v, rho * v * v + p, rho * v * h_tot])
    return W, H


def entropy_fluxes(state: GasState, model: GasModel) -> tuple[float, float]:
    """(rho u S, rho v S), the fluxes of the steady Clausius inequality."""
    s = entropy(state, model)
    return state.rho * state.u * s, state.rho * state.v * s


def jump_residual(below: GasState, above: GasState, slope: float, model: GasModel) -> np.ndarray:
    """``slope [W] - [H]`` across the line ``dy/dx = slope`` (upper minus lower).

    Zero exactly when the Rankine-Hugoniot conditions hold; the weak form
    of a piecewise-constant field reduces to these line densities.
    """
    Wb, Hb = fluxes(below, model)
    Wa, Ha = fluxes(above, model)
    return slope * (Wa - Wb) - (Ha - Hb)


# -- eigensystem -------------------------------------------------------------

_SIGN = {1: -1.0, 4: 1.0}


def _check_family(family: int) -> float:
    try:
        return _SIGN[family]
    except KeyError:
        raise ValueError(f"genuinely nonlinear family must be 1 or 4, got {family}") from None


def char_slopes(state: GasState, model: GasModel) -> tuple[float, float]:
    """(lambda_1, lambda_4) for a state with u > c."""
    u, v = state.u, state.v
    c2 = model.gamma * state.p / state.rho
    if not (state.p > 0.0 and state.rho > 0.0):
        raise DomainError(f"non-physical state {state}")
    d = u * u - c2
    if u <= 0.0 or d <= 0.0:
        raise NotHyperbolicError(f"state {state} is not x-hyperbolic (u <= c)")
    root = math.sqrt(c2) * math.sqrt(u * u + v * v - c2)
    return (u * v - root) / d, (u * v + root) / d


def char_slope(family: int, state: GasState, model: GasModel) -> float:
    l1, l4 = char_slopes(state, model)
    if family == 1:
        return l1
    if family == 4:
        return l4
    if family in (2, 3):
        return state.v / state.u
    raise ValueError(f"unknown family {family}")


def lambda_gradient(family: int, state: GasState, model: GasModel) -> np.ndarray:
    """Analytic gradient of lambda_j (j = 1, 4) with respect to (u, v, p, rho)."""
    sigma = _check_family(family)
    u, v, p, rho = state.u, state.v, state.p, state.rho
    g = model.gamma
    c2 = g * p / rho
    c = math.sqrt(c2)
    d = u * u - c2
    if u <= 0.0 or d <= 0.0:
        raise NotHyperbolicError(f"state {state} is not x-hyperbolic (u <= c)")
    r = math.sqrt(u * u + v * v - c2)
    lam = (u * v + sigma * c * r) / d
    dl_du = (v + sigma * c * u / r) / d - 2.0 * u * lam / d
    dl_dv = (u + sigma * c * v / r) / d
    # d(c r)/d(c^2) = (r^2 - c^2) / (2 c r); d(d)/d(c^2) = -1
    dl_dc2 = sigma * (r * r - c2) / (2.0 * c * r) / d + lam / d
    return np.array([dl_du, dl_dv, dl_dc2 * g / rho, -dl_dc2 * c2 / rho])


def _raw_rvec(family: int, state: GasState, model: GasModel, lam: float) -> np.ndarray:
    c2 = model.gamma * state.p / state.rho
    w = state.rho * (lam * state.u - state.v)
    return np.array([-lam, 1.0, w, w / c2])


def kappa(family: int, state: GasState, model: GasModel) -> float:
    """Normalisation making r_j . grad lambda_j = 1."""
    lam = char_slope(family, state, model)
    return 1.0 / float(_raw_rvec(family, state, model, lam) @ lambda_gradient(family, state, model))


def rvec(family: int, state: GasState, model: GasModel) -> np.ndarray:
    if family == 2:
        return np.array([state.u, state.v, 0.0, 0.0])
    if family == 3:
        return np.array([0.0, 0.0, 0.0, state.rho])
    lam = char_slope(family, state, model)
    raw = _raw_rvec(family, state, model, lam)
    return raw / float(raw @ lambda_gradient(family, state, model))


def rvec_pressure(family: int, state: GasState, model: GasModel) -> float:
    """Pressure component r_j^(3) of the normalised eigenvector (j = 1, 4)."""
    return float(rvec(family, state, model)[2])


@dataclass(frozen=True)
class EigenSystem:
    lambdas: tuple[float, float, float, float]
    rvecs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    kappas: tuple[float, float]


def eigensystem(state: GasState, model: GasModel) -> EigenSystem:
    state.check()
    l1, l4 = char_slopes(state, model)
    k1 = kappa(1, state, model)
    k4 = kappa(4, state, model)
    lv = state.v / state.u
    return EigenSystem(
        lambdas=(l1, lv, lv, l4),
        rvecs=(rvec(1, state, model), rvec(2, state, model), rvec(3, state, model), rvec(4, state, model)),
        kappas=(k1, k4),
    )


def flux_jacobians(state: GasState, model: GasModel, h: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference Jacobians dW/dU and dH/dU."""
    base = state.as_array()
    JW = np.empty((4, 4))
    JH = np.empty((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = h * max(1.0, abs(base[k]))
        Wp, Hp = fluxes(GasState.from_array(base + e), model)
        Wm, Hm = fluxes(GasState.from_array(base - e), model)
        JW[:, k] = (Wp - Wm) / (2.0 * e[k])
        JH[:, k] = (Hp - Hm) / (2.0 * e[k])
    return JW, JH
