"""Glimm functional G = V + kappa Q over tracked fronts, and its monitoring.

Fronts are read through three attributes only: ``family`` (1, 2 for a
contact, 4), ``kind`` and ``strength`` (a pair for contacts).  The free
boundary is never part of the functional.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .gas import GasModel, GasState
from .riemann import reflection_coefficient

GROWTH_TOL = 1e-12
# absolute roundoff allowance in the collision check on Q
QDROP_SLACK = 1e-15
QDROP_FACTOR = 0.25
# below this |b_alpha b_beta| the change of Q is lost in roundoff
QDROP_RESOLVED = 1e-14


@dataclass(frozen=True)
class GlimmRecord:
    x: float
    V: float
    Q: float
    G: float
    event_kind: str
    flagged: bool = False
    q_drop_ratio: Optional[float] = None
    reflection_ratio: Optional[float] = None
    mismatch: float = 0.0
    q_product: Optional[float] = None

    @property
    def q_drop_ok(self) -> Optional[bool]:
        """Q fell by at least QDROP_FACTOR * |b_alpha b_beta| (collisions only)."""
        if self.q_product is None:
            return None
        return self.q_drop_ratio * self.q_product + QDROP_SLACK >= QDROP_FACTOR * self.q_product


@dataclass(frozen=True)
class WeightedStrength:
    raw: float
    weighted: float


def weighted_strength(front, kplus: float) -> WeightedStrength:
    """b = k+ * alpha for 1-fronts, alpha otherwise; |alpha2| + |alpha3| for contacts."""
    if front.family == 2:
        a2, a3 = front.strength
        raw = abs(a2) + abs(a3)
        return WeightedStrength(raw, raw)
    a = float(front.strength)
    return WeightedStrength(a, kplus * a if front.family == 1 else a)


def _size(front) -> float:
    if front.family == 2:
        return abs(front.strength[0]) + abs(front.strength[1])
    return abs(front.strength)


def _arrays(fronts, kplus):
    n = len(fronts)
    fam = np.fromiter((f.family for f in fronts), int, n)
    b = np.fromiter((_size(f) for f in fronts), float, n)
    b[fam == 1] *= kplus
    shock = np.fromiter((f.kind == "shock" for f in fronts), bool, n)
    return fam, b, shock


def approaching_mask(fam: np.ndarray, shock: np.ndarray) -> np.ndarray:
    """Boolean matrix M[i, j] (i below j) of approaching pairs."""
    lower_f = fam[:, None]
    upper_f = fam[None, :]
    same_gnl = (lower_f == upper_f) & ((lower_f == 1) | (lower_f == 4))
    either_shock = shock[:, None] | shock[None, :]
    mask = (lower_f > upper_f) | (same_gnl & either_shock)
    return np.triu(mask, k=1)


def _potential(fam: np.ndarray, b: np.ndarray, shock: np.ndarray) -> float:
    """Interaction potential in O(n) from prefix sums over the fronts below."""

    def below(mask):
        c = np.cumsum(np.where(mask, b, 0.0))
        return np.concatenate(([0.0], c[:-1]))

    p1, p2, p4 = below(fam == 1), below(fam == 2), below(fam == 4)
    s1, s4 = below((fam == 1) & shock), below((fam == 4) & shock)
    partner = np.where(
        fam == 1, p2 + p4 + np.where(shock, p1, s1),
        np.where(fam == 2, p4, np.where(shock, p4, s4)),
    )
    return float(np.dot(b, partner))


def functional(fronts: Sequence, kappa: float, kplus: float) -> tuple[float, float, float]:
    """(V, Q, G) for fronts ordered from bottom to top."""
    if len(fronts) == 0:
        return 0.0, 0.0, 0.0
    fam, b, shock = _arrays(fronts, kplus)
    V = float(b.sum())
    Q = _potential(fam, b, shock)
    return V, Q, V + kappa * Q


def potential_bruteforce(fronts: Sequence, kplus: float) -> float:
    """Pairwise O(n^2) evaluation of Q, used as a cross-check."""
    if len(fronts) == 0:
        return 0.0
    fam, b, shock = _arrays(fronts, kplus)
    return float(np.sum(np.outer(b, b)[approaching_mask(fam, shock)]))


def record(history: list, x: float, fronts: Sequence, event_kind: str, kappa: float, kplus: float,
           incoming: Optional[Sequence] = None, mismatch: float = 0.0) -> list:
    """Append the record after an event and flag any growth of G.

    ``incoming`` holds the front(s) consumed by the event.  For a collision
    the relative drop of Q is stored; for a reflection the ratio of weighted
    reflected to incident strength.  ``mismatch`` is the largest gap between
    the Riemann data actually used and the flanks of the incoming fronts; it
    is nonzero only downstream of removed fronts.
    """
    V, Q, G = functional(fronts, kappa, kplus)
    flagged = False
    q_ratio = None
    q_prod = None
    r_ratio = None
    if history:
        prev = history[-1]
        flagged = G > prev.G + GROWTH_TOL * max(1.0, prev.G)
        if incoming:
            b_in = [abs(weighted_strength(f, kplus).weighted) for f in incoming]
            if event_kind == "collision" and b_in[0] * b_in[1] > 0.0:
                q_prod = b_in[0] * b_in[1]
                q_ratio = (prev.Q - Q) / q_prod
            elif event_kind == "reflection" and b_in[0] > 0.0:
                r_ratio = (V - prev.V + b_in[0]) / b_in[0]
    history.append(GlimmRecord(x, V, Q, G, event_kind, bool(flagged), q_ratio, r_ratio, float(mismatch), q_prod))
    return history


def flagged_records(history: Sequence[GlimmRecord]) -> list[GlimmRecord]:
    return [r for r in history if r.flagged]


def reflection_range(center: GasState, radius: float, model: GasModel, points: int = 5) -> tuple[float, float]:
    """(min, max) of the reflection factor on a grid over the max-norm ball."""
    offs = np.linspace(-radius, radius, points)
    vals = []
    base = center.as_array()
    for d in itertools.product(offs, repeat=4):
        s = GasState.from_array(base + np.array(d))
        vals.append(reflection_coefficient(s, model))
    return float(min(vals)), float(max(vals))


def default_kplus(center: GasState, radius: float, model: GasModel, factor: float = 2.0) -> float:
    return factor * reflection_range(center, radius, model)[1]


# -- interaction estimate -----------------------------------------------------

def _as_vector(family: int, strength) -> np.ndarray:
    out = np.zeros(4)
    if family == 2:
        out[1], out[2] = strength
    else:
        out[0 if family == 1 else 3] = strength
    return out


def interaction_size(lower: np.ndarray, upper: np.ndarray) -> float:
    """Approaching-pair size of two wave vectors (lower fan below upper fan)."""
    a, b = np.abs(lower), np.abs(upper)
    d = a[3] * (b[0] + b[1] + b[2]) + (a[1] + a[2]) * b[0]
    for j in (0, 3):
        if lower[j] < 0.0 or upper[j] < 0.0:
            d += a[j] * b[j]
    return float(d)


def interaction_audit(events, floor: float = 1e-13) -> dict:
    """Worst ratio |gamma - alpha - beta| / size over all collisions.

    Errors below ``floor`` are roundoff and count as zero.  Collisions whose
    Riemann data differ from the incoming flanks (after removals) are counted
    separately and left out of the ratio.
    """
    worst = 0.0
    count = 0
    skipped = 0
    for ev in events:
        if ev.kind != "collision":
            continue
        if ev.mismatch > 0.0:
            skipped += 1
            continue
        (_, fa, _, sa, _), (_, fb, _, sb, _) = ev.incoming
        lower = _as_vector(fa, sa)
        upper = _as_vector(fb, sb)
        size = interaction_size(lower, upper)
        err = max(float(np.max(np.abs(np.asarray(ev.fan_alphas) - lower - upper))) - floor, 0.0)
        if size > 0.0:
            worst = max(worst, err / size)
            count += 1
    return {"collisions": count, "max_ratio": worst if count else math.nan, "skipped_mismatch": skipped}
