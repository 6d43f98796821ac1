"""Certification of tracked solutions.

* per-front jump audit (Rankine-Hugoniot, contact and boundary conditions);
* weak-form residuals of the four conservation laws and of the entropy
  inequality over a slab ``s <= x <= t`` for a fixed family of bumps;
* boundary-straightened L1 distance between runs and sup distance of
  free boundaries;
* far-field check after the last interaction.

For piecewise-constant data the cell integrals ``int_C F . grad(psi)`` are
evaluated exactly through the divergence theorem.  Vertical cell edges
cancel against the traces on ``x = s`` and ``x = t``, so each residual is a
sum of line integrals of ``psi * (slope [W] - [H])`` along front pieces plus
the free-boundary terms carrying the still-gas pressure.  Along a straight
piece ``psi`` is a polynomial of degree 16 in x, so a 12-point Gauss rule on
the part inside the support is exact.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .gas import GasModel, GasState, entropy, fluxes, jump_residual
from .riemann import ZERO_WAVE, solve_free_boundary, solve_standard
from .tracker import Front, TrackerState, boundary_polyline, next_event, state_slice

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


# -- jump audit ---------------------------------------------------------------

@dataclass(frozen=True)
class FrontResidual:
    id: int
    family: int
    kind: str
    residual: float
    strength: float


@dataclass(frozen=True)
class RHReport:
    fronts: tuple[FrontResidual, ...]
    boundary: tuple[float, ...]
    max_shock: float
    max_contact: float
    max_rarefaction: float
    max_boundary: float


def front_residual(front: Front, model: GasModel) -> float:
    """Normal jump residual of a front from its own flank states.

    Shocks and rarefaction steps: max |[W] n1 + [H] n2| with
    n = (s, -1)/sqrt(1 + s^2).  Contacts: max of |[p]| and the normal
    velocity on either side.
    """
    s = front.slope
    norm = math.sqrt(1.0 + s * s)
    if front.family == 2:
        un_b = (front.below.u * s - front.below.v) / norm
        un_a = (front.above.u * s - front.above.v) / norm
        return max(abs(front.above.p - front.below.p), abs(un_b), abs(un_a))
    return float(np.max(np.abs(jump_residual(front.below, front.above, s, model)))) / norm


def rh_audit(state: TrackerState) -> RHReport:
    """Jump residuals of every front ever created and of every boundary segment."""
    model = state.config.model
    rows = []
    for f, _ in state.all_fronts():
        rows.append(FrontResidual(f.id, f.family, f.kind, front_residual(f, model), f.size))
    bnd = tuple(
        max(abs(seg.state.p - state.config.pbar), abs(seg.state.v - seg.slope * seg.state.u))
        for seg in state.boundary
    )

    def worst(kind):
        vals = [r.residual for r in rows if r.kind == kind]
        return max(vals) if vals else 0.0

    return RHReport(tuple(rows), bnd, worst("shock"), worst("contact"), worst("rarefaction"),
                    max(bnd) if bnd else 0.0)


# -- test functions -----------------------------------------------------------

def bump(z):
    """C^3 polynomial bump (1 - z^2)^4 on |z| < 1, zero outside."""
    z = np.asarray(z, dtype=float)
    return np.where(np.abs(z) < 1.0, (1.0 - z * z) ** 4, 0.0)


@dataclass(frozen=True)
class TestFunction:
    """psi(x, y) = bump((x - xc)/rx) * bump((y - yc)/ry), nonnegative."""
    xc: float
    yc: float
    rx: float
    ry: float

    __test__ = False

    def __call__(self, x, y):
        return bump((np.asarray(x) - self.xc) / self.rx) * bump((np.asarray(y) - self.yc) / self.ry)

    def gradient(self, x, y):
        zx = (np.asarray(x, dtype=float) - self.xc) / self.rx
        zy = (np.asarray(y, dtype=float) - self.yc) / self.ry
        bx, by = bump(zx), bump(zy)
        dbx = np.where(np.abs(zx) < 1.0, -8.0 * zx * (1.0 - zx * zx) ** 3, 0.0) / self.rx
        dby = np.where(np.abs(zy) < 1.0, -8.0 * zy * (1.0 - zy * zy) ** 3, 0.0) / self.ry
        return dbx * by, bx * dby


def default_test_functions(s: float, t: float, y_lo: float, y_hi: float,
                           grid: int = 5, scales: Sequence[float] = (1.0, 2.0)) -> list[TestFunction]:
    """Bumps centred on a ``grid x grid`` lattice over the slab, at two radii."""
    out = []
    hx = (t - s) / grid
    hy = (y_hi - y_lo) / grid
    for m in scales:
        for i in range(grid):
            for j in range(grid):
                out.append(TestFunction(s + (i + 0.5) * hx, y_lo + (j + 0.5) * hy, m * hx, m * hy))
    return out


# -- weak form ----------------------------------------------------------------

@dataclass(frozen=True)
class WeakFormReport:
    F: np.ndarray
    G: np.ndarray
    I: np.ndarray
    J: np.ndarray
    E: np.ndarray
    test_set: str
    pieces: int
    max_residual: float = field(default=0.0)
    max_entropy: float = field(default=0.0)


@dataclass(frozen=True)
class Piece:
    """A straight stretch of a front (or of the boundary) with constant flanks."""
    xa: float
    xb: float
    ya: float
    slope: float
    below: Optional[GasState]
    above: GasState


def front_pieces(state: TrackerState, s: float, t: float) -> list[Piece]:
    """Front stretches inside [s, t] with the actual flow states on both sides."""
    cuts = {s, t}
    cuts.update(ev.x for ev in state.events if s < ev.x < t)
    xs = sorted(cuts)
    fronts = sorted(state.all_fronts(), key=lambda fe: fe[0].anchor[0])
    active: dict[int, tuple[Front, float]] = {}
    open_pieces: dict[int, list] = {}
    done: list[Piece] = []
    ptr = 0
    starts = [b.x0 for b in state.boundary]

    def close(fid):
        f, xa, xb, lower = open_pieces.pop(fid)
        if xb > xa:
            done.append(Piece(xa, xb, f.y_at(xa), f.slope, lower, f.region))

    for xa, xb in zip(xs[:-1], xs[1:]):
        if xb <= xa:
            continue
        while ptr < len(fronts) and fronts[ptr][0].anchor[0] <= xa:
            f, x_end = fronts[ptr]
            active[f.id] = (f, x_end)
            ptr += 1
        for fid in [k for k, (f, x_end) in active.items() if x_end <= xa]:
            del active[fid]
            if fid in open_pieces:
                close(fid)
        xm = 0.5 * (xa + xb)
        alive = sorted((f for f, _ in active.values()), key=lambda f: (f.y_at(xm), f.slope))
        lower = state.boundary[max(bisect.bisect_right(starts, xm) - 1, 0)].state
        for f in alive:
            cur = open_pieces.get(f.id)
            if cur is not None and cur[3] is lower and cur[2] == xa:
                cur[2] = xb
            else:
                if cur is not None:
                    close(f.id)
                open_pieces[f.id] = [f, xa, xb, lower]
            lower = f.region
    for fid in list(open_pieces):
        close(fid)
    return done


def boundary_pieces(state: TrackerState, s: float, t: float) -> list[Piece]:
    out = []
    segs = state.boundary
    for k, seg in enumerate(segs):
        x_end = segs[k + 1].x0 if k + 1 < len(segs) else math.inf
        xa, xb = max(seg.x0, s), min(x_end, t)
        if xb > xa:
            out.append(Piece(xa, xb, seg.y_at(xa), seg.slope, None, seg.state))
    return out


def _piece_densities(pieces: Sequence[Piece], model: GasModel, pbar: float) -> np.ndarray:
    """Per-piece 5-vectors: conservation jumps and entropy-flux jump."""
    out = np.empty((len(pieces), 5))
    for k, pc in enumerate(pieces):
        s = pc.slope
        Wa, Ha = fluxes(pc.above, model)
        Sa = entropy(pc.above, model)
        ent_a = s * pc.above.rho * pc.above.u * Sa - pc.above.rho * pc.above.v * Sa
        if pc.below is None:
            # lower edge of the flow region: outward normal points into the still gas
            out[k, :4] = s * Wa - Ha + np.array([0.0, -pbar * s, pbar, 0.0])
            out[k, 4] = ent_a
        else:
            Wb, Hb = fluxes(pc.below, model)
            Sb = entropy(pc.below, model)
            ent_b = s * pc.below.rho * pc.below.u * Sb - pc.below.rho * pc.below.v * Sb
            out[k, :4] = (s * Wa - Ha) - (s * Wb - Hb)
            out[k, 4] = ent_a - ent_b
    return out


def line_integrals(pieces: Sequence[Piece], tf: TestFunction) -> np.ndarray:
    """Exact int psi(x, y(x)) dx along each piece."""
    if not pieces:
        return np.zeros(0)
    xa = np.array([p.xa for p in pieces])
    xb = np.array([p.xb for p in pieces])
    ya = np.array([p.ya for p in pieces])
    sl = np.array([p.slope for p in pieces])
    lo = np.maximum(xa, tf.xc - tf.rx)
    hi = np.minimum(xb, tf.xc + tf.rx)
    y_lo, y_hi = tf.yc - tf.ry, tf.yc + tf.ry
    flat = sl == 0.0
    safe = np.where(flat, 1.0, sl)
    e1 = xa + (y_lo - ya) / safe
    e2 = xa + (y_hi - ya) / safe
    lo = np.where(flat, lo, np.maximum(lo, np.minimum(e1, e2)))
    hi = np.where(flat, hi, np.minimum(hi, np.maximum(e1, e2)))
    inside_flat = (ya > y_lo) & (ya < y_hi)
    hi = np.where(flat & ~inside_flat, lo, hi)
    width = np.clip(hi - lo, 0.0, None)
    half = 0.5 * width
    mid = 0.5 * (hi + lo)
    xq = mid[:, None] + half[:, None] * _GL_X[None, :]
    yq = ya[:, None] + sl[:, None] * (xq - xa[:, None])
    return (tf(xq, yq) * _GL_W[None, :]).sum(axis=1) * half


def weak_form(state: TrackerState, s: float, t: float,
              test_functions: Optional[Sequence[TestFunction]] = None) -> WeakFormReport:
    """Residuals F, G, I, J and entropy value E for each test function."""
    if not s < t:
        raise ValueError("need s < t")
    if t > state.x + 1e-12:
        raise ValueError(f"slab end {t} beyond the advanced range {state.x}")
    cfg = state.config
    pieces = front_pieces(state, s, t) + boundary_pieces(state, s, t)
    if test_functions is None:
        test_functions = default_test_functions(s, t, *slab_extent(state, s, t))
        desc = "5x5 bump lattice, two radii"
    else:
        desc = f"{len(test_functions)} supplied test functions"
    dens = _piece_densities(pieces, cfg.model, cfg.pbar)
    res = np.zeros((len(test_functions), 5))
    for k, tf in enumerate(test_functions):
        res[k] = line_integrals(pieces, tf) @ dens if pieces else 0.0
    F, G, I, J, E = (res[:, c].copy() for c in range(5))
    cons = np.abs(res[:, :4]).max() if len(res) else 0.0
    return WeakFormReport(F, G, I, J, E, desc, len(pieces), float(cons), float(E.max()) if len(E) else 0.0)


def slab_extent(state: TrackerState, s: float, t: float) -> tuple[float, float]:
    """y-range of the slab: from the lowest boundary point to just above the waves."""
    g = boundary_polyline(state, t)
    inside = g[(g[:, 0] >= s) & (g[:, 0] <= t)]
    ends = [state_slice(state, s).g, state_slice(state, t).g]
    y_lo = min([*ends, *(inside[:, 1] if len(inside) else [])])
    tops = [sl.ys[-1] for sl in (state_slice(state, s), state_slice(state, t)) if sl.ys.size]
    y_hi = max(tops) if tops else y_lo + 1.0
    pad = 0.1 * max(y_hi - y_lo, 1e-3)
    return y_lo - pad, y_hi + pad


# -- uniform bounds -----------------------------------------------------------

@dataclass(frozen=True)
class BoundsProfile:
    """TV and sup-deviation of U(x, .) right after x = 0 and after every event."""
    x: np.ndarray
    tv: np.ndarray
    linf: np.ndarray
    max_boundary_slope: float


def bounds_profile(state: TrackerState, reference: GasState) -> BoundsProfile:
    """Sweep the event abscissae; TV uses the max-norm of (u, v, p, rho) jumps."""
    xs = sorted({0.0, *(ev.x for ev in state.events if ev.x <= state.x)})
    fronts = sorted(state.all_fronts(), key=lambda fe: fe[0].anchor[0])
    starts = [b.x0 for b in state.boundary]
    ref = reference.as_array()
    active: dict[int, tuple[Front, float]] = {}
    ptr = 0
    tv, linf = [], []
    for x in xs:
        while ptr < len(fronts) and fronts[ptr][0].anchor[0] <= x:
            f, x_end = fronts[ptr]
            active[f.id] = (f, x_end)
            ptr += 1
        for fid in [k for k, (_, x_end) in active.items() if x_end <= x]:
            del active[fid]
        alive = sorted((f for f, _ in active.values()), key=lambda f: (f.y_at(x), f.slope))
        seg = state.boundary[max(bisect.bisect_right(starts, x) - 1, 0)]
        arr = np.array([seg.state.as_array()] + [f.region.as_array() for f in alive])
        tv.append(float(np.abs(np.diff(arr, axis=0)).max(axis=1).sum()) if len(arr) > 1 else 0.0)
        linf.append(float(np.abs(arr - ref).max()))
    slope = max(abs(b.slope) for b in state.boundary)
    return BoundsProfile(np.array(xs), np.array(tv), np.array(linf), float(slope))


# -- distances ----------------------------------------------------------------

def l1_distance(run_a: TrackerState, run_b: TrackerState, x: float, window: Optional[float] = None) -> float:
    """int_0^window |U_a(x, theta + g_a) - U_b(x, theta + g_b)| d theta, exactly.

    The pointwise norm is the max-norm of (u, v, p, rho).  The default window
    ends at the highest front of either slice; both runs share the far field.
    """
    sa, sb = state_slice(run_a, x), state_slice(run_b, x)
    ta, tb = sa.ys - sa.g, sb.ys - sb.g
    if window is None:
        window = max([0.0, *ta.tolist(), *tb.tolist()])
    cuts = np.unique(np.clip(np.concatenate(([0.0, window], ta, tb)), 0.0, window))
    if cuts.size < 2:
        return 0.0
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    total = 0.0
    for m, w in zip(mids, np.diff(cuts)):
        ua = sa.states[int(np.searchsorted(ta, m, side="right"))].as_array()
        ub = sb.states[int(np.searchsorted(tb, m, side="right"))].as_array()
        total += w * float(np.max(np.abs(ua - ub)))
    return total


def _g_at(poly: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.interp(x, poly[:, 0], poly[:, 1])


def boundary_sup_distance(run_a: TrackerState, run_b: TrackerState, x_max: float) -> float:
    """sup over [0, x_max] of |g_a - g_b|, attained at a vertex of either polyline."""
    pa, pb = boundary_polyline(run_a, x_max), boundary_polyline(run_b, x_max)
    xs = np.unique(np.concatenate((pa[:, 0], pb[:, 0])))
    xs = xs[xs <= x_max]
    return float(np.max(np.abs(_g_at(pa, xs) - _g_at(pb, xs))))


# -- far field ----------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticReport:
    x_last_event: float
    far_states: tuple[GasState, ...]
    boundary_slope_tail: float
    predicted: tuple[GasState, float]
    slope_error: float
    boundary_pressure_error: float
    top_state_error: float
    far_wave_predicted: str
    far_wave_observed: str
    far_wave_net: float
    far_wave_composition: str
    one_fronts_left: int


def asymptotic_check(state: TrackerState, pbar: float, far_field: Optional[GasState] = None) -> AsymptoticReport:
    """Compare the configuration after the last event with the far-field prediction."""
    x_next, kind, _ = next_event(state, math.inf)
    if kind != "none":
        raise ValueError(f"events still pending (next at x={x_next:.6g})")
    x_last = state.events[-1].x if state.events else 0.0
    x_probe = max(state.x, x_last)
    sl = state_slice(state, x_probe)
    top = sl.states[-1]
    far_field = top if far_field is None else far_field
    fan = solve_free_boundary(far_field, pbar, state.config.model)
    k_inf = fan.middle.v / fan.middle.u
    tail = state.boundary[-1].slope
    if abs(fan.alpha4) <= ZERO_WAVE:
        predicted = "none"
    else:
        predicted = "shock" if fan.alpha4 < 0.0 else "rarefaction"
    k = len(state.fronts)
    while k > 0 and state.fronts[k - 1].family == 4:
        k -= 1
    group = state.fronts[k:]
    kinds = {f.kind for f in group}
    composition = "none" if not group else (kinds.pop() if len(kinds) == 1 else "mixed")
    # a delta-split 4-wave may keep weak steps of either kind that never meet,
    # so the type is read off the net 4-wave joining the strip below the group to the top
    net = 0.0
    if group:
        net = solve_standard(state.region_below(k), top, state.config.model).alphas[3]
    observed = "none" if abs(net) <= ZERO_WAVE else ("shock" if net < 0.0 else "rarefaction")
    return AsymptoticReport(
        x_last_event=x_last,
        far_states=tuple(sl.states),
        boundary_slope_tail=tail,
        predicted=(fan.middle, k_inf),
        slope_error=abs(tail - k_inf),
        boundary_pressure_error=abs(sl.states[0].p - pbar),
        top_state_error=float(np.max(np.abs(top.as_array() - far_field.as_array()))),
        far_wave_predicted=predicted,
        far_wave_observed=observed,
        far_wave_net=float(net),
        far_wave_composition=composition,
        one_fronts_left=sum(1 for f in state.fronts if f.family == 1),
    )
