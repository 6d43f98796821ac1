"""Event-driven front tracking for the flow above the free boundary.

Fronts are straight lines stored as anchor plus slope, so positions are
never integrated.  Between events every front is a segment; at an event a
pair of adjacent fronts (or the lowest 1-front and the boundary) is replaced
by the delta-approximate solution of the local Riemann problem.

The state occupying the strip directly above a front is fixed when the front
is created (``Front.region``).  It normally equals the upper flank; the two
differ only when weak high-generation fronts were removed, which is what the
removal rule prescribes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .errors import EventCeilingError, InvariantViolation, RiemannRangeError
from .gas import GasModel, GasState
from .glimm import GlimmRecord, default_kplus, record as glimm_record
from .riemann import FanFront, solve_free_boundary, solve_standard, split_fan

TIE_TOL = 1e-12
PARALLEL_TOL = 1e-10

Strength = Union[float, tuple[float, float]]


@dataclass(frozen=True)
class Front:
    id: int
    family: int
    kind: str
    strength: Strength
    generation: int
    anchor: tuple[float, float]
    slope: float
    below: GasState
    above: GasState
    region: GasState

    def y_at(self, x: float) -> float:
        return self.anchor[1] + self.slope * (x - self.anchor[0])

    @property
    def size(self) -> float:
        """Unweighted strength |alpha|, or |alpha2| + |alpha3| for a contact."""
        if self.family == 2:
            return abs(self.strength[0]) + abs(self.strength[1])
        return abs(self.strength)


@dataclass(frozen=True)
class BoundarySegment:
    x0: float
    y0: float
    slope: float
    state: GasState

    def y_at(self, x: float) -> float:
        return self.y0 + self.slope * (x - self.x0)


@dataclass(frozen=True)
class Event:
    x: float
    y: float
    kind: str
    incoming: tuple
    outgoing: tuple
    fan_alphas: tuple
    removed: float
    mismatch: float = 0.0


@dataclass(frozen=True)
class InitialProfile:
    """Piecewise-constant data on x = 0; ``states[k]`` holds on (b_{k-1}, b_k).

    ``states[-1]`` is the far-field state above the last breakpoint.
    """
    breakpoints: tuple[float, ...]
    states: tuple[GasState, ...]

    def __post_init__(self):
        if len(self.states) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more state than breakpoints")
        b = np.asarray(self.breakpoints, dtype=float)
        if b.size and (b[0] <= 0.0 or np.any(np.diff(b) <= 0.0)):
            raise ValueError("breakpoints must be positive and strictly increasing")

    @property
    def tail(self) -> GasState:
        return self.states[-1]

    def variation(self, reference: GasState) -> float:
        """BV norm of (profile - reference) in the max-norm of (u, v, p, rho)."""
        arr = np.array([s.as_array() for s in self.states])
        jumps = np.abs(np.diff(arr, axis=0)).max(axis=1).sum() if len(arr) > 1 else 0.0
        return float(jumps + np.abs(arr[0] - reference.as_array()).max())

    def value(self, y: float) -> GasState:
        k = int(np.searchsorted(self.breakpoints, y, side="right"))
        return self.states[k]


@dataclass(frozen=True)
class TrackerConfig:
    delta: float = 0.01
    pbar: float = 1.0
    model: GasModel = field(default_factory=GasModel)
    kappa: float = 50.0
    # None: twice the largest reflection factor over the 0.1-ball around the
    # state at the corner, sampled on a grid
    kplus: Optional[float] = None
    c0_eps0: float = 0.25
    cutoff: Optional[int] = None
    max_events: int = 200_000


@dataclass
class TrackerState:
    x: float
    fronts: list[Front]
    boundary: list[BoundarySegment]
    archive: list[tuple[Front, float]]
    events: list[Event]
    config: TrackerConfig
    cutoff: int
    total_strength: float
    removed_strength: float = 0.0
    next_id: int = 0

    @property
    def boundary_state(self) -> GasState:
        return self.boundary[-1].state

    def region_below(self, i: int) -> GasState:
        return self.boundary_state if i == 0 else self.fronts[i - 1].region

    def all_fronts(self) -> list[tuple[Front, float]]:
        """Every front ever created with its end abscissa (inf while alive)."""
        return list(self.archive) + [(f, math.inf) for f in self.fronts]


def generation_cutoff(total: float, delta: float, c0_eps0: float = 0.25) -> int:
    """Largest kept generation N: the integer just above log(delta) / log(4 K T)."""
    if total <= 0.0:
        return 10**6
    base = 4.0 * total / (4.0 * c0_eps0)
    if base >= 1.0:
        raise ValueError(f"total strength {total:.4g} too large for the cutoff (4KT = {base:.3g} >= 1)")
    return int(math.floor(math.log(delta) / math.log(base))) + 1


def _gap(*pairs) -> float:
    """Largest max-norm difference within pairs of states."""
    return max(float(np.max(np.abs(p.as_array() - q.as_array()))) if p is not q else 0.0 for p, q in pairs)


def _make_fronts(state: TrackerState, fan_fronts, generations, region_top: GasState) -> list[Front]:
    out = []
    for k, (ff, gen) in enumerate(zip(fan_fronts, generations)):
        region = region_top if k == len(fan_fronts) - 1 else ff.above
        out.append(Front(state.next_id, ff.family, ff.kind, ff.strength, gen, ff.anchor,
                         ff.slope, ff.below, ff.above, region))
        state.next_id += 1
    return out


def initialize(profile: InitialProfile, config: TrackerConfig) -> TrackerState:
    """Solve the corner and breakpoint Riemann problems and emit first-generation fronts."""
    model = config.model
    if config.kplus is None:
        config = replace(config, kplus=default_kplus(profile.states[0], 0.1, model))
    corner = solve_free_boundary(profile.states[0], config.pbar, model)
    state = TrackerState(
        x=0.0, fronts=[], boundary=[BoundarySegment(0.0, 0.0, corner.slope, corner.middle)],
        archive=[], events=[], config=config, cutoff=0, total_strength=0.0,
    )
    fans = [(split_fan(corner, config.delta, (0.0, 0.0), model), profile.states[0])]
    for k, y in enumerate(profile.breakpoints):
        try:
            fan = solve_standard(profile.states[k], profile.states[k + 1], model)
        except RiemannRangeError as exc:
            raise RiemannRangeError(f"breakpoint {k} at y={y}: {exc}") from None
        fans.append((split_fan(fan, config.delta, (0.0, float(y)), model), profile.states[k + 1]))
    for ff, top in fans:
        state.fronts += _make_fronts(state, ff.fronts, [1] * len(ff), top)
    state.total_strength = float(sum(f.size for f in state.fronts))
    state.cutoff = config.cutoff if config.cutoff is not None else generation_cutoff(
        state.total_strength, config.delta, config.c0_eps0)
    return state


# -- events -------------------------------------------------------------------

def _meet(a_anchor, a_slope, b_anchor, b_slope) -> float:
    """Abscissa where two lines meet (the first with the larger slope)."""
    ya = a_anchor[1] - a_slope * a_anchor[0]
    yb = b_anchor[1] - b_slope * b_anchor[0]
    return (yb - ya) / (a_slope - b_slope)


def next_event(state: TrackerState, x_max: float = math.inf):
    """Smallest event abscissa after ``state.x``.

    Returns ``(x, kind, participants)`` with kind ``'collision'`` (participants
    are the two front indices), ``'reflection'`` (index 0) or ``'none'``.
    Ties within 1e-12 go to the lowest participant.
    """
    best = (math.inf, "none", ())
    fronts = state.fronts
    if fronts:
        seg = state.boundary[-1]
        f0 = fronts[0]
        gap = seg.slope - f0.slope
        if gap > 0.0:
            if f0.family == 2 and gap <= PARALLEL_TOL:
                pass
            else:
                xh = max(_meet((seg.x0, seg.y0), seg.slope, f0.anchor, f0.slope), state.x)
                if xh <= x_max:
                    if f0.family != 1:
                        raise InvariantViolation(
                            f"{f0.kind} front {f0.id} (family {f0.family}) would reach the free boundary at x={xh:.6g}")
                    best = (xh, "reflection", (0,))
    n = len(fronts)
    if n >= 2:
        lines = np.array([(f.slope, f.anchor[1] - f.slope * f.anchor[0]) for f in fronts])
        slopes, icpt = lines[:, 0], lines[:, 1]
        ds = slopes[:-1] - slopes[1:]
        conv = ds > 0.0
        if conv.any():
            idx = np.nonzero(conv)[0]
            xs = (icpt[idx + 1] - icpt[idx]) / ds[idx]
            for i, xi in zip(idx, xs):
                a, b = fronts[i], fronts[i + 1]
                # contacts sharing a strip are parallel; they converge only when a
                # removed front left them with different neighbouring states
                if a.family == 2 and b.family == 2 and ds[i] <= PARALLEL_TOL:
                    continue
                xi = max(float(xi), state.x)
                if xi > x_max:
                    continue
                if xi < best[0] - TIE_TOL:
                    best = (xi, "collision", (int(i), int(i) + 1))
    return best


def _gen_for(family: int, a: Front, b: Front) -> int:
    if family == a.family and family == b.family:
        return min(a.generation, b.generation)
    if family == a.family:
        return a.generation
    if family == b.family:
        return b.generation
    return a.generation + b.generation


def handle_collision(state: TrackerState, participants, x_event: float) -> TrackerState:
    """Resolve the collision of fronts ``participants = (i, i+1)`` at ``x_event``.

    Updates ``state`` in place and returns it.
    """
    i, j = participants
    if j != i + 1:
        raise InvariantViolation("only adjacent fronts can collide")
    a, b = state.fronts[i], state.fronts[j]
    cfg = state.config
    left = state.region_below(i)
    right = b.region
    y = a.y_at(x_event)
    # nonzero only where earlier removals left the flanks out of step with the strips
    mismatch = _gap((left, a.below), (a.region, a.above), (a.region, b.below), (right, b.above))
    fan = solve_standard(left, right, cfg.model)
    ff = split_fan(fan, cfg.delta, (x_event, y), cfg.model).fronts
    gens = [_gen_for(f.family, a, b) for f in ff]
    keep = [k for k, g in enumerate(gens) if g <= state.cutoff]
    removed = float(sum(_fan_size(ff[k]) for k in range(len(ff)) if k not in keep))
    # region above the last kept front is the Riemann upper state when the
    # removed fronts are the topmost ones or when nothing was removed above it
    new = _make_fronts(state, [ff[k] for k in keep], [gens[k] for k in keep], right)
    state.fronts[i:j + 1] = new
    state.archive += [(a, x_event), (b, x_event)]
    state.removed_strength += removed
    state.events.append(Event(
        x_event, y, "collision",
        ((a.id, a.family, a.kind, a.strength, a.generation), (b.id, b.family, b.kind, b.strength, b.generation)),
        tuple(f.id for f in new), tuple(float(t) for t in fan.alphas), removed, mismatch))
    state.x = x_event
    return state


def _fan_size(ff: FanFront) -> float:
    if ff.family == 2:
        return abs(ff.strength[0]) + abs(ff.strength[1])
    return abs(ff.strength)


def handle_boundary_reflection(state: TrackerState, participants, x_event: float) -> TrackerState:
    """Reflect the lowest front (a 1-front) off the free boundary at ``x_event``."""
    (i,) = participants
    if i != 0 or not state.fronts:
        raise InvariantViolation("only the lowest front can reach the boundary")
    a = state.fronts[0]
    if a.family != 1:
        raise InvariantViolation(f"{a.kind} front of family {a.family} reached the free boundary")
    cfg = state.config
    y = state.boundary[-1].y_at(x_event)
    # the 4-wave joins the new boundary state to the actual strip above the
    # incident front, which is exactly the incident front's upper state
    mismatch = _gap((state.boundary_state, a.below), (a.region, a.above))
    fan = solve_free_boundary(a.region, cfg.pbar, cfg.model)
    ff = split_fan(fan, cfg.delta, (x_event, y), cfg.model).fronts
    new = _make_fronts(state, ff, [a.generation] * len(ff), a.region)
    state.boundary.append(BoundarySegment(x_event, y, fan.slope, fan.middle))
    state.fronts[0:1] = new
    state.archive.append((a, x_event))
    state.events.append(Event(
        x_event, y, "reflection", ((a.id, a.family, a.kind, a.strength, a.generation),),
        tuple(f.id for f in new), (float(fan.alpha4),), 0.0, mismatch))
    state.x = x_event
    return state


def advance(state: TrackerState, x_max: float = math.inf,
            history: Optional[list[GlimmRecord]] = None) -> tuple[TrackerState, list[GlimmRecord]]:
    """Process events in order until none is left before ``x_max``."""
    cfg = state.config
    if history is None:
        history = []
    if not history:
        history = glimm_record(history, state.x, state.fronts, "initial", cfg.kappa, cfg.kplus)
    count = 0
    while True:
        x_event, kind, parts = next_event(state, x_max)
        if kind == "none":
            break
        count += 1
        if count > cfg.max_events:
            raise EventCeilingError(f"more than {cfg.max_events} events before x={x_event:.6g}")
        info = None
        if kind == "collision":
            i, j = parts
            info = (state.fronts[i], state.fronts[j])
            handle_collision(state, parts, x_event)
        else:
            info = (state.fronts[0],)
            handle_boundary_reflection(state, parts, x_event)
        history = glimm_record(history, x_event, state.fronts, kind, cfg.kappa, cfg.kplus, incoming=info,
                               mismatch=state.events[-1].mismatch)
    if math.isfinite(x_max):
        state.x = max(state.x, x_max)
    return state, history


# -- slicing ------------------------------------------------------------------

@dataclass(frozen=True)
class Slice:
    x: float
    g: float
    ys: np.ndarray
    states: tuple[GasState, ...]
    fronts: tuple[Front, ...]

    def value(self, y: float) -> GasState:
        k = int(np.searchsorted(self.ys, y, side="right"))
        return self.states[k]


def boundary_segment_at(state: TrackerState, x: float) -> BoundarySegment:
    seg = state.boundary[0]
    for s in state.boundary:
        if s.x0 <= x:
            seg = s
        else:
            break
    return seg


def state_slice(state: TrackerState, x: float) -> Slice:
    """Piecewise-constant profile U(x, .) above the boundary.

    At an event abscissa the post-event configuration is returned.
    """
    if x < 0.0 or x > state.x + TIE_TOL:
        raise ValueError(f"x={x} outside the advanced range [0, {state.x}]")
    seg = boundary_segment_at(state, x)
    alive = [f for f, x_end in state.all_fronts() if f.anchor[0] <= x < x_end]
    alive.sort(key=lambda f: (f.y_at(x), f.slope))
    ys = np.array([f.y_at(x) for f in alive])
    states = (seg.state,) + tuple(f.region for f in alive)
    return Slice(x, seg.y_at(x), ys, states, tuple(alive))


def boundary_polyline(state: TrackerState, x_end: Optional[float] = None) -> np.ndarray:
    """Vertices (x, g) of the free boundary up to ``x_end`` (default: state.x)."""
    x_end = state.x if x_end is None else x_end
    pts = [(s.x0, s.y0) for s in state.boundary if s.x0 <= x_end]
    last = boundary_segment_at(state, x_end)
    if pts[-1][0] < x_end:
        pts.append((x_end, last.y_at(x_end)))
    return np.array(pts)
