"""Command line: single runs, delta studies and re-verification.

Configuration is a flat ``key = value`` text file; ``#`` starts a comment and
lists are comma separated.  Explicit initial data use ``breakpoints`` (y
values) and ``states`` (``u v p rho`` groups separated by ``;``).  Without
them a seeded random perturbation of total variation ``eps`` is drawn.

Units are nondimensional throughout: velocities, pressures and densities in
the same units as the background state, lengths in units of y.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from . import verifier
from .errors import ConsistencyError, CurveRangeError, EventCeilingError, InvariantViolation, RiemannRangeError
from .gas import GasModel, GasState, sound_speed
from .glimm import QDROP_RESOLVED, flagged_records, interaction_audit, reflection_range
from .riemann import boundary_response
from .tracker import InitialProfile, TrackerConfig, TrackerState, advance, boundary_polyline, initialize, next_event, state_slice

CSV_SCHEMA = 1
EXIT_OK, EXIT_CHECKS, EXIT_ABORT = 0, 1, 2
_ABORTS = (RiemannRangeError, CurveRangeError, ConsistencyError, InvariantViolation, EventCeilingError)


@dataclass(frozen=True)
class RunConfig:
    gamma: float = 1.4
    kappa_eos: float = 1.0
    c_v: float = 1.0
    u_bar: float = 2.0
    p_bar: float = 1.0
    rho_plus: float = 1.0
    # still-gas density: recorded only, it enters no computation
    rho_minus: float = 1.0
    eps: float = 0.01
    eps_max: float = 0.2
    n_breaks: int = 8
    y_support: float = 1.0
    homentropic: bool = False
    breakpoints: tuple[float, ...] = ()
    states: tuple[tuple[float, float, float, float], ...] = ()
    deltas: tuple[float, ...] = (0.01,)
    x_max: float = 20.0
    kappa: float = 50.0
    kplus: Optional[float] = None
    kplus_factor: float = 2.0
    c0_eps0: float = 0.25
    cutoff: Optional[int] = None
    max_events: int = 200_000
    seed: int = 0
    out: str = "out"
    slices: tuple[float, ...] = ()
    slab: tuple[float, ...] = ()

    @property
    def model(self) -> GasModel:
        return GasModel(self.gamma, self.kappa_eos, self.c_v)

    @property
    def background(self) -> GasState:
        return GasState(self.u_bar, 0.0, self.p_bar, self.rho_plus)

    def validate(self) -> "RunConfig":
        bg = self.background
        c = sound_speed(bg, self.model)
        if not self.u_bar > c:
            raise ValueError(f"background not supersonic: u_bar={self.u_bar} <= c={c:.6g}")
        if not 0.0 <= self.eps <= self.eps_max:
            raise ValueError(f"eps={self.eps} outside [0, eps_max={self.eps_max}]")
        if any(d <= 0.0 for d in self.deltas) or not self.deltas:
            raise ValueError("deltas must be positive")
        if len(self.states) and len(self.states) != len(self.breakpoints) + 1:
            raise ValueError("need one more state than breakpoints")
        if self.slab and len(self.slab) != 2:
            raise ValueError("slab takes two values s, t")
        return self


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _convert(name: str, text: str):
    text = text.strip()
    if name == "states":
        groups = [g.split() for g in text.replace(",", " ").split(";") if g.strip()]
        if any(len(g) != 4 for g in groups):
            raise ValueError("each state needs four numbers u v p rho")
        return tuple(tuple(float(v) for v in g) for g in groups)
    if name in ("breakpoints", "deltas", "slices", "slab"):
        return _floats(text)
    if name in ("kplus", "cutoff"):
        if text.lower() in ("", "none", "auto"):
            return None
        return int(text) if name == "cutoff" else float(text)
    if name == "homentropic":
        return _parse_bool(text)
    if name in ("n_breaks", "max_events", "seed"):
        return int(text)
    if name == "out":
        return text
    return float(text)


def parse_config(text: str, base: Optional[RunConfig] = None) -> RunConfig:
    """Parse ``key = value`` lines on top of ``base`` (defaults if None)."""
    names = {f.name for f in dataclasses.fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, val = (t.strip() for t in line.split("=", 1))
        if key not in names:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, val)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return dataclasses.replace(base or RunConfig(), **values)


def format_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config` (round-trips every field)."""
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "states":
            text = "; ".join(" ".join(repr(float(x)) for x in s) for s in v)
        elif isinstance(v, tuple):
            text = ", ".join(repr(float(x)) for x in v)
        elif v is None:
            text = "none"
        elif isinstance(v, bool):
            text = "true" if v else "false"
        else:
            text = str(v) if isinstance(v, (int, str)) else repr(float(v))
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


# -- initial data -------------------------------------------------------------

def random_profile(cfg: RunConfig, seed: Optional[int] = None) -> InitialProfile:
    """n uniform breakpoints on (0, y_support], i.i.d. offsets scaled to BV = eps.

    With ``homentropic`` the density follows p = kappa_eos * rho^gamma, so the
    entropy vanishes in the data.  The last state is the far field.
    """
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    bg = cfg.background
    b = np.sort(rng.uniform(0.0, cfg.y_support, cfg.n_breaks))
    d = rng.uniform(-1.0, 1.0, (cfg.n_breaks + 1, 4))
    if cfg.homentropic:
        d[:, 3] = 0.0

    def build(scale):
        out = []
        for row in bg.as_array() + scale * d:
            if cfg.homentropic:
                row = row.copy()
                row[3] = (row[2] / cfg.kappa_eos) ** (1.0 / cfg.gamma)
            out.append(GasState.from_array(row))
        return InitialProfile(tuple(float(t) for t in b), tuple(out))

    if cfg.eps == 0.0:
        return InitialProfile((), (bg,))
    base_var = build(0.0).variation(bg)

    def excess(scale):
        return build(scale).variation(bg) - base_var - cfg.eps

    hi = cfg.eps
    while excess(hi) < 0.0:
        hi *= 2.0
    return build(brentq(excess, 0.0, hi, xtol=1e-15, rtol=1e-14))


def make_profile(cfg: RunConfig, seed: Optional[int] = None) -> InitialProfile:
    if cfg.states:
        return InitialProfile(tuple(cfg.breakpoints), tuple(GasState(*s) for s in cfg.states))
    return random_profile(cfg, seed)


def tracker_config(cfg: RunConfig, delta: float) -> TrackerConfig:
    kplus = cfg.kplus
    if kplus is None:
        kplus = cfg.kplus_factor * reflection_range(cfg.background, 0.1, cfg.model)[1]
    return TrackerConfig(delta=delta, pbar=cfg.p_bar, model=cfg.model, kappa=cfg.kappa, kplus=kplus,
                         c0_eps0=cfg.c0_eps0, cutoff=cfg.cutoff, max_events=cfg.max_events)


def simulate(cfg: RunConfig, delta: float, seed: Optional[int] = None):
    """(profile, state, history) advanced to ``x_max``."""
    profile = make_profile(cfg, seed)
    state = initialize(profile, tracker_config(cfg, delta))
    state, history = advance(state, cfg.x_max)
    return profile, state, history


# -- export -------------------------------------------------------------------

def _num(v) -> str:
    return repr(float(v))


def write_fronts(path: Path, state: TrackerState) -> None:
    x_stop = state.x
    rows = sorted(state.all_fronts(), key=lambda fe: fe[0].id)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "x0", "y0", "x1", "y1", "family", "kind", "generation", "strength", "strength3"])
        for f, x_end in rows:
            x1 = min(x_end, x_stop)
            if f.family == 2:
                s1, s3 = _num(f.strength[0]), _num(f.strength[1])
            else:
                s1, s3 = _num(f.strength), ""
            w.writerow([f.id, _num(f.anchor[0]), _num(f.anchor[1]), _num(x1), _num(f.y_at(x1)),
                        f.family, f.kind, f.generation, s1, s3])


def write_boundary(path: Path, state: TrackerState) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "g"])
        for x, g in boundary_polyline(state):
            w.writerow([_num(x), _num(g)])


def write_glimm(path: Path, history) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "V", "Q", "G", "event_kind", "flagged", "q_drop_ratio", "reflection_ratio", "mismatch"])
        for r in history:
            w.writerow([_num(r.x), _num(r.V), _num(r.Q), _num(r.G), r.event_kind, int(r.flagged),
                        "" if r.q_drop_ratio is None else _num(r.q_drop_ratio),
                        "" if r.reflection_ratio is None else _num(r.reflection_ratio), _num(r.mismatch)])


def write_slices(path: Path, state: TrackerState, xs: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y_lo", "y_hi", "u", "v", "p", "rho"])
        for x in xs:
            sl = state_slice(state, x)
            edges = [sl.g, *sl.ys.tolist(), math.inf]
            for k, st in enumerate(sl.states):
                w.writerow([_num(x), _num(edges[k]), _num(edges[k + 1]), _num(st.u), _num(st.v),
                            _num(st.p), _num(st.rho)])


def _clean(obj):
    """JSON-safe copy: numpy scalars to floats, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(_clean(data), sort_keys=True, indent=2) + "\n")


# -- reports ------------------------------------------------------------------

def run_report(cfg: RunConfig, profile: InitialProfile, state: TrackerState, history) -> dict:
    """Verifier suite and recorded constants of one run."""
    model = cfg.model
    bg = cfg.background
    eps = max(cfg.eps, profile.variation(bg))
    bounds = verifier.bounds_profile(state, bg)
    rh = verifier.rh_audit(state)
    s, t = cfg.slab if cfg.slab else (0.25 * state.x, 0.75 * state.x)
    wf = verifier.weak_form(state, s, t) if t > s else None
    flags = flagged_records(history)
    collisions = [r for r in history if r.q_product is not None]
    clean = [r for r in collisions if r.mismatch == 0.0 and r.q_product >= QDROP_RESOLVED]
    k2 = reflection_range(bg, 0.1, model)
    x_next, kind, _ = next_event(state, math.inf)
    report = {
        "csv_schema": CSV_SCHEMA,
        "delta": state.config.delta,
        "constants": {
            "N": state.cutoff,
            "kappa": state.config.kappa,
            "kplus": state.config.kplus,
            "K1": boundary_response(bg, cfg.p_bar, model),
            "K2_range": list(k2),
            "T0": state.total_strength,
            "eps_data": profile.variation(bg),
            "tv_constant": float(bounds.tv.max() / eps) if eps > 0 else 0.0,
            "linf_constant": float(bounds.linf.max() / eps) if eps > 0 else 0.0,
            "slope_constant": bounds.max_boundary_slope / eps if eps > 0 else 0.0,
        },
        "events": {
            "count": len(state.events),
            "collisions": sum(1 for e in state.events if e.kind == "collision"),
            "reflections": sum(1 for e in state.events if e.kind == "reflection"),
            "last_x": state.events[-1].x if state.events else 0.0,
            "pending_after_x_max": kind != "none",
            "next_x": x_next,
            "removed_strength": state.removed_strength,
            "fronts_alive": len(state.fronts),
        },
        "glimm": {
            "G0": history[0].G,
            "G_end": history[-1].G,
            "flagged": len(flags),
            "flagged_with_mismatch": sum(1 for r in flags if r.mismatch > 0.0),
            "max_increase": max((r.G - history[history.index(r) - 1].G for r in flags), default=0.0),
            "q_drop_failures": sum(1 for r in collisions if not r.q_drop_ok),
            "min_q_drop_ratio_clean": min((r.q_drop_ratio for r in clean), default=None),
            "max_reflection_ratio": max((r.reflection_ratio for r in history if r.reflection_ratio is not None),
                                        default=None),
            "interaction_audit": interaction_audit(state.events),
        },
        "rh": {
            "max_shock": rh.max_shock,
            "max_contact": rh.max_contact,
            "max_rarefaction": rh.max_rarefaction,
            "max_boundary": rh.max_boundary,
        },
        "bounds": {
            "max_tv": float(bounds.tv.max()),
            "max_linf": float(bounds.linf.max()),
            "max_boundary_slope": bounds.max_boundary_slope,
        },
    }
    if wf is not None:
        report["weak_form"] = {
            "slab": [s, t],
            "test_set": wf.test_set,
            "pieces": wf.pieces,
            "max_residual": wf.max_residual,
            "max_entropy": wf.max_entropy,
            "max_F": float(np.abs(wf.F).max()),
            "max_G": float(np.abs(wf.G).max()),
            "max_I": float(np.abs(wf.I).max()),
            "max_J": float(np.abs(wf.J).max()),
        }
    if kind == "none":
        a = verifier.asymptotic_check(state, cfg.p_bar, profile.tail)
        report["asymptotic"] = {
            "x_last_event": a.x_last_event,
            "boundary_slope_tail": a.boundary_slope_tail,
            "k_inf": a.predicted[1],
            "u_inf": list(a.predicted[0].as_array()),
            "slope_error": a.slope_error,
            "far_wave_predicted": a.far_wave_predicted,
            "far_wave_observed": a.far_wave_observed,
            "far_wave_net": a.far_wave_net,
            "far_wave_composition": a.far_wave_composition,
            "one_fronts_left": a.one_fronts_left,
        }
    return report


def run(cfg: RunConfig, out: Path, delta: Optional[float] = None) -> int:
    """Single run with artifacts in ``out``; returns the exit status."""
    cfg.validate()
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(format_config(cfg))
    delta = cfg.deltas[0] if delta is None else delta
    profile = make_profile(cfg)
    state = initialize(profile, tracker_config(cfg, delta))
    try:
        state, history = advance(state, cfg.x_max)
    except _ABORTS as exc:
        write_boundary(out / "boundary.csv", state)
        write_fronts(out / "fronts.csv", state)
        write_json(out / "reports.json", {"csv_schema": CSV_SCHEMA, "aborted": f"{type(exc).__name__}: {exc}"})
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    write_fronts(out / "fronts.csv", state)
    write_boundary(out / "boundary.csv", state)
    write_glimm(out / "glimm.csv", history)
    write_slices(out / "slices.csv", state, cfg.slices or (0.0, state.x))
    report = run_report(cfg, profile, state, history)
    write_json(out / "reports.json", report)
    g = report["glimm"]
    print(f"delta={delta} events={report['events']['count']} N={report['constants']['N']} "
          f"flagged={g['flagged']} q_drop_failures={g['q_drop_failures']}")
    return EXIT_CHECKS if g["flagged"] or g["q_drop_failures"] else EXIT_OK


def fit_slope(deltas: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(value) against log(delta)."""
    x = np.log(np.asarray(deltas, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def convergence_study(cfg: RunConfig, deltas: Optional[Sequence[float]] = None) -> dict:
    """Runs over ``deltas`` (coarse to fine) on the same data and compares them."""
    deltas = sorted(cfg.deltas if deltas is None else deltas, reverse=True)
    if len(deltas) < 3:
        raise ValueError("a study needs at least three deltas")
    profile = make_profile(cfg)
    states = []
    for d in deltas:
        st = initialize(profile, tracker_config(cfg, d))
        st, _ = advance(st, cfg.x_max)
        states.append(st)
    s, t = cfg.slab if cfg.slab else (0.25 * cfg.x_max, 0.75 * cfg.x_max)
    rows = []
    for k, (d, st) in enumerate(zip(deltas, states)):
        wf = verifier.weak_form(st, s, t)
        row = {"delta": d, "events": len(st.events), "N": st.cutoff, "removed_strength": st.removed_strength,
               "max_residual": wf.max_residual, "max_entropy": wf.max_entropy}
        if k + 1 < len(states):
            row["l1_to_next"] = verifier.l1_distance(st, states[k + 1], cfg.x_max)
            row["g_sup_to_next"] = verifier.boundary_sup_distance(st, states[k + 1], cfg.x_max)
        rows.append(row)
    res = [r["max_residual"] for r in rows]
    table = {"slab": [s, t], "rows": rows,
             "residual_slope": fit_slope(deltas, res) if min(res) > 0.0 else None}
    gs = [r["g_sup_to_next"] for r in rows[:-1]]
    table["g_sup_decreasing"] = all(b < a for a, b in zip(gs, gs[1:]))
    return table


def write_study(path: Path, table: dict) -> None:
    cols = ["delta", "events", "N", "removed_strength", "max_residual", "max_entropy", "l1_to_next", "g_sup_to_next"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in table["rows"]:
            w.writerow([("" if c not in r else (r[c] if isinstance(r[c], int) else _num(r[c]))) for c in cols])


def verify(out: Path) -> int:
    """Re-run the saved configuration and compare every artifact byte for byte."""
    cfg = parse_config((out / "config.txt").read_text())
    scratch = out / "verify"
    status = run(cfg, scratch)
    names = ("fronts.csv", "boundary.csv", "glimm.csv", "slices.csv", "reports.json")
    diffs = [n for n in names if (out / n).exists() and (out / n).read_bytes() != (scratch / n).read_bytes()]
    write_json(out / "verify.json", {"identical": not diffs, "differing": diffs, "status": status})
    if diffs:
        print("artifacts differ: " + ", ".join(diffs), file=sys.stderr)
        return EXIT_CHECKS
    print("artifacts reproduced")
    return status


def _load(args) -> RunConfig:
    cfg = parse_config(Path(args.config).read_text()) if args.config else RunConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.delta is not None:
        changes["deltas"] = _floats(args.delta)
    if args.xmax is not None:
        changes["x_max"] = args.xmax
    if args.out is not None:
        changes["out"] = args.out
    return dataclasses.replace(cfg, **changes).validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="steadyfront", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "study", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--delta", help="delta or comma-separated list")
        p.add_argument("--xmax", type=float)
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return verify(Path(args.out or (parse_config(Path(args.config).read_text()).out
                                            if args.config else RunConfig().out)))
        cfg = _load(args)
        out = Path(cfg.out)
        if args.command == "run":
            return run(cfg, out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(format_config(cfg))
        table = convergence_study(cfg)
        write_study(out / "study.csv", table)
        write_json(out / "study.json", table)
        print(f"residual slope {table['residual_slope']}, g sup decreasing: {table['g_sup_decreasing']}")
        return EXIT_OK
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except _ABORTS as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
