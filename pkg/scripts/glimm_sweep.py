"""Flagged Glimm records over seeded runs for a grid of (kappa, k+ factor).

    python3 scripts/glimm_sweep.py --seeds 20 --xmax 20
"""
import argparse
import dataclasses
import itertools

from steadyfront import cli
from steadyfront.glimm import flagged_records, reflection_range


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--xmax", type=float, default=20.0)
    ap.add_argument("--kappas", default="25,50,100")
    ap.add_argument("--factors", default="1.5,2,2.5")
    args = ap.parse_args()
    base = cli.RunConfig(eps=0.01, x_max=args.xmax)
    kmax = reflection_range(base.background, 0.1, base.model)[1]
    print(f"max reflection factor over the 0.1-ball: {kmax:.4f}")
    print("kappa,factor,kplus,flagged,flagged_at_gaps,q_drop_failures")
    for kappa, factor in itertools.product(cli._floats(args.kappas), cli._floats(args.factors)):
        cfg = dataclasses.replace(base, kappa=kappa, kplus=factor * kmax)
        flagged = at_gaps = qfail = 0
        for seed in range(args.seeds):
            _, _, hist = cli.simulate(cfg, 0.01, seed)
            flags = flagged_records(hist)
            flagged += len(flags)
            at_gaps += sum(r.mismatch > 0 for r in flags)
            qfail += sum(r.q_drop_ok is False for r in hist)
        print(f"{kappa:g},{factor:g},{factor * kmax:.4f},{flagged},{at_gaps},{qfail}", flush=True)


if __name__ == "__main__":
    main()
