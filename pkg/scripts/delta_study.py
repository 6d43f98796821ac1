"""Delta refinement study: weak-form residual rate and free-boundary convergence per seed.

    python3 scripts/delta_study.py --seeds 8
"""
import argparse
import dataclasses

from steadyfront import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=8)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--xmax", type=float, default=4.0)
    args = ap.parse_args()
    base = cli.RunConfig(eps=args.eps, n_breaks=2, homentropic=True, x_max=args.xmax,
                         deltas=(0.04, 0.02, 0.01), slab=(0.25 * args.xmax, 0.75 * args.xmax))
    print("seed,res_0.04,res_0.02,res_0.01,slope,max_entropy,gsup_04_02,gsup_02_01,g_converges")
    for seed in range(args.seeds):
        t = cli.convergence_study(dataclasses.replace(base, seed=seed))
        rows = t["rows"]
        res = ",".join(f"{r['max_residual']:.4e}" for r in rows)
        ent = max(r["max_entropy"] for r in rows)
        g1, g2 = rows[0]["g_sup_to_next"], rows[1]["g_sup_to_next"]
        print(f"{seed},{res},{t['residual_slope']:.3f},{ent:.1e},{g1:.3e},{g2:.3e},{g2 < g1}", flush=True)


if __name__ == "__main__":
    main()
