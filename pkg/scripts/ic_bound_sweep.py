"""Largest decodable symmetric m found per block length on the three-user IC,
next to the 3n/7 ceiling.

    python3 scripts/ic_bound_sweep.py --trials 400 --nmax 9
"""

from __future__ import annotations

import argparse

from doflab.harness import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=300, help="trials per (n, m)")
    ap.add_argument("--nmax", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("n  best m  floor(3n/7)  decodable/trials at best m")
    for n in range(2, args.nmax + 1):
        best, hits = 0, 0
        for m in range(1, n // 2 + 1):
            cfg = ExperimentConfig(scheme="ic-random", trials=args.trials, base_seed=args.seed + 1000 * n + m,
                                   n=n, m=m, checks=("ic3",))
            log = run_experiment(cfg)
            if log.aggregates["findings"]:
                print(f"  finding at n={n}, m={m}: {log.aggregates['failures']}")
            dec = sum(t["info"]["decodable"] for t in log.trials)
            if dec:
                best, hits = m, dec
        print(f"{n}  {best}       {3 * n // 7}            {hits}/{args.trials}")


if __name__ == "__main__":
    main()
