"""Random-scheme search for the largest rank ratio, broken down by block length.

    python3 scripts/ratio_search.py --trials 5000 --seed 1 [--out log.json]
"""

from __future__ import annotations

import argparse
from collections import defaultdict

from doflab.harness import ExperimentConfig, ratio_greater, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()

    cfg = ExperimentConfig(scheme="random", trials=args.trials, base_seed=args.seed,
                           checks=("causality", "lemma1"), output=args.out)
    log = run_experiment(cfg)
    best: dict[int, list[int]] = defaultdict(lambda: [0, 1])
    for t in log.trials:
        for name in ("lemma1.pair12", "lemma1.pair21"):
            c = t["checks"][name]
            if c["rhs"] and ratio_greater([c["lhs"], c["rhs"]], best[t["info"]["n"]]):
                best[t["info"]["n"]] = [c["lhs"], c["rhs"]]
    print(f"trials {args.trials}, findings {log.aggregates['findings']}")
    print("n  max rank pair")
    for n in sorted(best):
        print(f"{n}  {best[n][0]}/{best[n][1]}")
    mr = log.aggregates["max_ratio"]
    print(f"overall {mr['pair'][0]}/{mr['pair'][1]} at trial {mr['trial']} ({mr['scheme']})")


if __name__ == "__main__":
    main()
