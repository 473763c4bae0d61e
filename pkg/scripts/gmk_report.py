"""Print the 6/5 scheme's precoders and every check on one realization.

    python3 scripts/gmk_report.py --seed 7
"""

from __future__ import annotations

import argparse

from doflab.channel import X_CHANNEL, sample_realization
from doflab.scheme import gmk_scheme
from doflab.verify import compute_R, compute_T, verify_scheme


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    s = gmk_scheme()
    r = sample_realization(args.seed, X_CHANNEL, s.n)
    trace, rep = verify_scheme(s, r, args.seed)
    for key, V in sorted(trace.V.items()):
        print(f"V{key[0]}{key[1]}:")
        for row in V.data:
            print("   ", "  ".join(str(x) for x in row))
    print(f"T = {compute_T(trace, r)}, r1 = {compute_R(trace, r, 1)}, r2 = {compute_R(trace, r, 2)}")
    for name, c in rep.checks.items():
        print(f"{name:<16} {c.status:<8} {c.lhs} vs {c.rhs}")


if __name__ == "__main__":
    main()
