"""Freeze symbolic reference values for the built-in schemes.

Channel coefficients are sympy indeterminates, so every rank below is the
generic rank (the value that holds for almost every realization).  Precoders
are written out by hand here rather than taken from ``doflab.scheme``; the
output file is compared against the exact-rational pipeline in the tests.

    python3 scripts/freeze_oracles.py  # writes tests/data/symbolic_oracle.json
"""

from __future__ import annotations

import json
from pathlib import Path

import sympy as sp

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "symbolic_oracle.json"


def g(k, j, t):
    return sp.Symbol(f"g{k}{j}_{t}")


def block(k, j, V):
    return sp.diag(*[g(k, j, t + 1) for t in range(V.rows)]) * V if V.cols else sp.zeros(V.rows, 0)


def rank(*blocks):
    blocks = [b for b in blocks if b.cols]
    if not blocks:
        return 0
    return sp.Matrix.hstack(*blocks).rank(simplify=True)


def gmk():
    m1 = [g(2, 2, 2) * g(2, 1, 1), -g(2, 2, 1) * g(2, 1, 2)]
    m2 = [g(1, 2, 3) * g(1, 1, 4), -g(1, 1, 3) * g(1, 2, 4)]
    V = {
        (1, 1): sp.Matrix([[1, 0], [0, 1], [0, 0], [0, 0], m1]),
        (1, 2): sp.Matrix([[1], [1], [0], [0], [0]]),
        (2, 1): sp.Matrix([[0], [0], [1], [1], [0]]),
        (2, 2): sp.Matrix([[0, 0], [0, 0], [1, 0], [0, 1], m2]),
    }
    return 5, V


def ratio_witness():
    m1 = [g(2, 2, 2) * g(2, 1, 1), -g(2, 2, 1) * g(2, 1, 2)]
    V = {
        (1, 1): sp.Matrix([[1, 0], [0, 1], m1]),
        (1, 2): sp.Matrix([[1], [1], [0]]),
        (2, 1): sp.zeros(3, 0),
        (2, 2): sp.zeros(3, 0),
    }
    return 3, V


def tdma4():
    V = {key: sp.Matrix([[1 if t == i else 0] for t in range(4)])
         for i, key in enumerate([(1, 1), (1, 2), (2, 1), (2, 2)])}
    return 4, V


def icsit_repeat():
    V = {
        (1, 1): sp.Matrix([[1], [g(2, 1, 1) / g(2, 1, 2)]]),
        (1, 2): sp.Matrix([[1], [g(2, 2, 1) / g(2, 2, 2)]]),
        (2, 1): sp.zeros(2, 0),
        (2, 2): sp.zeros(2, 0),
    }
    return 2, V


def pair_quantities(n, V, key1, key2, num_rx, den_rx):
    V1, V2 = V[key1], V[key2]
    num = rank(block(num_rx, 1, V1), block(num_rx, 2, V2))
    den = rank(block(den_rx, 1, V1), block(den_rx, 2, V2))
    own1, own2 = block(den_rx, 1, V1), block(den_rx, 2, V2)
    r1 = den - rank(own2)
    r2 = den - rank(own1)
    T = []
    for t in range(1, n + 1):
        prev = sp.Matrix.hstack(own1, own2)[: t - 1, :]
        z1, z2 = sp.zeros(1, V1.cols), sp.zeros(1, V2.cols)
        a = sp.Matrix.hstack(V1[t - 1, :], z2)
        b = sp.Matrix.hstack(z1, V2[t - 1, :])
        base = prev.rank(simplify=True) if prev.rows else 0
        in_a = sp.Matrix.vstack(prev, a).rank(simplify=True) == base
        in_b = sp.Matrix.vstack(prev, b).rank(simplify=True) == base
        if in_a and in_b:
            T.append(t)
    return {"ratio": [num, den], "r1": r1, "r2": r2, "T": T}


def x_summary(n, V):
    out = {}
    for k in (1, 2):
        blocks = {key: block(k, key[1], V[key]) for key in V}
        total = rank(*blocks.values())
        out[f"rx{k}"] = {"total": total}
        for key in V:
            interf = [b for kk, b in blocks.items() if kk != key]
            out[f"rx{k}"][f"{key[0]}{key[1]}"] = {"desired": rank(blocks[key]), "interference": rank(*interf)}
    out["pair12"] = pair_quantities(n, V, (1, 1), (1, 2), 1, 2)
    out["pair21"] = pair_quantities(n, V, (2, 1), (2, 2), 2, 1)
    return out


def main():
    data = {name: x_summary(*fn()) for name, fn in
            [("gmk", gmk), ("ratio-witness", ratio_witness), ("tdma4", tdma4), ("icsit-repeat", icsit_repeat)]}
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(json.dumps({k: v["pair12"] for k, v in data.items()}, sort_keys=True))


if __name__ == "__main__":
    main()
