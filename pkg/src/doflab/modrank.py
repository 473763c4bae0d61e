"""
Randomised rank oracle: rank over GF(p) for a few large primes.

Reduction mod p can only lose rank, so the maximum over several primes is a
lower bound on the rational rank that is exact with overwhelming
probability.  This path shares no code with ``ratmat.rank``.
"""

from __future__ import annotations

import random

from sympy import nextprime

__all__ = ["random_primes", "rank_mod_p", "oracle_rank"]


def random_primes(count: int = 3, bits: int = 61, seed: int = 0) -> list[int]:
    rng = random.Random(seed)
    primes: set[int] = set()
    while len(primes) < count:
        start = rng.randrange(1 << (bits - 1), (1 << bits) - (1 << 20))
        primes.add(int(nextprime(start)))
    return sorted(primes)


def rank_mod_p(rows, p: int) -> int | None:
    """Rank over GF(p) of a matrix given as rows of rationals (or ints).

    Returns None when some denominator vanishes mod p, in which case the
    reduction is undefined for this prime.
    """
    M = []
    for row in rows:
        r = []
        for x in row:
            den = getattr(x, "denominator", 1) % p
            if den == 0:
                return None
            r.append(getattr(x, "numerator", x) * pow(den, -1, p) % p)
        M.append(r)
    if not M:
        return 0
    ncols = len(M[0])
    rk = 0
    for c in range(ncols):
        piv = None
        for i in range(rk, len(M)):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        inv = pow(M[rk][c], -1, p)
        prow = [x * inv % p for x in M[rk]]
        M[rk] = prow
        for i in range(rk + 1, len(M)):
            f = M[i][c]
            if f:
                M[i] = [(x - f * y) % p for x, y in zip(M[i], prow)]
        rk += 1
        if rk == len(M):
            break
    return rk


def oracle_rank(rows, primes: list[int] | None = None) -> int:
    """Maximum of the GF(p) ranks over ``primes`` (three random 61-bit primes by default)."""
    if primes is None:
        primes = _DEFAULT_PRIMES
    ranks = [r for r in (rank_mod_p(rows, p) for p in primes) if r is not None]
    if not ranks:
        raise ValueError("every prime divides some denominator")
    return max(ranks)


_DEFAULT_PRIMES = random_primes(3, 61, seed=20240501)
