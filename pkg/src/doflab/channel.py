"""
Channel realizations and the delayed-CSIT information pattern.

A realization holds every coefficient g_kj(t) of one experiment (receiver k,
transmitter j, timeslot t; all 1-based).  Coefficients are exact rationals
p / 2**31 with p uniform on [-2**31, 2**31] minus zero, which stands in for
a continuous fading law: the algebraic coincidences that "almost surely"
never happen stay improbable, and exact arithmetic means any that do happen
are detected rather than hidden by a tolerance.

Transmit-side code sees the channel only through a ``CsitView``, which
refuses queries about the current or future timeslots.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from .ratmat import Q
from typing import Iterable, Mapping

from .ratmat import RationalMatrix

__all__ = [
    "CausalityViolation",
    "LinkSet",
    "X_CHANNEL",
    "IC3",
    "ChannelRealization",
    "CsitView",
    "sample_realization",
    "mutate_suffix",
    "csit_at",
    "diag_block",
    "fnv1a64",
    "GRID_DENOMINATOR",
]

GRID_DENOMINATOR = 1 << 31


class CausalityViolation(RuntimeError):
    """A precoder asked for channel state it cannot know under delayed CSIT."""


@dataclass(frozen=True)
class LinkSet:
    num_tx: int
    num_rx: int

    def __post_init__(self):
        if self.num_tx not in (2, 3) or self.num_rx not in (2, 3):
            raise ValueError(f"unsupported link set {self.num_tx}x{self.num_rx}")

    def pairs(self) -> list[tuple[int, int]]:
        return [(k, j) for k in range(1, self.num_rx + 1) for j in range(1, self.num_tx + 1)]


X_CHANNEL = LinkSet(2, 2)
IC3 = LinkSet(3, 3)


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def _fmt(x: Q) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ChannelRealization:
    links: LinkSet
    n: int
    coeffs: Mapping[tuple[int, int, int], Q]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("block length must be positive")
        for k, j in self.links.pairs():
            for t in range(1, self.n + 1):
                v = self.coeffs.get((k, j, t))
                if v is None:
                    raise ValueError(f"missing coefficient g_{k}{j}({t})")
                if v == 0:
                    raise ValueError(f"zero coefficient g_{k}{j}({t})")
        if len(self.coeffs) != len(self.links.pairs()) * self.n:
            raise ValueError("coefficients outside the link set / block length")

    def g(self, k: int, j: int, t: int) -> Q:
        try:
            return self.coeffs[(k, j, t)]
        except KeyError:
            raise IndexError(f"no coefficient g_{k}{j}({t}) in a {self.links} realization "
                             f"of length {self.n}") from None

    def gains(self, k: int, j: int, times: Iterable[int] | None = None) -> list[Q]:
        ts = range(1, self.n + 1) if times is None else sorted(set(times))
        return [self.g(k, j, t) for t in ts]

    def to_dict(self) -> dict:
        return {
            "links": [self.links.num_tx, self.links.num_rx],
            "n": self.n,
            "coeffs": [
                {"k": k, "j": j, "t": t, "v": _fmt(self.coeffs[(k, j, t)])}
                for t in range(1, self.n + 1)
                for k, j in self.links.pairs()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelRealization":
        num_tx, num_rx = d["links"]
        coeffs = {(c["k"], c["j"], c["t"]): Q(c["v"]) for c in d["coeffs"]}
        return cls(LinkSet(num_tx, num_rx), d["n"], coeffs)

    @classmethod
    def from_json(cls, s: str) -> "ChannelRealization":
        return cls.from_dict(json.loads(s))

    def fingerprint(self) -> int:
        """64-bit FNV-1a of the canonical "p/q" serialization."""
        return fnv1a64(self.to_json().encode("ascii"))

    def replace(self, updates: Mapping[tuple[int, int, int], Q]) -> "ChannelRealization":
        coeffs = dict(self.coeffs)
        for key, v in updates.items():
            if key not in coeffs:
                raise IndexError(f"no coefficient {key}")
            coeffs[key] = Q(v)
        return ChannelRealization(self.links, self.n, coeffs)


def _draw(rng: random.Random) -> Q:
    while True:
        p = rng.randint(-GRID_DENOMINATOR, GRID_DENOMINATOR)
        if p:
            return Q(p, GRID_DENOMINATOR)


def sample_realization(seed: int, links: LinkSet, n: int) -> ChannelRealization:
    """Deterministic i.i.d. draw of all coefficients for slots 1..n."""
    if n < 1:
        raise ValueError("block length must be positive")
    rng = random.Random(seed)
    coeffs = {}
    for t in range(1, n + 1):
        for k, j in links.pairs():
            coeffs[(k, j, t)] = _draw(rng)
    return ChannelRealization(links, n, coeffs)


def mutate_suffix(r: ChannelRealization, t: int, seed: int) -> ChannelRealization:
    """Copy of ``r`` that agrees on slots < t and is freshly drawn on slots >= t."""
    rng = random.Random(seed)
    coeffs = dict(r.coeffs)
    for s in range(t, r.n + 1):
        for k, j in r.links.pairs():
            v = _draw(rng)
            while v == r.coeffs[(k, j, s)]:
                v = _draw(rng)
            coeffs[(k, j, s)] = v
    return ChannelRealization(r.links, r.n, coeffs)


class CsitView:
    """Read-only channel access limited to timeslots strictly before ``t``."""

    __slots__ = ("_r", "t")

    def __init__(self, r: ChannelRealization, t: int):
        if not 1 <= t <= r.n:
            raise IndexError(f"timeslot {t} outside 1..{r.n}")
        self._r = r
        self.t = t

    @property
    def n(self) -> int:
        return self._r.n

    @property
    def links(self) -> LinkSet:
        return self._r.links

    def _allowed(self, s: int) -> bool:
        return s < self.t

    def g(self, k: int, j: int, s: int) -> Q:
        if not self._allowed(s):
            raise CausalityViolation(f"g_{k}{j}({s}) requested at timeslot {self.t}")
        return self._r.g(k, j, s)


class _FullCsitView(CsitView):
    # Only built by the quarantined full-CSIT runner in ``scheme``.
    __slots__ = ()

    def _allowed(self, s: int) -> bool:
        return True


def csit_at(r: ChannelRealization, t: int) -> CsitView:
    return CsitView(r, t)


def diag_block(r: ChannelRealization, k: int, j: int, times: Iterable[int] | None = None) -> RationalMatrix:
    """Diagonal matrix of g_kj(t) over ``times`` (all slots by default), ascending."""
    ts = list(range(1, r.n + 1)) if times is None else sorted(set(times))
    for t in ts:
        if not 1 <= t <= r.n:
            raise IndexError(f"timeslot {t} outside 1..{r.n}")
    return RationalMatrix.diagonal(r.gains(k, j, ts))
