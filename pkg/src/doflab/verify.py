"""
Exact checkers for the X-channel rank statements.

Every check records integer ``lhs`` / ``rhs`` values and whether the
relation holds.  Statements that hold only almost surely are checked as
exact relations on the sampled realization; a violation is reported, never
filtered.

Status values:

``pass`` / ``fail``
    the relation was checked with its hypotheses satisfied.
``hypothesis-violated``
    the scheme failed the causality audit, so the statement does not apply;
    the values are still computed.
``vacuous``
    a precondition (decodability) is not met; values computed for reference.
``expected-fail``
    a whitelisted negative control failed as intended.
``undecodable``
    a decodability check failed for a scheme that does not claim to be
    decodable (random generators); informative, not a finding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from .ratmat import Q
from typing import Iterable, Sequence

from .channel import ChannelRealization, X_CHANNEL
from .ratmat import (
    DimensionError,
    RationalMatrix,
    RowBasis,
    hconcat,
    left_nullspace_basis,
    proj_dim,
    rank,
    row_submatrix,
)
from .scheme import LinearScheme, PrecoderTrace, causality_audit, run_scheme, unsafe_full_csit_run

__all__ = [
    "Check",
    "VerificationReport",
    "Pair",
    "PAIR12",
    "PAIR21",
    "InternalConsistencyError",
    "received",
    "pair_block",
    "decodability_check",
    "is_decodable",
    "relabel_unclaimed",
    "rank_ratio_check",
    "compute_T",
    "compute_R",
    "lemma5_check",
    "converse_audit",
    "degenerate_event_scan",
    "lemma6_check",
    "lemma6_adversary",
    "verify_scheme",
    "X_CHECK_GROUPS",
]

Key = tuple[int, int]


class InternalConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagree."""


@dataclass(frozen=True)
class Check:
    holds: bool
    lhs: int
    rhs: int
    status: str
    witness: str | None = None

    def to_dict(self) -> dict:
        d = {"holds": self.holds, "lhs": self.lhs, "rhs": self.rhs, "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["holds"], d["lhs"], d["rhs"], d["status"], d.get("witness"))


def _check(holds: bool, lhs: int, rhs: int, gate: str | None = None, witness: str | None = None) -> Check:
    status = gate if gate else ("pass" if holds else "fail")
    return Check(bool(holds), int(lhs), int(rhs), status, witness)


@dataclass
class VerificationReport:
    checks: dict[str, Check] = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def add(self, name: str, check: Check) -> None:
        if name in self.checks:
            raise KeyError(f"check {name!r} recorded twice")
        self.checks[name] = check

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        for name, c in other.checks.items():
            self.add(name, c)
        self.info.update(other.info)
        return self

    def __getitem__(self, name: str) -> Check:
        return self.checks[name]

    def __contains__(self, name: str) -> bool:
        return name in self.checks

    @property
    def findings(self) -> list[str]:
        return [name for name, c in self.checks.items() if c.status == "fail"]

    def all_hold(self, names: Iterable[str] | None = None) -> bool:
        names = self.checks if names is None else names
        return all(self.checks[n].holds for n in names)

    def to_dict(self) -> dict:
        return {"checks": {name: c.to_dict() for name, c in self.checks.items()}, "info": self.info}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls({name: Check.from_dict(c) for name, c in d["checks"].items()}, dict(d.get("info", {})))


# ---------------------------------------------------------------------------
# received signal blocks
# ---------------------------------------------------------------------------

def received(r: ChannelRealization, k: int, j: int, V: RationalMatrix,
             times: Sequence[int] | None = None) -> RationalMatrix:
    """G_kj V, optionally restricted to the 1-based timeslots ``times``."""
    if V.nrows != r.n:
        raise DimensionError(f"precoder has {V.nrows} rows, realization has {r.n} slots")
    if times is None:
        return V.scale_rows(r.gains(k, j))
    ts = sorted(set(times))
    return row_submatrix(V, [t - 1 for t in ts]).scale_rows(r.gains(k, j, ts))


@dataclass(frozen=True)
class Pair:
    """Precoders (V1, V2) of transmitters tx1, tx2, compared at two receivers.

    ``num_rx`` is the receiver whose rank is bounded above, ``den_rx`` the one
    whose past observations define the set T and the quantities r_j.
    """

    key1: Key
    key2: Key
    tx1: int
    tx2: int
    num_rx: int
    den_rx: int
    label: str = ""


PAIR12 = Pair((1, 1), (1, 2), 1, 2, num_rx=1, den_rx=2, label="pair12")
PAIR21 = Pair((2, 1), (2, 2), 1, 2, num_rx=2, den_rx=1, label="pair21")


def pair_block(trace: PrecoderTrace, r: ChannelRealization, pair: Pair, rx: int,
               times: Sequence[int] | None = None) -> RationalMatrix:
    return hconcat([received(r, rx, pair.tx1, trace.V[pair.key1], times),
                    received(r, rx, pair.tx2, trace.V[pair.key2], times)])


def _pair_row(trace, r, pair, rx, t) -> tuple[Q, ...]:
    a = r.g(rx, pair.tx1, t)
    b = r.g(rx, pair.tx2, t)
    return tuple(a * x for x in trace.V[pair.key1].row(t - 1)) + tuple(b * x for x in trace.V[pair.key2].row(t - 1))


def _prefix_growth(trace, r, pair, rx) -> list[int]:
    """Per-slot rank increments (0 or 1) of the pair block at ``rx``."""
    width = trace.V[pair.key1].ncols + trace.V[pair.key2].ncols
    basis = RowBasis(width)
    return [int(basis.add(_pair_row(trace, r, pair, rx, t))) for t in range(1, trace.n + 1)]


# ---------------------------------------------------------------------------
# decodability
# ---------------------------------------------------------------------------

_CONDI = {(1, 1): "condi1", (1, 2): "condi2", (2, 1): "condi3", (2, 2): "condi4"}


def _rx_blocks(trace: PrecoderTrace, r: ChannelRealization, k: int) -> dict[Key, RationalMatrix]:
    # signal of message (kk, j) as seen at receiver k
    return {key: received(r, k, key[1], trace.V[key]) for key in _CONDI}


def decodability_check(trace: PrecoderTrace, r: ChannelRealization) -> VerificationReport:
    """Rank-equality and projection forms of decodability for all four messages."""
    if trace.links != X_CHANNEL or r.links != X_CHANNEL:
        raise DimensionError("decodability_check needs an X-channel trace and realization")
    if trace.n != r.n:
        raise DimensionError(f"trace length {trace.n} != realization length {r.n}")
    rep = VerificationReport()
    for k in (1, 2):
        blocks = _rx_blocks(trace, r, k)
        total = rank(hconcat(list(blocks.values())))
        for j in (1, 2):
            key = (k, j)
            desired = blocks[key]
            interf = hconcat([b for kk, b in blocks.items() if kk != key])
            m = trace.sizes[key]
            r_des = rank(desired)
            r_int = rank(interf)
            r_V = rank(trace.V[key])
            full = r_V == m
            rep.add(_CONDI[key], _check(r_int + r_des == total and full, r_int + r_des, total,
                                        witness=f"rank V={r_V}, m={m}"))
            pd = proj_dim(desired, interf)
            rep.add(f"eq4.{k}.{j}", _check(pd == m and full, pd, m, witness=f"rank V={r_V}"))
        rep.info[f"rx{k}.total_rank"] = total
    return rep


def relabel_unclaimed(rep: VerificationReport) -> VerificationReport:
    """Mark failed decodability checks as ``undecodable`` (in place)."""
    for name, c in rep.checks.items():
        if c.status == "fail":
            rep.checks[name] = Check(c.holds, c.lhs, c.rhs, "undecodable", c.witness)
    return rep


def is_decodable(rep: VerificationReport) -> bool:
    names = list(_CONDI.values()) + [f"eq4.{k}.{j}" for k, j in _CONDI]
    return all(rep[n].holds for n in names)


# ---------------------------------------------------------------------------
# rank ratio inequality
# ---------------------------------------------------------------------------

def ratio_pair(trace: PrecoderTrace, r: ChannelRealization, pair: Pair = PAIR12) -> tuple[int, int]:
    """(rank at num_rx, rank at den_rx) of the pair block."""
    return (rank(pair_block(trace, r, pair, pair.num_rx)), rank(pair_block(trace, r, pair, pair.den_rx)))


def rank_ratio_check(trace: PrecoderTrace, r: ChannelRealization, causal: bool = True,
                     pairs: Sequence[Pair] = (PAIR12, PAIR21), prefix: str = "lemma1") -> VerificationReport:
    """2 * rank[num] <= 3 * rank[den] for each pair, in integers."""
    gate = None if causal else "hypothesis-violated"
    rep = VerificationReport()
    for pair in pairs:
        lhs, rhs = ratio_pair(trace, r, pair)
        rep.add(f"{prefix}.{pair.label}", _check(2 * lhs <= 3 * rhs, lhs, rhs, gate,
                                                  witness=f"2*{lhs} <= 3*{rhs}"))
    return rep


# ---------------------------------------------------------------------------
# the set T, r_j and the Lemma-5 bullets
# ---------------------------------------------------------------------------

def compute_T(trace: PrecoderTrace, r: ChannelRealization, pair: Pair = PAIR12) -> list[int]:
    """Slots t where [v1(t) 0] and [0 v2(t)] both lie in the row span of the
    den-receiver's observations of slots 1..t-1."""
    m1 = trace.V[pair.key1].ncols
    m2 = trace.V[pair.key2].ncols
    basis = RowBasis(m1 + m2)
    zeros1 = (Q(0),) * m1
    zeros2 = (Q(0),) * m2
    out = []
    for t in range(1, trace.n + 1):
        v1 = trace.V[pair.key1].row(t - 1)
        v2 = trace.V[pair.key2].row(t - 1)
        if basis.contains(v1 + zeros2) and basis.contains(zeros1 + v2):
            out.append(t)
        basis.add(_pair_row(trace, r, pair, pair.den_rx, t))
    return out


def compute_R(trace: PrecoderTrace, r: ChannelRealization, j: int, pair: Pair = PAIR12) -> int:
    """Dimension of the equations in transmitter j's symbols alone that the
    den-receiver can extract from its full observation.

    Computed through an explicit left-nullspace and through the closed form
    rank[both] - rank[other]; raises ``InternalConsistencyError`` on mismatch.
    """
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    rx = pair.den_rx
    own_key, own_tx, other_key, other_tx = (
        (pair.key1, pair.tx1, pair.key2, pair.tx2) if j == 1 else (pair.key2, pair.tx2, pair.key1, pair.tx1))
    own = received(r, rx, own_tx, trace.V[own_key])
    other = received(r, rx, other_tx, trace.V[other_key])
    L = left_nullspace_basis(other)
    direct = rank(L @ own)
    closed = rank(hconcat([own, other])) - rank(other)
    if direct != closed:
        raise InternalConsistencyError(f"r_{j}: left-nullspace route {direct} != closed form {closed}")
    return direct


def lemma5_check(trace: PrecoderTrace, r: ChannelRealization, causal: bool = True,
                 pair: Pair = PAIR12, prefix: str = "lemma5") -> VerificationReport:
    """The three bullets, the step-decomposition identity, its bound over T,
    and the per-slot Claim-1 monotonicity."""
    gate = None if causal else "hypothesis-violated"
    rep = VerificationReport()
    T = compute_T(trace, r, pair)
    r1 = compute_R(trace, r, 1, pair)
    r2 = compute_R(trace, r, 2, pair)
    rank_num, rank_den = ratio_pair(trace, r, pair)
    V1, V2 = trace.V[pair.key1], trace.V[pair.key2]
    Tidx = [t - 1 for t in T]

    # bullet 1
    rank_T = rank(pair_block(trace, r, pair, pair.num_rx, T)) if T else 0
    rep.add(f"{prefix}.b1", _check(rank_num - rank_den <= rank_T, rank_num - rank_den, rank_T, gate,
                                   witness=f"T={T}"))

    # bullet 2
    rv1T = rank(row_submatrix(V1, Tidx))
    rv2T = rank(row_submatrix(V2, Tidx))
    rep.add(f"{prefix}.b2", _check(rv1T <= r1 and rv2T <= r2, rv1T + rv2T, r1 + r2, gate,
                                   witness=f"j=1: {rv1T}<={r1}; j=2: {rv2T}<={r2}"))

    # bullet 3
    rv1, rv2 = rank(V1), rank(V2)
    b31 = rank_den - rv2
    b32 = rank_den - rv1
    rep.add(f"{prefix}.b3", _check(r1 <= b31 and r2 <= b32, r1 + r2, b31 + b32, gate,
                                   witness=f"j=1: {r1}<={b31}; j=2: {r2}<={b32}"))

    # step decomposition: full-rank difference equals the telescoped per-slot increments
    grow_num = _prefix_growth(trace, r, pair, pair.num_rx)
    grow_den = _prefix_growth(trace, r, pair, pair.den_rx)
    telescoped = sum(a - b for a, b in zip(grow_num, grow_den))
    rep.add(f"{prefix}.steps", _check(rank_num - rank_den == telescoped, rank_num - rank_den, telescoped))

    # ... bounded by the number of rank-growth slots at num_rx inside T
    growth_in_T = sum(grow_num[t - 1] for t in T)
    rep.add(f"{prefix}.x1", _check(rank_num - rank_den <= growth_in_T, rank_num - rank_den, growth_in_T, gate))

    # Claim 1: growth at tau_j w.r.t. the full prefix implies growth w.r.t. the T-prefix
    width = V1.ncols + V2.ncols
    restricted = RowBasis(width)
    violations = 0
    for t in T:
        grew_T = restricted.add(_pair_row(trace, r, pair, pair.num_rx, t))
        if grow_num[t - 1] and not grew_T:
            violations += 1
    rep.add(f"{prefix}.claim1", _check(violations == 0, violations, 0, witness=f"|T|={len(T)}"))

    rep.info.update({f"{prefix}.T": T, f"{prefix}.r1": r1, f"{prefix}.r2": r2})
    return rep


# ---------------------------------------------------------------------------
# converse chain
# ---------------------------------------------------------------------------

def converse_audit(trace: PrecoderTrace, r: ChannelRealization,
                   decodable: bool | None = None) -> VerificationReport:
    """Joint decodability equalities and the two weighted bounds (scaled by 2n)."""
    if decodable is None:
        decodable = is_decodable(decodability_check(trace, r))
    gate = None if decodable else "vacuous"
    rep = VerificationReport()
    V = trace.V
    m = trace.sizes
    n = trace.n

    def blk(k, key):
        return received(r, k, key[1], V[key])

    rx1 = [blk(1, key) for key in _CONDI]
    rx2 = [blk(2, key) for key in _CONDI]
    total1 = rank(hconcat(rx1))
    total2 = rank(hconcat(rx2))
    lhs1 = rank(blk(1, (1, 1))) + rank(blk(1, (1, 2)))
    rhs1 = total1 - rank(hconcat([blk(1, (2, 1)), blk(1, (2, 2))]))
    rep.add("joint1", _check(lhs1 == rhs1, lhs1, rhs1, gate))
    lhs2 = rank(blk(2, (2, 1))) + rank(blk(2, (2, 2)))
    rhs2 = total2 - rank(hconcat([blk(2, (1, 1)), blk(2, (1, 2))]))
    rep.add("joint2", _check(lhs2 == rhs2, lhs2, rhs2, gate))

    s1 = m[(1, 1)] + m[(1, 2)]
    s2 = m[(2, 1)] + m[(2, 2)]
    a = 2 * s1 + 3 * s2
    b = 3 * s1 + 2 * s2
    rep.add("bound.2r2x", _check(a <= 3 * n, a, 3 * n, gate))
    rep.add("bound.2r1x", _check(b <= 3 * n, b, 3 * n, gate))
    rep.add("bound.sum", _check(5 * (s1 + s2) <= 6 * n, 5 * (s1 + s2), 6 * n, gate,
                                witness=f"sum DoF {Q(s1 + s2, n)} <= 6/5"))
    return rep


# ---------------------------------------------------------------------------
# measure-zero event scan
# ---------------------------------------------------------------------------

def degenerate_event_scan(trace: PrecoderTrace, r: ChannelRealization,
                          pair: Pair = PAIR12) -> tuple[int, list[tuple[bool, bool, bool]]]:
    """Count slots i in A_i minus B_i.

    A_i: no rank growth at den_rx in slot i.  B_i: i in T.  C_i: rank growth
    at num_rx in slot i.  Returns the count and the per-slot (A, B, C) triples.
    """
    grow_den = _prefix_growth(trace, r, pair, pair.den_rx)
    grow_num = _prefix_growth(trace, r, pair, pair.num_rx)
    T = set(compute_T(trace, r, pair))
    triples = [(not grow_den[i - 1], i in T, bool(grow_num[i - 1])) for i in range(1, trace.n + 1)]
    return sum(1 for a, b, _ in triples if a and not b), triples


def lemma6_check(trace: PrecoderTrace, r: ChannelRealization, causal: bool = True,
                 pair: Pair = PAIR12) -> VerificationReport:
    gate = None if causal else "hypothesis-violated"
    count, triples = degenerate_event_scan(trace, r, pair)
    rep = VerificationReport()
    slots = [i + 1 for i, (a, b, _) in enumerate(triples) if a and not b]
    rep.add("lemma6.count", _check(count == 0, count, 0, gate, witness=f"slots={slots}"))
    return rep


def lemma6_adversary(r: ChannelRealization) -> ChannelRealization:
    """Retune g_21(2) so that, under unit precoders on (V11, V12), Rx2's slot-2
    observation is parallel to its slot-1 observation."""
    target = r.g(2, 2, 2) * r.g(2, 1, 1) / r.g(2, 2, 1)
    return r.replace({(2, 1, 2): target})


# ---------------------------------------------------------------------------
# everything at once
# ---------------------------------------------------------------------------

X_CHECK_GROUPS = ("causality", "decodability", "lemma1", "lemma5", "converse", "lemma6")


def verify_scheme(s: LinearScheme, r: ChannelRealization, audit_seed: int,
                  groups: Sequence[str] = X_CHECK_GROUPS) -> tuple[PrecoderTrace, VerificationReport]:
    """Audit causality, run ``s`` on ``r`` and evaluate the selected check groups.

    A scheme failing the audit is run with full CSIT so its ratio can still
    be reported; the lemma checks are then labelled ``hypothesis-violated``.
    """
    causal = causality_audit(s, r, audit_seed)
    trace = run_scheme(s, r) if causal else unsafe_full_csit_run(s, r)
    rep = VerificationReport()
    rep.info.update({"scheme": s.name, "n": s.n,
                     "sizes": {f"{k}{j}": m for (k, j), m in sorted(trace.sizes.items())},
                     "sum_dof": str(s.sum_dof())})
    if "causality" in groups:
        gate = "expected-fail" if (not causal and s.negative_control) else None
        rep.add("causality", _check(causal, int(causal), 1, gate))
    dec = None
    if "decodability" in groups or "converse" in groups:
        drep = decodability_check(trace, r)
        dec = is_decodable(drep)
        if "decodability" in groups:
            if not s.claims_decodable:
                relabel_unclaimed(drep)
            rep.merge(drep)
        rep.info["decodable"] = dec
    if "lemma1" in groups:
        rep.merge(rank_ratio_check(trace, r, causal))
    if "lemma5" in groups:
        rep.merge(lemma5_check(trace, r, causal))
    if "converse" in groups:
        rep.merge(converse_audit(trace, r, dec))
    if "lemma6" in groups:
        rep.merge(lemma6_check(trace, r, causal))
    return trace, rep
