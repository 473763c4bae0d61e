"""
Three-user interference channel: decodability and the 9/7 linear-DoF audit.

Messages are keyed ``(j, j)``; ``V[(j, j)]`` is user j's n x m_j precoder.
The bound audit walks the chain

    rank[G_ab V_b  G_ac V_c] + rank[G_aa V_a] = total at Rx a      (decodability at a)
    rank[G_ba V_a  G_bc V_c] + rank[G_bb V_b] = total at Rx b      (decodability at b)
    => rank[G_bb V_b  G_bc V_c] = 2m                               (submodularity)
    2 rank[G_bb V_b  G_bc V_c] <= 3 rank[G_ab V_b  G_ac V_c]       (rank ratio)
    => 4m <= 3 rank[G_ab V_b  G_ac V_c]  =>  7m <= 3n

for (a, b, c) = (1, 2, 3) and its two cyclic relabelings.
"""

from __future__ import annotations

from .channel import ChannelRealization, IC3
from .ratmat import DimensionError, hconcat, proj_dim, rank
from .scheme import LinearScheme, PrecoderTrace, causality_audit, run_scheme, unsafe_full_csit_run
from .verify import Pair, VerificationReport, _check, rank_ratio_check, received, relabel_unclaimed

__all__ = [
    "PreconditionError",
    "ic_decodability_check",
    "ic_is_decodable",
    "theorem2_audit",
    "verify_ic_scheme",
    "ROTATIONS",
]

ROTATIONS = ((1, 2, 3, ""), (2, 3, 1, ".cyc1"), (3, 1, 2, ".cyc2"))


class PreconditionError(ValueError):
    pass


def _ic_shapes(trace: PrecoderTrace, r: ChannelRealization) -> None:
    if trace.links != IC3 or r.links != IC3:
        raise DimensionError("three-user IC trace and realization required")
    if trace.n != r.n:
        raise DimensionError(f"trace length {trace.n} != realization length {r.n}")


def _blk(trace, r, rx, user):
    return received(r, rx, user, trace.V[(user, user)])


def ic_decodability_check(trace: PrecoderTrace, r: ChannelRealization) -> VerificationReport:
    """proj_dim(G_jj V_j, interference at Rx j) = m_j and rank V_j = m_j, for each user."""
    _ic_shapes(trace, r)
    rep = VerificationReport()
    for j in (1, 2, 3):
        m = trace.sizes[(j, j)]
        desired = _blk(trace, r, j, j)
        interf = hconcat([_blk(trace, r, j, i) for i in (1, 2, 3) if i != j])
        pd = proj_dim(desired, interf)
        rv = rank(trace.V[(j, j)])
        rep.add(f"ic.decode.{j}", _check(pd == m and rv == m, pd, m, witness=f"rank V={rv}"))
    return rep


def ic_is_decodable(rep: VerificationReport) -> bool:
    return all(rep[f"ic.decode.{j}"].holds for j in (1, 2, 3))


def theorem2_audit(trace: PrecoderTrace, r: ChannelRealization, causal: bool = True,
                   decodable: bool | None = None) -> VerificationReport:
    """Each link of the 9/7 chain as an exact integer (in)equality."""
    _ic_shapes(trace, r)
    sizes = [trace.sizes[(j, j)] for j in (1, 2, 3)]
    if len(set(sizes)) != 1:
        raise PreconditionError(f"bound audit needs symmetric message sizes, got {sizes}")
    m = sizes[0]
    n = trace.n
    if decodable is None:
        decodable = ic_is_decodable(ic_decodability_check(trace, r))
    vac = None if decodable else "vacuous"
    rep = VerificationReport()
    for a, b, c, sfx in ROTATIONS:
        aa, ab, ac = (_blk(trace, r, a, u) for u in (a, b, c))
        ba, bb, bc = (_blk(trace, r, b, u) for u in (a, b, c))
        total_a = rank(hconcat([aa, ab, ac]))
        total_b = rank(hconcat([ba, bb, bc]))
        pair_a = rank(hconcat([ab, ac]))
        pair_b = rank(hconcat([bb, bc]))
        int_b = rank(hconcat([ba, bc]))
        r_aa, r_bb, r_bc = rank(aa), rank(bb), rank(bc)

        rep.add(f"ic.do3user{sfx}", _check(pair_a + r_aa == total_a, pair_a + r_aa, total_a, vac))
        rep.add(f"ic.do3user0{sfx}", _check(int_b + r_bb == total_b, int_b + r_bb, total_b, vac))
        # submodularity step; holds for any matrices
        rep.add(f"ic.do3user2{sfx}", _check(total_b - int_b <= pair_b - r_bc, total_b - int_b, pair_b - r_bc))
        rv = rank(trace.V[(b, b)]) + rank(trace.V[(c, c)])
        rep.add(f"ic.do3user3{sfx}", _check(pair_b == 2 * m and rv == 2 * m, pair_b, 2 * m, vac,
                                             witness=f"rank V_{b} + rank V_{c} = {rv}"))
        pair = Pair((b, b), (c, c), b, c, num_rx=b, den_rx=a, label="")
        lrep = rank_ratio_check(trace, r, causal, pairs=(pair,), prefix="ic.lemma1")
        (chk,) = lrep.checks.values()
        rep.add(f"ic.lemma1{sfx}", chk)
        rep.add(f"ic.do3user5{sfx}", _check(4 * m <= 3 * pair_a, 4 * m, 3 * pair_a, vac))
    rep.add("ic.bound97", _check(7 * m <= 3 * n, 7 * m, 3 * n, vac, witness=f"m={m}, n={n}"))
    return rep


def verify_ic_scheme(s: LinearScheme, r: ChannelRealization, audit_seed: int):
    """Causality audit, decodability, and (for symmetric sizes) the bound audit."""
    causal = causality_audit(s, r, audit_seed)
    trace = run_scheme(s, r) if causal else unsafe_full_csit_run(s, r)
    rep = VerificationReport()
    rep.info.update({"scheme": s.name, "n": s.n,
                     "sizes": {f"{k}{j}": m for (k, j), m in sorted(trace.sizes.items())}})
    rep.add("causality", _check(causal, int(causal), 1, "expected-fail" if (not causal and s.negative_control) else None))
    drep = ic_decodability_check(trace, r)
    dec = ic_is_decodable(drep)
    if not s.claims_decodable:
        relabel_unclaimed(drep)
    rep.merge(drep)
    rep.info["decodable"] = dec
    sizes = {trace.sizes[(j, j)] for j in (1, 2, 3)}
    if len(sizes) == 1:
        rep.merge(theorem2_audit(trace, r, causal, dec))
    else:
        rep.info["bound_audit"] = "skipped: asymmetric sizes"
    return trace, rep
