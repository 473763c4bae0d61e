from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from doflab.channel import IC3, X_CHANNEL, sample_realization
from doflab.ic3 import PreconditionError, ic_decodability_check, ic_is_decodable, theorem2_audit, verify_ic_scheme
from doflab.ratmat import DimensionError
from doflab.scheme import StaticScheme, random_delayed_scheme, run_scheme, tdma_scheme

IC_KEYS = [(1, 1), (2, 2), (3, 3)]


def static_ic(n, m, rows):
    return StaticScheme(n, {key: m for key in IC_KEYS}, rows, links=IC3, name="static-ic")


def trace(s, seed=0):
    r = sample_realization(seed, IC3, s.n)
    return run_scheme(s, r), r


def test_tdma3_decodable_and_bound():
    tr, r = trace(tdma_scheme(3, IC3))
    assert ic_is_decodable(ic_decodability_check(tr, r))
    rep = theorem2_audit(tr, r)
    b = rep["ic.bound97"]
    assert (b.lhs, b.rhs, b.holds) == (7, 9, True)
    assert all(c.holds for c in rep.checks.values())
    assert rep["ic.do3user3"].lhs == 2


def test_boundary_equality_accepted():
    # n = 7, m = 3: only the arithmetic boundary 21 <= 21; the trace itself is not decodable
    rows = {key: [[1 if i == t % 3 else 0 for i in range(3)] for t in range(7)] for key in IC_KEYS}
    tr, r = trace(static_ic(7, 3, rows))
    b = theorem2_audit(tr, r)["ic.bound97"]
    assert (b.lhs, b.rhs, b.holds) == (21, 21, True)
    assert b.status == "vacuous"


def test_always_transmit_fails():
    rows = {key: [[i + 2 * j + 1] for i in range(2)] for j, key in enumerate(IC_KEYS)}
    tr, r = trace(static_ic(2, 1, rows))
    rep = ic_decodability_check(tr, r)
    assert not ic_is_decodable(rep)
    assert all(not rep[f"ic.decode.{j}"].holds for j in (1, 2, 3))


def test_zero_scheme_vacuously_decodable():
    tr, r = trace(static_ic(3, 0, {}))
    assert ic_is_decodable(ic_decodability_check(tr, r))


def test_asymmetric_sizes():
    s = tdma_scheme(4, IC3)  # sizes (2, 1, 1)
    tr, r = trace(s)
    with pytest.raises(PreconditionError):
        theorem2_audit(tr, r)
    _, rep = verify_ic_scheme(s, r, 0)
    assert "ic.bound97" not in rep and rep.info["bound_audit"].startswith("skipped")
    assert ic_is_decodable(rep)


def test_shape_checks():
    tr, _ = trace(tdma_scheme(3, IC3))
    with pytest.raises(DimensionError):
        ic_decodability_check(tr, sample_realization(0, X_CHANNEL, 3))


def test_rotations_present():
    tr, r = trace(tdma_scheme(6, IC3))
    rep = theorem2_audit(tr, r)
    for base in ("ic.do3user", "ic.do3user0", "ic.do3user2", "ic.do3user3", "ic.lemma1", "ic.do3user5"):
        for sfx in ("", ".cyc1", ".cyc2"):
            assert f"{base}{sfx}" in rep


@settings(max_examples=120)
@given(st.integers(0, 2**64 - 1), st.integers(1, 8), st.integers(1, 3), st.integers(0, 2))
def test_random_ic_chain(seed, n, m, complexity):
    s = random_delayed_scheme(seed, n, {key: m for key in IC_KEYS}, complexity, IC3)
    r = sample_realization(seed ^ 77, IC3, n)
    _, rep = verify_ic_scheme(s, r, seed)
    assert rep["causality"].holds
    # the ratio and submodularity links hold regardless of decodability
    for sfx in ("", ".cyc1", ".cyc2"):
        assert rep[f"ic.lemma1{sfx}"].holds
        assert rep[f"ic.do3user2{sfx}"].holds
    if rep.info["decodable"]:
        assert all(c.holds for c in rep.checks.values())
        assert 7 * m <= 3 * n
    assert rep.findings == []
