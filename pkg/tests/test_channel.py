from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from doflab.channel import (
    GRID_DENOMINATOR,
    IC3,
    X_CHANNEL,
    CausalityViolation,
    ChannelRealization,
    LinkSet,
    csit_at,
    diag_block,
    fnv1a64,
    mutate_suffix,
    sample_realization,
)
from doflab.ratmat import RationalMatrix, rank

seeds = st.integers(0, 2**64 - 1)


def test_same_seed_same_realization():
    assert sample_realization(42, X_CHANNEL, 5) == sample_realization(42, X_CHANNEL, 5)
    assert sample_realization(42, X_CHANNEL, 5) != sample_realization(43, X_CHANNEL, 5)


def test_count_and_nonzero():
    r = sample_realization(9, X_CHANNEL, 5)
    assert len(r.coeffs) == 20
    assert all(v != 0 for v in r.coeffs.values())
    assert len(sample_realization(9, IC3, 4).coeffs) == 36


@given(seeds, st.integers(1, 6))
def test_grid(seed, n):
    r = sample_realization(seed, X_CHANNEL, n)
    for v in r.coeffs.values():
        assert GRID_DENOMINATOR % v.denominator == 0
        assert 0 < abs(v * GRID_DENOMINATOR) <= GRID_DENOMINATOR


def test_bad_arguments():
    with pytest.raises(ValueError):
        sample_realization(1, X_CHANNEL, 0)
    with pytest.raises(ValueError):
        LinkSet(4, 2)
    r = sample_realization(1, X_CHANNEL, 2)
    coeffs = dict(r.coeffs)
    coeffs[(1, 1, 1)] = 0
    with pytest.raises(ValueError):
        ChannelRealization(X_CHANNEL, 2, coeffs)
    del coeffs[(1, 1, 1)]
    with pytest.raises(ValueError):
        ChannelRealization(X_CHANNEL, 2, coeffs)


def test_genericity_5x5():
    # 10^4 random 5x5 matrices assembled from sampled coefficients: full rank every time
    for seed in range(10_000 // 4):
        r = sample_realization(seed, X_CHANNEL, 25)  # 100 coefficients = four matrices
        vals = [r.coeffs[key] for key in sorted(r.coeffs)]
        for b in range(4):
            chunk = vals[25 * b: 25 * b + 25]
            A = RationalMatrix.from_rows([chunk[5 * i: 5 * i + 5] for i in range(5)])
            assert rank(A) == 5


@given(seeds, st.integers(1, 5))
def test_json_round_trip(seed, n):
    r = sample_realization(seed, X_CHANNEL, n)
    s = r.to_json()
    back = ChannelRealization.from_json(s)
    assert back == r
    assert back.to_json() == s
    assert back.fingerprint() == r.fingerprint()


def test_json_layout():
    d = sample_realization(3, X_CHANNEL, 2).to_dict()
    assert d["links"] == [2, 2] and d["n"] == 2
    first = d["coeffs"][0]
    assert (first["k"], first["j"], first["t"]) == (1, 1, 1)
    p, q = first["v"].split("/")
    assert int(q) > 0 and int(p) != 0


def test_fnv_reference_values():
    # published FNV-1a 64 test vectors
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_diag_block():
    r = sample_realization(4, X_CHANNEL, 5)
    D = diag_block(r, 1, 2, [3])
    assert D.shape == (1, 1) and D[0, 0] == r.g(1, 2, 3)
    assert diag_block(r, 1, 2, []).shape == (0, 0)
    assert rank(diag_block(r, 2, 1)) == 5
    with pytest.raises(IndexError):
        diag_block(r, 1, 1, [6])


def test_csit_view():
    r = sample_realization(5, X_CHANNEL, 5)
    with pytest.raises(CausalityViolation):
        csit_at(r, 1).g(1, 1, 1)
    assert csit_at(r, 5).g(2, 1, 4) == r.g(2, 1, 4)
    with pytest.raises(CausalityViolation):
        csit_at(r, 3).g(1, 2, 3)
    with pytest.raises(IndexError):
        csit_at(r, 6)


@given(seeds, st.integers(1, 6), st.data())
def test_view_answers_only_past(seed, n, data):
    r = sample_realization(seed, X_CHANNEL, n)
    t = data.draw(st.integers(1, n))
    s = data.draw(st.integers(1, n))
    view = csit_at(r, t)
    if s < t:
        assert view.g(1, 1, s) == r.g(1, 1, s)
    else:
        with pytest.raises(CausalityViolation):
            view.g(1, 1, s)


@given(seeds, st.integers(1, 6), st.data())
def test_mutate_suffix(seed, n, data):
    r = sample_realization(seed, X_CHANNEL, n)
    t = data.draw(st.integers(1, n))
    m = mutate_suffix(r, t, seed ^ 1)
    for (k, j, s), v in r.coeffs.items():
        if s < t:
            assert m.g(k, j, s) == v
        else:
            assert m.g(k, j, s) != v


def test_replace():
    r = sample_realization(1, X_CHANNEL, 2)
    r2 = r.replace({(1, 1, 2): 7})
    assert r2.g(1, 1, 2) == 7 and r.g(1, 1, 2) != 7
    with pytest.raises(IndexError):
        r.replace({(3, 1, 1): 1})
