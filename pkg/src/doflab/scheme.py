"""
Linear coding strategies with delayed CSIT.

A scheme fixes the block length ``n`` and message sizes m_kj, and at each
timeslot t emits one precoder row per message as a function of the channel
state of slots 1..t-1 (read through a ``CsitView``) and of its own earlier
rows.  Message keys are ``(k, j)``: the message from transmitter j to
receiver k.  On the three-user interference channel the messages are
``(j, j)``.

``run_scheme`` is the only public runner and enforces causality.  The
full-CSIT runner exists solely for the instantaneous-CSIT negative control
and is named accordingly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from .ratmat import Q
from pathlib import Path
from typing import Mapping, Sequence

from . import channel as ch
from .channel import CausalityViolation, ChannelRealization, CsitView, LinkSet, X_CHANNEL, IC3
from .ratmat import RationalMatrix, RowBasis, left_nullspace_basis

__all__ = [
    "SchemeContractError",
    "LinearScheme",
    "PrecoderTrace",
    "GmkScheme",
    "TdmaScheme",
    "RatioWitnessScheme",
    "InstantCsitRepeatScheme",
    "RandomDelayedScheme",
    "StaticScheme",
    "gmk_scheme",
    "tdma_scheme",
    "ratio_witness_scheme",
    "instant_csit_repeat_scheme",
    "random_delayed_scheme",
    "lemma6_probe_scheme",
    "run_scheme",
    "unsafe_full_csit_run",
    "causality_audit",
    "resolve_scheme",
    "load_static_scheme",
]

Key = tuple[int, int]
Row = tuple[Q, ...]
History = Mapping[Key, Sequence[Row]]

_ZERO = Q(0)
_ONE = Q(1)


class SchemeContractError(ValueError):
    """A scheme emitted rows that do not match its declared message sizes."""


def _key_str(key: Key) -> str:
    return f"{key[0]}{key[1]}"


def _parse_key(s: str) -> Key:
    if len(s) != 2 or not s.isdigit():
        raise ValueError(f"bad message key {s!r}")
    return (int(s[0]), int(s[1]))


class LinearScheme:
    """Base class.  Subclasses set ``name``, ``links``, ``n``, ``sizes`` and implement ``precode``."""

    name: str = "scheme"
    links: LinkSet = X_CHANNEL
    n: int
    sizes: dict[Key, int]
    # negative controls are allowed to fail the causality audit without it being a finding
    negative_control: bool = False
    # whether the scheme is meant to be decodable; failed decodability of a
    # scheme that makes no such claim (random generators) is not a finding
    claims_decodable: bool = True

    def precode(self, t: int, view: CsitView, history: History) -> dict[Key, Sequence]:
        raise NotImplementedError

    def sum_dof(self) -> Q:
        return Q(sum(self.sizes.values()), self.n)


@dataclass(frozen=True)
class PrecoderTrace:
    """Realized precoding matrices V_kj (n x m_kj), row t = row emitted at slot t."""

    scheme: str
    links: LinkSet
    n: int
    sizes: dict[Key, int]
    V: dict[Key, RationalMatrix]

    def with_row(self, key: Key, t: int, row: Sequence) -> "PrecoderTrace":
        """Copy with row t (1-based) of V_key replaced; for constructing negative tests."""
        M = self.V[key]
        rows = list(M.data)
        rows[t - 1] = tuple(Q(x) for x in row)
        V = dict(self.V)
        V[key] = RationalMatrix(M.nrows, M.ncols, tuple(rows))
        return PrecoderTrace(self.scheme, self.links, self.n, self.sizes, V)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "n": self.n,
            "sizes": {_key_str(k): m for k, m in sorted(self.sizes.items())},
            "rows": {
                _key_str(k): [[f"{x.numerator}/{x.denominator}" for x in row] for row in M.data]
                for k, M in sorted(self.V.items())
            },
        }


def message_keys(links: LinkSet) -> list[Key]:
    if links == IC3:
        return [(1, 1), (2, 2), (3, 3)]
    return links.pairs()


def _run(s: LinearScheme, r: ChannelRealization, view_cls, upto: int | None = None) -> dict[Key, list[Row]]:
    if s.n != r.n:
        raise SchemeContractError(f"scheme block length {s.n} != realization length {r.n}")
    if s.links != r.links:
        raise SchemeContractError(f"scheme links {s.links} incompatible with {r.links}")
    keys = message_keys(s.links)
    for key in s.sizes:
        if key not in keys:
            raise SchemeContractError(f"message {key} not carried by {s.links}")
    history: dict[Key, list[Row]] = {key: [] for key in keys}
    last = s.n if upto is None else upto
    for t in range(1, last + 1):
        out = s.precode(t, view_cls(r, t), history)
        for key in keys:
            m = s.sizes.get(key, 0)
            row = out.get(key, ())
            if len(row) != m:
                raise SchemeContractError(
                    f"{s.name}: row for {key} at t={t} has length {len(row)}, expected {m}")
            history[key].append(tuple(Q(x) for x in row))
    return history


def _trace(s: LinearScheme, history: dict[Key, list[Row]]) -> PrecoderTrace:
    V = {key: RationalMatrix(s.n, s.sizes.get(key, 0), tuple(rows)) for key, rows in history.items()}
    sizes = {key: s.sizes.get(key, 0) for key in history}
    return PrecoderTrace(s.name, s.links, s.n, sizes, V)


def run_scheme(s: LinearScheme, r: ChannelRealization) -> PrecoderTrace:
    """Run ``s`` slot by slot against ``r`` with delayed CSIT only."""
    return _trace(s, _run(s, r, CsitView))


def unsafe_full_csit_run(s: LinearScheme, r: ChannelRealization) -> PrecoderTrace:
    """Run with instantaneous (non-causal) CSIT.  Only for negative controls."""
    return _trace(s, _run(s, r, ch._FullCsitView))


def causality_audit(s: LinearScheme, r: ChannelRealization, seed: int) -> bool:
    """Empirical delayed-CSIT check.

    For every t, re-runs ``s`` on a realization that agrees with ``r`` on
    slots < t and differs on slots >= t, and requires row t of every V_kj to
    be unchanged.  Runs use unrestricted channel access so that dependence on
    current/future state shows up as a row difference; a scheme that trips
    the ``CsitView`` guard also fails.
    """
    try:
        _run(s, r, CsitView)
    except CausalityViolation:
        return False
    base = _run(s, r, ch._FullCsitView)
    rng = random.Random(seed)
    for t in range(1, s.n + 1):
        mutant = ch.mutate_suffix(r, t, rng.getrandbits(64))
        rows = _run(s, mutant, ch._FullCsitView, upto=t)
        for key in base:
            if rows[key][t - 1] != base[key][t - 1]:
                return False
    return True


# ---------------------------------------------------------------------------
# built-in schemes
# ---------------------------------------------------------------------------

class GmkScheme(LinearScheme):
    """Five-slot X-channel scheme with sum DoF 6/5.

    Slots 1-2 deliver a1, a2 (Tx1) and b1 twice (Tx2); slots 3-4 deliver c1
    twice (Tx1) and d1, d2 (Tx2).  In slot 5, Tx1 resends the combination of
    a1, a2 that Rx2 already holds and Tx2 the combination of d1, d2 that Rx1
    already holds.
    """

    name = "gmk"

    def __init__(self):
        self.n = 5
        self.sizes = {(1, 1): 2, (1, 2): 1, (2, 1): 1, (2, 2): 2}

    _CONSTANT = {
        1: {(1, 1): (1, 0), (1, 2): (1,), (2, 1): (0,), (2, 2): (0, 0)},
        2: {(1, 1): (0, 1), (1, 2): (1,), (2, 1): (0,), (2, 2): (0, 0)},
        3: {(1, 1): (0, 0), (1, 2): (0,), (2, 1): (1,), (2, 2): (1, 0)},
        4: {(1, 1): (0, 0), (1, 2): (0,), (2, 1): (1,), (2, 2): (0, 1)},
    }

    def precode(self, t, view, history):
        if t in self._CONSTANT:
            return self._CONSTANT[t]
        g = view.g
        m1 = (g(2, 2, 2) * g(2, 1, 1), -g(2, 2, 1) * g(2, 1, 2))
        m2 = (g(1, 2, 3) * g(1, 1, 4), -g(1, 1, 3) * g(1, 2, 4))
        return {(1, 1): m1, (1, 2): (0,), (2, 1): (0,), (2, 2): m2}


class RatioWitnessScheme(LinearScheme):
    """Three slots on (V11, V12) that make the rank ratio exactly 3/2.

    Slots 1-2 as in ``GmkScheme``; slot 3 sends only the combination of a1, a2
    that Rx2 already holds, so Rx1 gains a dimension and Rx2 does not.
    """

    name = "ratio-witness"

    def __init__(self):
        self.n = 3
        self.sizes = {(1, 1): 2, (1, 2): 1, (2, 1): 0, (2, 2): 0}

    def precode(self, t, view, history):
        if t == 1:
            return {(1, 1): (1, 0), (1, 2): (1,)}
        if t == 2:
            return {(1, 1): (0, 1), (1, 2): (1,)}
        g = view.g
        return {(1, 1): (g(2, 2, 2) * g(2, 1, 1), -g(2, 2, 1) * g(2, 1, 2)), (1, 2): (0,)}


class InstantCsitRepeatScheme(LinearScheme):
    """Two-slot scheme that needs the *current* channel: Rx2 receives the same
    equation twice while Rx1 receives two independent ones (ratio 2).

    Fails the causality audit by design.
    """

    name = "icsit-repeat"
    negative_control = True

    def __init__(self):
        self.n = 2
        self.sizes = {(1, 1): 1, (1, 2): 1, (2, 1): 0, (2, 2): 0}

    def precode(self, t, view, history):
        if t == 1:
            return {(1, 1): (1,), (1, 2): (1,)}
        g = view.g
        return {(1, 1): (g(2, 1, 1) / g(2, 1, 2),), (1, 2): (g(2, 2, 1) / g(2, 2, 2),)}


class TdmaScheme(LinearScheme):
    """Round-robin over the messages; one fresh symbol per slot, unit precoders."""

    def __init__(self, n: int, links: LinkSet = X_CHANNEL):
        if n < 1:
            raise ValueError("n must be positive")
        self.links = links
        self.name = "tdma" if links == X_CHANNEL else "ic-tdma"
        self.n = n
        keys = message_keys(links)
        self._slot_key = {t: keys[(t - 1) % len(keys)] for t in range(1, n + 1)}
        self.sizes = {key: sum(1 for k in self._slot_key.values() if k == key) for key in keys}
        self._slot_index = {}
        seen: dict[Key, int] = {}
        for t in range(1, n + 1):
            key = self._slot_key[t]
            self._slot_index[t] = seen.get(key, 0)
            seen[key] = self._slot_index[t] + 1

    def precode(self, t, view, history):
        out = {}
        active = self._slot_key[t]
        for key, m in self.sizes.items():
            row = [_ZERO] * m
            if key == active:
                row[self._slot_index[t]] = _ONE
            out[key] = row
        return out


class StaticScheme(LinearScheme):
    """Constant precoders given explicitly (the static-scheme JSON format)."""

    def __init__(self, n: int, sizes: Mapping[Key, int], rows: Mapping[Key, Sequence[Sequence]],
                 links: LinkSet = X_CHANNEL, name: str = "static", claims_decodable: bool = True):
        self.name = name
        self.claims_decodable = claims_decodable
        self.links = links
        self.n = n
        self.sizes = dict(sizes)
        self.rows = {}
        for key, m in self.sizes.items():
            rs = rows.get(key, [[]] * n if m == 0 else None)
            if rs is None or len(rs) != n:
                raise SchemeContractError(f"static scheme needs {n} rows for message {key}")
            self.rows[key] = [tuple(Q(x) for x in r) for r in rs]

    def precode(self, t, view, history):
        return {key: rs[t - 1] for key, rs in self.rows.items()}

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "sizes": {_key_str(k): m for k, m in sorted(self.sizes.items())},
            "rows": {_key_str(k): [[f"{x.numerator}/{x.denominator}" for x in r] for r in rs]
                     for k, rs in sorted(self.rows.items())},
        }
        if not self.claims_decodable:
            d["claims_decodable"] = False
        return d

    @classmethod
    def from_dict(cls, d: dict, name: str = "static") -> "StaticScheme":
        sizes = {_parse_key(k): int(m) for k, m in d["sizes"].items()}
        rows = {_parse_key(k): v for k, v in d.get("rows", {}).items()}
        links = IC3 if any(max(k) == 3 for k in sizes) else X_CHANNEL
        return cls(int(d["n"]), sizes, rows, links=links, name=name,
                   claims_decodable=bool(d.get("claims_decodable", True)))


def load_static_scheme(path: str | Path) -> StaticScheme:
    p = Path(path)
    return StaticScheme.from_dict(json.loads(p.read_text()), name=f"file:{p.name}")


# ---------------------------------------------------------------------------
# random delayed schemes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Poly:
    # each entry: tuple of (coefficient, factors); factors are (k, j, s) with s < t
    entries: tuple[tuple[tuple[Q, tuple[tuple[int, int, int], ...]], ...], ...]


@dataclass(frozen=True)
class _Aligned:
    weights: tuple[int, ...]


@dataclass
class RandomDelayedScheme(LinearScheme):
    """Randomly generated delayed-CSIT scheme, fixed by ``seed``.

    Every (slot, message) gets one of three row recipes, chosen once at
    construction:

    * zero row;
    * polynomial: each entry a sparse random rational combination of
      monomials of degree <= ``complexity`` in past coefficients (degree 0
      gives constants);
    * aligned (complexity >= 1, X-channel only): a fixed combination of a
      basis of the equations in this transmitter's symbols that the *other*
      receiver can already isolate from its past observations.  This is the
      slot-5 move of the 6/5 scheme and is what lets random search reach the
      extremal rank ratio.
    """

    seed: int
    n: int
    sizes: dict
    complexity: int = 0
    links: LinkSet = X_CHANNEL
    name: str = field(init=False)
    _plan: dict = field(init=False, repr=False)
    claims_decodable = False

    def __post_init__(self):
        if self.complexity < 0:
            raise ValueError("complexity must be >= 0")
        self.name = f"random:{self.seed}:{self.complexity}"
        rng = random.Random(self.seed)
        keys = message_keys(self.links)
        self.sizes = {key: int(self.sizes.get(key, 0)) for key in keys}
        past_pairs = self.links.pairs()
        plan = {}
        for t in range(1, self.n + 1):
            for key in keys:
                m = self.sizes[key]
                u = rng.random()
                if m == 0:
                    plan[(t, key)] = None
                elif u < 0.25:
                    plan[(t, key)] = None
                elif u < 0.5 and self.complexity >= 1 and t >= 2 and self.links == X_CHANNEL:
                    plan[(t, key)] = _Aligned(tuple(rng.choice((-3, -2, -1, 1, 2, 3)) for _ in range(self.n)))
                else:
                    entries = []
                    for _ in range(m):
                        terms = []
                        for _ in range(rng.randint(1, 2)):
                            coef = Q(rng.choice((-1, 1)) * rng.randint(1, 9), rng.randint(1, 4))
                            deg = rng.randint(0, self.complexity) if t >= 2 else 0
                            factors = tuple(
                                (*rng.choice(past_pairs), rng.randint(1, t - 1)) for _ in range(deg)
                            )
                            terms.append((coef, factors))
                        entries.append(tuple(terms))
                    plan[(t, key)] = _Poly(tuple(entries))
        self._plan = plan

    def _eval_poly(self, p: _Poly, view: CsitView) -> list[Q]:
        out = []
        for terms in p.entries:
            acc = _ZERO
            for coef, factors in terms:
                term = coef
                for k, j, s in factors:
                    term *= view.g(k, j, s)
                acc += term
            out.append(acc)
        return out

    def _aligned_row(self, key: Key, t: int, view: CsitView, history: History, w: _Aligned) -> list[Q]:
        # messages for receiver k are observed "for free" at receiver 3-k
        k, j = key
        other_rx = 3 - k
        jo = 3 - j
        m = self.sizes[key]
        if t == 1:
            return [_ZERO] * m
        own = RationalMatrix(t - 1, m, tuple(
            tuple(view.g(other_rx, j, s) * x for x in history[key][s - 1]) for s in range(1, t)))
        okey = (k, jo)
        other = RationalMatrix(t - 1, self.sizes[okey], tuple(
            tuple(view.g(other_rx, jo, s) * x for x in history[okey][s - 1]) for s in range(1, t)))
        L = left_nullspace_basis(other)
        S = L @ own
        basis = RowBasis(m)
        rows = [r for r in S.data if basis.add(r)]
        out = [_ZERO] * m
        for c, r in zip(w.weights, rows):
            for i, x in enumerate(r):
                out[i] += c * x
        return out

    def precode(self, t, view, history):
        out = {}
        for key, m in self.sizes.items():
            p = self._plan[(t, key)]
            if p is None:
                out[key] = [_ZERO] * m
            elif isinstance(p, _Aligned):
                out[key] = self._aligned_row(key, t, view, history, p)
            else:
                out[key] = self._eval_poly(p, view)
        return out


def gmk_scheme() -> GmkScheme:
    return GmkScheme()


def tdma_scheme(n: int, links: LinkSet = X_CHANNEL) -> TdmaScheme:
    return TdmaScheme(n, links)


def ratio_witness_scheme() -> RatioWitnessScheme:
    return RatioWitnessScheme()


def instant_csit_repeat_scheme() -> InstantCsitRepeatScheme:
    return InstantCsitRepeatScheme()


def random_delayed_scheme(seed: int, n: int, sizes: Mapping[Key, int], complexity: int = 0,
                          links: LinkSet = X_CHANNEL) -> RandomDelayedScheme:
    return RandomDelayedScheme(seed=seed, n=n, sizes=dict(sizes), complexity=complexity, links=links)


def lemma6_probe_scheme() -> StaticScheme:
    """Both transmitters send one symbol with unit precoders in two slots."""
    return StaticScheme(2, {(1, 1): 1, (1, 2): 1, (2, 1): 0, (2, 2): 0},
                        {(1, 1): [[1], [1]], (1, 2): [[1], [1]]}, name="lemma6-probe")


def random_sizes(rng: random.Random, n: int, links: LinkSet = X_CHANNEL) -> dict[Key, int]:
    cap = max(1, (n + 1) // 2)
    return {key: rng.randint(0, cap) for key in message_keys(links)}


def resolve_scheme(name: str, n: int | None = None) -> LinearScheme:
    """Built-in scheme by name, or a static-scheme JSON file path.

    Names: ``gmk``, ``tdma``, ``ratio-witness``, ``icsit-repeat``,
    ``lemma6-probe``, ``ic-tdma``, ``random:<seed>:<complexity>``.  Random
    schemes draw their message sizes from the same seed.
    """
    if name == "gmk":
        s = GmkScheme()
    elif name == "tdma":
        s = TdmaScheme(n or 4)
    elif name == "ic-tdma":
        s = TdmaScheme(n or 3, IC3)
    elif name == "ratio-witness":
        s = RatioWitnessScheme()
    elif name == "icsit-repeat":
        s = InstantCsitRepeatScheme()
    elif name == "lemma6-probe":
        s = lemma6_probe_scheme()
    elif name.startswith("random:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected random:<seed>:<complexity>, got {name!r}")
        seed, complexity = int(parts[1]), int(parts[2])
        nn = n or 5
        sizes = random_sizes(random.Random(seed ^ 0x5EED), nn)
        s = RandomDelayedScheme(seed=seed, n=nn, sizes=sizes, complexity=complexity)
    elif Path(name).is_file():
        s = load_static_scheme(name)
    else:
        raise ValueError(f"unknown scheme {name!r}")
    if n is not None and s.n != n:
        raise SchemeContractError(f"scheme {name!r} has fixed block length {s.n}, not {n}")
    return s
