"""
Seeded Monte-Carlo experiments over (scheme, realization) trials.

Trial i draws everything from ``trial_seed(base_seed, i)`` (a splitmix64
step), so trials are independent of each other and of execution order.
Logs hold only integers and strings; ratios are kept as integer pairs.
"""

from __future__ import annotations

import csv
import io
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .channel import IC3, X_CHANNEL, sample_realization
from .ic3 import verify_ic_scheme
from .scheme import (
    LinearScheme,
    RandomDelayedScheme,
    TdmaScheme,
    random_sizes,
    resolve_scheme,
)
from .verify import X_CHECK_GROUPS, VerificationReport, lemma6_adversary, verify_scheme

__all__ = [
    "SCHEMA",
    "ExperimentConfig",
    "TrialLog",
    "splitmix64",
    "trial_seed",
    "run_trial",
    "run_experiment",
    "replay_trial",
    "ratio_greater",
]

SCHEMA = "doflab/1"
_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

TAMPERS = {"lemma6-adversary": lemma6_adversary}


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def trial_seed(base_seed: int, index: int) -> int:
    return splitmix64((base_seed & _MASK) ^ splitmix64(index))


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment.

    ``scheme`` is a built-in name or static-scheme file (see
    ``resolve_scheme``), or one of the per-trial generators:
    ``random`` (fresh random delayed X-channel scheme per trial),
    ``ic-random`` (symmetric random IC scheme) and ``ic-tdma``.
    """

    scheme: str = "gmk"
    trials: int = 1
    base_seed: int = 0
    n: int | None = None
    n_range: tuple[int, int] = (2, 8)
    complexities: tuple[int, ...] = (0, 1, 2)
    m: int | None = None
    checks: tuple[str, ...] = X_CHECK_GROUPS
    tamper: str | None = None
    output: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.checks:
            raise ValueError("checks must be nonempty")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.tamper is not None and self.tamper not in TAMPERS:
            raise ValueError(f"unknown tamper {self.tamper!r}")
        unknown = set(self.checks) - set(X_CHECK_GROUPS) - {"ic3"}
        if unknown:
            raise ValueError(f"unknown check groups {sorted(unknown)}")

    @property
    def is_ic(self) -> bool:
        return self.scheme.startswith("ic-")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_range"] = list(self.n_range)
        d["complexities"] = list(self.complexities)
        d["checks"] = list(self.checks)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["n_range"] = tuple(d.get("n_range", (2, 8)))
        d["complexities"] = tuple(d.get("complexities", (0, 1, 2)))
        d["checks"] = tuple(d.get("checks", X_CHECK_GROUPS))
        return cls(**d)


def _scheme_for_trial(cfg: ExperimentConfig, rng: random.Random) -> LinearScheme:
    scheme_seed = rng.getrandbits(64)
    if cfg.scheme == "random":
        n = cfg.n or rng.randint(*cfg.n_range)
        complexity = rng.choice(cfg.complexities)
        return RandomDelayedScheme(seed=scheme_seed, n=n, sizes=random_sizes(rng, n), complexity=complexity)
    if cfg.scheme == "ic-random":
        n = cfg.n or rng.randint(*cfg.n_range)
        m = cfg.m if cfg.m is not None else rng.randint(1, max(1, n // 2))
        complexity = rng.choice(cfg.complexities)
        return RandomDelayedScheme(seed=scheme_seed, n=n, sizes={(1, 1): m, (2, 2): m, (3, 3): m},
                                   complexity=complexity, links=IC3)
    if cfg.scheme == "ic-tdma":
        n = cfg.n or 3 * rng.randint(1, 3)
        return TdmaScheme(n, IC3)
    return resolve_scheme(cfg.scheme, cfg.n)


def _trial(cfg: ExperimentConfig, index: int) -> tuple[dict, VerificationReport]:
    seed = trial_seed(cfg.base_seed, index)
    rng = random.Random(seed)
    scheme = _scheme_for_trial(cfg, rng)
    real_seed = rng.getrandbits(64)
    audit_seed = rng.getrandbits(64)
    r = sample_realization(real_seed, scheme.links, scheme.n)
    if cfg.tamper:
        r = TAMPERS[cfg.tamper](r)
    if scheme.links == X_CHANNEL:
        _, rep = verify_scheme(scheme, r, audit_seed, groups=[g for g in cfg.checks if g != "ic3"])
    else:
        _, rep = verify_ic_scheme(scheme, r, audit_seed)
    record = {
        "index": index,
        "seed": seed,
        "realization_hash": f"{r.fingerprint():016x}",
        "scheme": scheme.name,
        "checks": {name: c.to_dict() for name, c in rep.checks.items()},
        "info": rep.info,
    }
    return record, rep


def run_trial(cfg: ExperimentConfig, index: int) -> dict:
    return _trial(cfg, index)[0]


def replay_trial(cfg: ExperimentConfig, index: int) -> tuple[dict, VerificationReport]:
    """Recompute trial ``index`` of ``cfg`` from scratch."""
    if not 0 <= index < cfg.trials:
        raise IndexError(f"trial {index} outside 0..{cfg.trials - 1}")
    return _trial(cfg, index)


def ratio_greater(a: Sequence[int], b: Sequence[int]) -> bool:
    """a[0]/a[1] > b[0]/b[1] by cross-multiplication (denominators > 0)."""
    return a[0] * b[1] > b[0] * a[1]


def _aggregate(trials: list[dict]) -> dict:
    counts: dict[str, dict[str, int]] = {}
    failures: dict[str, list[int]] = {}
    max_ratio = None
    for rec in trials:
        for name, c in rec["checks"].items():
            st = counts.setdefault(name, {})
            st[c["status"]] = st.get(c["status"], 0) + 1
            if c["status"] == "fail":
                failures.setdefault(name, []).append(rec["seed"])
            is_ratio = name.startswith("lemma1.") or name.startswith("ic.lemma1")
            if is_ratio and c["status"] in ("pass", "fail") and c["rhs"] > 0:
                cand = [c["lhs"], c["rhs"]]
                if max_ratio is None or ratio_greater(cand, max_ratio["pair"]):
                    max_ratio = {"pair": cand, "trial": rec["index"], "check": name, "scheme": rec["scheme"]}
    return {
        "trials": len(trials),
        "status_counts": {k: dict(sorted(v.items())) for k, v in sorted(counts.items())},
        "failures": {k: v for k, v in sorted(failures.items())},
        "findings": sum(len(v) for v in failures.values()),
        "max_ratio": max_ratio,
    }


@dataclass
class TrialLog:
    config: ExperimentConfig
    trials: list[dict]
    aggregates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "config": self.config.to_dict(), "aggregates": self.aggregates,
                "trials": self.trials}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed", "check", "holds", "lhs", "rhs", "status"])
        for rec in self.trials:
            for name, c in rec["checks"].items():
                w.writerow([rec["index"], rec["seed"], name, int(c["holds"]), c["lhs"], c["rhs"], c["status"]])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, d: dict) -> "TrialLog":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported log schema {d.get('schema')!r}")
        return cls(ExperimentConfig.from_dict(d["config"]), d["trials"], d.get("aggregates", {}))

    @classmethod
    def load(cls, path: str | Path) -> "TrialLog":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def write(self, path: str | Path, fmt: str | None = None) -> None:
        fmt = fmt or self.config.fmt
        Path(path).write_text(self.to_json() if fmt == "json" else self.to_csv())

    def count(self, name: str, status: str = "pass") -> int:
        return self.aggregates["status_counts"].get(name, {}).get(status, 0)


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("DOFLAB_THREADS", "1")))
    except ValueError:
        return 1


def _run_range(args):
    cfg, lo, hi = args
    return [run_trial(cfg, i) for i in range(lo, hi)]


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> TrialLog:
    """Run every trial of ``cfg``; failures are recorded, never raised."""
    workers = workers or _worker_count()
    if workers == 1 or cfg.trials < 2 * workers:
        trials = [run_trial(cfg, i) for i in range(cfg.trials)]
    else:
        step = -(-cfg.trials // (4 * workers))
        chunks = [(cfg, lo, min(lo + step, cfg.trials)) for lo in range(0, cfg.trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            trials = [rec for part in ex.map(_run_range, chunks) for rec in part]
    log = TrialLog(cfg, trials, _aggregate(trials))
    if cfg.output:
        log.write(cfg.output)
    return log
