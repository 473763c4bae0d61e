"""
Command-line front end.

Every subcommand writes one JSON document (or CSV with ``--format csv``) to
stdout and nothing else; ``--pretty`` adds a human summary on stderr.

Exit codes: 0 all checks hold (or failed only as whitelisted negative
controls / informative statuses), 1 some check has status ``fail``, 2 usage or
contract error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import SCHEMA, ExperimentConfig, TrialLog, replay_trial, run_experiment
from .ic3 import PreconditionError
from .ratmat import DimensionError
from .scheme import SchemeContractError, resolve_scheme
from .verify import X_CHECK_GROUPS

EXIT_OK, EXIT_FINDING, EXIT_USAGE = 0, 1, 2

VERIFY_GROUPS = ("causality", "decodability", "lemma1", "lemma5", "converse")
SEARCH_GROUPS = ("causality", "decodability", "lemma1", "lemma5", "converse", "lemma6")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="also write the full log to PATH")
    common.add_argument("--pretty", action="store_true", help="human-readable summary on stderr")

    p = argparse.ArgumentParser(prog="doflab", description="Exact rank audits for delayed-CSIT linear schemes.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demo", parents=[common], help="run the built-in 6/5 scheme on one realization")
    d.add_argument("scheme", choices=("gmk",))
    d.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("verify", parents=[common], help="decodability, rank ratio, Lemma-5 and converse checks")
    v.add_argument("--scheme", required=True, help="built-in name or static-scheme JSON file")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n", type=int)

    r = sub.add_parser("ratio", parents=[common], help="maximum observed rank-ratio pair")
    r.add_argument("--scheme", required=True)
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--n", type=int)

    s = sub.add_parser("search", parents=[common], help="stress the lemmas on random delayed schemes")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--complexity", type=int, action="append",
                   help="monomial degree (repeatable; default 0, 1 and 2)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int)

    i = sub.add_parser("ic3", parents=[common], help="three-user IC decodability and 9/7 audit")
    i.add_argument("--scheme", choices=("ic-random", "ic-tdma"), default="ic-random")
    i.add_argument("--trials", type=int, default=100)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--n", type=int)
    i.add_argument("--m", type=int)

    rp = sub.add_parser("replay", parents=[common], help="recompute one trial of a saved log")
    rp.add_argument("--log", required=True)
    rp.add_argument("--trial", type=int, required=True)
    return p


def _config(args) -> ExperimentConfig:
    if args.command == "demo":
        return ExperimentConfig(scheme=args.scheme, trials=1, base_seed=args.seed, checks=X_CHECK_GROUPS)
    if args.command == "verify":
        # resolve eagerly so a bad name or n is a usage error, not a crash mid-run
        resolve_scheme(args.scheme, args.n)
        return ExperimentConfig(scheme=args.scheme, trials=1, base_seed=args.seed, n=args.n, checks=VERIFY_GROUPS)
    if args.command == "ratio":
        if args.scheme not in ("random", "ic-random", "ic-tdma"):
            resolve_scheme(args.scheme, args.n)
        return ExperimentConfig(scheme=args.scheme, trials=args.trials, base_seed=args.seed, n=args.n,
                                checks=("causality", "lemma1"))
    if args.command == "search":
        cx = tuple(args.complexity) if args.complexity else (0, 1, 2)
        if any(c < 0 for c in cx):
            raise UsageError("complexity must be >= 0")
        return ExperimentConfig(scheme="random", trials=args.trials, base_seed=args.seed, n=args.n,
                                complexities=cx, checks=SEARCH_GROUPS)
    if args.command == "ic3":
        if args.m is not None and args.m < 0:
            raise UsageError("m must be >= 0")
        return ExperimentConfig(scheme=args.scheme, trials=args.trials, base_seed=args.seed, n=args.n, m=args.m,
                                checks=("ic3",))
    raise UsageError(f"unknown command {args.command!r}")


def _has_finding(records) -> bool:
    return any(c["status"] == "fail" for rec in records for c in rec["checks"].values())


def _summary_lines(records, aggregates=None) -> list[str]:
    lines = []
    if len(records) == 1:
        rec = records[0]
        info = rec["info"]
        sizes = info.get("sizes", {})
        lines.append(f"scheme {rec['scheme']}  n={info.get('n')}  sizes="
                     f"({','.join(str(m) for _, m in sorted(sizes.items()))})"
                     + (f"  sum-DoF {info['sum_dof']}" if "sum_dof" in info else ""))
        lines.append(f"realization {rec['realization_hash']}  seed {rec['seed']}")
        for name, c in rec["checks"].items():
            label = {"pass": "PASS", "fail": "FAIL"}.get(c["status"], c["status"])
            lines.append(f"  {name:<22} {label:<20} lhs={c['lhs']} rhs={c['rhs']}")
    if aggregates:
        lines.append(f"trials {aggregates['trials']}  findings {aggregates['findings']}")
        mr = aggregates.get("max_ratio")
        if mr:
            lines.append(f"max ratio {mr['pair'][0]}/{mr['pair'][1]} ({mr['check']}, trial {mr['trial']}, {mr['scheme']})")
        for name, counts in aggregates["status_counts"].items():
            lines.append(f"  {name:<22} " + " ".join(f"{k}={v}" for k, v in counts.items()))
    return lines


def _emit(text: str, out) -> None:
    out.write(text if text.endswith("\n") else text + "\n")


def _run_log(args, stdout, stderr) -> int:
    cfg = _config(args)
    log = run_experiment(cfg)
    if args.out:
        log.write(args.out, args.fmt)
    _emit(log.to_json() if args.fmt == "json" else log.to_csv(), stdout)
    if args.pretty:
        for line in _summary_lines(log.trials, log.aggregates):
            print(line, file=stderr)
    return EXIT_FINDING if _has_finding(log.trials) else EXIT_OK


def _replay(args, stdout, stderr) -> int:
    try:
        log = TrialLog.load(args.log)
    except json.JSONDecodeError as e:
        raise UsageError(f"{args.log}: not a JSON log ({e})") from None
    record, _ = replay_trial(log.config, args.trial)
    logged = next((t for t in log.trials if t["index"] == args.trial), None)
    matches = logged is not None and json.dumps(logged, sort_keys=True) == json.dumps(record, sort_keys=True)
    if args.fmt == "json":
        doc = {"schema": SCHEMA, "replay": {"log": str(args.log), "trial": args.trial, "matches": matches},
               "config": log.config.to_dict(), "trial": record}
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    else:
        text = TrialLog(log.config, [record]).to_csv()
    if args.out:
        Path(args.out).write_text(text + ("\n" if args.fmt == "json" else ""))
    _emit(text, stdout)
    if args.pretty:
        for line in _summary_lines([record]):
            print(line, file=stderr)
        print(f"matches logged record: {matches}", file=stderr)
    if not matches or _has_finding([record]):
        return EXIT_FINDING
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        if args.command == "replay":
            return _replay(args, stdout, stderr)
        return _run_log(args, stdout, stderr)
    except (UsageError, SchemeContractError, PreconditionError, DimensionError,
            ValueError, IndexError, KeyError, OSError) as e:
        print(f"doflab: error: {e}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
