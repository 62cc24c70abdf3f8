"""Command-line interface: seeded protocol runs, cheat experiments, bound
derivations and bias tables, with JSON/CSV/human output.

Exit codes: 0 ok, 1 usage error, 2 self-check failure, 3 optimizer
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import analysis
from .adversaries import (
    HONEST_ASSIGNMENT,
    AliceCheatStrategy,
    BobCheatStrategy,
    alice_control,
    bob_gain,
    honest_alice_as_cheat,
    optimal_alice_ghz,
    optimal_bob_ghz,
)
from .behaviors import BehaviorTable, NoiseModel, apply_noise, from_quantum
from .errors import ContractError, OptimizerError
from .protocol import HonestCommitter, HonestReceiver, derive_rng, run_bc
from .quantum import ghz_state

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2
EXIT_NO_CONVERGENCE = 3

STRATEGY_REGISTRY = {
    "alice": {
        "ghz-optimal": (optimal_alice_ghz, alice_control, analysis.mc_alice_control),
        "honest-as-cheat": (honest_alice_as_cheat, alice_control, analysis.mc_alice_control),
    },
    "bob": {
        "ghz-optimal": (optimal_bob_ghz, bob_gain, analysis.mc_bob_gain),
    },
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for check failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def honest_ghz_table(noise: float = 0.0):
    table = from_quantum(ghz_state(), [HONEST_ASSIGNMENT] * 3)
    if noise > 0.0:
        table = apply_noise(table, NoiseModel(noise))
    return table


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dibc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, trials_default=100_000):
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "csv", "human"), default="human")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("bc-run", help="honest bit-commitment runs over GHZ boxes")
    common(p)
    p.add_argument("--noise", type=float, default=0.0, help="per-box output flip probability")
    p.add_argument("--table", default=None, help="run on a behavior table imported from JSON")
    p.add_argument("--export-table", default=None, help="write the table that was run to JSON")

    p = sub.add_parser("cheat", help="evaluate a cheating strategy, exact vs Monte Carlo")
    p.add_argument("party", choices=("alice", "bob"))
    p.add_argument("strategy", nargs="?", default="ghz-optimal")
    p.add_argument("--strategy-file", default=None, help="load a strategy descriptor from JSON")
    common(p)

    p = sub.add_parser("bounds", help="derive security bounds and self-verify them")
    p.add_argument(
        "--which", choices=("classical-ghz", "chsh", "ns-gain", "pr", "all"), default="all"
    )
    p.add_argument("--tolerance", type=float, default=1e-6, help="optimizer target tolerance")
    p.add_argument("--seed", type=int, default=20260810)
    p.add_argument("--format", choices=("json", "csv", "human"), default="human")
    p.add_argument("--out", default=None)

    p = sub.add_parser("coinflip", help="honest coin-flip runs over GHZ boxes")
    common(p)
    p.add_argument("--noise", type=float, default=0.0)

    p = sub.add_parser("bias-table", help="iterated coin-flip cheating bounds per repetition count")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--format", choices=("json", "csv", "human"), default="human")
    p.add_argument("--out", default=None)

    return parser


def _config_dict(args) -> dict:
    skip = {"command", "out", "party", "strategy", "which"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _check(name: str, expected: float, got: float, tol: float) -> dict:
    return {
        "name": name,
        "expected": expected,
        "got": got,
        "pass": bool(abs(got - expected) <= tol),
    }


def _load_table(path: str) -> BehaviorTable:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        return BehaviorTable.from_json_dict(data, require_no_signaling=True)
    except ContractError as exc:
        raise _UsageError(str(exc)) from exc


def cmd_bc_run(args) -> tuple[dict, list[dict]]:
    if not 0.0 <= args.noise <= 0.5:
        raise _UsageError("--noise must lie in [0, 1/2]")
    if args.table is not None:
        table = _load_table(args.table)
        if table.party_count != 3:
            raise _UsageError("the protocol needs a 3-party behavior table")
        if args.noise > 0.0:
            table = apply_noise(table, NoiseModel(args.noise))
    else:
        table = honest_ghz_table(args.noise)
    if args.export_table is not None:
        with open(args.export_table, "w", encoding="utf-8") as fh:
            json.dump(table.to_json_dict(), fh, indent=2, sort_keys=True)
    est = analysis.mc_honest_accept(table, args.trials, args.seed)
    sample = run_bc(
        HonestCommitter(), HonestReceiver(), table, bit=0, rng=derive_rng(args.seed, 1)
    )
    results = [
        {"name": "accept-rate", **est.to_json_dict()},
        {"name": "transcript-sample", **sample.to_json_dict(seed=args.seed)},
    ]
    checks = []
    if args.noise == 0.0 and args.table is None:
        checks.append(_check("noiseless-never-aborts", 1.0, est.value, 0.0))
    return {"results": results}, checks


def cmd_cheat(args) -> tuple[dict, list[dict]]:
    registry = STRATEGY_REGISTRY[args.party]
    if args.strategy_file is not None:
        cls = AliceCheatStrategy if args.party == "alice" else BobCheatStrategy
        with open(args.strategy_file, encoding="utf-8") as fh:
            strategy = cls.from_json_dict(json.load(fh))
        exact_eval = alice_control if args.party == "alice" else bob_gain
        mc_eval = (
            analysis.mc_alice_control if args.party == "alice" else analysis.mc_bob_gain
        )
    elif args.strategy in registry:
        build, exact_eval, mc_eval = registry[args.strategy]
        strategy = build()
    else:
        known = ", ".join(sorted(registry))
        raise _UsageError(f"unknown {args.party} strategy {args.strategy!r}; known: {known}")
    exact = exact_eval(strategy)
    est = mc_eval(strategy, args.trials, args.seed)
    results = [
        {"name": "exact", "value": exact},
        {"name": "monte-carlo", **est.to_json_dict()},
    ]
    band = 3.0 * math.sqrt(exact * (1.0 - exact) / args.trials)
    checks = [_check("monte-carlo-within-3-sigma", exact, est.value, band)]
    return {"results": results}, checks


def cmd_bounds(args) -> tuple[dict, list[dict]]:
    vertex_set = analysis.ns_vertices()
    jobs = {
        "classical-ghz": lambda: (
            analysis.classical_ghz_bound(),
            analysis.CLASSICAL_GHZ_WIN,
            1e-15,
        ),
        "chsh": lambda: (
            analysis.alice_control_bound(
                analysis.OptimizerConfig(seed=args.seed, tolerance=args.tolerance)
            ),
            analysis.CHSH_QUANTUM_WIN,
            args.tolerance,
        ),
        "ns-gain": lambda: (
            analysis.bob_gain_bound(vertex_set),
            analysis.NO_SIGNALING_GAIN,
            1e-15,
        ),
        "pr": lambda: (analysis.pr_control(vertex_set), 1.0, 1e-15),
    }
    which = list(jobs) if args.which == "all" else [args.which]
    reports, checks = [], []
    for name in which:
        report, expected, tol = jobs[name]()
        reports.append(report)
        checks.append(_check(name, expected, report.value, tol))
    return {"results": [r.to_json_dict() for r in reports], "_reports": reports}, checks


def cmd_coinflip(args) -> tuple[dict, list[dict]]:
    if not 0.0 <= args.noise <= 0.5:
        raise _UsageError("--noise must lie in [0, 1/2]")
    table = honest_ghz_table(args.noise)
    stats = analysis.mc_coinflip(table, args.trials, args.seed)
    results = [{"name": "coinflip", **stats.to_json_dict()}]
    checks = []
    if args.noise == 0.0:
        checks.append(_check("noiseless-never-aborts", 0.0, stats.abort_rate, 0.0))
    return {"results": results}, checks


def cmd_bias_table(args) -> tuple[dict, list[dict]]:
    if args.reps < 1:
        raise _UsageError("--reps must be at least 1")
    rows = [
        {
            "n": k + 1,
            "alice_bound": c_k,
            "bob_bound": r_k,
            "max_bias": max(c_k, r_k) - 0.5,
        }
        for k, (c_k, r_k) in enumerate(analysis.iterated_bias_sequence(args.reps))
    ]
    return {"results": rows}, []


class _UsageError(Exception):
    pass


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        clean = {k: v for k, v in report.items() if not k.startswith("_")}
        return json.dumps(clean, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _render_csv(report)
    return _render_human(report)


def _render_csv(report: dict) -> str:
    reports = report.get("_reports")
    if reports is not None:
        return analysis.reports_to_csv(reports)
    rows = report["results"]
    keys = sorted({k for row in rows for k in row})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _render_human(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    for row in report["results"]:
        label = row.get("name") or row.get("quantity") or f"n={row.get('n', '?')}"
        parts = ", ".join(f"{k}={v}" for k, v in row.items() if k not in ("name",))
        lines.append(f"  {label}: {parts}")
    for chk in report["checks"]:
        status = "ok" if chk["pass"] else "FAIL"
        lines.append(
            f"  check {chk['name']}: expected {chk['expected']}, got {chk['got']} [{status}]"
        )
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    handlers = {
        "bc-run": cmd_bc_run,
        "cheat": cmd_cheat,
        "bounds": cmd_bounds,
        "coinflip": cmd_coinflip,
        "bias-table": cmd_bias_table,
    }
    try:
        body, checks = handlers[args.command](args)
    except _UsageError as exc:
        print(f"dibc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OptimizerError as exc:
        print(f"dibc: optimizer did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    report = {
        "command": args.command,
        "config": _config_dict(args),
        "results": body["results"],
        "checks": checks,
    }
    if "_reports" in body:
        report["_reports"] = body["_reports"]
    text = _render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(c["pass"] for c in checks) else EXIT_CHECK_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
