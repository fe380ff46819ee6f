"""Command-line front end: ``curve``, ``verify``, ``eval`` and ``scan``.

Exit codes: 0 success, 1 failed verification, 2 bad flags, 3 malformed
scenario file, 4 scenario violating an operation invariant.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmat
from .bloch_bures import BETA_POINTS, beta_scan_table
from .channels import KrausOperation, Povm, SchemaError, efficient_from_povm, from_json, induced_povm
from .errors import TradeoffError
from .measures import Method, bures_fidelity, estimation_fidelity, operation_fidelity, shannon_gain
from .suites import SUITES, run_suite
from .tradeoff import Pairing, check_all_bounds, composite_curve

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SCHEMA, EXIT_INVARIANT = 0, 1, 2, 3, 4
MAX_SEED = 2**64 - 1


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    samples: int = 10**6
    n: int = 512
    trials: int = 1000
    workers: int = 1
    out: str | None = None
    pair: str = "HF"
    tol: float | None = None

    def __post_init__(self):
        if not (0 <= self.seed <= MAX_SEED):
            raise UsageError("--seed must be an unsigned 64-bit integer")
        for name in ("samples", "n", "trials", "workers"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name} must be positive")
        if self.tol is not None and not (self.tol > 0):
            raise UsageError("--tol must be positive")


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_curve(cfg: RunConfig) -> int:
    curve = composite_curve(cfg.pair, cfg.n)
    lines = ["disturbance,info_bound,envelope,x"]
    lines += [",".join(_fmt(v) for v in row) for row in curve.rows()]
    _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    report = run_suite(suite, cfg.seed, cfg.trials, cfg.workers, cfg.tol)
    _write(json.dumps(report, indent=2) + "\n", cfg.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _measure(fn, *args, **kw) -> dict:
    v = fn(*args, **kw)
    return {"value": float(v.value), "method": v.method.value, "std_error": float(v.mc_std_error)}


def evaluate(obj: KrausOperation | Povm, cfg: RunConfig) -> dict:
    """All four measures and, for qubits, the margins of every pairing."""
    op = efficient_from_povm(obj) if isinstance(obj, Povm) else obj
    povm = induced_povm(op)
    d = op.dim
    mc = {"seed": cfg.seed, "n_samples": cfg.samples, "workers": cfg.workers}
    psd = all(qmat.is_psd(a) for a in op.matrices())
    if d == 2:
        h_method, h_kw = Method.CLOSED_FORM, {}
        b_method, b_kw = (Method.CLOSED_FORM if psd else Method.QUADRATURE), {}
    elif d == 3:
        h_method, h_kw = Method.QUADRATURE, {}
        b_method, b_kw = (Method.QUADRATURE, {}) if psd else (Method.MONTE_CARLO, mc)
    else:
        h_method, h_kw = Method.MONTE_CARLO, mc
        b_method, b_kw = Method.MONTE_CARLO, mc
    report = {
        "dim": d,
        "kind": "povm" if isinstance(obj, Povm) else "kraus",
        "H": _measure(shannon_gain, povm, h_method, **h_kw),
        "F": _measure(operation_fidelity, op, Method.CLOSED_FORM),
        "G": _measure(estimation_fidelity, povm, Method.CLOSED_FORM),
        "B": _measure(bures_fidelity, op, b_method, **b_kw),
    }
    if d == 2:
        report["margins"] = {k: float(r.margin) for k, r in check_all_bounds(op).items()}
    else:
        report["margins"] = None
    return report


def cmd_eval(cfg: RunConfig, scenario: str) -> int:
    try:
        with open(scenario) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        obj = from_json(text)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except TradeoffError as exc:
        print(f"error: invalid operation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    _write(json.dumps(evaluate(obj, cfg), indent=2) + "\n", cfg.out)
    return EXIT_OK


def cmd_scan(cfg: RunConfig, x_points: int, beta_points: int) -> int:
    if x_points < 1 or beta_points < 2:
        raise UsageError("--x-points must be >= 1 and --beta-points >= 2")
    rows = beta_scan_table(np.linspace(0.0, 1.0, x_points), np.linspace(0.0, np.pi, beta_points))
    lines = ["x,beta,integral"] + [",".join(_fmt(v) for v in r) for r in rows]
    _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtradeoff", description="Information-disturbance trade-off curves and checks."
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", parents=[common], help="sample a trade-off curve as CSV")
    p.add_argument("--pair", choices=[q.value for q in Pairing], default="HF")
    p.add_argument("--n", type=int, default=512)

    p = sub.add_parser("verify", parents=[common], help="run a randomized verification suite")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--tol", type=float, default=None, help="override every check tolerance")

    p = sub.add_parser("eval", parents=[common], help="evaluate a JSON scenario file")
    p.add_argument("scenario")
    p.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples for d >= 4")

    p = sub.add_parser("scan", parents=[common], help="tabulate the Bloch-picture beta integral")
    p.add_argument("--x-points", type=int, default=64)
    p.add_argument("--beta-points", type=int, default=BETA_POINTS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    fields = {k: getattr(args, k) for k in RunConfig.__dataclass_fields__ if hasattr(args, k)}
    try:
        cfg = RunConfig(**fields)
        if args.command == "curve":
            return cmd_curve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        if args.command == "eval":
            return cmd_eval(cfg, args.scenario)
        return cmd_scan(cfg, args.x_points, args.beta_points)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
