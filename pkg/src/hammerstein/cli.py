"""
Command-line front end.

    hammerstein solve-2d          [--config C] [--out DIR] [--tolerance T] [--max-iter N]
    hammerstein pendulum          [--config C] [--out DIR] [--seed S] ...
    hammerstein validate-schedule [--config C] [--out DIR]
    hammerstein check-lemmas      [--config C] [--out DIR] [--seed S]

Every command writes CSV/JSON artifacts into ``--out``.  Exit codes: 0 on
success, 1 when a solve fails to converge or a p = 2 lemma check fails, 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import EXPERIMENT_F, EXPERIMENT_K, EXPERIMENT_STARTS
from .functionals import lemma_sweep
from .operators import MatrixOperator, MonotonicityWarning, monotonicity_report
from .pendulum import (
    PendulumProblem,
    assemble_hammerstein,
    default_solve_config,
    solve_pendulum,
)
from .schedules import InvalidScheduleError, make_schedule, validate_schedule
from .solver import DivergenceError, IterationTrace, SolveConfig, solve_hammerstein
from .spaces import ConjugatePair, GridVector, InvalidExponentError

log = logging.getLogger("hammerstein")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _fmt(x) -> str:
    return f"{x:.10g}"


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    return cfg


def _override(cfg, args):
    if args.tolerance is not None:
        cfg["tolerance"] = args.tolerance
    if args.max_iter is not None:
        cfg["max_iter"] = args.max_iter
    return cfg


def _trace_summary(trace: IterationTrace, tolerance) -> dict:
    du = trace.column("du_norm")
    below = np.flatnonzero(du < tolerance)
    peak = int(np.argmax(du)) if du.size else 0
    return {
        "converged": trace.converged,
        "iterations": trace.iterations,
        "peak_n": int(trace.steps[peak].n) if du.size else None,
        "peak_du_norm": float(du[peak]) if du.size else None,
        "first_n_du_below_tolerance": int(trace.steps[below[0]].n) if below.size else None,
        "final_u": trace.final_u.coords.tolist() if trace.final_u is not None else None,
        "final_v": trace.final_v.coords.tolist() if trace.final_v is not None else None,
    }


def run_solve_2d(args) -> int:
    cfg = _override(_load_config(args.config), args)
    try:
        F = MatrixOperator(cfg.get("F", EXPERIMENT_F))
        K = MatrixOperator(cfg.get("K", EXPERIMENT_K))
        starts = cfg.get("starts", EXPERIMENT_STARTS)
        pair = ConjugatePair(cfg.get("p", 2.0))
        schedule = make_schedule(cfg.get("schedule", {"kind": "paper_experiment"}))
        tol = float(cfg.get("tolerance", 1e-4))
        max_iter = int(cfg.get("max_iter", 1000))
        configs = [
            SolveConfig(pair, tol, max_iter, schedule, GridVector(u1), GridVector(v1))
            for u1, v1 in starts
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None

    traces, summary, status = [], {"starts": []}, EXIT_OK
    for (u1, v1), sc in zip(starts, configs):
        entry = {"u1": list(u1), "v1": list(v1)}
        try:
            trace = solve_hammerstein(F, K, sc)
        except DivergenceError as exc:
            trace = exc.trace
            entry["error"] = str(exc)
            status = EXIT_FAIL
        if not trace.converged:
            status = EXIT_FAIL
        entry.update(_trace_summary(trace, tol))
        summary["starts"].append(entry)
        traces.append(trace)
    summary.update(tolerance=tol, max_iter=max_iter, schedule=schedule.description)

    rows = max(t.iterations for t in traces)
    with open(args.out / "table1.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n"] + [f"du_norm_start{k + 1}" for k in range(len(traces))])
        for i in range(rows):
            w.writerow(
                [i + 1] + [_fmt(t.steps[i].du_norm) if i < t.iterations else "" for t in traces]
            )
    _write_json(args.out / "summary.json", summary)
    for k, entry in enumerate(summary["starts"]):
        print(
            f"start {k + 1}: converged={entry['converged']} iterations={entry['iterations']} "
            f"peak {entry['peak_du_norm']:.4e} at n={entry['peak_n']}"
        )
    return status


def run_pendulum(args) -> int:
    cfg = _override(_load_config(args.config), args)
    try:
        prob = PendulumProblem.from_dict(cfg)
        disc = assemble_hammerstein(prob)
        sc = default_solve_config(
            prob.grid_size,
            tolerance=float(cfg.get("tolerance", 1e-10)),
            max_iter=int(cfg.get("max_iter", 5000)),
            weights=disc.weights,
        )
        if "schedule" in cfg:
            sc.schedule = make_schedule(cfg["schedule"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None

    status = EXIT_OK
    report = {"problem": prob.to_dict(), "schedule": sc.schedule.description}
    try:
        sol = solve_pendulum(prob, sc)
        trace, amplitude = sol.trace, sol.amplitude
        report["ode_residual"] = sol.ode_residual
    except DivergenceError as exc:
        trace, amplitude = exc.trace, disc.amplitude(exc.trace.final_u)
        report["error"] = str(exc)
        report["ode_residual"] = None
        status = EXIT_FAIL
    if not trace.converged:
        status = EXIT_FAIL
    report.update(converged=trace.converged, iterations=trace.iterations)

    box = float(cfg.get("monotonicity_box", 0.5))
    pair = ConjugatePair(2.0)
    warns = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MonotonicityWarning)
        for name, op in (("F", disc.f_op), ("K", disc.k_op)):
            mr = monotonicity_report(
                op, pair, samples=int(cfg.get("samples", 2000)), seed=args.seed,
                box=(-box, box), weights=disc.weights,
            )
            report[f"eta_hat_{name}"] = mr.eta_hat
            if mr.warning:
                warns.append(f"{name}: {mr.warning}")
    report["monotonicity_box"] = [-box, box]
    report["warnings"] = warns

    with open(args.out / "amplitude.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "v"])
        for t, v in zip(disc.grid, amplitude.coords):
            w.writerow([_fmt(t), _fmt(v)])
    trace.to_csv(args.out / "trace.csv")
    _write_json(args.out / "report.json", report)
    for msg in warns:
        print(f"warning: {msg}", file=sys.stderr)
    print(f"converged={trace.converged} iterations={trace.iterations} ode_residual={report['ode_residual']}")
    return status


def run_validate_schedule(args) -> int:
    cfg = _load_config(args.config)
    try:
        schedule = make_schedule(cfg.get("schedule", {"kind": "paper_experiment"}))
        report = validate_schedule(schedule, int(cfg.get("horizon", 1000)))
    except (InvalidScheduleError, TypeError, ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None
    _write_json(args.out / "report.json", report.to_dict())
    for name, verdict in report.verdicts.items():
        print(f"{name:22s} {verdict.status:12s} {verdict.note}")
    return EXIT_OK


def run_check_lemmas(args) -> int:
    cfg = _load_config(args.config)
    try:
        samples = int(cfg.get("samples", 500))
        if samples < 1:
            raise InputError("samples must be positive")
        p_values = [float(p) for p in cfg.get("p_values", [2.0, 3.0])]
        pairs = [ConjugatePair(p) for p in p_values]
        dim = int(cfg.get("dim", 3))
    except (TypeError, ValueError, InvalidExponentError) as exc:
        raise InputError(str(exc)) from None

    status = EXIT_OK
    out = {"samples": samples, "seed": args.seed, "dim": dim, "results": {}}
    for pair in pairs:
        res = lemma_sweep(pair, samples, args.seed, dim)
        asserted = pair.is_hilbert
        ok = all(r["passed"] == r["samples"] for r in res.values())
        if asserted and not ok:
            status = EXIT_FAIL
        out["results"][f"p={pair.p:g}"] = {"asserted": asserted, "all_passed": ok, "checks": res}
        for name, r in res.items():
            tag = "assert" if asserted else "report"
            print(f"p={pair.p:g} {name:12s} {r['passed']}/{r['samples']} [{tag}]")
    _write_json(args.out / "report.json", out)
    return status


COMMANDS = {
    "solve-2d": run_solve_2d,
    "pendulum": run_pendulum,
    "validate-schedule": run_validate_schedule,
    "check-lemmas": run_check_lemmas,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hammerstein", description="Regularized iteration for u + KFu = 0."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, default=None, help="JSON config file")
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tolerance", type=float, default=None)
        sp.add_argument("--max-iter", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
