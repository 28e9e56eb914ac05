"""Command line interface.

Subcommands::

    simulate      run a configured simulation, write field snapshots
    bounds-table  a-priori step bounds plus the empirical critical step
    convergence   error ladder for one stepper against a refined reference
    cubature-test disk-cubature accuracy against a closed-form integral
    check         structural property audit (tableaus, random states, full run)

Every subcommand reads an :class:`~sirfield.experiments.ExperimentConfig`
JSON file via ``--config`` (defaults apply when omitted) and writes its
outputs under ``--out``.  Exit codes: 0 on success, 1 on usage or
configuration errors, 2 when a property audit failed and aborted a run.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .experiments import (
    ExperimentConfig,
    bounds_table,
    convergence_table,
    cubature_error_study,
    run_simulation,
    write_bounds_csv,
    write_convergence_csv,
    write_cubature_csv,
)
from .interpolation import write_field_csv
from .model import State, TransmissionOperator
from .properties import check_step, write_report_csv
from .stepping import (
    euler_step,
    integral_step,
    method_registry,
    ssp_rk_step,
    step_bounds,
)

USAGE_ERROR = 1
VIOLATION_ERROR = 2


def _load_config(args):
    if getattr(args, "config", None):
        config = ExperimentConfig.from_json_file(args.config)
    else:
        config = ExperimentConfig()
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    return config


def _outdir(args):
    out = getattr(args, "out", None) or "out"
    os.makedirs(out, exist_ok=True)
    return out


def _write_state(state, out, tag=None):
    label = f"{state.t:g}" if tag is None else tag
    for name, field in (("S", state.s), ("I", state.i), ("R", state.r)):
        write_field_csv(field, os.path.join(out, f"{name}_{label}.csv"))


def _cmd_simulate(args):
    config = _load_config(args)
    out = _outdir(args)
    result = run_simulation(config, check=args.audit, abort_on_violation=args.audit)
    for t, snap in sorted((result.snapshots or {}).items()):
        _write_state(snap, out)
    _write_state(result.state, out)
    if result.reports is not None:
        write_report_csv(os.path.join(out, "report.csv"), result.reports)
    print(f"steps={result.steps} t={result.state.t:g} aborted={result.aborted}")
    if result.aborted:
        report = result.reports[-1]
        print(
            f"property violation at step {report.step_index}: "
            f"worst_negative={report.worst_negative:.3e} location={report.location}"
        )
        return VIOLATION_ERROR
    return 0


def _cmd_bounds_table(args):
    config = _load_config(args)
    out = _outdir(args)
    values = [float(v) for v in args.values.split(",")] if args.values else None
    if values is None:
        values = [50.0, 100.0, 150.0, 200.0] if args.parameter == "a" else [0.05, 0.075, 0.1, 0.25, 0.5]
    rows = bounds_table(config, args.parameter, values, empirical=not args.no_empirical)
    path = os.path.join(out, "bounds.csv")
    write_bounds_csv(path, args.parameter, rows)
    print(f"{args.parameter:>10} {'tau_pess':>12} {'tau_improved':>14} {'tau_empirical':>14}")
    for row in rows:
        print(
            f"{row.value:>10g} {row.tau_pessimistic:>12.4f} "
            f"{row.tau_improved:>14.4f} {row.tau_empirical:>14.4f}"
        )
    print(f"wrote {path}")
    return 0


def _cmd_convergence(args):
    config = _load_config(args)
    out = _outdir(args)
    taus = [float(v) for v in args.taus.split(",")]
    stepper = args.stepper or config.stepper
    rows = convergence_table(config, taus, stepper=stepper, p=args.norm)
    path = os.path.join(out, f"convergence_{stepper}.csv")
    write_convergence_csv(path, rows)
    print(f"{'tau':>12} {'error':>14} {'order':>8}")
    for row in rows:
        print(f"{row.tau:>12.6g} {row.error:>14.6e} {row.order:>8.3f}")
    print(f"wrote {path}")
    return 0


def _cmd_cubature_test(args):
    out = _outdir(args)
    kwargs = {}
    if args.product_n:
        kwargs["product_n"] = [int(v) for v in args.product_n.split(",")]
    if args.polar_deltas:
        kwargs["polar_deltas"] = [float(v) for v in args.polar_deltas.split(",")]
    rows = cubature_error_study(**kwargs)
    path = os.path.join(out, "cubature.csv")
    write_cubature_csv(path, rows)
    print(f"{'kind':>8} {'n':>4} {'delta':>8} {'error':>14}")
    for row in rows:
        print(f"{row.kind:>8} {row.n_radial:>4} {row.delta:>8g} {row.error:>14.6e}")
    print(f"wrote {path}")
    return 0


def _random_states(config, rng, count):
    grid = config.grid()
    shape = (grid.p1, grid.p2)
    for _ in range(count):
        scale = float(rng.uniform(0.5, 40.0))
        fields = [scale * rng.random(shape) for _ in range(3)]
        yield State(
            s=_field(grid, fields[0]), i=_field(grid, fields[1]), r=_field(grid, fields[2])
        )


def _field(grid, values):
    from .interpolation import Field

    return Field(grid, values)


def _cmd_check(args):
    config = _load_config(args)
    rng = np.random.default_rng(config.seed)
    failures = 0

    for name, rk in method_registry().items():
        rk.validate()
        worst = max(rk.order_condition_residuals().values())
        ok = worst <= 1e-12
        failures += not ok
        print(f"tableau {name}: max order-condition residual {worst:.2e} {'ok' if ok else 'FAIL'}")

    params = config.params()
    kernel = config.kernel()
    rule = config.rule()
    grid = config.grid()
    op = TransmissionOperator(grid, rule, kernel, params, config.interp())
    worst_drift = 0.0
    for state in _random_states(config, rng, args.states):
        bounds = step_bounds(state, kernel, rule, params, config.interp())
        candidates = [
            euler_step(state, op, params, bounds.improved),
            integral_step(state, op, params, min(bounds.improved, 1.0 / params.b if params.b else math.inf)),
        ]
        for rk in method_registry().values():
            candidates.append(
                ssp_rk_step(state, op, params, rk.ssp_coefficient * bounds.improved, rk)
            )
        for new in candidates:
            report = check_step(state, new)
            worst_drift = max(worst_drift, report.conservation_drift)
            if not report.d2:
                failures += 1
    ok = worst_drift <= 1e-12
    print(f"random-state conservation: worst drift {worst_drift:.2e} {'ok' if ok else 'FAIL'}")

    result = run_simulation(config, check=True, abort_on_violation=True)
    if result.aborted:
        report = result.reports[-1]
        print(
            f"configured run: property violation at step {report.step_index}, "
            f"worst_negative={report.worst_negative:.3e}"
        )
        return VIOLATION_ERROR
    drift = max((r.conservation_drift for r in result.reports), default=0.0)
    print(f"configured run: {result.steps} steps, all audits passed, max drift {drift:.2e}")
    return VIOLATION_ERROR if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sirfield",
        description="Structure-preserving solver for a spatially nonlocal SIR system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--out", help="output directory (default ./out)")
        p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("simulate", help="run one simulation and write snapshots")
    common(p)
    p.add_argument("--audit", action="store_true", help="audit every step and abort on violation")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bounds-table", help="step-size bound table over a parameter sweep")
    common(p)
    p.add_argument("--parameter", choices=("a", "delta"), default="a")
    p.add_argument("--values", help="comma-separated sweep values")
    p.add_argument("--no-empirical", action="store_true", help="skip the bisection column")
    p.set_defaults(func=_cmd_bounds_table)

    p = sub.add_parser("convergence", help="halving-ladder convergence study")
    common(p)
    p.add_argument("--taus", required=True, help="comma-separated halving step sizes")
    p.add_argument("--stepper", help="override the config stepper")
    p.add_argument("--norm", type=int, default=1, choices=(1, 2))
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("cubature-test", help="cubature accuracy study")
    common(p)
    p.add_argument("--product-n", help="comma-separated product-rule node counts")
    p.add_argument("--polar-deltas", help="comma-separated polar-rule radii")
    p.set_defaults(func=_cmd_cubature_test)

    p = sub.add_parser("check", help="structural property audit")
    common(p)
    p.add_argument("--states", type=int, default=20, help="random states per audit")
    p.set_defaults(func=_cmd_check)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else USAGE_ERROR
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
