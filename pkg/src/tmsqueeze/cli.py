"""Command-line front end: scenario runs, sweeps, spectra, solver comparisons.

Subcommands:
    run                 evaluate a scenario config (single point or sweep)
    sweep-asymmetry     sweep the drive asymmetry G+/G-
    sweep-cooperativity optimized two-mode squeezing against C-
    spectrum            emit the cavity output spectrum as CSV
    floquet-compare     paired rotating-wave / Floquet / time-domain rows
    validate            print regime warnings for a config and exit

Exit codes: 0 success, 1 configuration error, 2 solver failure in all rows.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, TmsqueezeError
from .floquet import sweep_cooperativity_floquet
from .scenario import (
    METRIC_COLUMNS,
    ScenarioConfig,
    build_model,
    load_config,
    metrics_from_covariance,
    regime_warnings,
    rows_to_csv,
    run_scenario,
    scenario_from_dict,
    steady_covariance,
    ResultRow,
)
from .spectrum import default_grid, output_spectrum


def _write_out(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _add_common(parser):
    parser.add_argument("--config", required=True, help="scenario config file")
    parser.add_argument("--out", default=None, help="output CSV path (default stdout)")
    parser.add_argument("--jobs", type=int, default=None,
                        help="sweep worker count (default: available parallelism)")
    parser.add_argument("--solver", default=None,
                        help="override the solver named in the config")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the solver tolerance")


def _load(args, force_solver=None):
    config = load_config(args.config)
    if force_solver is not None:
        config.solver = force_solver
    if args.solver is not None:
        config.solver = args.solver
    if args.tol is not None:
        config.tol = args.tol
    if args.jobs is not None:
        config.jobs = args.jobs
    if args.out is not None:
        config.output_path = args.out
    return config


def _emit_rows(config, rows, extra=()):
    text = rows_to_csv(config, rows, extra_provenance=extra)
    _write_out(text, config.output_path)
    if rows and all(r.status != "ok" for r in rows):
        return 2
    return 0


def _cmd_run(args):
    config = _load(args)
    return _emit_rows(config, run_scenario(config))


def _cmd_sweep_asymmetry(args):
    config = _load(args)
    if config.sweep is None:
        config.sweep = ("G_plus_over_G_minus", args.start, args.stop, args.points)
    return _emit_rows(config, run_scenario(config))


def _cmd_sweep_cooperativity(args):
    config = _load(args)
    params = config.params
    C_values = np.geomspace(args.start, args.stop, args.points)
    rows = sweep_cooperativity_floquet(
        C_values,
        nbar=params.get("nbar", 0.0),
        gamma_over_kappa=params.get("gamma_over_kappa", 4e-5),
        Omega_over_kappa=params.get("Omega_over_kappa", 0.1),
        omega_m_over_kappa=params.get("omega_m_over_kappa"),
        asym_tol=args.asym_tol)
    lines = [f"# tmsqueeze {__version__}", "# optimized two-mode squeezing sweep"]
    for key in sorted(params):
        lines.append(f"# {key}: {params[key]}")
    lines.append("C_minus,best_asymmetry,duan_min,tms_db")
    for C, x, duan, db in rows:
        lines.append(f"{C:.12g},{x:.12g},{duan:.12g},{db:.12g}")
    _write_out("\n".join(lines) + "\n", config.output_path)
    return 0


def _cmd_spectrum(args):
    config = _load(args)
    model = build_model(config)
    grid = default_grid(model, n=args.points)
    trace = output_spectrum(model, grid)
    lines = [f"# tmsqueeze {__version__}", "# cavity output spectrum"]
    for key in sorted(config.params):
        lines.append(f"# {key}: {config.params[key]}")
    lines.append("omega_over_kappa,S_times_kappa")
    for w, s in zip(trace.omega_grid, trace.values):
        lines.append(f"{w:.12g},{s:.12g}")
    _write_out("\n".join(lines) + "\n", config.output_path)
    return 0


def _cmd_floquet_compare(args):
    config = _load(args)
    rows = []
    for solver in ("lyapunov_rwa", "floquet", "ode_oracle"):
        sub = ScenarioConfig(
            params=config.params, is_physical=config.is_physical, solver=solver,
            tol=config.tol, jobs=1, sweep=None, outputs=config.outputs)
        try:
            model = build_model(sub)
            V = steady_covariance(model, solver, sub.tol)
            rows.append(ResultRow(sweep_value=None,
                                  metrics=metrics_from_covariance(V, model),
                                  solver=solver))
        except TmsqueezeError as exc:
            rows.append(ResultRow(sweep_value=None, metrics={}, solver=solver,
                                  status=f"error:{type(exc).__name__}"))
    return _emit_rows(config, rows, extra=("paired solver comparison",))


def _cmd_validate(args):
    config = _load(args)
    messages = regime_warnings(config)
    if not messages:
        print("no regime warnings")
    for message in messages:
        print(f"warning: {message}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tmsqueeze",
        description="Steady-state two-mode squeezing of a driven three-mode system")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate a scenario config")
    _add_common(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep-asymmetry", help="sweep the drive asymmetry")
    _add_common(p)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=0.99)
    p.add_argument("--points", type=int, default=50)
    p.set_defaults(fn=_cmd_sweep_asymmetry)

    p = sub.add_parser("sweep-cooperativity",
                       help="optimized squeezing against cooperativity")
    _add_common(p)
    p.add_argument("--start", type=float, default=1e2)
    p.add_argument("--stop", type=float, default=1e4)
    p.add_argument("--points", type=int, default=7)
    p.add_argument("--asym-tol", type=float, default=1e-3)
    p.set_defaults(fn=_cmd_sweep_cooperativity)

    p = sub.add_parser("spectrum", help="emit the cavity output spectrum")
    _add_common(p)
    p.add_argument("--points", type=int, default=2001)
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("floquet-compare",
                       help="paired rotating-wave / Floquet / time-domain rows")
    _add_common(p)
    p.set_defaults(fn=_cmd_floquet_compare)

    p = sub.add_parser("validate", help="print regime warnings")
    _add_common(p)
    p.set_defaults(fn=_cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except TmsqueezeError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
