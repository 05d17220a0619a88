"""Scenario configuration, solver dispatch, and CSV emission.

A scenario names either a physical setup (frequencies, rates, drive
amplitudes) or a direct effective parameterization (asymmetry, cooperativity,
ratios), picks a solver, and optionally sweeps one parameter.  Output rows
carry the standard metric columns in a deterministic CSV (12 significant
digits, provenance comment lines, no timestamps) so repeated runs are
byte-identical.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import io
import json
import os

import numpy as np

from . import __version__
from .adiabatic import collective_moments, covariance_from_moments
from .errors import ConfigError, TmsqueezeError
from .floquet import dc_covariance_by_ode, solve_floquet
from .gaussian import (
    bogoliubov_occupations,
    duan_quantity,
    fit_ttmss,
    log_negativity,
    mechanical_block,
    purity,
    teleportation_fidelity,
)
from .model import (
    FOUR_TONE,
    TWO_TONE,
    DriveScheme,
    EffectiveModel,
    PhysicalSetup,
    build_cr_harmonics,
    build_rwa_quadrature,
    effective_from_setup,
    validate_regime,
)
from .numerics import solve_lyapunov

SOLVERS = ("adiabatic", "lyapunov_rwa", "floquet", "ode_oracle")

METRIC_COLUMNS = (
    "duan", "log_negativity", "purity", "n_beta_1", "n_beta_2",
    "ttmss_xi", "ttmss_n_a", "ttmss_n_b", "fidelity",
)

PHYSICAL_KEYS = {
    "topology", "omega_a", "omega_b", "omega_c", "kappa", "gamma_a", "gamma_b",
    "nbar_a", "nbar_b", "g_a", "g_b", "drive_variant",
    "E_plus", "E_minus", "E_1plus", "E_1minus", "E_2plus", "E_2minus",
    "drive_Omega",
}

EFFECTIVE_KEYS = {
    "G_plus_over_G_minus", "C_minus", "Gm_ratio", "Gm_plus_ratio",
    "Gm_minus_ratio", "Omega_over_kappa", "gamma_over_kappa",
    "gamma_a_over_kappa", "gamma_b_over_kappa", "nbar", "nbar_a", "nbar_b",
    "drive_variant", "omega_m_over_kappa", "delta_over_kappa",
    "omega_1_over_kappa", "d",
}

SWEEPABLE = (
    "G_plus_over_G_minus", "C_minus", "nbar", "Omega_over_kappa",
    "gamma_over_kappa", "Gm_ratio", "omega_m_over_kappa",
)

CONTROL_KEYS = {
    "solver", "tol", "jobs", "output_path", "outputs",
    "sweep_parameter", "sweep_start", "sweep_stop", "sweep_points",
}

_STRING_KEYS = {"topology", "drive_variant", "solver", "output_path", "outputs",
                "sweep_parameter"}


@dataclass
class ScenarioConfig:
    """Validated scenario: parameter group, solver choice, optional sweep."""

    params: dict
    is_physical: bool
    solver: str = "lyapunov_rwa"
    tol: float = 1e-9
    jobs: int | None = None
    sweep: tuple | None = None          # (name, start, stop, points)
    outputs: tuple = METRIC_COLUMNS
    output_path: str | None = None


@dataclass
class ResultRow:
    """One evaluated point of a scenario."""

    sweep_value: float | None
    metrics: dict
    solver: str
    status: str = "ok"


def _coerce(key, value):
    if key in _STRING_KEYS:
        return str(value).strip()
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected a number, got {value!r}") from exc
    return float(value)


def parse_config_text(text):
    """Parse either flat key-value lines or a JSON object into a raw dict."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON configuration: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("JSON configuration must be an object")
        return {str(k): v for k, v in raw.items()}
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" in body:
            key, _, value = body.partition("=")
        else:
            parts = body.split(None, 1)
            if len(parts) != 2:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, value = parts
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {line!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(parse_config_text(fh.read()))


def scenario_from_dict(raw):
    """Validate a raw key-value mapping into a ScenarioConfig."""
    unknown = set(raw) - PHYSICAL_KEYS - EFFECTIVE_KEYS - CONTROL_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    phys = {k for k in raw if k in PHYSICAL_KEYS and k != "drive_variant"}
    eff = {k for k in raw if k in EFFECTIVE_KEYS and k != "drive_variant"}
    if phys and eff:
        raise ConfigError(
            f"mixed physical ({sorted(phys)}) and effective ({sorted(eff)}) keys; "
            "use exactly one group")
    if not phys and not eff:
        raise ConfigError("no model parameters given")
    is_physical = bool(phys)

    params = {}
    for key in (PHYSICAL_KEYS if is_physical else EFFECTIVE_KEYS):
        if key in raw:
            params[key] = _coerce(key, raw[key])

    solver = str(raw.get("solver", "lyapunov_rwa")).strip()
    if solver not in SOLVERS:
        raise ConfigError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    tol = _coerce("tol", raw.get("tol", 1e-9))
    jobs = raw.get("jobs")
    jobs = int(_coerce("jobs", jobs)) if jobs is not None else None

    sweep = None
    sweep_keys = [k for k in CONTROL_KEYS if k.startswith("sweep_") and k in raw]
    if sweep_keys:
        missing = {"sweep_parameter", "sweep_start", "sweep_stop", "sweep_points"} - set(raw)
        if missing:
            raise ConfigError(f"incomplete sweep specification, missing {sorted(missing)}")
        name = str(raw["sweep_parameter"]).strip()
        if name not in SWEEPABLE:
            raise ConfigError(
                f"sweep parameter {name!r} not recognized; choose from {SWEEPABLE}")
        if is_physical:
            raise ConfigError("sweeps are supported for effective parameterizations")
        sweep = (name, _coerce("sweep_start", raw["sweep_start"]),
                 _coerce("sweep_stop", raw["sweep_stop"]),
                 int(_coerce("sweep_points", raw["sweep_points"])))
        if sweep[3] < 1:
            raise ConfigError("sweep_points must be >= 1")

    outputs = raw.get("outputs")
    if outputs is None:
        outputs = METRIC_COLUMNS
    else:
        if isinstance(outputs, (list, tuple)):
            names = tuple(str(s).strip() for s in outputs)
        else:
            names = tuple(s.strip() for s in str(outputs).split(",") if s.strip())
        bad = [n for n in names if n not in METRIC_COLUMNS]
        if bad:
            raise ConfigError(f"unknown output metrics {bad}; choose from {METRIC_COLUMNS}")
        outputs = names
    output_path = raw.get("output_path")
    return ScenarioConfig(params=params, is_physical=is_physical, solver=solver,
                          tol=tol, jobs=jobs, sweep=sweep, outputs=outputs,
                          output_path=str(output_path) if output_path else None)


def build_setup(params):
    variant = params.get("drive_variant", TWO_TONE)
    drive = DriveScheme(
        variant=variant,
        E_plus=params.get("E_plus", 0.0), E_minus=params.get("E_minus", 0.0),
        E_1plus=params.get("E_1plus", 0.0), E_1minus=params.get("E_1minus", 0.0),
        E_2plus=params.get("E_2plus", 0.0), E_2minus=params.get("E_2minus", 0.0),
        Omega=params.get("drive_Omega", 0.0))
    return PhysicalSetup(
        omega_a=params["omega_a"], omega_b=params["omega_b"],
        kappa=params["kappa"], gamma_a=params["gamma_a"],
        gamma_b=params["gamma_b"], nbar_a=params.get("nbar_a", 0.0),
        nbar_b=params.get("nbar_b", 0.0), g_a=params["g_a"], g_b=params["g_b"],
        drive=drive, topology=params.get("topology", "two_mechanical_one_cavity"),
        omega_c=params.get("omega_c", 0.0))


def build_model(config, sweep_value=None):
    """EffectiveModel for one evaluation point of the scenario."""
    params = dict(config.params)
    if sweep_value is not None:
        params[config.sweep[0]] = sweep_value
    if config.is_physical:
        return effective_from_setup(build_setup(params))
    gm = params.get("Gm_ratio", 0.0)
    return EffectiveModel.from_ratios(
        params.get("G_plus_over_G_minus", 0.0),
        params.get("C_minus", 1200.0),
        Omega_over_kappa=params.get("Omega_over_kappa", 0.1),
        gamma_over_kappa=params.get("gamma_over_kappa", 4e-5),
        nbar=params.get("nbar", 0.0),
        gm_plus_ratio=params.get("Gm_plus_ratio", gm),
        gm_minus_ratio=params.get("Gm_minus_ratio", gm),
        gamma_a_over_kappa=params.get("gamma_a_over_kappa"),
        gamma_b_over_kappa=params.get("gamma_b_over_kappa"),
        nbar_a=params.get("nbar_a"), nbar_b=params.get("nbar_b"),
        drive_variant=params.get("drive_variant"),
        omega_m_over_kappa=params.get("omega_m_over_kappa"),
        delta_over_kappa=params.get("delta_over_kappa"),
        omega_1_over_kappa=params.get("omega_1_over_kappa"),
        d=params.get("d", 1.0))


def steady_covariance(model, solver, tol=1e-9):
    """Two-mode mechanical covariance for the requested solver."""
    if solver == "adiabatic":
        return covariance_from_moments(collective_moments(model))
    if solver == "lyapunov_rwa":
        ds = build_rwa_quadrature(model)
        return mechanical_block(solve_lyapunov(ds.A0, ds.diffusion()))
    if solver == "floquet":
        drift = build_cr_harmonics(None, model)
        return mechanical_block(solve_floquet(drift, tol=tol).V0)
    if solver == "ode_oracle":
        drift = build_cr_harmonics(None, model)
        return mechanical_block(dc_covariance_by_ode(drift, tol=max(tol, 1e-8)))
    raise ConfigError(f"unknown solver {solver!r}")


def metrics_from_covariance(V, model):
    n1, n2 = bogoliubov_occupations(V, model.r)
    fit = fit_ttmss(V)
    return {
        "duan": duan_quantity(V),
        "log_negativity": log_negativity(V),
        "purity": purity(V),
        "n_beta_1": n1,
        "n_beta_2": n2,
        "ttmss_xi": fit.xi,
        "ttmss_n_a": fit.nth_a,
        "ttmss_n_b": fit.nth_b,
        "fidelity": teleportation_fidelity(V),
    }


def _evaluate_point(config, sweep_value):
    try:
        model = build_model(config, sweep_value)
        V = steady_covariance(model, config.solver, config.tol)
        metrics = metrics_from_covariance(V, model)
        return ResultRow(sweep_value=sweep_value, metrics=metrics,
                         solver=config.solver)
    except TmsqueezeError as exc:
        return ResultRow(sweep_value=sweep_value, metrics={},
                         solver=config.solver,
                         status=f"error:{type(exc).__name__}")


def run_scenario(config):
    """Evaluate a scenario (single point or sweep) into result rows.

    Sweep points run on a thread pool sized by config.jobs; rows are ordered
    by sweep index regardless of completion order, and failed points are
    marked rather than aborting the run.
    """
    if config.sweep is None:
        points = [None]
    else:
        _, start, stop, count = config.sweep
        points = list(np.linspace(start, stop, count))
    jobs = config.jobs or os.cpu_count() or 1
    if jobs > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda v: _evaluate_point(config, v), points))
    else:
        rows = [_evaluate_point(config, v) for v in points]
    return rows


def _fmt(x):
    return f"{x:.12g}"


def rows_to_csv(config, rows, extra_provenance=()):
    """Render result rows as CSV text with provenance comment lines."""
    buf = io.StringIO()
    buf.write(f"# tmsqueeze {__version__}\n")
    buf.write(f"# solver: {config.solver}\n")
    for key in sorted(config.params):
        buf.write(f"# {key}: {config.params[key]}\n")
    if config.sweep is not None:
        name, start, stop, count = config.sweep
        buf.write(f"# sweep: {name} from {_fmt(start)} to {_fmt(stop)} in {count} points\n")
    for line in extra_provenance:
        buf.write(f"# {line}\n")
    header = []
    if config.sweep is not None:
        header.append(config.sweep[0])
    header.extend(config.outputs)
    header.extend(["solver", "status"])
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = []
        if config.sweep is not None:
            cells.append(_fmt(row.sweep_value))
        for name in config.outputs:
            cells.append(_fmt(row.metrics[name]) if name in row.metrics else "nan")
        cells.append(row.solver)
        cells.append(row.status)
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def regime_warnings(config):
    """Regime warnings for the configured model (validate subcommand)."""
    setup = build_setup(config.params) if config.is_physical else None
    if setup is not None:
        model = effective_from_setup(setup)
    else:
        model = build_model(config)
    return validate_regime(setup, model)
