"""Config-driven command line: simulate, boundary, lyapunov, certify, sweep.

Runs are described by a TOML file with [model], [horizons], [integrator],
[grids], [tolerances], [output], and optional [sweep] sections; command-line
flags override file values.  Outputs are CSV tables (round-trip float
precision), UTF-8 key-value certificate documents with a schema-version
header, and optional static SVG charts.  Identical configurations produce
byte-identical outputs.

Exit codes: 0 success / certified, 2 configuration error, 3 runtime model
error, 4 evidence incomplete, 5 extinction detected.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import persist
from .boundary import CompactBox, Equilibrium, estimate_omega_limit, \
    restrict_to_extinction_set
from .dynsys import CONTINUOUS, DEFAULT_DT, simulate
from .errors import ConfigError, ParamOutOfRange, PersistLabError, UnknownModel
from .linearize import lyapunov_exponent
from .models import REGISTRY, ModelFamily, get_family
from .persist import CERTIFIED, EXTINCTION, INCOMPLETE, CertifyConfig, VarySpec
from . import svgplot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_INCOMPLETE = 4
EXIT_EXTINCTION = 5

_VERDICT_EXIT = {CERTIFIED: EXIT_OK, INCOMPLETE: EXIT_INCOMPLETE, EXTINCTION: EXIT_EXTINCTION}

CERTIFICATE_SCHEMA = "persistlab-certificate 1"
BOUNDARY_SCHEMA = "persistlab-boundary 1"


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    model: str = ""
    focal: str = ""
    params: dict = field(default_factory=dict)
    initial: list[float] | None = None
    burn_in: float | None = None
    window: float | None = None
    lyapunov_horizon: float | None = None
    sim_horizon: float | None = None
    stride: float = 1.0
    dt: float = DEFAULT_DT
    ic_points_per_axis: int | None = None
    ic_lower: float = 1e-3
    state_bound: float | None = None
    boundary_seeds: int = 32
    seed: int = 0
    equilibrium_tol: float = 1e-8
    cycle_tol: float = 1e-6
    eps_floor: float = 1e-4
    extinction_tol: float = 1e-10
    out_dir: str = "out"
    formats: list[str] = field(default_factory=lambda: ["csv"])
    vary: list[VarySpec] = field(default_factory=list)
    threads: int | None = None


_SECTION_KEYS = {
    "model": {"name", "focal", "initial", "params"},
    "horizons": {"burn_in", "window", "lyapunov_horizon", "simulate", "stride"},
    "integrator": {"dt"},
    "grids": {"ic_points_per_axis", "ic_lower", "state_bound", "boundary_seeds", "seed"},
    "tolerances": {"equilibrium_tol", "cycle_tol", "eps_floor", "extinction_tol"},
    "output": {"directory", "formats"},
    "sweep": {"vary"},
}


def _check_keys(section: str, table: dict) -> None:
    unknown = set(table) - _SECTION_KEYS[section]
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")


def load_config_file(path: str) -> RunConfig:
    """Parse a TOML run configuration."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from None
    unknown = set(data) - set(_SECTION_KEYS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    cfg = RunConfig()
    model = data.get("model", {})
    _check_keys("model", model)
    cfg.model = str(model.get("name", ""))
    cfg.focal = str(model.get("focal", ""))
    if "initial" in model:
        cfg.initial = [float(v) for v in model["initial"]]
    cfg.params = {str(k): float(v) for k, v in model.get("params", {}).items()}
    horizons = data.get("horizons", {})
    _check_keys("horizons", horizons)
    cfg.burn_in = _opt_float(horizons, "burn_in")
    cfg.window = _opt_float(horizons, "window")
    cfg.lyapunov_horizon = _opt_float(horizons, "lyapunov_horizon")
    cfg.sim_horizon = _opt_float(horizons, "simulate")
    cfg.stride = float(horizons.get("stride", cfg.stride))
    integrator = data.get("integrator", {})
    _check_keys("integrator", integrator)
    cfg.dt = float(integrator.get("dt", cfg.dt))
    grids = data.get("grids", {})
    _check_keys("grids", grids)
    if "ic_points_per_axis" in grids:
        cfg.ic_points_per_axis = int(grids["ic_points_per_axis"])
    cfg.ic_lower = float(grids.get("ic_lower", cfg.ic_lower))
    if "state_bound" in grids:
        cfg.state_bound = float(grids["state_bound"])
    cfg.boundary_seeds = int(grids.get("boundary_seeds", cfg.boundary_seeds))
    cfg.seed = int(grids.get("seed", cfg.seed))
    tolerances = data.get("tolerances", {})
    _check_keys("tolerances", tolerances)
    cfg.equilibrium_tol = float(tolerances.get("equilibrium_tol", cfg.equilibrium_tol))
    cfg.cycle_tol = float(tolerances.get("cycle_tol", cfg.cycle_tol))
    cfg.eps_floor = float(tolerances.get("eps_floor", cfg.eps_floor))
    cfg.extinction_tol = float(tolerances.get("extinction_tol", cfg.extinction_tol))
    output = data.get("output", {})
    _check_keys("output", output)
    cfg.out_dir = str(output.get("directory", cfg.out_dir))
    if "formats" in output:
        cfg.formats = [str(f) for f in output["formats"]]
    sweep = data.get("sweep", {})
    _check_keys("sweep", sweep)
    for entry in sweep.get("vary", []):
        cfg.vary.append(_parse_vary_entry(entry))
    return cfg


def _opt_float(table: dict, key: str) -> float | None:
    return float(table[key]) if key in table else None


def _parse_vary_entry(entry) -> VarySpec:
    if isinstance(entry, dict):
        try:
            return VarySpec(str(entry["name"]), float(entry["min"]), float(entry["max"]),
                            int(entry["steps"]))
        except KeyError as exc:
            raise ConfigError(f"sweep.vary entry missing field {exc}") from None
    if isinstance(entry, (list, tuple)) and len(entry) == 4:
        return VarySpec(str(entry[0]), float(entry[1]), float(entry[2]), int(entry[3]))
    raise ConfigError(f"sweep.vary entry must be a table or 4-element array, got {entry!r}")


def _parse_vary_flag(text: str) -> VarySpec:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"--vary expects name:min:max:steps, got {text!r}")
    return VarySpec(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> None:
    if args.model is not None:
        cfg.model = args.model
    if args.focal is not None:
        cfg.focal = args.focal
    for item in args.param or []:
        if "=" not in item:
            raise ConfigError(f"--param expects name=value, got {item!r}")
        key, _, value = item.partition("=")
        cfg.params[key.strip()] = float(value)
    if args.initial is not None:
        cfg.initial = [float(v) for v in args.initial.split(",")]
    for name in ("burn_in", "window", "lyapunov_horizon", "stride", "dt", "ic_lower",
                 "state_bound", "equilibrium_tol", "cycle_tol", "eps_floor",
                 "extinction_tol"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "horizon", None) is not None:
        cfg.sim_horizon = args.horizon
    if args.ic_points is not None:
        cfg.ic_points_per_axis = args.ic_points
    if args.boundary_seeds is not None:
        cfg.boundary_seeds = args.boundary_seeds
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    if args.formats is not None:
        cfg.formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    if args.threads is not None:
        cfg.threads = args.threads
    for item in args.vary or []:
        cfg.vary.append(_parse_vary_flag(item))


def _resolve(cfg: RunConfig, need_focal: bool = True) -> ModelFamily:
    """Fill kind-dependent defaults and validate the configuration."""
    if not cfg.model:
        raise ConfigError("missing required field: model")
    family = get_family(cfg.model)
    model, decomps = family.build(family.make_params(cfg.params))
    if need_focal:
        if not cfg.focal:
            raise ConfigError("missing required field: focal")
        if cfg.focal not in decomps:
            raise ConfigError(
                f"focal component {cfg.focal!r} not in model {family.name} "
                f"(valid: {', '.join(decomps)})")
    continuous = family.kind == CONTINUOUS
    if cfg.burn_in is None:
        cfg.burn_in = 100.0 if continuous else 10_000
    if cfg.window is None:
        cfg.window = 50.0 if continuous else 10_000
    if cfg.ic_points_per_axis is None:
        cfg.ic_points_per_axis = 3 if continuous else 5
    if cfg.state_bound is None:
        cfg.state_bound = family.state_bound
    for name in ("burn_in", "window", "stride", "dt", "ic_lower", "state_bound",
                 "equilibrium_tol", "cycle_tol", "eps_floor", "extinction_tol"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"field {name} must be positive")
    if cfg.sim_horizon is not None and cfg.sim_horizon < 0:
        raise ConfigError("field simulate horizon must be nonnegative")
    if cfg.lyapunov_horizon is not None and cfg.lyapunov_horizon < 1000:
        raise ConfigError("lyapunov_horizon must be at least 1000 steps or time units")
    if cfg.ic_points_per_axis < 1 or cfg.boundary_seeds < 1:
        raise ConfigError("ic_points_per_axis and boundary_seeds must be at least 1")
    bad = [f for f in cfg.formats if f not in ("csv", "svg")]
    if bad:
        raise ConfigError(f"unknown output format(s): {', '.join(bad)} (use csv, svg)")
    if cfg.initial is not None:
        if len(cfg.initial) != model.dim:
            raise ConfigError(
                f"initial state needs {model.dim} components for {family.name}, "
                f"got {len(cfg.initial)}")
        if any(v < 0 for v in cfg.initial):
            raise ConfigError("initial state components must be nonnegative")
    return family


def _certify_config(cfg: RunConfig) -> CertifyConfig:
    return CertifyConfig(
        burn_in=cfg.burn_in, window=cfg.window, lyapunov_horizon=cfg.lyapunov_horizon,
        boundary_seeds=cfg.boundary_seeds, ic_points_per_axis=cfg.ic_points_per_axis,
        ic_lower=cfg.ic_lower, state_bound=cfg.state_bound,
        equilibrium_tol=cfg.equilibrium_tol, cycle_tol=cfg.cycle_tol,
        eps_floor=cfg.eps_floor, extinction_tol=cfg.extinction_tol, dt=cfg.dt,
        seed=cfg.seed)


# ---------------------------------------------------------------------------
# Deterministic formatting
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _ensure_out(cfg: RunConfig) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return cfg.out_dir


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_list_models(_args) -> int:
    for name in sorted(REGISTRY):
        family = REGISTRY[name]
        defaults = family.defaults()
        print(f"{name} ({family.kind}): {family.description}")
        print("  parameters: " + ", ".join(f"{k}={_fmt(v)}" for k, v in defaults.items()))
        print("  conditions: " + ", ".join(family.condition_labels))
    return EXIT_OK


def _build(cfg: RunConfig, family: ModelFamily):
    params = family.make_params(cfg.params)
    model, decomps = family.build(params)
    return params, model, decomps


def cmd_simulate(cfg: RunConfig, family: ModelFamily) -> int:
    params, model, decomps = _build(cfg, family)
    decomposition = decomps[cfg.focal]
    rho = persist.sum_abs(decomposition)
    z0 = np.array(cfg.initial if cfg.initial is not None else [1.0] * model.dim)
    horizon = cfg.sim_horizon if cfg.sim_horizon is not None else cfg.burn_in + cfg.window
    trajectory = simulate(model, z0, horizon, stride=cfg.stride,
                          decomposition=decomposition, dt=cfg.dt)
    out = _ensure_out(cfg)
    header = ["time", *model.component_names, "rho"]
    rows = [[t, *state, rho(state)] for t, state in zip(trajectory.times, trajectory.states)]
    csv_path = os.path.join(out, "trajectory.csv")
    _write_csv(csv_path, header, rows)
    if "svg" in cfg.formats:
        series = [(name, trajectory.times.tolist(), trajectory.states[:, i].tolist())
                  for i, name in enumerate(model.component_names)]
        svgplot.line_chart(os.path.join(out, "trajectory.svg"), series,
                           f"{model.name} trajectory", "time", "density")
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_boundary(cfg: RunConfig, family: ModelFamily) -> int:
    params, model, decomps = _build(cfg, family)
    decomposition = decomps[cfg.focal]
    sub = restrict_to_extinction_set(model, decomposition)
    seed_box = [(0.0, cfg.state_bound)] * sub.reduced_model.dim
    estimate = estimate_omega_limit(
        sub, cfg.boundary_seeds, cfg.burn_in, cfg.window, tol=cfg.cycle_tol,
        equilibrium_tol=cfg.equilibrium_tol, seed_box=seed_box, dt=cfg.dt)
    out = _ensure_out(cfg)
    names = sub.reduced_model.component_names
    lines = [BOUNDARY_SCHEMA,
             f"model = {model.name}",
             f"focal = {cfg.focal}",
             f"reduced_components = {','.join(names)}",
             f"seeds = {estimate.seeds_used}",
             f"horizon = {_fmt(estimate.horizon)}",
             f"attractors = {len(estimate.members)}"]
    rows = []
    for i, item in enumerate(estimate.members, start=1):
        lines.append(f"attractor.{i} = {item.describe()}")
        if isinstance(item, Equilibrium):
            rows.append([i, "equilibrium", 1, item.residual, *item.point, *item.point])
        elif isinstance(item, CompactBox):
            rows.append([i, "box", "", "", *item.lower, *item.upper])
        else:
            pts = np.asarray(item.points)
            rows.append([i, "periodic_orbit", item.period, "",
                         *pts.min(axis=0), *pts.max(axis=0)])
    report_path = os.path.join(out, "boundary_report.txt")
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    header = ["item", "type", "period", "residual",
              *[f"low_{n}" for n in names], *[f"high_{n}" for n in names]]
    _write_csv(os.path.join(out, "attractors.csv"), header, rows)
    print(f"wrote {report_path} ({len(estimate.members)} attractor(s))")
    return EXIT_OK


def cmd_lyapunov(cfg: RunConfig, family: ModelFamily) -> int:
    params, model, decomps = _build(cfg, family)
    decomposition = decomps[cfg.focal]
    horizon = cfg.lyapunov_horizon
    if horizon is None:
        horizon = 1000.0 if model.kind == CONTINUOUS else 100_000
    z0 = np.array(cfg.initial if cfg.initial is not None else [1.0] * model.dim)
    estimate = lyapunov_exponent(model, decomposition, z0, horizon, dt=cfg.dt)
    out = _ensure_out(cfg)
    rows = [[t, avg] for t, avg in estimate.diagnostics]
    if not rows or rows[-1][0] != estimate.horizon:
        rows.append([estimate.horizon, estimate.value])
    csv_path = os.path.join(out, "lyapunov.csv")
    _write_csv(csv_path, ["time", "running_average"], rows)
    if "svg" in cfg.formats:
        svgplot.line_chart(os.path.join(out, "lyapunov.svg"),
                           [("running average", [r[0] for r in rows], [r[1] for r in rows])],
                           f"{model.name} focal growth rate", "time", "running average")
    print(f"lyapunov estimate {_fmt(estimate.value)} at horizon {_fmt(estimate.horizon)}")
    return EXIT_OK


def _certificate_lines(cfg: RunConfig, family: ModelFamily, params,
                       certificate: persist.PersistenceCertificate) -> list[str]:
    lines = [CERTIFICATE_SCHEMA,
             f"model = {certificate.model}",
             f"kind = {family.kind}",
             f"focal = {','.join(certificate.focal)}"]
    for name in family.param_names:
        lines.append(f"param.{name} = {_fmt(getattr(params, name))}")
    for i, check in enumerate(certificate.analytic_conditions, start=1):
        lines.append(f"condition.{i}.label = {check.label}")
        lines.append(f"condition.{i}.holds = {_fmt(check.holds)}")
        lines.append(f"condition.{i}.margin = {_fmt(check.margin)}")
    for i, ev in enumerate(certificate.evidence, start=1):
        lines.append(f"evidence.{i}.attractor = {ev.attractor.describe()}")
        lines.append(f"evidence.{i}.method = {ev.method}")
        lines.append(f"evidence.{i}.value = {_fmt(ev.value)}")
        lines.append(f"evidence.{i}.threshold = {_fmt(ev.threshold)}")
        lines.append(f"evidence.{i}.passes = {_fmt(ev.passes)}")
        for key, value in ev.diagnostics.items():
            lines.append(f"evidence.{i}.diag.{key} = {_fmt(value)}")
    emp = certificate.empirical
    if emp is not None:
        lines.append(f"empirical.ic_grid = {emp.ic_grid}")
        lines.append(f"empirical.burn_in = {_fmt(emp.burn_in)}")
        lines.append(f"empirical.window = {_fmt(emp.window)}")
        lines.append(f"empirical.eps_hat = {_fmt(emp.eps_hat)}")
        if emp.eps_hat_window_doubled is not None:
            lines.append(f"empirical.eps_hat_window_doubled = "
                         f"{_fmt(emp.eps_hat_window_doubled)}")
        if emp.worst_ic is not None:
            lines.append("empirical.worst_ic = "
                         + ",".join(_fmt(v) for v in emp.worst_ic))
        lines.append("empirical.extinction_witness = "
                     + ("none" if emp.extinction_ic is None
                        else ",".join(_fmt(v) for v in emp.extinction_ic)))
    for i, note in enumerate(certificate.notes, start=1):
        lines.append(f"note.{i} = {note}")
    lines.append(f"verdict = {certificate.verdict}")
    return lines


def cmd_certify(cfg: RunConfig, family: ModelFamily) -> int:
    params = family.make_params(cfg.params)
    certificate = persist.certify_family(family, cfg.focal, _certify_config(cfg),
                                         params=params)
    out = _ensure_out(cfg)
    path = os.path.join(out, "certificate.txt")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(_certificate_lines(cfg, family, params, certificate)) + "\n")
    print(f"verdict: {certificate.verdict} (wrote {path})")
    return _VERDICT_EXIT[certificate.verdict]


def _read_journal(path: str, n_columns: int) -> dict[int, list]:
    done: dict[int, list] = {}
    if not os.path.exists(path):
        return done
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                index, row = int(record["index"]), list(record["row"])
            except (ValueError, KeyError, TypeError):
                break  # damaged tail; recompute from here on
            if len(row) == n_columns:
                done[index] = row
    return done


def cmd_sweep(cfg: RunConfig, family: ModelFamily) -> int:
    if not cfg.vary:
        raise ConfigError("missing required field: sweep.vary")
    family, columns, cells = persist.sweep_plan(family, cfg.vary)
    out = _ensure_out(cfg)
    journal_path = os.path.join(out, "sweep.journal")
    done = _read_journal(journal_path, len(columns))
    missing = [(idx, values) for idx, values in enumerate(cells) if idx not in done]
    config = _certify_config(cfg)

    threads = cfg.threads
    if threads is None:
        threads = int(os.environ.get("PERSISTLAB_THREADS", "1") or "1")
    threads = max(1, min(threads, max(len(missing), 1)))

    def run(values):
        return persist.sweep_cell(family, cfg.vary, values, cfg.focal, config, cfg.params)

    if threads == 1:
        computed = [(idx, run(values)) for idx, values in missing]
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = pool.map(run, [values for _, values in missing])
            computed = [(idx, row) for (idx, _), row in zip(missing, results)]
    if computed:
        with open(journal_path, "a", encoding="utf-8", newline="\n") as fh:
            for idx, row in computed:
                fh.write(json.dumps({"index": idx, "row": row}) + "\n")
    rows = dict(done)
    rows.update(dict(computed))
    ordered = [rows[idx] for idx in range(len(cells))]
    csv_path = os.path.join(out, "sweep.csv")
    _write_csv(csv_path, columns, ordered)
    if "svg" in cfg.formats:
        _sweep_svg(cfg, columns, ordered, out)
    print(f"sweep complete: {len(cells)} rows ({len(computed)} computed, "
          f"{len(done)} reused); wrote {csv_path}")
    return EXIT_OK


def _sweep_svg(cfg: RunConfig, columns: list[str], rows: list[list], out: str) -> None:
    path = os.path.join(out, "sweep.svg")
    if len(cfg.vary) == 1:
        xs = [row[0] for row in rows]
        series = []
        for j, col in enumerate(columns):
            if col.startswith("margin:") or col == "eps_hat":
                series.append((col, xs, [_nanfloat(row[j]) for row in rows]))
        svgplot.line_chart(path, series, f"sweep over {cfg.vary[0].name}",
                           cfg.vary[0].name, "margin / empirical floor")
        return
    x_values = sorted({row[0] for row in rows})
    y_values = sorted({row[1] for row in rows})
    verdicts = [row[-1] for row in rows]
    svgplot.verdict_grid(path, x_values, y_values, verdicts,
                         f"verdicts over ({cfg.vary[0].name}, {cfg.vary[1].name})",
                         cfg.vary[0].name, cfg.vary[1].name)


def _nanfloat(v) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        return math.nan


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------

def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML run configuration file")
    parser.add_argument("--model", help="registered model name")
    parser.add_argument("--focal", help="focal component name")
    parser.add_argument("--param", action="append", metavar="NAME=VALUE",
                        help="override one model parameter (repeatable)")
    parser.add_argument("--initial", metavar="V1,V2,...", help="initial state")
    parser.add_argument("--burn-in", dest="burn_in", type=float)
    parser.add_argument("--window", type=float)
    parser.add_argument("--lyapunov-horizon", dest="lyapunov_horizon", type=float)
    parser.add_argument("--horizon", type=float, help="simulation horizon")
    parser.add_argument("--stride", type=float)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--ic-points", dest="ic_points", type=int)
    parser.add_argument("--ic-lower", dest="ic_lower", type=float)
    parser.add_argument("--state-bound", dest="state_bound", type=float)
    parser.add_argument("--boundary-seeds", dest="boundary_seeds", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--equilibrium-tol", dest="equilibrium_tol", type=float)
    parser.add_argument("--cycle-tol", dest="cycle_tol", type=float)
    parser.add_argument("--eps-floor", dest="eps_floor", type=float)
    parser.add_argument("--extinction-tol", dest="extinction_tol", type=float)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--formats", help="comma-separated: csv,svg")
    parser.add_argument("--vary", action="append", metavar="NAME:MIN:MAX:STEPS",
                        help="sweep axis (repeatable, at most twice)")
    parser.add_argument("--threads", type=int, help="worker cap (or PERSISTLAB_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persistlab",
        description="numerical persistence certification for maps and flows")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("list-models", help="list registered models and their conditions")
    for name, help_text in (
            ("simulate", "record a trajectory to CSV"),
            ("boundary", "estimate boundary attractors on the extinction set"),
            ("lyapunov", "focal growth-rate running averages"),
            ("certify", "full persistence certification"),
            ("sweep", "certify over a parameter grid")):
        command = sub.add_parser(name, help=help_text)
        _add_common_flags(command)
    return parser


_HANDLERS = {
    "simulate": cmd_simulate,
    "boundary": cmd_boundary,
    "lyapunov": cmd_lyapunov,
    "certify": cmd_certify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    if args.command == "list-models":
        return cmd_list_models(args)
    try:
        cfg = load_config_file(args.config) if args.config else RunConfig()
        _apply_flags(cfg, args)
        family = _resolve(cfg)
        return _HANDLERS[args.command](cfg, family)
    except (ConfigError, UnknownModel, ParamOutOfRange) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PersistLabError, ValueError, OverflowError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
