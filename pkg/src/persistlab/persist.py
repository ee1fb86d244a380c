"""End-to-end persistence certification and parameter sweeps.

A certification restricts the model to the extinction set of the chosen
focal block, estimates the omega-limit set of the boundary dynamics, tests
each boundary attractor for repulsion (spectral radius above one at
equilibria and periodic orbits of maps, growth-rate above zero at
equilibria of flows, Lyapunov exponent above zero over box attractors),
and runs an empirical finite-horizon floor of the persistence function
over a grid of interior initial conditions.  The verdict combines both:
repeller evidence plus a positive empirical floor certifies persistence, a
trajectory pinned below the extinction tolerance witnesses extinction, and
anything else is reported as incomplete evidence rather than a negative.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import boundary as boundary_mod
from . import linearize
from .boundary import (AttractorItem, Equilibrium, OmegaLimitEstimate, PeriodicOrbit,
                       restrict_to_extinction_set)
from .dynsys import (CONTINUOUS, DISCRETE, DEFAULT_DT, FocalDecomposition, ModelSpec,
                     _as_flat_state, _clamp_flat_continuous, _clamp_flat_discrete,
                     _flat_update, _rk4_flat, semiflow, validate_decomposition)
from .errors import (ConfigError, DegenerateProduct, NoConvergence, NonFiniteMatrix,
                     NotPeriodic, PersistLabError, UnboundedBoundaryDynamics)
from .models import ConditionCheck, ModelFamily, get_family

CERTIFIED = "CertifiedPersistent"
INCOMPLETE = "EvidenceIncomplete"
EXTINCTION = "ExtinctionDetected"

SUM_ABS = "sum_abs"
MIN_COMPONENT = "min_component"
SINGLE_COMPONENT = "single_component"


@dataclass(frozen=True)
class PersistenceFunction:
    """Nonnegative functional of the state vanishing on its extinction set.

    ``sum_abs`` vanishes exactly when the whole focal block does.  Note that
    ``min_component`` vanishes as soon as any one focal component does, so
    for multi-component focal blocks it measures joint persistence.
    """

    kind: str
    focal_indices: tuple[int, ...]
    component: int = 0

    def __post_init__(self):
        if self.kind not in (SUM_ABS, MIN_COMPONENT, SINGLE_COMPONENT):
            raise ValueError(f"unknown persistence function kind {self.kind!r}")
        if self.kind == SINGLE_COMPONENT and self.component not in self.focal_indices:
            raise ValueError("single-component index must belong to the focal block")

    def __call__(self, z: np.ndarray) -> float:
        if self.kind == SINGLE_COMPONENT:
            return abs(float(z[self.component]))
        block = [abs(float(z[i])) for i in self.focal_indices]
        return min(block) if self.kind == MIN_COMPONENT else math.fsum(block)


def sum_abs(decomposition: FocalDecomposition) -> PersistenceFunction:
    return PersistenceFunction(SUM_ABS, decomposition.focal_indices)


@dataclass
class RepellerEvidence:
    attractor: AttractorItem
    method: str                 # "spectral_radius" or "lyapunov_exponent"
    value: float
    threshold: float            # 1 for a radius, 0 for an exponent
    passes: bool
    diagnostics: dict = field(default_factory=dict)


@dataclass
class EmpiricalStats:
    ic_grid: int
    burn_in: float
    window: float
    eps_hat: float
    worst_ic: np.ndarray | None
    per_ic_minima: list[float]
    eps_hat_window_doubled: float | None = None
    extinction_ic: np.ndarray | None = None


@dataclass
class PersistenceCertificate:
    model: str
    focal: tuple[str, ...]
    analytic_conditions: list[ConditionCheck]
    evidence: list[RepellerEvidence]
    empirical: EmpiricalStats | None
    verdict: str
    notes: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class CertifyConfig:
    """Horizons, grids, and tolerances driving one certification run."""

    burn_in: float = 10_000
    window: float = 10_000
    lyapunov_horizon: float | None = None   # default: 1e5 steps / 1e3 time units
    boundary_seeds: int = 32
    boundary_burn_in: float | None = None   # default: burn_in
    boundary_window: float | None = None    # default: window
    ic_points_per_axis: int = 5
    ic_lower: float = 1e-3
    state_bound: float = 10.0
    equilibrium_tol: float = 1e-8
    cycle_tol: float = 1e-6
    eps_floor: float = 1e-4
    extinction_tol: float = 1e-10
    dt: float = DEFAULT_DT
    divergence_bound: float = 1e8
    seed: int = 0
    window_doubling_check: bool = True
    threads: int = 1

    def __post_init__(self):
        for name in ("burn_in", "window", "ic_lower", "state_bound", "equilibrium_tol",
                     "cycle_tol", "eps_floor", "extinction_tol", "dt"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"config field {name} must be positive")
        if self.ic_points_per_axis < 1 or self.boundary_seeds < 1:
            raise ConfigError("grid and seed counts must be at least one")

    @staticmethod
    def defaults_for(kind: str, **overrides) -> "CertifyConfig":
        """Kind-appropriate defaults: map horizons count steps, flow horizons time."""
        if kind == CONTINUOUS:
            base = dict(burn_in=100.0, window=50.0, ic_points_per_axis=3)
        else:
            base = dict()
        base.update(overrides)
        return CertifyConfig(**base)

    def resolved_lyapunov_horizon(self, kind: str) -> float:
        if self.lyapunov_horizon is not None:
            return self.lyapunov_horizon
        return 1_000.0 if kind == CONTINUOUS else 100_000.0


# ---------------------------------------------------------------------------
# Empirical liminf surrogate
# ---------------------------------------------------------------------------

def _window_scan(model: ModelSpec, decomposition: FocalDecomposition | None,
                 rho: Callable[[np.ndarray], float], z0: np.ndarray,
                 burn_in: float, window: float, dt: float) -> tuple[float, float]:
    """Min and max of rho over the window states following the burn-in."""
    z = _as_flat_state(semiflow(model, z0, burn_in, decomposition, dt=dt))
    update = _flat_update(model, decomposition)
    lo, hi = math.inf, -math.inf
    if model.kind == DISCRETE:
        for _ in range(int(round(window))):
            z = _clamp_flat_discrete(update(z), model)
            value = rho(z)
            lo = value if value < lo else lo
            hi = value if value > hi else hi
        return lo, hi
    n_full = int(math.floor(window / dt + 1e-9))
    remainder = window - n_full * dt
    steps = [dt] * n_full
    if remainder > 1e-12 * max(1.0, window):
        steps.append(remainder)
    for h in steps:
        z = _clamp_flat_continuous(_rk4_flat(update, z, h), z, model)
        value = rho(z)
        lo = value if value < lo else lo
        hi = value if value > hi else hi
    return lo, hi


def log_uniform_grid(dim: int, lower: float, upper: float, points_per_axis: int) -> list[np.ndarray]:
    """Cartesian product of per-axis log-spaced levels in [lower, upper]."""
    if not 0.0 < lower <= upper:
        raise ConfigError(f"grid bounds must satisfy 0 < {lower} <= {upper}")
    axis = np.geomspace(lower, upper, points_per_axis)
    return [np.array(pt) for pt in itertools.product(axis, repeat=dim)]


@dataclass
class LiminfResult:
    eps_hat: float
    per_ic_minima: list[float]
    worst_ic: np.ndarray
    extinction_ic: np.ndarray | None


def empirical_liminf(model: ModelSpec, decomposition: FocalDecomposition,
                     rho: Callable[[np.ndarray], float],
                     ic_grid: Sequence[np.ndarray], burn_in: float, window: float,
                     dt: float = DEFAULT_DT,
                     extinction_tol: float | None = None) -> LiminfResult:
    """Finite-horizon floor of rho over a grid of interior initial conditions.

    Every grid point must satisfy rho > 0; each is simulated for
    burn_in + window and the minimum of rho over the window is recorded.
    The returned floor is the minimum over the grid.  When
    ``extinction_tol`` is given, an initial condition whose rho stays below
    it for the whole window is reported as an extinction witness.
    """
    ic_grid = [np.asarray(ic, dtype=float) for ic in ic_grid]
    if not ic_grid:
        raise ConfigError("initial-condition grid is empty")
    if burn_in <= 0 or window <= 0:
        raise ConfigError("burn_in and window must be positive")
    for ic in ic_grid:
        if rho(ic) <= 0.0:
            raise ConfigError(
                f"initial condition {ic!r} lies on the extinction set (rho = 0); "
                "grid points must have rho > 0")
    minima: list[float] = []
    extinction_ic = None
    for ic in ic_grid:
        lo, hi = _window_scan(model, decomposition, rho, ic, burn_in, window, dt)
        minima.append(lo)
        if extinction_tol is not None and extinction_ic is None and hi < extinction_tol:
            extinction_ic = ic
    worst = int(np.argmin(minima))
    return LiminfResult(eps_hat=minima[worst], per_ic_minima=minima,
                        worst_ic=ic_grid[worst], extinction_ic=extinction_ic)


# ---------------------------------------------------------------------------
# Repeller evidence per boundary attractor
# ---------------------------------------------------------------------------

def _evidence_for_attractor(model: ModelSpec, decomposition: FocalDecomposition,
                            sub, item: AttractorItem, config: CertifyConfig) -> RepellerEvidence:
    if isinstance(item, (Equilibrium, PeriodicOrbit)):
        if model.kind == DISCRETE:
            if isinstance(item, Equilibrium):
                points = [sub.embed(item.point)]
            else:
                points = [sub.embed(p) for p in item.points]
            growth = linearize.spectral_radius_at_orbit(model, decomposition, points,
                                                        cycle_tol=config.cycle_tol)
            diagnostics = {"product_radius": growth.product_radius, "period": growth.period}
            if isinstance(item, Equilibrium):
                cross = linearize.lyapunov_exponent(
                    model, decomposition, points[0],
                    horizon=linearize.MIN_LYAPUNOV_HORIZON)
                diagnostics["lyapunov_cross_check"] = cross.value
            value = growth.per_step_radius
            return RepellerEvidence(item, "spectral_radius", value, 1.0, value > 1.0,
                                    diagnostics)
        # Flow equilibrium: growth rate of the focal linearization there.
        point = sub.embed(item.point if isinstance(item, Equilibrium) else item.points[0])
        matrix = linearize.cocycle_matrix(decomposition, point)
        value = linearize.spectral_abscissa(matrix)
        return RepellerEvidence(item, "lyapunov_exponent", value, 0.0, value > 0.0,
                                {"route": "growth rate at flow equilibrium"})
    # Box attractor: Lyapunov exponent of an orbit settled inside the box.
    center = 0.5 * (item.lower + item.upper)
    z0 = sub.embed(center)
    horizon = config.resolved_lyapunov_horizon(model.kind)
    burn = config.boundary_burn_in if config.boundary_burn_in is not None else config.burn_in
    estimate = linearize.lyapunov_exponent(model, decomposition, z0, horizon,
                                           burn_in_on_boundary=burn, dt=config.dt)
    value = estimate.tail_max()
    return RepellerEvidence(item, "lyapunov_exponent", value, 0.0, value > 0.0,
                            {"final_average": estimate.value,
                             "checkpoints": len(estimate.diagnostics)})


# ---------------------------------------------------------------------------
# Certification pipeline
# ---------------------------------------------------------------------------

def certify(model: ModelSpec, decomposition: FocalDecomposition, config: CertifyConfig,
            rho: PersistenceFunction | None = None,
            analytic_conditions: Sequence[ConditionCheck] | None = None) -> PersistenceCertificate:
    """Run the full boundary-repeller plus empirical-floor pipeline.

    Steps: restrict to the extinction set of the focal block, estimate the
    omega-limit set of the boundary dynamics from quasi-random seeds, score
    each boundary attractor for repulsion, then measure the empirical floor
    of the persistence function over an interior grid (re-measured at a
    doubled window as a stability check).  Analytic conditions, when
    supplied by the model family, are recorded for reporting and do not
    enter the verdict.
    """
    rho = rho if rho is not None else sum_abs(decomposition)
    focal_names = tuple(model.component_names[i] for i in decomposition.focal_indices)
    notes: list[str] = []
    incomplete = False

    validate_decomposition(model, decomposition, n_points=128, bound=config.state_bound,
                           seed=config.seed)
    sub = restrict_to_extinction_set(model, decomposition)
    seed_box = [(0.0, config.state_bound)] * sub.reduced_model.dim
    boundary_burn = config.boundary_burn_in if config.boundary_burn_in is not None else config.burn_in
    boundary_win = config.boundary_window if config.boundary_window is not None else config.window
    estimate: OmegaLimitEstimate | None = None
    evidence: list[RepellerEvidence] = []
    try:
        estimate = boundary_mod.estimate_omega_limit(
            sub, config.boundary_seeds, boundary_burn, boundary_win,
            tol=config.cycle_tol, equilibrium_tol=config.equilibrium_tol,
            seed_box=seed_box, divergence_bound=config.divergence_bound, dt=config.dt)
    except (UnboundedBoundaryDynamics, NoConvergence) as exc:
        incomplete = True
        notes.append(f"boundary attractor estimation failed: {exc}")

    if estimate is not None:
        if model.kind == CONTINUOUS and all(isinstance(m, Equilibrium) for m in estimate.members):
            notes.append("boundary tails reached equilibria only; absence of boundary "
                         "cycles is checked empirically, not proven")
        for item in estimate.members:
            try:
                evidence.append(_evidence_for_attractor(model, decomposition, sub, item, config))
            except (NoConvergence, NotPeriodic, DegenerateProduct, NonFiniteMatrix) as exc:
                incomplete = True
                notes.append(f"evidence failed for {item.describe()}: {exc}")

    empirical: EmpiricalStats | None = None
    extinction_ic = None
    try:
        grid = log_uniform_grid(model.dim, config.ic_lower, config.state_bound,
                                config.ic_points_per_axis)
        result = empirical_liminf(model, decomposition, rho, grid,
                                  config.burn_in, config.window, dt=config.dt,
                                  extinction_tol=config.extinction_tol)
        doubled = None
        if config.window_doubling_check:
            doubled = empirical_liminf(model, decomposition, rho, grid,
                                       config.burn_in, 2.0 * config.window,
                                       dt=config.dt).eps_hat
        empirical = EmpiricalStats(
            ic_grid=len(grid), burn_in=config.burn_in, window=config.window,
            eps_hat=result.eps_hat, worst_ic=result.worst_ic,
            per_ic_minima=result.per_ic_minima,
            eps_hat_window_doubled=doubled, extinction_ic=result.extinction_ic)
        extinction_ic = result.extinction_ic
    except PersistLabError as exc:
        incomplete = True
        notes.append(f"empirical floor estimation failed: {exc}")

    if (not incomplete and evidence and all(ev.passes for ev in evidence)
            and empirical is not None and empirical.eps_hat > config.eps_floor):
        verdict = CERTIFIED
    elif extinction_ic is not None:
        verdict = EXTINCTION
        notes.append(f"extinction witness at initial condition {tuple(extinction_ic)}")
    else:
        verdict = INCOMPLETE

    return PersistenceCertificate(
        model=model.name, focal=focal_names,
        analytic_conditions=list(analytic_conditions or []),
        evidence=evidence, empirical=empirical, verdict=verdict, notes=notes)


def certify_family(family: ModelFamily | str, focal: str, config: CertifyConfig,
                   params=None, overrides=None) -> PersistenceCertificate:
    """Certify a registered model family for one focal component."""
    family = get_family(family) if isinstance(family, str) else family
    params = params if params is not None else family.make_params(overrides)
    model, decomps = family.build(params)
    if focal not in decomps:
        raise ConfigError(
            f"{family.name} has no focal component {focal!r}; valid: {', '.join(decomps)}")
    return certify(model, decomps[focal], config,
                   analytic_conditions=family.conditions(params))


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarySpec:
    name: str
    lower: float
    upper: float
    steps: int


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[list]


MAX_SWEEP_CELLS = 10_000


def sweep_plan(family: ModelFamily | str, vary: Sequence[VarySpec]
               ) -> tuple[ModelFamily, list[str], list[tuple[float, ...]]]:
    """Validate a sweep request and lay out its columns and grid cells.

    An empty ``vary`` yields an empty table (no cells to certify).
    """
    family = get_family(family) if isinstance(family, str) else family
    if len(vary) == 0:
        columns = [f"margin:{label}" for label in family.condition_labels]
        return family, columns + ["eps_hat", "verdict"], []
    if len(vary) > 2:
        raise ConfigError("sweeps vary one or two parameters")
    for spec in vary:
        if spec.steps < 2:
            raise ConfigError(f"sweep over {spec.name} needs at least 2 steps")
        if spec.name not in family.param_names:
            raise ConfigError(
                f"{family.name} has no parameter {spec.name!r}; "
                f"valid: {', '.join(family.param_names)}")
    axes = [np.linspace(spec.lower, spec.upper, spec.steps) for spec in vary]
    cells = list(itertools.product(*axes))
    if len(cells) > MAX_SWEEP_CELLS:
        raise ConfigError(f"sweep has {len(cells)} cells, above the cap {MAX_SWEEP_CELLS}")
    columns = [spec.name for spec in vary]
    columns += [f"margin:{label}" for label in family.condition_labels]
    columns += ["eps_hat", "verdict"]
    return family, columns, cells


def sweep_cell(family: ModelFamily, vary: Sequence[VarySpec], values: Sequence[float],
               focal: str, config: CertifyConfig, base_overrides=None) -> list:
    """One sweep row: varied values, condition margins, empirical floor, verdict."""
    n_margins = len(family.condition_labels)
    overrides = dict(base_overrides or {})
    overrides.update({spec.name: value for spec, value in zip(vary, values)})
    row: list = [float(v) for v in values]
    try:
        params = family.make_params(overrides)
        checks = family.conditions(params)
        row += [check.margin for check in checks]
        certificate = certify_family(family, focal, config, params=params)
        eps_hat = certificate.empirical.eps_hat if certificate.empirical else float("nan")
        row += [eps_hat, certificate.verdict]
    except PersistLabError:
        while len(row) < len(values) + n_margins:
            row.append(float("nan"))
        row += [float("nan"), INCOMPLETE]
    return row


def parameter_sweep(family: ModelFamily | str, vary: Sequence[VarySpec],
                    focal: str, config: CertifyConfig,
                    base_overrides=None, threads: int | None = None) -> SweepResult:
    """Certify a model family over a one- or two-parameter grid.

    Each cell evaluates the family's analytic conditions and runs a full
    certification; rows carry the varied values, each condition margin, the
    empirical floor, and the verdict.  Cell-level failures are recorded as
    EvidenceIncomplete rows instead of aborting the sweep.  Rows come back
    in grid order regardless of the worker count.
    """
    family, columns, cells = sweep_plan(family, vary)
    if threads is None:
        threads = int(os.environ.get("PERSISTLAB_THREADS", "1") or "1")
    threads = max(1, min(threads, len(cells)))

    def run(values):
        return sweep_cell(family, vary, values, focal, config, base_overrides)

    if threads == 1:
        rows = [run(values) for values in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, cells))
    return SweepResult(columns=columns, rows=rows)
