"""Built-in predator-prey systems with their focal decompositions.

Three families are registered:

``ackleh-composite``
    Two-season discrete prey/predator model composed over one breeding plus
    one non-breeding step.  Prey survive with probability ``s_n`` per season
    and reproduce only in the breeding season with fecundity ``b_hat(n)``;
    a prey escapes predation by ``p`` predators with probability
    ``1 - f(p) p``; consumed prey convert to predator births at rate
    ``kappa`` and predators survive with probability ``s_p`` per season.
    Default kernels are Beverton-Holt fecundity b_hat(n) = b_max/(1+omega n)
    and saturating predation f(p) = f0/(1+f0 p), both injectable.

``din-predprey``
    Discrete Ricker-type pair: prey grow at intrinsic rate ``r`` toward
    carrying capacity ``K`` and are reduced at maximum per-capita rate
    ``beta`` softened by prey refuge ``gamma``; predators die at rate ``d``
    and self-limit at maximum rate ``a`` softened by ``b x + c``.

``food-chain-2pred``
    Continuous Kolmogorov system of one logistic prey (carrying capacity 1)
    and two competing predators with Holling type II uptake (attack rates
    ``alpha``/``beta``, handling times ``h1``/``h2``, conversion ``e1``/``e2``,
    death rates ``u``/``w``, interference ``c1``/``c2``).

Each builder returns a ModelSpec plus one FocalDecomposition per component
choice, and the family exposes its closed-form threshold quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Callable, Mapping

import numpy as np

from . import boundary as _boundary
from .dynsys import CONTINUOUS, DISCRETE, FocalDecomposition, ModelSpec
from .errors import (NoBoundaryEquilibrium, NoInteriorPreyEquilibrium, ParamOutOfRange,
                     UnknownModel)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParamOutOfRange(message)


def _exp(v: float) -> float:
    """exp that saturates to inf instead of raising, so the non-finite
    state check fires with its documented error."""
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# Seasonal composite model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AcklehParams:
    """Parameters of the composite seasonal prey/predator map.

    Custom ``b_hat`` / ``f`` kernels override the defaults; a custom
    ``b_hat`` should come with ``b_hat_inverse`` or the prey equilibrium is
    located by bisection.
    """

    s_n: float = 0.5
    s_p: float = 0.5
    kappa: float = 6.0
    b_max: float = 2.0
    omega: float = 1.0
    f0: float = 0.5
    b_hat: Callable[[float], float] | None = None
    b_hat_inverse: Callable[[float], float] | None = None
    f: Callable[[float], float] | None = None

    def __post_init__(self):
        _require(0.0 < self.s_n < 1.0, f"s_n must lie in (0,1), got {self.s_n}")
        _require(0.0 < self.s_p < 1.0, f"s_p must lie in (0,1), got {self.s_p}")
        _require(self.kappa > 0.0, f"kappa must be positive, got {self.kappa}")
        if self.b_hat is None:
            _require(self.b_max > 0.0, f"b_max must be positive, got {self.b_max}")
            _require(self.omega > 0.0, f"omega must be positive, got {self.omega}")
        else:
            _require(self.b_hat(0.0) > 0.0, "b_hat(0) must be positive")
            _require(self.b_hat(1.0) <= self.b_hat(0.0), "b_hat must be decreasing")
        if self.f is None:
            _require(0.0 < self.f0 < 1.0, f"f0 must lie in (0,1), got {self.f0}")
        else:
            for p in (0.0, 0.5, 1.0, 10.0, 1e4):
                fp = self.f(p)
                _require(0.0 < fp < 1.0, f"f({p}) = {fp} outside (0,1)")
                _require(fp * p < 1.0, f"f({p})*{p} = {fp * p} not below 1")

    def fecundity(self, n: float) -> float:
        if self.b_hat is not None:
            return self.b_hat(n)
        return self.b_max / (1.0 + self.omega * n)

    def predation(self, p: float) -> float:
        if self.f is not None:
            return self.f(p)
        return self.f0 / (1.0 + self.f0 * p)


def _ackleh_season_growth(params: AcklehParams, n: float) -> float:
    """Composite two-season per-capita prey growth at density n."""
    return params.s_n * params.s_n + params.s_n * params.fecundity(n)


def _ackleh_escape(params: AcklehParams, p: float) -> float:
    """Fraction of prey escaping predation by p predators."""
    return 1.0 - params.predation(p) * p


def _ackleh_mid_predators(params: AcklehParams, n: float, p: float) -> float:
    """Predator density after the breeding half of the composite step."""
    growth = _ackleh_season_growth(params, n)
    return params.s_p * p + (params.kappa / params.s_n) * growth * n * params.predation(p) * p


def _ackleh_next(params: AcklehParams, n: float, p: float) -> tuple[float, float]:
    growth = _ackleh_season_growth(params, n)
    escape = _ackleh_escape(params, p)
    mid = _ackleh_mid_predators(params, n, p)
    f_mid = params.predation(mid)
    n_next = growth * escape * (1.0 - f_mid * mid) * n
    p_next = params.s_p * mid + params.kappa * n * growth * escape * f_mid * mid
    return n_next, p_next


def _ackleh_prey_factor(params: AcklehParams, n: float, p: float) -> float:
    mid = _ackleh_mid_predators(params, n, p)
    return (_ackleh_season_growth(params, n) * _ackleh_escape(params, p)
            * (1.0 - params.predation(mid) * mid))


def _ackleh_predator_factor(params: AcklehParams, n: float, p: float) -> float:
    growth = _ackleh_season_growth(params, n)
    mid = _ackleh_mid_predators(params, n, p)
    per_capita_mid = params.s_p + (params.kappa / params.s_n) * growth * n * params.predation(p)
    return (params.s_p * per_capita_mid
            + params.kappa * growth * n * _ackleh_escape(params, p)
            * params.predation(mid) * per_capita_mid)


def ackleh_composite(params: AcklehParams) -> tuple[ModelSpec, dict[str, FocalDecomposition]]:
    """Composite seasonal map with prey-focal and predator-focal splits."""

    def rhs_flat(z: tuple) -> tuple:
        return _ackleh_next(params, z[0], z[1])

    def rhs(z: np.ndarray) -> np.ndarray:
        return np.array(_ackleh_next(params, float(z[0]), float(z[1])))

    def prey_scalar(z) -> float:
        return _ackleh_prey_factor(params, float(z[0]), float(z[1]))

    def prey_complement(z) -> np.ndarray:
        return np.array([_ackleh_next(params, float(z[0]), float(z[1]))[1]])

    def predator_scalar(z) -> float:
        return _ackleh_predator_factor(params, float(z[0]), float(z[1]))

    def predator_complement(z) -> np.ndarray:
        return np.array([_ackleh_next(params, float(z[0]), float(z[1]))[0]])

    model = ModelSpec(
        name="ackleh-composite", kind=DISCRETE, dim=2, rhs=rhs,
        component_names=("n", "p"),
        params=_numeric_params(params),
        rhs_flat=rhs_flat)
    # Both components of the composite map are already in factored per-capita
    # form, so the flat map preserves exact zeros on either axis by itself.
    decomps = {
        "n": FocalDecomposition((0,), (1,),
                                lambda z: np.array([[prey_scalar(z)]]), prey_complement,
                                cocycle_scalar=prey_scalar, assembled_flat=rhs_flat),
        "p": FocalDecomposition((1,), (0,),
                                lambda z: np.array([[predator_scalar(z)]]), predator_complement,
                                cocycle_scalar=predator_scalar, assembled_flat=rhs_flat),
    }
    return model, decomps


@dataclass(frozen=True)
class AcklehGrowthRates:
    prey_rate: float       # per-composite-step prey growth at the origin
    invasion_rate: float   # predator invasion rate at the prey equilibrium
    prey_equilibrium: float


def ackleh_growth_rates(params: AcklehParams) -> AcklehGrowthRates:
    """Closed-form threshold quantities (r0, ri, nbar) of the composite map.

    The prey-only equilibrium nbar solves b_hat(nbar) = (1 - s_n^2)/s_n; it
    exists exactly when the origin growth rate exceeds one.
    """
    r0 = _ackleh_season_growth(params, 0.0)
    target = (1.0 - params.s_n * params.s_n) / params.s_n
    if params.b_hat is None:
        if params.b_max <= target:
            raise NoInteriorPreyEquilibrium(
                f"b_hat(0) = {params.b_max} does not exceed (1-s_n^2)/s_n = {target}")
        nbar = (params.b_max / target - 1.0) / params.omega
    elif params.b_hat_inverse is not None:
        nbar = params.b_hat_inverse(target)
    else:
        nbar = _invert_decreasing(params.b_hat, target)
    ri = params.s_p + params.kappa * nbar * params.predation(0.0)
    return AcklehGrowthRates(r0, ri, nbar)


def _invert_decreasing(fn: Callable[[float], float], target: float) -> float:
    """Bisection inverse of a decreasing positive kernel."""
    if fn(0.0) <= target:
        raise NoInteriorPreyEquilibrium(
            f"kernel value at 0 ({fn(0.0)}) does not exceed target {target}")
    hi = 1.0
    while fn(hi) > target:
        hi *= 2.0
        if hi > 1e12:
            raise NoInteriorPreyEquilibrium("kernel never falls to the target level")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if fn(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Ricker-type discrete model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DinParams:
    r: float = 1.5      # prey intrinsic growth rate
    K: float = 10.0     # prey carrying capacity
    beta: float = 0.2   # maximum per-capita prey reduction
    gamma: float = 1.0  # prey refuge strength
    a: float = 1.0      # maximum per-capita predator reduction
    b: float = 1.0      # prey-to-predator food quality
    c: float = 1.0      # predator refuge strength
    d: float = 0.5      # predator death rate

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            _require(value > 0.0, f"{f.name} must be positive, got {value}")


def din_model(params: DinParams) -> tuple[ModelSpec, dict[str, FocalDecomposition]]:
    """Ricker-type prey/predator map with both single-species splits."""
    r, K, beta, gamma = params.r, params.K, params.beta, params.gamma
    a, b, c, d = params.a, params.b, params.c, params.d

    def prey_factor(x: float, y: float) -> float:
        return _exp(r * (1.0 - x / K) - beta * y / (x + gamma))

    def predator_factor(x: float, y: float) -> float:
        return _exp(1.0 - d - a * y / (b * x + c))

    def rhs_flat(z: tuple) -> tuple:
        x, y = z[0], z[1]
        return (x * prey_factor(x, y), y * predator_factor(x, y))

    def rhs(z: np.ndarray) -> np.ndarray:
        return np.array(rhs_flat((float(z[0]), float(z[1]))))

    model = ModelSpec(
        name="din-predprey", kind=DISCRETE, dim=2, rhs=rhs,
        component_names=("x", "y"),
        params=_numeric_params(params),
        rhs_flat=rhs_flat)
    decomps = {
        "x": FocalDecomposition(
            (0,), (1,),
            lambda z: np.array([[prey_factor(float(z[0]), float(z[1]))]]),
            lambda z: np.array([float(z[1]) * predator_factor(float(z[0]), float(z[1]))]),
            cocycle_scalar=lambda z: prey_factor(float(z[0]), float(z[1])),
            assembled_flat=rhs_flat),
        "y": FocalDecomposition(
            (1,), (0,),
            lambda z: np.array([[predator_factor(float(z[0]), float(z[1]))]]),
            lambda z: np.array([float(z[0]) * prey_factor(float(z[0]), float(z[1]))]),
            cocycle_scalar=lambda z: predator_factor(float(z[0]), float(z[1])),
            assembled_flat=rhs_flat),
    }
    return model, decomps


def din_prey_only_map(params: DinParams, x: float) -> float:
    """Prey map on the predator-extinct line."""
    return x * _exp(params.r * (1.0 - x / params.K))


def din_predator_only_map(params: DinParams, y: float) -> float:
    """Predator map on the prey-extinct line."""
    return y * _exp(1.0 - params.d - params.a * y / params.c)


def din_bracket_predator_extinct(params: DinParams) -> tuple[float, float]:
    """Trapping interval of the prey-only map around its hump at K/r."""
    peak = params.K / params.r
    hi = din_prey_only_map(params, peak)
    lo = din_prey_only_map(params, hi)
    return (min(lo, hi), max(lo, hi))


def din_bracket_prey_extinct(params: DinParams) -> tuple[float, float]:
    """Trapping interval of the predator-only map around its hump at c/a."""
    peak = params.c / params.a
    hi = din_predator_only_map(params, peak)
    lo = din_predator_only_map(params, hi)
    return (min(lo, hi), max(lo, hi))


@dataclass(frozen=True)
class DinThresholds:
    prey_condition: bool
    prey_margin: float
    predator_condition: bool
    predator_margin: float
    bracket_predator_extinct: tuple[float, float]
    bracket_prey_extinct: tuple[float, float]


def din_thresholds(params: DinParams) -> DinThresholds:
    """Persistence threshold conditions and the two boundary trapping intervals.

    Prey persist when r*gamma*a > beta*c*(1-d); predators persist when d < 1.
    Margins are left side minus right side of each inequality.
    """
    prey_margin = (params.r * params.gamma * params.a
                   - params.beta * params.c * (1.0 - params.d))
    predator_margin = 1.0 - params.d
    return DinThresholds(
        prey_condition=prey_margin > 0.0,
        prey_margin=prey_margin,
        predator_condition=predator_margin > 0.0,
        predator_margin=predator_margin,
        bracket_predator_extinct=din_bracket_predator_extinct(params),
        bracket_prey_extinct=din_bracket_prey_extinct(params),
    )


# ---------------------------------------------------------------------------
# Two-predator food chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FoodChainParams:
    alpha: float = 4.0
    beta: float = 4.0
    h1: float = 0.2
    h2: float = 0.2
    e1: float = 1.0
    e2: float = 1.0
    u: float = 0.2
    w: float = 0.2
    c1: float = 0.05
    c2: float = 0.05

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            _require(value > 0.0, f"{f.name} must be positive, got {value}")


def _food_chain_factors(params: FoodChainParams):
    alpha, beta = params.alpha, params.beta
    h1, h2 = params.h1, params.h2
    e1, e2 = params.e1, params.e2
    u, w, c1, c2 = params.u, params.w, params.c1, params.c2

    def prey_rate(x: float, y: float, z: float) -> float:
        return (1.0 - x) - alpha * y / (1.0 + h1 * alpha * x) - beta * z / (1.0 + h2 * beta * x)

    def predator1_rate(x: float, y: float, z: float) -> float:
        den = 1.0 + h1 * alpha * x
        return -u + e1 * alpha * x / den - e1 * alpha * y / den - c1 * z

    def predator2_rate(x: float, y: float, z: float) -> float:
        den = 1.0 + h2 * beta * x
        return -w + e2 * beta * x / den - e2 * beta * z / den - c2 * y

    return prey_rate, predator1_rate, predator2_rate


def food_chain(params: FoodChainParams) -> tuple[ModelSpec, dict[str, FocalDecomposition]]:
    """One prey, two competing predators, in Kolmogorov per-capita form."""
    prey_rate, predator1_rate, predator2_rate = _food_chain_factors(params)

    def rhs_flat(zz: tuple) -> tuple:
        x, y, z = zz[0], zz[1], zz[2]
        return (x * prey_rate(x, y, z),
                y * predator1_rate(x, y, z),
                z * predator2_rate(x, y, z))

    def rhs(zz: np.ndarray) -> np.ndarray:
        return np.array(rhs_flat((float(zz[0]), float(zz[1]), float(zz[2]))))

    def factor_scalar(rate):
        return lambda zz: rate(float(zz[0]), float(zz[1]), float(zz[2]))

    def factor_cocycle(rate):
        def cocycle(zz) -> np.ndarray:
            return np.array([[rate(float(zz[0]), float(zz[1]), float(zz[2]))]])
        return cocycle

    def complement(indices):
        def comp(zz) -> np.ndarray:
            full = rhs_flat((float(zz[0]), float(zz[1]), float(zz[2])))
            return np.array([full[i] for i in indices])
        return comp

    model = ModelSpec(
        name="food-chain-2pred", kind=CONTINUOUS, dim=3, rhs=rhs,
        component_names=("x", "y", "z"),
        params=_numeric_params(params),
        rhs_flat=rhs_flat)
    decomps = {
        "x": FocalDecomposition((0,), (1, 2), factor_cocycle(prey_rate), complement((1, 2)),
                                cocycle_scalar=factor_scalar(prey_rate), assembled_flat=rhs_flat),
        "y": FocalDecomposition((1,), (0, 2), factor_cocycle(predator1_rate), complement((0, 2)),
                                cocycle_scalar=factor_scalar(predator1_rate), assembled_flat=rhs_flat),
        "z": FocalDecomposition((2,), (0, 1), factor_cocycle(predator2_rate), complement((0, 1)),
                                cocycle_scalar=factor_scalar(predator2_rate), assembled_flat=rhs_flat),
    }
    return model, decomps


@dataclass(frozen=True)
class FoodChainBoundaryEquilibria:
    x_hat: float     # prey level with predator y extinct
    z_hat: float
    residual_hat: float
    x_tilde: float   # prey level with predator z extinct
    y_tilde: float
    residual_tilde: float


def food_chain_boundary_equilibria(params: FoodChainParams,
                                   tol: float = 1e-12) -> FoodChainBoundaryEquilibria:
    """Interior equilibria of the two planar boundary subsystems.

    Solves the nullcline systems by Newton iteration from quasi-random
    seeds and checks 0 < prey level < 1.  Raises NoBoundaryEquilibrium when
    the predator death rate exceeds its maximum uptake on the prey axis or
    when no interior root is found.
    """
    model, decomps = food_chain(params)
    x_hat, z_hat, res_hat = _planar_interior_equilibrium(
        model, decomps["y"], uptake=params.e2 * params.beta / (1.0 + params.h2 * params.beta),
        death=params.w, saturation=params.h2 * params.beta, attack=params.beta, tol=tol,
        label="y-extinct")
    x_tilde, y_tilde, res_tilde = _planar_interior_equilibrium(
        model, decomps["z"], uptake=params.e1 * params.alpha / (1.0 + params.h1 * params.alpha),
        death=params.u, saturation=params.h1 * params.alpha, attack=params.alpha, tol=tol,
        label="z-extinct")
    return FoodChainBoundaryEquilibria(x_hat, z_hat, res_hat, x_tilde, y_tilde, res_tilde)


def _planar_interior_equilibrium(model, decomposition, uptake: float, death: float,
                                 saturation: float, attack: float, tol: float,
                                 label: str) -> tuple[float, float, float]:
    if death >= uptake:
        raise NoBoundaryEquilibrium(
            f"{label} subsystem: predator death rate {death} is not below its "
            f"maximum uptake {uptake} at the prey carrying capacity")
    sub = _boundary.restrict_to_extinction_set(model, decomposition, check_points=32)
    # Surviving-predator level never exceeds the prey nullcline maximum.
    height = (1.0 + saturation) / attack
    box = [(0.0, 1.05), (0.0, 1.2 * height)]
    found = _boundary.find_equilibria(sub, box, n_starts=64, tol=tol)
    interior = [eq for eq in found
                if 1e-8 < eq.point[0] < 1.0 - 1e-10 and eq.point[1] > 1e-8]
    if not interior:
        raise NoBoundaryEquilibrium(f"{label} subsystem: no interior equilibrium found")
    best = min(interior, key=lambda eq: eq.residual)
    return float(best.point[0]), float(best.point[1]), float(best.residual)


@dataclass(frozen=True)
class FoodChainInvasionConditions:
    cond_y: bool
    margin_y: float
    cond_z: bool
    margin_z: float
    equilibria: FoodChainBoundaryEquilibria


def food_chain_invasion_conditions(
        params: FoodChainParams,
        equilibria: FoodChainBoundaryEquilibria | None = None) -> FoodChainInvasionConditions:
    """Invasion thresholds of each predator at the other's boundary equilibrium.

    Margins are conversion efficiency minus the break-even value; a positive
    margin is equivalent to a positive per-capita growth rate of the invader
    at the resident equilibrium.
    """
    eq = equilibria if equilibria is not None else food_chain_boundary_equilibria(params)
    bound_y = ((params.u + params.c1 * eq.z_hat)
               * (1.0 + params.h1 * params.alpha * eq.x_hat)
               / (params.alpha * eq.x_hat))
    bound_z = ((params.w + params.c2 * eq.y_tilde)
               * (1.0 + params.h2 * params.beta * eq.x_tilde)
               / (params.beta * eq.x_tilde))
    margin_y = params.e1 - bound_y
    margin_z = params.e2 - bound_z
    return FoodChainInvasionConditions(margin_y > 0.0, margin_y,
                                       margin_z > 0.0, margin_z, eq)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionCheck:
    label: str
    holds: bool
    margin: float


@dataclass(frozen=True)
class ModelFamily:
    """Registry entry tying parameters, builder, and analytic conditions."""

    name: str
    kind: str
    description: str
    params_cls: type
    param_names: tuple[str, ...]
    condition_labels: tuple[str, ...]
    state_bound: float
    builder: Callable
    condition_fn: Callable

    def defaults(self) -> dict[str, float]:
        base = self.params_cls()
        return {name: getattr(base, name) for name in self.param_names}

    def make_params(self, overrides: Mapping[str, float] | None = None):
        values = self.defaults()
        for key, value in (overrides or {}).items():
            if key not in values:
                raise ParamOutOfRange(
                    f"{self.name} has no parameter {key!r}; valid: {', '.join(self.param_names)}")
            values[key] = float(value)
        return self.params_cls(**values)

    def build(self, params) -> tuple[ModelSpec, dict[str, FocalDecomposition]]:
        return self.builder(params)

    def conditions(self, params) -> list[ConditionCheck]:
        return self.condition_fn(params)


def _ackleh_conditions(params: AcklehParams) -> list[ConditionCheck]:
    r0 = _ackleh_season_growth(params, 0.0)
    checks = [ConditionCheck("r0>1", r0 > 1.0, r0 - 1.0)]
    try:
        rates = ackleh_growth_rates(params)
        checks.append(ConditionCheck("ri>1", rates.invasion_rate > 1.0,
                                     rates.invasion_rate - 1.0))
    except NoInteriorPreyEquilibrium:
        checks.append(ConditionCheck("ri>1", False, float("nan")))
    return checks


def _din_conditions(params: DinParams) -> list[ConditionCheck]:
    th = din_thresholds(params)
    return [
        ConditionCheck("d<1", th.predator_condition, th.predator_margin),
        ConditionCheck("r*gamma*a>beta*c*(1-d)", th.prey_condition, th.prey_margin),
    ]


def _food_chain_conditions(params: FoodChainParams) -> list[ConditionCheck]:
    labels = ("e1>(u+c1*z_hat)*(1+h1*alpha*x_hat)/(alpha*x_hat)",
              "e2>(w+c2*y_tilde)*(1+h2*beta*x_tilde)/(beta*x_tilde)")
    try:
        inv = food_chain_invasion_conditions(params)
    except NoBoundaryEquilibrium:
        return [ConditionCheck(labels[0], False, float("nan")),
                ConditionCheck(labels[1], False, float("nan"))]
    return [ConditionCheck(labels[0], inv.cond_y, inv.margin_y),
            ConditionCheck(labels[1], inv.cond_z, inv.margin_z)]


REGISTRY: dict[str, ModelFamily] = {
    "ackleh-composite": ModelFamily(
        name="ackleh-composite", kind=DISCRETE,
        description="composite seasonal prey/predator map (components n, p)",
        params_cls=AcklehParams,
        param_names=("s_n", "s_p", "kappa", "b_max", "omega", "f0"),
        condition_labels=("r0>1", "ri>1"),
        state_bound=20.0,
        builder=ackleh_composite,
        condition_fn=_ackleh_conditions),
    "din-predprey": ModelFamily(
        name="din-predprey", kind=DISCRETE,
        description="Ricker-type prey/predator map (components x, y)",
        params_cls=DinParams,
        param_names=("r", "K", "beta", "gamma", "a", "b", "c", "d"),
        condition_labels=("d<1", "r*gamma*a>beta*c*(1-d)"),
        state_bound=50.0,
        builder=din_model,
        condition_fn=_din_conditions),
    "food-chain-2pred": ModelFamily(
        name="food-chain-2pred", kind=CONTINUOUS,
        description="logistic prey with two competing predators (components x, y, z)",
        params_cls=FoodChainParams,
        param_names=("alpha", "beta", "h1", "h2", "e1", "e2", "u", "w", "c1", "c2"),
        condition_labels=("e1>(u+c1*z_hat)*(1+h1*alpha*x_hat)/(alpha*x_hat)",
                          "e2>(w+c2*y_tilde)*(1+h2*beta*x_tilde)/(beta*x_tilde)"),
        state_bound=2.0,
        builder=food_chain,
        condition_fn=_food_chain_conditions),
}


def get_family(name: str) -> ModelFamily:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownModel(
            f"unknown model {name!r}; registered models: {', '.join(sorted(REGISTRY))}") from None


def _numeric_params(params) -> dict[str, float]:
    return {f.name: getattr(params, f.name) for f in fields(params)
            if isinstance(getattr(params, f.name), (int, float))}
