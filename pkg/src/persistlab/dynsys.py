"""State-space models on the nonnegative orthant and their semiflows.

A model is either a map (discrete time, integer steps) or a vector field
(continuous time, integrated with fixed-step classical RK4).  A focal
decomposition splits the state into a complement block x and a focal block y
and supplies the matrix function A(z) with focal update A(z)*y; stepping
through the decomposition keeps an exactly-zero focal block exactly zero,
which is what makes the extinction set truly invariant in floating point.

Hot loops run on plain float tuples when a model supplies flat evaluators
(the built-in families all do); the array-based ``rhs`` remains the
interface of record and the flat form must compute the same expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InconsistentDecomposition, NegativeState, NonFiniteState, StepRejected

DISCRETE = "discrete"
CONTINUOUS = "continuous"

DEFAULT_DT = 1e-3
MAX_STEP = 0.5

# Components inside (-NEG_*, 0) are treated as round-off and clamped to zero;
# anything below is a genuine orthant violation.
NEG_TOL_DISCRETE = 1e-9
NEG_TOL_CONTINUOUS_REL = 1e-6

_INF = math.inf


@dataclass(frozen=True)
class ModelSpec:
    """A named dynamical system on the nonnegative orthant.

    ``rhs`` is the next-state map for discrete models and the vector field
    for continuous ones; it must be defined everywhere on the orthant.
    ``rhs_flat``, when given, is the same function on float tuples.
    """

    name: str
    kind: str
    dim: int
    rhs: Callable[[np.ndarray], np.ndarray]
    component_names: tuple[str, ...]
    params: Mapping[str, float] = field(default_factory=dict)
    rhs_flat: Callable[[tuple], tuple] | None = None

    def __post_init__(self):
        if self.kind not in (DISCRETE, CONTINUOUS):
            raise ValueError(f"kind must be {DISCRETE!r} or {CONTINUOUS!r}, got {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if len(self.component_names) != self.dim:
            raise ValueError("component_names must have one label per dimension")


@dataclass(frozen=True)
class FocalDecomposition:
    """Split of the state into complement block x and focal block y.

    ``cocycle(z)`` returns the q x q matrix A(z) with focal update A(z)*y,
    and ``complement_map(z)`` the p-dimensional update of the complement
    block, so that (complement_map(z), cocycle(z) @ y) reproduces the model's
    own map on the orthant.  ``cocycle_scalar`` (q = 1) and
    ``assembled_flat`` (full next state with the focal block evaluated in
    factored form) are optional flat variants for the hot loops.
    """

    focal_indices: tuple[int, ...]
    complement_indices: tuple[int, ...]
    cocycle: Callable[[np.ndarray], np.ndarray]
    complement_map: Callable[[np.ndarray], np.ndarray]
    cocycle_scalar: Callable[[Sequence[float]], float] | None = None
    assembled_flat: Callable[[tuple], tuple] | None = None

    def __post_init__(self):
        overlap = set(self.focal_indices) & set(self.complement_indices)
        if overlap:
            raise ValueError(f"focal and complement indices overlap: {sorted(overlap)}")

    @property
    def focal_dim(self) -> int:
        return len(self.focal_indices)

    @property
    def complement_dim(self) -> int:
        return len(self.complement_indices)

    def split(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (complement block, focal block) of a full state."""
        z = np.asarray(z, dtype=float)
        return z[list(self.complement_indices)], z[list(self.focal_indices)]

    def embed(self, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
        """Assemble a full state from complement and focal blocks."""
        z = np.empty(len(self.focal_indices) + len(self.complement_indices))
        z[list(self.complement_indices)] = x
        z[list(self.focal_indices)] = y
        return z

    def embed_boundary(self, x: Sequence[float]) -> np.ndarray:
        """Embed a complement-block point with the focal block pinned to zero."""
        return self.embed(x, np.zeros(self.focal_dim))


@dataclass
class Trajectory:
    """Recorded orbit samples: strictly increasing times, one state per time."""

    model_name: str
    kind: str
    times: np.ndarray
    states: np.ndarray
    stride: float

    def __len__(self) -> int:
        return len(self.times)


# ---------------------------------------------------------------------------
# Update functions: array interface and flat fast path
# ---------------------------------------------------------------------------

def _assembled_rhs(model: ModelSpec, decomposition: FocalDecomposition | None):
    """Model map/field on arrays, routed through the decomposition when given.

    The focal block is evaluated as A(z) @ y so an exact zero stays an exact
    zero; consistency with ``model.rhs`` is a checked invariant, not assumed.
    """
    if decomposition is None:
        return model.rhs
    foc = list(decomposition.focal_indices)
    comp = list(decomposition.complement_indices)
    cocycle = decomposition.cocycle
    complement_map = decomposition.complement_map
    dim = model.dim

    def rhs(z: np.ndarray) -> np.ndarray:
        out = np.empty(dim)
        out[comp] = complement_map(z)
        out[foc] = np.asarray(cocycle(z), dtype=float) @ z[foc]
        return out

    return rhs


def _flat_update(model: ModelSpec, decomposition: FocalDecomposition | None):
    """Next-state/field evaluation on float tuples.

    Uses the model's flat evaluator when present (the built-ins carry
    factored forms whose focal zeros are exact); otherwise wraps the array
    path, keeping semantics identical at tuple-conversion cost.
    """
    if decomposition is not None and decomposition.assembled_flat is not None:
        return decomposition.assembled_flat
    if decomposition is None and model.rhs_flat is not None:
        return model.rhs_flat
    array_fn = _assembled_rhs(model, decomposition)

    def flat(z: tuple) -> tuple:
        return tuple(float(v) for v in array_fn(np.asarray(z, dtype=float)))

    return flat


def _check_finite(z: np.ndarray, model: ModelSpec) -> None:
    if not np.all(np.isfinite(z)):
        raise NonFiniteState(f"{model.name}: update produced non-finite components {z!r}")


def _clamp_discrete(z: np.ndarray, model: ModelSpec) -> np.ndarray:
    low = z.min()
    if low < 0.0:
        if low < -NEG_TOL_DISCRETE:
            raise NegativeState(f"{model.name}: component {low!r} below -{NEG_TOL_DISCRETE}")
        np.maximum(z, 0.0, out=z)
    return z


def _clamp_continuous(out: np.ndarray, z_in: np.ndarray, model: ModelSpec) -> np.ndarray:
    low = out.min()
    if low < 0.0:
        threshold = NEG_TOL_CONTINUOUS_REL * (1.0 + float(np.linalg.norm(z_in)))
        if low < -threshold:
            raise StepRejected(
                f"{model.name}: component {low!r} undershoots the orthant "
                f"beyond -{threshold!r}")
        np.maximum(out, 0.0, out=out)
    return out


def _clamp_flat_discrete(z: tuple, model: ModelSpec) -> tuple:
    for v in z:
        if not (v >= 0.0) or v == _INF:  # a NaN fails the comparison too
            break
    else:
        return z
    cleaned = []
    for v in z:
        if not math.isfinite(v):
            raise NonFiniteState(f"{model.name}: update produced non-finite components {z!r}")
        if v < 0.0:
            if v < -NEG_TOL_DISCRETE:
                raise NegativeState(f"{model.name}: component {v!r} below -{NEG_TOL_DISCRETE}")
            v = 0.0
        cleaned.append(v)
    return tuple(cleaned)


def _clamp_flat_continuous(z_next: tuple, z_in: tuple, model: ModelSpec) -> tuple:
    for v in z_next:
        if not (v >= 0.0) or v == _INF:
            break
    else:
        return z_next
    norm = math.sqrt(math.fsum(v * v for v in z_in))
    threshold = NEG_TOL_CONTINUOUS_REL * (1.0 + norm)
    cleaned = []
    for v in z_next:
        if not math.isfinite(v):
            raise NonFiniteState(f"{model.name}: update produced non-finite components {z_next!r}")
        if v < 0.0:
            if v < -threshold:
                raise StepRejected(
                    f"{model.name}: component {v!r} undershoots the orthant "
                    f"beyond -{threshold!r}")
            v = 0.0
        cleaned.append(v)
    return tuple(cleaned)


def _rk4_step(f, z: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(z)
    k2 = f(z + 0.5 * dt * k1)
    k3 = f(z + 0.5 * dt * k2)
    k4 = f(z + dt * k3)
    return z + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _rk4_flat(f, z: tuple, dt: float) -> tuple:
    half = 0.5 * dt
    n = len(z)
    k1 = f(z)
    k2 = f(tuple(z[i] + half * k1[i] for i in range(n)))
    k3 = f(tuple(z[i] + half * k2[i] for i in range(n)))
    k4 = f(tuple(z[i] + dt * k3[i] for i in range(n)))
    sixth = dt / 6.0
    return tuple(z[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(n))


def _as_flat_state(z) -> tuple:
    return tuple(float(v) for v in np.asarray(z, dtype=float))


# ---------------------------------------------------------------------------
# Public stepping operations
# ---------------------------------------------------------------------------

def step_discrete(model: ModelSpec, z: np.ndarray,
                  decomposition: FocalDecomposition | None = None) -> np.ndarray:
    """One application of a discrete model's map."""
    if model.kind != DISCRETE:
        raise ValueError(f"step_discrete needs a discrete model, got {model.kind}")
    z = np.asarray(z, dtype=float)
    out = _assembled_rhs(model, decomposition)(z)
    _check_finite(out, model)
    return _clamp_discrete(out, model)


def integrate_step(model: ModelSpec, z: np.ndarray, dt: float,
                   decomposition: FocalDecomposition | None = None) -> np.ndarray:
    """One classical RK4 step of a continuous model."""
    if model.kind != CONTINUOUS:
        raise ValueError(f"integrate_step needs a continuous model, got {model.kind}")
    if not 0.0 < dt <= MAX_STEP:
        raise ValueError(f"dt must lie in (0, {MAX_STEP}], got {dt}")
    z = np.asarray(z, dtype=float)
    out = _rk4_step(_assembled_rhs(model, decomposition), z, dt)
    _check_finite(out, model)
    return _clamp_continuous(out, z, model)


def _split_time(t: float, dt: float) -> tuple[int, float]:
    n_full = int(math.floor(t / dt + 1e-9))
    remainder = t - n_full * dt
    if remainder <= 1e-12 * max(1.0, t):
        remainder = 0.0
    return n_full, remainder


def _resolve_dt(dt: float | None) -> float:
    dt = DEFAULT_DT if dt is None else dt
    if not 0.0 < dt <= MAX_STEP:
        raise ValueError(f"dt must lie in (0, {MAX_STEP}], got {dt}")
    return dt


def semiflow(model: ModelSpec, z0: np.ndarray, t: float,
             decomposition: FocalDecomposition | None = None,
             dt: float | None = None) -> np.ndarray:
    """Evaluate the state semiflow at time t from z0.

    Discrete models iterate the map t times (t a nonnegative integer);
    continuous models integrate with fixed steps of size dt, finishing with
    one shorter step when t is not a multiple of dt.
    """
    if t < 0:
        raise ValueError("semiflow time must be nonnegative")
    if t == 0:
        return np.array(z0, dtype=float)
    update = _flat_update(model, decomposition)
    z = _as_flat_state(z0)
    if model.kind == DISCRETE:
        n = int(round(t))
        if abs(t - n) > 1e-9:
            raise ValueError(f"discrete time must be an integer, got {t}")
        for _ in range(n):
            z = _clamp_flat_discrete(update(z), model)
        return np.array(z)
    dt = _resolve_dt(dt)
    n_full, remainder = _split_time(t, dt)
    for _ in range(n_full):
        z = _clamp_flat_continuous(_rk4_flat(update, z, dt), z, model)
    if remainder:
        z = _clamp_flat_continuous(_rk4_flat(update, z, remainder), z, model)
    return np.array(z)


def simulate(model: ModelSpec, z0: np.ndarray, horizon: float, stride: float = 1,
             decomposition: FocalDecomposition | None = None,
             dt: float | None = None) -> Trajectory:
    """Record an orbit every ``stride`` time units from 0 out to ``horizon``.

    The first entry is (0, z0); recording continues to the first stride
    multiple at or past the horizon.  ``horizon = 0`` yields the single
    initial entry.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    update = _flat_update(model, decomposition)
    z = _as_flat_state(z0)
    if model.kind == DISCRETE:
        stride_n = int(round(stride))
        if stride_n < 1:
            raise ValueError("stride must be at least one step for discrete models")
        n_records = 0 if horizon == 0 else math.ceil(horizon / stride_n)
        times = [0]
        states = [z]
        for i in range(n_records):
            for _ in range(stride_n):
                z = _clamp_flat_discrete(update(z), model)
            times.append((i + 1) * stride_n)
            states.append(z)
        return Trajectory(model.name, model.kind, np.asarray(times),
                          np.asarray(states, dtype=float), stride_n)
    dt = _resolve_dt(dt)
    if stride < dt:
        raise ValueError("stride must be at least dt for continuous models")
    n_records = 0 if horizon == 0 else math.ceil(horizon / stride - 1e-9)
    n_full, remainder = _split_time(stride, dt)
    times = [0.0]
    states = [z]
    for i in range(n_records):
        for _ in range(n_full):
            z = _clamp_flat_continuous(_rk4_flat(update, z, dt), z, model)
        if remainder:
            z = _clamp_flat_continuous(_rk4_flat(update, z, remainder), z, model)
        times.append((i + 1) * stride)
        states.append(z)
    return Trajectory(model.name, model.kind, np.asarray(times, dtype=float),
                      np.asarray(states, dtype=float), stride)


def sample_orthant_points(dim: int, n_points: int, bound: float, seed: int = 0) -> np.ndarray:
    """Deterministic pseudo-random points in [0, bound]^dim used by checks."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, bound, size=(n_points, dim))


def validate_decomposition(model: ModelSpec, decomposition: FocalDecomposition,
                           n_points: int = 1000, bound: float = 10.0, seed: int = 0,
                           tol: float = 1e-12) -> None:
    """Check a decomposition against the model on sampled orthant points.

    Verifies the index partition, the focal-block identity
    |focal(rhs(z)) - A(z) y| <= tol * (1 + |y|), and the sign structure of
    A(x, 0): entrywise nonnegative for maps, nonnegative off the diagonal
    for flows (whose solution operators are then automatically
    nonnegative).  Raises InconsistentDecomposition on the first violation.
    """
    indices = sorted(decomposition.focal_indices + decomposition.complement_indices)
    if indices != list(range(model.dim)):
        raise InconsistentDecomposition(
            f"{model.name}: index blocks {decomposition.focal_indices} + "
            f"{decomposition.complement_indices} do not partition 0..{model.dim - 1}")
    foc = list(decomposition.focal_indices)
    off_diagonal = ~np.eye(len(foc), dtype=bool)
    for z in sample_orthant_points(model.dim, n_points, bound, seed):
        y = z[foc]
        full = np.asarray(model.rhs(z), dtype=float)
        a = np.asarray(decomposition.cocycle(z), dtype=float)
        gap = np.max(np.abs(full[foc] - a @ y))
        if not gap <= tol * (1.0 + float(np.max(np.abs(y), initial=0.0))):
            raise InconsistentDecomposition(
                f"{model.name}: focal block of rhs differs from A(z)y by {gap!r} at z={z!r}")
        z0 = z.copy()
        z0[foc] = 0.0
        a0 = np.asarray(decomposition.cocycle(z0), dtype=float)
        bad = np.any(a0 < 0.0) if model.kind == DISCRETE else np.any(a0[off_diagonal] < 0.0)
        if bad:
            raise InconsistentDecomposition(
                f"{model.name}: cocycle sign structure fails on the extinction set at z={z0!r}")
