"""Cocycle products along orbits, Lyapunov exponents, and spectral radii.

The focal linearization along an orbit is the matrix product (maps) or the
matrix variational solution (flows) of the cocycle A evaluated on the state
trajectory, started from the identity.  Products are renormalized by their
operator norm with the scaling logs accumulated separately, so arbitrarily
long horizons neither overflow nor underflow; a finite-horizon running
average of the accumulated log stands in for the limiting growth rate, with
checkpoint diagnostics so callers can see it stabilize.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynsys import (DISCRETE, DEFAULT_DT, FocalDecomposition, ModelSpec,
                     _as_flat_state, _assembled_rhs, _clamp_flat_continuous,
                     _clamp_flat_discrete, _flat_update, semiflow)
from .errors import DegenerateProduct, NoConvergence, NonFiniteMatrix, NotPeriodic

MIN_LYAPUNOV_HORIZON = 1000.0
QR_TOL = 1e-12
QR_MAX_SWEEPS = 10_000


class _KahanSum:
    """Compensated accumulator; keeps million-term log sums at ulp accuracy."""

    __slots__ = ("total", "carry")

    def __init__(self):
        self.total = 0.0
        self.carry = 0.0

    def add(self, x: float) -> None:
        y = x - self.carry
        t = self.total + y
        self.carry = (t - self.total) - y
        self.total = t


def operator_norm(m: np.ndarray) -> float:
    """Spectral operator norm; closed form for q <= 2, power iteration above."""
    m = np.asarray(m, dtype=float)
    q = m.shape[0]
    if q == 1:
        return abs(float(m[0, 0]))
    if q == 2:
        g = m.T @ m
        trace = g[0, 0] + g[1, 1]
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        disc = max(trace * trace - 4.0 * det, 0.0)
        return math.sqrt(max(0.5 * (trace + math.sqrt(disc)), 0.0))
    fro = float(np.linalg.norm(m))
    if fro == 0.0:
        return 0.0
    scaled = m / fro
    g = scaled.T @ scaled
    v = np.full(q, 1.0 / math.sqrt(q))
    value = 0.0
    for _ in range(200):
        w = g @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v_next = w / nw
        if abs(nw - value) <= 1e-14 * max(1.0, nw):
            value = nw
            break
        value = nw
        v = v_next
    return fro * math.sqrt(value)


def cocycle_matrix(decomposition: FocalDecomposition, z: np.ndarray) -> np.ndarray:
    """Evaluate the focal cocycle matrix A(z), guarding against non-finite entries."""
    a = np.asarray(decomposition.cocycle(np.asarray(z, dtype=float)), dtype=float)
    if not np.all(np.isfinite(a)):
        raise NonFiniteMatrix(f"cocycle matrix has non-finite entries at z={z!r}: {a!r}")
    return a


@dataclass
class CocycleProduct:
    """Renormalized fundamental solution of the focal linearization.

    The true product is exp(log_norm) * normalized_matrix; the normalized
    factor has unit operator norm unless the product degenerated to zero.
    """

    log_norm: float
    normalized_matrix: np.ndarray
    steps: float
    base_point: np.ndarray
    degenerate: bool = False

    def reconstruct(self) -> np.ndarray:
        return math.exp(self.log_norm) * self.normalized_matrix


@dataclass
class LyapunovEstimate:
    """Finite-horizon average growth rate with convergence diagnostics.

    ``diagnostics`` holds (time, running average) pairs at logarithmically
    spaced checkpoints; ``tail_max`` is the most conservative value over the
    final decade and is what certification compares against zero.
    """

    value: float
    horizon: float
    direction: np.ndarray | str
    diagnostics: list[tuple[float, float]]

    def tail_max(self) -> float:
        cutoff = self.horizon / 10.0
        candidates = [avg for t, avg in self.diagnostics if t >= cutoff]
        candidates.append(self.value)
        return max(candidates)


def _scalar_cocycle(decomposition: FocalDecomposition):
    """Cocycle as a float function of a (tuple) state, for focal dimension one."""
    if decomposition.cocycle_scalar is not None:
        return decomposition.cocycle_scalar
    cocycle = decomposition.cocycle

    def value(z) -> float:
        a = cocycle(np.asarray(z, dtype=float))
        return float(a[0, 0]) if getattr(a, "ndim", 0) == 2 else float(a)

    return value


def _checkpoint_steps(n_steps: int, count: int = 32) -> list[int]:
    if n_steps <= 1:
        return [n_steps]
    lo = min(10, n_steps)
    marks = np.unique(np.rint(np.geomspace(lo, n_steps, count)).astype(int))
    return [int(m) for m in marks if m >= 1]


def _scan_discrete(model: ModelSpec, decomposition: FocalDecomposition, z0: np.ndarray,
                   n_steps: int, checkpoints: Sequence[int], direction: np.ndarray | None):
    """Left-multiply the cocycle along the orbit with per-step renormalization."""
    update = _flat_update(model, decomposition)
    q = decomposition.focal_dim
    z = _as_flat_state(z0)
    log_norm = _KahanSum()
    marks = set(checkpoints)
    records: list[tuple[float, float]] = []

    if q == 1:
        value = _scalar_cocycle(decomposition)
        sign = 1.0
        for k in range(1, n_steps + 1):
            a = value(z)
            if a == 0.0:
                raise DegenerateProduct(f"cocycle value is exactly zero at step {k}")
            if not math.isfinite(a):
                raise NonFiniteMatrix(f"cocycle value non-finite at step {k}, z={z!r}")
            if a < 0.0:
                sign = -sign
            log_norm.add(math.log(abs(a)))
            z = _clamp_flat_discrete(update(z), model)
            if k in marks:
                records.append((float(k), _running_average_scalar(log_norm.total, direction, k)))
        matrix = np.array([[sign]])
        return log_norm.total, matrix, records

    matrix = np.eye(q)
    for k in range(1, n_steps + 1):
        a = cocycle_matrix(decomposition, np.asarray(z))
        matrix = a @ matrix
        scale = operator_norm(matrix)
        if scale == 0.0:
            raise DegenerateProduct(f"product operator norm underflowed to zero at step {k}")
        matrix /= scale
        log_norm.add(math.log(scale))
        z = _clamp_flat_discrete(update(z), model)
        if k in marks:
            records.append((float(k), _running_average(log_norm.total, matrix, direction, k)))
    return log_norm.total, _final_normalize(matrix), records


def _scan_continuous(model: ModelSpec, decomposition: FocalDecomposition, z0: np.ndarray,
                     horizon: float, dt: float, renorm_every: int,
                     checkpoints: Sequence[int], direction: np.ndarray | None):
    """Integrate the matrix variational equation on the state's RK4 time grid."""
    update = _flat_update(model, decomposition)
    q = decomposition.focal_dim
    scalar = _scalar_cocycle(decomposition) if q == 1 else None
    cocycle = decomposition.cocycle
    z = _as_flat_state(z0)
    dim = len(z)
    n_full = int(math.floor(horizon / dt + 1e-9))
    remainder = horizon - n_full * dt
    do_partial = remainder > 1e-12 * max(1.0, horizon)
    log_norm = _KahanSum()
    marks = set(checkpoints)
    records: list[tuple[float, float]] = []
    matrix = np.array([[1.0]]) if q == 1 else np.eye(q)
    rng_dim = range(dim)

    def coupled_step_scalar(z: tuple, p: float, h: float) -> tuple[tuple, float]:
        half = 0.5 * h
        k1z = update(z)
        k1p = scalar(z) * p
        z2 = tuple(z[i] + half * k1z[i] for i in rng_dim)
        k2z = update(z2)
        k2p = scalar(z2) * (p + half * k1p)
        z3 = tuple(z[i] + half * k2z[i] for i in rng_dim)
        k3z = update(z3)
        k3p = scalar(z3) * (p + half * k2p)
        z4 = tuple(z[i] + h * k3z[i] for i in rng_dim)
        k4z = update(z4)
        k4p = scalar(z4) * (p + h * k3p)
        sixth = h / 6.0
        z_next = tuple(z[i] + sixth * (k1z[i] + 2.0 * (k2z[i] + k3z[i]) + k4z[i])
                       for i in rng_dim)
        return z_next, p + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)

    def coupled_step_matrix(z: tuple, matrix: np.ndarray, h: float):
        half = 0.5 * h
        za = np.asarray(z)
        k1z = update(z)
        k1m = cocycle(za) @ matrix
        z2 = tuple(z[i] + half * k1z[i] for i in rng_dim)
        k2z = update(z2)
        k2m = cocycle(np.asarray(z2)) @ (matrix + half * k1m)
        z3 = tuple(z[i] + half * k2z[i] for i in rng_dim)
        k3z = update(z3)
        k3m = cocycle(np.asarray(z3)) @ (matrix + half * k2m)
        z4 = tuple(z[i] + h * k3z[i] for i in rng_dim)
        k4z = update(z4)
        k4m = cocycle(np.asarray(z4)) @ (matrix + h * k3m)
        sixth = h / 6.0
        z_next = tuple(z[i] + sixth * (k1z[i] + 2.0 * (k2z[i] + k3z[i]) + k4z[i])
                       for i in rng_dim)
        return z_next, matrix + sixth * (k1m + 2.0 * (k2m + k3m) + k4m)

    def renormalize(matrix):
        scale = operator_norm(matrix)
        if scale == 0.0:
            raise DegenerateProduct("variational product underflowed to zero")
        log_norm.add(math.log(scale))
        return matrix / scale

    p_scalar = 1.0
    total_steps = n_full + (1 if do_partial else 0)
    for k in range(1, total_steps + 1):
        h = dt if k <= n_full else remainder
        if scalar is not None:
            z_next, p_scalar = coupled_step_scalar(z, p_scalar, h)
            if not math.isfinite(p_scalar):
                raise NonFiniteMatrix(f"variational product became non-finite at step {k}")
        else:
            z_next, matrix = coupled_step_matrix(z, matrix, h)
            if not np.all(np.isfinite(matrix)):
                raise NonFiniteMatrix(f"variational product became non-finite at step {k}")
        z = _clamp_flat_continuous(z_next, z, model)
        if k % renorm_every == 0:
            if scalar is not None:
                if p_scalar == 0.0:
                    raise DegenerateProduct("variational product underflowed to zero")
                log_norm.add(math.log(abs(p_scalar)))
                p_scalar = math.copysign(1.0, p_scalar)
            else:
                matrix = renormalize(matrix)
        if k in marks:
            t = k * dt if k <= n_full else horizon
            current = np.array([[p_scalar]]) if scalar is not None else matrix
            records.append((t, _running_average(log_norm.total, current, direction, t)))
    if scalar is not None:
        matrix = np.array([[p_scalar]])
    matrix = renormalize(matrix)
    return log_norm.total, _final_normalize(matrix), records


def _running_average(log_total: float, matrix: np.ndarray, direction: np.ndarray | None,
                     t: float) -> float:
    if direction is None:
        growth = operator_norm(matrix)
    else:
        growth = float(np.linalg.norm(matrix @ direction))
    if growth == 0.0:
        return -math.inf
    return (log_total + math.log(growth)) / t


def _running_average_scalar(log_total: float, direction: np.ndarray | None, t: float) -> float:
    if direction is not None:
        mag = abs(float(np.asarray(direction).ravel()[0]))
        if mag == 0.0:
            return -math.inf
        return (log_total + math.log(mag)) / t
    return log_total / t


def _final_normalize(matrix: np.ndarray) -> np.ndarray:
    scale = operator_norm(matrix)
    return matrix if scale == 0.0 else matrix / scale


def fundamental_solution(model: ModelSpec, decomposition: FocalDecomposition,
                         z0: np.ndarray, t: float, dt: float | None = None,
                         renorm_every: int = 100) -> CocycleProduct:
    """Fundamental solution of the focal linearization along the orbit of z0.

    Discrete models left-multiply the cocycle with renormalization every
    step; continuous models integrate the matrix variational equation with
    RK4 on the state's own fixed time grid, renormalizing every
    ``renorm_every`` steps.  Time zero returns the identity.
    """
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    z0 = np.asarray(z0, dtype=float)
    q = decomposition.focal_dim
    if t == 0:
        return CocycleProduct(0.0, np.eye(q), 0, z0.copy())
    if model.kind == DISCRETE:
        n = int(round(t))
        log_total, matrix, _ = _scan_discrete(model, decomposition, z0, n, (), None)
        return CocycleProduct(log_total, matrix, n, z0.copy())
    dt = DEFAULT_DT if dt is None else dt
    log_total, matrix, _ = _scan_continuous(model, decomposition, z0, t, dt,
                                            renorm_every, (), None)
    return CocycleProduct(log_total, matrix, t, z0.copy())


def lyapunov_exponent(model: ModelSpec, decomposition: FocalDecomposition,
                      z0: np.ndarray, horizon: float,
                      direction: np.ndarray | None = None,
                      burn_in_on_boundary: float = 0,
                      dt: float | None = None,
                      renorm_every: int = 100) -> LyapunovEstimate:
    """Average per-time log growth of the focal linearization along an orbit.

    The default direction is the dominant one realized by the renormalized
    product itself; passing an explicit vector evaluates the growth of that
    direction instead.  ``burn_in_on_boundary`` advances the base point
    before accumulation starts, which settles it onto its attractor.
    """
    if horizon < MIN_LYAPUNOV_HORIZON:
        raise ValueError(
            f"horizon must be at least {MIN_LYAPUNOV_HORIZON:g} "
            f"({'steps' if model.kind == DISCRETE else 'time units'}), got {horizon}")
    z0 = np.asarray(z0, dtype=float)
    if direction is not None:
        direction = np.asarray(direction, dtype=float).reshape(decomposition.focal_dim)
    if burn_in_on_boundary:
        z0 = semiflow(model, z0, burn_in_on_boundary, decomposition, dt=dt)
    if model.kind == DISCRETE:
        n = int(round(horizon))
        checkpoints = _checkpoint_steps(n)
        log_total, matrix, records = _scan_discrete(model, decomposition, z0, n,
                                                    checkpoints, direction)
        value = _final_value(log_total, matrix, direction, n)
        return LyapunovEstimate(value, float(n),
                                direction if direction is not None else "dominant", records)
    dt = DEFAULT_DT if dt is None else dt
    n_steps = int(math.floor(horizon / dt + 1e-9))
    checkpoints = _checkpoint_steps(n_steps)
    log_total, matrix, records = _scan_continuous(model, decomposition, z0, horizon, dt,
                                                  renorm_every, checkpoints, direction)
    value = _final_value(log_total, matrix, direction, horizon)
    return LyapunovEstimate(value, horizon,
                            direction if direction is not None else "dominant", records)


def _final_value(log_total: float, matrix: np.ndarray, direction: np.ndarray | None,
                 t: float) -> float:
    if direction is None:
        growth = operator_norm(matrix)
    else:
        growth = float(np.linalg.norm(matrix @ direction))
    if growth == 0.0:
        return -math.inf
    return (log_total + math.log(growth)) / t


# ---------------------------------------------------------------------------
# Spectra of small matrices
# ---------------------------------------------------------------------------

def _eigenvalues_2x2(m: np.ndarray) -> tuple[complex, complex]:
    a, b, c, d = float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1])
    trace, det = a + d, a * d - b * c
    disc = trace * trace - 4.0 * det
    if disc >= 0.0:
        root = math.sqrt(disc)
        return complex(0.5 * (trace + root)), complex(0.5 * (trace - root))
    root = math.sqrt(-disc)
    return complex(0.5 * trace, 0.5 * root), complex(0.5 * trace, -0.5 * root)


def _wilkinson_shift(block: np.ndarray) -> complex:
    """Trailing-2x2 eigenvalue closest to the corner entry (complex-safe)."""
    a, b = complex(block[-2, -2]), complex(block[-2, -1])
    c, d = complex(block[-1, -2]), complex(block[-1, -1])
    trace, det = a + d, a * d - b * c
    root = cmath.sqrt(trace * trace - 4.0 * det)
    lam1, lam2 = 0.5 * (trace + root), 0.5 * (trace - root)
    return lam1 if abs(lam1 - d) <= abs(lam2 - d) else lam2


def _hessenberg(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    h = a.astype(complex).copy()
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            continue
        v /= nv
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
    return h


def eigenvalues(m: np.ndarray) -> list[complex]:
    """Eigenvalues of a small dense matrix by shifted QR iteration.

    Closed forms handle sizes one and two; larger matrices (up to eight)
    are reduced to Hessenberg form and iterated with Wilkinson shifts until
    each subdiagonal entry falls below 1e-12 of its neighbors, deflating
    from the bottom.  Raises NoConvergence after 10^4 sweeps.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    q = m.shape[0]
    if q > 8:
        raise ValueError("eigenvalue iteration supports at most 8x8 matrices")
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrix("matrix has non-finite entries")
    if q == 1:
        return [complex(m[0, 0])]
    if q == 2:
        return list(_eigenvalues_2x2(m))
    scale = float(np.linalg.norm(m))
    if scale == 0.0:
        return [0j] * q
    h = _hessenberg(m / scale)
    eigs: list[complex] = []
    end = q - 1
    sweeps = 0
    stagnation = 0
    while end > 0:
        # Deflate converged trailing entries.
        sub = abs(h[end, end - 1])
        if sub <= QR_TOL * max(abs(h[end - 1, end - 1]) + abs(h[end, end]), 0.1):
            eigs.append(complex(h[end, end]))
            end -= 1
            stagnation = 0
            continue
        if sweeps >= QR_MAX_SWEEPS:
            raise NoConvergence(f"QR iteration did not converge in {QR_MAX_SWEEPS} sweeps")
        block = h[:end + 1, :end + 1]
        shift = _wilkinson_shift(block)
        if stagnation and stagnation % 40 == 0:
            shift = block[-1, -1] + 1.5 * abs(h[end, end - 1])
        qf, rf = np.linalg.qr(block - shift * np.eye(end + 1))
        h[:end + 1, :end + 1] = rf @ qf + shift * np.eye(end + 1)
        sweeps += 1
        stagnation += 1
    eigs.append(complex(h[0, 0]))
    return [scale * e for e in eigs]


def spectral_radius(m: np.ndarray) -> float:
    """Largest eigenvalue modulus of a finite matrix of size up to eight."""
    return max(abs(e) for e in eigenvalues(m))


def spectral_abscissa(m: np.ndarray) -> float:
    """Largest eigenvalue real part; the growth rate of a linear flow."""
    return max(e.real for e in eigenvalues(m))


@dataclass(frozen=True)
class OrbitGrowth:
    per_step_radius: float
    product_radius: float
    period: int


def spectral_radius_at_orbit(model: ModelSpec, decomposition: FocalDecomposition,
                             orbit_points: Sequence[np.ndarray],
                             cycle_tol: float = 1e-6) -> OrbitGrowth:
    """Spectral radius of the cocycle product around a boundary periodic orbit.

    ``orbit_points`` are full states with the focal block zero, consecutive
    under the map, closing after the last point; a fixed point is the
    period-one case.  The raw product radius is reported together with its
    per-step normalization (the k-th root).
    """
    points = [np.asarray(p, dtype=float) for p in orbit_points]
    if not points:
        raise ValueError("orbit_points must be nonempty")
    foc = list(decomposition.focal_indices)
    for p in points:
        if np.max(np.abs(p[foc]), initial=0.0) > 1e-12:
            raise NotPeriodic(f"orbit point {p!r} is not on the extinction set")
    k = len(points)
    if model.kind == DISCRETE:
        rhs = _assembled_rhs(model, decomposition)
        for i, p in enumerate(points):
            succ = points[(i + 1) % k]
            gap = float(np.max(np.abs(rhs(p) - succ)))
            if gap > cycle_tol:
                raise NotPeriodic(
                    f"orbit residual {gap!r} at point {i} exceeds tolerance {cycle_tol}")
    else:
        if k != 1:
            raise NotPeriodic("continuous-time orbits are supported as equilibria only")
        gap = float(np.max(np.abs(model.rhs(points[0]))))
        if gap > cycle_tol:
            raise NotPeriodic(f"vector field residual {gap!r} exceeds tolerance {cycle_tol}")
    product = cocycle_matrix(decomposition, points[0])
    for p in points[1:]:
        product = cocycle_matrix(decomposition, p) @ product
    radius = spectral_radius(product)
    per_step = radius if k == 1 else radius ** (1.0 / k)
    return OrbitGrowth(per_step_radius=per_step, product_radius=radius, period=k)
