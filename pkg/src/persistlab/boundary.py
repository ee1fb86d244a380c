"""Extinction-set subsystems and classification of their limit behavior.

Pinning the focal block of a decomposed model to zero leaves a reduced
system on the complement block.  This module builds that reduced system,
locates its equilibria by damped Newton iteration from quasi-random seeds,
and estimates its omega-limit set by simulating a fan of seeds and
classifying each post-burn-in tail as an equilibrium, a periodic orbit, or
a compact box.  Estimates are sampled evidence, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynsys import (DISCRETE, DEFAULT_DT, FocalDecomposition, ModelSpec,
                     sample_orthant_points, simulate, semiflow)
from .errors import InconsistentDecomposition, UnboundedBoundaryDynamics

_HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)

DEDUP_DISTANCE = 1e-6
MAX_CYCLE_PERIOD = 64


def halton_points(count: int, dim: int, start_index: int = 1) -> np.ndarray:
    """First ``count`` points of the Halton sequence in (0, 1)^dim."""
    if dim > len(_HALTON_PRIMES):
        raise ValueError(f"halton_points supports up to {len(_HALTON_PRIMES)} dimensions")
    out = np.empty((count, dim))
    for j in range(dim):
        base = _HALTON_PRIMES[j]
        for i in range(count):
            n, denom, value = start_index + i, 1.0, 0.0
            while n > 0:
                denom *= base
                n, digit = divmod(n, base)
                value += digit / denom
            out[i, j] = value
    return out


# ---------------------------------------------------------------------------
# Attractor items
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Equilibrium:
    point: np.ndarray
    residual: float

    def describe(self) -> str:
        return f"equilibrium at {tuple(float(v) for v in self.point)} (residual {self.residual:.3e})"


@dataclass(frozen=True, eq=False)
class CompactBox:
    lower: np.ndarray
    upper: np.ndarray

    def contains(self, point: np.ndarray, inflate: float = 0.0) -> bool:
        return bool(np.all(point >= self.lower - inflate)
                    and np.all(point <= self.upper + inflate))

    def describe(self) -> str:
        return (f"box {tuple(float(v) for v in self.lower)} .. "
                f"{tuple(float(v) for v in self.upper)}")


@dataclass(frozen=True, eq=False)
class PeriodicOrbit:
    points: tuple[np.ndarray, ...]
    period: int

    def describe(self) -> str:
        return f"period-{self.period} orbit through {tuple(float(v) for v in self.points[0])}"


AttractorItem = Equilibrium | CompactBox | PeriodicOrbit


@dataclass
class OmegaLimitEstimate:
    members: list[AttractorItem]
    seeds_used: int
    horizon: float

    def hull(self) -> CompactBox:
        """Smallest box containing every member item."""
        lows, highs = [], []
        for item in self.members:
            if isinstance(item, Equilibrium):
                lows.append(item.point)
                highs.append(item.point)
            elif isinstance(item, CompactBox):
                lows.append(item.lower)
                highs.append(item.upper)
            else:
                pts = np.asarray(item.points)
                lows.append(pts.min(axis=0))
                highs.append(pts.max(axis=0))
        return CompactBox(np.min(lows, axis=0), np.max(highs, axis=0))


# ---------------------------------------------------------------------------
# Extinction-set restriction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySubsystem:
    parent: ModelSpec
    decomposition: FocalDecomposition
    reduced_model: ModelSpec

    def embed(self, x: Sequence[float]) -> np.ndarray:
        """Lift a reduced-space point to the full state with focal block zero."""
        return self.decomposition.embed_boundary(np.asarray(x, dtype=float))


def restrict_to_extinction_set(model: ModelSpec, decomposition: FocalDecomposition,
                               check_points: int = 64, check_bound: float = 10.0) -> BoundarySubsystem:
    """Reduced system on the complement block with the focal block pinned to zero.

    The reduced map is checked against the parent map on sampled boundary
    points; disagreement beyond 1e-14 raises InconsistentDecomposition.
    """
    comp = list(decomposition.complement_indices)
    complement_map = decomposition.complement_map
    embed_boundary = decomposition.embed_boundary

    def reduced_rhs(x: np.ndarray) -> np.ndarray:
        return np.asarray(complement_map(embed_boundary(x)), dtype=float)

    reduced_flat = None
    flat_parent = decomposition.assembled_flat
    if flat_parent is not None:
        dim = model.dim
        comp_t = tuple(comp)

        def reduced_flat(x: tuple) -> tuple:
            full = [0.0] * dim
            for i, j in enumerate(comp_t):
                full[j] = x[i]
            out = flat_parent(tuple(full))
            return tuple(out[j] for j in comp_t)

    reduced = ModelSpec(
        name=f"{model.name}|{'+'.join(model.component_names[i] for i in comp)}-boundary",
        kind=model.kind,
        dim=len(comp),
        rhs=reduced_rhs,
        component_names=tuple(model.component_names[i] for i in comp),
        params=model.params,
        rhs_flat=reduced_flat)

    for x in sample_orthant_points(reduced.dim, check_points, check_bound, seed=1):
        z = embed_boundary(x)
        gap = np.max(np.abs(np.asarray(model.rhs(z), dtype=float)[comp] - reduced_rhs(x)))
        if not gap <= 1e-14 * (1.0 + float(np.max(np.abs(x), initial=0.0))):
            raise InconsistentDecomposition(
                f"{model.name}: complement map differs from parent map by {gap!r} "
                f"on the extinction set at x={x!r}")
    return BoundarySubsystem(model, decomposition, reduced)


# ---------------------------------------------------------------------------
# Equilibria by damped Newton iteration
# ---------------------------------------------------------------------------

def _equilibrium_residual_fn(sub: BoundarySubsystem):
    rhs = sub.reduced_model.rhs
    if sub.reduced_model.kind == DISCRETE:
        return lambda x: rhs(x) - x
    return rhs


def _fd_jacobian(g, x: np.ndarray) -> np.ndarray:
    n = len(x)
    jac = np.empty((n, n))
    for i in range(n):
        h = 1e-7 * (1.0 + abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (g(xp) - g(xm)) / (2.0 * h)
    return jac


def _newton(g, x0: np.ndarray, lo: np.ndarray, hi: np.ndarray, tol: float,
            max_iter: int = 80) -> tuple[np.ndarray, float, bool]:
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    gx = g(x)
    gnorm = float(np.max(np.abs(gx)))
    for _ in range(max_iter):
        if gnorm <= tol:
            return x, gnorm, True
        if not np.all(np.isfinite(gx)):
            return x, float("inf"), False
        jac = _fd_jacobian(g, x)
        try:
            step = np.linalg.solve(jac, gx)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, gx, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            return x, gnorm, False
        scale = 1.0
        improved = False
        for _ in range(30):
            candidate = np.clip(x - scale * step, lo, hi)
            g_cand = g(candidate)
            cand_norm = float(np.max(np.abs(g_cand)))
            if math.isfinite(cand_norm) and cand_norm < gnorm:
                x, gx, gnorm = candidate, g_cand, cand_norm
                improved = True
                break
            scale *= 0.5
        if not improved:
            return x, gnorm, gnorm <= tol
    return x, gnorm, gnorm <= tol


def find_equilibria(sub: BoundarySubsystem, search_box: Sequence[tuple[float, float]],
                    n_starts: int = 64, tol: float = 1e-8) -> list[Equilibrium]:
    """Equilibria of the reduced system inside a search box.

    Newton iteration runs from ``n_starts`` Halton seeds; iterates are kept
    inside the (slightly inflated) box, converged points are deduplicated
    within 1e-6, and only points meeting the residual tolerance are
    returned.  Seeds that fail to converge are simply dropped.
    """
    dim = sub.reduced_model.dim
    if len(search_box) != dim:
        raise ValueError(f"search_box must have {dim} component ranges")
    lows = np.array([b[0] for b in search_box], dtype=float)
    highs = np.array([b[1] for b in search_box], dtype=float)
    if np.any(lows < 0.0) or np.any(highs < lows):
        raise ValueError("search_box must satisfy 0 <= low <= high componentwise")
    span = np.maximum(highs - lows, 1e-12)
    lo = np.maximum(lows - 0.05 * span, 0.0)
    hi = highs + 0.05 * span

    g = _equilibrium_residual_fn(sub)
    found: list[Equilibrium] = []
    seeds = lows + halton_points(n_starts, dim) * (highs - lows)
    for seed in seeds:
        point, residual, ok = _newton(g, seed, lo, hi, tol)
        if not ok:
            continue
        point = point.copy()
        point[np.abs(point) <= 1e-12] = 0.0
        if np.any(point < 0.0):
            continue
        for i, known in enumerate(found):
            if np.max(np.abs(known.point - point)) <= DEDUP_DISTANCE:
                if residual < known.residual:
                    found[i] = Equilibrium(point, residual)
                break
        else:
            found.append(Equilibrium(point, residual))
    found.sort(key=lambda eq: tuple(float(v) for v in eq.point))
    return found


def polish_equilibrium(sub: BoundarySubsystem, point: np.ndarray, tol: float,
                       radius: float = 1.0) -> Equilibrium | None:
    """Refine one approximate equilibrium; None when Newton cannot reach tol."""
    point = np.asarray(point, dtype=float)
    lo = np.maximum(point - radius * (1.0 + np.abs(point)), 0.0)
    hi = point + radius * (1.0 + np.abs(point))
    refined, residual, ok = _newton(_equilibrium_residual_fn(sub), point, lo, hi, tol)
    if not ok:
        return None
    refined = refined.copy()
    refined[np.abs(refined) <= 1e-12] = 0.0
    return Equilibrium(refined, residual)


# ---------------------------------------------------------------------------
# Tail classification and omega-limit estimation
# ---------------------------------------------------------------------------

def _diameter(points: np.ndarray) -> float:
    return float(np.max(points.max(axis=0) - points.min(axis=0)))


def classify_tail(tail: np.ndarray, tol: float = 1e-6) -> AttractorItem:
    """Classify a trajectory tail as equilibrium, periodic orbit, or box.

    Equilibrium when the last 50 points cluster within ``tol``; otherwise a
    periodic orbit when the tail repeats with some minimal period up to 64
    within ``tol``; otherwise the componentwise bounding box of the tail.
    """
    tail = np.atleast_2d(np.asarray(tail, dtype=float))
    last = tail[-min(50, len(tail)):]
    if _diameter(last) <= tol:
        return Equilibrium(tail[-1].copy(), float("nan"))
    for period in range(2, MAX_CYCLE_PERIOD + 1):
        if len(tail) < 2 * period:
            break
        window = min(len(tail) - period, 128)
        err = float(np.max(np.abs(tail[-window:] - tail[-window - period:-period])))
        if err <= tol:
            points = tuple(tail[len(tail) - period + i].copy() for i in range(period))
            return PeriodicOrbit(points, period)
    return CompactBox(tail.min(axis=0), tail.max(axis=0))


def _verify_cycle(sub: BoundarySubsystem, orbit: PeriodicOrbit, tol: float) -> bool:
    rhs = sub.reduced_model.rhs
    pts = orbit.points
    for i, pt in enumerate(pts):
        succ = pts[(i + 1) % orbit.period]
        if np.max(np.abs(rhs(np.asarray(pt)) - succ)) > tol:
            return False
    return True


def _same_cycle(a: PeriodicOrbit, b: PeriodicOrbit, tol: float) -> bool:
    if a.period != b.period:
        return False
    b_pts = np.asarray(b.points)
    for shift in range(b.period):
        rolled = np.roll(b_pts, shift, axis=0)
        if np.max(np.abs(np.asarray(a.points) - rolled)) <= tol:
            return True
    return False


def estimate_omega_limit(sub: BoundarySubsystem, seeds, burn_in: float, window: float,
                         tol: float = 1e-6, equilibrium_tol: float = 1e-8,
                         seed_box: Sequence[tuple[float, float]] | None = None,
                         divergence_bound: float = 1e8,
                         dt: float | None = None,
                         record_stride: float | None = None) -> OmegaLimitEstimate:
    """Estimate the omega-limit set of the reduced boundary dynamics.

    ``seeds`` is either an iterable of reduced-space initial points or an
    integer count of Halton points drawn from ``seed_box``.  Each seed is
    simulated for burn_in + window; the window tail is classified, tails
    converging to the same point merge into one Newton-polished
    equilibrium, verified cycles are deduplicated, and all remaining
    bounded tails pool into a single smallest enclosing box.  A tail
    leaving the divergence bound raises UnboundedBoundaryDynamics.
    """
    model = sub.reduced_model
    if isinstance(seeds, (int, np.integer)):
        if seed_box is None:
            raise ValueError("integer seed count requires seed_box")
        lows = np.array([b[0] for b in seed_box], dtype=float)
        highs = np.array([b[1] for b in seed_box], dtype=float)
        seed_points = lows + halton_points(int(seeds), model.dim) * (highs - lows)
    else:
        seed_points = [np.asarray(s, dtype=float) for s in seeds]
    if len(seed_points) == 0:
        raise ValueError("at least one seed is required")

    if model.kind == DISCRETE:
        stride = 1
    else:
        dt = DEFAULT_DT if dt is None else dt
        stride = record_stride if record_stride is not None else max(dt, window / 256.0)

    equilibria: list[Equilibrium] = []
    cycles: list[PeriodicOrbit] = []
    box_lower: np.ndarray | None = None
    box_upper: np.ndarray | None = None

    for seed in seed_points:
        state = semiflow(model, seed, burn_in, dt=dt)
        traj = simulate(model, state, window, stride=stride, dt=dt)
        tail = traj.states
        if float(np.max(np.abs(tail))) > divergence_bound:
            raise UnboundedBoundaryDynamics(
                f"{model.name}: tail from seed {seed!r} left the bound {divergence_bound}")
        item = classify_tail(tail, tol)
        if isinstance(item, Equilibrium):
            polished = polish_equilibrium(sub, item.point, equilibrium_tol)
            if polished is None:
                item = CompactBox(tail.min(axis=0), tail.max(axis=0))
            else:
                if not any(np.max(np.abs(polished.point - known.point)) <= tol
                           for known in equilibria):
                    equilibria.append(polished)
                continue
        if isinstance(item, PeriodicOrbit):
            if model.kind == DISCRETE and _verify_cycle(sub, item, tol):
                if not any(_same_cycle(item, known, tol) for known in cycles):
                    cycles.append(item)
                continue
            item = CompactBox(tail.min(axis=0), tail.max(axis=0))
        box_lower = item.lower if box_lower is None else np.minimum(box_lower, item.lower)
        box_upper = item.upper if box_upper is None else np.maximum(box_upper, item.upper)

    members: list[AttractorItem] = list(equilibria) + list(cycles)
    if box_lower is not None:
        members.append(CompactBox(box_lower, box_upper))
    return OmegaLimitEstimate(members=members, seeds_used=len(seed_points),
                              horizon=burn_in + window)
