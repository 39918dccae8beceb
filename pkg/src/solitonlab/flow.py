"""Explicit polyline evolution under ``X_t = (1/a)(speed(kappa) + b) N`` and a
translation fit that tells translating solitons apart from other motions."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .energy import FlowMode, SolitonProblem
from .errors import (
    DomainError,
    ExtinctionReached,
    IllPosedFlow,
    InsufficientSnapshots,
    StepTooLarge,
)
from .geometry import (
    PlaneCurve,
    curve_from_points,
    edge_lengths,
    edge_ratio,
    estimate_curvature,
    nearest_on_polyline,
    resample_uniform,
)

log = logging.getLogger(__name__)

__all__ = [
    "Boundary", "FlowConfig", "Trajectory", "TranslationFit", "estimate_curvature",
    "normal_speed", "speed_derivative", "stable_dt", "step", "evolve", "fit_translation",
]

MAX_CFL = 0.5
MAX_STEPS = 1_000_000


class Boundary(enum.Enum):
    CLOSED = "closed"
    FREE_ENDS = "free"


@dataclass(frozen=True)
class FlowConfig:
    problem: SolitonProblem
    t_end: float
    cfl: float = 0.25
    snapshots: int = 10
    boundary: Boundary = Boundary.FREE_ENDS
    resample_threshold: float = 3.0
    dt: float | None = None  # fixed step; None picks cfl * bound each step

    def __post_init__(self):
        if not 0 < self.cfl <= MAX_CFL:
            raise ValueError(f"cfl must lie in (0, {MAX_CFL}]")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.snapshots < 1:
            raise ValueError("need at least one snapshot")
        if not self.resample_threshold > 1:
            raise ValueError("resample_threshold must exceed 1")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("fixed dt must be positive")


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[PlaneCurve] = field(default_factory=list)
    resample_events: list[float] = field(default_factory=list)
    steps: int = 0
    stop_reason: str | None = None

    def __len__(self) -> int:
        return len(self.times)


def normal_speed(problem: SolitonProblem, kappa):
    """``(1/a)(kappa**p + b)`` or ``(1/a)(log kappa + b)``."""
    kappa = np.asarray(kappa, dtype=float)
    with np.errstate(divide="ignore"):
        law = problem.speed_law(kappa)
    if not np.all(np.isfinite(law)):
        raise DomainError("normal speed is infinite at zero curvature for p < 0")
    out = (law + problem.b) / problem.a
    return float(out) if out.ndim == 0 else out


def speed_derivative(problem: SolitonProblem, kappa) -> np.ndarray:
    """d(normal speed)/d(kappa); positive where the flow is forward-parabolic."""
    kappa = np.asarray(kappa, dtype=float)
    if problem.mode is FlowMode.LOG:
        return 1.0 / (problem.a * kappa)
    p = problem.p
    if p == 0:
        return np.zeros_like(kappa)
    return p * np.power(kappa, p - 1.0) / problem.a


def stable_dt(curve: PlaneCurve, problem: SolitonProblem, cfl: float, kappa=None) -> float:
    """Largest forward-Euler step ``cfl * h**2 / max(d speed / d kappa)``.

    Raises IllPosedFlow when the speed decreases with curvature somewhere.
    """
    kappa = estimate_curvature(curve) if kappa is None else kappa
    if problem.requires_convexity and np.any(kappa <= 0):
        raise DomainError(f"{problem.mode.value} flow needs kappa > 0 (min {kappa.min():.3g})")
    with np.errstate(divide="ignore", over="ignore"):
        c = speed_derivative(problem, kappa)
    c_max = float(np.max(c))
    if float(np.min(c)) < -1e-10 * max(1.0, abs(c_max)):
        raise IllPosedFlow(
            "normal speed decreases with curvature (backward-parabolic); flip the sign of a "
            "and V to evolve the same soliton forward")
    if c_max <= 0:
        return math.inf
    h = float(edge_lengths(curve.points, curve.closed).min())
    return cfl * h * h / c_max


def _extrapolate_ends(speed: np.ndarray) -> np.ndarray:
    if len(speed) >= 4:
        speed[0] = 3 * speed[1] - 3 * speed[2] + speed[3]
        speed[-1] = 3 * speed[-2] - 3 * speed[-3] + speed[-4]
    return speed


def _advance(state, kappa, problem, dt, resample_threshold):
    speed = np.array(normal_speed(problem, kappa), dtype=float, ndmin=1)
    if not state.closed:
        speed = _extrapolate_ends(speed)
    moved = state.points + dt * speed[:, None] * state.normals
    out = curve_from_points(moved, state.closed, arc_start=float(state.arc[0]), meta=dict(state.meta))
    if resample_threshold is not None and edge_ratio(out) > resample_threshold:
        out = resample_uniform(out)
        out.meta["resampled"] = True
    return out


def step(state: PlaneCurve, problem: SolitonProblem, dt: float,
         resample_threshold: float | None = None) -> PlaneCurve:
    """One forward-Euler step ``X_i += dt * speed(kappa_i) * N_i`` with estimated curvature.

    Free ends move with the normal speed extrapolated quadratically from the
    three nearest interior samples.
    """
    kappa = estimate_curvature(state)
    bound = stable_dt(state, problem, MAX_CFL, kappa)
    if dt > bound * (1 + 1e-12):
        raise StepTooLarge(dt, bound)
    return _advance(state, kappa, problem, dt, resample_threshold)


def evolve(initial: PlaneCurve, config: FlowConfig, raise_on_stop: bool = False) -> Trajectory:
    """Repeated steps with automatic dt; snapshots at evenly spaced times.

    Stops early, recording ``stop_reason``, if curvature leaves the admissible
    domain or the step size collapses (extinction).  With a fixed ``config.dt``
    every step is checked against the stability bound and StepTooLarge is
    raised as soon as it is violated.
    """
    closed = config.boundary is Boundary.CLOSED
    state = curve_from_points(initial.points, closed, arc_start=float(initial.arc[0]),
                              meta=dict(initial.meta))
    problem = config.problem
    if problem.requires_convexity and np.any(state.kappas <= 0):
        raise DomainError("initial curve must be convex (kappa > 0) for this flow")
    stable_dt(state, problem, config.cfl)  # fail fast on ill-posed input

    marks = np.linspace(0.0, config.t_end, config.snapshots + 1)
    traj = Trajectory([0.0], [state])
    t = 0.0
    for target in marks[1:]:
        while t < target * (1 - 1e-14):
            try:
                # state.kappas is the turning-angle estimate from curve_from_points
                if config.dt is None:
                    dt = min(stable_dt(state, problem, config.cfl, state.kappas), target - t)
                else:
                    bound = stable_dt(state, problem, MAX_CFL, state.kappas)
                    if config.dt > bound * (1 + 1e-12):
                        raise StepTooLarge(config.dt, bound)
                    dt = min(config.dt, target - t)
                if dt < 1e-14 * max(1.0, config.t_end):
                    raise ExtinctionReached(f"time step collapsed at t={t:.6g}")
                state = _advance(state, state.kappas, problem, dt, config.resample_threshold)
            except (DomainError, ExtinctionReached) as exc:
                traj.stop_reason = f"t={t:.6g}: {exc}"
                log.info("flow stopped early: %s", traj.stop_reason)
                if raise_on_stop:
                    raise
                return traj
            if state.meta.pop("resampled", False):
                traj.resample_events.append(t + dt)
            t += dt
            traj.steps += 1
            if traj.steps > MAX_STEPS:
                traj.stop_reason = f"t={t:.6g}: step budget exhausted"
                return traj
        t = float(target)
        traj.times.append(t)
        traj.states.append(state)
    return traj


@dataclass(frozen=True)
class TranslationFit:
    V: np.ndarray
    shape_residual: float
    linearity_residual: float
    translations: np.ndarray

    TRANSLATING_TOL = 1e-2

    @property
    def translating(self) -> bool:
        return self.shape_residual < self.TRANSLATING_TOL


def _interior(curve: PlaneCurve, margin: float) -> np.ndarray:
    if curve.closed or margin == 0:
        return curve.points
    s = curve.arc - curve.arc[0]
    L = s[-1]
    keep = (s >= margin * L) & (s <= (1 - margin) * L)
    return curve.points[keep]


def fit_translation(trajectory: Trajectory, interior_margin: float = 0.15) -> TranslationFit:
    """Best translation of each snapshot onto snapshot 0 and the linear-in-time fit of those.

    Alignment minimises point-to-polyline distance, so it does not depend on
    how samples are distributed along each snapshot.
    """
    if len(trajectory) < 3:
        raise InsufficientSnapshots(f"need >= 3 snapshots, got {len(trajectory)}")
    if not 0 <= interior_margin <= 0.4:
        raise ValueError("interior_margin must lie in [0, 0.4]")
    ref = trajectory.states[0]
    times = np.asarray(trajectory.times, dtype=float)
    shifts = [np.zeros(2)]
    rms = [0.0]
    guess = np.zeros(2)
    for k in range(1, len(trajectory)):
        q = _interior(trajectory.states[k], interior_margin)

        def resid(v):
            moved = q - v
            return (moved - nearest_on_polyline(moved, ref.points, ref.closed)).ravel()

        sol = least_squares(resid, guess, xtol=1e-14, ftol=1e-14, gtol=1e-14)
        shifts.append(sol.x)
        rms.append(float(np.sqrt(np.mean(np.sum(sol.fun.reshape(-1, 2) ** 2, axis=1)))))
        if k + 1 < len(trajectory) and times[k] > 0:
            guess = sol.x * times[k + 1] / times[k]
    shifts = np.array(shifts)
    V = (times @ shifts) / float(times @ times)
    lin = float(np.max(np.hypot(*(shifts - np.outer(times, V)).T)))
    return TranslationFit(V, max(rms), lin, shifts)
