"""Curvature profiles of critical curves and their reconstruction as translating solitons.

The profile kappa(s) is integrated from the second-order Euler-Lagrange ODE

    kappa_ss = (kappa P - kappa**2 P' - P''' kappa_s**2) / P''

starting at the largest root of ``(kappa P' - P)**2 = d`` with ``kappa_s = 0``.
The first integral is monitored, not imposed.

Orientation: the curve is built as ``x1 = int f ds / sqrt(d)``,
``x2 = -P'(kappa) / sqrt(d)`` with ``f = kappa P' - P``.  The minus sign makes
the signed curvature of the output equal to ``+kappa`` under the
counter-clockwise normal, so the curve translates along ``V = (0, 1)`` under
the dual flow returned by :func:`solitonlab.energy.flow_from_energy`.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, cumulative_simpson, quad, solve_ivp

from .energy import (
    CurvatureEnergy,
    SolitonProblem,
    curvature_range,
    evaluate,
    first_integral,
    tangential_term,
)
from .errors import DomainError, DomainExit, SingularEndpoint, StiffnessError
from .geometry import PlaneCurve, rot90, rotation

log = logging.getLogger(__name__)

KAPPA_FLOOR = 1e-12
KAPPA_CEIL = 1e12
MAX_RHS_EVALS = 6_000_000  # ~1e6 steps of a six-stage pair


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    s: np.ndarray
    kappa: np.ndarray
    kappa_s: np.ndarray
    d: float
    energy: CurvatureEnergy
    truncated: bool = False
    max_drift: float = 0.0  # max relative deviation of the first integral from d

    def __len__(self) -> int:
        return len(self.s)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    @property
    def center(self) -> int:
        return int(np.argmin(np.abs(self.s)))


def default_spacing(vertex_kappa: float) -> float:
    # keeps chord/arc deficit kappa**2 ds**2 / 24 below ~1e-7 near the vertex
    return min(0.005, 0.002 / vertex_kappa)


class _Rhs:
    def __init__(self, energy: CurvatureEnergy):
        self.energy = energy
        self.calls = 0

    def __call__(self, s, y):
        self.calls += 1
        if self.calls > MAX_RHS_EVALS:
            raise StiffnessError("exceeded the step budget while integrating the profile")
        k, ks = y
        try:
            P, dP, ddP, dddP = evaluate(self.energy, k)
        except DomainError:
            return [np.nan, np.nan]  # rejected trial stage
        return [ks, (k * P - k * k * dP - dddP * ks * ks) / ddP]


def _floor_event(s, y):
    return y[0] - KAPPA_FLOOR


_floor_event.terminal = True
_floor_event.direction = -1


def _ceil_event(s, y):
    return y[0] - KAPPA_CEIL


_ceil_event.terminal = True
_ceil_event.direction = 1


def _integrate_half(energy, kappa0, half_span, step_tol, ds, sign):
    n = max(2, int(math.ceil(half_span / ds)))
    grid = sign * np.linspace(0.0, half_span, n + 1)
    rhs = _Rhs(energy)
    sol = solve_ivp(rhs, (0.0, grid[-1]), [kappa0, 0.0], method="RK45", t_eval=grid,
                    rtol=step_tol, atol=step_tol, events=[_floor_event, _ceil_event])
    if sol.status == -1:
        # step-size underflow at a curvature singularity (cusp or kappa -> 0 tail):
        # keep the span reached so far and report the profile as truncated
        if len(sol.t) < 2:
            raise StiffnessError(f"profile integration failed at the vertex: {sol.message}")
        log.info("profile truncated at s=%.6g: %s", sol.t[-1], sol.message)
    return sol.t, sol.y[0], sol.y[1], sol.status != 0


def integrate_profile(energy: CurvatureEnergy, d: float, half_span: float,
                      step_tol: float = 1e-10, ds: float | None = None) -> CurvatureProfile:
    """Integrate the curvature of a nonconstant critical curve on ``[-half_span, half_span]``.

    The profile starts at the vertex (largest root of the first integral level
    set) and stops early, flagged ``truncated``, if curvature drops below
    ``KAPPA_FLOOR``, blows up past ``KAPPA_CEIL``, or the step size underflows
    on the way to either.
    """
    if not half_span > 0:
        raise ValueError("half_span must be positive")
    rng = curvature_range(energy, d)
    kappa0 = rng.vertex
    ds = default_spacing(kappa0) if ds is None else ds

    s_r, k_r, ks_r, cut_r = _integrate_half(energy, kappa0, half_span, step_tol, ds, +1.0)
    s_l, k_l, ks_l, cut_l = _integrate_half(energy, kappa0, half_span, step_tol, ds, -1.0)
    s = np.concatenate([s_l[:0:-1], s_r])
    kappa = np.concatenate([k_l[:0:-1], k_r])
    kappa_s = np.concatenate([ks_l[:0:-1], ks_r])

    slack = step_tol * max(1.0, kappa0)
    if np.any(kappa < rng.lo - slack) or np.any(kappa > rng.hi + slack):
        raise DomainExit(f"curvature left the admissible range [{rng.lo:.6g}, {rng.hi:.6g}]")
    # soliton construction is restricted to convex arcs
    keep = kappa > 0
    s, kappa, kappa_s = s[keep], kappa[keep], kappa_s[keep]

    drift = np.abs(first_integral(energy, kappa, kappa_s) - d) / d
    return CurvatureProfile(s, kappa, kappa_s, float(d), energy,
                            truncated=bool(cut_r or cut_l), max_drift=float(drift.max()))


def _frame_components(energy, kappa, kappa_s):
    jet = evaluate(energy, kappa)
    return np.asarray(tangential_term(energy, kappa)), np.asarray(jet.ddP * kappa_s), jet


def reconstruct_curve(profile: CurvatureProfile) -> PlaneCurve:
    """Canonical-frame curve with the profile's curvature; translation direction (0, 1)."""
    root_d = math.sqrt(profile.d)
    f, g, jet = _frame_components(profile.energy, profile.kappa, profile.kappa_s)
    s = profile.s
    c = profile.center
    speed1 = f / root_d
    x1 = np.empty_like(s)
    x1[c:] = cumulative_simpson(speed1[c:], x=s[c:], initial=0.0) if len(s) - c > 1 else 0.0
    if c > 0:
        left = -cumulative_simpson(speed1[c::-1], x=-s[c::-1], initial=0.0)
        x1[: c + 1] = left[::-1]
    x2 = -np.asarray(jet.dP) / root_d
    T = np.stack([f, -g], axis=1) / root_d
    T /= np.hypot(*T.T)[:, None]
    return PlaneCurve(np.stack([x1, x2], axis=1), T, rot90(T), profile.kappa.copy(), s.copy(),
                      closed=False, meta={"energy": profile.energy.label(), "d": profile.d})


def quadrature_parameterization(energy: CurvatureEnergy, d: float, kappa_lo: float,
                                kappa_hi: float, n_samples: int = 201, kappas=None,
                                allow_singular: bool = False, full_output: bool = False):
    """Curve sampled in the curvature parameter on the branch ``kappa_s > 0``.

    ``x1(kappa)`` is one Gauss-Kronrod quadrature of
    ``f |P''| / (sqrt(d) sqrt(d - f**2))``; ``x2 = -P'(kappa)/sqrt(d)`` is algebraic.
    Endpoints on a root of ``d - f**2`` carry an integrable inverse-square-root
    singularity: they raise SingularEndpoint unless ``allow_singular`` is set,
    in which case they are pulled inside by a relative offset of 1e-10.
    """
    root_d = math.sqrt(d)
    curvature_range(energy, d)  # raises for empty ranges

    def gap(k):
        return d - tangential_term(energy, k) ** 2

    lo, hi = float(kappa_lo), float(kappa_hi)
    if not lo < hi:
        raise ValueError("need kappa_lo < kappa_hi")
    for name, k, inward in (("kappa_lo", lo, +1), ("kappa_hi", hi, -1)):
        if gap(k) < -1e-12 * d:
            raise DomainError(f"{name}={k:.6g} lies outside the curvature range")
        if gap(k) <= 1e-12 * d:
            if not allow_singular:
                raise SingularEndpoint(f"{name}={k:.6g} is a root of d - (kappa P' - P)^2")
            k_new = k * (1 + inward * 1e-10)
            lo, hi = (k_new, hi) if name == "kappa_lo" else (lo, k_new)

    ks = np.linspace(lo, hi, n_samples) if kappas is None else np.asarray(kappas, dtype=float)
    if np.any(np.diff(ks) <= 0):
        raise ValueError("kappa samples must be strictly increasing")

    def ddP_abs(k):
        return abs(evaluate(energy, k).ddP)

    def dx1(k):
        return tangential_term(energy, k) * ddP_abs(k) / (root_d * math.sqrt(gap(k)))

    def darc(k):
        return ddP_abs(k) / math.sqrt(gap(k))

    x1 = np.zeros(len(ks))
    arc = np.zeros(len(ks))
    err = 0.0
    with warnings.catch_warnings():
        # near a singular endpoint QUADPACK warns; its error estimate is returned instead
        warnings.simplefilter("ignore", IntegrationWarning)
        for i in range(1, len(ks)):
            v, e1 = quad(dx1, ks[i - 1], ks[i], epsabs=1e-13, epsrel=1e-12, limit=200)
            w, e2 = quad(darc, ks[i - 1], ks[i], epsabs=1e-13, epsrel=1e-12, limit=200)
            x1[i] = x1[i - 1] + v
            arc[i] = arc[i - 1] + w
            err += e1 + e2

    jet = evaluate(energy, ks)
    f = np.asarray(tangential_term(energy, ks))
    g = np.sign(jet.ddP) * np.sqrt(np.clip(d - f**2, 0.0, None))  # P'' kappa_s with kappa_s > 0
    T = np.stack([f, -g], axis=1) / root_d
    T /= np.hypot(*T.T)[:, None]
    curve = PlaneCurve(np.stack([x1, -jet.dP / root_d], axis=1), T, rot90(T), ks.copy(), arc,
                       meta={"energy": energy.label(), "d": d, "quadrature_error": err})
    return (curve, err) if full_output else curve


def killing_field(profile: CurvatureProfile, index: int) -> tuple[float, float]:
    """Tangential and normal components ``(kappa P' - P, P'' kappa_s)`` at one sample."""
    k = profile.kappa[index]
    ks = profile.kappa_s[index]
    jet = evaluate(profile.energy, k)
    return float(tangential_term(profile.energy, k)), float(jet.ddP * ks)


def speed_plus_offset(problem: SolitonProblem, kappa) -> np.ndarray:
    return np.asarray(problem.speed_law(kappa)) + problem.b


def soliton_residual(curve: PlaneCurve, problem: SolitonProblem) -> float:
    """``max |speed(kappa) + b - a <N, V>|`` over the samples."""
    lhs = speed_plus_offset(problem, curve.kappas)
    rhs = problem.a * (curve.normals @ np.asarray(problem.V))
    return float(np.max(np.abs(lhs - rhs)))


def fit_direction(curve: PlaneCurve, problem: SolitonProblem) -> np.ndarray:
    """Unit vector W minimising ``sum (<N_i, W> - (speed + b)/a)**2``."""
    target = speed_plus_offset(problem, curve.kappas) / problem.a
    W, *_ = np.linalg.lstsq(curve.normals, target, rcond=None)
    norm = np.hypot(*W)
    if norm == 0:
        return np.array([0.0, 1.0])
    return W / norm


def canonical_alignment(curve: PlaneCurve, problem: SolitonProblem) -> PlaneCurve:
    """Rotate ``curve`` so its best-fit translation direction becomes ``problem.V``.

    For the dual problem of a critical curve this is the canonical frame of the
    reconstruction, up to a translation (which the soliton equation ignores).
    """
    W = fit_direction(curve, problem)
    V = np.asarray(problem.V)
    angle = math.atan2(V[1], V[0]) - math.atan2(W[1], W[0])
    return curve.transformed(rotation(angle))
