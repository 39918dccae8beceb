"""Curvature integrands P(kappa), Euler-Lagrange residual, first integral, and
the dictionary between flow constants (p, a, b) and energy constants (lambda, d).

Three integrand families are supported:

* ``POWER``   : P = kappa**p + lam
* ``ENTROPY`` : P = kappa*log(kappa) + lam   (the p = 1 member)
* ``LOG``     : P = log(kappa) + lam         (dual of the logarithmic flow)

Throughout, ``f = kappa*P' - P`` is the tangential component of the Killing
field along a critical curve and ``g = P'' * kappa_s`` its normal component;
``f**2 + g**2 = d`` is the first integral.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateEnergy, DomainError, NoSolitonError, RangeEmpty


class EnergyKind(enum.Enum):
    POWER = "power"
    ENTROPY = "entropy"
    LOG = "log"


class FlowMode(enum.Enum):
    POWER = "power"
    LOG = "log"


def _is_nonneg_integer(p: float) -> bool:
    return p >= 0 and float(p).is_integer()


@dataclass(frozen=True)
class CurvatureEnergy:
    """Integrand of Theta(gamma) = int P(kappa) ds."""

    kind: EnergyKind
    lam: float = 0.0
    p: float | None = None

    def __post_init__(self):
        if self.kind is EnergyKind.POWER:
            if self.p is None:
                raise ValueError("POWER energy needs an exponent p")
        elif self.p is not None:
            raise ValueError(f"{self.kind.value} energy has no exponent")

    @classmethod
    def power(cls, p: float, lam: float = 0.0) -> "CurvatureEnergy":
        return cls(EnergyKind.POWER, float(lam), float(p))

    @classmethod
    def entropy(cls, lam: float = 0.0) -> "CurvatureEnergy":
        return cls(EnergyKind.ENTROPY, float(lam))

    @classmethod
    def log(cls, lam: float = 0.0) -> "CurvatureEnergy":
        return cls(EnergyKind.LOG, float(lam))

    @property
    def requires_convexity(self) -> bool:
        return not (self.kind is EnergyKind.POWER and _is_nonneg_integer(self.p))

    @property
    def is_degenerate(self) -> bool:
        """True when P is affine in kappa, so P'' vanishes identically."""
        return self.kind is EnergyKind.POWER and self.p in (0.0, 1.0)

    def label(self) -> str:
        if self.kind is EnergyKind.POWER:
            return f"power(p={self.p:g}, lambda={self.lam:g})"
        return f"{self.kind.value}(lambda={self.lam:g})"


@dataclass(frozen=True)
class SolitonProblem:
    """Flow constants of ``X_t = (1/a)(speed(kappa) + b) N`` with translation direction V.

    ``speed`` is ``kappa**p`` for ``FlowMode.POWER`` and ``log(kappa)`` for ``FlowMode.LOG``.
    """

    mode: FlowMode
    a: float
    b: float = 0.0
    p: float | None = None
    V: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.a == 0 or not math.isfinite(self.a):
            raise ValueError("flow constant a must be finite and nonzero")
        if self.mode is FlowMode.POWER and self.p is None:
            raise ValueError("power flow needs an exponent p")
        if self.mode is FlowMode.LOG and self.p is not None:
            raise ValueError("log flow has no exponent")
        if abs(math.hypot(*self.V) - 1.0) > 1e-12:
            raise ValueError(f"translation direction must be a unit vector, got {self.V}")

    @classmethod
    def power(cls, p: float, a: float = 1.0, b: float = 0.0, V=(0.0, 1.0)) -> "SolitonProblem":
        return cls(FlowMode.POWER, float(a), float(b), float(p), tuple(map(float, V)))

    @classmethod
    def logarithmic(cls, a: float = 1.0, b: float = 0.0, V=(0.0, 1.0)) -> "SolitonProblem":
        return cls(FlowMode.LOG, float(a), float(b), None, tuple(map(float, V)))

    @property
    def requires_convexity(self) -> bool:
        return self.mode is FlowMode.LOG or not _is_nonneg_integer(self.p)

    def speed_law(self, kappa):
        """``kappa**p`` or ``log(kappa)``, without the ``b`` offset or ``1/a`` factor."""
        kappa = np.asarray(kappa, dtype=float)
        if self.requires_convexity and np.any(kappa <= 0):
            raise DomainError(f"curvature must be positive for {self.mode.value} flow "
                              f"(min kappa = {kappa.min():.3g})")
        if self.mode is FlowMode.LOG:
            return np.log(kappa)
        return np.power(kappa, self.p)


class EnergyJet(NamedTuple):
    P: np.ndarray | float
    dP: np.ndarray | float
    ddP: np.ndarray | float
    dddP: np.ndarray | float


def _check_domain(energy: CurvatureEnergy, kappa: np.ndarray) -> None:
    if energy.requires_convexity and np.any(~(kappa > 0)):
        bad = kappa[~(kappa > 0)]
        raise DomainError(f"{energy.label()} is defined only for kappa > 0 (got {bad.flat[0]:.6g})")


def _monomial(coef, kappa, expo):
    if coef == 0:
        return np.zeros_like(kappa)
    return coef * np.power(kappa, expo)


def evaluate(energy: CurvatureEnergy, kappa) -> EnergyJet:
    """Return P and its first three kappa-derivatives at ``kappa`` (scalar or array)."""
    scalar = np.ndim(kappa) == 0
    k = np.atleast_1d(np.asarray(kappa, dtype=float))
    _check_domain(energy, k)
    lam = energy.lam
    if energy.kind is EnergyKind.POWER:
        p = energy.p
        P = np.power(k, p) + lam
        dP = _monomial(p, k, p - 1)
        ddP = _monomial(p * (p - 1), k, p - 2)
        dddP = _monomial(p * (p - 1) * (p - 2), k, p - 3)
    elif energy.kind is EnergyKind.ENTROPY:
        logk = np.log(k)
        P = k * logk + lam
        dP = logk + 1.0
        ddP = 1.0 / k
        dddP = -1.0 / k**2
    else:
        P = np.log(k) + lam
        dP = 1.0 / k
        ddP = -1.0 / k**2
        dddP = 2.0 / k**3
    if scalar:
        return EnergyJet(float(P[0]), float(dP[0]), float(ddP[0]), float(dddP[0]))
    return EnergyJet(P, dP, ddP, dddP)


def tangential_term(energy: CurvatureEnergy, kappa):
    """``kappa*P' - P``, the tangential component of the Killing field."""
    if energy.kind is EnergyKind.POWER:
        k = np.asarray(kappa, dtype=float)
        _check_domain(energy, np.atleast_1d(k))
        # closed form avoids cancellation for large kappa
        out = (energy.p - 1.0) * np.power(k, energy.p) - energy.lam
    elif energy.kind is EnergyKind.ENTROPY:
        k = np.asarray(kappa, dtype=float)
        _check_domain(energy, np.atleast_1d(k))
        out = k - energy.lam
    else:
        k = np.asarray(kappa, dtype=float)
        _check_domain(energy, np.atleast_1d(k))
        out = 1.0 - energy.lam - np.log(k)
    return float(out) if np.ndim(out) == 0 else out


def el_residual(energy: CurvatureEnergy, kappa, kappa_s, kappa_ss):
    """Euler-Lagrange residual ``(P')_ss + kappa**2 P' - kappa P`` via the chain rule."""
    jet = evaluate(energy, kappa)
    kappa = np.asarray(kappa, dtype=float)
    kappa_s = np.asarray(kappa_s, dtype=float)
    kappa_ss = np.asarray(kappa_ss, dtype=float)
    out = jet.ddP * kappa_ss + jet.dddP * kappa_s**2 + kappa**2 * jet.dP - kappa * jet.P
    return float(out) if np.ndim(out) == 0 else out


def first_integral(energy: CurvatureEnergy, kappa, kappa_s):
    """``(P'' kappa_s)**2 + (kappa P' - P)**2``; constant (= d) on critical curves."""
    jet = evaluate(energy, kappa)
    f = tangential_term(energy, kappa)
    out = (jet.ddP * np.asarray(kappa_s, dtype=float)) ** 2 + np.asarray(f) ** 2
    return float(out) if np.ndim(out) == 0 else out


def energy_from_flow(problem: SolitonProblem) -> CurvatureEnergy:
    """Energy whose critical curves are the translating solitons of ``problem``."""
    if problem.mode is FlowMode.LOG:
        return CurvatureEnergy.log(problem.b + 1.0)
    if problem.p == 1.0:
        return CurvatureEnergy.entropy(0.0 - problem.b)
    return CurvatureEnergy.power(problem.p, problem.b * (1.0 - problem.p))


def flow_from_energy(energy: CurvatureEnergy, d: float) -> SolitonProblem:
    """Flow constants (a, b, V=(0,1)) for which the energy's critical curves with
    first-integral constant ``d`` are translating solitons in the canonical frame."""
    if not d > 0:
        raise ValueError(f"first-integral constant must be positive, got {d}")
    _refuse_degenerate(energy)
    root_d = math.sqrt(d)
    if energy.kind is EnergyKind.LOG:
        return SolitonProblem.logarithmic(a=-root_d, b=energy.lam - 1.0)
    if energy.kind is EnergyKind.ENTROPY:
        return SolitonProblem.power(1.0, a=root_d, b=0.0 - energy.lam)
    p = energy.p
    return SolitonProblem.power(p, a=root_d / (p - 1.0), b=energy.lam / (1.0 - p))


def _refuse_degenerate(energy: CurvatureEnergy) -> None:
    if not energy.is_degenerate:
        return
    if energy.p == 0.0:
        raise DegenerateEnergy(
            "p = 0 gives the length functional (degenerate): its only critical curves "
            "are straight lines, which translate along their own tangent")
    raise DegenerateEnergy(
        "power energy with p = 1 is affine in kappa (degenerate); use the entropy "
        "integrand kappa*log(kappa) for p = 1")


@dataclass(frozen=True)
class KappaRange:
    """Admissible curvatures ``{kappa > 0 : (kappa P' - P)**2 <= d}`` around the largest root.

    ``lo == 0`` means the level set reaches kappa -> 0+ (open endpoint);
    ``hi == inf`` means curvature is unbounded above.
    """

    lo: float
    hi: float
    vertex: float  # largest root; curvature at the profile's starting point

    @property
    def lo_open(self) -> bool:
        return self.lo == 0.0

    @property
    def hi_open(self) -> bool:
        return math.isinf(self.hi)

    def __contains__(self, kappa: float) -> bool:
        return (self.lo < kappa if self.lo_open else self.lo <= kappa) and kappa <= self.hi


_GRID_FLOOR = 1e-8
_GRID_CEIL = 1e12


def curvature_range(energy: CurvatureEnergy, d: float) -> KappaRange:
    """Curvature interval swept by a nonconstant critical curve with first integral ``d``.

    Raises NoSolitonError when no positive root of ``(kappa P' - P)**2 = d`` exists.
    """
    if not d > 0:
        raise ValueError(f"first-integral constant must be positive, got {d}")
    _refuse_degenerate(energy)

    def g(k):
        return tangential_term(energy, k) ** 2 - d

    upper = max(energy.lam + math.sqrt(d) + 10.0, 10.0)
    grid = np.unique(np.concatenate([
        np.geomspace(_GRID_FLOOR, upper, 4000),
        np.geomspace(upper, _GRID_CEIL, 400),
    ]))
    with np.errstate(over="ignore", invalid="ignore"):
        vals = g(grid)
    vals = np.where(np.isfinite(vals), vals, np.inf)

    # sign changes inside rounding noise (e.g. f**2 -> d only as kappa -> 0) are not roots
    with np.errstate(over="ignore", invalid="ignore"):
        noise = 1e3 * np.finfo(float).eps * (d + np.abs(vals + d))
    vals = np.where(np.abs(vals) <= noise, 0.0, vals)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0:
            roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-300, rtol=1e-14))
    if not roots:
        raise RangeEmpty(
            f"no nonconstant soliton for {energy.label()} at d={d:g}: "
            "(kappa P' - P)^2 = d has no positive root")

    top = roots[-1]
    below = roots[-2] if len(roots) > 1 else 0.0
    probe_lo = 0.5 * (below + top) if below > 0 else top * (1 - 1e-6)
    probe_hi = top * (1 + 1e-6)
    if g(probe_lo) <= 0:
        return KappaRange(below, top, top)
    if g(probe_hi) <= 0:
        return KappaRange(top, math.inf, top)
    raise NoSolitonError(
        f"{energy.label()} at d={d:g} has only a double root at kappa={top:.6g}: "
        "a constant-curvature curve, which is not a translating soliton")
