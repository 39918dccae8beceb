"""Direct test of criticality: Theta(gamma) by quadrature and its first variation
under compactly supported normal bumps.

Sign convention (checked against a shrinking circle in the tests): for a normal
displacement ``eps * phi * N`` the first variation equals
``+ int EL(kappa) * phi ds`` with ``EL = (P')_ss + kappa**2 P' - kappa P``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.integrate import simpson

from .energy import CurvatureEnergy, el_residual, evaluate
from .errors import SupportExceedsCurve
from .geometry import PlaneCurve, curve_from_points


@dataclass(frozen=True)
class BumpPerturbation:
    """``phi(s) = A exp(-1 / (1 - u**2))`` for ``u = (s - s0)/r``, ``|u| < 1``; zero elsewhere."""

    center: float
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")

    def __call__(self, s, period: float | None = None):
        s = np.asarray(s, dtype=float)
        delta = s - self.center
        if period is not None:
            delta = (delta + 0.5 * period) % period - 0.5 * period
        u = delta / self.radius
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        out[inside] = self.amplitude * np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    @property
    def peak(self) -> float:
        return self.amplitude * math.exp(-1.0)


def functional_value(curve: PlaneCurve, energy: CurvatureEnergy) -> float:
    """``int P(kappa) ds``: Simpson on open arcs, periodic trapezoid on closed curves."""
    P = evaluate(energy, curve.kappas).P
    if curve.closed:
        ds = _closed_spacing(curve)
        return float(np.dot(P, 0.5 * (ds + np.roll(ds, 1))))
    return float(simpson(P, x=curve.arc))


def _closed_spacing(curve: PlaneCurve) -> np.ndarray:
    return np.diff(np.append(curve.arc, curve.arc[0] + curve.period))


def _bumps(bump) -> list[BumpPerturbation]:
    return [bump] if isinstance(bump, BumpPerturbation) else list(bump)


def bump_values(curve: PlaneCurve, bump: BumpPerturbation | Iterable[BumpPerturbation]) -> np.ndarray:
    period = curve.period if curve.closed else None
    total = np.zeros(len(curve))
    for b in _bumps(bump):
        if curve.closed:
            if 2 * b.radius >= period:
                raise SupportExceedsCurve("bump support wraps around the whole closed curve")
            total += b(curve.arc, period=period)
        else:
            if b.center - b.radius <= curve.arc[0] or b.center + b.radius >= curve.arc[-1]:
                raise SupportExceedsCurve(
                    f"bump support [{b.center - b.radius:g}, {b.center + b.radius:g}] is not "
                    f"inside the open arc ({curve.arc[0]:g}, {curve.arc[-1]:g})")
            total += b(curve.arc)
    return total


def perturb(curve: PlaneCurve, bump, epsilon: float) -> PlaneCurve:
    """Displace samples by ``epsilon * phi(s_i) * N_i``.

    The result carries chord arc length and turning-angle curvature.  Samples
    are not redistributed, so bumps with disjoint supports act independently.
    """
    phi = bump_values(curve, bump)
    moved = curve.points + epsilon * phi[:, None] * curve.normals
    return curve_from_points(moved, curve.closed, arc_start=float(curve.arc[0]))


def first_variation(curve: PlaneCurve, energy: CurvatureEnergy, bump, epsilon: float = 1e-4) -> float:
    """Central difference ``[Theta(+eps) - Theta(-eps)] / (2 eps)``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    plus = functional_value(perturb(curve, bump, epsilon), energy)
    minus = functional_value(perturb(curve, bump, -epsilon), energy)
    return (plus - minus) / (2.0 * epsilon)


def el_pairing(curve: PlaneCurve, energy: CurvatureEnergy, bump, kappa_s, kappa_ss) -> float:
    """``int EL * phi ds`` from supplied curvature derivatives at the samples."""
    phi = bump_values(curve, bump)
    el = el_residual(energy, curve.kappas, kappa_s, kappa_ss)
    if curve.closed:
        ds = _closed_spacing(curve)
        return float(np.dot(el * phi, 0.5 * (ds + np.roll(ds, 1))))
    return float(simpson(el * phi, x=curve.arc))
