"""Closed-form oracle curves with exact arc-length curvature.

Every open curve is sampled uniformly in arc length on ``[-span, span]`` with
the vertex at ``s = 0`` and is oriented so that ``kappa > 0`` (a cup opening
towards +y, traversed left to right).
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .energy import CurvatureEnergy
from .errors import SpanExceeded
from .geometry import PlaneCurve, rot90


class ReferenceKind(enum.Enum):
    GRIM_REAPER = "grim_reaper"
    CATENARY = "catenary"
    CYCLOID = "cycloid"
    PARABOLA = "parabola"
    CIRCLE = "circle"
    LINE = "line"
    ELASTICA = "elastica"


@dataclass(frozen=True)
class Reference:
    """Which curve to build.

    ``scale`` is d for GRIM_REAPER and ELASTICA, the catenary parameter c in
    ``y = c cosh(x/c)``, the rolling radius r of the cycloid, the focal
    length F of ``y = x**2/(4F)``, and the radius R of the circle.
    """

    kind: ReferenceKind
    scale: float = 1.0
    span: float = 4.0

    def __post_init__(self):
        if not self.scale > 0 or not self.span > 0:
            raise ValueError("scale and span must be positive")


@dataclass(frozen=True)
class ExactCurvature:
    kappa: Callable[[np.ndarray], np.ndarray]
    kappa_s: Callable[[np.ndarray], np.ndarray]
    kappa_ss: Callable[[np.ndarray], np.ndarray]
    numeric: bool = False

    def __call__(self, s):
        return self.kappa(np.asarray(s, dtype=float))


def dual_energy(ref: Reference) -> tuple[CurvatureEnergy, float] | None:
    """Energy and first-integral constant for which ``ref`` is a critical curve."""
    k, c = ref.kind, ref.scale
    if k is ReferenceKind.GRIM_REAPER:
        return CurvatureEnergy.entropy(0.0), c
    if k is ReferenceKind.CATENARY:
        return CurvatureEnergy.power(0.5, 0.0), 1.0 / (4.0 * c)
    if k is ReferenceKind.CYCLOID:
        return CurvatureEnergy.power(-1.0, 0.0), 64.0 * c * c
    if k is ReferenceKind.PARABOLA:
        return CurvatureEnergy.power(1.0 / 3.0, 0.0), (4.0 / 9.0) * (2.0 * c) ** (-2.0 / 3.0)
    if k is ReferenceKind.ELASTICA:
        return CurvatureEnergy.power(2.0, 0.0), c
    return None


def _frame_from_angle(theta):
    T = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return T, rot90(T)


def _grim_reaper(c, s):
    # c = sqrt(d); graph y = -log(cos(c x))/c
    cs = c * s
    pts = np.stack([np.arctan(np.sinh(cs)) / c, np.log(np.cosh(cs)) / c], axis=1)
    theta = np.arctan(np.sinh(cs))
    def sech(u):
        return 1.0 / np.cosh(u)

    exact = ExactCurvature(
        lambda u: c * sech(c * u),
        lambda u: -c * c * sech(c * u) * np.tanh(c * u),
        lambda u: c**3 * sech(c * u) * (np.tanh(c * u) ** 2 - sech(c * u) ** 2),
    )
    return pts, theta, exact


def _catenary(c, s):
    r = np.hypot(c, s)
    pts = np.stack([c * np.arcsinh(s / c), r], axis=1)
    theta = np.arctan2(s, c)
    exact = ExactCurvature(
        lambda u: c / (c * c + u * u),
        lambda u: -2.0 * c * u / (c * c + u * u) ** 2,
        lambda u: c * (6.0 * u * u - 2.0 * c * c) / (c * c + u * u) ** 3,
    )
    return pts, theta, exact


def _cycloid(r, s):
    t = 2.0 * np.arccos(-s / (4.0 * r))
    pts = np.stack([r * (t - np.sin(t)) - math.pi * r, r * (1.0 + np.cos(t))], axis=1)
    theta = np.arcsin(s / (4.0 * r))
    rho2 = lambda u: 16.0 * r * r - u * u  # noqa: E731
    exact = ExactCurvature(
        lambda u: rho2(u) ** -0.5,
        lambda u: u * rho2(u) ** -1.5,
        lambda u: rho2(u) ** -1.5 + 3.0 * u * u * rho2(u) ** -2.5,
    )
    return pts, theta, exact


def _parabola_arc(F, u):
    return F * (u * np.sqrt(1.0 + u * u) + np.arcsinh(u))


def _parabola_u(F, s):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty_like(s)
    for i, si in enumerate(s):
        if si == 0.0:
            out[i] = 0.0
            continue
        hi = max(1.0, abs(si) / F)
        out[i] = math.copysign(
            brentq(lambda u: _parabola_arc(F, u) - abs(si), 0.0, hi, xtol=1e-14, rtol=1e-13),
            si)
    return out


def _parabola(F, s):
    # y = x**2 / (4F) written with u = x / (2F)
    u = _parabola_u(F, s)
    pts = np.stack([2.0 * F * u, F * u * u], axis=1)
    theta = np.arctan(u)

    def kap(v):
        w = _parabola_u(F, v)
        return 1.0 / (2.0 * F * (1.0 + w * w) ** 1.5)

    def kap_s(v):
        w = _parabola_u(F, v)
        return -3.0 * w / (4.0 * F * F * (1.0 + w * w) ** 3)

    def kap_ss(v):
        w = _parabola_u(F, v)
        return (15.0 * w * w - 3.0) / (8.0 * F**3 * (1.0 + w * w) ** 4.5)

    return pts, theta, ExactCurvature(kap, kap_s, kap_ss)


@functools.lru_cache(maxsize=16)
def _elastica_profile(d: float, span: float):
    from .soliton import integrate_profile, reconstruct_curve

    profile = integrate_profile(CurvatureEnergy.power(2.0, 0.0), d, span)
    return profile, reconstruct_curve(profile)


def make_reference(ref: Reference, n_samples: int = 513) -> tuple[PlaneCurve, ExactCurvature]:
    """Sampled reference curve and its exact curvature function kappa(s)."""
    if n_samples < 16:
        raise ValueError("n_samples must be at least 16")
    kind, c, L = ref.kind, ref.scale, ref.span

    if kind is ReferenceKind.CIRCLE:
        s = np.linspace(0.0, 2.0 * math.pi * c, n_samples + 1)[:-1]
        pts = c * np.stack([np.cos(s / c), np.sin(s / c)], axis=1)
        T, N = _frame_from_angle(s / c + math.pi / 2)
        const = ExactCurvature(lambda u: np.full_like(u, 1.0 / c), np.zeros_like, np.zeros_like)
        return PlaneCurve(pts, T, N, np.full(n_samples, 1.0 / c), s, closed=True,
                          meta={"reference": kind.value, "scale": c,
                                "period": 2.0 * math.pi * c}), const

    if kind is ReferenceKind.CYCLOID and L >= 4.0 * c:
        raise SpanExceeded(f"cycloid arc length is limited to |s| < 4r = {4.0 * c:g}")

    s = np.linspace(-L, L, n_samples)
    if kind is ReferenceKind.LINE:
        pts = np.stack([s, np.zeros_like(s)], axis=1)
        theta = np.zeros_like(s)
        exact = ExactCurvature(np.zeros_like, np.zeros_like, np.zeros_like)
    elif kind is ReferenceKind.GRIM_REAPER:
        pts, theta, exact = _grim_reaper(math.sqrt(c), s)
    elif kind is ReferenceKind.CATENARY:
        pts, theta, exact = _catenary(c, s)
    elif kind is ReferenceKind.CYCLOID:
        pts, theta, exact = _cycloid(c, s)
    elif kind is ReferenceKind.PARABOLA:
        pts, theta, exact = _parabola(c, s)
    else:
        return _make_elastica(c, L, n_samples)

    T, N = _frame_from_angle(theta)
    return PlaneCurve(pts, T, N, exact.kappa(s), s,
                      meta={"reference": kind.value, "scale": c}), exact


def _make_elastica(d, span, n_samples):
    profile, curve = _elastica_profile(float(d), float(span))
    s = np.linspace(profile.s[0], profile.s[-1], n_samples)
    kap = CubicHermiteSpline(profile.s, profile.kappa, profile.kappa_s)
    energy = profile.energy

    def kap_ss(u):
        k = kap(u)
        # P = kappa**2: kappa_ss = (kappa P - kappa**2 P') / P''
        return (k**3 - 2.0 * k**3) / 2.0

    exact = ExactCurvature(kap, kap.derivative(), kap_ss, numeric=True)
    x = CubicHermiteSpline(curve.arc, curve.points, curve.tangents)
    pts = x(s)
    T = x.derivative()(s)
    T /= np.hypot(*T.T)[:, None]
    return PlaneCurve(pts, T, rot90(T), kap(s), s,
                      meta={"reference": "elastica", "scale": d, "numeric": True,
                            "energy": energy.label()}), exact
