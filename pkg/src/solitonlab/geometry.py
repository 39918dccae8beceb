"""Sampled planar curves and the polyline utilities shared by the other modules.

Sign conventions: the unit normal is the counter-clockwise rotation of the
unit tangent, and curvature is signed so that ``T' = kappa N``.  A positively
oriented circle therefore has ``kappa > 0`` and an inward normal.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateEdge

MIN_EDGE = 1e-14


def rot90(v: np.ndarray) -> np.ndarray:
    """Counter-clockwise rotation by pi/2 of an (n, 2) array of vectors."""
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Ordered samples ``points[i]`` with frame, curvature and arc length.

    For closed curves the last sample is *not* a repeat of the first; the
    closing edge is implicit.
    """

    points: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    kappas: np.ndarray
    arc: np.ndarray
    closed: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.points)
        for name in ("tangents", "normals"):
            if getattr(self, name).shape != (n, 2):
                raise ValueError(f"{name} must have shape ({n}, 2)")
        if len(self.kappas) != n or len(self.arc) != n:
            raise ValueError("kappas and arc must have one entry per point")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def length(self) -> float:
        return float(np.sum(edge_lengths(self.points, self.closed)))

    @property
    def period(self) -> float:
        """Arc length of one traversal; exact-arc closed curves record it in ``meta``."""
        return float(self.meta.get("period", self.length))

    def transformed(self, rotation: np.ndarray, shift=(0.0, 0.0)) -> "PlaneCurve":
        """Apply the rigid motion ``x -> R x + shift``; curvature is unchanged for proper R."""
        R = np.asarray(rotation, dtype=float)
        return replace(
            self,
            points=self.points @ R.T + np.asarray(shift, dtype=float),
            tangents=self.tangents @ R.T,
            normals=self.normals @ R.T,
        )


def edges(points: np.ndarray, closed: bool) -> np.ndarray:
    if closed:
        return np.roll(points, -1, axis=0) - points
    return np.diff(points, axis=0)


def edge_lengths(points: np.ndarray, closed: bool) -> np.ndarray:
    return np.hypot(*edges(points, closed).T)


def chord_arc(points: np.ndarray, closed: bool = False, start: float = 0.0) -> np.ndarray:
    """Cumulative chord length at each sample."""
    lengths = np.hypot(*np.diff(points, axis=0).T)
    return start + np.concatenate([[0.0], np.cumsum(lengths)])


def _unit_edges(points, closed):
    e = edges(points, closed)
    ell = np.hypot(*e.T)
    if np.any(ell < MIN_EDGE):
        i = int(np.argmin(ell))
        raise DegenerateEdge(f"edge {i} has length {ell[i]:.3g} < {MIN_EDGE:g}")
    return e / ell[:, None], ell


def vertex_frames(points: np.ndarray, closed: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Unit tangents and normals at each vertex.

    Interior tangents bisect the adjacent edge directions; free ends use the
    one-sided derivative of the quadratic through the last three samples.
    """
    u, _ = _unit_edges(points, closed)
    if closed:
        t = u + np.roll(u, 1, axis=0)
    else:
        t = np.empty_like(points)
        t[1:-1] = u[1:] + u[:-1]
        t[0] = _end_derivative(points[:3])
        t[-1] = -_end_derivative(points[:-4:-1])
    t /= np.hypot(*t.T)[:, None]
    return t, rot90(t)


def _end_derivative(p3: np.ndarray) -> np.ndarray:
    # derivative at p3[0] of the quadratic through three samples, chord-parameterised
    if len(p3) < 3:
        return p3[1] - p3[0]
    a = np.hypot(*(p3[1] - p3[0]))
    b = np.hypot(*(p3[2] - p3[1]))
    return (-(2 * a + b) / (a * (a + b)) * p3[0] + (a + b) / (a * b) * p3[1]
            - a / ((a + b) * b) * p3[2])


def estimate_curvature(points, closed: bool = False) -> np.ndarray:
    """Turning-angle curvature ``dtheta_i / l_i``.

    ``dtheta_i`` is the signed angle between the edges meeting at vertex i and
    ``l_i`` the mean of their lengths.  Free ends copy their single neighbour.
    """
    if isinstance(points, PlaneCurve):
        points, closed = points.points, points.closed
    points = np.asarray(points, dtype=float)
    if len(points) < 3:
        raise ValueError("curvature estimation needs at least 3 points")
    u, ell = _unit_edges(points, closed)
    if closed:
        u_prev, u_next = np.roll(u, 1, axis=0), u
        l_prev, l_next = np.roll(ell, 1), ell
    else:
        u_prev, u_next = u[:-1], u[1:]
        l_prev, l_next = ell[:-1], ell[1:]
    cross = u_prev[:, 0] * u_next[:, 1] - u_prev[:, 1] * u_next[:, 0]
    dot = np.einsum("ij,ij->i", u_prev, u_next)
    kappa = np.arctan2(cross, dot) / (0.5 * (l_prev + l_next))
    if closed:
        return kappa
    return np.concatenate([[kappa[0]], kappa, [kappa[-1]]])


def curve_from_points(points, closed: bool = False, kappas=None, arc_start: float = 0.0,
                      meta: dict | None = None) -> PlaneCurve:
    """Build a PlaneCurve from raw points: chord arc length, bisector frames, estimated curvature."""
    points = np.array(points, dtype=float)
    t, n = vertex_frames(points, closed)
    k = estimate_curvature(points, closed) if kappas is None else np.asarray(kappas, dtype=float)
    return PlaneCurve(points, t, n, k, chord_arc(points, closed, arc_start), closed, meta or {})


def resample_uniform(curve: PlaneCurve, n: int | None = None) -> PlaneCurve:
    """Redistribute samples uniformly in arc length (cubic spline, endpoints preserved)."""
    n = len(curve) if n is None else n
    pts = curve.points
    if curve.closed:
        pts = np.vstack([pts, pts[:1]])
        s = chord_arc(pts)
        spline = CubicSpline(s, pts, bc_type="periodic")
        s_new = np.linspace(0.0, s[-1], n + 1)[:-1]
    else:
        s = chord_arc(pts)
        spline = CubicSpline(s, pts)
        s_new = np.linspace(0.0, s[-1], n)
    return curve_from_points(spline(s_new), curve.closed, arc_start=float(curve.arc[0]),
                             meta=dict(curve.meta))


def edge_ratio(curve: PlaneCurve) -> float:
    ell = edge_lengths(curve.points, curve.closed)
    return float(ell.max() / ell.min())


def shoelace_area(points: np.ndarray) -> float:
    x, y = np.asarray(points, dtype=float).T
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def rigid_align(source: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares proper rigid motion (Kabsch) taking matched ``source`` points onto ``target``.

    Returns ``(R, shift, max_distance)`` with ``target ~ source @ R.T + shift``.
    """
    src = np.asarray(source, dtype=float)
    tgt = np.asarray(target, dtype=float)
    cs, ct = src.mean(axis=0), tgt.mean(axis=0)
    H = (src - cs).T @ (tgt - ct)
    U, _, Vt = np.linalg.svd(H)
    D = np.diag([1.0, np.sign(np.linalg.det(Vt.T @ U.T)) or 1.0])
    R = Vt.T @ D @ U.T
    shift = ct - cs @ R.T
    dist = np.hypot(*(src @ R.T + shift - tgt).T)
    return R, shift, float(dist.max())


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def nearest_on_polyline(query: np.ndarray, vertices: np.ndarray, closed: bool = False) -> np.ndarray:
    """Closest point on the polyline through ``vertices`` for each query point."""
    a = vertices
    b = np.roll(vertices, -1, axis=0) if closed else vertices[1:]
    a = a if closed else a[:-1]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    rel = query[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("mij,ij->mi", rel, ab) / denom, 0.0, 1.0)
    proj = a[None] + t[..., None] * ab[None]
    d2 = np.sum((query[:, None, :] - proj) ** 2, axis=-1)
    j = np.argmin(d2, axis=1)
    return proj[np.arange(len(query)), j]
