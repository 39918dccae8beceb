import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from solitonlab.errors import DegenerateEdge
from solitonlab.geometry import (
    curve_from_points,
    estimate_curvature,
    resample_uniform,
    rigid_align,
    rotation,
    shoelace_area,
    vertex_frames,
)


def regular_polygon(n, radius=1.0):
    t = 2 * np.pi * np.arange(n) / n
    return radius * np.stack([np.cos(t), np.sin(t)], axis=1)


def test_polygon_curvature():
    k = estimate_curvature(regular_polygon(256), closed=True)
    assert np.max(np.abs(k - 1.0)) < 1e-3


def test_clockwise_polygon_has_negative_curvature():
    k = estimate_curvature(regular_polygon(64)[::-1], closed=True)
    assert np.all(k < 0)


def test_collinear_points_are_flat():
    pts = np.stack([np.linspace(0, 3, 20), 2 * np.linspace(0, 3, 20) + 1], axis=1)
    np.testing.assert_allclose(estimate_curvature(pts), 0.0, atol=1e-12)


def test_grim_reaper_graph_vertex():
    x = np.linspace(-1, 1, 400)
    pts = np.stack([x, -np.log(np.cos(x))], axis=1)
    k = estimate_curvature(pts)
    mid = np.argmin(np.abs(x))
    assert k[mid] == pytest.approx(1.0, abs=1e-3)
    interior = slice(1, -1)
    np.testing.assert_allclose(k[interior], np.cos(x[interior]), atol=1e-3)


def test_free_ends_copy_neighbour():
    k = estimate_curvature(regular_polygon(40)[:10])
    assert k[0] == k[1] and k[-1] == k[-2]


def test_degenerate_edge():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 1.0]])
    with pytest.raises(DegenerateEdge):
        estimate_curvature(pts)


def test_frames_are_orthonormal_and_ccw():
    T, N = vertex_frames(regular_polygon(33)[:20])
    np.testing.assert_allclose(np.hypot(*T.T), 1.0, atol=1e-15)
    np.testing.assert_allclose(np.einsum("ij,ij->i", T, N), 0.0, atol=1e-15)
    np.testing.assert_allclose(T[:, 0] * N[:, 1] - T[:, 1] * N[:, 0], 1.0, atol=1e-15)


def test_inward_normal_on_ccw_circle():
    pts = regular_polygon(50)
    _, N = vertex_frames(pts, closed=True)
    np.testing.assert_allclose(N, -pts, atol=1e-14)


@given(st.floats(-math.pi, math.pi), st.floats(-5, 5), st.floats(-5, 5))
def test_rigid_align_recovers_motion(angle, tx, ty):
    rng = np.random.default_rng(1)
    src = rng.normal(size=(30, 2))
    R = rotation(angle)
    tgt = src @ R.T + [tx, ty]
    R_est, shift, dist = rigid_align(src, tgt)
    np.testing.assert_allclose(R_est, R, atol=1e-10)
    assert dist < 1e-10


def test_resample_uniform_spacing_and_area():
    t = np.sort(np.random.default_rng(3).uniform(0, 2 * np.pi, 300))
    curve = curve_from_points(np.stack([np.cos(t), np.sin(t)], axis=1), closed=True)
    even = resample_uniform(curve, 200)
    ell = np.hypot(*np.diff(np.vstack([even.points, even.points[:1]]), axis=0).T)
    assert ell.max() / ell.min() < 1.01
    assert shoelace_area(even.points) == pytest.approx(math.pi, rel=1e-3)
