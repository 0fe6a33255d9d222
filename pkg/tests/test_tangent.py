import numpy as np
import pytest

from gdlearn.dataset import PointCloud, sample_plane_grid, sample_sphere, sample_torus
from gdlearn.errors import StructuralError
from gdlearn.graph import NeighborGraph, build_knn_graph
from gdlearn.tangent import DegenerateGeometryWarning, estimate_tangent_spaces


def frames_for(cloud, k, d):
    return estimate_tangent_spaces(cloud, build_knn_graph(cloud, k), d)


def test_plane_frames_orthogonal_to_normal(rng):
    pts = np.column_stack([rng.uniform(size=(200, 2)), np.zeros(200)])
    fr = frames_for(PointCloud(pts), 8, 2)
    ez = np.array([0.0, 0.0, 1.0])
    assert np.max(np.linalg.norm(fr.projectors() @ ez, axis=1)) <= 1e-8


def test_full_dimension_spans_everything(rng):
    fr = frames_for(PointCloud(rng.standard_normal((50, 3))), 6, 3)
    np.testing.assert_allclose(fr.projectors(), np.broadcast_to(np.eye(3), (50, 3, 3)),
                               atol=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_orthonormal_columns(rng, d):
    fr = frames_for(PointCloud(rng.standard_normal((60, 4))), 5, d)
    gram = np.einsum("imd,ime->ide", fr.frames, fr.frames)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(d), gram.shape), atol=1e-10)
    # sign convention: largest-magnitude entry of each column is positive
    T = fr.frames
    idx = np.argmax(np.abs(T), axis=1)
    assert np.all(np.take_along_axis(T, idx[:, None, :], axis=1) > 0)


def test_projector_independent_of_vertex_order(rng):
    pts = rng.standard_normal((40, 3))
    perm = rng.permutation(40)
    a = frames_for(PointCloud(pts), 6, 2).projectors()
    b = frames_for(PointCloud(pts[perm]), 6, 2).projectors()
    np.testing.assert_allclose(a[perm], b, atol=1e-10)


def _principal_angle_deg(frames, normals):
    est = np.cross(frames.frames[:, :, 0], frames.frames[:, :, 1])
    cos = np.abs(np.sum(est * normals, axis=1))
    return np.degrees(np.arccos(np.clip(cos, 0, 1)))


def test_sphere_tangent_accuracy():
    cloud = sample_sphere(2000, 1.0, 0)
    ang = _principal_angle_deg(frames_for(cloud, 16, 2), cloud.points)
    assert np.mean(ang < 15) >= 0.95


def test_torus_tangent_accuracy():
    R, r = 2.0, 0.8
    cloud = sample_torus(2000, R, r, 7)
    p = cloud.points
    center = R * p[:, :2] / np.hypot(p[:, 0], p[:, 1])[:, None]
    normals = (p - np.column_stack([center, np.zeros(len(p))])) / r
    ang = _principal_angle_deg(frames_for(cloud, 16, 2), normals)
    assert np.mean(ang < 15) >= 0.95


def test_too_few_neighbors_names_vertex():
    cloud = sample_plane_grid(3)
    g = NeighborGraph(9, np.array([[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [6, 7],
                                   [7, 8]]), np.ones(8), np.ones(8))
    with pytest.raises(StructuralError, match="vertex 0"):
        estimate_tangent_spaces(cloud, g, 2)


def test_degenerate_neighborhood_warns():
    # collinear points cannot span a plane
    pts = np.column_stack([np.arange(10.0), np.zeros(10), np.zeros(10)])
    with pytest.warns(DegenerateGeometryWarning):
        fr = frames_for(PointCloud(pts), 3, 2)
    gram = np.einsum("imd,ime->ide", fr.frames, fr.frames)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(2), gram.shape), atol=1e-10)
