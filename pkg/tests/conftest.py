import numpy as np
import pytest

from gdlearn.dataset import PointCloud
from gdlearn.graph import NeighborGraph, build_knn_graph
from gdlearn.tangent import TangentFrames


def random_instance(seed, n=12, m=3, d=2, k=3, weighted=True):
    """Random cloud, kNN graph with random positive weights, random orthonormal frames."""
    rng = np.random.default_rng(seed)
    cloud = PointCloud(rng.standard_normal((n, m)))
    g = build_knn_graph(cloud, k)
    if weighted:
        g = NeighborGraph(g.n, g.edges, rng.uniform(0.2, 2.0, g.num_edges), g.lengths)
    frames = np.stack([np.linalg.qr(rng.standard_normal((m, d)))[0] for _ in range(n)])
    return cloud, g, TangentFrames(frames)


def random_rotations(rng, n, d):
    return np.stack([np.linalg.qr(rng.standard_normal((d, d)))[0] for _ in range(n)])


def line_cloud(xs):
    return PointCloud(np.asarray(xs, dtype=float)[:, None])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


def record_acceptance(line):
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
