"""Local PCA estimates of tangent spaces."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError

DEGENERATE_SV = 1e-12


class DegenerateGeometryWarning(UserWarning):
    """A neighborhood does not span ``d`` dimensions."""


@dataclass(frozen=True)
class TangentFrames:
    """Orthonormal ``m x d`` basis per point, stored as an ``(n, m, d)`` array."""

    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim != 3 or frames.shape[2] > frames.shape[1]:
            raise StructuralError(f"frames must have shape (n, m, d<=m), got {frames.shape}")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n(self):
        return self.frames.shape[0]

    @property
    def m(self):
        return self.frames.shape[1]

    @property
    def d(self):
        return self.frames.shape[2]

    def projectors(self):
        """``T_i T_i^T`` for every point, shape ``(n, m, m)``."""
        return np.einsum("imd,ikd->imk", self.frames, self.frames)

    def rotated(self, rotations):
        """Frames ``T_i R_i`` for a stack of ``d x d`` orthogonal matrices."""
        return TangentFrames(np.einsum("imd,ide->ime", self.frames, rotations))


def neighborhood_center(points, neighbors, i):
    """Mean used to center the neighborhood of ``i`` before PCA.

    Only the neighbors enter the mean; the point itself does not.
    """
    return points[neighbors].mean(axis=0)


def _fix_signs(U):
    # make the largest-magnitude entry of each column positive
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def estimate_tangent_spaces(cloud, graph, d):
    """Top-``d`` principal directions of each point's graph neighborhood.

    Parameters
    ----------
    cloud : PointCloud
    graph : NeighborGraph
        Must be built on ``cloud``.
    d : int
        Intrinsic dimension, ``1 <= d <= m``.

    Returns
    -------
    TangentFrames

    Raises
    ------
    StructuralError
        If some vertex has fewer than ``d`` neighbors.
    """
    if graph.n != cloud.n:
        raise StructuralError(f"graph has {graph.n} vertices but cloud has {cloud.n} points")
    if int(d) != d or not 1 <= d <= cloud.m:
        raise StructuralError(f"d must satisfy 1 <= d <= m={cloud.m}, got {d}")
    X = cloud.points
    frames = np.empty((cloud.n, cloud.m, d))
    degenerate = []
    for i in range(cloud.n):
        nbrs = graph.neighbors(i)
        if len(nbrs) < d:
            raise StructuralError(f"vertex {i} has {len(nbrs)} neighbors, fewer than d={d}")
        centered = X[nbrs] - neighborhood_center(X, nbrs, i)
        U, s, _ = np.linalg.svd(centered.T, full_matrices=False)
        if s[d - 1] < DEGENERATE_SV:
            degenerate.append(i)
        frames[i] = _fix_signs(U[:, :d])
    if degenerate:
        warnings.warn(f"{len(degenerate)} neighborhoods span fewer than {d} dimensions "
                      f"(first: vertex {degenerate[0]})", DegenerateGeometryWarning, stacklevel=2)
    return TangentFrames(frames)
