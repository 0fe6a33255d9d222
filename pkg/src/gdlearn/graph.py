"""Symmetric neighbor graphs, edge weights and the graph Laplacian."""

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import cdist

from .errors import ParameterError, StructuralError


@dataclass(frozen=True)
class NeighborGraph:
    """Undirected graph on ``n`` vertices.

    ``edges`` is an ``(E, 2)`` integer array of unordered pairs stored with
    ``i < j`` in lexicographic order; ``weights`` and ``lengths`` are
    aligned with it.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    lengths: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float)
        lengths = np.asarray(self.lengths, dtype=float)
        if weights.shape != (len(edges),) or lengths.shape != (len(edges),):
            raise StructuralError("weights and lengths must align with edges")
        if len(edges) and (np.any(edges[:, 0] >= edges[:, 1]) or edges.min() < 0
                           or edges.max() >= self.n):
            raise StructuralError("edges must be pairs i < j of valid vertices")
        if np.any(weights < 0):
            raise StructuralError("edge weights must be nonnegative")
        for a in (edges, weights, lengths):
            a.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "lengths", lengths)

    @property
    def num_edges(self):
        return len(self.edges)

    def directed(self):
        """Both orientations of every edge as ``(src, dst, weight, length)``."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        return (np.concatenate([i, j]), np.concatenate([j, i]),
                np.concatenate([self.weights, self.weights]),
                np.concatenate([self.lengths, self.lengths]))

    def _sym(self, data):
        src, dst, _, _ = self.directed()
        return sparse.csr_matrix((np.concatenate([data, data]), (src, dst)),
                                 shape=(self.n, self.n))

    def adjacency(self):
        """Sparse symmetric weight matrix ``W``."""
        return self._sym(self.weights)

    def length_matrix(self):
        return self._sym(self.lengths)

    @cached_property
    def _structure(self):
        src, dst, _, _ = self.directed()
        order = np.lexsort((dst, src))
        indptr = np.searchsorted(src[order], np.arange(self.n + 1))
        return indptr, dst[order]

    def neighbors(self, i):
        indptr, indices = self._structure
        return indices[indptr[i]:indptr[i + 1]]

    def degrees(self):
        return np.diff(self._structure[0])

    def components(self):
        """Connected-component label per vertex (structure only, weights ignored)."""
        pattern = self._sym(np.ones(self.num_edges))
        _, labels = csgraph.connected_components(pattern, directed=False)
        return labels


def _from_pairs(points, i, j):
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    pairs = np.unique(np.column_stack([lo, hi]), axis=0)
    lengths = np.linalg.norm(points[pairs[:, 1]] - points[pairs[:, 0]], axis=1)
    return NeighborGraph(len(points), pairs, np.ones(len(pairs)), lengths)


def build_knn_graph(cloud, k):
    """Union-symmetrized ``k``-nearest-neighbor graph with unit weights.

    Edge ``(i, j)`` exists when ``j`` is among the ``k`` nearest points of
    ``i`` or vice versa. Equal distances are broken toward the lower index.
    """
    n = cloud.n
    if int(k) != k or not 1 <= k < n:
        raise ParameterError(f"k must satisfy 1 <= k < n={n}, got {k}")
    dist = cdist(cloud.points, cloud.points)
    np.fill_diagonal(dist, np.inf)
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
    rows = np.repeat(np.arange(n), k)
    return _from_pairs(cloud.points, rows, nearest.ravel())


def build_epsilon_graph(cloud, eps):
    """Graph joining every pair of distinct points within distance ``eps``."""
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    dist = cdist(cloud.points, cloud.points)
    i, j = np.nonzero(np.triu(dist <= eps, k=1))
    return _from_pairs(cloud.points, i, j)


def assign_weights(graph, scheme="binary", sigma=None):
    """Return a copy of ``graph`` with new edge weights.

    ``"binary"`` sets every weight to 1; ``"heat"`` uses
    ``exp(-length**2 / sigma**2)``.
    """
    if scheme == "binary":
        weights = np.ones(graph.num_edges)
    elif scheme == "heat":
        if sigma is None or not sigma > 0:
            raise ParameterError(f"heat weights need sigma > 0, got {sigma}")
        weights = np.exp(-(graph.lengths / sigma) ** 2)
    else:
        raise ParameterError(f"unknown weight scheme {scheme!r}")
    return replace(graph, weights=weights)


def graph_laplacian(graph):
    """Sparse ``L = D - W`` in CSR format."""
    W = graph.adjacency()
    deg = np.asarray(W.sum(axis=1)).ravel()
    return (sparse.diags(deg) - W).tocsr()
