"""Geodesic distance learning by heat flow on tangent vector fields.

For a base point ``q`` the pipeline is:

1. put unit vectors pointing away from ``q`` on the neighbors of ``q``;
2. diffuse that field over the manifold by one implicit heat step
   ``(I + t B) V = V0`` with the connection Laplacian ``B``;
3. normalize every vector to unit length (zero at ``q``);
4. find ``f`` with ``f_q = 0`` whose graph gradient best matches the
   normalized field, i.e. least squares on ``2 L f = C^T Vhat``.

Everything that does not depend on ``q`` (graph, frames, ``B``, ``L``,
``C``) is built once per :class:`GeodesicDistanceLearner`.
"""

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .connection import assemble_C, assemble_connection_laplacian
from .errors import (ConvergenceError, DisconnectedGraphError, GdlError, ParameterError,
                     StageError)
from .fields import DistanceField, VectorField
from .graph import assign_weights, build_knn_graph, graph_laplacian
from .solver import DEFAULT_TOL, solve_least_squares, solve_spd
from .tangent import estimate_tangent_spaces

ZERO_NORM = 1e-12


class DegenerateFieldWarning(UserWarning):
    """Some vectors could not be normalized and were set to zero."""


@dataclass(frozen=True)
class GdlParams:
    k: int = 16
    d: int = 2
    t: float = 1.0
    weights: str = "binary"
    sigma: float | None = None
    tol: float = DEFAULT_TOL
    max_iter: int | None = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k}")
        if int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"d must be a positive integer, got {self.d}")
        if not self.t > 0:
            raise ParameterError(f"t must be positive, got {self.t}")
        if self.weights not in ("binary", "heat"):
            raise ParameterError(f"unknown weight scheme {self.weights!r}")
        if self.weights == "heat" and not (self.sigma is not None and self.sigma > 0):
            raise ParameterError("heat weights need sigma > 0")
        if not self.tol > 0:
            raise ParameterError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class GdlStages:
    """Intermediate products for one base point."""

    initial: VectorField
    diffused: VectorField
    normalized: VectorField
    distance: DistanceField


def _check_query(q, n):
    if int(q) != q or not 0 <= q < n:
        raise ParameterError(f"query {q} out of range for {n} points")
    return int(q)


def _initial_matrix(cloud, graph, frames, queries):
    n, d = frames.n, frames.d
    X, T = cloud.points, frames.frames
    V0 = np.zeros((n, d, len(queries)))
    degenerate = [[] for _ in queries]
    for col, q in enumerate(queries):
        nbrs = graph.neighbors(q)
        u = X[nbrs] - X[q]
        coords = np.einsum("jmd,jm->jd", T[nbrs], u)
        denom = np.linalg.norm(np.einsum("jmd,jd->jm", T[nbrs], coords), axis=1)
        ok = denom >= ZERO_NORM
        V0[nbrs[ok], :, col] = coords[ok] / denom[ok, None]
        degenerate[col] = [int(j) for j in nbrs[~ok]]
    if any(degenerate):
        warnings.warn("some neighbors of the base point are orthogonal to their tangent "
                      "space; their initial vectors were set to zero",
                      DegenerateFieldWarning, stacklevel=3)
    return V0.reshape(n * d, len(queries)), degenerate


def initial_vector_field(cloud, graph, frames, q):
    """Unit vectors at the neighbors of ``q`` pointing away from ``x_q``.

    ``v_j = T_j^T (x_j - x_q) / |T_j T_j^T (x_j - x_q)|`` for ``j ~ q`` and
    zero elsewhere, including at ``q``.
    """
    q = _check_query(q, cloud.n)
    if len(graph.neighbors(q)) == 0:
        raise GdlError(f"base point {q} has no neighbors")
    V0, degenerate = _initial_matrix(cloud, graph, frames, [q])
    return VectorField(V0[:, 0], frames.d, tuple(degenerate[0]))


def _diffuse_matrix(B, V0, t, tol, max_iter):
    report = solve_spd(lambda X: X + t * (B @ X), V0, tol=tol, max_iter=max_iter)
    if not report.all_converged:
        raise ConvergenceError(
            f"heat-flow solve did not converge (residual {np.max(report.final_residual):.3g})")
    return report.solution


def diffuse_vector_field(B, V0, t, tol=DEFAULT_TOL, max_iter=None):
    """Solve ``(I + t B) V = V0`` by conjugate gradients."""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    V = _diffuse_matrix(B, V0.coords[:, None], t, tol, max_iter)
    return VectorField(V[:, 0], V0.d)


def _normalize_matrix(V, d, queries):
    n = V.shape[0] // d
    blocks = V.reshape(n, d, -1)
    norms = np.linalg.norm(blocks, axis=1)
    cols = np.arange(len(queries))
    norms[queries, cols] = 0.0
    ok = norms >= ZERO_NORM
    out = np.divide(blocks, norms[:, None, :], out=np.zeros_like(blocks), where=ok[:, None, :])
    zero = [tuple(int(i) for i in np.flatnonzero(~ok[:, c]) if i != q)
            for c, q in enumerate(queries)]
    return out.reshape(n * d, -1), zero


def normalize_vector_field(V, q):
    """Scale every vector to unit length; the base point gets the zero vector.

    Vectors shorter than ``1e-12`` stay zero and are listed in
    ``zero_vertices`` of the result.
    """
    q = _check_query(q, V.n)
    out, zero = _normalize_matrix(V.coords[:, None], V.d, [q])
    return VectorField(out[:, 0], V.d, zero[0])


def _check_connected(L):
    from scipy.sparse import csgraph

    count, labels = csgraph.connected_components(L != 0, directed=False)
    if count > 1:
        sizes = np.bincount(labels)
        raise DisconnectedGraphError(
            f"neighbor graph has {count} connected components of sizes {sorted(sizes.tolist())}",
            components=labels)


def _recover_matrix(L, C, Vhat, queries, tol, max_iter):
    n = L.shape[0]
    rhs = C.T @ Vhat
    free = np.ones((n, len(queries)), dtype=bool)
    free[queries, np.arange(len(queries))] = False
    report = solve_least_squares(2.0 * L, rhs, tol=tol, max_iter=max_iter, free=free)
    if not report.all_converged:
        raise ConvergenceError(
            f"distance solve did not converge (residual {np.max(report.final_residual):.3g})")
    F = report.solution
    F[queries, np.arange(len(queries))] = 0.0
    return F


def recover_distance(L, C, Vhat, q, tol=DEFAULT_TOL, max_iter=None):
    """Least-squares ``f`` for ``2 L f = C^T Vhat`` with ``f_q`` pinned to zero."""
    q = _check_query(q, L.shape[0])
    _check_connected(L)
    F = _recover_matrix(L, C, Vhat.coords[:, None], [q], tol, max_iter)
    return DistanceField(F[:, 0], q)


class GeodesicDistanceLearner:
    """Shared geometry for many base points on one point cloud.

    Parameters
    ----------
    cloud : PointCloud
    params : GdlParams, optional
    frames : TangentFrames, optional
        Use these frames instead of estimating them by local PCA.
    """

    def __init__(self, cloud, params=None, frames=None):
        self.cloud = cloud
        self.params = GdlParams() if params is None else params
        if self.params.d > cloud.m:
            raise ParameterError(f"d={self.params.d} exceeds ambient dimension {cloud.m}")
        if frames is not None:
            self.__dict__["frames"] = frames

    def _stage(self, name, fn, *args):
        try:
            return fn(*args)
        except StageError:
            raise
        except GdlError as exc:
            raise StageError(name, exc) from exc

    @cached_property
    def graph(self):
        p = self.params
        g = self._stage("graph", build_knn_graph, self.cloud, p.k)
        return self._stage("graph", assign_weights, g, p.weights, p.sigma)

    @cached_property
    def frames(self):
        return self._stage("tangent", estimate_tangent_spaces, self.cloud, self.graph, self.params.d)

    @cached_property
    def B(self):
        return self._stage("connection", assemble_connection_laplacian, self.graph, self.frames)

    @cached_property
    def L(self):
        L = graph_laplacian(self.graph)
        self._stage("graph", _check_connected, L)
        return L

    @cached_property
    def C(self):
        return self._stage("connection", assemble_C, self.cloud, self.graph, self.frames)

    def prepare(self):
        """Build every query-independent operator now."""
        for name in ("graph", "frames", "B", "L", "C"):
            getattr(self, name)
        return self

    def _run(self, queries):
        p, d = self.params, self.params.d
        queries = [_check_query(q, self.cloud.n) for q in queries]
        self.prepare()
        V0, _ = self._stage("initial", _initial_matrix, self.cloud, self.graph, self.frames, queries)
        V = self._stage("diffuse", _diffuse_matrix, self.B, V0, p.t, p.tol, p.max_iter)
        Vhat, zero = self._stage("normalize", _normalize_matrix, V, d, queries)
        if any(zero):
            warnings.warn(f"{sum(map(len, zero))} diffused vectors vanished and were left as "
                          "zero", DegenerateFieldWarning, stacklevel=3)
        F = self._stage("recover", _recover_matrix, self.L, self.C, Vhat, queries, p.tol,
                        p.max_iter)
        return queries, V0, V, Vhat, zero, F

    def distances(self, queries):
        """``(n, len(queries))`` matrix; column ``j`` is the distance from ``queries[j]``."""
        return self._run(list(queries))[-1]

    def distance(self, q):
        queries, _, _, _, _, F = self._run([q])
        return DistanceField(F[:, 0], queries[0])

    def stages(self, q):
        """All intermediate fields for base point ``q``."""
        queries, V0, V, Vhat, zero, F = self._run([q])
        d = self.params.d
        return GdlStages(VectorField(V0[:, 0], d), VectorField(V[:, 0], d),
                         VectorField(Vhat[:, 0], d, zero[0]), DistanceField(F[:, 0], queries[0]))


def gdl_single(cloud, q, params=None):
    """Learned geodesic distance from point ``q`` to every point of ``cloud``."""
    return GeodesicDistanceLearner(cloud, params).distance(q)


def gdl_multi(cloud, queries, params=None):
    """Distances from several base points, sharing all assembly work."""
    return GeodesicDistanceLearner(cloud, params).distances(queries)
