"""Discrete connection Laplacian, gradient coupling matrices and energies.

All block matrices use vertex-major ordering: rows ``d*i .. d*i+d-1``
belong to vertex ``i``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import StructuralError


def transport(frames, i, j):
    """``Q_ij = T_i^T T_j``, mapping coordinates at ``j`` into the frame at ``i``."""
    T = frames.frames
    return T[i].T @ T[j]


def _check(graph, frames, cloud=None):
    if graph.n != frames.n:
        raise StructuralError(f"graph has {graph.n} vertices but there are {frames.n} frames")
    if cloud is not None and (cloud.n != frames.n or cloud.m != frames.m):
        raise StructuralError("cloud shape does not match the tangent frames")


def _positive_directed(graph):
    src, dst, w, _ = graph.directed()
    keep = w > 0
    return src[keep], dst[keep], w[keep]


def _block_matrix(n, d, rows, cols, blocks):
    order = np.lexsort((cols, rows))
    rows, cols, blocks = rows[order], cols[order], blocks[order]
    indptr = np.searchsorted(rows, np.arange(n + 1))
    return sparse.bsr_matrix((blocks, cols, indptr), shape=(d * n, d * n))


@dataclass(frozen=True)
class ConnectionLaplacian:
    """Block-sparse ``dn x dn`` operator ``B`` held as a BSR matrix."""

    matrix: sparse.bsr_matrix
    n: int
    d: int

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def nnz_blocks(self):
        return len(self.matrix.indices)

    def block(self, i, j):
        M = self.matrix
        lo, hi = M.indptr[i], M.indptr[i + 1]
        hit = np.flatnonzero(M.indices[lo:hi] == j)
        if hit.size == 0:
            return np.zeros((self.d, self.d))
        return M.data[lo + hit[0]].copy()

    def __matmul__(self, x):
        return self.matrix @ x

    def toarray(self):
        return self.matrix.toarray()


def assemble_connection_laplacian(graph, frames):
    """Assemble ``B`` from unit-free blocks.

    ``B_ii = sum_j w_ij (Q_ij Q_ij^T + I)`` and ``B_ij = -2 w_ij Q_ij`` over
    neighbors ``j`` of ``i``; edges of zero weight contribute nothing.
    """
    _check(graph, frames)
    n, d = frames.n, frames.d
    T = frames.frames
    src, dst, w = _positive_directed(graph)
    Q = np.einsum("emd,emk->edk", T[src], T[dst])
    diag = np.zeros((n, d, d))
    np.add.at(diag, src, w[:, None, None] * (Q @ Q.transpose(0, 2, 1) + np.eye(d)))
    active = np.unique(src)
    rows = np.concatenate([active, src])
    cols = np.concatenate([active, dst])
    blocks = np.concatenate([diag[active], -2.0 * w[:, None, None] * Q])
    if rows.size == 0:
        return ConnectionLaplacian(sparse.bsr_matrix((d * n, d * n), blocksize=(d, d)), n, d)
    return ConnectionLaplacian(_block_matrix(n, d, rows, cols, blocks), n, d)


def _edge_gradients(cloud, graph, frames):
    src, dst, w = _positive_directed(graph)
    X = cloud.points
    g = np.einsum("emd,em->ed", frames.frames[src], X[dst] - X[src])
    return src, dst, w, g


def assemble_C(cloud, graph, frames):
    """``dn x n`` matrix with ``(C f)_i = sum_j w_ij T_i^T (x_j - x_i) (f_j - f_i)``."""
    _check(graph, frames, cloud)
    n, d = frames.n, frames.d
    src, dst, w, g = _edge_gradients(cloud, graph, frames)
    wg = (w[:, None] * g).ravel()
    rows = (d * src[:, None] + np.arange(d)).ravel()
    cols_dst = np.repeat(dst, d)
    cols_src = np.repeat(src, d)
    C = sparse.coo_matrix((np.concatenate([wg, -wg]),
                           (np.concatenate([rows, rows]), np.concatenate([cols_dst, cols_src]))),
                          shape=(d * n, n))
    return C.tocsr()


def assemble_G(cloud, graph, frames):
    """Block-diagonal ``G`` with ``G_ii = sum_j w_ij g_ij g_ij^T``, ``g_ij = T_i^T (x_j - x_i)``."""
    _check(graph, frames, cloud)
    n, d = frames.n, frames.d
    src, dst, w, g = _edge_gradients(cloud, graph, frames)
    diag = np.zeros((n, d, d))
    np.add.at(diag, src, w[:, None, None] * np.einsum("ed,ek->edk", g, g))
    idx = np.arange(n)
    return _block_matrix(n, d, idx, idx, diag)


def _vec(x, size, name):
    x = np.asarray(x, dtype=float)
    if x.shape != (size,):
        raise StructuralError(f"{name} has shape {x.shape}, expected ({size},)")
    return x


def energy_E(V, V0, B, t):
    """Heat-flow objective ``|V|^2 - 2 V0.V + |V0|^2 + t V^T B V``."""
    size = B.shape[0]
    V = _vec(getattr(V, "coords", V), size, "V")
    V0 = _vec(getattr(V0, "coords", V0), size, "V0")
    return float(V @ V - 2.0 * V0 @ V + V0 @ V0 + t * (V @ (B @ V)))


def energy_Phi(f, Vhat, L, G, C):
    """Gradient-matching objective ``2 f^T L f + Vhat^T G Vhat - 2 Vhat^T C f``."""
    n = L.shape[0]
    f = _vec(getattr(f, "values", f), n, "f")
    Vhat = _vec(getattr(Vhat, "coords", Vhat), C.shape[0], "Vhat")
    if G.shape != (C.shape[0], C.shape[0]) or C.shape[1] != n:
        raise StructuralError("L, G and C have inconsistent shapes")
    return float(2.0 * f @ (L @ f) + Vhat @ (G @ Vhat) - 2.0 * Vhat @ (C @ f))
