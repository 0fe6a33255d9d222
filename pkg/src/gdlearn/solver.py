"""Conjugate gradients and LSQR for one or many right-hand sides.

Both solvers accept ``b`` of shape ``(N,)`` or ``(N, p)``. Columns are
independent problems that share the operator; each column keeps its own
scalars and stops on its own, so a column's iterates do not depend on the
other columns in the batch.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SolveReport:
    """Outcome of an iterative solve.

    For a 2-D right-hand side, ``iterations``, ``final_residual`` and
    ``converged`` are arrays with one entry per column.
    """

    solution: np.ndarray
    iterations: int | np.ndarray
    final_residual: float | np.ndarray
    converged: bool | np.ndarray

    @property
    def all_converged(self):
        return bool(np.all(self.converged))


def _as_apply(A):
    if callable(A):
        return A
    return lambda X: A @ X


def _prepare(b, tol):
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    b = np.asarray(b, dtype=float)
    if b.ndim not in (1, 2):
        raise ParameterError("right-hand side must be a vector or a matrix")
    if not np.all(np.isfinite(b)):
        raise NumericalError("right-hand side has non-finite entries")
    return b, b.reshape(b.shape[0], -1)


def _finish(b, X, its, res, conv):
    if b.ndim == 1:
        return SolveReport(X[:, 0], int(its[0]), float(res[0]), bool(conv[0]))
    return SolveReport(X, its, res, conv)


def _finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericalError("non-finite value during iteration")


def _colnorm(A):
    return np.sqrt(np.einsum("ij,ij->j", A, A))


def solve_spd(apply_A, b, tol=DEFAULT_TOL, max_iter=None):
    """Conjugate gradients for a symmetric positive-definite operator.

    Parameters
    ----------
    apply_A : callable or matrix
        ``apply_A(X)`` must return ``A @ X`` for an ``(N, p)`` block ``X``.
    b : ndarray
        Right-hand side, ``(N,)`` or ``(N, p)``.
    tol : float
        Stop once ``|b - A x| <= tol * |b|`` holds for the true residual.
    max_iter : int, optional
        Defaults to ``10 * N``.

    Returns
    -------
    SolveReport
    """
    b, B = _prepare(b, tol)
    apply = _as_apply(apply_A)
    N, p = B.shape
    max_iter = 10 * N if max_iter is None else max_iter

    X = np.zeros((N, p))
    R = B.copy()
    P = R.copy()
    rs = np.einsum("ij,ij->j", R, R)
    target = tol * _colnorm(B)
    done = np.sqrt(rs) <= target
    its = np.zeros(p, dtype=int)

    k = 0
    while k < max_iter and not done.all():
        k += 1
        cols = np.flatnonzero(~done)
        Pc = P[:, cols]
        AP = apply(Pc)
        _finite(AP)
        curv = np.einsum("ij,ij->j", Pc, AP)
        if np.any(curv <= 0):
            raise NumericalError("operator is not positive definite")
        alpha = rs[cols] / curv
        X[:, cols] += alpha * Pc
        R[:, cols] -= alpha * AP
        rs_new = np.einsum("ij,ij->j", R[:, cols], R[:, cols])
        its[cols] = k
        beta = rs_new / rs[cols]

        hit = np.sqrt(rs_new) <= target[cols]
        if hit.any():
            hc = cols[hit]
            true_r = B[:, hc] - apply(X[:, hc])
            ok = _colnorm(true_r) <= target[hc]
            done[hc[ok]] = True
            # recurrence drifted from the true residual: restart from it
            bad = np.flatnonzero(hit)[~ok]
            R[:, cols[bad]] = true_r[:, ~ok]
            rs_new[bad] = np.einsum("ij,ij->j", true_r[:, ~ok], true_r[:, ~ok])
            beta[bad] = 0.0
        P[:, cols] = R[:, cols] + beta * Pc
        rs[cols] = rs_new

    _finite(X)
    res = _colnorm(B - apply(X))
    return _finish(b, X, its, res, res <= target)


def solve_least_squares(A, b, tol=DEFAULT_TOL, max_iter=None, free=None):
    """LSQR for ``min |A x - b|``, one problem per column of ``b``.

    Parameters
    ----------
    A : matrix or sparse matrix
        Shape ``(M, N)``.
    b : ndarray
        ``(M,)`` or ``(M, p)``.
    tol : float
        Stop once ``|A^T (b - A x)| <= tol * |A^T b|`` holds for the true
        normal-equations residual.
    max_iter : int, optional
        Defaults to ``10 * N``.
    free : bool ndarray, optional
        ``(N,)`` or ``(N, p)`` mask of unknowns that may vary. Masked-out
        unknowns are pinned to zero, which is the same as deleting the
        matching columns of ``A`` for that right-hand side.

    Returns
    -------
    SolveReport
        ``final_residual`` is the normal-equations residual norm.
    """
    b, B = _prepare(b, tol)
    M, N = A.shape
    if B.shape[0] != M:
        raise ParameterError(f"b has {B.shape[0]} rows, A has {M}")
    p = B.shape[1]
    max_iter = 10 * N if max_iter is None else max_iter
    if free is None:
        mask = np.ones((N, p))
    else:
        mask = np.broadcast_to(np.asarray(free, dtype=float).reshape(N, -1), (N, p))
    AT = A.T

    def mat(Xc, cols):
        return A @ (Xc * mask[:, cols])

    def rmat(Yc, cols):
        return (AT @ Yc) * mask[:, cols]

    X = np.zeros((N, p))
    U = np.zeros((M, p))
    V = np.zeros((N, p))
    W = np.zeros((N, p))
    alpha = np.zeros(p)
    beta = np.zeros(p)
    phibar = np.zeros(p)
    rhobar = np.zeros(p)

    def start(cols, rhs):
        # Golub-Kahan bidiagonalization started from the residual ``rhs``
        bt = _colnorm(rhs)
        Uc = np.divide(rhs, bt, out=np.zeros_like(rhs), where=bt > 0)
        Vc = rmat(Uc, cols)
        al = _colnorm(Vc)
        Vc = np.divide(Vc, al, out=np.zeros_like(Vc), where=al > 0)
        U[:, cols], V[:, cols], W[:, cols] = Uc, Vc, Vc
        beta[cols], alpha[cols] = bt, al
        phibar[cols], rhobar[cols] = bt, al

    all_cols = np.arange(p)
    start(all_cols, B.copy())
    arnorm0 = alpha * beta
    target = tol * arnorm0
    done = arnorm0 == 0
    its = np.zeros(p, dtype=int)

    k = 0
    while k < max_iter and not done.all():
        k += 1
        cols = np.flatnonzero(~done)
        Uc = mat(V[:, cols], cols) - alpha[cols] * U[:, cols]
        bt = _colnorm(Uc)
        Uc = np.divide(Uc, bt, out=np.zeros_like(Uc), where=bt > 0)
        Vc = rmat(Uc, cols) - bt * V[:, cols]
        al = _colnorm(Vc)
        Vc = np.divide(Vc, al, out=np.zeros_like(Vc), where=al > 0)

        rho = np.hypot(rhobar[cols], bt)
        cs = rhobar[cols] / rho
        sn = bt / rho
        theta = sn * al
        phi = cs * phibar[cols]
        phibar[cols] = sn * phibar[cols]
        rhobar[cols] = -cs * al
        X[:, cols] += (phi / rho) * W[:, cols]
        W[:, cols] = Vc - (theta / rho) * W[:, cols]
        U[:, cols], V[:, cols] = Uc, Vc
        alpha[cols], beta[cols] = al, bt
        _finite(X[:, cols])
        its[cols] = k

        estimate = phibar[cols] * al * np.abs(cs)
        hit = (estimate <= target[cols]) | (al == 0) | (bt == 0)
        if hit.any():
            hc = cols[hit]
            r = B[:, hc] - mat(X[:, hc], hc)
            ok = _colnorm(rmat(r, hc)) <= target[hc]
            done[hc[ok]] = True
            if not ok.all():
                start(hc[~ok], r[:, ~ok])

    X *= mask
    res = _colnorm(rmat(B - mat(X, all_cols), all_cols))
    return _finish(b, X, its, res, res <= target)
