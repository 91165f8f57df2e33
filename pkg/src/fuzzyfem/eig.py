"""Generalized symmetric-definite eigenproblems ``A x = lam B x``.

``smallest_eig`` is the production path (shift-invert iteration on one
Cholesky factorization). ``dense_eig_all`` is a slow, independent oracle:
Cholesky reduction of ``B`` followed by cyclic Jacobi rotations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

__all__ = [
    "DimensionGuard",
    "EigenResult",
    "FactorizationFailure",
    "IndefiniteB",
    "NotConverged",
    "dense_eig_all",
    "smallest_eig",
    "start_vector",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 500
ORACLE_MAX_DIM = 2000
_STALL_WINDOW = 10


class IndefiniteB(np.linalg.LinAlgError):
    pass


class FactorizationFailure(np.linalg.LinAlgError):
    pass


class DimensionGuard(ValueError):
    pass


class NotConverged(ArithmeticError):
    def __init__(self, max_iter, best):
        super().__init__(f"no convergence in {max_iter} iterations "
                         f"(best residual {best.residual:.3e})")
        self.max_iter = max_iter
        self.best = best


@dataclass(frozen=True, eq=False)
class EigenResult:
    lam: float
    vector: np.ndarray
    iterations: int
    residual: float


def _dense(M) -> np.ndarray:
    if sp.issparse(M):
        return M.toarray()
    return np.array(M, dtype=float)


def _check_pair(A, B):
    A, B = _dense(A), _dense(B)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape or A.shape[0] < 1:
        raise ValueError(f"need square matrices of equal size, got {A.shape} and {B.shape}")
    for name, M in (("A", A), ("B", B)):
        scale = max(np.abs(M).max(), 1e-300)
        if np.abs(M - M.T).max() > 1e-12 * scale:
            raise ValueError(f"{name} is not symmetric")
    return 0.5 * (A + A.T), 0.5 * (B + B.T)


def start_vector(n: int) -> np.ndarray:
    # ones plus a fixed non-symmetric ripple, so no symmetry class of the
    # mesh is missing from the start vector
    i = np.arange(n)
    return 1.0 + 0.5 * np.sin(1.0 + 2.0 * i)


def residual(A, B, lam, x) -> float:
    Ax = A @ x
    denom = np.linalg.norm(Ax)
    r = np.linalg.norm(Ax - lam * (B @ x))
    return float(r / denom) if denom > 0 else float(r)


def _factor(M):
    try:
        return sla.cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return None


def _tighten_shift(A, B, lo: float, hi: float, rel: float = 1e-9):
    """Largest shift in [lo, hi) found by bisection that keeps A - shift B positive definite.

    ``lo`` must be a known definite shift and ``hi`` an upper bound on the
    smallest eigenvalue (any Rayleigh quotient will do). Positive definiteness
    of A - s B is equivalent to s < lam_min, so the returned shift stays below
    the spectrum.
    """
    factor = _factor(A - lo * B)
    while hi - lo > rel * max(abs(lo), abs(hi), 1e-300):
        mid = 0.5 * (lo + hi)
        f = _factor(A - mid * B)
        if f is None:
            hi = mid
        else:
            lo, factor = mid, f
    return lo, factor


def smallest_eig(A, B, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 shift: float | None = None) -> EigenResult:
    """Algebraically smallest eigenpair of the pencil (A, B).

    Shift-invert iteration ``z <- (A - mu B)^{-1} B x`` with B-normalization
    and Rayleigh-quotient eigenvalue estimates. The shift starts at
    ``-0.1 * ||A||_inf`` (below the spectrum whenever A is positive
    semidefinite). If the residual stalls, the shift is moved up towards the
    smallest eigenvalue, never past it, and the matrix refactored.

    The returned vector satisfies ``x^T B x = 1`` and has a positive
    largest-magnitude entry.
    """
    A, B = _check_pair(A, B)
    n = A.shape[0]
    if _factor(B) is None:
        raise IndefiniteB("B is not positive definite")

    if shift is None:
        mu = -0.1 * np.abs(A).sum(axis=1).max()
        if mu == 0.0:
            mu = -0.1 * np.abs(B).sum(axis=1).max()
    else:
        mu = float(shift)
    factor = _factor(A - mu * B)
    if factor is None:
        raise FactorizationFailure(f"A - ({mu:g}) B is not positive definite; "
                                   "shift is not below the spectrum")

    x = start_vector(n)
    x /= np.sqrt(x @ B @ x)
    Bx = B @ x
    best = None
    checkpoint = None
    for it in range(1, max_iter + 1):
        z = sla.cho_solve(factor, Bx, check_finite=False)
        Bz = B @ z
        nz = np.sqrt(z @ Bz)
        x, Bx = z / nz, Bz / nz
        Ax = A @ x
        lam = float(x @ Ax)
        norm_ax = np.linalg.norm(Ax)
        res = float(np.linalg.norm(Ax - lam * Bx) / (norm_ax if norm_ax > 0 else 1.0))
        if best is None or res < best.residual:
            best = EigenResult(lam, x, it, res)
        if res <= tol:
            break
        if it % _STALL_WINDOW == 0:
            # under a factor-of-ten gain per window counts as stalled
            if checkpoint is not None and res > 0.1 * checkpoint and lam > mu:
                mu, factor = _tighten_shift(A, B, mu, lam)
            checkpoint = res
    else:
        raise NotConverged(max_iter, _normalized(best, A, B))
    return _normalized(EigenResult(lam, x, it, res), A, B)


def _normalized(r: EigenResult, A, B) -> EigenResult:
    x = r.vector
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    x = x / np.sqrt(x @ B @ x)
    lam = float(x @ A @ x)
    # residual recomputed from the returned pair, not the loop estimate
    return EigenResult(lam, x, r.iterations, residual(A, B, lam, x))


def _jacobi_eigenvalues(C: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    C = C.copy()
    n = C.shape[0]
    scale = max(np.linalg.norm(C), 1e-300)
    for _ in range(max_sweeps):
        if np.linalg.norm(C - np.diag(np.diag(C))) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = C[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                app, aqq = C[p, p], C[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = C[:, p].copy(), C[:, q].copy()
                C[:, p] = c * cp - s * cq
                C[:, q] = s * cp + c * cq
                C[p, :] = C[:, p]
                C[q, :] = C[:, q]
                C[p, p] = app - t * apq
                C[q, q] = aqq + t * apq
                C[p, q] = C[q, p] = 0.0
    else:
        raise ArithmeticError("Jacobi sweeps did not converge")
    return np.sort(np.diag(C))


def dense_eig_all(A, B) -> np.ndarray:
    """All eigenvalues of the pencil, ascending."""
    A, B = _check_pair(A, B)
    n = A.shape[0]
    if n > ORACLE_MAX_DIM:
        raise DimensionGuard(f"dimension {n} exceeds oracle limit {ORACLE_MAX_DIM}")
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise IndefiniteB("B is not positive definite") from exc
    Y = sla.solve_triangular(L, A, lower=True)
    C = sla.solve_triangular(L, Y.T, lower=True)
    return _jacobi_eigenvalues(0.5 * (C + C.T))
