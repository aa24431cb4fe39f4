"""Thick-restart Lanczos for the lowest eigenpairs of a real symmetric operator.

The operator is only touched through ``matvec``. Every new Krylov vector is
orthogonalized twice against the whole basis, so the projected matrix is
computed directly rather than assumed tridiagonal; after a restart it has the
usual arrowhead shape. On restart the ``keep`` lowest Ritz vectors and the
residual direction form the new basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, InvalidArgument

_BASIS_BYTES = 512 * 2**20
DEFAULT_BASIS = 24


@dataclass
class LanczosResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (dim, k)
    residuals: np.ndarray
    matvecs: int
    restarts: int


def _default_basis(dim: int, k: int) -> int:
    by_memory = _BASIS_BYTES // (8 * dim)
    return int(min(dim, max(k + 4, min(DEFAULT_BASIS, by_memory))))


def lowest_eigenpairs(matvec, dim: int, k: int = 2, tol: float = 1e-10,
                      v0: np.ndarray | None = None, seed: int = 0,
                      max_basis: int | None = None, keep: int | None = None,
                      max_restarts: int = 500) -> LanczosResult:
    """Lowest ``k`` eigenpairs of the symmetric operator ``matvec``.

    Converged when every wanted Ritz pair has residual
    ``||A x - theta x|| <= tol * max(1, |theta|)``.
    """
    if k < 1 or k > dim:
        raise InvalidArgument(f"cannot extract {k} eigenpairs from dimension {dim}")
    m = max_basis or _default_basis(dim, k)
    m = min(m, dim)
    if m <= k and m < dim:
        raise InvalidArgument(f"basis size {m} too small for {k} eigenpairs")
    keep = keep or min(m - 1, max(k + 2, m // 3))
    rng = np.random.default_rng(seed)

    V = np.zeros((m + 1, dim))
    H = np.zeros((m + 1, m + 1))
    start = rng.standard_normal(dim) if v0 is None else np.array(v0, dtype=np.float64)
    V[0] = start / np.linalg.norm(start)
    j0 = 0
    matvecs = 0
    scale = 1.0

    for restart in range(max_restarts + 1):
        size = m
        beta = 0.0
        for j in range(j0, m):
            w = matvec(V[j])
            matvecs += 1
            basis = V[:j + 1]
            h = basis @ w
            w -= h @ basis
            h2 = basis @ w
            w -= h2 @ basis
            h += h2
            H[:j + 1, j] = h
            H[j, :j + 1] = h
            beta = float(np.linalg.norm(w))
            scale = max(scale, abs(h[j]), beta)
            if beta <= 1e-13 * scale:
                # invariant subspace found; exact Ritz pairs within it
                beta = 0.0
                if j + 1 == dim:
                    size = dim
                    break
                # keep going from a fresh orthogonal direction
                w = rng.standard_normal(dim)
                for _ in range(2):
                    w -= (basis @ w) @ basis
                V[j + 1] = w / np.linalg.norm(w)
                H[j + 1, j] = H[j, j + 1] = 0.0
                continue
            V[j + 1] = w / beta
            H[j + 1, j] = H[j, j + 1] = beta

        theta, Y = np.linalg.eigh(H[:size, :size])
        res = np.abs(beta * Y[size - 1, :])
        want = min(k, size)
        thresh = tol * np.maximum(1.0, np.abs(theta[:want]))
        if want == k and np.all(res[:want] <= thresh):
            X = Y[:, :k].T @ V[:size]
            X /= np.linalg.norm(X, axis=1)[:, None]
            return LanczosResult(theta[:k].copy(), X.T.copy(), res[:k], matvecs, restart)
        if size < m:
            raise ConvergenceFailure("Krylov space exhausted before convergence",
                                     residual=float(res[:want].max()))
        if m == dim:
            # basis spans the whole space yet residuals look large: rounding only
            X = Y[:, :k].T @ V[:size]
            X /= np.linalg.norm(X, axis=1)[:, None]
            return LanczosResult(theta[:k].copy(), X.T.copy(), res[:k], matvecs, restart)
        p = keep
        new_basis = Y[:, :p].T @ V[:m]
        V[:p] = new_basis
        V[p] = V[m]
        V[p + 1:] = 0.0
        H[:] = 0.0
        H[np.arange(p), np.arange(p)] = theta[:p]
        H[p, :p] = H[:p, p] = beta * Y[m - 1, :p]
        j0 = p
    raise ConvergenceFailure(
        f"Lanczos did not converge after {max_restarts} restarts",
        residual=float(res[:k].max()))
