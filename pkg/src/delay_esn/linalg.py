"""Small numerical kernel: sparse products, spectral radius, ridge solve."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import DimensionError, SingularSystemError


@dataclass(frozen=True)
class SparseMatrix:
    """Row-compressed sparse matrix.

    Build it from ``(row, col, value)`` triplets with :meth:`from_triplets`;
    the CSR arrays are the storage form.
    """

    csr: sp.csr_matrix

    @classmethod
    def from_triplets(cls, rows: int, cols: int, triplets) -> "SparseMatrix":
        triplets = list(triplets)
        if triplets:
            r, c, v = (np.asarray(a) for a in zip(*triplets))
        else:
            r = c = np.empty(0, dtype=np.int64)
            v = np.empty(0, dtype=float)
        return cls.from_coo(rows, cols, r, c, v)

    @classmethod
    def from_coo(cls, rows, cols, r, c, v) -> "SparseMatrix":
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64)
        v = np.asarray(v, dtype=float)
        if r.size and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
            raise DimensionError("triplet index out of bounds")
        keys = r * cols + c
        if np.unique(keys).size != keys.size:
            raise ValueError("duplicate (row, col) pairs")
        m = sp.csr_matrix((v, (r, c)), shape=(rows, cols))
        m.sort_indices()
        return cls(m)

    @classmethod
    def from_csr_arrays(cls, rows, cols, indptr, indices, data) -> "SparseMatrix":
        m = sp.csr_matrix(
            (np.asarray(data, float), np.asarray(indices, np.int32), np.asarray(indptr, np.int32)),
            shape=(rows, cols),
        )
        m.check_format(full_check=True)
        return cls(m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.csr.shape

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    def triplets(self) -> list[tuple[int, int, float]]:
        coo = self.csr.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def scaled(self, c: float) -> "SparseMatrix":
        m = self.csr.copy()
        m.data = m.data * c
        return SparseMatrix(m)

    def toarray(self) -> np.ndarray:
        return self.csr.toarray()


def spmv(m: SparseMatrix, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise DimensionError(f"cannot multiply {m.shape} matrix by vector of length {v.shape}")
    return m.csr @ v


class SpectralEstimate(NamedTuple):
    radius: float
    converged: bool
    iterations: int
    residual: float


def estimate_spectral_radius(
    m: SparseMatrix | np.ndarray,
    tol: float = 1e-6,
    max_iters: int = 5000,
    block: int = 16,
    restarts: int = 3,
    seed: int = 0,
) -> SpectralEstimate:
    """Block power iteration with Rayleigh-Ritz extraction.

    A block of ``block`` vectors is iterated so that complex-conjugate
    dominant pairs and clustered spectra (typical for sparse random
    reservoirs) still converge. Convergence is declared when the relative
    eigen-residual of the dominant Ritz pair drops below ``tol``. On
    stagnation the iteration restarts from a fresh random block; the
    estimate with the smallest residual is returned.
    """
    a = m.csr if isinstance(m, SparseMatrix) else np.asarray(m, dtype=float)
    n, n2 = a.shape
    if n != n2:
        raise DimensionError(f"spectral radius needs a square matrix, got {a.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n == 0:
        return SpectralEstimate(0.0, True, 0, 0.0)
    k = min(block, n)
    rng = np.random.default_rng(seed)
    best = SpectralEstimate(0.0, False, 0, np.inf)
    total = 0
    for _ in range(restarts + 1):
        q, _ = np.linalg.qr(rng.standard_normal((n, k)))
        for _ in range(max_iters):
            total += 1
            z = a @ q
            w, v = np.linalg.eig(q.T @ z)
            j = int(np.argmax(np.abs(w)))
            theta, y = w[j], v[:, j]
            x = q @ y
            resid = np.linalg.norm(z @ y - theta * x)
            scale = abs(theta) * np.linalg.norm(x)
            rel = resid / scale if scale > 0 else (0.0 if resid == 0 else np.inf)
            if rel < best.residual:
                best = SpectralEstimate(float(abs(theta)), False, total, float(rel))
            if rel < tol:
                return SpectralEstimate(float(abs(theta)), True, total, float(rel))
            if not np.any(z):
                # nilpotent or zero operator: everything collapses to 0
                return SpectralEstimate(0.0, True, total, 0.0)
            q, _ = np.linalg.qr(z)
    return best


def spectral_radius(m: SparseMatrix | np.ndarray, tol: float = 1e-6, max_iters: int = 5000) -> float:
    est = estimate_spectral_radius(m, tol=tol, max_iters=max_iters)
    if not est.converged:
        warnings.warn(
            f"spectral radius did not converge (residual {est.residual:.2e}); returning best estimate",
            RuntimeWarning,
            stacklevel=2,
        )
    return est.radius


def ridge_solve(R, Y, beta: float) -> np.ndarray:
    """Return ``Y R^T (R R^T + beta I)^-1`` via a Cholesky factorization.

    ``R`` is ``n x T`` (states in columns), ``Y`` is ``p x T``. No explicit
    inverse is formed. With ``beta > 0`` and more features than samples
    the equivalent ``T x T`` dual system is factored instead.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if R.shape[1] != Y.shape[1]:
        raise DimensionError(f"R has {R.shape[1]} columns but Y has {Y.shape[1]}")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    n, t = R.shape
    if beta > 0 and n > t:
        # push-through identity: Y R^T (R R^T + bI)^-1 = Y (R^T R + bI)^-1 R^T,
        # a T x T system instead of n x n
        return (_spd_solve(R.T @ R, Y.T, beta).T) @ R.T
    # (R R^T + bI) is symmetric, so W^T = (R R^T + bI)^-1 R Y^T
    return _spd_solve(R @ R.T, R @ Y.T, beta).T


def _spd_solve(gram: np.ndarray, rhs: np.ndarray, beta: float) -> np.ndarray:
    gram = gram.copy()
    gram[np.diag_indices_from(gram)] += beta
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"Gram matrix is not positive definite: {exc}") from exc
    pivots = np.diag(factor[0]) ** 2
    # with beta > 0 the system is SPD by construction; only the unregularized
    # case can be singular while still factoring on round-off
    if beta == 0 and pivots.min() <= 16 * np.finfo(float).eps * gram.shape[0] * pivots.max():
        raise SingularSystemError("Gram matrix is numerically singular")
    return scipy.linalg.cho_solve(factor, rhs)
