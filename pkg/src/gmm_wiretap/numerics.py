"""Dense real-matrix primitives: Cayley transform, DCT rows, log-determinants, eigen-analysis."""

from typing import NamedTuple

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve, solve_triangular

from .exceptions import InvalidDimensionError, SingularMatrixError

_SKEW_TOL = 1e-12
_SYM_TOL = 1e-12


class SymEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float array, raising ``ValueError`` otherwise."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains NaN or Inf")
    return M


def _as_square(M, name):
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def symmetrize(M):
    return 0.5 * (M + M.T)


def skew_matrix(n, eps):
    """Skew-symmetric generator with ``-eps`` above and ``+eps`` below the diagonal."""
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    A = np.zeros((n, n))
    upper = np.triu_indices(n, 1)
    A[upper] = -eps
    A[(upper[1], upper[0])] = eps
    return A


def cayley_transform(A):
    """Orthogonal matrix ``(I - A)(I + A)^{-1}`` of a real skew-symmetric ``A``.

    ``I + A`` is always invertible for skew-symmetric ``A``; it is solved by LU
    with partial pivoting. Since ``I - A`` and ``(I + A)^{-1}`` commute the
    result equals ``(I + A)^{-1}(I - A)``.
    """
    A = _as_square(A, "A")
    scale = max(1.0, np.abs(A).max(initial=0.0))
    if np.abs(A + A.T).max(initial=0.0) > _SKEW_TOL * scale:
        raise ValueError("A must be skew-symmetric")
    eye = np.eye(A.shape[0])
    return lu_solve(lu_factor(eye + A), eye - A)


def dct_rows(m, n):
    """First ``m`` rows of the orthonormal DCT-II matrix of size ``n``.

    Entry ``(k, j)`` is ``c_k cos(pi k (2j + 1) / (2n))`` with ``c_0 = sqrt(1/n)``
    and ``c_k = sqrt(2/n)`` otherwise.
    """
    if n < 1 or m < 1:
        raise InvalidDimensionError(f"need 1 <= m <= n, got m={m}, n={n}")
    if m > n:
        raise InvalidDimensionError(f"cannot take {m} rows of a {n}-point DCT")
    k = np.arange(m)[:, None]
    j = np.arange(n)[None, :]
    D = np.sqrt(2.0 / n) * np.cos(np.pi * k * (2 * j + 1) / (2 * n))
    D[0] = np.sqrt(1.0 / n)
    return D


def cholesky_lower(M):
    """Lower Cholesky factor of the symmetrized ``M``.

    Raises
    ------
    SingularMatrixError
        If ``M`` is not positive definite. The error carries the failing pivot
        (the Schur complement at the first non-positive step) and its index.
    """
    M = symmetrize(_as_square(M, "M"))
    if M.shape[0] == 0:
        return M.copy()
    c, info = lapack.dpotrf(M, lower=1, clean=1)
    if info == 0:
        return c
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    j = info - 1
    L = np.tril(c[:j, :j])
    row = solve_triangular(L, M[:j, j], lower=True) if j else np.zeros(0)
    pivot = M[j, j] - row @ row
    raise SingularMatrixError(
        f"matrix is not positive definite: Cholesky pivot {j} is {pivot:.3e}",
        pivot=pivot,
        index=j,
    )


def logdet_psd(M):
    """Natural log-determinant of a symmetric positive definite matrix via Cholesky."""
    L = cholesky_lower(M)
    return 2.0 * np.sum(np.log(np.diag(L)))


def sym_eig(M):
    """Ascending eigen-decomposition of a symmetric matrix."""
    M = _as_square(M, "M")
    scale = max(np.abs(M).max(initial=0.0), np.finfo(float).tiny)
    if np.abs(M - M.T).max(initial=0.0) > _SYM_TOL * scale:
        raise ValueError("M must be symmetric")
    w, V = np.linalg.eigh(symmetrize(M))
    return SymEig(w, V)


def sample_standard_normal(rng, n):
    return rng.standard_normal(n)


def orthogonality_error(W):
    """Frobenius norm of ``W^T W - I``."""
    return np.linalg.norm(W.T @ W - np.eye(W.shape[1]))


def polish_orthogonal(W):
    """Nearest orthogonal matrix with the same column orientation (QR with sign fix)."""
    Q, R = np.linalg.qr(W)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs
