"""Dense SPD building blocks: factorizations, inversion, products, norms.

Matrices are plain 2-D ``numpy.ndarray`` objects in row-major float64; this
module is the only place that talks to LAPACK/BLAS directly.  Everything
else in the package goes through these functions, so the error types raised
here (:class:`~ibmi.exceptions.NotPositiveDefinite`, ...) are the ones
callers see.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg.lapack import dpotrf

from .exceptions import (
    DimensionMismatch,
    IndexOutOfRange,
    NoConvergenceWarning,
    NotPositiveDefinite,
    ZeroPivot,
)

__all__ = [
    "CholeskyFactor",
    "LdlFactor",
    "as_matrix",
    "cholesky",
    "chol_solve",
    "condition_number_2",
    "gather",
    "ldlt",
    "matmul",
    "scatter_add_assign",
    "spd_inverse",
    "two_norm",
]

# Relative elementwise tolerance for the symmetry precondition checks.
SYMMETRY_RTOL = 1e-12

# Power-iteration defaults: the solver's stopping tolerance is 1e-8, so the
# norm estimate must stabilize at least an order of magnitude tighter.
POWER_RTOL = 1e-9
POWER_MAX_ITERS = 5000
_RESTART_SEED = 0x5EED


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D float64 array without copying when possible."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"matrix must be nonempty, got shape {m.shape}")
    return m


def _require_square(a: np.ndarray) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def _require_symmetric(a: np.ndarray, rtol: float = SYMMETRY_RTOL) -> None:
    scale = np.abs(a).max()
    if scale == 0.0:
        return
    skew = np.abs(a - a.T).max()
    if skew > rtol * scale:
        raise ValueError(
            f"matrix is not symmetric: max |a - a.T| = {skew:.3e} "
            f"exceeds {rtol:.1e} * max|a| = {rtol * scale:.3e}"
        )


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor ``l`` with ``l @ l.T`` equal to the input."""

    l: np.ndarray
    dim: int


@dataclass(frozen=True)
class LdlFactor:
    """Unit lower-triangular ``l`` and diagonal ``d`` with ``l @ diag(d) @ l.T``."""

    l: np.ndarray
    d: np.ndarray


def cholesky(a) -> CholeskyFactor:
    """Factor a symmetric positive definite matrix as ``l @ l.T``.

    Raises :class:`NotPositiveDefinite` (carrying the failing elimination
    step) when a pivot is not strictly positive.
    """
    a = _require_square(as_matrix(a))
    _require_symmetric(a)
    c, info = dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefinite(info - 1)
    if info < 0:
        raise ValueError(f"internal dpotrf failure: illegal argument {-info}")
    return CholeskyFactor(l=c, dim=a.shape[0])


def chol_solve(f: CholeskyFactor, b) -> np.ndarray:
    """Solve ``(l @ l.T) @ x = b`` for ``x`` using the factor ``f``."""
    b = as_matrix(b)
    if b.shape[0] != f.dim:
        raise DimensionMismatch(
            f"factor dimension {f.dim} does not match rhs rows {b.shape[0]}"
        )
    return sla.cho_solve((f.l, True), b, check_finite=False)


def spd_inverse(a) -> np.ndarray:
    """Explicit inverse of an SPD matrix.

    Computes the Cholesky factor and solves against the identity (one
    triangular solve pair per column), then symmetrizes the result.
    """
    f = cholesky(a)
    inv = chol_solve(f, np.eye(f.dim))
    return 0.5 * (inv + inv.T)


def ldlt(a, nb: int = 256) -> LdlFactor:
    """Unpivoted ``l @ diag(d) @ l.T`` factorization of a symmetric matrix.

    Right-looking blocked elimination: panels of width ``nb`` are factored
    unblocked and the trailing submatrix is updated with one GEMM per panel.
    Raises :class:`ZeroPivot` when ``|d_k| < 1e-14 * max|a|``; for SPD input
    all pivots are strictly positive and this never triggers.
    """
    a = _require_square(as_matrix(a))
    _require_symmetric(a)
    n = a.shape[0]
    pivot_floor = 1e-14 * np.abs(a).max()

    w = a.copy()
    lower = np.zeros((n, n))
    d = np.zeros(n)
    for start in range(0, n, nb):
        end = min(start + nb, n)
        for j in range(start, end):
            dj = w[j, j]
            if abs(dj) < pivot_floor:
                raise ZeroPivot(j)
            d[j] = dj
            lower[j, j] = 1.0
            col = w[j + 1 : end, j] / dj
            lower[j + 1 : end, j] = col
            w[j + 1 : end, j + 1 : end] -= dj * np.outer(col, col)
        if end < n:
            # L21 solves A21 = L21 @ D1 @ L11^T for the panel just factored.
            x = sla.solve_triangular(
                lower[start:end, start:end],
                w[end:, start:end].T,
                lower=True,
                unit_diagonal=True,
                check_finite=False,
            ).T
            l21 = x / d[start:end]
            lower[end:, start:end] = l21
            w[end:, end:] -= (l21 * d[start:end]) @ l21.T
    return LdlFactor(l=lower, d=d)


def matmul(a, b) -> np.ndarray:
    """Dense product ``a @ b`` in float64."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(
            f"inner dimensions differ: {a.shape} @ {b.shape}"
        )
    return a @ b


def gather(a, rows, cols) -> np.ndarray:
    """Extract the submatrix ``a[rows[i], cols[j]]`` as a fresh array."""
    a = as_matrix(a)
    rows = _check_indices(rows, a.shape[0], "row")
    cols = _check_indices(cols, a.shape[1], "column")
    return a[np.ix_(rows, cols)]


def scatter_add_assign(target, rows, cols, src, add: bool = False) -> None:
    """Write ``src`` into ``target`` at the index grid ``rows x cols``.

    Overwrites by default; ``add=True`` accumulates instead.
    """
    target = as_matrix(target)
    src = as_matrix(src)
    rows = _check_indices(rows, target.shape[0], "row")
    cols = _check_indices(cols, target.shape[1], "column")
    if src.shape != (len(rows), len(cols)):
        raise DimensionMismatch(
            f"source shape {src.shape} does not match index grid "
            f"({len(rows)}, {len(cols)})"
        )
    if add:
        target[np.ix_(rows, cols)] += src
    else:
        target[np.ix_(rows, cols)] = src


def _check_indices(idx, bound: int, what: str) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.intp)
    if idx.ndim != 1:
        raise DimensionMismatch(f"{what} index list must be 1-D")
    if idx.size and (idx.min() < 0 or idx.max() >= bound):
        raise IndexOutOfRange(f"{what} index out of range [0, {bound})")
    return idx


def _power_sigma_max(matvec, rmatvec, n: int, rtol: float, max_iters: int):
    """Largest singular value of a linear operator by power iteration.

    Iterates ``v <- normalize(A^T A v)`` from the normalized all-ones vector
    (deterministic), restarting once from a fixed-seed random vector if the
    iterate collapses to zero.  Returns ``(sigma, converged, iters)``.
    """
    v = np.full(n, 1.0 / np.sqrt(n))
    restarted = False
    prev = -1.0
    sigma = 0.0
    for it in range(1, max_iters + 1):
        y = matvec(v)
        sigma = float(np.linalg.norm(y))
        if sigma == 0.0:
            if restarted:
                return 0.0, True, it
            v = np.random.default_rng(_RESTART_SEED).standard_normal(n)
            v /= np.linalg.norm(v)
            restarted = True
            prev = -1.0
            continue
        if abs(sigma - prev) <= rtol * sigma:
            return sigma, True, it
        prev = sigma
        w = rmatvec(y)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return sigma, True, it
        v = w / nw
    return sigma, False, max_iters


def two_norm(a, rtol: float = POWER_RTOL, max_iters: int = POWER_MAX_ITERS) -> float:
    """Spectral norm estimate via power iteration on ``a.T @ a``.

    Emits :class:`NoConvergenceWarning` (and still returns the best
    estimate) if the Rayleigh value has not stabilized within ``max_iters``.
    """
    a = as_matrix(a)
    at = a.T
    sigma, converged, _ = _power_sigma_max(
        lambda v: a @ v, lambda y: at @ y, a.shape[1], rtol, max_iters
    )
    if not converged:
        warnings.warn(
            f"two_norm: power iteration did not stabilize in {max_iters} "
            f"iterations; returning last estimate {sigma:.6e}",
            NoConvergenceWarning,
            stacklevel=2,
        )
    return sigma


def condition_number_2(a, rtol: float = POWER_RTOL, max_iters: int = POWER_MAX_ITERS) -> float:
    """2-norm condition number of an SPD matrix.

    The largest eigenvalue comes from power iteration on ``a`` itself, the
    smallest from inverse iteration driven by Cholesky solves, so no
    explicit inverse is formed.
    """
    a = _require_square(as_matrix(a))
    f = cholesky(a)
    lam_max, c_max, _ = _power_sigma_max(
        lambda v: a @ v, lambda y: a @ y, a.shape[0], rtol, max_iters
    )

    def inv_apply(v):
        return sla.cho_solve((f.l, True), v, check_finite=False)

    inv_norm, c_min, _ = _power_sigma_max(
        inv_apply, inv_apply, a.shape[0], rtol, max_iters
    )
    if not (c_max and c_min):
        warnings.warn(
            "condition_number_2: power iteration did not stabilize; "
            "returning last estimates",
            NoConvergenceWarning,
            stacklevel=2,
        )
    return lam_max * inv_norm
