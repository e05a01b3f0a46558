"""Convergence analysis and cost model for the two-block iteration.

For a two-set non-overlapping partition the error of the complement block
after r sweeps is an exact congruence of the initial error:

    S2_r - Sig2 = T**r @ (S2_0 - Sig2) @ (T.T)**r,
    T = inv(A_2) @ A_21 @ inv(A_1) @ A_12

so ``norm(T)**(2r)`` bounds the per-iteration error reduction, and the
spectral radius of the related product ``A_12 inv(A_2) A_21 inv(A_1)`` is
strictly below 1 for every SPD matrix, which guarantees convergence.

The flop-cost model evaluates the closed-form per-sweep operation counts in
exact rational arithmetic.  It is a model of the algorithm's leading-order
cost, not a measurement of this implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import DimensionMismatch
from .linalg import POWER_MAX_ITERS, POWER_RTOL, gather, matmul, spd_inverse, two_norm
from .partition import overlap_depth
from .solver import block_update

__all__ = [
    "CostBreakdown",
    "contraction_factor",
    "flop_cost",
    "lemma_error_recurrence_check",
    "newton_schultz",
    "spectral_radius_condition",
]

# The recurrence/bound checks form exact inverses, so keep them desk-scale.
MAX_CHECK_DIM = 512


def _two_block_pieces(a, i1, i2):
    a = np.asarray(a, dtype=np.float64)
    i1 = np.asarray(i1, dtype=np.intp)
    i2 = np.asarray(i2, dtype=np.intp)
    if i1.size + i2.size != a.shape[0] or np.intersect1d(i1, i2).size:
        raise ValueError("index sets must partition the matrix without overlap")
    inv1 = spd_inverse(gather(a, i1, i1))
    inv2 = spd_inverse(gather(a, i2, i2))
    a12 = gather(a, i1, i2)
    a21 = gather(a, i2, i1)
    return a, i1, i2, inv1, inv2, a12, a21


def contraction_factor(a, i1, i2) -> float:
    """``norm(inv(A_2) A_21 inv(A_1) A_12)``; its square is the per-sweep rate."""
    _, _, _, inv1, inv2, a12, a21 = _two_block_pieces(a, i1, i2)
    return two_norm(inv2 @ a21 @ inv1 @ a12)


def spectral_radius_condition(a, i1, i2, rtol: float = POWER_RTOL,
                              max_iters: int = POWER_MAX_ITERS) -> float:
    """Spectral radius of ``A_12 inv(A_2) A_21 inv(A_1)``, < 1 for SPD input."""
    _, _, _, inv1, inv2, a12, a21 = _two_block_pieces(a, i1, i2)
    t = a12 @ inv2 @ a21 @ inv1
    # The product is similar to a symmetric PSD matrix, so its dominant
    # eigenvalue is real and non-negative; plain power iteration applies.
    v = np.full(t.shape[0], 1.0 / np.sqrt(t.shape[0]))
    prev = -1.0
    rho = 0.0
    for _ in range(max_iters):
        y = t @ v
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return 0.0
        rho = float(v @ y)
        if abs(rho - prev) <= rtol * abs(rho):
            break
        prev = rho
        v = y / ny
    return abs(rho)


def lemma_error_recurrence_check(a, i1, i2, guess, r: int) -> float:
    """Relative Frobenius gap between simulated and closed-form block error.

    Runs ``r`` two-block sweeps from ``guess`` and compares the resulting
    complement-block error against the exact congruence recurrence; the two
    agree to rounding for any symmetric guess.
    """
    if np.asarray(a).shape[0] > MAX_CHECK_DIM:
        raise ValueError(
            f"recurrence check forms exact inverses; refusing p > {MAX_CHECK_DIM}"
        )
    a, i1, i2, inv1, inv2, a12, a21 = _two_block_pieces(a, i1, i2)
    guess = np.asarray(guess, dtype=np.float64)
    if guess.shape != (i2.size, i2.size):
        raise DimensionMismatch(
            f"guess shape {guess.shape} does not match second block size {i2.size}"
        )
    sig2 = gather(spd_inverse(a), i2, i2)

    sigma = np.eye(a.shape[0])
    sigma[np.ix_(i2, i2)] = guess
    for _ in range(r):
        block_update(a, sigma, i1, i2)
        block_update(a, sigma, i2, i1)
    direct = gather(sigma, i2, i2) - sig2

    t = inv2 @ a21 @ inv1 @ a12
    tr = np.linalg.matrix_power(t, r)
    closed = tr @ (guess - sig2) @ tr.T

    scale = max(np.linalg.norm(direct), np.linalg.norm(closed))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(direct - closed) / scale)


@dataclass(frozen=True)
class CostBreakdown:
    """Closed-form flop counts for one sweep, in exact rationals.

    ``per_step_flops`` has one entry per index set; the first and last sets
    carry one overlap wing (size ``m + h``), interior sets two (``m + 2h``).
    ``direct_flops`` is the Cholesky-plus-solves baseline ``(7/3) p**3``.
    """

    k: int
    m: int
    h: int
    per_step_flops: tuple[Fraction, ...]
    total_flops: Fraction
    direct_flops: Fraction


def flop_cost(p: int, k: int, overlap_fraction: float = 0.0) -> CostBreakdown:
    """Evaluate the per-sweep cost model for a contiguous partition of ``p``.

    Edge sets cost ``(1/3)(m+h)**3 + 2 k**2 m**2 (m+h)`` and interior sets
    the same with ``2h``; with no overlap the total collapses to
    ``(1/3 + 2 k**2) k m**3``.
    """
    if k < 2:
        raise ValueError(f"need at least 2 blocks, got {k}")
    if p < 2 * k:
        raise ValueError(f"p={p} is too small for {k} blocks")
    m = p // k
    h = overlap_depth(m, overlap_fraction)

    def step(wings: int) -> Fraction:
        size = m + wings * h
        return Fraction(1, 3) * size**3 + 2 * k**2 * m**2 * size

    edge = step(1)
    interior = step(2)
    per_step = (edge,) + (interior,) * (k - 2) + (edge,)
    return CostBreakdown(
        k=k,
        m=m,
        h=h,
        per_step_flops=per_step,
        total_flops=sum(per_step, Fraction(0)),
        direct_flops=Fraction(7, 3) * (k * m) ** 3,
    )


def newton_schultz(a, x0, tol: float = 1e-8, max_iters: int = 100):
    """Quadratic inverse iteration ``X <- X (2I - A X)``.

    Returns ``(X, iterations, converged)`` where ``iterations`` counts
    residual checks; requires ``norm(I - A X0) < 1`` to converge, and
    reports divergence (including overflow) via ``converged=False``.
    """
    a = np.asarray(a, dtype=np.float64)
    x = np.array(x0, dtype=np.float64)
    if a.shape != x.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {x.shape}")
    eye = np.eye(a.shape[0])
    for it in range(1, max_iters + 1):
        residual = eye - matmul(a, x)
        if not np.all(np.isfinite(residual)):
            return x, it, False
        if two_norm(residual) <= tol:
            return x, it, True
        x = x + matmul(x, residual)
    return x, max_iters, False
