"""Covariance-kernel test matrices on regular 1D/2D point grids.

Five stationary kernels (exponential, RBF, inverse quadratic, Matérn 3/2,
Matérn 5/2), all with unit diagonal, evaluated with plain Euclidean
distances in float64.  Grids are scaled so the condition number grows
moderately with the matrix dimension: 1D grids span ``[0, p**0.9]`` and 2D
grids span ``[0, p**0.45]`` per axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidHyperparameter, NotPerfectSquare

__all__ = [
    "FAMILIES",
    "KernelSpec",
    "PointSet",
    "grid_1d",
    "grid_2d",
    "kernel_matrix",
]

FAMILIES = ("exp", "rbf", "iquad", "matern32", "matern52")

# Hyper-parameter defaults; both sit comfortably inside the range where all
# five kernels stay numerically positive definite up to p = 2**12.
DEFAULT_SIGMA = 0.5
DEFAULT_TAU = 3.0

_ROW_CHUNK = 512


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus hyper-parameters.

    ``sigma`` is the RBF length scale, ``tau`` the Matérn length scale;
    each is ignored by the families that do not use it.
    """

    family: str
    sigma: float = DEFAULT_SIGMA
    tau: float = DEFAULT_TAU

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidHyperparameter(
                f"unknown kernel family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.family == "rbf" and not self.sigma > 0:
            raise InvalidHyperparameter(f"rbf requires sigma > 0, got {self.sigma}")
        if self.family in ("matern32", "matern52") and not self.tau > 0:
            raise InvalidHyperparameter(
                f"{self.family} requires tau > 0, got {self.tau}"
            )


@dataclass(frozen=True)
class PointSet:
    """Evaluation points, one coordinate tuple per row."""

    dim: int
    points: np.ndarray

    def __len__(self) -> int:
        return self.points.shape[0]


def grid_1d(p: int) -> PointSet:
    """``p`` equally spaced values from 0 to ``p**0.9``, endpoints included."""
    if p < 2:
        raise ValueError(f"need at least 2 points, got {p}")
    x = np.linspace(0.0, float(p) ** 0.9, p)
    return PointSet(dim=1, points=x.reshape(p, 1))


def grid_2d(p: int) -> PointSet:
    """Regular sqrt(p) x sqrt(p) grid spanning ``[0, p**0.45]`` per axis.

    Points are ordered row-major over the axis grid; the ordering is part
    of the contract because it fixes which entries of the kernel matrix
    land near the diagonal.
    """
    side = math.isqrt(p)
    if side * side != p:
        raise NotPerfectSquare(f"2D grids need a perfect-square point count, got {p}")
    if p < 4:
        raise ValueError(f"need at least 4 points for a 2D grid, got {p}")
    axis = np.linspace(0.0, float(p) ** 0.45, side)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    return PointSet(dim=2, points=pts)


def kernel_matrix(spec: KernelSpec, pts: PointSet) -> np.ndarray:
    """Dense symmetric kernel matrix ``A[i, j] = k(x_i, x_j)``.

    Filled in row chunks to bound temporary memory; the result is exactly
    symmetric and has a unit diagonal for every family.
    """
    points = np.asarray(pts.points, dtype=np.float64)
    p = points.shape[0]
    if p == 0:
        raise ValueError("point set is empty")
    if np.unique(points, axis=0).shape[0] != p:
        raise ValueError("points must be distinct for the kernel matrix to be SPD")

    out = np.empty((p, p))
    for lo in range(0, p, _ROW_CHUNK):
        hi = min(lo + _ROW_CHUNK, p)
        diff = points[lo:hi, None, :] - points[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        out[lo:hi] = _evaluate(spec, d2)
    # Pairwise distances are computed identically for (i, j) and (j, i),
    # but enforce exact symmetry anyway so downstream checks are free.
    np.maximum(out, out.T, out=out)
    np.fill_diagonal(out, 1.0)
    return out


def _evaluate(spec: KernelSpec, d2: np.ndarray) -> np.ndarray:
    if spec.family == "rbf":
        return np.exp(-d2 / (2.0 * spec.sigma**2))
    d = np.sqrt(d2)
    if spec.family == "exp":
        return np.exp(-d / 5.0)
    if spec.family == "iquad":
        return 1.0 / np.sqrt(1.0 + d2)
    if spec.family == "matern32":
        s = math.sqrt(3.0) * d / spec.tau
        return (1.0 + s) * np.exp(-s)
    if spec.family == "matern52":
        s = math.sqrt(5.0) * d / spec.tau
        return (1.0 + s + s**2 / 3.0) * np.exp(-s)
    raise InvalidHyperparameter(f"unknown kernel family {spec.family!r}")
