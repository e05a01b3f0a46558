import numpy as np
import pytest


def random_spd(p: int, seed: int) -> np.ndarray:
    """Well-conditioned random SPD test matrix: M.T @ M + p * I."""
    m = np.random.default_rng(seed).standard_normal((p, p))
    return m.T @ m + p * np.eye(p)


def gauss_jordan_inverse(a: np.ndarray) -> np.ndarray:
    """Naive Gauss-Jordan elimination with partial pivoting.

    Deliberately written as explicit row operations so it shares no code
    path with the Cholesky-based inverse it cross-checks.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    aug = np.hstack([a, np.eye(n)])
    for col in range(n):
        pivot = col + np.argmax(np.abs(aug[col:, col]))
        if aug[pivot, col] == 0.0:
            raise ZeroDivisionError("singular matrix in oracle")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:]


def naive_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Textbook triple loop, the independent reference for matmul."""
    n, k = a.shape
    k2, m = b.shape
    assert k == k2
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(k):
                acc += a[i, t] * b[t, j]
            out[i, j] = acc
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240 + 8)
