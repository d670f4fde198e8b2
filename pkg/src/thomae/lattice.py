"""Integer-point enumeration inside an ellipsoid of the Im-tau metric.

Enumerates { n in Z^g : (n - c)^T Y (n - c) <= rho^2 } by Cholesky recursion,
emitting the innermost coordinate as a contiguous block.  Order is
deterministic (lexicographic from the last coordinate down), which keeps
lattice sums reproducible.
"""

from __future__ import annotations

import math

import numpy as np


def ellipsoid_points(Y: np.ndarray, center: np.ndarray, rho2: float) -> np.ndarray:
    """Integer points n with (n-center)^T Y (n-center) <= rho2, shape (N, g)."""
    g = Y.shape[0]
    R = np.linalg.cholesky(np.asarray(Y)).T  # upper triangular, Y = R^T R
    c = np.asarray(center, dtype=float)
    blocks: list[np.ndarray] = []

    def recurse(i: int, partial: np.ndarray, budget: float, fixed: list[int]):
        if budget < 0.0:
            return
        rii = R[i, i]
        mid = c[i] - partial[i] / rii
        half = math.sqrt(budget) / rii
        lo = math.ceil(mid - half)
        hi = math.floor(mid + half)
        if hi < lo:
            return
        if i == 0:
            ns = np.arange(lo, hi + 1)
            block = np.empty((ns.size, g), dtype=np.int64)
            block[:, 0] = ns
            block[:, 1:] = np.asarray(fixed[::-1], dtype=np.int64)
            blocks.append(block)
            return
        for ni in range(lo, hi + 1):
            yi = rii * (ni - c[i]) + partial[i]
            newpartial = partial + R[:, i] * (ni - c[i])
            recurse(i - 1, newpartial, budget - yi * yi, fixed + [ni])

    recurse(g - 1, np.zeros(g), float(rho2), [])
    if not blocks:
        return np.zeros((0, g), dtype=np.int64)
    return np.vstack(blocks)
