"""Pure-numpy lattice summation kernel (fallback for the compiled core)."""

from __future__ import annotations

import numpy as np


def theta_sums(Q: np.ndarray, tau: np.ndarray, w: np.ndarray, midx: np.ndarray) -> np.ndarray:
    """Weighted lattice sums shared by theta values and derivatives.

    Parameters
    ----------
    Q : (N, g) float array of shifted lattice vectors q = n + eps'/2.
    tau : (g, g) complex Riemann matrix.
    w : (g,) complex shifted argument w = v + eps/2.
    midx : (K, m) int array of 0-based derivative directions (m = 0 allowed).

    Returns
    -------
    (K,) complex array; entry k is sum_q prod_l (2 pi i q_{midx[k,l]})
    exp(i pi q.tau.q + 2 pi i q.w).
    """
    Q = np.asarray(Q, dtype=float)
    expo = 1j * np.pi * np.einsum("ni,ij,nj->n", Q, tau, Q, optimize=True)
    expo += 2j * np.pi * (Q @ np.asarray(w, dtype=complex))
    terms = np.exp(expo)
    K, m = midx.shape
    out = np.empty(K, dtype=complex)
    two_pi_i = 2j * np.pi
    for k in range(K):
        f = terms
        for l in range(m):
            f = f * (two_pi_i * Q[:, midx[k, l]])
        out[k] = f.sum()
    return out
