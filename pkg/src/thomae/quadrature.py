"""Quadrature backends for period and Abel-map integrals.

Every path is a concatenation of real segments whose endpoints may be branch
points, where the integrands carry 1/sqrt singularities.  Three engines cover
the cases that occur:

* full inter-branch-point segments: Gauss-Chebyshev nodes absorb the
  1/sqrt((x-e_j)(e_{j+1}-x)) factor exactly (x = mid + half*cos(theta));
* partial segments with at most one singular endpoint: a quadratic
  substitution at the singular end, then Gauss-Legendre;
* the semi-infinite tail: x = x0 + c*tan(phi)^2, then Gauss-Legendre.

All engines double the node count until self-convergence at `rtol`.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .curve import Curve, second_kind_poly, y_upper
from .errors import QuadratureNotConverged

#: self-convergence target, relative (spec-level quadrature budget)
SEGMENT_RTOL = 1e-10

_N_START = 48
_N_MAX = 6144


@lru_cache(maxsize=64)
def _gauss_legendre(n: int):
    x, w = leggauss(n)
    return x, w


def first_kind_polys(curve: Curve, x: np.ndarray) -> np.ndarray:
    """Numerator matrix (g, len(x)): row n-1 holds x^{g-n}."""
    g = curve.genus
    return np.vstack([x ** (g - n) for n in range(1, g + 1)])


def second_kind_polys(curve: Curve, x: np.ndarray) -> np.ndarray:
    g = curve.genus
    return np.vstack([second_kind_poly(curve, n, x) for n in range(1, g + 1)])


def _poly_matrix(curve: Curve, kind: str, x: np.ndarray) -> np.ndarray:
    if kind == "first":
        return first_kind_polys(curve, x)
    if kind == "second":
        return second_kind_polys(curve, x)
    raise ValueError(f"unknown differential kind: {kind!r}")


def _doubling(evaluate, rtol: float, what: str):
    """Run `evaluate(n)` with doubling n until self-convergence."""
    n = _N_START
    prev = evaluate(n)
    while n <= _N_MAX:
        n *= 2
        cur = evaluate(n)
        scale = np.maximum(np.abs(cur), 1e-30)
        err = float(np.max(np.abs(cur - prev) / scale))
        if err <= rtol:
            return cur, err
        prev = cur
    raise QuadratureNotConverged(
        f"{what}: doubling stalled at n={n} with error {err:.3e} > {rtol:g}",
        achieved=err,
    )


def full_segment(curve: Curve, j: int, kind: str, rtol: float = SEGMENT_RTOL):
    """Integrals of all g densities of `kind` over segment j = (e_j, e_{j+1}).

    Gauss-Chebyshev in x = mid + half*cos(theta); both endpoints are branch
    points, so the adjacent factors of 1/y are absorbed by the weight.
    Returns (values (g,), achieved error).
    """
    e = curve.branch_points
    a, b = e[j - 1], e[j]
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    others = [ei for ei in e if ei != a and ei != b]
    phase = (-1j) ** (j + 1)

    def evaluate(n):
        k = np.arange(1, n + 1)
        x = mid + half * np.cos((2 * k - 1) * np.pi / (2 * n))
        rest = np.ones_like(x)
        for ei in others:
            rest *= np.abs(x - ei)
        dens = _poly_matrix(curve, kind, x) / (-2.0 * phase * np.sqrt(rest))
        return np.pi / n * dens.sum(axis=1)

    return _doubling(evaluate, rtol, f"segment {j} ({kind} kind)")


def partial_segment(
    curve: Curve,
    a: float,
    b: float,
    j: int,
    kind: str = "first",
    rtol: float = SEGMENT_RTOL,
):
    """Integrals over [a, b] inside segment j, honoring singular endpoints.

    An endpoint is singular exactly when it is a branch point; the quadratic
    substitution x = end -/+ (b-a) t^2 regularizes it.  Both endpoints being
    branch points is the `full_segment` case.
    """
    e = curve.branch_points
    sing_a = any(abs(a - ei) == 0.0 for ei in e)
    sing_b = any(abs(b - ei) == 0.0 for ei in e)
    if sing_a and sing_b:
        return full_segment(curve, j, kind, rtol)
    if a == b:
        return np.zeros(curve.genus, dtype=complex), 0.0
    length = b - a

    def evaluate(n):
        t, w = _gauss_legendre(n)
        if sing_a:
            s = (t + 1.0) / 2.0  # s in (0,1)
            x = a + length * s * s
            dx = 2.0 * length * s * (0.5)
        elif sing_b:
            s = (t + 1.0) / 2.0
            x = b - length * s * s
            dx = -2.0 * length * s * (0.5)
        else:
            x = a + (t + 1.0) / 2.0 * length
            dx = np.full_like(x, length / 2.0)
        dens = _poly_matrix(curve, kind, x) / (-2.0 * y_upper(curve, x, j))
        return (dens * (w * dx)).sum(axis=1)

    return _doubling(evaluate, rtol, f"partial segment [{a}, {b}] ({kind} kind)")


def tail_segment(curve: Curve, x0: float, kind: str = "first", rtol: float = SEGMENT_RTOL):
    """Integrals over (x0, +inf) on the tail segment, x0 >= e_{2g+1}.

    Substitution x = x0 + c tan(phi)^2 absorbs the branch-point singularity
    at x0 = e_{2g+1} and compactifies infinity (the integrands decay like
    x^{-n-1/2}).
    """
    j = 2 * curve.genus + 1
    c = max(curve.spread, 1.0)

    def evaluate(n):
        t, w = _gauss_legendre(n)
        phi = (t + 1.0) * (np.pi / 4.0)
        tan = np.tan(phi)
        x = x0 + c * tan * tan
        dx = 2.0 * c * tan / np.cos(phi) ** 2 * (np.pi / 4.0)
        dens = _poly_matrix(curve, kind, x) / (-2.0 * y_upper(curve, x, j))
        return (dens * (w * dx)).sum(axis=1)

    return _doubling(evaluate, rtol, f"tail [{x0}, inf) ({kind} kind)")
