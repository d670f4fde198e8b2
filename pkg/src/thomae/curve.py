"""Hyperelliptic curve model.

A curve is given by its finite real branch points e_1 < ... < e_{2g+1},

    0 = f(x, y) = -y^2 + prod_j (x - e_j),

with one more branch point at infinity. Expanded coefficients are stored by
Sato weight: f = -y^2 + x^{2g+1} + sum_k lambda_{2k} x^{2g+1-k}, lambda_0 = 1.
First- and second-kind differentials are evaluated as densities in x,

    du_{2n-1}/dx = x^{g-n} / (-2y),
    dr_{2n-1}/dx = sum_{k=1}^{2n-1} k lambda_{4n-2k-2} x^{g-n+k} / (-2y),

n = 1..g, with lambda of negative weight absent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AtBranchPoint, DegenerateCurve, EvenCount

#: relative gap below which two branch points count as coincident
DEGENERACY_RTOL = 1e-10

#: scale-aware on-curve residual: |f(x,y)| <= ON_CURVE_RTOL * (1+|x|)^{2g+1}
ON_CURVE_RTOL = 1e-9


@dataclass(frozen=True)
class Curve:
    """Immutable curve y^2 = prod(x - e_j) with real ascending branch points."""

    branch_points: tuple[float, ...]
    genus: int
    lam: tuple[float, ...] = field(repr=False)  # lam[k] = coefficient of weight 2k

    @property
    def spread(self) -> float:
        e = self.branch_points
        return e[-1] - e[0]

    def lam_weight(self, weight: int) -> float:
        """Curve coefficient of a given (even, nonnegative) Sato weight; 0 outside."""
        if weight < 0 or weight % 2:
            return 0.0
        k = weight // 2
        return self.lam[k] if k < len(self.lam) else 0.0

    def branch_point(self, k: int) -> float:
        """Finite branch point e_k, 1-based; k = 2g+2 (infinity) is rejected."""
        if not 1 <= k <= 2 * self.genus + 1:
            raise IndexError(f"finite branch point index out of range: {k}")
        return self.branch_points[k - 1]


def make_curve(points: Sequence[float]) -> Curve:
    """Build a curve from finite branch points (any order, distinct reals)."""
    pts = sorted(float(p) for p in points)
    n = len(pts)
    if n % 2 == 0:
        raise EvenCount(
            f"{n} finite branch points; infinity already is the extra branch "
            "point, so an odd count is required"
        )
    if n < 3:
        raise ValueError("at least 3 finite branch points are required")
    spread = pts[-1] - pts[0]
    if spread == 0.0:
        raise DegenerateCurve("all branch points coincide")
    gaps = np.diff(pts)
    if gaps.min() <= DEGENERACY_RTOL * spread:
        i = int(gaps.argmin())
        raise DegenerateCurve(
            f"branch points {pts[i]} and {pts[i + 1]} coincide within "
            f"tolerance {DEGENERACY_RTOL:g} * spread"
        )
    g = (n - 1) // 2
    # np.poly gives descending coefficients of prod (x - e_j); entry k is the
    # coefficient of x^{2g+1-k}, which carries Sato weight 2k.
    coeffs = np.poly(np.asarray(pts))
    return Curve(branch_points=tuple(pts), genus=g, lam=tuple(float(c) for c in coeffs))


def eval_f(curve: Curve, x: complex, y: complex) -> complex:
    """Defining polynomial f(x,y) = -y^2 + prod_j (x - e_j)."""
    prod = 1.0 + 0.0j
    for e in curve.branch_points:
        prod *= x - e
    return -y * y + prod


def on_curve(curve: Curve, x: complex, y: complex) -> bool:
    """Scale-aware residual check |f(x,y)| <= 1e-9 (1+|x|)^{2g+1}."""
    scale = (1.0 + abs(x)) ** (2 * curve.genus + 1)
    return abs(eval_f(curve, x, y)) <= ON_CURVE_RTOL * scale


def _require_regular(curve: Curve, x: complex, y: complex) -> None:
    ytol = 1e-12 * max(1.0, abs(x)) ** (curve.genus + 0.5)
    if abs(y) <= ytol:
        raise AtBranchPoint(
            "differential density diverges at a branch point; use the "
            "singularity-absorbing quadrature instead"
        )
    if not on_curve(curve, x, y):
        raise ValueError(f"point ({x}, {y}) is not on the curve")


def first_kind_integrand(curve: Curve, n: int, x: complex, y: complex) -> complex:
    """Density du_{2n-1}/dx = x^{g-n} / (-2y) at an on-curve point, n = 1..g."""
    g = curve.genus
    if not 1 <= n <= g:
        raise IndexError(f"differential index n={n} outside 1..{g}")
    _require_regular(curve, x, y)
    return x ** (g - n) / (-2.0 * y)


def second_kind_poly(curve: Curve, n: int, x):
    """Numerator polynomial of dr_{2n-1}: sum_k k lambda_{4n-2k-2} x^{g-n+k}."""
    g = curve.genus
    acc = np.zeros_like(np.asarray(x, dtype=complex))
    for k in range(1, 2 * n):
        lam = curve.lam_weight(4 * n - 2 * k - 2)
        if lam:
            acc = acc + k * lam * np.asarray(x, dtype=complex) ** (g - n + k)
    return acc if acc.shape else complex(acc)


def second_kind_integrand(curve: Curve, n: int, x: complex, y: complex) -> complex:
    """Density dr_{2n-1}/dx at an on-curve point, n = 1..g."""
    g = curve.genus
    if not 1 <= n <= g:
        raise IndexError(f"differential index n={n} outside 1..{g}")
    _require_regular(curve, x, y)
    return second_kind_poly(curve, n, x) / (-2.0 * y)


def y_upper(curve: Curve, x, segment: int):
    """Branch of y on segment `segment` approached from the upper half-plane.

    Segments are 1-based: segment j is (e_j, e_{j+1}) for j <= 2g, and
    (e_{2g+1}, +inf) for j = 2g+1.  The value is (-i)^{j+1} sqrt|prod(x-e)|,
    the boundary value of the branch analytic off the cuts
    [e_1,e_2], ..., [e_{2g+1}, +inf).
    """
    xa = np.asarray(x, dtype=float)
    prod = np.ones_like(xa)
    for e in curve.branch_points:
        prod = prod * np.abs(xa - e)
    return (-1j) ** (segment + 1) * np.sqrt(prod)


def locate_segment(curve: Curve, x: float) -> int:
    """1-based segment index containing x; 0 if x lies left of e_1."""
    e = curve.branch_points
    if x < e[0]:
        return 0
    for j in range(len(e) - 1):
        if e[j] <= x <= e[j + 1]:
            return j + 1
    return len(e)  # tail segment (e_{2g+1}, inf)


def curve_file_points(text: str) -> list[float]:
    """Parse a curve input file: one array of reals, order-insensitive.

    Accepts JSON-style brackets, commas, or plain whitespace separation.
    """
    cleaned = text.replace("[", " ").replace("]", " ").replace(",", " ")
    toks = cleaned.split()
    if not toks:
        raise ValueError("curve file holds no numbers")
    return [float(t) for t in toks]
