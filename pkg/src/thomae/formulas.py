"""Branch-point side of the Thomae-type identities.

Everything here is finite algebra in the branch points and the matrix omega:
elementary symmetric tables, right-ordered Vandermonde products, the general
derivative-constant sum over an auxiliary index set K, its specialized
first/second-derivative forms, the coefficient matrices and tensors of the
Hessian and third-derivative factorizations, the curve constant, the
theta-constant product, and the symmetric-function recovery ratios.

Conventions: branch points ascending and all Vandermonde factors right
ordered (larger index minus smaller), so every quarter power of a Vandermonde
is real positive; the single eighth-root phase every identity allows is left
to the comparison layer.  The infinity index 2g+2 never enters a symmetric
polynomial or a Vandermonde product.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb, pi

import numpy as np

from .characteristics import Partition
from .curve import Curve
from .errors import BadKSize, KNotInJ, SmallDenominator, WrongMultiplicity
from .periods import PeriodMatrices
from .theta import DerivativeTensor


@dataclass(frozen=True)
class SymmetricTable:
    """Elementary symmetric polynomials of one index set; s(j)=0 off range."""

    source: tuple[int, ...]
    values: tuple[float, ...]  # values[j] = s_j, j = 0..len(source)

    def s(self, j: int) -> float:
        if j < 0 or j >= len(self.values):
            return 0.0
        return self.values[j]


def elementary_symmetric(points, curve: Curve) -> SymmetricTable:
    """Stable one-point-at-a-time recurrence over finite branch indices."""
    idx = tuple(sorted(int(i) for i in points))
    if any(i > 2 * curve.genus + 1 for i in idx):
        raise IndexError("symmetric polynomials take finite branch indices only")
    vals = np.zeros(len(idx) + 1)
    vals[0] = 1.0
    for count, i in enumerate(idx, start=1):
        e = curve.branch_point(i)
        vals[1 : count + 1] = vals[1 : count + 1] + e * vals[0:count].copy()
    return SymmetricTable(source=idx, values=tuple(float(v) for v in vals))


def vandermonde(points, curve: Curve) -> float:
    """Right-ordered product of differences; 1 for empty or singleton sets."""
    idx = sorted(int(i) for i in points)
    if any(i > 2 * curve.genus + 1 for i in idx):
        raise IndexError("Vandermonde products take finite branch indices only")
    out = 1.0
    for a, b in combinations(idx, 2):
        out *= curve.branch_point(b) - curve.branch_point(a)
    return out


def det_omega_factor(pm: PeriodMatrices) -> complex:
    """Principal square root of det(omega) / pi^g."""
    g = pm.genus
    return complex(np.sqrt(complex(np.linalg.det(pm.omega)) / pi**g))


def curve_constant(curve: Curve, pm: PeriodMatrices) -> complex:
    """C_g = (det omega / pi^g)^{1/2} Delta^{1/4} over all finite branch points."""
    allfin = range(1, 2 * curve.genus + 2)
    return det_omega_factor(pm) * vandermonde(allfin, curve) ** 0.25


# ----------------------------------------------------------------------------
# Partition bookkeeping shared by the formulas


def working_sides(p: Partition) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(I_fin, J_fin): finite indices of the small side and of its complement.

    For multiplicity 0 the small side is taken as the one containing
    infinity, so that |I_fin| = g and the auxiliary set K is empty.
    """
    if p.multiplicity == 0 and not p.has_infinity:
        q = p.complement()
        return q.index_set, p.index_set
    return p.index_set, p.finite_complement


def k_size(p: Partition, curve: Curve) -> int:
    """Admissible |K| for the partition: g - |I_fin| (2m-1 or 2m)."""
    i_fin, _ = working_sides(p)
    return curve.genus - len(i_fin)


def default_k(p: Partition, curve: Curve) -> tuple[int, ...]:
    """Lexicographically smallest admissible K inside the finite part of J."""
    _, j_fin = working_sides(p)
    return tuple(sorted(j_fin)[: k_size(p, curve)])


def iter_all_k(p: Partition, curve: Curve):
    """Every admissible K (all subsets of J's finite part of the matched size)."""
    _, j_fin = working_sides(p)
    for K in combinations(sorted(j_fin), k_size(p, curve)):
        yield K


def scalar_prefactor(p: Partition, pm: PeriodMatrices, curve: Curve) -> complex:
    """(det omega/pi^g)^{1/2} Delta(I)^{1/4} Delta(J)^{1/4}; phase-free by design."""
    i_fin, j_fin = working_sides(p)
    return (
        det_omega_factor(pm)
        * vandermonde(i_fin, curve) ** 0.25
        * vandermonde(j_fin, curve) ** 0.25
    )


# ----------------------------------------------------------------------------
# Derivative-constant combinatorial sums


def _validate_k(p: Partition, K, curve: Curve) -> tuple[int, ...]:
    g = curve.genus
    m = p.multiplicity
    i_fin, j_fin = working_sides(p)
    K = tuple(sorted(int(k) for k in K))
    if (2 * g + 2) in K:
        raise KNotInJ("K may not contain the infinity index")
    if not set(K) <= set(j_fin):
        raise KNotInJ(f"K={K} is not contained in the finite part of J")
    need = g - len(i_fin)
    if len(K) != need:
        raise BadKSize(
            f"partition {p.display()} admits |K| = {need} "
            f"(= 2m{'-1' if need == 2 * m - 1 else ''}); got {len(K)}"
        )
    return K


def ksum_structure(p: Partition, K, curve: Curve) -> np.ndarray:
    """Omega-free combinatorial sum over K, an order-m real tensor.

    Entry (j_1..j_m) carries the coefficient of omega_{j_1 n_1}...omega_{j_m
    n_m} in the general sum.  The alternating tuple sum cancels heavily for
    large K, so it is accumulated in extended precision; the result is exact
    enough to round back to double.
    """
    g = curve.genus
    m = p.multiplicity
    i_fin, _ = working_sides(p)
    K = _validate_k(p, K, curve)
    if m == 0:
        return np.array(1.0)
    e = np.array(curve.branch_points, dtype=np.longdouble)

    def table(idx) -> np.ndarray:
        vals = np.zeros(len(idx) + 1, dtype=np.longdouble)
        vals[0] = 1.0
        for count, i in enumerate(idx, start=1):
            vals[1 : count + 1] = vals[1 : count + 1] + e[i - 1] * vals[0:count].copy()
        return vals

    signs = np.array([(-1.0) ** j for j in range(g)], dtype=np.longdouble)
    vecs = {}
    for k in K:
        s = table(i_fin + tuple(kk for kk in K if kk != k))
        padded = np.zeros(g, dtype=np.longdouble)
        padded[: min(g, s.size)] = s[: min(g, s.size)]
        vecs[k] = signs * padded
    out = np.zeros((g,) * m, dtype=np.longdouble)
    for support in combinations(K, m):
        rest = [k for k in K if k not in support]
        scaled = {}
        for pbp in support:
            denom = np.longdouble(1.0)
            for k in rest:
                denom *= e[pbp - 1] - e[k - 1]
            scaled[pbp] = vecs[pbp] / denom
        for order in permutations(support):
            acc = scaled[order[0]]
            for pbp in order[1:]:
                acc = np.multiply.outer(acc, scaled[pbp])
            out += acc
    return out.astype(float)


def general_thomae_tensor(
    p: Partition,
    K,
    pm: PeriodMatrices,
    curve: Curve,
) -> np.ndarray:
    """Branch-point side of the full order-m derivative tensor for one K.

    K must be a subset of the finite part of J of the partition-matched
    cardinality g - |I_fin| (2m-1 when infinity sits in J, 2m when it sits in
    I); the result is independent of which admissible K is chosen.
    """
    m = p.multiplicity
    pref = scalar_prefactor(p, pm, curve)
    if m == 0:
        _validate_k(p, K, curve)
        return np.array(pref)  # empty K, empty-sum convention
    out = ksum_structure(p, K, curve).astype(complex)
    for _ in range(m):
        out = np.tensordot(out, pm.omega, axes=([0], [0]))
    return pref * out


def general_thomae_rhs(
    p: Partition,
    K,
    multi_index,
    pm: PeriodMatrices,
    curve: Curve,
) -> complex:
    """One entry of the branch-point side; multi-index length = multiplicity."""
    m = p.multiplicity
    if len(multi_index) != m:
        raise WrongMultiplicity(
            f"multi-index length {len(multi_index)} != multiplicity {m}"
        )
    tensor = general_thomae_tensor(p, K, pm, curve)
    if m == 0:
        return complex(tensor)
    return complex(tensor[tuple(int(n) - 1 for n in multi_index)])


def first_thomae_rhs(p: Partition, pm: PeriodMatrices, curve: Curve) -> complex:
    """Theta-constant magnitude side for a multiplicity-0 partition."""
    if p.multiplicity != 0:
        raise WrongMultiplicity(f"partition {p.display()} has m={p.multiplicity}, not 0")
    return scalar_prefactor(p, pm, curve)


def second_thomae_rhs(p: Partition, pm: PeriodMatrices, curve: Curve) -> np.ndarray:
    """Gradient side for a multiplicity-1 partition, as a g-vector.

    Dispatches on the finite cardinality of I: g-1 gives the plain form
    omega^t (s_0, -s_1, ...)^t; g-2 (infinity inside I) shifts the
    coefficient vector down one slot.
    """
    g = curve.genus
    if p.multiplicity != 1:
        raise WrongMultiplicity(f"partition {p.display()} has m={p.multiplicity}, not 1")
    i_fin, _ = working_sides(p)
    table = elementary_symmetric(i_fin, curve)
    coeff = np.zeros(g)
    if len(i_fin) == g - 1:
        for j in range(1, g + 1):
            coeff[j - 1] = (-1.0) ** (j - 1) * table.s(j - 1)
    elif len(i_fin) == g - 2:
        for j in range(2, g + 1):
            coeff[j - 1] = (-1.0) ** (j - 2) * table.s(j - 2)
    else:  # pragma: no cover - multiplicity check makes this unreachable
        raise WrongMultiplicity("inconsistent partition cardinality")
    return scalar_prefactor(p, pm, curve) * (pm.omega.T @ coeff)


def s_matrix(p: Partition, curve: Curve) -> np.ndarray:
    """Coefficient matrix of the Hessian factorization omega^t S omega (m=2)."""
    g = curve.genus
    if p.multiplicity != 2:
        raise WrongMultiplicity(f"partition {p.display()} has m={p.multiplicity}, not 2")
    i_fin, _ = working_sides(p)
    kk = g - len(i_fin)  # 3 or 4
    t = elementary_symmetric(i_fin, curve)
    out = np.zeros((g, g))
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            out[i - 1, j - 1] = (-1.0) ** (i + j) * (
                2.0 * t.s(i - kk + 1) * t.s(j - kk + 1)
                - t.s(i - kk + 2) * t.s(j - kk)
                - t.s(i - kk) * t.s(j - kk + 2)
            )
    return out


#: third-derivative bracket terms: (coefficient, offset multiset)
_S3_TERMS = (
    (6.0, (2, 2, 2)),
    (-2.0, (1, 2, 3)),
    (2.0, (0, 3, 3)),
    (2.0, (1, 1, 4)),
    (-1.0, (0, 2, 4)),
)


def s_tensor(p: Partition, curve: Curve) -> np.ndarray:
    """Symmetric order-3 coefficient tensor of the m=3 factorization."""
    g = curve.genus
    if p.multiplicity != 3:
        raise WrongMultiplicity(f"partition {p.display()} has m={p.multiplicity}, not 3")
    i_fin, _ = working_sides(p)
    kk = g - len(i_fin)  # 5 or 6
    t = elementary_symmetric(i_fin, curve)
    out = np.zeros((g, g, g))
    for j1 in range(1, g + 1):
        for j2 in range(1, g + 1):
            for j3 in range(1, g + 1):
                acc = 0.0
                for coeff, offsets in _S3_TERMS:
                    for d in set(permutations(offsets)):
                        acc += coeff * (
                            t.s(j1 - kk + d[0]) * t.s(j2 - kk + d[1]) * t.s(j3 - kk + d[2])
                        )
                out[j1 - 1, j2 - 1, j3 - 1] = (-1.0) ** (j1 + j2 + j3 - 3 * kk) * acc
    return out


def s_structure_contraction(p: Partition, pm: PeriodMatrices, curve: Curve) -> np.ndarray:
    """omega-contracted coefficient structure (m = 2 or 3), no prefactor."""
    m = p.multiplicity
    if m == 2:
        return pm.omega.T @ s_matrix(p, curve) @ pm.omega
    if m == 3:
        arr = s_tensor(p, curve)
        for _ in range(3):
            arr = np.tensordot(arr, pm.omega, axes=([0], [0]))
        return arr
    raise WrongMultiplicity(f"no coefficient structure for multiplicity {m}")


def theta_product_rhs(curve: Curve, pm: PeriodMatrices) -> complex:
    """Branch-point side of the product of all theta constants."""
    g = curve.genus
    expo_det = comb(2 * g + 1, g) / 2.0
    expo_delta = (comb(2 * g - 1, g) + comb(2 * g - 1, g + 1)) / 4.0
    det_ratio = complex(np.linalg.det(pm.omega)) / pi**g
    delta = vandermonde(range(1, 2 * g + 2), curve)
    return complex(det_ratio**expo_det) * delta**expo_delta


# ----------------------------------------------------------------------------
# Symmetric-function recovery (Bolza-type ratios)


def bolza_slots(g: int, kk: int, j: int) -> tuple[int, ...]:
    """1-based derivative slots of the recovery ratio for s_j, given k = |K|.

    The u-subscripts run 2k-4(m-1)-1, step +4, ..., 2k-5, then 2k+2j-1;
    slot i corresponds to u_{2i-1}; j = 0 selects the reference denominator.
    """
    m = (kk + 1) // 2
    subs = [2 * kk - 4 * (m - 1 - t) - 1 for t in range(m - 1)]
    subs.append(2 * kk + 2 * j - 1)
    slots = tuple((s + 1) // 2 for s in subs)
    if any(s < 1 or s > g for s in slots):
        raise ValueError(f"recovery slots {slots} leave 1..{g}")
    return slots


def bolza_symmetric(tensor: DerivativeTensor, p: Partition,
                    curve: Curve) -> list[complex]:
    """Recover s_1..s_{|I|} of the partition's finite points from a u-tensor.

    tensor must be the order-m derivative tensor of theta[I] in the u basis.
    Raises SmallDenominator when the reference entry is negligible.
    """
    if tensor.basis != "u":
        raise ValueError("recovery ratios are defined on u-basis tensors")
    m = p.multiplicity
    if tensor.order != m:
        raise WrongMultiplicity(
            f"tensor order {tensor.order} != partition multiplicity {m}"
        )
    g = curve.genus
    i_fin, _ = working_sides(p)
    kk = g - len(i_fin)
    denom = tensor.value(bolza_slots(g, kk, 0))
    if abs(denom) < 1e-9 * tensor.max_abs():
        raise SmallDenominator(
            f"reference derivative {abs(denom):.3e} below 1e-9 of tensor max"
        )
    out = []
    for j in range(1, len(i_fin) + 1):
        num = tensor.value(bolza_slots(g, kk, j))
        out.append(complex((-1.0) ** j * num / denom))
    return out
