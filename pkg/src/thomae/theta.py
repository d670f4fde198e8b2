"""Riemann theta function, characteristics, and exact derivative constants.

Theta with characteristic is evaluated as a shifted lattice sum

    theta[eps](v; tau) = sum_{n in Z^g} exp(i pi q^t tau q + 2 i pi q^t w),
    q = n + eps'/2,  w = v + eps/2,

which equals the prefactor form exactly and avoids cancellation between the
prefactor and the shifted plain theta.  Derivatives of any order are
term-wise: each lattice term picks up prod_l (2 pi i q_{i_l}); no finite
differences anywhere.  The summation region is the ellipsoid of the Im-tau
metric sized from a Gaussian tail bound with a safety factor of 1.5.

The inner summation runs in a compiled extension when available; a numpy
fallback is selected at import time otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .characteristics import (
    Characteristic,
    Partition,
    partition_characteristic,
    zero_characteristic,
)
from .curve import Curve
from .lattice import ellipsoid_points
from .periods import PeriodMatrices

try:  # pragma: no cover - exercised via the parity test when both exist
    from . import _theta_core as _kernel

    KERNEL_BACKEND = "cython"
except ImportError:  # pragma: no cover
    from . import _theta_impl as _kernel

    KERNEL_BACKEND = "numpy"

#: tail-bound safety factor on the ellipsoid radius
RADIUS_SAFETY = 1.5


def kernel_backend() -> str:
    """Name of the lattice-sum backend selected at import ('cython'|'numpy')."""
    return KERNEL_BACKEND


@dataclass
class ThetaContext:
    """Evaluation context: Riemann matrix, tail tolerance, radius control."""

    tau: np.ndarray
    tol: float = 1e-12
    radius_scale: float = 1.0
    _im: np.ndarray = field(init=False, repr=False)
    _im_inv: np.ndarray = field(init=False, repr=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=complex)
        asym = np.abs(tau - tau.T).max()
        if asym > 1e-6:
            raise ValueError(f"tau is not symmetric (asymmetry {asym:.3e})")
        self.tau = (tau + tau.T) / 2.0
        self._im = self.tau.imag
        eigs = np.linalg.eigvalsh(self._im)
        if eigs.min() <= 0:
            raise ValueError("Im tau must be positive definite")
        self._im_inv = np.linalg.inv(self._im)

    @property
    def genus(self) -> int:
        return self.tau.shape[0]

    def _rho2(self, shift: float) -> float:
        base = (-np.log(self.tol) + np.pi * shift) / np.pi + 1.0
        return (RADIUS_SAFETY * self.radius_scale) ** 2 * base

    def lattice(self, eps_prime, w: np.ndarray) -> np.ndarray:
        """Shifted lattice vectors q = n + eps'/2 covering the Gaussian mass of w."""
        epsp = np.asarray(eps_prime, dtype=float)
        imw = np.asarray(w).imag
        cacheable = not imw.any()
        key = tuple(int(b) for b in eps_prime) if cacheable else None
        if key is not None and key in self._cache:
            return self._cache[key]
        drift = self._im_inv @ imw
        shift = float(imw @ drift)
        center = -epsp / 2.0 - drift
        pts = ellipsoid_points(self._im, center, self._rho2(shift))
        Q = pts.astype(float) + epsp / 2.0
        if key is not None:
            self._cache[key] = Q
        return Q


def _sums(ctx: ThetaContext, c: Characteristic, v, midx: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    w = v + np.array(c.eps, dtype=float) / 2.0
    Q = ctx.lattice(c.eps_prime, w)
    return _kernel.theta_sums(
        np.ascontiguousarray(Q, dtype=float),
        np.ascontiguousarray(ctx.tau, dtype=complex),
        np.ascontiguousarray(w, dtype=complex),
        np.ascontiguousarray(midx, dtype=np.int64),
    )


def theta(ctx: ThetaContext, v) -> complex:
    """Riemann theta, the zero-characteristic lattice sum."""
    return theta_char(ctx, zero_characteristic(ctx.genus), v)


def theta_char(ctx: ThetaContext, c: Characteristic, v) -> complex:
    """Theta with characteristic c at argument v."""
    midx = np.zeros((1, 0), dtype=np.int64)
    return complex(_sums(ctx, c, v, midx)[0])


def theta_char_prefactor_form(ctx: ThetaContext, c: Characteristic, v) -> complex:
    """Cross-check path: explicit prefactor times the shifted plain theta."""
    v = np.asarray(v, dtype=complex)
    eps = np.array(c.eps, dtype=float)
    epsp = np.array(c.eps_prime, dtype=float)
    pre = np.exp(
        1j * np.pi * (epsp / 2.0) @ ctx.tau @ (epsp / 2.0)
        + 2j * np.pi * (v + eps / 2.0) @ (epsp / 2.0)
    )
    return complex(pre * theta(ctx, v + eps / 2.0 + ctx.tau @ (epsp / 2.0)))


def theta_derivative(ctx: ThetaContext, c: Characteristic, multi_index, v) -> complex:
    """Term-wise partial derivative along the 1-based directions in multi_index."""
    directions = [int(d) - 1 for d in multi_index]
    if any(d < 0 or d >= ctx.genus for d in directions):
        raise IndexError(f"derivative directions {multi_index} outside 1..{ctx.genus}")
    if not directions:
        raise ValueError("order must be at least 1; use theta_char for values")
    midx = np.array([directions], dtype=np.int64)
    return complex(_sums(ctx, c, v, midx)[0])


@dataclass
class DerivativeTensor:
    """Fully symmetric order-m tensor of m-th derivative theta constants."""

    order: int
    genus: int
    basis: str  # 'v' (normalized) or 'u' (non-normalized)
    entries: dict[tuple[int, ...], complex]

    def value(self, multi_index) -> complex:
        key = tuple(sorted(int(i) for i in multi_index))
        return self.entries[key]

    def as_array(self) -> np.ndarray:
        """Dense symmetric ndarray of shape (g,) * order."""
        g = self.genus
        if self.order == 0:
            return np.array(self.entries[()])
        arr = np.zeros((g,) * self.order, dtype=complex)
        for key, val in self.entries.items():
            idx0 = tuple(i - 1 for i in key)
            # fill every permutation; duplicates overwrite with the same value
            from itertools import permutations

            for perm in set(permutations(idx0)):
                arr[perm] = val
        return arr

    def max_abs(self) -> float:
        return max(abs(v) for v in self.entries.values())

    def sorted_items(self):
        return sorted(self.entries.items())


def sorted_multi_indices(g: int, order: int):
    return list(combinations_with_replacement(range(1, g + 1), order))


def derivative_theta_constants(ctx: ThetaContext, p: Partition) -> DerivativeTensor:
    """Order-m tensor of the lowest non-vanishing derivatives at v = 0.

    m is the partition multiplicity; for m = 0 the scalar theta constant.
    """
    m = p.multiplicity
    c = partition_characteristic(p)
    g = ctx.genus
    v0 = np.zeros(g)
    keys = sorted_multi_indices(g, m)
    midx = np.array([[i - 1 for i in key] for key in keys], dtype=np.int64)
    if m == 0:
        midx = midx.reshape((1, 0))
    vals = _sums(ctx, c, v0, midx)
    entries = {key: complex(val) for key, val in zip(keys, vals)}
    return DerivativeTensor(order=m, genus=g, basis="v", entries=entries)


def to_u_basis(t: DerivativeTensor, pm: PeriodMatrices) -> DerivativeTensor:
    """Chain rule v = omega^{-1} u: contract every slot with omega^{-1}."""
    if t.basis != "v":
        raise ValueError("tensor is already in the u basis")
    if t.order == 0:
        return DerivativeTensor(0, t.genus, "u", dict(t.entries))
    arr = t.as_array()
    m = pm.omega_inv
    for _ in range(t.order):
        # consume axis 0, append the transformed axis last; after `order`
        # applications the axis order is restored
        arr = np.tensordot(arr, m, axes=([0], [0]))
    entries = {
        key: complex(arr[tuple(i - 1 for i in key)])
        for key in sorted_multi_indices(t.genus, t.order)
    }
    return DerivativeTensor(order=t.order, genus=t.genus, basis="u", entries=entries)


def vanishing_order(ctx: ThetaContext, p: Partition, max_order: int = 4,
                    threshold: float = 1e-6) -> int:
    """Smallest derivative order with a component above `threshold` at v = 0."""
    c = partition_characteristic(p)
    g = ctx.genus
    v0 = np.zeros(g)
    val = abs(theta_char(ctx, c, v0))
    if val > threshold:
        return 0
    for order in range(1, max_order + 1):
        keys = sorted_multi_indices(g, order)
        midx = np.array([[i - 1 for i in key] for key in keys], dtype=np.int64)
        vals = _sums(ctx, c, v0, midx)
        if np.abs(vals).max() > threshold:
            return order
    return max_order + 1


def sigma_at_halfperiod(curve: Curve, pm: PeriodMatrices, p: Partition,
                        Cg: complex, ctx: ThetaContext | None = None) -> complex:
    """Sigma value at the half-period image of a partition.

    sigma(omega A(I)) = exp(-(omega e + omega' e').(eta e + eta' e')/8)
    theta[I](0) / C, with (e, e') the bits of sum_{i in I} [eps_i].
    Nonzero only for multiplicity-0 partitions.
    """
    from .characteristics import branch_point_characteristic

    g = curve.genus
    csum = zero_characteristic(g)
    for i in p.index_set:
        csum = csum + branch_point_characteristic(g, i)
    eps = np.array(csum.eps, dtype=float)
    epsp = np.array(csum.eps_prime, dtype=float)
    ctx = ctx or ThetaContext(pm.tau)
    th = theta_char(ctx, partition_characteristic(p), np.zeros(g))
    left = pm.omega @ eps + pm.omega_prime @ epsp
    right = pm.eta @ eps + pm.eta_prime @ epsp
    return complex(np.exp(-(left @ right) / 8.0) * th / Cg)
