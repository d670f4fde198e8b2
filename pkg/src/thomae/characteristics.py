"""Half-integer characteristics, branch-point table, and partitions.

A characteristic is a pair of bit vectors (eps, eps') encoding the
half-period eps/2 + tau eps'/2; branch-point characteristics follow the
homology construction over the real cut structure, and every half-period
characteristic is reached exactly once by the partition correspondence
[I] = sum_{i in I} [eps_i] + [K].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import MultiplicityOutOfRange
from .periods import PeriodMatrices


@dataclass(frozen=True)
class Characteristic:
    """Bit pair (eps, eps_prime); eps is the integer shift, eps' the tau shift."""

    eps: tuple[int, ...]
    eps_prime: tuple[int, ...]

    def __post_init__(self):
        if len(self.eps) != len(self.eps_prime):
            raise ValueError("eps and eps_prime must have equal length")
        if any(b not in (0, 1) for b in self.eps + self.eps_prime):
            raise ValueError("characteristic entries must be bits")

    @property
    def genus(self) -> int:
        return len(self.eps)

    def __add__(self, other: "Characteristic") -> "Characteristic":
        return Characteristic(
            tuple((a + b) % 2 for a, b in zip(self.eps, other.eps)),
            tuple((a + b) % 2 for a, b in zip(self.eps_prime, other.eps_prime)),
        )

    def display(self) -> str:
        """Two bit rows 'eps_prime/eps', the printed [eps'^t over eps^t] order."""
        top = "".join(str(b) for b in self.eps_prime)
        bot = "".join(str(b) for b in self.eps)
        return f"{top}/{bot}"


def zero_characteristic(g: int) -> Characteristic:
    return Characteristic((0,) * g, (0,) * g)


def branch_point_characteristic(g: int, k: int) -> Characteristic:
    """Characteristic of branch point e_k, 1 <= k <= 2g+2 (2g+2 = infinity)."""
    if not 1 <= k <= 2 * g + 2:
        raise IndexError(f"branch point index {k} outside 1..{2 * g + 2}")
    if k == 2 * g + 2:
        return zero_characteristic(g)
    if k == 2 * g + 1:
        return Characteristic((1,) * g, (0,) * g)
    m = (k + 1) // 2  # cut index
    eps_prime = [0] * g
    eps_prime[m - 1] = 1
    ones = m - 1 if k % 2 == 1 else m
    eps = [1] * ones + [0] * (g - ones)
    return Characteristic(tuple(eps), tuple(eps_prime))


def riemann_constant_characteristic(g: int) -> Characteristic:
    """[K] = sum of the g odd branch-point characteristics [eps_{2k}] mod 2."""
    total = zero_characteristic(g)
    for k in range(1, g + 1):
        total = total + branch_point_characteristic(g, 2 * k)
    return total


def parity(c: Characteristic) -> str:
    """'even' or 'odd'; even iff eps.eps' is even.

    The sign convention is calibrated against the operational check
    theta[c](-v) = +/- theta[c](v) (see the test suite).
    """
    dot = sum(a * b for a, b in zip(c.eps, c.eps_prime)) % 2
    return "odd" if dot else "even"


def half_period(c: Characteristic, pm: PeriodMatrices) -> np.ndarray:
    """eps/2 + tau eps'/2 as a complex g-vector."""
    eps = np.array(c.eps, dtype=float)
    epsp = np.array(c.eps_prime, dtype=float)
    return eps / 2.0 + pm.tau @ (epsp / 2.0)


# ----------------------------------------------------------------------------
# Partitions


@dataclass(frozen=True)
class Partition:
    """Canonical half of a partition of {1..2g+2} (infinity index omitted).

    The stored `index_set` never contains 2g+2; `has_infinity` records whether
    the canonical part includes it.  Canonical form: the smaller part, and on
    equal cardinality the part without infinity.
    """

    genus: int
    index_set: tuple[int, ...]
    has_infinity: bool

    @property
    def multiplicity(self) -> int:
        full = len(self.index_set) + (1 if self.has_infinity else 0)
        return (self.genus + 1 - full) // 2

    @property
    def finite_complement(self) -> tuple[int, ...]:
        g = self.genus
        return tuple(
            i for i in range(1, 2 * g + 2) if i not in set(self.index_set)
        )

    def complement(self) -> "Partition":
        g = self.genus
        return Partition(g, self.finite_complement, not self.has_infinity)

    def display(self) -> str:
        """Brace syntax over finite indices; infinity never written."""
        return "{" + ",".join(str(i) for i in self.index_set) + "}"


def make_partition(g: int, indices) -> Partition:
    """Canonicalize an index subset of {1..2g+2} into a Partition.

    Either half may be supplied; index 2g+2 stands for infinity.  The subset
    sizes must be compatible with a half-period partition
    (|I| = g+1-2m for some m), otherwise MultiplicityOutOfRange is raised.
    """
    idx = sorted(set(int(i) for i in indices))
    if any(i < 1 or i > 2 * g + 2 for i in idx):
        raise IndexError(f"indices must lie in 1..{2 * g + 2}")
    has_inf = (2 * g + 2) in idx
    fin = tuple(i for i in idx if i != 2 * g + 2)
    size = len(fin) + has_inf
    comp_size = 2 * g + 2 - size
    if size > comp_size or (size == comp_size and has_inf):
        fin = tuple(i for i in range(1, 2 * g + 2) if i not in set(fin))
        has_inf = not has_inf
        size = comp_size
    m2 = g + 1 - size
    if m2 < 0 or m2 % 2:
        raise MultiplicityOutOfRange(
            f"a part of size {size} does not represent a half-period "
            f"characteristic for genus {g}"
        )
    return Partition(genus=g, index_set=fin, has_infinity=bool(has_inf))


def partition_characteristic(p: Partition) -> Characteristic:
    """[I] = sum_{i in I} [eps_i] + [K] mod 2 (complement-invariant)."""
    g = p.genus
    total = riemann_constant_characteristic(g)
    for i in p.index_set:
        total = total + branch_point_characteristic(g, i)
    # the infinity index contributes the zero characteristic
    return total


def enumerate_partitions(g: int, m: int) -> list[Partition]:
    """All canonical partitions of multiplicity m.

    Counts: C(2g+1, g) for m = 0, C(2g+2, g-1) for m = 1,
    C(2g+2, g+1-2m) for m > 1.
    """
    if m < 0 or m > (g + 1) // 2:
        raise MultiplicityOutOfRange(
            f"multiplicity {m} outside 0..{(g + 1) // 2} for genus {g}"
        )
    size = g + 1 - 2 * m
    if m == 0:
        # ties are canonicalized to the finite part
        return [
            Partition(g, tuple(c), False)
            for c in combinations(range(1, 2 * g + 2), size)
        ]
    out = []
    for c in combinations(range(1, 2 * g + 3), size):
        has_inf = c and c[-1] == 2 * g + 2
        fin = c[:-1] if has_inf else c
        out.append(Partition(g, tuple(fin), bool(has_inf)))
    return out


def partition_count(g: int, m: int) -> int:
    if m == 0:
        return comb(2 * g + 1, g)
    return comb(2 * g + 2, g + 1 - 2 * m)
