"""Canonical homology basis over the real branch-point cut structure.

Cuts are drawn between e_{2k-1} and e_{2k} (k = 1..g) plus (e_{2g+1}, inf).
Each a_k loops around cut k: an upper-edge pass left-to-right and a
second-sheet return.  Each b_k threads cut k and the last cut: an upper-edge
pass rightward across the intervening gaps and a second-sheet return.  Passes
over intermediate cuts cancel between the two sheets, so only gap segments
contribute to the b_k integrals; each contributing segment is traversed
effectively twice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import Curve


@dataclass(frozen=True)
class PathSegment:
    """Directed real segment with the sheet sign of the traversal."""

    start: float
    end: float
    side: int  # +1 upper-edge branch, -1 the hyperelliptic involution image


@dataclass(frozen=True)
class HomologyBasis:
    genus: int
    a_cycles: tuple[tuple[PathSegment, ...], ...]
    b_cycles: tuple[tuple[PathSegment, ...], ...]
    #: integer weights of the upper-edge elementary segment integrals
    #: (segment j = (e_j, e_{j+1}), j = 1..2g) in each cycle integral
    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    #: cut indices (1-based, cut g+1 is the tail cut) threaded by each b-cycle
    b_cuts: tuple[tuple[int, int], ...]


def build_homology(curve: Curve) -> HomologyBasis:
    """Cycle descriptors plus the segment-weight matrices used for assembly."""
    g = curve.genus
    e = curve.branch_points
    a_cycles = []
    b_cycles = []
    a_coeffs = np.zeros((g, 2 * g), dtype=int)
    b_coeffs = np.zeros((g, 2 * g), dtype=int)
    b_cuts = []
    for k in range(1, g + 1):
        lo, hi = e[2 * k - 2], e[2 * k - 1]
        a_cycles.append(
            (PathSegment(lo, hi, +1), PathSegment(hi, lo, -1)),
        )
        a_coeffs[k - 1, 2 * k - 2] = 2  # segment 2k-1, both passes add up

        fwd = [PathSegment(e[2 * l - 1], e[2 * l], +1) for l in range(k, g + 1)]
        ret = [PathSegment(s.end, s.start, -1) for s in reversed(fwd)]
        b_cycles.append(tuple(fwd + ret))
        for l in range(k, g + 1):
            b_coeffs[k - 1, 2 * l - 1] = 2  # gap segment 2l
        b_cuts.append((k, g + 1))
    return HomologyBasis(
        genus=g,
        a_cycles=tuple(a_cycles),
        b_cycles=tuple(b_cycles),
        a_coeffs=a_coeffs,
        b_coeffs=b_coeffs,
        b_cuts=tuple(b_cuts),
    )
