"""Named sample curves shipped with the CLI: evenly spaced integer branch points."""

from __future__ import annotations

from .curve import Curve, make_curve


def named_branch_points(genus: int) -> list[float]:
    """2g+1 integers centered at zero: -g, ..., g."""
    if genus < 1:
        raise ValueError("genus must be positive")
    return [float(k) for k in range(-genus, genus + 1)]


def named_curve(genus: int) -> Curve:
    return make_curve(named_branch_points(genus))
