"""Period matrices, the Abel map, and its Jacobian.

Periods are assembled from elementary segment integrals of the first- and
second-kind differentials through the homology weight matrices.  A-posteriori
quality checks (generalized Legendre relation, symmetry of tau and kappa,
positive-definite Im tau) validate quadrature, sheet tracking and cycle
orientation together; orientation ambiguity is resolved en bloc.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .curve import Curve, locate_segment, make_curve, on_curve, y_upper
from .errors import (
    LegendreCheckFailed,
    PathThroughBranchPoint,
    RepeatedSupport,
    TauNotSiegel,
)
from .homology import HomologyBasis, build_homology
from .quadrature import SEGMENT_RTOL, full_segment, partial_segment, tail_segment

#: tolerance for the matrix identities (Legendre, tau/kappa symmetry)
MATRIX_TOL = 1e-8


@dataclass(frozen=True)
class PeriodMatrices:
    """First/second kind periods with derived matrices and quality residuals."""

    genus: int
    omega: np.ndarray
    omega_prime: np.ndarray
    eta: np.ndarray
    eta_prime: np.ndarray
    tau: np.ndarray
    kappa: np.ndarray
    legendre_residual: float
    tau_asym: float
    tau_im_min_eig: float
    kappa_asym: float

    @property
    def omega_inv(self) -> np.ndarray:
        return np.linalg.inv(self.omega)


def segment_integrals(curve: Curve, kind: str = "first"):
    """Elementary segment integrals on the upper-edge sheet.

    Returns (table, err): table[j-1, n-1] holds the integral of the n-th
    density of `kind` over segment j = (e_j, e_{j+1}), j = 1..2g; err is the
    worst self-convergence estimate over segments.
    """
    g = curve.genus
    table = np.zeros((2 * g, g), dtype=complex)
    worst = 0.0
    for j in range(1, 2 * g + 1):
        vals, err = full_segment(curve, j, kind)
        table[j - 1] = vals
        worst = max(worst, err)
    return table, worst


def _legendre_residual(om, omp, et, etp, genus: int) -> float:
    big = np.block([[om, omp], [et, etp]])
    j2 = np.block(
        [
            [np.zeros((genus, genus)), np.eye(genus)],
            [-np.eye(genus), np.zeros((genus, genus))],
        ]
    )
    return float(np.abs(big @ j2 @ big.T - 2j * np.pi * j2).max())


def period_matrices(curve: Curve, basis: HomologyBasis | None = None) -> PeriodMatrices:
    """Assemble omega, omega', eta, eta', tau, kappa with validated invariants.

    Raises LegendreCheckFailed or TauNotSiegel when the a-posteriori
    identities fail beyond MATRIX_TOL.
    """
    g = curve.genus
    basis = basis or build_homology(curve)
    t_first, _ = segment_integrals(curve, "first")
    t_second, _ = segment_integrals(curve, "second")

    om = t_first.T @ basis.a_coeffs.T.astype(float)
    omp = t_first.T @ basis.b_coeffs.T.astype(float)
    et = t_second.T @ basis.a_coeffs.T.astype(float)
    etp = t_second.T @ basis.b_coeffs.T.astype(float)

    res = _legendre_residual(om, omp, et, etp, g)
    if res > MATRIX_TOL:
        # the pictorial orientation is fixed only up to a b-flip en bloc
        flipped = _legendre_residual(om, -omp, et, -etp, g)
        if flipped <= MATRIX_TOL:
            omp, etp, res = -omp, -etp, flipped
        else:
            raise LegendreCheckFailed(
                f"Legendre residual {res:.3e} (flipped {flipped:.3e}) exceeds "
                f"{MATRIX_TOL:g}",
                residual=res,
                matrices=(om, omp, et, etp),
            )

    tau = np.linalg.solve(om, omp)
    tau_asym = float(np.abs(tau - tau.T).max())
    im_eigs = np.linalg.eigvalsh((tau.imag + tau.imag.T) / 2.0)
    if im_eigs.min() <= 0.0:
        raise TauNotSiegel(
            f"Im tau min eigenvalue {im_eigs.min():.3e} is not positive"
        )
    if tau_asym > MATRIX_TOL:
        raise LegendreCheckFailed(
            f"tau asymmetry {tau_asym:.3e} exceeds {MATRIX_TOL:g}",
            residual=tau_asym,
            matrices=(om, omp, et, etp),
        )
    kappa = et @ np.linalg.inv(om)
    kappa_asym = float(np.abs(kappa - kappa.T).max())
    if kappa_asym > MATRIX_TOL:
        raise LegendreCheckFailed(
            f"kappa asymmetry {kappa_asym:.3e} exceeds {MATRIX_TOL:g}",
            residual=kappa_asym,
            matrices=(om, omp, et, etp),
        )

    for m in (om, omp, et, etp, tau, kappa):
        m.setflags(write=False)
    return PeriodMatrices(
        genus=g,
        omega=om,
        omega_prime=omp,
        eta=et,
        eta_prime=etp,
        tau=tau,
        kappa=kappa,
        legendre_residual=res,
        tau_asym=tau_asym,
        tau_im_min_eig=float(im_eigs.min()),
        kappa_asym=kappa_asym,
    )


# ----------------------------------------------------------------------------
# Abel map


def _u_integral_from(curve: Curve, x0: float, segment: int) -> np.ndarray:
    """Integral of du over the real path from x0 out to +infinity (upper edge)."""
    g = curve.genus
    e = curve.branch_points
    total = np.zeros(g, dtype=complex)
    if segment == 2 * g + 1:
        vals, _ = tail_segment(curve, x0, "first")
        return vals
    # finish the current segment, then whole segments, then the tail
    vals, _ = partial_segment(curve, x0, e[segment], segment, "first")
    total += vals
    for j in range(segment + 1, 2 * g + 1):
        vals, _ = full_segment(curve, j, "first")
        total += vals
    vals, _ = tail_segment(curve, e[-1], "first")
    return total + vals


def abel_point(curve: Curve, pm: PeriodMatrices, x: complex, y: complex) -> np.ndarray:
    """Abel map of one on-curve point, base point at infinity.

    The path runs along the real axis (upper-edge branch); the image point's
    sheet only flips the overall sign (hyperelliptic involution).
    """
    if abs(complex(x).imag) > 1e-12 * max(1.0, abs(x)):
        raise ValueError("only real x-coordinates are supported for Abel paths")
    xr = float(complex(x).real)
    e = curve.branch_points
    hits = [k for k, ek in enumerate(e, start=1) if abs(xr - ek) <= 1e-13 * max(1.0, curve.spread)]
    if hits:
        return abel_branch_index(curve, pm, hits[0])
    if not on_curve(curve, xr, y):
        raise ValueError(f"point ({x}, {y}) is not on the curve")
    seg = locate_segment(curve, xr)
    if seg == 0:
        raise PathThroughBranchPoint(
            "x lies left of e_1; the real path to infinity would cross every "
            "branch point"
        )
    yu = complex(y_upper(curve, np.array([xr]), seg)[0])
    sheet = +1 if abs(y - yu) <= abs(y + yu) else -1
    u = _u_integral_from(curve, xr, seg)
    return -sheet * (pm.omega_inv @ u)


def abel_branch_index(curve: Curve, pm: PeriodMatrices, k: int) -> np.ndarray:
    """Abel map of branch point e_k (k = 1..2g+2; 2g+2 is infinity -> 0)."""
    g = curve.genus
    if k == 2 * g + 2:
        return np.zeros(g, dtype=complex)
    e = curve.branch_points
    total = np.zeros(g, dtype=complex)
    for j in range(k, 2 * g + 1):
        vals, _ = full_segment(curve, j, "first")
        total += vals
    tail, _ = tail_segment(curve, e[-1], "first")
    return -(pm.omega_inv @ (total + tail))


def abel_map(curve: Curve, pm: PeriodMatrices, divisor) -> np.ndarray:
    """Abel map of a positive divisor.

    `divisor` is an iterable whose entries are branch-point indices (int,
    1..2g+2) or on-curve points (x, y).
    """
    total = np.zeros(curve.genus, dtype=complex)
    for entry in divisor:
        if isinstance(entry, (int, np.integer)):
            total += abel_branch_index(curve, pm, int(entry))
        else:
            x, y = entry
            total += abel_point(curve, pm, x, y)
    return total


def lattice_residual(pm: PeriodMatrices, d: np.ndarray) -> float:
    """Distance of d from the lattice generated by columns of (1, tau)."""
    tau = pm.tau
    mp = np.round(np.linalg.solve(tau.imag, np.asarray(d).imag))
    m = np.round(np.asarray(d).real - tau.real @ mp)
    return float(np.abs(d - (m + tau @ mp)).max())


def abel_jacobian(curve: Curve, pm: PeriodMatrices, divisor) -> np.ndarray:
    """Jacobian d x_p / d v_n of the Abel map at a divisor of g finite points.

    Entry (p, n) equals -2 y_p sum_j (-1)^{j-1} s^{(p)}_{j-1} omega_{jn}
    / prod_{l != p} (x_p - x_l), with s^{(p)} the elementary symmetric
    polynomials in the other x-coordinates.
    """
    g = curve.genus
    pts = list(divisor)
    if len(pts) != g:
        raise ValueError(f"need exactly g={g} divisor points")
    xs = np.array([complex(p[0]) for p in pts])
    ys = np.array([complex(p[1]) for p in pts])
    if np.min(np.abs(xs[:, None] - xs[None, :]) + np.eye(g)) < 1e-12 * max(1.0, curve.spread):
        raise RepeatedSupport("two divisor points share an x-coordinate")
    jac = np.zeros((g, g), dtype=complex)
    for p in range(g):
        others = np.delete(xs, p)
        s = np.zeros(g, dtype=complex)
        s[0] = 1.0
        for xo in others:
            s[1:] = s[1:] + xo * s[:-1].copy()
        signs = np.array([(-1.0) ** j for j in range(g)])
        denom = np.prod(xs[p] - others) if g > 1 else 1.0
        jac[p] = -2.0 * ys[p] * ((signs * s) @ pm.omega) / denom
    return jac


# ----------------------------------------------------------------------------
# Period cache file


def branch_point_key(points) -> str:
    payload = ",".join(float(p).hex() for p in sorted(float(p) for p in points))
    return hashlib.sha256(payload.encode()).hexdigest()


def _mat_out(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _mat_in(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def save_period_cache(path, curve: Curve, pm: PeriodMatrices) -> None:
    """Write a bit-exact JSON cache keyed by the branch points."""
    doc = {
        "key": branch_point_key(curve.branch_points),
        "branch_points": list(curve.branch_points),
        "genus": pm.genus,
        "omega": _mat_out(pm.omega),
        "omega_prime": _mat_out(pm.omega_prime),
        "eta": _mat_out(pm.eta),
        "eta_prime": _mat_out(pm.eta_prime),
        "tau": _mat_out(pm.tau),
        "kappa": _mat_out(pm.kappa),
        "legendre_residual": pm.legendre_residual,
        "tau_asym": pm.tau_asym,
        "tau_im_min_eig": pm.tau_im_min_eig,
        "kappa_asym": pm.kappa_asym,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_period_cache(path, curve: Curve | None = None) -> tuple[Curve, PeriodMatrices]:
    """Load a cache file; verifies the key when `curve` is given."""
    with open(path) as fh:
        doc = json.load(fh)
    cached = make_curve(doc["branch_points"])
    if curve is not None and branch_point_key(curve.branch_points) != doc["key"]:
        raise ValueError("cache file was computed for different branch points")
    pm = PeriodMatrices(
        genus=doc["genus"],
        omega=_mat_in(doc["omega"]),
        omega_prime=_mat_in(doc["omega_prime"]),
        eta=_mat_in(doc["eta"]),
        eta_prime=_mat_in(doc["eta_prime"]),
        tau=_mat_in(doc["tau"]),
        kappa=_mat_in(doc["kappa"]),
        legendre_residual=doc["legendre_residual"],
        tau_asym=doc["tau_asym"],
        tau_im_min_eig=doc["tau_im_min_eig"],
        kappa_asym=doc["kappa_asym"],
    )
    return cached, pm
