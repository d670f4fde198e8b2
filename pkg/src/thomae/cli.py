"""Command-line entry point.

Subcommands: periods, characteristics, theta-const, verify, bolza.
Exit codes: 0 all executed checks passed, 2 usage error, 3 computational
failure (e.g. period assembly rejected by its invariants).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import formulas
from .characteristics import (
    branch_point_characteristic,
    enumerate_partitions,
    make_partition,
    parity,
    partition_characteristic,
    partition_count,
    riemann_constant_characteristic,
)
from .curve import curve_file_points, make_curve
from .errors import ThomaeError
from .periods import period_matrices, save_period_cache
from .samples import named_branch_points
from .theta import ThetaContext, derivative_theta_constants, to_u_basis
from .verify import SuiteConfig, report_body, report_table, run_suite

OUTPUT_DIR_ENV = "THOMAE_OUTPUT_DIR"


def _add_curve_args(sub: argparse.ArgumentParser) -> None:
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--curve-file", help="text file holding one array of branch points")
    src.add_argument("--curve", help="inline comma-separated branch points")
    src.add_argument("--genus", type=int, help="named sample curve -g..g")


def _resolve_points(args) -> list[float]:
    if args.curve_file:
        with open(args.curve_file) as fh:
            return curve_file_points(fh.read())
    if args.curve:
        return [float(t) for t in args.curve.replace(",", " ").split()]
    return named_branch_points(args.genus)


def _parse_partition(text: str, g: int):
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"partition must use brace syntax like {{1,4}}: got {text!r}")
    inner = body[1:-1].strip()
    indices = [int(t) for t in inner.replace(",", " ").split()] if inner else []
    if any(i == 2 * g + 2 for i in indices):
        raise ValueError("the infinity index is never written (it is inferred)")
    return make_partition(g, indices)


def _open_output(args):
    if not args.output:
        return sys.stdout, False
    path = args.output
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir and not os.path.isabs(path):
        path = os.path.join(out_dir, path)
    return open(path, "w"), True


def _fmt_complex(z: complex) -> str:
    return f"{z.real:+.12e}{z.imag:+.12e}j"


def _print_matrix(name: str, mat, out) -> None:
    print(f"{name} =", file=out)
    for row in np.atleast_2d(mat):
        print("  " + "  ".join(_fmt_complex(z) for z in row), file=out)


def cmd_periods(args) -> int:
    curve = make_curve(_resolve_points(args))
    pm = period_matrices(curve)
    out, close = _open_output(args)
    try:
        print(f"curve: {list(curve.branch_points)}  genus {curve.genus}", file=out)
        for name in ("omega", "omega_prime", "eta", "eta_prime", "tau", "kappa"):
            _print_matrix(name, getattr(pm, name), out)
        print(f"legendre_residual = {pm.legendre_residual:.3e}", file=out)
        print(f"tau_asym = {pm.tau_asym:.3e}", file=out)
        print(f"tau_im_min_eig = {pm.tau_im_min_eig:.6e}", file=out)
        print(f"kappa_asym = {pm.kappa_asym:.3e}", file=out)
    finally:
        if close:
            out.close()
    if args.cache:
        save_period_cache(args.cache, curve, pm)
    return 0


def cmd_characteristics(args) -> int:
    curve = make_curve(_resolve_points(args))
    g = curve.genus
    out, close = _open_output(args)
    try:
        print(f"branch-point characteristics, genus {g} (rows eps'^t / eps^t)", file=out)
        for k in range(1, 2 * g + 3):
            c = branch_point_characteristic(g, k)
            label = "inf" if k == 2 * g + 2 else f"e_{k}"
            print(f"  [{label:>5}] {c.display()}  {parity(c)}", file=out)
        ck = riemann_constant_characteristic(g)
        print(f"  [K]     {ck.display()}  {parity(ck)}", file=out)
        print("partition -> characteristic (multiplicity: count)", file=out)
        total = 0
        for m in range(0, (g + 1) // 2 + 1):
            parts = enumerate_partitions(g, m)
            total += len(parts)
            print(f"  m={m}: {len(parts)} (expected {partition_count(g, m)})", file=out)
            for p in parts if len(parts) <= args.limit else parts[: args.limit]:
                c = partition_characteristic(p)
                print(f"    {p.display():>16} -> {c.display()} {parity(c)}", file=out)
            if len(parts) > args.limit:
                print(f"    ... {len(parts) - args.limit} more", file=out)
        print(f"total {total} = 2^(2g) = {4 ** g}", file=out)
    finally:
        if close:
            out.close()
    return 0


def cmd_theta_const(args) -> int:
    curve = make_curve(_resolve_points(args))
    g = curve.genus
    p = _parse_partition(args.partition, g)
    pm = period_matrices(curve)
    ctx = ThetaContext(pm.tau)
    tens = derivative_theta_constants(ctx, p)
    if args.u_basis:
        tens = to_u_basis(tens, pm)
    out, close = _open_output(args)
    try:
        print(
            f"partition {p.display()} multiplicity {p.multiplicity} "
            f"characteristic {partition_characteristic(p).display()} basis {tens.basis}",
            file=out,
        )
        for key, val in tens.sorted_items():
            label = ",".join(str(i) for i in key) if key else "-"
            print(f"  d[{label}] = {_fmt_complex(val)}", file=out)
    finally:
        if close:
            out.close()
    return 0


def cmd_bolza(args) -> int:
    curve = make_curve(_resolve_points(args))
    g = curve.genus
    pm = period_matrices(curve)
    ctx = ThetaContext(pm.tau)
    out, close = _open_output(args)
    failed = 0
    try:
        print(f"curve: {list(curve.branch_points)}  genus {g}", file=out)
        for m in (1, 2, 3):
            if m > (g + 1) // 2:
                continue
            for p in enumerate_partitions(g, m):
                i_fin, _ = formulas.working_sides(p)
                if not i_fin:
                    continue
                tens = to_u_basis(derivative_theta_constants(ctx, p), pm)
                try:
                    got = formulas.bolza_symmetric(tens, p, curve)
                except ThomaeError as exc:
                    print(f"  {p.display():>14}: {exc}", file=out)
                    failed += 1
                    continue
                table = formulas.elementary_symmetric(i_fin, curve)
                want = [table.s(j) for j in range(1, len(i_fin) + 1)]
                err = max(
                    abs(gv - wv) / max(1.0, abs(wv)) for gv, wv in zip(got, want)
                )
                mark = "ok" if err <= args.tol else "FAIL"
                if mark == "FAIL":
                    failed += 1
                shown = ", ".join(f"{v.real:+.9f}" for v in got)
                print(f"  {p.display():>14}: s = [{shown}]  err {err:.2e}  {mark}", file=out)
    finally:
        if close:
            out.close()
    return 0 if failed == 0 else 3


def cmd_verify(args) -> int:
    mults = None
    if args.multiplicity is not None:
        mults = tuple(int(t) for t in args.multiplicity.split(","))
    partitions: str | int | list = "all"
    if args.partitions != "all":
        if args.partitions.startswith("random:"):
            partitions = int(args.partitions.split(":", 1)[1])
        else:
            raise ValueError("--partitions takes 'all' or 'random:N'")
    if args.partition:
        g = make_curve(_resolve_points(args)).genus
        partitions = [list(_parse_partition(t, g).index_set) for t in args.partition]
    cfg = SuiteConfig(
        branch_points=_resolve_points(args),
        multiplicities=mults,
        partitions=partitions,
        k_policy="all" if args.all_k else "default",
        seed=args.seed,
        divisor_count=args.divisors,
        theta_quotient=not args.no_theta_quotient,
        explore_conjecture=args.explore_conjecture,
    )
    report = run_suite(cfg)
    out, close = _open_output(args)
    try:
        if args.format == "tabular":
            out.write(report_table(report))
        else:
            out.write(report_body(report) + "\n")
        summary = report["summary"]
        print(
            f"# {summary['passed']}/{summary['total']} checks passed, "
            f"worst rel err {summary['worst_rel_err']}",
            file=sys.stderr,
        )
    finally:
        if close:
            out.close()
    return 0 if report["summary"]["failed"] == 0 else 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="thomae",
        description="Hyperelliptic curves: period matrices, theta constants, "
        "and branch-point identity verification.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_per = sub.add_parser("periods", help="print period matrices with residuals")
    _add_curve_args(p_per)
    p_per.add_argument("--cache", help="write a period cache file")
    p_per.add_argument("--output", help="output path (default stdout)")
    p_per.set_defaults(fn=cmd_periods)

    p_chr = sub.add_parser("characteristics", help="print the characteristic tables")
    _add_curve_args(p_chr)
    p_chr.add_argument("--limit", type=int, default=40, help="partitions listed per multiplicity")
    p_chr.add_argument("--output", help="output path (default stdout)")
    p_chr.set_defaults(fn=cmd_characteristics)

    p_tc = sub.add_parser("theta-const", help="derivative theta constants of one partition")
    _add_curve_args(p_tc)
    p_tc.add_argument("--partition", required=True, help="brace syntax, e.g. {1,4}")
    p_tc.add_argument("--u-basis", action="store_true", help="report in non-normalized u variables")
    p_tc.add_argument("--output", help="output path (default stdout)")
    p_tc.set_defaults(fn=cmd_theta_const)

    p_ver = sub.add_parser("verify", help="run the identity verification suite")
    _add_curve_args(p_ver)
    p_ver.add_argument("--multiplicity", help="comma list, e.g. 0,1,2")
    p_ver.add_argument("--partitions", default="all", help="'all' or 'random:N'")
    p_ver.add_argument("--partition", action="append", help="explicit partition (repeatable)")
    p_ver.add_argument("--all-k", action="store_true", help="cross-check every admissible K")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--divisors", type=int, default=5, help="random divisors for quotient checks")
    p_ver.add_argument("--no-theta-quotient", action="store_true")
    p_ver.add_argument("--explore-conjecture", action="store_true",
                       help="optional dictionary-degree exploration (m = 2, 3)")
    p_ver.add_argument("--format", choices=("structured", "tabular"), default="structured")
    p_ver.add_argument("--output", help="output path (default stdout)")
    p_ver.set_defaults(fn=cmd_verify)

    p_bz = sub.add_parser("bolza", help="recover branch points from theta derivatives")
    _add_curve_args(p_bz)
    p_bz.add_argument("--tol", type=float, default=1e-5)
    p_bz.add_argument("--output", help="output path (default stdout)")
    p_bz.set_defaults(fn=cmd_bolza)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.fn(args)
    except ThomaeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
