"""Command-line interface.

Exit codes: 0 success, 1 validation failure (report on stdout), 2 I/O or
schema error.
"""

import argparse
import json
import sys

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import BlockJacobiError, LanczosBreakdown
from .inverse import herglotz_decompose, inverse_map
from .io import (
    SchemaError,
    gen_operator,
    load_operator,
    load_spectral,
    matrix_to_json,
    save_operator,
    save_spectral,
)
from .operator import Flavor, m_level
from .spectral import eval_prf, forward_map, residues
from .tame import TameSystem, is_p_tame, polynomial_obstruction, validate_sp

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


def _tolerances(args):
    return DEFAULT_TOLERANCES.with_overrides(
        cluster_tol=args.cluster_tol, rank_tol=args.rank_tol, tame_tol=args.tame_tol
    )


def _emit(obj):
    print(json.dumps(obj, indent=1))


def _parse_z(text):
    try:
        re_, im = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected <re>,<im>, got {text!r}") from exc
    return complex(re_, im)


def cmd_forward(args, tol):
    op = load_operator(args.inp, tol)
    save_spectral(forward_map(op, tol), args.out)
    return EXIT_OK


def cmd_inverse(args, tol):
    data = load_spectral(args.inp)
    report = validate_sp(data, tol)
    try:
        op = inverse_map(data, args.flavor, tol)
    except LanczosBreakdown as exc:
        print(f"LanczosBreakdown: {exc}")
        print(report.to_text())
        return EXIT_INVALID
    if not report.ok:
        print(report.to_text())
        return EXIT_INVALID
    save_operator(op, args.out)
    return EXIT_OK


def cmd_validate(args, tol):
    report = validate_sp(load_spectral(args.inp), tol)
    print(report.to_text())
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_tame(args, tol):
    data = load_spectral(args.inp)
    p = args.p if args.p is not None else data.p
    sys_ = TameSystem.from_spectral(data)
    res = is_p_tame(sys_, p, tol)
    F = polynomial_obstruction(sys_, p, tol)
    _emit({
        "p": p,
        "tame": res.tame,
        "applicable": res.applicable,
        "min_eigenvalue": res.min_eig,
        "threshold": res.threshold,
        "detail": res.detail,
        "obstruction": None if F is None else [[[float(x.real), float(x.imag)] for x in row] for row in F],
    })
    return EXIT_OK if res.tame else EXIT_INVALID


def cmd_mfun(args, tol):
    z = args.z
    if args.level is not None:
        if args.op is None:
            raise SchemaError("--level requires --op <op-file>")
        value = m_level(load_operator(args.op, tol), z, args.level, tol)
    else:
        value = eval_prf(residues(load_spectral(args.inp), tol), z, tol)
    _emit({"z": [z.real, z.imag], "level": args.level or 1, "M": matrix_to_json(value)})
    return EXIT_OK


def cmd_herglotz(args, tol):
    data = load_spectral(args.inp)
    try:
        res = herglotz_decompose(data, args.flavor, tol)
    except LanczosBreakdown as exc:
        print(f"LanczosBreakdown: {exc}")
        return EXIT_INVALID
    _emit({
        "C": matrix_to_json(res.C),
        "poles": [float(x) for x in res.mu],
        "D": [matrix_to_json(d) for d in res.D],
        "rank_count": res.rank_count,
        "expected_rank": res.expected_rank,
        "cancellation": res.cancellation,
    })
    return EXIT_OK


def max_block_deviation(op, other):
    devs = [
        np.linalg.norm(x - y) / max(np.linalg.norm(x), 1e-300)
        for x, y in zip(list(op.b) + list(op.a), list(other.b) + list(other.a))
    ]
    return max(devs, default=0.0)


def cmd_roundtrip(args, tol):
    op = load_operator(args.inp, tol)
    if op.flavor is Flavor.GENERAL:
        raise SchemaError("roundtrip needs an operator of flavor splus or lplus")
    data = forward_map(op, tol)
    back = inverse_map(data, op.flavor, tol)
    dev = max_block_deviation(op, back)
    ok = dev <= args.tol
    print(f"max blockwise relative deviation: {dev:.3e} (tol {args.tol:.1e}) {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_gen(args, tol):
    op = gen_operator(args.m, args.p, args.flavor, args.seed, tol=tol)
    save_operator(op, args.out)
    if args.spectral:
        save_spectral(forward_map(op, tol), args.spectral)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cluster-tol", type=float, default=None,
                        help=f"eigenvalue clustering tolerance (default {DEFAULT_TOLERANCES.cluster_tol})")
    common.add_argument("--rank-tol", type=float, default=None,
                        help=f"relative rank threshold (default {DEFAULT_TOLERANCES.rank_tol})")
    common.add_argument("--tame-tol", type=float, default=None,
                        help=f"tameness threshold (default {DEFAULT_TOLERANCES.tame_tol})")

    parser = argparse.ArgumentParser(prog="blockjacobi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    flavors = [Flavor.SPLUS.value, Flavor.LPLUS.value]

    p = sub.add_parser("forward", parents=[common], help="operator file -> spectral file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("inverse", parents=[common], help="spectral file -> operator file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--flavor", choices=flavors, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("validate", parents=[common], help="check spectral data admissibility")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tame", parents=[common], help="p-tameness and polynomial obstruction")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--p", type=int, default=None)
    p.set_defaults(func=cmd_tame)

    p = sub.add_parser("mfun", parents=[common], help="evaluate M(z) or M_n(z)")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--z", type=_parse_z, required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--op", default=None)
    p.set_defaults(func=cmd_mfun)

    p = sub.add_parser("herglotz", parents=[common], help="Herglotz form of -M^{-1}")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--flavor", choices=flavors, required=True)
    p.set_defaults(func=cmd_herglotz)

    p = sub.add_parser("roundtrip", parents=[common], help="forward then inverse on an operator")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("gen", parents=[common], help="random operator (and its spectral data)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--flavor", choices=flavors, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--spectral", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, _tolerances(args))
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BlockJacobiError as exc:
        print(f"{type(exc).__name__}: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
