"""Command-line front end: synthesis, verification, rigidity search,
batch sums, disjointness stats, matmul cost, and benchmark CSV sweeps.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 cap
exceeded.  Randomized commands take --seed (default 0) and use the
package's fixed 64-bit PRNG so output is byte-stable across platforms.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import circuits, disjoint, mmbridge, rigidity, sparse, vf
from .errors import (
    CapExceeded,
    DimensionCapExceeded,
    ExceedsBound,
    KronRigidError,
    WorkCapExceeded,
)
from .fields import FieldCtx

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def _base_factorization(name: str, ctx: FieldCtx):
    """Resolve a base name to (two-factorization, digits it covers).

    'auto' picks the base with the lowest wire-growth exponent
    c = log_q(nnz(B) nnz(C)) - 2 among the built-in Hadamard bases,
    which is h4.
    """
    if name == "auto":
        name = "h4"
    if name == "h2":
        dec = rigidity.h2_rank1_decomposition(ctx)
        return circuits.two_factor_from_rigidity(dec), 2
    if name == "h3cube":
        h1 = rigidity.hadamard_matrix(1, ctx)
        dec = rigidity.cube_rank1_decomposition(h1)
        return circuits.two_factor_from_rigidity(dec), 3
    if name == "h4":
        dec = rigidity.h4_rank1_decomposition(ctx)
        return circuits.two_factor_from_rigidity(dec), 4
    if name.startswith("js:"):
        m = int(name.split(":", 1)[1])
        return disjoint.js_factorization(m, ctx), m
    raise ValueError(f"unknown base {name!r}")


def c_from_tf(tf) -> float:
    q = tf.q
    return math.log(tf.B.nnz * tf.C.nnz, q) - 2


def _synth_circuit(family: str, n: int, depth: int, base: str, ctx: FieldCtx):
    if family == "disjointness" and not base.startswith("js"):
        base = f"js:{max(1, n // depth)}"
    tf, digits = _base_factorization(base, ctx)
    if n % digits:
        raise ValueError(
            f"base {base} covers {digits} digits; n = {n} is not a multiple"
        )
    units = n // digits
    circ = circuits.symmetrized_depth_d(tf, depth)
    if units != depth:
        if units % depth:
            raise ValueError(
                f"depth {depth} must divide {units} base units for lifting"
            )
        circ = circuits.lift_power(circ, units)
    return circ, tf


def _family_target_dense(family: str, n: int, ctx: FieldCtx):
    import numpy as np

    if family == "hadamard":
        return circuits.hadamard_dense_np(n)
    if family == "disjointness":
        return np.asarray(disjoint.disjointness_csr(n).todense())
    raise ValueError(f"unknown family {family!r}")


def cmd_synth(args) -> int:
    ctx = FieldCtx(args.field)
    circ, tf = _synth_circuit(args.family, args.n, args.depth, args.base, ctx)
    n2 = int(math.log2(circ.rows))
    if n2 % args.depth == 0:
        trivial = circuits.butterfly_wire_count(2, n2, args.depth)
    else:
        trivial = round(args.depth * circ.rows * 2 ** (n2 / args.depth))
    c = c_from_tf(tf)
    bound = args.depth * circ.rows ** (1 + c / args.depth)
    print(
        f"family={args.family} n={args.n} d={args.depth} wires={circ.wires} "
        f"trivial={trivial} bound={bound:.1f}"
    )
    if args.out:
        circuits.save_circuit(circ, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    circ = circuits.load_circuit(args.circuit)
    dense = _family_target_dense(args.family, args.n, circ.ctx)
    ok = circuits.verify_against_dense(circ, dense)
    print(f"equal={ok} wires={circ.wires} depth={circ.depth}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_rigidity(args) -> int:
    m = sparse.load_matrix(args.matrix)
    try:
        minimum, witness = rigidity.brute_force_rigidity(
            m, args.rank, args.max_changes
        )
    except ExceedsBound:
        print(f"no decomposition with at most {args.max_changes} changes")
        return EXIT_VERIFY
    print(minimum)
    if args.out:
        rigidity.save_witness(witness, args.out)
    return EXIT_OK


def cmd_batch(args) -> int:
    table = vf.load_truthtable(args.f)
    with open(args.points) as fh:
        points = vf.parse_points(fh.read())
    answers, ops = vf.batch_sums(table, points, convention=args.convention)
    width = table.n
    for p in points:
        print(f"{p:0{width}b} {sparse._format_value(answers[p].value)}")
    print(f"adds={ops['adds']} mults={ops['mults']}", file=sys.stderr)
    return EXIT_OK


def cmd_disjoint_stats(args) -> int:
    report = disjoint.dense_removal(args.n, args.k, method=args.method)
    print("n,k,removed,residual_row_nnz,residual_col_nnz,bound")
    print(report.as_csv_row())
    return EXIT_OK


def cmd_mmcost(args) -> int:
    ctx = FieldCtx(args.field)
    if args.q != 2:
        raise ValueError("only q = 2 bases are wired up in the CLI")
    h1 = rigidity.hadamard_matrix(1, ctx)
    backend = (
        mmbridge.NaiveBackend()
        if args.backend == "naive"
        else mmbridge.StrassenBackend()
    )
    report = mmbridge.mm_cost_report([h1] * args.n, args.k, backend)
    print("q,n,k,backend,mults,adds,dense_mults")
    print(
        f"{args.q},{args.n},{args.k},{args.backend},"
        f"{report['mults']},{report['adds']},{report['dense_mults']}"
    )
    if args.k >= 3:
        expo = args.k * math.log(args.k, args.k - 1)
        print(f"# rectangular exponent k*log_(k-1)(k) = {expo:.4f}", file=sys.stderr)
    return EXIT_OK


def _parse_range(spec: str):
    if ":" in spec:
        parts = [int(x) for x in spec.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return [int(x) for x in spec.split(",")]


def cmd_bench(args) -> int:
    ctx = FieldCtx(args.field)
    tf, digits = _base_factorization(args.base, ctx)
    c = c_from_tf(tf)
    print("family,n,N,d,base,wires,trivial_wires,formula_bound,ratio_nlogn")
    for n in _parse_range(args.n):
        for d in _parse_range(args.depth):
            if n % digits or (n // digits) % d:
                continue
            units = n // digits
            per = circuits.symmetrized_factor_nnz(tf, d)
            wires = sum(b ** (units // d) for b in per)
            big_n = tf.q**units
            n2 = int(math.log2(big_n))
            trivial = (
                circuits.butterfly_wire_count(2, n2, d)
                if n2 % d == 0
                else d * big_n * 2 ** (n2 / d)
            )
            bound = d * big_n ** (1 + c / d)
            ratio = wires / (big_n * math.log2(big_n))
            print(
                f"{args.family},{n},{big_n},{d},{args.base},{wires},"
                f"{trivial},{bound:.1f},{ratio:.6f}"
            )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kronrigid",
        description="Sparse circuit synthesis for Kronecker-power transforms",
    )
    ap.add_argument("--seed", type=int, default=0, help="PRNG seed")
    ap.add_argument("--workers", type=int, default=1, help="reserved; always 1")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a circuit")
    p.add_argument("--family", choices=["hadamard", "disjointness"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--base", default="auto")
    p.add_argument("--field", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="verify a circuit file against a family")
    p.add_argument("--circuit", required=True)
    p.add_argument("--family", choices=["hadamard", "disjointness"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rigidity", help="brute-force minimum changes to rank r")
    p.add_argument("--matrix", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--max-changes", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rigidity)

    p = sub.add_parser("batch", help="batched sums of f over point pairs")
    p.add_argument("--f", required=True, help="truth-table file")
    p.add_argument("--points", required=True, help="bitstring-per-line file")
    p.add_argument("--convention", choices=["or", "and"], default="or")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("disjoint-stats", help="dense row/col removal stats")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=["auto", "scan", "count"], default="auto")
    p.set_defaults(func=cmd_disjoint_stats)

    p = sub.add_parser("mmcost", help="matmul-round evaluation cost")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--backend", choices=["naive", "strassen"], default="naive")
    p.add_argument("--field", type=int, default=5)
    p.set_defaults(func=cmd_mmcost)

    p = sub.add_parser("bench", help="CSV sweep over n/depth grids")
    p.add_argument("--family", choices=["hadamard", "disjointness"], required=True)
    p.add_argument("--n", required=True, help="a:b:step or comma list")
    p.add_argument("--depth", required=True, help="comma list")
    p.add_argument("--base", default="h4")
    p.add_argument("--field", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (CapExceeded, DimensionCapExceeded, WorkCapExceeded) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, OSError, KronRigidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
