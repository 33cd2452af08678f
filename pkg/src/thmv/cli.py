"""Command-line driver: gen, verify, bench, fit.

Exit codes: 0 success, 1 check/threshold failure, 2 usage error. The
default seed is 0 unless the THMV_SEED environment variable overrides it;
an explicit --seed always wins.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from typing import Sequence

from .costmodel import fit_exponent
from .errors import CapError, FitError, ThmvError
from .genrand import GenConfig, gen_type1, gen_type2
from .instancefile import Instance, parse, serialize
from .khatri_rao import FactorList, gram, kr_materialize
from .matrix import DenseMatrix, matmul_dense, transpose
from .reference import ref_type1, ref_type2
from .semiring import get_semiring
from .type1 import METHOD_EAGER, METHOD_LAZY, Type1Oracle
from .type2 import SliceQuery, Type2Oracle

BENCH_COLUMNS = [
    "type", "method", "phase", "n", "k", "d", "tau", "semiring", "seed",
    "nnz", "adds", "muls", "wall_ns",
]

SCHOOLBOOK_NOTE = (
    "note: products are schoolbook; fast-rectangular-multiply costs are "
    "not measured - out of scope"
)


def _default_seed() -> int:
    env = os.environ.get("THMV_SEED")
    return int(env) if env else 0


# ---------------------------------------------------------------------------
# gen


def _instance_from_cfg(type_: int, cfg: GenConfig) -> Instance:
    if type_ == 1:
        M, Vs, Ps = gen_type1(cfg)
        return Instance(
            type=1, semiring=cfg.semiring, n=cfg.n, k=cfg.k, tau=cfg.tau,
            M=M, Vs=list(Vs), Ps=list(Ps),
        )
    Vs, P = gen_type2(cfg)
    d = cfg.d if cfg.d is not None else cfg.n
    return Instance(
        type=2, semiring=cfg.semiring, n=cfg.n, k=cfg.k, tau=cfg.tau, d=d,
        Vs=list(Vs), P=P,
    )


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = GenConfig(
        n=args.n, k=args.k, tau=args.tau, semiring=args.semiring,
        seed=args.seed, d=args.d, density=args.density,
        shared_hint_support=not args.independent_hints,
    )
    inst = _instance_from_cfg(args.type, cfg)
    text = serialize(inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# verify


class _CheckTally:
    def __init__(self) -> None:
        self.ok = 0
        self.bad = 0
        self.counterexample: str | None = None

    def record(self, passed: bool, dump: str | None = None) -> None:
        if passed:
            self.ok += 1
        else:
            self.bad += 1
            if self.counterexample is None:
                self.counterexample = dump

    def line(self, name: str) -> str:
        total = self.ok + self.bad
        return f"check {name}: {self.ok}/{total} ok"


def _verify_type1_instance(inst: Instance, queries: Sequence[int], flip: bool) -> tuple[bool, str]:
    o1 = Type1Oracle(inst.M, inst.Vs, inst.tau, METHOD_EAGER, strict=False)
    o1.hint(inst.Ps)
    o2 = Type1Oracle(inst.M, inst.Vs, inst.tau, METHOD_LAZY, strict=False)
    o2.hint(inst.Ps)
    for i in queries:
        a1 = o1.query(i)
        a2 = o2.query(i)
        ref = ref_type1(inst.M, inst.Vs, inst.Ps, i)
        if flip:
            data = a2.data.copy()
            data[0] = a2.semiring.one if int(data[0]) == 0 else a2.semiring.zero
            a2 = type(a2)(a2.semiring, data, validate=False)
            flip = False
        if not (a1 == a2 == ref):
            bad = Instance(
                type=1, semiring=inst.semiring, n=inst.n, k=inst.k, tau=inst.tau,
                M=inst.M, Vs=inst.Vs, Ps=inst.Ps, queries=[i],
            )
            return False, serialize(bad)
    return True, ""


def _all_slice_queries(n: int, k: int, sample_rng=None) -> list[SliceQuery]:
    """One query per direction subset; indices exhaustive at tiny n or
    drawn from sample_rng when provided."""
    import itertools

    out = []
    for s in range(k + 1):
        for dirs in itertools.combinations(range(1, k + 1), s):
            if sample_rng is None:
                for idxs in itertools.product(range(1, n + 1), repeat=s):
                    out.append(SliceQuery(list(zip(dirs, idxs))))
            else:
                idxs = [int(sample_rng.integers(1, n + 1)) for _ in dirs]
                out.append(SliceQuery(list(zip(dirs, idxs))))
    return out


def _verify_type2_instance(inst: Instance, queries: Sequence[SliceQuery], flip: bool) -> tuple[bool, str]:
    o1 = Type2Oracle(inst.Vs, inst.tau, METHOD_EAGER, strict=False)
    o1.hint(inst.P)
    o2 = Type2Oracle(inst.Vs, inst.tau, METHOD_LAZY, strict=False)
    o2.hint(inst.P)
    for q in queries:
        a1 = o1.query(q)
        a2 = o2.query(q)
        ref = ref_type2(inst.Vs, inst.P, q)
        if flip:
            data = a2.data.data.copy()
            sr = a2.data.semiring
            data[0, 0] = sr.one if int(data[0, 0]) == 0 else sr.zero
            a2 = type(a2)(a2.n, a2.row_dirs, a2.col_dirs,
                          DenseMatrix(sr, data, validate=False))
            flip = False
        if not (a1 == a2 == ref):
            bad = Instance(
                type=2, semiring=inst.semiring, n=inst.n, k=inst.k, tau=inst.tau,
                d=inst.d, Vs=inst.Vs, P=inst.P, queries=[q],
            )
            return False, serialize(bad)
    return True, ""


def _verify_gram_trial(sr_name: str, rng) -> bool:
    sr = get_semiring(sr_name)
    k = int(rng.integers(1, 4))
    dims = [int(rng.integers(1, 5)) for _ in range(k)]
    da = int(rng.integers(1, 5))
    db = int(rng.integers(1, 5))

    def rand_factor(rows, cols):
        if sr.name == "bool":
            return DenseMatrix(sr, (rng.random((rows, cols)) < 0.5).astype("int8"))
        return DenseMatrix(sr, rng.integers(0, 4, size=(rows, cols)).astype(object))

    As = FactorList([rand_factor(nl, da) for nl in dims])
    Bs = FactorList([rand_factor(nl, db) for nl in dims])
    fast = gram(As, Bs)
    direct = matmul_dense(transpose(kr_materialize(As)), kr_materialize(Bs))
    return fast == direct


def cmd_verify(args: argparse.Namespace) -> int:
    import numpy as np

    if args.instance:
        return _verify_single_file(args)
    trials = args.trials
    seed = args.seed
    flip_left = 1 if args.self_test_negative else 0
    tallies = {
        "gram_factorization": _CheckTally(),
        "type1_triple_equivalence": _CheckTally(),
        "type2_triple_equivalence": _CheckTally(),
    }
    rng = np.random.default_rng(seed)
    for sr_name in ("bool", "nat"):
        for _ in range(trials):
            tallies["gram_factorization"].record(_verify_gram_trial(sr_name, rng))
    trial_idx = 0
    for sr_name in ("bool", "nat"):
        for n in (4, 8, 16):
            for k in (1, 2, 3):
                for tau in (0.5, 1.0):
                    for t in range(trials):
                        cfg = GenConfig(n=n, k=k, tau=tau, semiring=sr_name,
                                        seed=seed + trial_idx)
                        trial_idx += 1
                        inst = _instance_from_cfg(1, cfg)
                        flip = flip_left > 0
                        ok, dump = _verify_type1_instance(
                            inst, range(1, n + 1), flip)
                        if flip:
                            flip_left -= 1
                        tallies["type1_triple_equivalence"].record(ok, dump)
    for sr_name in ("bool", "nat"):
        for n in (2, 3, 4):
            for k in (2, 3):
                for tau in (0.5, 1.0):
                    for t in range(trials):
                        cfg = GenConfig(n=n, k=k, tau=tau, semiring=sr_name,
                                        seed=seed + trial_idx, d=n)
                        trial_idx += 1
                        inst = _instance_from_cfg(2, cfg)
                        queries = _all_slice_queries(n, k, sample_rng=rng)
                        ok, dump = _verify_type2_instance(inst, queries, False)
                        tallies["type2_triple_equivalence"].record(ok, dump)
    failed = False
    for name, tally in tallies.items():
        print(tally.line(name))
        if tally.bad:
            failed = True
    for tally in tallies.values():
        if tally.counterexample:
            print("counterexample:")
            sys.stdout.write(tally.counterexample)
            break
    print("result:", "FAIL" if failed else "PASS")
    return 1 if failed else 0


def _verify_single_file(args: argparse.Namespace) -> int:
    with open(args.instance) as fh:
        inst = parse(fh.read())
    if inst.type == 1:
        queries = inst.queries or list(range(1, inst.n + 1))
        ok, dump = _verify_type1_instance(inst, queries, args.self_test_negative)
        name = "type1_triple_equivalence"
    else:
        queries = inst.queries or _all_slice_queries(inst.n, inst.k)
        ok, dump = _verify_type2_instance(inst, queries, args.self_test_negative)
        name = "type2_triple_equivalence"
    print(f"check {name}: {'1/1' if ok else '0/1'} ok")
    if not ok and dump:
        print("counterexample:")
        sys.stdout.write(dump)
    print("result:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# bench


def _ladder(nmin: int, nmax: int) -> list[int]:
    def pow2(x: int) -> bool:
        return x > 0 and (x & (x - 1)) == 0

    if not (pow2(nmin) and pow2(nmax) and nmin <= nmax):
        raise ValueError("--nmin/--nmax must be powers of two with nmin <= nmax")
    out = []
    n = nmin
    while n <= nmax:
        out.append(n)
        n *= 2
    return out


def _bench_rows_type1(cfg: GenConfig, method: int, queries: int) -> list[dict]:
    M, Vs, Ps = gen_type1(cfg)
    oracle = Type1Oracle(M, Vs, cfg.tau, method, strict=True)
    oracle.hint(Ps)
    for t in range(queries):
        oracle.query((cfg.seed + t) % cfg.n + 1)
    rows = []
    for pc in oracle.phase_costs():
        rows.append({
            "type": 1, "method": pc.method, "phase": pc.phase, "n": pc.n,
            "k": pc.k, "d": pc.n, "tau": pc.tau, "semiring": cfg.semiring,
            "seed": cfg.seed, "nnz": Ps[0].nnz, "adds": pc.adds,
            "muls": pc.muls, "wall_ns": pc.wall_ns,
        })
    return rows


def _bench_rows_type2(cfg: GenConfig, method: int, queries: int) -> list[dict]:
    Vs, P = gen_type2(cfg)
    d = cfg.d if cfg.d is not None else cfg.n
    base = {
        "type": 2, "method": f"M{method}", "n": cfg.n, "k": cfg.k, "d": d,
        "tau": cfg.tau, "semiring": cfg.semiring, "seed": cfg.seed,
        "nnz": P.nnz,
    }
    try:
        oracle = Type2Oracle(Vs, cfg.tau, method, strict=True)
        oracle.hint(P)
        for t in range(queries):
            q = SliceQuery([(cfg.k, (cfg.seed + t) % cfg.n + 1)])
            oracle.query(q)
    except CapError:
        return [
            dict(base, phase=ph, adds="", muls="", wall_ns="")
            for ph in ("P1", "P2", "P3")
        ]
    return [
        dict(base, phase=pc.phase, adds=pc.adds, muls=pc.muls, wall_ns=pc.wall_ns)
        for pc in oracle.phase_costs()
    ]


def cmd_bench(args: argparse.Namespace) -> int:
    ns = _ladder(args.nmin, args.nmax)
    methods = [METHOD_EAGER, METHOD_LAZY] if args.method == "both" else [int(args.method)]
    rows = []
    t_start = time.perf_counter()
    for n in ns:
        for trial in range(args.trials):
            cfg = GenConfig(
                n=n, k=args.k, tau=args.tau, semiring=args.semiring,
                seed=args.seed + trial, d=(args.d if args.type == 2 else None),
                shared_hint_support=not args.independent_hints,
            )
            for method in methods:
                if args.type == 1:
                    rows.extend(_bench_rows_type1(cfg, method, args.queries))
                else:
                    rows.extend(_bench_rows_type2(cfg, method, args.queries))
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    elapsed = time.perf_counter() - t_start
    print(f"wrote {len(rows)} rows to {args.out} in {elapsed:.1f}s")
    print(SCHOOLBOOK_NOTE)
    return 0


# ---------------------------------------------------------------------------
# fit


def cmd_fit(args: argparse.Namespace) -> int:
    with open(args.csv, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != BENCH_COLUMNS:
            print(f"error: unexpected CSV columns {reader.fieldnames}", file=sys.stderr)
            return 2
        samples = []
        skipped = 0
        for row in reader:
            if int(row["type"]) != args.type:
                continue
            if row["method"] != f"M{args.method}":
                continue
            if row["phase"] != args.phase:
                continue
            if row["muls"] == "":
                skipped += 1
                continue
            samples.append((int(row["n"]), int(row["muls"])))
    if skipped:
        print(f"skipped {skipped} rows with omitted counts", file=sys.stderr)
    try:
        fit = fit_exponent(samples, drop_smallest=args.drop_smallest)
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"samples {len(fit.samples)}")
    print(f"slope {fit.slope:.6f}")
    print(f"intercept {fit.intercept:.6f}")
    print(f"r2 {fit.r2:.6f}")
    if args.plot:
        from .plots import render_fit_figure

        path = render_fit_figure(
            fit, args.plot,
            title=f"type {args.type} M{args.method} {args.phase} multiplications",
        )
        print(f"figure {path}")
    if args.expect is not None:
        ok = abs(fit.slope - args.expect) <= args.tol
        print(f"expect {args.expect} tol {args.tol} -> {'PASS' if ok else 'FAIL'}")
        return 0 if ok else 1
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thmv",
        description="three-phase hinted matrix-vector oracles: generate, "
        "verify, benchmark, and fit counted-cost exponents",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common_seed = dict(type=int, default=_default_seed(),
                       help="base RNG seed (default 0, or THMV_SEED)")

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--type", type=int, choices=(1, 2), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=None, help="type-2 width (default n)")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--semiring", choices=("bool", "nat"), default="bool")
    p.add_argument("--seed", **common_seed)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--independent-hints", action="store_true",
                   help="sample each hint's positions independently")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="equivalence sweeps against brute force")
    p.add_argument("--trials", type=int, default=100, help="trials per configuration")
    p.add_argument("--seed", **common_seed)
    p.add_argument("--instance", default=None, help="verify one instance file")
    p.add_argument("--self-test-negative", action="store_true",
                   help="flip one output bit to prove mismatches are caught")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run phase benchmarks, write CSV")
    p.add_argument("--type", type=int, choices=(1, 2), default=1)
    p.add_argument("--method", choices=("1", "2", "both"), default="both")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--nmin", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--queries", type=int, default=1, help="phase-3 queries per trial")
    p.add_argument("--semiring", choices=("bool", "nat"), default="bool")
    p.add_argument("--independent-hints", action="store_true")
    p.add_argument("--seed", **common_seed)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("fit", help="fit log2(muls) vs log2(n) from bench CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--type", type=int, choices=(1, 2), default=1)
    p.add_argument("--method", choices=("1", "2"), required=True)
    p.add_argument("--phase", choices=("P1", "P2", "P3"), required=True)
    p.add_argument("--drop-smallest", action="store_true",
                   help="drop samples at the smallest n before fitting")
    p.add_argument("--expect", type=float, default=None)
    p.add_argument("--tol", type=float, default=0.1)
    p.add_argument("--plot", default=None, help="write a log-log figure (PNG)")
    p.set_defaults(func=cmd_fit)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return args.func(args)
    except ThmvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
