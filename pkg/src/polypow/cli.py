"""Command-line front end: instance generation, the three power commands,
operator reports, and the benchmark harness.

Exit codes: 0 success, 2 parse error, 3 precondition violation, 4
verification mismatch, 5 internal error.  The default prime can be
overridden by --prime or the POLYPOW_PRIME environment variable; instance
files carry their own prime in the header.

Instances are generated from SplitMix64, a fixed 64-bit counter-based
generator, so a (kind, r, d, seed, prime) tuple produces identical bytes on
every platform; uniform residues are drawn by rejection sampling.
"""

import argparse
import hashlib
import os
import sys
import time
from dataclasses import dataclass

from . import formats
from .errors import ParseError, PolypowError, PreconditionError, VerificationError
from .ff import DEFAULT_PRIME, Fp
from .holo import CFiniteSpec
from .power import binpow_matrix, bivmodpow, modpow_baseline, polmatpow
from .seqterm import (
    generic_operator_degree_n,
    genfunc,
    get_recipe,
    seq_term_ct,
)
from .telescope import telescoper_from_recipe, telescoper_symbolic
from .upoly import Poly
from .ypoly import BiPoly, PolyMatrix

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_MISMATCH = 4
EXIT_INTERNAL = 5

BENCH_STAGES = ("BP", "CT", "IT", "UR")


@dataclass
class BenchRecord:
    """One benchmark measurement; stage is BP, CT, IT, UR or TOTAL."""

    r: int
    d: int
    N: int
    seed: int
    stage: str
    time_ns: int
    prime: int
    ok: bool

    def csv_row(self):
        return (
            f"{self.r},{self.d},{self.N},{self.seed},{self.stage},"
            f"{self.time_ns},{self.prime},{'true' if self.ok else 'false'}"
        )


class SplitMix64:
    """The standard 64-bit SplitMix generator; state advances by a fixed odd constant."""

    MASK = (1 << 64) - 1

    def __init__(self, seed):
        self.state = seed & self.MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, bound):
        """Uniform value in [0, bound) by rejection, exactly reproducible."""
        limit = ((1 << 64) // bound) * bound
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound


def _rand_poly(rng, f, d):
    return Poly(f, [rng.below(f.p) for _ in range(d + 1)])


def gen_instance(kind, r, d, seed, f):
    """Deterministic pseudorandom instance text for the given cell."""
    if r < 1 or d < 0:
        raise PreconditionError("need r >= 1 and d >= 0")
    rng = SplitMix64(seed)
    if kind == "matrix":
        rows = [[_rand_poly(rng, f, d) for _ in range(r)] for _ in range(r)]
        return formats.matrix_to_text(PolyMatrix(f, rows))
    if kind == "spec":
        cs = [_rand_poly(rng, f, d) for _ in range(r)]
        inits = [_rand_poly(rng, f, d) for _ in range(r)]
        return formats.spec_to_text(CFiniteSpec(f, cs, inits))
    if kind == "bivariate":
        while True:
            cy = [_rand_poly(rng, f, d) for _ in range(r)] + [Poly.one(f)]
            p_mod = BiPoly(f, cy)
            if not p_mod.coeff(0).is_zero():
                break
        q_base = BiPoly(f, [_rand_poly(rng, f, d) for _ in range(r)])
        return formats.bivariate_to_text(p_mod, q_base)
    raise PreconditionError(f"unknown instance kind {kind!r}")


def _field_from_args(args):
    if getattr(args, "prime", None):
        return Fp(args.prime)
    env = os.environ.get("POLYPOW_PRIME")
    if env:
        return Fp(int(env))
    return Fp(DEFAULT_PRIME)


def _read(path):
    try:
        with open(path, "r", encoding="ascii") as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e


def _write(path, text):
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _hash_text(text):
    return hashlib.sha256(text.encode("ascii")).hexdigest()


def cmd_gen(args):
    f = _field_from_args(args)
    text = gen_instance(args.kind, args.r, args.d, args.seed, f)
    _write(args.out, text)
    return EXIT_OK


def cmd_matpow(args):
    m = formats.matrix_from_text(_read(args.infile))
    result = polmatpow(m, args.N) if args.method == "ct" else binpow_matrix(m, args.N)
    if args.verify:
        other = binpow_matrix(m, args.N) if args.method == "ct" else polmatpow(m, args.N)
        if result != other:
            sys.stderr.write("verification mismatch between ct and binary methods\n")
            return EXIT_MISMATCH
    text = formats.matrix_to_text(result)
    _write(args.out, f"sha256 {_hash_text(text)}\n" if args.hash else text)
    return EXIT_OK


def cmd_seqterm(args):
    spec = formats.spec_from_text(_read(args.infile))
    result = (
        seq_term_ct(spec, args.N)
        if args.method == "ct"
        else spec.iterate(args.N)
    )
    if args.verify:
        other = spec.iterate(args.N) if args.method == "ct" else seq_term_ct(spec, args.N)
        if result != other:
            sys.stderr.write("verification mismatch between ct and iterative methods\n")
            return EXIT_MISMATCH
    text = formats.poly_to_line(result) + "\n"
    _write(args.out, f"sha256 {_hash_text(text)}\n" if args.hash else text)
    return EXIT_OK


def cmd_bivmodpow(args):
    p_mod, q_base = formats.bivariate_from_text(_read(args.infile))
    result = bivmodpow(p_mod, q_base, args.N, method=args.method)
    if args.verify:
        other = modpow_baseline(p_mod, q_base, args.N)
        if result != other:
            sys.stderr.write("verification mismatch against the baseline\n")
            return EXIT_MISMATCH
    text = "\n".join(formats.bipoly_to_lines(result)) + "\n"
    _write(args.out, f"sha256 {_hash_text(text)}\n" if args.hash else text)
    return EXIT_OK


def spec_of_matrix(m):
    """Top-right-entry sequence of the powers of a matrix.

    The recurrence comes from the characteristic polynomial; the initial
    terms are read off I, M, ..., M^(r-1).
    """
    from .ypoly import charpoly

    r = m.r
    chi = charpoly(m)
    cs = [-chi.coeff(i) for i in range(r)]
    acc = PolyMatrix.identity(m.f, r)
    inits = []
    for _ in range(r):
        inits.append(acc.rows[0][r - 1] if r > 1 else acc.rows[0][0])
        acc = acc * m
    return CFiniteSpec(m.f, cs, inits)


def _spec_of_input(text, kind="auto"):
    """Sequence spec from either a spec file or a matrix file.

    A 2 x 2 matrix file and an order-2 spec file have the same line count,
    so "auto" prefers the matrix reading there; pass kind explicitly to
    override.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    toks = lines[0].split()
    if len(toks) != 3:
        raise ParseError("expected header line 'p r d'")
    r = int(toks[1])
    nbody = len(lines) - 1
    if kind == "spec" or (kind == "auto" and nbody == 2 * r and nbody != r * r):
        return formats.spec_from_text(text)
    if kind == "matrix" or (kind == "auto" and nbody == r * r):
        return spec_of_matrix(formats.matrix_from_text(text))
    raise ParseError("input is neither a spec file nor a matrix file")


def cmd_telescope(args):
    spec = _spec_of_input(_read(args.infile), kind=args.kind)
    u = genfunc(spec)
    if args.symbolic_n:
        op = telescoper_symbolic(u, generic_operator_degree_n(spec.r))
        lines = [f"order {op.order} deg_n {op.degree_n()} deg_x {op.degree_x()}"]
        for i, c in enumerate(op.param_coeffs):
            lines.append(f"coeff {i} deg_n {c.degree_y}")
            lines.extend(formats.poly_to_line(q) for q in c.cy)
    else:
        lam = args.N if args.N is not None else 1 << 20
        op = telescoper_from_recipe(get_recipe(spec), lam % spec.f.p)
        lines = [f"order {op.order} deg_n 0 deg_x {op.degree_x()}"]
        lines.extend(formats.poly_to_line(q) for q in op.coeffs)
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _time_once(fn):
    t0 = time.perf_counter_ns()
    fn()
    return time.perf_counter_ns() - t0


VERIFY_BELOW = 1 << 12  # bench cells up to here are checked against the baseline


def _bench_cell(f, r, d, N, seed, repeat):
    """One benchmark cell: stage nanoseconds plus a small-N verification flag."""
    text = gen_instance("matrix", r, d, seed, f)
    m = formats.matrix_from_text(text)
    spec = _spec_of_input(text)
    get_recipe(spec)  # keep cache warm-up out of the timed region

    best = {}
    bp_result = None
    for _ in range(repeat):
        t0 = time.perf_counter_ns()
        bp_result = binpow_matrix(m, N)
        bp_ns = time.perf_counter_ns() - t0
        timings = {}
        ct_result = seq_term_ct(spec, N, force_ct=True, timings=timings)
        for stage, ns in (("BP", bp_ns), ("CT", timings["CT"]),
                          ("IT", timings["IT"]), ("UR", timings["UR"])):
            best[stage] = min(best.get(stage, ns), ns)
    ok = True
    if N <= VERIFY_BELOW:
        top_right = bp_result.rows[0][r - 1] if r > 1 else bp_result.rows[0][0]
        ok = ct_result == top_right
    return best, ok


def cmd_bench(args):
    f = _field_from_args(args)
    records = []
    summary = ["r,d,N,seed,bp_ns,ct_ns,it_ns,ur_ns,speedup"]
    for r in args.r_list:
        for d in args.d_list:
            for N in args.n_list:
                if N * d + 64 >= f.p:
                    for stage in BENCH_STAGES:
                        records.append(BenchRecord(r, d, N, 0, stage, 0, f.p, False))
                    continue
                for seed in range(args.seeds):
                    repeat = 3 if N >= (1 << 16) else 1
                    try:
                        best, ok = _bench_cell(f, r, d, N, seed, repeat)
                    except PolypowError:
                        best, ok = {stage: 0 for stage in BENCH_STAGES}, False
                    for stage in BENCH_STAGES:
                        records.append(
                            BenchRecord(r, d, N, seed, stage, best[stage], f.p, ok)
                        )
                    if ok:
                        denom = best["IT"] + best["UR"]
                        speedup = best["BP"] / denom if denom else float("inf")
                        summary.append(
                            f"{r},{d},{N},{seed},{best['BP']},{best['CT']},"
                            f"{best['IT']},{best['UR']},{speedup:.3f}"
                        )
    rows = ["r,d,N,seed,stage,time_ns,prime,ok"] + [rec.csv_row() for rec in records]
    _write(args.csv, "\n".join(rows) + "\n")
    if args.csv:
        _write(args.csv + ".summary.csv", "\n".join(summary) + "\n")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="polypow",
        description="N-th powers of polynomial matrices and friends, in linear time",
    )
    ap.add_argument("--prime", type=int, default=None, help="field prime (default: shipped 49-bit prime or POLYPOW_PRIME)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a deterministic pseudorandom instance")
    g.add_argument("--kind", choices=("matrix", "spec", "bivariate"), required=True)
    g.add_argument("-r", type=int, required=True)
    g.add_argument("-d", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=cmd_gen)

    for name, fn in (("matpow", cmd_matpow), ("seqterm", cmd_seqterm), ("bivmodpow", cmd_bivmodpow)):
        c = sub.add_parser(name, help=f"compute {name} (--method ct|binary)")
        c.add_argument("--in", dest="infile", required=True)
        c.add_argument("-N", type=int, required=True)
        c.add_argument("--out", default=None)
        c.add_argument("--method", choices=("ct", "binary"), default="ct")
        c.add_argument("--verify", action="store_true", help="also run the other method and compare")
        c.add_argument("--hash", action="store_true", help="emit a content hash instead of the result")
        c.set_defaults(fn=fn)

    t = sub.add_parser("telescope", help="derive and print the annihilating operator")
    t.add_argument("--in", dest="infile", required=True)
    t.add_argument("--symbolic-n", action="store_true", dest="symbolic_n")
    t.add_argument("-N", type=int, default=None, help="parameter value for the scalar operator")
    t.add_argument(
        "--kind", choices=("auto", "matrix", "spec"), default="auto",
        help="input interpretation (2x2 matrix and order-2 spec files look alike)",
    )
    t.add_argument("--out", default=None)
    t.set_defaults(fn=cmd_telescope)

    b = sub.add_parser("bench", help="stage benchmark over a grid, CSV output")
    b.add_argument("--r-list", type=int, nargs="+", required=True)
    b.add_argument("--d-list", type=int, nargs="+", required=True)
    b.add_argument("--n-list", type=int, nargs="+", required=True)
    b.add_argument("--seeds", type=int, default=1)
    b.add_argument("--csv", default=None)
    b.add_argument("--parallel", action="store_true", help="reserved; cells always run sequentially for stable timings")
    b.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except ParseError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except PreconditionError as e:
        sys.stderr.write(f"precondition violated: {e}\n")
        return EXIT_PRECONDITION
    except VerificationError as e:
        sys.stderr.write(f"verification failed: {e}\n")
        return EXIT_MISMATCH
    except PolypowError as e:
        sys.stderr.write(f"internal error: {e}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
