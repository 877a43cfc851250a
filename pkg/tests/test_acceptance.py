"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one line "ACCEPTANCE <n> <name>: PASS|FAIL" (visible with
pytest -s or in failure output).  Timing-sensitive tests warm the compiled
kernels before measuring.
"""

import random
import time

import numpy as np

from polypow import Fp, Poly
from polypow.cli import gen_instance, _spec_of_input
from polypow.ff import DEFAULT_PRIME
from polypow import formats
from polypow.holo import CFiniteSpec, detect_problem_indices, ode_to_rec
from polypow.power import binpow_matrix, bivmodpow, modpow_baseline, polmatpow
from polypow.ratfun import RatFun
from polypow.seqterm import (
    fib_closed_form,
    fibonacci_spec,
    generic_operator_degree_n,
    generic_operator_degree_x,
    genfunc,
    get_recipe,
    seq_term_ct,
)
from polypow.telescope import (
    DiffOp,
    param_reduce,
    telescoper_at,
    telescoper_from_recipe,
    telescoper_symbolic,
    verify_reduction,
)
from polypow.ypoly import PolyMatrix, YPoly, charpoly

F = Fp(DEFAULT_PRIME)


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num} {name}: {status}{(': ' + detail) if detail else ''}")
    return ok


def triple_geom_spec(f):
    c0 = Poly(f, [0, 0, 0, 2])
    c1 = Poly(f, [0, -2, -2, -1])
    c2 = Poly(f, [2, 1, 1])
    return CFiniteSpec(
        f, [c0, c1, c2], [Poly.const(f, 3), Poly(f, [2, 1, 1]), Poly(f, [4, 0, 1, 0, 1])]
    )


def test_criterion_1_fibonacci_exactness():
    f = F
    spec = fibonacci_spec(f)
    seq_term_ct(spec, 64, force_ct=True)  # warm kernels outside the timed region
    t0 = time.time()
    # independent iterative oracle: rolling numpy coefficient arrays,
    # F_n held in exactly n slots (degree n-1)
    prev = np.zeros(0, dtype=np.int64)  # F_0 = 0
    cur = np.ones(1, dtype=np.int64)  # F_1 = 1
    ok = True
    for n in range(1, 2001):
        got = seq_term_ct(spec, n)
        want = Poly._wrap(f, cur.copy())
        if got != want or got != fib_closed_form(n, f):
            ok = report(1, "fibonacci-exactness", False, f"mismatch at N={n}")
            break
        nxt = np.zeros(n + 1, dtype=np.int64)
        nxt[1:] = cur
        nxt[: prev.shape[0]] += prev
        np.mod(nxt, f.p, out=nxt)
        prev, cur = cur, nxt
    else:
        elapsed = time.time() - t0
        ok = (
            seq_term_ct(spec, 5) == Poly(f, [1, 0, 3, 0, 1])
            and seq_term_ct(spec, 4) == Poly(f, [0, 2, 0, 1])
            and elapsed < 10.0
        )
        report(1, "fibonacci-exactness", ok, f"N=1..2000 exact, {elapsed:.2f}s (< 10 s)")
    assert ok


def test_criterion_2_telescoper_values():
    f = F
    lam = 987654321 % f.p
    u = genfunc(fibonacci_spec(f))
    op = telescoper_at(u, lam)
    want = DiffOp(
        f,
        [Poly.const(f, 1 - lam * lam), Poly(f, [0, 3]), Poly(f, [4, 0, 1])],
    )
    ok_op = op == want
    rec = ode_to_rec(op)
    k = Poly.x(f)
    one = Poly.one(f)
    num = (Poly.const(f, lam) + k + one) * (Poly.const(f, lam) - k - one)
    den = (k + one) * (k + Poly.const(f, 2)) * Poly.const(f, 4)
    ok_rec = (
        rec.s == 2
        and rec.k_coeffs[1].is_zero()
        and RatFun(-rec.k_coeffs[0], rec.k_coeffs[2]) == RatFun(num, den)
    )
    ok = report(
        2, "telescoper-values", ok_op and ok_rec,
        "operator = (x^2+4)d^2+3xd+(1-N^2); ratio = (N+k+1)(N-k-1)/(4(k+1)(k+2))",
    )
    assert ok


def test_criterion_3_singular_case():
    f = F
    spec = triple_geom_spec(f)
    ok = True
    detail = []
    for n in (10, 100, 1000):
        want = [0] * (2 * n + 1)
        want[0] = pow(2, n, f.p)
        want[n] = 1
        want[2 * n] = 1
        w = Poly(f, want)
        if seq_term_ct(spec, n) != w or seq_term_ct(spec, n, force_ct=True) != w:
            ok = False
            detail.append(f"u_{n} wrong")
        op = telescoper_from_recipe(get_recipe(spec), n % f.p)
        rec = ode_to_rec(op)
        k = Poly.x(f)
        target = k * (k - Poly.const(f, n)) * (k - Poly.const(f, 2 * n))
        if rec.s != 0 or rec.k_coeffs[0].monic() != target.monic():
            ok = False
            detail.append(f"recurrence at N={n} is not (2N-k)(N-k)k c_k")
        if detect_problem_indices(rec, 3 * n) != [0, n, 2 * n]:
            ok = False
            detail.append(f"problem indices at N={n} wrong")
    report(3, "singular-case", ok, "; ".join(detail) or "u_N = 2^N + x^N + x^2N for N in {10,100,1000}")
    assert ok


def test_criterion_4_oracle_equivalence():
    f = F
    t0 = time.time()
    checked = 0
    failures = []
    for r in (2, 3, 4):
        for d in (1, 2, 3):
            for seed in range(10):
                mtext = gen_instance("matrix", r, d, seed, f)
                m = formats.matrix_from_text(mtext)
                p_mod, q_base = formats.bivariate_from_text(
                    gen_instance("bivariate", r, d, seed, f)
                )
                for N in (1, 16, 257, 1000, 4096):
                    if polmatpow(m, N) != binpow_matrix(m, N):
                        failures.append(("matpow", r, d, seed, N))
                    if bivmodpow(p_mod, q_base, N) != modpow_baseline(p_mod, q_base, N):
                        failures.append(("bivmodpow", r, d, seed, N))
                    checked += 2
    elapsed = time.time() - t0
    ok = not failures and elapsed < 300.0
    report(
        4, "oracle-equivalence", ok,
        f"{checked} comparisons, {len(failures)} mismatches, {elapsed:.1f}s (< 300 s)",
    )
    assert ok, failures[:5]


def test_criterion_5_operator_structure():
    f = F
    cells = [(2, 2), (2, 4), (3, 1), (3, 2), (4, 1)]
    ok = True
    details = []
    for r, d in cells:
        want = (r, generic_operator_degree_n(r), generic_operator_degree_x(r, d))
        hits = 0
        got_line = None
        for seed in range(5):
            spec = _spec_of_input(gen_instance("matrix", r, d, seed, f))
            op = telescoper_symbolic(genfunc(spec), generic_operator_degree_n(r))
            got = (op.order, op.degree_n(), op.degree_x())
            if got == want:
                hits += 1
            else:
                got_line = got
        cell_ok = hits >= 4
        ok = ok and cell_ok
        details.append(
            f"({r},{d}): {hits}/5 match {want}" + (f" [observed {got_line}]" if got_line else "")
        )
    report(5, "operator-structure", ok, "; ".join(details))
    assert ok, details


def _staged_run(spec, N, repeats):
    best = None
    for _ in range(repeats):
        t = {}
        seq_term_ct(spec, N, force_ct=True, timings=t)
        if best is None or t["UR"] < best["UR"]:
            best = t
    return best


def test_criterion_6_unrolling_linearity():
    f = F
    spec = _spec_of_input(gen_instance("matrix", 2, 2, 1, f))
    seq_term_ct(spec, 4096, force_ct=True)  # warm
    stages = {N: _staged_run(spec, N, 3) for N in (1 << 16, 1 << 18, 1 << 20)}
    r1 = stages[1 << 18]["UR"] / stages[1 << 16]["UR"]
    r2 = stages[1 << 20]["UR"] / stages[1 << 18]["UR"]
    it_frac = stages[1 << 20]["IT"] / stages[1 << 20]["UR"]
    ok = r1 <= 5.0 and r2 <= 5.0 and it_frac < 0.02
    report(
        6, "unrolling-linearity", ok,
        f"T(4N)/T(N) = {r1:.2f}, {r2:.2f} (<= 5.0); IT/UR at 2^20 = {100*it_frac:.3f}% (< 2%)",
    )
    assert ok


def test_criterion_7_beats_binary_powering():
    f = F
    N = 1 << 20
    text = gen_instance("matrix", 2, 2, 1, f)
    m = formats.matrix_from_text(text)
    spec = _spec_of_input(text)
    seq_term_ct(spec, 4096, force_ct=True)  # warm
    binpow_matrix(m, 1 << 12)
    stages = _staged_run(spec, N, 1)
    t0 = time.perf_counter_ns()
    binpow_matrix(m, N)
    bp = time.perf_counter_ns() - t0
    speedup = bp / (stages["IT"] + stages["UR"])
    ok = speedup >= 2.0
    report(
        7, "beats-binary-powering", ok,
        f"BP/(IT+UR) = {speedup:.1f} at N=2^20, r=2, d=2 (>= 2.0)",
    )
    assert ok


def test_criterion_8_reduction_identities():
    f101 = Fp(101)
    rng = random.Random(8)
    calls = 0
    failures = 0
    t0 = time.time()
    while calls < 10_000:
        field = f101 if calls % 2 else F
        dy = rng.randrange(1, 3)
        base = YPoly(
            field,
            [
                RatFun.of_poly(Poly(field, [rng.randrange(field.p) for _ in range(2)]))
                for _ in range(dy + 1)
            ],
        )
        if base.is_zero() or base.degree_y < 1 or base.coeff(0).is_zero():
            continue
        q = base ** rng.randrange(1, 4)
        if rng.random() < 0.4:
            # second squarefree factor, keeping the constant term nonzero
            extra = YPoly(
                field,
                [RatFun.const(field, rng.randrange(1, field.p)), RatFun.one(field)],
            )
            q = q * extra
        p_num = YPoly(
            field,
            [
                RatFun.of_poly(Poly(field, [rng.randrange(field.p) for _ in range(2)]))
                for _ in range(rng.randrange(1, q.degree_y + 2))
            ],
        )
        lam = rng.randrange(50, field.p - 1) if field.p > 101 else rng.randrange(50, 101)
        pair = param_reduce(p_num, q, lam)
        if not verify_reduction(p_num, q, lam, pair):
            failures += 1
        calls += 1
    elapsed = time.time() - t0

    # Cayley-Hamilton across the full charpoly grid
    ch_ok = True
    for r in (2, 3, 4):
        for d in (1, 2, 3):
            m = formats.matrix_from_text(gen_instance("matrix", r, d, r + d, F))
            chi = charpoly(m)
            acc = PolyMatrix(F, [[Poly.zero(F)] * r for _ in range(r)])
            for coeff in reversed(chi.cy):
                acc = acc * m
                for i in range(r):
                    acc.rows[i][i] = acc.rows[i][i] + coeff
            if not all(e.is_zero() for row in acc.rows for e in row):
                ch_ok = False
    ok = failures == 0 and ch_ok
    report(
        8, "reduction-identities", ok,
        f"{calls} reduction identities verified, {failures} failures, {elapsed:.1f}s; Cayley-Hamilton {'ok' if ch_ok else 'FAILED'}",
    )
    assert ok
