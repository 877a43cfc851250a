import random

import pytest

from polypow import Fp, Poly, PreconditionError, SingularUnroll
from polypow.ff import DEFAULT_PRIME
from polypow.holo import (
    CFiniteSpec,
    Rec,
    choose_ordinary_point,
    companion_pow_mod,
    detect_problem_indices,
    ode_to_rec,
    recover_coefficients,
    shift_ode,
    unroll,
)
from polypow.ratfun import RatFun
from polypow.telescope import DiffOp
from polypow.upoly import taylor_shift

F = Fp(DEFAULT_PRIME)


def fib_spec(f):
    # F_{n+2} = x F_{n+1} + F_n,  F_0 = 0, F_1 = 1
    return CFiniteSpec(f, [Poly.one(f), Poly.x(f)], [Poly.zero(f), Poly.one(f)])


def fib_operator(f, lam):
    return DiffOp(
        f,
        [Poly.const(f, 1 - lam * lam), Poly(f, [0, 3]), Poly(f, [4, 0, 1])],
    )


def triple_geom_operator(f, lam):
    return DiffOp(
        f,
        [
            Poly.zero(f),
            Poly.const(f, (2 * lam - 1) * (lam - 1)),
            Poly(f, [0, -3 * (lam - 1)]),
            Poly(f, [0, 0, 1]),
        ],
    )


def fib_iterative(f, n):
    """Oracle: direct iteration of the defining recurrence."""
    a, b = Poly.zero(f), Poly.one(f)
    if n == 0:
        return a
    for _ in range(n - 1):
        a, b = b, Poly.x(f) * b + a
    return b


def test_ode_to_rec_fibonacci():
    f = F
    lam = 271828
    rec = ode_to_rec(fib_operator(f, lam))
    assert rec.s == 2
    # 4(k+1)(k+2) c_{k+2} + ((k+1)^2 - lam^2) c_k = 0
    k = Poly.x(f)
    one = Poly.one(f)
    p2 = (k + one) * (k + Poly.const(f, 2)) * Poly.const(f, 4)
    p0 = (k + one) * (k + one) - Poly.const(f, lam * lam)
    # the recurrence is only defined up to scaling; compare the ratio
    assert RatFun(rec.k_coeffs[0], rec.k_coeffs[2]) == RatFun(p0, p2)
    assert rec.k_coeffs[1].is_zero()


def test_ode_to_rec_first_derivative():
    f = F
    # d/dx annihilates constants: relation k*c_k = 0 after reindexing
    rec = ode_to_rec(DiffOp(f, [Poly.zero(f), Poly.one(f)]))
    assert rec.s == 0
    assert rec.k_coeffs[0] == Poly.x(f)


def test_ode_to_rec_triple_geom():
    f = F
    lam = 515151
    rec = ode_to_rec(triple_geom_operator(f, lam))
    assert rec.s == 0
    # k (k - lam)(k - 2 lam) c_k = 0, up to scaling
    k = Poly.x(f)
    want = k * (k - Poly.const(f, lam)) * (k - Poly.const(f, 2 * lam))
    assert rec.k_coeffs[0].monic() == want.monic()


def test_companion_pow_fibonacci():
    f = F
    spec = fib_spec(f)
    assert companion_pow_mod(spec, 5, 2) == [1, 0]
    # N below the order reads from the initial values
    assert companion_pow_mod(spec, 1, 3) == [1, 0, 0]
    # derived by iterating the recurrence six steps: F_6 = x^5+4x^3+3x
    assert companion_pow_mod(spec, 6, 2) == [0, 3]


def test_companion_pow_matches_iteration():
    f = F
    rng = random.Random(51)
    for _ in range(20):
        r = rng.randrange(1, 4)
        spec = CFiniteSpec(
            f,
            [Poly(f, [rng.randrange(f.p) for _ in range(3)]) for _ in range(r)],
            [Poly(f, [rng.randrange(f.p) for _ in range(2)]) for _ in range(r)],
        )
        n = rng.randrange(0, 40)
        s = rng.randrange(1, 5)
        want = spec.iterate(n).coeff_list()[:s]
        want += [0] * (s - len(want))
        assert companion_pow_mod(spec, n, s) == want


def test_unroll_fibonacci_rec():
    f = F
    n = 5
    rec = ode_to_rec(fib_operator(f, n))
    vals = unroll(rec, [1, 0], 6)
    assert [int(v) for v in vals] == [1, 0, 3, 0, 1, 0, 0]


def test_unroll_simple():
    f = F
    # (k+1) c_{k+1} = 0 with c_0 = 7
    rec = Rec(f, [Poly.zero(f), Poly(f, [1, 1])])
    vals = unroll(rec, [7], 5)
    assert [int(v) for v in vals] == [7, 0, 0, 0, 0, 0]


def test_unroll_triple_geom_with_known():
    f = F
    n = 9
    rec = ode_to_rec(triple_geom_operator(f, n))
    known = {0: f.pow(2, n), n: 1, 2 * n: 1}
    vals = unroll(rec, [], 3 * n, known)
    want = [0] * (3 * n + 1)
    want[0] = pow(2, n, f.p)
    want[n] = 1
    want[2 * n] = 1
    assert [int(v) for v in vals] == want


def test_unroll_missing_known():
    f = F
    n = 9
    rec = ode_to_rec(triple_geom_operator(f, n))
    with pytest.raises(SingularUnroll) as exc:
        unroll(rec, [], 3 * n, {0: 1, n: 1})
    assert exc.value.index == 2 * n


def test_unroll_range_too_large():
    f = Fp(101)
    rec = Rec(f, [Poly.zero(f), Poly.one(f)])
    with pytest.raises(PreconditionError):
        unroll(rec, [3], 101)


def test_unroll_vs_bruteforce_random_specs():
    """Coefficient vectors of iterated sequences satisfy the derived recurrence."""
    from polypow.seqterm import genfunc
    from polypow.telescope import telescoper_at

    f = F
    rng = random.Random(52)
    for _ in range(20):
        r = rng.randrange(1, 4)
        d = rng.randrange(0, 3)
        spec = CFiniteSpec(
            f,
            [Poly(f, [rng.randrange(f.p) for _ in range(d + 1)]) for _ in range(r)],
            [Poly(f, [rng.randrange(f.p) for _ in range(d + 1)]) for _ in range(r)],
        )
        n = rng.randrange(30, 200)
        u_n = spec.iterate(n)
        op = telescoper_at(genfunc(spec), n)
        assert op.apply(u_n).is_zero()
        rec = ode_to_rec(op)
        vec = u_n.coeff_list() + [0] * (rec.s + 2)
        for k in range(len(vec) - rec.s):
            assert rec.check(vec, k) == 0


def test_detect_problem_indices():
    f = F
    n = 101
    # Fibonacci-style leading 4(k+1)(k+2) never vanishes below p
    rec = ode_to_rec(fib_operator(f, n))
    assert detect_problem_indices(rec, n) == []
    rec = ode_to_rec(triple_geom_operator(f, n))
    assert detect_problem_indices(rec, 3 * n) == [0, n, 2 * n]
    # planted root at k = 37
    k = Poly.x(f)
    rec = Rec(f, [Poly.one(f), k - Poly.const(f, 37)])
    assert detect_problem_indices(rec, 100) == [37 + 1]


def test_choose_ordinary_point():
    f = F
    op = DiffOp(f, [Poly.one(f), Poly(f, [0, 0, 1])], normalize=False)
    assert choose_ordinary_point(op) == 1
    op = DiffOp(f, [Poly.one(f), Poly.one(f)], normalize=False)
    assert choose_ordinary_point(op) == 1
    # (x-1)(x-2) leading coefficient
    op = DiffOp(f, [Poly.one(f), Poly(f, [2, -3, 1])], normalize=False)
    assert choose_ordinary_point(op) == 3


def test_shift_ode():
    f = F
    lam = 31415
    op = triple_geom_operator(f, lam)
    shifted = shift_ode(op, 1)
    x = Poly.x(f)
    one = Poly.one(f)
    assert shifted.coeffs[3] == (x + one) * (x + one)
    assert shifted.coeffs[2] == (x + one).mul_scalar(-3 * (lam - 1) % f.p)
    assert shifted.coeffs[1] == Poly.const(f, (2 * lam - 1) * (lam - 1))
    assert shift_ode(op, 0) == op
    roundtrip = shift_ode(shift_ode(op, 7), f.p - 7)
    assert roundtrip == op


def test_recover_coefficients():
    f = F
    assert recover_coefficients([1, 2, 3], 1, [], f) == {}
    # constant polynomial: recovering index 0 returns it unchanged
    assert recover_coefficients([42], 9, [0], f) == {0: 42}
    # derived: u_6 = 2^6 + x^6 + x^12, v = u(x+1); recover {0, 6, 12}
    n = 6
    u = Poly(f, [64] + [0] * 5 + [1] + [0] * 5 + [1])
    v = taylor_shift(u, 1)
    got = recover_coefficients(v.coeff_list(), 1, [0, n, 2 * n], f)
    assert got == {0: 64, n: 1, 2 * n: 1}


def test_recover_full_roundtrip():
    f = F
    rng = random.Random(53)
    for _ in range(10):
        deg = rng.randrange(0, 60)
        u = Poly(f, [rng.randrange(f.p) for _ in range(deg + 1)])
        c = rng.randrange(1, 50)
        v = taylor_shift(u, c)
        got = recover_coefficients(v.coeff_list(), c, list(range(deg + 1)), f)
        assert [got[i] for i in range(deg + 1)] == u.coeff_list() + [0] * (deg + 1 - len(u.c))
