import random

import pytest

from polypow import Fp, Poly, PreconditionError
from polypow.ff import DEFAULT_PRIME
from polypow.power import (
    binpow_matrix,
    bivmodpow,
    fallback_log,
    modpow_baseline,
    polmatpow,
    reciprocal_sequence_spec,
    y_pow_mod,
)
from polypow.seqterm import fib_closed_form
from polypow.ypoly import BiPoly, PolyMatrix

F = Fp(DEFAULT_PRIME)


def bp(f, rows):
    return BiPoly(f, [Poly(f, row) for row in rows])


def fib_matrix(f):
    return PolyMatrix(f, [[Poly.x(f), Poly.one(f)], [Poly.one(f), Poly.zero(f)]])


def fib_modulus(f):
    return bp(f, [[-1], [0, -1], [1]])  # y^2 - x y - 1


def rand_matrix(f, r, d, rng):
    return PolyMatrix(
        f,
        [[Poly(f, [rng.randrange(f.p) for _ in range(d + 1)]) for _ in range(r)] for _ in range(r)],
    )


def rand_monic(f, r, d, rng, nonzero_const=True):
    while True:
        cy = [Poly(f, [rng.randrange(f.p) for _ in range(d + 1)]) for _ in range(r)]
        cy.append(Poly.one(f))
        P = BiPoly(f, cy)
        if not nonzero_const or not P.coeff(0).is_zero():
            return P


def test_binpow_examples():
    f = F
    m = fib_matrix(f)
    m3 = binpow_matrix(m, 3)
    assert m3.rows[0][1] == Poly(f, [1, 0, 1])  # F_3 = x^2 + 1
    ident = PolyMatrix.identity(f, 3)
    assert binpow_matrix(ident, 12345) == ident
    rng = random.Random(71)
    m = rand_matrix(f, 2, 2, rng)
    m2 = binpow_matrix(m, 2)
    m6 = binpow_matrix(m, 6)
    assert _matmul3(m2, m2, m2) == m6


def _matmul3(a, b, c):
    return (a * b) * c


def test_binpow_matches_plain_mult_large():
    # exercises the shared-transform product above the NTT threshold
    f = F
    rng = random.Random(72)
    m = rand_matrix(f, 2, 300, rng)
    got = binpow_matrix(m, 2)
    assert got == m * m


def test_modpow_baseline_examples():
    f = F
    P = fib_modulus(f)
    got = modpow_baseline(P, BiPoly.y_power(f, 1), 5)
    # y F_5 + F_4
    assert got == BiPoly(f, [Poly(f, [0, 2, 0, 1]), Poly(f, [1, 0, 3, 0, 1])])
    assert modpow_baseline(P, BiPoly.one(f), 7) == BiPoly.one(f)
    q = bp(f, [[3, 1], [2]])
    assert modpow_baseline(P, q, 1) == q


def test_reciprocal_sequence_is_fibonacci_shifted():
    f = F
    spec = reciprocal_sequence_spec(fib_modulus(f))
    # 1/(1 - x y - y^2) generates F_{k+1}
    assert spec.c[0] == Poly.one(f)
    assert spec.c[1] == Poly.x(f)
    assert spec.init[0] == Poly.one(f)
    assert spec.init[1] == Poly.x(f)


def test_y_pow_mod_fibonacci():
    f = F
    got = y_pow_mod(fib_modulus(f), 5)
    assert got == BiPoly(f, [Poly(f, [0, 2, 0, 1]), Poly(f, [1, 0, 3, 0, 1])])
    assert y_pow_mod(fib_modulus(f), 1) == BiPoly.y_power(f, 1)


def test_y_pow_mod_vs_baseline_random():
    f = F
    rng = random.Random(73)
    P = rand_monic(f, 3, 2, rng)
    got = y_pow_mod(P, 97)
    want = modpow_baseline(P, BiPoly.y_power(f, 1), 97)
    assert got == want


def test_y_pow_mod_rejects_zero_const():
    f = F
    P = BiPoly(f, [Poly.zero(f), Poly.zero(f), Poly.one(f)])  # y^2
    with pytest.raises(PreconditionError):
        y_pow_mod(P, 5)


def test_bivmodpow_examples():
    f = F
    P = fib_modulus(f)
    # Q = y reduces to y_pow_mod
    assert bivmodpow(P, BiPoly.y_power(f, 1), 5) == y_pow_mod(P, 5)
    # constant base
    q = BiPoly.of_poly(Poly.const(f, 7))
    assert bivmodpow(P, q, 10) == BiPoly.of_poly(Poly.const(f, pow(7, 10, f.p)))
    # derived: oracle comparison for Q = y^2, N = 8
    got = bivmodpow(P, BiPoly.y_power(f, 2), 8)
    want = modpow_baseline(P, BiPoly.y_power(f, 2), 8)
    assert got == want


def test_bivmodpow_vs_baseline_random():
    f = F
    rng = random.Random(74)
    for r, d in ((2, 1), (3, 2)):
        P = rand_monic(f, r, d, rng)
        Q = BiPoly(
            f,
            [Poly(f, [rng.randrange(f.p) for _ in range(d + 1)]) for _ in range(r)],
        )
        n = rng.randrange(50, 300)
        assert bivmodpow(P, Q, n) == modpow_baseline(P, Q, n)


def test_bivmodpow_common_factor_fallback():
    f = F
    # P = (y - x)(y - 1), Q = y - x share a factor: resultant vanishes
    x = Poly.x(f)
    one = Poly.one(f)
    P = BiPoly(f, [x, -(x + one), one])
    Q = BiPoly(f, [-x, one])
    before = len(fallback_log)
    got = bivmodpow(P, Q, 9)
    assert len(fallback_log) == before + 1
    assert got == modpow_baseline(P, Q, 9)


def test_polmatpow_examples():
    f = F
    m = fib_matrix(f)
    got = polmatpow(m, 5)
    assert got.rows[0][1] == fib_closed_form(5, f)
    ident = PolyMatrix.identity(f, 2)
    assert polmatpow(ident, 10**6) == ident


def test_polmatpow_vs_binpow_random():
    f = F
    rng = random.Random(75)
    m = rand_matrix(f, 3, 2, rng)
    assert polmatpow(m, 512) == binpow_matrix(m, 512)


def test_polmatpow_singular_fallback():
    f = F
    # rank-1 matrix: determinant is identically zero
    x = Poly.x(f)
    m = PolyMatrix(f, [[x, x], [x, x]])
    before = len(fallback_log)
    got = polmatpow(m, 7)
    assert len(fallback_log) == before + 1
    assert got == binpow_matrix(m, 7)


def test_polmatpow_multiplicativity():
    f = F
    rng = random.Random(76)
    m = rand_matrix(f, 2, 1, rng)
    a, b = 37, 80
    assert polmatpow(m, a + b) == polmatpow(m, a) * polmatpow(m, b)


def test_power_degree_bound():
    f = F
    rng = random.Random(77)
    m = rand_matrix(f, 2, 3, rng)
    n = 64
    got = polmatpow(m, n)
    assert all(e.is_zero() or e.degree <= n * 3 for row in got.rows for e in row)
