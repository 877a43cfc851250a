import random

import pytest

from polypow import Fp, Poly, PreconditionError
from polypow.ff import DEFAULT_PRIME
from polypow.holo import CFiniteSpec
from polypow.seqterm import (
    clear_recipe_cache,
    fib_closed_form,
    fibonacci_spec,
    genfunc,
    seq_term_ct,
)
from polypow.ypoly import BiPoly, BiRat

F = Fp(DEFAULT_PRIME)


def bp(f, rows):
    return BiPoly(f, [Poly(f, row) for row in rows])


def triple_geom_spec(f):
    """u_{n+3} = (x^2+x+2) u_{n+2} - x(x^2+2x+2) u_{n+1} + 2x^3 u_n."""
    c0 = Poly(f, [0, 0, 0, 2])
    c1 = Poly(f, [0, -2, -2, -1])
    c2 = Poly(f, [2, 1, 1])
    u0 = Poly.const(f, 3)
    u1 = Poly(f, [2, 1, 1])
    u2 = Poly(f, [4, 0, 1, 0, 1])
    return CFiniteSpec(f, [c0, c1, c2], [u0, u1, u2])


def iterate_oracle(spec, n):
    """Oracle: direct iteration written independently of the library loop."""
    f = spec.f
    vals = list(spec.init)
    while len(vals) <= n:
        acc = Poly.zero(f)
        for i, ci in enumerate(spec.c):
            acc = acc + ci * vals[len(vals) - spec.r + i]
        vals.append(acc)
    return vals[n]


def test_genfunc_fibonacci():
    f = F
    u = genfunc(fibonacci_spec(f))
    assert u.num == BiPoly.y_power(f, 1)
    assert u.den == bp(f, [[1], [0, -1], [-1]])


def test_genfunc_geometric():
    f = F
    spec = CFiniteSpec(f, [Poly.const(f, 9)], [Poly.one(f)])
    u = genfunc(spec)
    assert u.num == BiPoly.one(f)
    assert u.den == bp(f, [[1], [-9]])


def test_genfunc_triple_geom():
    f = F
    u = genfunc(triple_geom_spec(f))
    # equals the partial-fraction sum 1/(1-2y) + 1/(1-x^2 y) + 1/(1-x y)
    want_num = bp(f, [[3], [-4, -2, -2], [0, 2, 2, 1]])
    want_den = bp(f, [[1], [-2, -1, -1], [0, 2, 2, 1], [0, 0, 0, -2]])
    assert BiRat(u.num, u.den) == BiRat(want_num, want_den)
    assert u.den.coeff(0) == Poly.one(f)


def test_fib_closed_form():
    f = F
    assert fib_closed_form(4, f) == Poly(f, [0, 2, 0, 1])
    assert fib_closed_form(1, f) == Poly.one(f)
    # derived by iterating the recurrence: F_7 = x^6 + 5x^4 + 6x^2 + 1
    assert fib_closed_form(7, f) == Poly(f, [1, 0, 6, 0, 5, 0, 1])


def test_seq_term_fibonacci_examples():
    f = F
    spec = fibonacci_spec(f)
    assert seq_term_ct(spec, 5) == Poly(f, [1, 0, 3, 0, 1])
    assert seq_term_ct(spec, 0) == Poly.zero(f)
    assert seq_term_ct(spec, 1) == Poly.one(f)


def test_seq_term_forced_pipeline_small():
    f = F
    spec = fibonacci_spec(f)
    for n in (30, 31, 64, 99):
        got = seq_term_ct(spec, n, force_ct=True)
        assert got == fib_closed_form(n, f)


def test_seq_term_fibonacci_range():
    f = F
    spec = fibonacci_spec(f)
    for n in range(2, 260):
        assert seq_term_ct(spec, n) == fib_closed_form(n, f)


def test_seq_term_triple_geom():
    f = F
    spec = triple_geom_spec(f)
    for n in (10, 33, 100):
        got = seq_term_ct(spec, n, force_ct=True)
        want = [0] * (2 * n + 1)
        want[0] = pow(2, n, f.p)
        want[n] = 1
        want[2 * n] = 1
        assert got == Poly(f, want)


def test_seq_term_random_specs_vs_iteration():
    f = F
    rng = random.Random(61)
    clear_recipe_cache()
    for trial in range(20):
        r = rng.randrange(1, 4)
        d = rng.randrange(1, 3)
        spec = CFiniteSpec(
            f,
            [Poly(f, [rng.randrange(f.p) for _ in range(d + 1)]) for _ in range(r)],
            [Poly(f, [rng.randrange(f.p) for _ in range(d + 1)]) for _ in range(r)],
        )
        n = rng.randrange(40, 500)
        assert seq_term_ct(spec, n, force_ct=True) == iterate_oracle(spec, n)


def test_seq_term_degree_zero_fast_path():
    f = F
    spec = CFiniteSpec(f, [Poly.const(f, 3)], [Poly.const(f, 5)])
    assert seq_term_ct(spec, 10**6) == Poly.const(f, 5 * pow(3, 10**6, f.p))


def test_seq_term_degree_bound():
    f = F
    spec = fibonacci_spec(f)
    for n in (100, 500):
        u = seq_term_ct(spec, n, force_ct=True)
        assert u.degree == n - 1
        assert u.lc() == 1  # monic


def test_precondition_small_prime():
    f = Fp(101)
    spec = CFiniteSpec(f, [Poly.one(f), Poly.x(f)], [Poly.zero(f), Poly.one(f)])
    with pytest.raises(PreconditionError):
        seq_term_ct(spec, 1000)


def test_determinism():
    f = F
    spec = triple_geom_spec(f)
    a = seq_term_ct(spec, 50, force_ct=True)
    clear_recipe_cache()
    b = seq_term_ct(spec, 50, force_ct=True)
    assert a == b
