import random

import pytest

from polypow import DEFAULT_PRIME, Fp, FieldDivisionError, PreconditionError
from polypow.ff import CRT_PRIMES, is_prime


def brute_inverse_table(p):
    # oracle: exhaustive inverse table for tiny p
    table = {}
    for a in range(1, p):
        for b in range(1, p):
            if a * b % p == 1:
                table[a] = b
                break
    return table


def test_default_prime_shape():
    assert is_prime(DEFAULT_PRIME)
    assert DEFAULT_PRIME < 1 << 50
    # NTT-friendliness: 2**26 must divide p - 1
    assert (DEFAULT_PRIME - 1) % (1 << 26) == 0
    for q in CRT_PRIMES:
        assert is_prime(q)
        assert (q - 1) % (1 << 26) == 0
        assert q < 1 << 50


def test_prime_validation():
    with pytest.raises(PreconditionError):
        Fp(15)
    with pytest.raises(PreconditionError):
        Fp(2)
    with pytest.raises(PreconditionError):
        Fp(1 << 62)
    Fp(7)
    Fp(101)


def test_field_arith_small():
    f = Fp(7)
    assert f.mul(3, 5) == 1
    assert f.div(4, 4) == 1
    # derived via brute-force inverse table for p = 7
    inv = brute_inverse_table(7)
    assert f.div(3, 5) == 3 * inv[5] % 7 == 2
    with pytest.raises(FieldDivisionError):
        f.div(3, 0)


def test_field_pow():
    f7 = Fp(7)
    assert f7.pow(3, 6) == 1  # Fermat
    assert f7.pow(0, 0) == 1  # convention

    def slow_pow(a, e, p):
        r = 1
        for _ in range(e):
            r = r * a % p
        return r

    f13 = Fp(13)
    assert f13.pow(2, 10) == slow_pow(2, 10, 13) == 10


def test_field_random_roundtrip():
    f = Fp(DEFAULT_PRIME)
    rng = random.Random(1)
    for _ in range(1000):
        a = rng.randrange(f.p)
        b = rng.randrange(1, f.p)
        assert f.div(f.mul(a, b), b) == a


def test_fermat_random():
    f = Fp(DEFAULT_PRIME)
    rng = random.Random(2)
    for _ in range(50):
        a = rng.randrange(1, f.p)
        assert f.pow(a, f.p - 1) == 1


def pascal_binom(k, i, p):
    # oracle: Pascal's triangle mod p
    row = [1]
    for _ in range(k):
        row = [1] + [(row[j] + row[j + 1]) % p for j in range(len(row) - 1)] + [1]
    return row[i]


def test_binomials():
    f = Fp(101)
    assert f.binom(5, 2) == 10
    assert f.binom(7, 0) == 1
    assert f.binom(10, 4) == pascal_binom(10, 4, 101) == 210 % 101
    rng = random.Random(3)
    for _ in range(200):
        k = rng.randrange(1, 60)
        i = rng.randrange(0, k + 1)
        lhs = f.binom(k, i)
        rhs = (f.binom(k - 1, i - 1) + f.binom(k - 1, i)) % f.p
        assert lhs == rhs


def test_factorial_range_check():
    f = Fp(101)
    with pytest.raises(PreconditionError):
        f.factorial_tables(101)
    fact, inv = f.factorial_tables(100)
    assert int(fact[5]) == 120 % 101
    assert int(fact[5]) * int(inv[5]) % 101 == 1


def test_big_prime_field_ops():
    # a prime above the kernel limit exercises the pure-Python lane
    p = (1 << 61) - 1  # Mersenne prime
    f = Fp(p)
    assert f.mul(p - 1, p - 1) == 1
    assert f.div(12345, 12345) == 1
    fact, inv = f.factorial_tables(20)
    assert int(fact[20]) * int(inv[20]) % p == 1
