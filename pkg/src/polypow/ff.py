"""Exact arithmetic in the prime field F_p for a runtime-chosen word-size prime.

Field elements are plain Python ints kept as canonical residues in [0, p).
An ``Fp`` instance carries the prime, validates it on construction and owns
the lazily built lookup tables (NTT twiddles, factorials) for that prime.

The shipped default prime is 49 bits and satisfies 2**26 | p - 1, so a
single-prime NTT covers transform lengths up to 2**26.
"""

import threading

import numpy as np

from . import _kernels
from .errors import FieldDivisionError, PreconditionError

# 8388598 * 2**26 + 1; 2-adic valuation of p - 1 is 26.
DEFAULT_PRIME = 562949282332673

# Companion NTT-friendly primes used for multiplication under arbitrary
# moduli via residue recombination.
CRT_PRIMES = (562948879679489, 562948678352897, 562948409917441)

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3 * 10**24."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Fp:
    """The field F_p.  Immutable; safe to share between threads."""

    __slots__ = ("p", "two_adicity", "_ntt_tables", "_lock", "_fact", "_fact_inv")

    def __init__(self, p: int):
        if not isinstance(p, int) or not (2 < p < 1 << 62):
            raise PreconditionError(f"prime must be an odd integer in (2, 2^62), got {p!r}")
        if not is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        self.p = p
        t = p - 1
        k = 0
        while t % 2 == 0:
            t //= 2
            k += 1
        self.two_adicity = k
        self._ntt_tables = {}
        self._lock = threading.Lock()
        self._fact = None
        self._fact_inv = None

    def __repr__(self):
        return f"Fp({self.p})"

    def __eq__(self, other):
        return isinstance(other, Fp) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    # -- scalar arithmetic -------------------------------------------------

    def add(self, a, b):
        s = a + b
        return s - self.p if s >= self.p else s

    def sub(self, a, b):
        d = a - b
        return d + self.p if d < 0 else d

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise FieldDivisionError("division by zero in F_p")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def pow(self, a, e):
        if e < 0:
            raise PreconditionError("negative exponent; use inv() explicitly")
        return pow(a, e, self.p)  # 0**0 == 1 by pow's convention

    def neg(self, a):
        return self.p - a if a else 0

    # -- NTT support -------------------------------------------------------

    def supports_ntt(self, size: int) -> bool:
        return size <= (1 << self.two_adicity) and self.p < _kernels.KERNEL_MODULUS_LIMIT

    def _nonresidue(self):
        p = self.p
        for x in range(2, 1000):
            if pow(x, (p - 1) // 2, p) == p - 1:
                return x
        raise PreconditionError(f"no small quadratic nonresidue found for {p}")

    def ntt_tables(self, size: int):
        """(w_pows, winv_pows, n_inverse) for a transform of the given power-of-two size."""
        key = size
        tab = self._ntt_tables.get(key)
        if tab is not None:
            return tab
        with self._lock:
            tab = self._ntt_tables.get(key)
            if tab is not None:
                return tab
            p = self.p
            if size & (size - 1) or not self.supports_ntt(size):
                raise PreconditionError(f"prime {p} has no order-{size} NTT")
            w = pow(self._nonresidue(), (p - 1) // size, p)
            assert pow(w, size // 2, p) == p - 1
            w_pows = _kernels.build_powers(w, size // 2, p)
            winv_pows = _kernels.build_powers(pow(w, -1, p), size // 2, p)
            tab = (w_pows, winv_pows, pow(size, -1, p))
            self._ntt_tables[key] = tab
            return tab

    # -- combinatorial tables ----------------------------------------------

    def factorial_tables(self, limit: int):
        """Factorials and inverse factorials for 0..limit; O(1) binomials after."""
        if limit >= self.p:
            raise PreconditionError(
                f"prime too small for requested range (limit {limit} >= p {self.p})"
            )
        if self._fact is not None and len(self._fact) > limit:
            return self._fact, self._fact_inv
        with self._lock:
            if self._fact is not None and len(self._fact) > limit:
                return self._fact, self._fact_inv
            if self.p < _kernels.KERNEL_MODULUS_LIMIT:
                fact, fact_inv = _kernels.factorial_arrays(limit, self.p)
            else:
                p = self.p
                fact = np.empty(limit + 1, dtype=object)
                fact_inv = np.empty(limit + 1, dtype=object)
                acc = 1
                for k in range(limit + 1):
                    fact[k] = acc
                    acc = acc * (k + 1) % p
                acc = pow(int(fact[limit]), -1, p)
                for k in range(limit, -1, -1):
                    fact_inv[k] = acc
                    acc = acc * k % p
            self._fact = fact
            self._fact_inv = fact_inv
            return fact, fact_inv

    def binom(self, k: int, i: int) -> int:
        """Binomial coefficient C(k, i) mod p; tables must cover k."""
        if i < 0 or i > k:
            return 0
        fact, fact_inv = self.factorial_tables(k)
        return int(fact[k]) * int(fact_inv[i]) % self.p * int(fact_inv[k - i]) % self.p


_DEFAULT_FIELD = None


def default_field() -> Fp:
    global _DEFAULT_FIELD
    if _DEFAULT_FIELD is None:
        _DEFAULT_FIELD = Fp(DEFAULT_PRIME)
    return _DEFAULT_FIELD
