"""Dense univariate polynomials over F_p.

A polynomial is a coefficient vector indexed by exponent with the leading
coefficient nonzero; the zero polynomial has an empty vector and degree
"minus infinity".  For primes below 2**50 coefficients live in int64 numpy
arrays and the heavy operations run in compiled kernels; larger primes fall
back to plain Python integer lists.

Multiplication picks its path per operand size: schoolbook for short inputs,
a single-prime NTT when the prime supports a large enough transform,
three-prime NTT with residue recombination for other sub-2**50 primes, and
Kronecker substitution through Python big integers for very large primes.
The result never depends on the chosen path.
"""

import numpy as np

from . import _kernels
from .errors import FieldDivisionError, PreconditionError
from .ff import CRT_PRIMES, Fp

MINUS_INF = float("-inf")

_RECT_MIN = 32          # below this short-operand length, always schoolbook
_RECT_PRODUCT_CAP = 1 << 19   # schoolbook until na*nb exceeds this, if no NTT
_NTT_MIN_LEN = 257      # result length from which the NTT path engages

_crt_fields = None


def _crt_field_triple():
    global _crt_fields
    if _crt_fields is None:
        _crt_fields = tuple(Fp(q) for q in CRT_PRIMES)
    return _crt_fields


class Poly:
    """Element of F_p[x]; immutable by convention."""

    __slots__ = ("f", "c")

    def __init__(self, f, coeffs=(), normalized=False):
        self.f = f
        if normalized:
            self.c = coeffs
            return
        p = f.p
        if f.p < _kernels.KERNEL_MODULUS_LIMIT:
            a = np.asarray([int(x) % p for x in coeffs], dtype=np.int64)
            n = a.shape[0]
            while n > 0 and a[n - 1] == 0:
                n -= 1
            self.c = a[:n]
        else:
            a = [int(x) % p for x in coeffs]
            while a and a[-1] == 0:
                a.pop()
            self.c = a

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(f):
        return Poly(f, ())

    @staticmethod
    def one(f):
        return Poly(f, (1,))

    @staticmethod
    def x(f):
        return Poly(f, (0, 1))

    @staticmethod
    def const(f, v):
        return Poly(f, (v,))

    @staticmethod
    def _wrap(f, arr):
        """Adopt a kernel-produced int64 array, stripping trailing zeros."""
        n = arr.shape[0]
        while n > 0 and arr[n - 1] == 0:
            n -= 1
        return Poly(f, arr[:n], normalized=True)

    # -- basic queries ---------------------------------------------------

    @property
    def degree(self):
        return len(self.c) - 1 if len(self.c) else MINUS_INF

    def is_zero(self):
        return len(self.c) == 0

    def __bool__(self):
        return len(self.c) != 0

    def __len__(self):
        return len(self.c)

    def __getitem__(self, i):
        if 0 <= i < len(self.c):
            return int(self.c[i])
        return 0

    def lc(self):
        if not len(self.c):
            raise PreconditionError("zero polynomial has no leading coefficient")
        return int(self.c[-1])

    def coeff_list(self):
        return [int(x) for x in self.c]

    def key(self):
        """Hashable canonical form (prime, coefficients)."""
        return (self.f.p, tuple(int(x) for x in self.c))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if self.f.p != other.f.p or len(self.c) != len(other.c):
            return False
        if isinstance(self.c, np.ndarray):
            return bool(np.array_equal(self.c, other.c))
        return self.c == other.c

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if not len(self.c):
            return "Poly(0)"
        return "Poly(" + " ".join(str(int(x)) for x in self.c) + ")"

    # -- ring operations ---------------------------------------------------

    def __neg__(self):
        p = self.f.p
        if isinstance(self.c, np.ndarray):
            out = (p - self.c) % p
            return Poly._wrap(self.f, out.astype(np.int64))
        return Poly(self.f, [(p - x) % p for x in self.c], normalized=True)

    def __add__(self, other):
        f = self.f
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        if isinstance(a, np.ndarray):
            out = a.copy()
            if len(b):
                out[: len(b)] += b
                np.mod(out[: len(b)], f.p, out=out[: len(b)])
            return Poly._wrap(f, out)
        out = list(a)
        p = f.p
        for i, v in enumerate(b):
            s = out[i] + v
            out[i] = s - p if s >= p else s
        while out and out[-1] == 0:
            out.pop()
        return Poly(f, out, normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        f = self.f
        a, b = self.c, other.c
        if len(a) == 0 or len(b) == 0:
            return Poly.zero(f)
        if isinstance(a, np.ndarray):
            return Poly._wrap(f, _mul_arrays(f, a, b))
        return Poly(f, _mul_lists(f.p, a, b), normalized=True)

    def mul_scalar(self, v):
        v = int(v) % self.f.p
        if v == 0 or not len(self.c):
            return Poly.zero(self.f)
        if v == 1:
            return self
        if isinstance(self.c, np.ndarray):
            return Poly._wrap(self.f, _kernels.mul_scalar(self.c, v, self.f.p))
        p = self.f.p
        return Poly(self.f, [x * v % p for x in self.c], normalized=True)

    def __divmod__(self, other):
        return poly_divrem(self, other)

    def __floordiv__(self, other):
        return poly_divrem(self, other)[0]

    def __mod__(self, other):
        return poly_divrem(self, other)[1]

    def __pow__(self, e):
        if e < 0:
            raise PreconditionError("negative polynomial power")
        result = Poly.one(self.f)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- calculus and evaluation -------------------------------------------

    def deriv(self):
        n = len(self.c)
        if n <= 1:
            return Poly.zero(self.f)
        p = self.f.p
        if isinstance(self.c, np.ndarray):
            ks = np.arange(1, n, dtype=np.int64) % p
            return Poly._wrap(self.f, _kernels.mul_pointwise(self.c[1:], ks, p))
        return Poly(self.f, [k * int(self.c[k]) % p for k in range(1, n)], normalized=True)

    def eval(self, alpha):
        p = self.f.p
        alpha = int(alpha) % p
        acc = 0
        for v in reversed(self.c):
            acc = (acc * alpha + int(v)) % p
        return acc

    def monic(self):
        if not len(self.c):
            raise PreconditionError("cannot make the zero polynomial monic")
        lead = int(self.c[-1])
        if lead == 1:
            return self
        return self.mul_scalar(self.f.inv(lead))

    def shift_up(self, k):
        """Multiply by x**k."""
        if not len(self.c) or k == 0:
            return self if len(self.c) else Poly.zero(self.f)
        if isinstance(self.c, np.ndarray):
            out = np.zeros(len(self.c) + k, dtype=np.int64)
            out[k:] = self.c
            return Poly(self.f, out, normalized=True)
        return Poly(self.f, [0] * k + list(self.c), normalized=True)

    def truncate(self, n):
        """Reduce mod x**n."""
        if len(self.c) <= n:
            return self
        if isinstance(self.c, np.ndarray):
            return Poly._wrap(self.f, self.c[:n])
        c = list(self.c[:n])
        while c and c[-1] == 0:
            c.pop()
        return Poly(self.f, c, normalized=True)


# -- multiplication paths ----------------------------------------------------


def _mul_lists(p, a, b):
    na, nb = len(a), len(b)
    if min(na, nb) > 24 and na * nb > 4096:
        return _mul_kronecker(p, a, b)
    out = [0] * (na + nb - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def _mul_kronecker(p, a, b):
    """Pack into big integers, multiply once, unpack and reduce."""
    nbytes = (2 * p.bit_length() + min(len(a), len(b)).bit_length() + 7) // 8
    ia = int.from_bytes(b"".join(int(x).to_bytes(nbytes, "little") for x in a), "little")
    ib = int.from_bytes(b"".join(int(x).to_bytes(nbytes, "little") for x in b), "little")
    raw = (ia * ib).to_bytes((len(a) + len(b)) * nbytes, "little")
    out = [
        int.from_bytes(raw[k : k + nbytes], "little") % p
        for k in range(0, (len(a) + len(b) - 1) * nbytes, nbytes)
    ]
    while out and out[-1] == 0:
        out.pop()
    return out


def _mul_ntt_single(f, a, b, n):
    size = 1 << (n - 1).bit_length()
    w, winv, ninv = f.ntt_tables(size)
    p = f.p
    fa = np.zeros(size, dtype=np.int64)
    fa[: a.shape[0]] = a
    fb = np.zeros(size, dtype=np.int64)
    fb[: b.shape[0]] = b
    _kernels.ntt(fa, w, p)
    _kernels.ntt(fb, w, p)
    fc = _kernels.mul_pointwise(fa, fb, p)
    _kernels.ntt(fc, winv, p)
    _kernels.ntt_scale(fc, ninv, p)
    return fc[:n]


def _mul_ntt_crt(f, a, b, n):
    p = f.p
    parts = []
    for g in _crt_field_triple():
        ra = a % g.p if p >= g.p else a
        rb = b % g.p if p >= g.p else b
        parts.append(_mul_ntt_single(g, ra, rb, n))
    m1, m2, m3 = (g.p for g in _crt_field_triple())
    return _kernels.garner3(
        parts[0], parts[1], parts[2],
        m1, m2, m3,
        pow(m1, -1, m2), pow(m1, -1, m3), pow(m2, -1, m3),
        m1 % p, (m1 * m2) % p, p,
    )


def _mul_arrays(f, a, b):
    na, nb = a.shape[0], b.shape[0]
    n = na + nb - 1
    if min(na, nb) <= _RECT_MIN:
        return _kernels.poly_mul_rect(a, b, f.p)
    if n >= _NTT_MIN_LEN:
        size = 1 << (n - 1).bit_length()
        if f.supports_ntt(size):
            return _mul_ntt_single(f, a, b, n)
        if na * nb > _RECT_PRODUCT_CAP:
            return _mul_ntt_crt(f, a, b, n)
    return _kernels.poly_mul_rect(a, b, f.p)


# -- spec operations ---------------------------------------------------------


def poly_mul(a, b):
    return a * b


def poly_divrem(a, b):
    """Quotient and remainder with deg r < deg b."""
    if b.is_zero():
        raise FieldDivisionError("polynomial division by zero")
    f = a.f
    na, nb = len(a.c), len(b.c)
    if na < nb:
        return Poly.zero(f), a
    if nb == 1:
        return a.mul_scalar(f.inv(int(b.c[0]))), Poly.zero(f)
    if isinstance(a.c, np.ndarray):
        q, r = _kernels.poly_divmod_kernel(a.c, b.c, f.inv(b.lc()), f.p)
        return Poly._wrap(f, q), Poly._wrap(f, r)
    p = f.p
    inv_lead = f.inv(b.lc())
    r = list(a.c)
    q = [0] * (na - nb + 1)
    bc = b.c
    for i in range(na - nb, -1, -1):
        top = r[i + nb - 1]
        if top == 0:
            continue
        cquo = top * inv_lead % p
        q[i] = cquo
        for j in range(nb):
            r[i + j] = (r[i + j] - cquo * bc[j]) % p
    del r[nb - 1 :]
    while r and r[-1] == 0:
        r.pop()
    return Poly(f, q, normalized=True), Poly(f, r, normalized=True)


def poly_gcd(a, b):
    """Monic greatest common divisor."""
    if a.is_zero() and b.is_zero():
        raise FieldDivisionError("gcd(0, 0) is undefined")
    f = a.f
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if len(a.c) < len(b.c):
        a, b = b, a
    if isinstance(a.c, np.ndarray):
        return Poly._wrap(f, _kernels.poly_gcd_kernel(a.c, b.c, f.p))
    x, y = a, b
    while not y.is_zero():
        x, y = y, x % y
    return x.monic()


def poly_extended_gcd(a, b):
    """(g, u, v) with g = gcd monic and u*a + v*b = g."""
    f = a.f
    r0, r1 = a, b
    u0, u1 = Poly.one(f), Poly.zero(f)
    v0, v1 = Poly.zero(f), Poly.one(f)
    while not r1.is_zero():
        q, r = poly_divrem(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if r0.is_zero():
        raise FieldDivisionError("gcd(0, 0) is undefined")
    lead_inv = f.inv(r0.lc())
    return r0.mul_scalar(lead_inv), u0.mul_scalar(lead_inv), v0.mul_scalar(lead_inv)


def yun_squarefree(q):
    """Squarefree decomposition q = lc * prod Q_i**i (Yun's gcd chain).

    Returns the list of (Q_i, i) with each Q_i monic squarefree, pairwise
    coprime and of positive degree, sorted by multiplicity i.
    """
    if q.is_zero():
        raise PreconditionError("squarefree decomposition of zero")
    if q.degree >= q.f.p:
        raise PreconditionError("degree must stay below p for Yun's algorithm")
    if q.degree == 0:
        return []
    fq = q.monic()
    g = poly_gcd(fq, fq.deriv())
    b = fq // g
    c = fq.deriv() // g
    d = c - b.deriv()
    factors = []
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            factors.append((a, i))
        b = b // a
        c = d // a
        d = c - b.deriv()
        i += 1
    return factors


def squarefree_part(q):
    """(Q*, Q_minus) with q = lc * Q* * Q_minus and Q* = prod of distinct factors."""
    factors = yun_squarefree(q)
    f = q.f
    qstar = Poly.one(f)
    qminus = Poly.one(f)
    for base, mult in factors:
        qstar = qstar * base
        if mult > 1:
            qminus = qminus * base ** (mult - 1)
    return qstar, qminus


def taylor_shift(a, c):
    """a(x + c)."""
    f = a.f
    c = int(c) % f.p
    if c == 0 or a.is_zero():
        return a
    n = len(a.c)
    if isinstance(a.c, np.ndarray) and n - 1 < f.p:
        fact, fact_inv = f.factorial_tables(n - 1)
        c_pows = _kernels.build_powers(c, n, f.p)
        out = np.empty(n, dtype=np.int64)
        for j in range(n):
            out[j] = _kernels.shifted_coeff_sum(a.c, fact, fact_inv, c_pows, j, f.p)
        return Poly._wrap(f, out)
    p = f.p
    out = []
    for v in reversed(a.coeff_list()):
        # out <- out*(x+c) + v
        nxt = [0] * (len(out) + 1)
        for k, w in enumerate(out):
            nxt[k] = (nxt[k] + w * c) % p
            nxt[k + 1] = (nxt[k + 1] + w) % p
        nxt[0] = (nxt[0] + v) % p
        out = nxt
    return Poly(f, out)


def poly_eval(a, alpha):
    return a.eval(alpha)


def poly_interp(f, points):
    """The unique polynomial of degree < len(points) through all points."""
    xs = [int(x) % f.p for x, _ in points]
    ys = [int(y) % f.p for _, y in points]
    if len(set(xs)) != len(xs):
        raise PreconditionError("duplicate abscissa in interpolation")
    p = f.p
    n = len(points)
    if n == 0:
        return Poly.zero(f)
    # full node polynomial T = prod (x - x_i)
    t = [1]
    for xi in xs:
        nxt = [0] * (len(t) + 1)
        for k, w in enumerate(t):
            nxt[k] = (nxt[k] - w * xi) % p
            nxt[k + 1] = (nxt[k + 1] + w) % p
        t = nxt
    # barycentric weights w_i = prod_{j != i} (x_i - x_j), inverted in a batch
    ws = []
    for i in range(n):
        w = 1
        xi = xs[i]
        for j in range(n):
            if j != i:
                w = w * (xi - xs[j]) % p
        ws.append(w)
    prefix = [1] * (n + 1)
    for i in range(n):
        prefix[i + 1] = prefix[i] * ws[i] % p
    inv_all = pow(prefix[n], -1, p)
    inv_ws = [0] * n
    for i in range(n - 1, -1, -1):
        inv_ws[i] = prefix[i] * inv_all % p
        inv_all = inv_all * ws[i] % p
    out = [0] * n
    for i in range(n):
        coef = ys[i] * inv_ws[i] % p
        if coef == 0:
            continue
        # synthetic division: T / (x - x_i)
        quot = [0] * n
        carry = t[n]
        for k in range(n - 1, -1, -1):
            quot[k] = carry
            carry = (t[k] + carry * xs[i]) % p
        for k in range(n):
            out[k] = (out[k] + coef * quot[k]) % p
    return Poly(f, out)


def poly_reverse(a, r):
    """x**r * a(1/x); requires r >= deg a."""
    if not a.is_zero() and r < a.degree:
        raise PreconditionError(f"reversal order {r} below degree {a.degree}")
    out = [0] * (r + 1)
    for k, v in enumerate(a.coeff_list()):
        out[r - k] = v
    return Poly(a.f, out)
