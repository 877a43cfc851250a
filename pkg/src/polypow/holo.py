"""Holonomic toolkit: recurrences from operators, initial terms, unrolling.

The conversion from a differential operator to a recurrence acts on
monomials by  x^j d^i : x^k -> k(k-1)...(k-i+1) x^(k-i+j),  collects shifts,
and reindexes so the lowest shift is zero.  The resulting relation
sum_t p_t(k) c_{k+t} = 0 then holds for every k >= 0 with the convention
c_j = 0 for j < 0; the falling factorials silently kill all out-of-range
terms, so no base-case offsets need special treatment.

Unrolling is the linear-time core: one pass over k with batched inversions
of the leading values.  Indices where the leading polynomial vanishes must
be supplied by the caller ("problem indices"); the repair machinery
recovers them from a Taylor shift of the solution to an ordinary point.
"""

import numpy as np

from . import _kernels
from .errors import PolypowError, PreconditionError, SingularUnroll
from .upoly import Poly, taylor_shift

_KLIMIT = _kernels.KERNEL_MODULUS_LIMIT


class Rec:
    """Linear recurrence sum_t p_t(k) c_{k+t} = 0 for all k >= 0."""

    __slots__ = ("f", "k_coeffs")

    def __init__(self, f, k_coeffs):
        k_coeffs = list(k_coeffs)
        while k_coeffs and k_coeffs[-1].is_zero():
            k_coeffs.pop()
        if not k_coeffs:
            raise PreconditionError("empty recurrence")
        self.f = f
        self.k_coeffs = k_coeffs

    @property
    def s(self):
        return len(self.k_coeffs) - 1

    def __eq__(self, other):
        if not isinstance(other, Rec):
            return NotImplemented
        return self.f.p == other.f.p and self.k_coeffs == other.k_coeffs

    def __repr__(self):
        return "Rec[" + "; ".join(repr(q) for q in self.k_coeffs) + "]"

    def check(self, values, k):
        """Exact relation residue at index k for a computed prefix."""
        acc = 0
        for t, q in enumerate(self.k_coeffs):
            acc = (acc + q.eval(k) * int(values[k + t])) % self.f.p
        return acc


class CFiniteSpec:
    """Order-r recurrence u_{n+r} = c_{r-1} u_{n+r-1} + ... + c_0 u_n with initials."""

    __slots__ = ("f", "r", "c", "init", "d")

    def __init__(self, f, c, init):
        if len(c) != len(init) or not c:
            raise PreconditionError("need r coefficients and r initial polynomials")
        self.f = f
        self.r = len(c)
        self.c = list(c)
        self.init = list(init)
        self.d = max((q.degree for q in self.c if not q.is_zero()), default=0)

    def key(self):
        parts = [self.f.p, self.r]
        for q in self.c:
            parts.append(tuple(int(v) for v in q.c))
        for q in self.init:
            parts.append(tuple(int(v) for v in q.c))
        return tuple(parts)

    @property
    def init_excess(self):
        """How far the initial values overshoot the j*d degree profile.

        deg u_n <= n*d + init_excess for every n; zero whenever the initial
        values follow the matrix-power convention deg u_j <= j*d.
        """
        best = 0
        for j, q in enumerate(self.init):
            if not q.is_zero():
                best = max(best, q.degree - j * self.d)
        return best

    def iterate(self, n):
        """u_n by direct iteration; quadratic in n, used below the fallback cutoff."""
        return self.iterate_window(n)[-1]

    def iterate_window(self, n):
        """[u_{n-r+1}, ..., u_n] in one pass (indices below zero are dropped)."""
        if n < self.r:
            return list(self.init[: n + 1])
        window = list(self.init)
        for _ in range(n - self.r + 1):
            nxt = Poly.zero(self.f)
            for i in range(self.r):
                if not self.c[i].is_zero():
                    nxt = nxt + self.c[i] * window[i]
            window = window[1:] + [nxt]
        return window

    def shifted(self, alpha):
        """Spec for v_n(x) = u_n(x + alpha)."""
        return CFiniteSpec(
            self.f,
            [taylor_shift(q, alpha) for q in self.c],
            [taylor_shift(q, alpha) for q in self.init],
        )


def _falling_factorial_poly(f, i, shift):
    """prod_{m=0}^{i-1} (k + shift - m) as a Poly in k."""
    acc = Poly.one(f)
    for m in range(i):
        acc = acc * Poly(f, [shift - m, 1])
    return acc


def ode_to_rec(op):
    """Recurrence satisfied by the coefficient sequence of any solution of op.

    The order s is at most order + max coefficient degree; relations are
    reindexed to nonnegative shifts and remain valid from k = 0 on.
    """
    if op.coeffs is None:
        raise PreconditionError("operator must have scalar coefficients")
    f = op.f
    pairs = []
    for i, q in enumerate(op.coeffs):
        for j, v in enumerate(q.coeff_list()):
            if v:
                pairs.append((i, j, v))
    if not pairs:
        raise PreconditionError("zero operator")
    tmin = min(i - j for i, j, _ in pairs)
    tmax = max(i - j for i, j, _ in pairs)
    s = tmax - tmin
    coeffs = [Poly.zero(f) for _ in range(s + 1)]
    for i, j, v in pairs:
        t = i - j - tmin
        coeffs[t] = coeffs[t] + _falling_factorial_poly(f, i, t).mul_scalar(v)
    if coeffs[-1].is_zero() or coeffs[0].is_zero():
        # cannot happen: the extreme-shift slots each contain a single
        # highest-order falling factorial whose leading term survives
        raise PolypowError("degenerate recurrence extraction")
    return Rec(f, coeffs)


def _rec_tables(rec):
    s = rec.s
    maxdeg = max(max(q.degree, 0) if not q.is_zero() else 0 for q in rec.k_coeffs)
    ptab = np.zeros((s + 1, maxdeg + 1), dtype=np.int64)
    degs = np.zeros(s + 1, dtype=np.int64)
    for t, q in enumerate(rec.k_coeffs):
        cl = q.coeff_list()
        for j, v in enumerate(cl):
            ptab[t, j] = v
        degs[t] = max(len(cl) - 1, 0)
    return ptab, degs


def detect_problem_indices(rec, K):
    """{ k + s : 0 <= k <= K - s, p_s(k) = 0 } by a direct scan."""
    f = rec.f
    if K >= f.p:
        raise PreconditionError("coefficient range reaches the prime")
    s = rec.s
    if K < s:
        return []
    lead = rec.k_coeffs[s]
    count = K - s + 1
    if f.p < _KLIMIT:
        vals = _kernels.eval_range(
            np.array(lead.coeff_list() or [0], dtype=np.int64), 0, count, f.p
        )
        return [int(k) + s for k in np.nonzero(vals == 0)[0]]
    return [k + s for k in range(count) if lead.eval(k) == 0]


def unroll(rec, init, K, known=None):
    """c_0..c_K satisfying the relation, given s initial values.

    ``known`` maps problem indices (where the leading polynomial vanishes)
    to their values; a missing entry raises SingularUnroll naming the index.
    Returns an int64 array for kernel-capable primes, else a list.
    """
    f = rec.f
    p = f.p
    if K >= p:
        raise PreconditionError(f"unroll range {K} reaches the prime {p}")
    s = rec.s
    if len(init) != s:
        raise PreconditionError(f"need exactly {s} initial values, got {len(init)}")
    known = known or {}
    problems = detect_problem_indices(rec, K)
    for idx in problems:
        if idx not in known:
            raise SingularUnroll(idx)
    if p < _KLIMIT:
        ptab, degs = _rec_tables(rec)
        sing_idx = np.array(problems, dtype=np.int64)
        sing_val = np.array([int(known[i]) % p for i in problems], dtype=np.int64)
        init_arr = np.array([int(v) % p for v in init], dtype=np.int64)
        return _kernels.unroll_kernel(ptab, degs, init_arr, K, sing_idx, sing_val, p)
    # plain-Python lane for very large primes
    c = [0] * (K + 1)
    for i in range(min(s, K + 1)):
        c[i] = int(init[i]) % p
    problem_set = set(problems)
    for k in range(K - s + 1):
        if k + s in problem_set:
            c[k + s] = int(known[k + s]) % p
            continue
        lead = rec.k_coeffs[s].eval(k)
        acc = 0
        for t in range(s):
            acc = (acc + rec.k_coeffs[t].eval(k) * c[k + t]) % p
        c[k + s] = (-acc * pow(lead, -1, p)) % p
    return c


def companion_pow_mod(spec, N, s):
    """First s coefficients of u_N, all arithmetic truncated mod x**s."""
    if s < 1:
        raise PreconditionError("truncation order must be positive")
    f = spec.f
    p = f.p
    r = spec.r
    if N < r:
        out = spec.init[N].coeff_list()[:s]
        return out + [0] * (s - len(out))
    if p < _KLIMIT:
        C = np.zeros((r, r, s), dtype=np.int64)
        for i in range(r - 1):
            C[i, i + 1, 0] = 1
        for j in range(r):
            for e, v in enumerate(spec.c[j].coeff_list()[:s]):
                C[r - 1, j, e] = v
        acc = np.zeros((r, r, s), dtype=np.int64)
        for i in range(r):
            acc[i, i, 0] = 1
        base = C
        e = N - r + 1
        while e:
            if e & 1:
                acc = _kernels.mat_mul_trunc(acc, base, p)
            e >>= 1
            if e:
                base = _kernels.mat_mul_trunc(base, base, p)
        state = np.zeros((r, s), dtype=np.int64)
        for i in range(r):
            for e2, v in enumerate(spec.init[i].coeff_list()[:s]):
                state[i, e2] = v
        out = _kernels.mat_vec_trunc(acc, state, p)
        return [int(v) for v in out[r - 1]]
    # plain-Python truncated powering
    def mul(A, B):
        out = [[[0] * s for _ in range(r)] for _ in range(r)]
        for i in range(r):
            for k in range(r):
                a = A[i][k]
                for j in range(r):
                    b = B[k][j]
                    o = out[i][j]
                    for u in range(s):
                        au = a[u]
                        if au:
                            for v in range(s - u):
                                o[u + v] = (o[u + v] + au * b[v]) % p
        return out

    C = [[[0] * s for _ in range(r)] for _ in range(r)]
    for i in range(r - 1):
        C[i][i + 1][0] = 1
    for j in range(r):
        for e, v in enumerate(spec.c[j].coeff_list()[:s]):
            C[r - 1][j][e] = v
    acc = [[[1 if (i == j and u == 0) else 0 for u in range(s)] for j in range(r)] for i in range(r)]
    base = C
    e = N - r + 1
    while e:
        if e & 1:
            acc = mul(acc, base)
        e >>= 1
        if e:
            base = mul(base, base)
    out = [0] * s
    for j in range(r):
        b = spec.init[j].coeff_list()[:s]
        a = acc[r - 1][j]
        for u in range(s):
            au = a[u]
            if au:
                for v in range(min(len(b), s - u)):
                    out[u + v] = (out[u + v] + au * b[v]) % p
    return out


def choose_ordinary_point(op):
    """Smallest c in {1, 2, ...} where the leading coefficient does not vanish."""
    lead = op.coeffs[-1]
    if lead.is_zero():
        raise PreconditionError("operator with zero leading coefficient")
    c = 1
    while lead.eval(c) == 0:
        c += 1
    return c


def shift_ode(op, c):
    """Operator for v(x) = u(x + c): every coefficient is Taylor-shifted."""
    from .telescope import DiffOp

    return DiffOp(op.f, [taylor_shift(q, c) for q in op.coeffs], normalize=False)


def recover_coefficients(d_vec, c, targets, f):
    """Coefficients of v(x - c) at the target indices, given v's coefficients.

    Uses  u_i = sum_k d_k * C(k, i) * (-c)**(k-i),  one O(len(d_vec)) pass
    per target.
    """
    out = {}
    if not targets:
        return out
    p = f.p
    n = len(d_vec)
    if n == 0:
        return {i: 0 for i in targets}
    fact, fact_inv = f.factorial_tables(n - 1)
    negc = (-int(c)) % p
    if p < _KLIMIT:
        dv = np.asarray(d_vec, dtype=np.int64)
        pows = _kernels.build_powers(negc, n, p)
        for i in targets:
            if i >= n:
                out[i] = 0
            else:
                out[i] = int(_kernels.shifted_coeff_sum(dv, fact, fact_inv, pows, i, p))
        return out
    pows = [1] * n
    for k in range(1, n):
        pows[k] = pows[k - 1] * negc % p
    for i in targets:
        acc = 0
        for k in range(i, n):
            dk = int(d_vec[k])
            if dk:
                term = dk * int(fact[k]) % p * int(fact_inv[i]) % p
                term = term * int(fact_inv[k - i]) % p * pows[k - i] % p
                acc = (acc + term) % p
        out[i] = acc
    return out
