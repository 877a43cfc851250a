"""Matrix powers and bivariate modular powers, fast path and baselines.

The fast path pulls everything back to N-th terms of C-finite sequences:
y^N mod P is read off r consecutive terms of the sequence generated by the
reciprocal of P's y-reversal; Q^N mod P reduces to t^N mod Res_y(P, t - Q);
and M^N is y^N mod charpoly(M) evaluated at M.  Binary powering serves as
the oracle and the benchmark opponent, with transform sharing inside the
matrix product so the baseline is not handicapped.

Every degenerate precondition (vanishing constant terms, vanishing
resultants) falls back to the baseline and records the event in
``fallback_log``; correctness is never sacrificed.
"""

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .holo import CFiniteSpec
from .seqterm import _order_estimate, seq_term_ct
from .upoly import Poly
from .ypoly import BiPoly, PolyMatrix, charpoly, resultant_y, ypoly_divrem

fallback_log = []


def _record_fallback(message):
    fallback_log.append(message)


# -- binary powering baselines -------------------------------------------------


def _matmul(a, b):
    """Matrix product with one shared transform per entry when sizes warrant."""
    f = a.f
    r = a.r
    n = 0
    for rows in (a.rows, b.rows):
        for row in rows:
            for e in row:
                n = max(n, len(e.c))
    size = 1 << max(2 * n - 1, 1).bit_length() if n else 1
    if (
        f.p >= _kernels.KERNEL_MODULUS_LIMIT
        or 2 * n - 1 < 512
        or not f.supports_ntt(size)
    ):
        return a * b
    w, winv, ninv = f.ntt_tables(size)
    p = f.p

    def hat(m):
        out = []
        for row in m.rows:
            orow = []
            for e in row:
                buf = np.zeros(size, dtype=np.int64)
                buf[: len(e.c)] = e.c
                _kernels.ntt(buf, w, p)
                orow.append(buf)
            out.append(orow)
        return out

    ah = hat(a)
    bh = hat(b)
    rows = []
    for i in range(r):
        row = []
        for j in range(r):
            acc = _kernels.mul_pointwise(ah[i][0], bh[0][j], p)
            for k in range(1, r):
                acc = _kernels.addmod_arrays(
                    acc, _kernels.mul_pointwise(ah[i][k], bh[k][j], p), p
                )
            _kernels.ntt(acc, winv, p)
            _kernels.ntt_scale(acc, ninv, p)
            row.append(Poly._wrap(f, acc))
        rows.append(row)
    return PolyMatrix(f, rows)


def binpow_matrix(m, N):
    """M**N by square and multiply."""
    if N < 0:
        raise PreconditionError("negative power")
    if N == 0:
        return PolyMatrix.identity(m.f, m.r)
    acc = m
    for bit in bin(N)[3:]:
        acc = _matmul(acc, acc)
        if bit == "1":
            acc = _matmul(acc, m)
    return acc


def modpow_baseline(P, Q, N):
    """Q**N mod P by square and multiply in the quotient ring."""
    if not P.is_monic_y():
        raise PreconditionError("modulus must be monic in y")
    if N < 0:
        raise PreconditionError("negative power")
    f = P.f
    if N == 0:
        return ypoly_divrem(BiPoly.one(f), P)[1] if P.degree_y == 0 else BiPoly.one(f)
    acc = ypoly_divrem(Q, P)[1]
    for bit in bin(N)[3:]:
        acc = ypoly_divrem(acc * acc, P)[1]
        if bit == "1":
            acc = ypoly_divrem(acc * Q, P)[1]
    return acc


# -- the linear-time route -----------------------------------------------------


def reciprocal_sequence_spec(P):
    """C-finite spec of the coefficients of 1 / (y-reversal of P).

    For monic P of y-degree r, the reversal has constant term 1, its
    reciprocal power series sum u_k y^k satisfies the order-r recurrence
    with c_i = -[y^i] P, and the characteristic polynomial is P itself.
    """
    f = P.f
    r = P.degree_y
    coeffs = [-P.coeff(i) for i in range(r)]
    init = [Poly.one(f)]
    for k in range(1, r):
        acc = Poly.zero(f)
        for j in range(1, k + 1):
            pj = P.coeff(r - j)  # y^j coefficient of the reversal
            if not pj.is_zero():
                acc = acc - pj * init[k - j]
        init.append(acc)
    return CFiniteSpec(f, coeffs, init)


def y_pow_mod(P, N, method="ct"):
    """y**N mod P(x,y) through r sequence terms.

    Requires P monic in y with P(x,0) != 0 (so the reversal is invertible as
    a power series); callers fall back to the baseline otherwise.
    """
    if not P.is_monic_y():
        raise PreconditionError("modulus must be monic in y")
    f = P.f
    r = P.degree_y
    if r == 0:
        return BiPoly.zero(f)
    if P.coeff(0).is_zero():
        raise PreconditionError("constant term vanishes")
    if N < r:
        return BiPoly.y_power(f, N)
    spec = reciprocal_sequence_spec(P)
    pbar = P.reverse_y(r)
    d = spec.d
    if method != "ct" or (d and N * d <= 4 * _order_estimate(spec.r, d)):
        # below the pipeline cutoff every requested term comes from one
        # shared iteration pass instead of r separate ones
        terms = spec.iterate_window(N)
    else:
        terms = [seq_term_ct(spec, N - r + 1 + t) for t in range(r)]
    u = BiPoly(f, terms)
    v = (u * pbar).truncate_y(r)
    dbound = N * max(P.degree_x(), spec.d) + r * max(P.degree_x(), 1)
    if v.degree_x() > dbound:
        raise PreconditionError("remainder exceeded its provable degree bound")
    return v.reverse_y(r - 1)


def bivmodpow(P, Q, N, method="ct"):
    """Q(x,y)**N mod P(x,y) in arithmetic time linear in N.

    The resultant A(x,t) = Res_y(P, t - Q) satisfies A(x, Q) = 0 mod P, so
    t**N mod A evaluated at t = Q gives the answer; the t-power is one
    y_pow_mod instance.  Degenerate inputs (vanishing resultant constant
    term) fall back to the baseline with a logged note.
    """
    if not P.is_monic_y():
        raise PreconditionError("modulus must be monic in y")
    f = P.f
    if N == 0:
        return modpow_baseline(P, BiPoly.one(f), 1)
    if N == 1 or method == "binary":
        return modpow_baseline(P, Q, N)
    if Q.degree_y == 0 and Q.degree_x() <= 0:
        # constant base: close the trivial case without machinery
        const = Q.coeff(0).eval(0) if not Q.is_zero() else 0
        return ypoly_divrem(BiPoly.of_poly(Poly.const(f, f.pow(const, N))), P)[1]
    a = resultant_y(P, Q)
    if a.coeff(0).is_zero():
        _record_fallback(
            "bivmodpow: resultant constant term vanished (common factor); using baseline"
        )
        return modpow_baseline(P, Q, N)
    if _is_y(Q):
        return y_pow_mod(a, N)
    b = y_pow_mod(a, N)
    # Horner in t at t = Q, reducing mod P after every step
    acc = BiPoly.zero(f)
    for j in range(b.degree_y, -1, -1):
        if not acc.is_zero():
            acc = ypoly_divrem(acc * Q, P)[1]
        cj = b.coeff(j)
        if not cj.is_zero():
            acc = acc + BiPoly.of_poly(cj)
    return ypoly_divrem(acc, P)[1]


def _is_y(Q):
    return Q.degree_y == 1 and Q.coeff(0).is_zero() and Q.coeff(1) == Poly.one(Q.f)


def polmatpow(m, N, method="ct"):
    """M(x)**N via y**N mod charpoly(M), evaluated at M by Cayley-Hamilton.

    Singular matrices (vanishing determinant makes the charpoly constant
    term zero) fall back to binary powering with a logged note.
    """
    f = m.f
    if N < 0:
        raise PreconditionError("negative power")
    if N == 0:
        return PolyMatrix.identity(f, m.r)
    if method == "binary":
        return binpow_matrix(m, N)
    d = m.d
    if d > 0 and N * d + _order_estimate(m.r, d) >= f.p:
        raise PreconditionError(
            f"prime {f.p} too small for matrix power of degree {N * d}"
        )
    chi = charpoly(m)
    if chi.coeff(0).is_zero():
        _record_fallback("polmatpow: singular matrix (det = 0); using binary powering")
        return binpow_matrix(m, N)
    rem = y_pow_mod(chi, N)
    # Horner in y at y = M; the multiplier keeps degree d, so each step is
    # a rectangular product of a long polynomial by a short one
    r = m.r
    acc = None
    for j in range(rem.degree_y, -1, -1):
        if acc is not None:
            acc = acc * m
        else:
            acc = PolyMatrix(f, [[Poly.zero(f)] * r for _ in range(r)])
        cj = rem.coeff(j)
        if not cj.is_zero():
            for i in range(r):
                acc.rows[i][i] = acc.rows[i][i] + cj
    return acc
