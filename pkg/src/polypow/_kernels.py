"""Compiled arithmetic kernels.

Everything here works on int64 numpy arrays holding canonical residues and
assumes the modulus is below 2**50, so that the floating-point reciprocal
trick yields exact modular products (the 53-bit mantissa bounds the error of
the estimated quotient by 1).  The Poly layer is responsible for routing
larger moduli to plain-Python code paths.

Kernels are compiled lazily on first use and cached on disk by numba.
"""

import numpy as np
from numba import njit, int64, float64

I64 = np.int64

# Moduli must stay below this for the float-reciprocal product to be exact.
KERNEL_MODULUS_LIMIT = 1 << 50


@njit(inline="always", cache=True)
def _mm(a, b, p, pinv):
    q = int64(float64(a) * float64(b) * pinv)
    r = a * b - q * p  # wraps mod 2**64; true value lies in (-p, 2p)
    if r < 0:
        r += p
    elif r >= p:
        r -= p
    return r


@njit(inline="always", cache=True)
def _pw(a, e, p, pinv):
    r = 1 % p
    b = a % p
    while e > 0:
        if e & 1:
            r = _mm(r, b, p, pinv)
        b = _mm(b, b, p, pinv)
        e >>= 1
    return r


@njit(cache=True)
def powmod(a, e, p):
    return _pw(a, e, p, 1.0 / p)


@njit(cache=True)
def mul_scalar(a, c, p):
    pinv = 1.0 / p
    out = np.empty(a.shape[0], dtype=np.int64)
    for i in range(a.shape[0]):
        out[i] = _mm(a[i], c, p, pinv)
    return out


@njit(cache=True)
def mul_pointwise(a, b, p):
    pinv = 1.0 / p
    out = np.empty(a.shape[0], dtype=np.int64)
    for i in range(a.shape[0]):
        out[i] = _mm(a[i], b[i], p, pinv)
    return out


@njit(cache=True)
def addmod_arrays(a, b, p):
    out = np.empty(a.shape[0], dtype=np.int64)
    for i in range(a.shape[0]):
        v = a[i] + b[i]
        if v >= p:
            v -= p
        out[i] = v
    return out


@njit(cache=True)
def poly_mul_rect(a, b, p):
    """Schoolbook product; O(len(a)*len(b)) products."""
    pinv = 1.0 / p
    na = a.shape[0]
    nb = b.shape[0]
    out = np.zeros(na + nb - 1, dtype=np.int64)
    for i in range(na):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(nb):
            v = out[i + j] + _mm(ai, b[j], p, pinv)
            if v >= p:
                v -= p
            out[i + j] = v
    return out


@njit(cache=True)
def build_powers(w, n, p):
    """[1, w, w**2, ..., w**(n-1)] mod p."""
    pinv = 1.0 / p
    out = np.empty(n, dtype=np.int64)
    acc = 1 % p
    for i in range(n):
        out[i] = acc
        acc = _mm(acc, w, p, pinv)
    return out


@njit(cache=True)
def ntt(a, w_pows, p):
    """In-place radix-2 transform; w_pows[i] = w**i for a primitive len(a)-th root w."""
    pinv = 1.0 / p
    n = a.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            t = a[i]
            a[i] = a[j]
            a[j] = t
    length = 2
    while length <= n:
        half = length >> 1
        step = n // length
        for i in range(0, n, length):
            idx = 0
            for k in range(i, i + half):
                u = a[k]
                v = _mm(a[k + half], w_pows[idx], p, pinv)
                s = u + v
                if s >= p:
                    s -= p
                d = u - v
                if d < 0:
                    d += p
                a[k] = s
                a[k + half] = d
                idx += step
        length <<= 1


@njit(cache=True)
def ntt_scale(a, ninv, p):
    pinv = 1.0 / p
    for i in range(a.shape[0]):
        a[i] = _mm(a[i], ninv, p, pinv)


@njit(cache=True)
def garner3(r1, r2, r3, m1, m2, m3, inv1_2, inv1_3, inv2_3, m1_p, m12_p, p):
    """Recombine residues mod three coprime moduli into residues mod p."""
    p2 = 1.0 / m2
    p3 = 1.0 / m3
    pp = 1.0 / p
    n = r1.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        t1 = r1[i]
        d2 = (r2[i] - t1) % m2
        t2 = _mm(d2, inv1_2, m2, p2)
        d3 = (r3[i] - t1) % m3
        d3 = (_mm(d3, inv1_3, m3, p3) - t2) % m3
        t3 = _mm(d3, inv2_3, m3, p3)
        v = t1 % p
        v += _mm(t2 % p, m1_p, p, pp)
        if v >= p:
            v -= p
        v += _mm(t3 % p, m12_p, p, pp)
        if v >= p:
            v -= p
        out[i] = v
    return out


@njit(cache=True)
def poly_divmod_kernel(a, b, inv_lead, p):
    """Remainder of a by b written into a copy; returns (quotient, remainder)."""
    pinv = 1.0 / p
    na = a.shape[0]
    nb = b.shape[0]
    r = a.copy()
    q = np.zeros(na - nb + 1, dtype=np.int64)
    for i in range(na - nb, -1, -1):
        top = r[i + nb - 1]
        if top == 0:
            continue
        c = _mm(top, inv_lead, p, pinv)
        q[i] = c
        for j in range(nb):
            v = r[i + j] - _mm(c, b[j], p, pinv)
            if v < 0:
                v += p
            r[i + j] = v
    return q, r[: nb - 1]


@njit(cache=True)
def poly_gcd_kernel(a, b, p):
    """Monic gcd by the Euclidean remainder chain."""
    pinv = 1.0 / p
    x = a.copy()
    y = b.copy()
    nx = x.shape[0]
    ny = y.shape[0]
    while ny > 0:
        # reduce x by y in place
        inv_lead = _pw(y[ny - 1], p - 2, p, pinv)
        i = nx - ny
        while i >= 0:
            top = x[i + ny - 1]
            if top != 0:
                c = _mm(top, inv_lead, p, pinv)
                for j in range(ny):
                    v = x[i + j] - _mm(c, y[j], p, pinv)
                    if v < 0:
                        v += p
                    x[i + j] = v
            i -= 1
        nr = ny - 1
        while nr > 0 and x[nr - 1] == 0:
            nr -= 1
        t = y
        y = x[:nr].copy()
        x = t
        nx = ny
        ny = nr
    lead = x[nx - 1]
    if lead != 1:
        inv_lead = _pw(lead, p - 2, p, pinv)
        for i in range(nx):
            x[i] = _mm(x[i], inv_lead, p, pinv)
    return x[:nx]


@njit(cache=True)
def eval_range(coeffs, start, count, p):
    """[poly(start + t) mod p for t < count] by per-point Horner."""
    pinv = 1.0 / p
    deg = coeffs.shape[0] - 1
    out = np.empty(count, dtype=np.int64)
    for t in range(count):
        k = (start + t) % p
        acc = coeffs[deg]
        for j in range(deg - 1, -1, -1):
            acc = _mm(acc, k, p, pinv)
            acc += coeffs[j]
            if acc >= p:
                acc -= p
        out[t] = acc
    return out


@njit(cache=True)
def batch_inverse(vals, p):
    """Inverses of all nonzero entries in one pass; zeros map to zero."""
    pinv = 1.0 / p
    n = vals.shape[0]
    pref = np.empty(n, dtype=np.int64)
    run = 1
    for i in range(n):
        pref[i] = run
        if vals[i] != 0:
            run = _mm(run, vals[i], p, pinv)
    run = _pw(run, p - 2, p, pinv)
    out = np.empty(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        if vals[i] != 0:
            out[i] = _mm(run, pref[i], p, pinv)
            run = _mm(run, vals[i], p, pinv)
        else:
            out[i] = 0
    return out


@njit(cache=True)
def _fd_tables(ptab, degs, p):
    """Forward-difference tables of every coefficient polynomial at k = 0."""
    pinv = 1.0 / p
    rows = ptab.shape[0]
    width = ptab.shape[1]
    fd = np.zeros((rows, width), dtype=np.int64)
    for t in range(rows):
        dt = degs[t]
        for k in range(dt + 1):
            km = k % p
            acc = ptab[t, dt]
            for j in range(dt - 1, -1, -1):
                acc = _mm(acc, km, p, pinv)
                acc += ptab[t, j]
                if acc >= p:
                    acc -= p
            fd[t, k] = acc
        for lvl in range(1, dt + 1):
            for j in range(dt, lvl - 1, -1):
                v = fd[t, j] - fd[t, j - 1]
                if v < 0:
                    v += p
                fd[t, j] = v
    return fd


@njit(cache=True)
def unroll_kernel(ptab, degs, init, K, sing_idx, sing_val, p):
    """Run the recurrence sum_t p_t(k) c_{k+t} = 0 forward up to index K.

    ptab holds the coefficient rows of p_0..p_s (low degree first, padded);
    degs the true degrees.  Coefficient values advance by forward
    differences, so each step costs one modular product per term plus cheap
    additions.  Wherever p_s(k) = 0 the value c_{k+s} is taken from the
    sorted (sing_idx, sing_val) table, which the caller has already
    validated to cover every such index.
    """
    pinv = 1.0 / p
    s = ptab.shape[0] - 1
    c = np.zeros(K + 1, dtype=np.int64)
    for i in range(min(s, K + 1)):
        c[i] = init[i]
    if K < s:
        return c
    nsteps = K - s + 1
    # leading values over the whole range, by forward differences
    lead = np.empty(nsteps, dtype=np.int64)
    dl = degs[s]
    fd_lead = _fd_tables(ptab[s : s + 1], degs[s : s + 1], p)[0]
    for k in range(nsteps):
        lead[k] = fd_lead[0]
        for j in range(dl):
            v = fd_lead[j] + fd_lead[j + 1]
            if v >= p:
                v -= p
            fd_lead[j] = v
    inv = batch_inverse(lead, p)
    fd = _fd_tables(ptab[:s], degs[:s], p) if s > 0 else np.zeros((0, 1), dtype=np.int64)
    ptr = 0
    for k in range(nsteps):
        if lead[k] == 0:
            while ptr < sing_idx.shape[0] and sing_idx[ptr] < k + s:
                ptr += 1
            c[k + s] = sing_val[ptr]
        else:
            acc = 0
            for t in range(s):
                acc += _mm(fd[t, 0], c[k + t], p, pinv)
                if acc >= p:
                    acc -= p
            acc = _mm(acc, inv[k], p, pinv)
            c[k + s] = (p - acc) % p
        for t in range(s):
            dt = degs[t]
            for j in range(dt):
                v = fd[t, j] + fd[t, j + 1]
                if v >= p:
                    v -= p
                fd[t, j] = v
    return c


@njit(cache=True)
def mat_mul_trunc(A, B, p):
    """Product of r x r matrices of truncated polynomials, mod x**s.

    A, B have shape (r, r, s) with coefficient index last.
    """
    pinv = 1.0 / p
    r = A.shape[0]
    s = A.shape[2]
    C = np.zeros((r, r, s), dtype=np.int64)
    for i in range(r):
        for k in range(r):
            for j in range(r):
                a = A[i, k]
                b = B[k, j]
                c = C[i, j]
                for u in range(s):
                    au = a[u]
                    if au == 0:
                        continue
                    for v in range(s - u):
                        w = c[u + v] + _mm(au, b[v], p, pinv)
                        if w >= p:
                            w -= p
                        c[u + v] = w
    return C


@njit(cache=True)
def mat_vec_trunc(A, x, p):
    """Truncated product of an (r, r, s) matrix with an (r, s) vector."""
    pinv = 1.0 / p
    r = A.shape[0]
    s = A.shape[2]
    y = np.zeros((r, s), dtype=np.int64)
    for i in range(r):
        for k in range(r):
            a = A[i, k]
            b = x[k]
            c = y[i]
            for u in range(s):
                au = a[u]
                if au == 0:
                    continue
                for v in range(s - u):
                    w = c[u + v] + _mm(au, b[v], p, pinv)
                    if w >= p:
                        w -= p
                    c[u + v] = w
    return y


@njit(cache=True)
def dot_mod(a, b, p):
    pinv = 1.0 / p
    acc = 0
    for i in range(a.shape[0]):
        acc += _mm(a[i], b[i], p, pinv)
        if acc >= p:
            acc -= p
    return acc


@njit(cache=True)
def factorial_arrays(limit, p):
    """(k!, (k!)^-1) for k = 0..limit; requires limit < p."""
    pinv = 1.0 / p
    fact = np.empty(limit + 1, dtype=np.int64)
    inv = np.empty(limit + 1, dtype=np.int64)
    acc = 1 % p
    for k in range(limit + 1):
        fact[k] = acc
        acc = _mm(acc, (k + 1) % p, p, pinv)
    acc = _pw(fact[limit], p - 2, p, pinv)
    for k in range(limit, -1, -1):
        inv[k] = acc
        acc = _mm(acc, k % p, p, pinv)
    return fact, inv


@njit(cache=True)
def shifted_coeff_sum(dvec, fact, invfact, negc_pows, i, p):
    """sum_k dvec[k] * C(k, i) * negc_pows[k-i] mod p."""
    pinv = 1.0 / p
    n = dvec.shape[0]
    acc = 0
    fi = invfact[i]
    for k in range(i, n):
        dk = dvec[k]
        if dk == 0:
            continue
        t = _mm(dk, fact[k], p, pinv)
        t = _mm(t, fi, p, pinv)
        t = _mm(t, invfact[k - i], p, pinv)
        t = _mm(t, negc_pows[k - i], p, pinv)
        acc += t
        if acc >= p:
            acc -= p
    return acc
