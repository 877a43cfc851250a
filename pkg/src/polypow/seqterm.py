"""N-th term of a polynomial C-finite sequence in O(N) field operations.

The pipeline: build the rational generating function, derive an operator of
N-independent size for the coefficient sequence of u_N (specialized at
N mod p), convert it to a recurrence, obtain the first coefficients by
companion-matrix powering mod x^s, and unroll.  Whenever the recurrence's
leading polynomial vanishes inside the range, the missing coefficients are
recovered through the same machinery run at a shifted, ordinary point.

The reduction recipe depends only on the sequence definition, not on N,
and is cached process-wide; per N only a small relation solve remains.
"""

import threading
import time

import numpy as np

from . import _kernels
from .errors import PolypowError, PreconditionError, VerificationError
from .holo import (
    CFiniteSpec,
    choose_ordinary_point,
    companion_pow_mod,
    detect_problem_indices,
    ode_to_rec,
    recover_coefficients,
    shift_ode,
    unroll,
)
from .telescope import build_recipe, telescoper_from_recipe
from .upoly import Poly
from .ypoly import BiPoly, BiRat

_recipe_cache = {}
_recipe_lock = threading.Lock()


def generic_operator_degree_x(r, d):
    """Empirical x-degree of the derived operator for random order-r degree-d input."""
    return d * r * (r + 1) * (2 * r - 1) // 2 - r * (r - 1)


def generic_operator_degree_n(r):
    return (r - 1) * (r + 2) // 2


def _order_estimate(r, d):
    return r + max(1, generic_operator_degree_x(r, d))


def genfunc(spec):
    """Rational generating function sum u_n y^n of the sequence.

    The denominator is 1 - c_{r-1} y - ... - c_0 y^r (the y-reversal of the
    characteristic polynomial), with constant term 1; the numerator collects
    the initial conditions.
    """
    f = spec.f
    r = spec.r
    den = [Poly.one(f)] + [-spec.c[r - j] for j in range(1, r + 1)]
    num = []
    for k in range(r):
        v = spec.init[k]
        for j in range(1, k + 1):
            if not spec.c[r - j].is_zero():
                v = v - spec.c[r - j] * spec.init[k - j]
        num.append(v)
    return BiRat(BiPoly(f, num), BiPoly(f, den))


def get_recipe(spec):
    """Process-wide cache of reduction recipes, keyed by the spec itself."""
    key = spec.key()
    recipe = _recipe_cache.get(key)
    if recipe is not None:
        return recipe
    with _recipe_lock:
        recipe = _recipe_cache.get(key)
        if recipe is None:
            recipe = build_recipe(genfunc(spec))
            _recipe_cache[key] = recipe
        return recipe


def clear_recipe_cache():
    with _recipe_lock:
        _recipe_cache.clear()


def _assemble_poly(f, cvec, upto):
    if isinstance(cvec, np.ndarray):
        return Poly._wrap(f, cvec[: upto + 1].copy())
    return Poly(f, list(cvec[: upto + 1]), normalized=False)


def seq_term_ct(spec, N, force_ct=False, timings=None):
    """u_N(x), exactly.

    Small N (N*d within four recurrence orders) falls back to direct
    iteration, and constant-coefficient input goes straight through exact
    companion powering; everything else runs the full pipeline.  When a
    ``timings`` dict is supplied, per-stage wall-clock nanoseconds are
    recorded under "CT" (operator derivation), "IT" (initial terms) and
    "UR" (unrolling).
    """
    f = spec.f
    p = f.p
    if N < 0:
        raise PreconditionError("negative index")
    if N < spec.r:
        return spec.init[N]
    d = spec.d
    if d == 0:
        # no degree growth: exact companion powering at full precision
        s_exact = max((q.degree for q in spec.init if not q.is_zero()), default=0) + 1
        return Poly(f, companion_pow_mod(spec, N, s_exact))
    s_est = _order_estimate(spec.r, d)
    if N * d + s_est >= p:
        raise PreconditionError(
            f"prime {p} too small for N*d + s = {N * d + s_est} (seqterm entry check)"
        )
    if not force_ct and N * d <= 4 * s_est:
        return spec.iterate(N)

    t0 = time.perf_counter_ns()
    recipe = get_recipe(spec)
    op = telescoper_from_recipe(recipe, N % p)
    rec = ode_to_rec(op)
    t1 = time.perf_counter_ns()
    bound = N * d + spec.init_excess
    K = bound + rec.s
    if K >= p:
        raise PreconditionError(f"prime {p} too small for coefficient range {K}")
    stage = {} if timings is not None else None
    cvec = _unroll_with_repair(spec, op, rec, N, K, allow_shift=True, stage=stage)
    for t in range(bound + 1, K + 1):
        if int(cvec[t]) != 0:
            raise VerificationError(
                f"tail coefficient {t} beyond the degree bound {bound} is nonzero"
            )
    if timings is not None:
        timings["CT"] = timings.get("CT", 0) + (t1 - t0)
        timings["IT"] = timings.get("IT", 0) + stage.get("IT", 0)
        timings["UR"] = timings.get("UR", 0) + stage.get("UR", 0)
        timings["REPAIR"] = timings.get("REPAIR", 0) + stage.get("REPAIR", 0)
    return _assemble_poly(f, cvec, bound)


def _unroll_with_repair(spec, op, rec, N, K, allow_shift, stage=None):
    """Unroll the recurrence for u_N over [0, K], repairing singular indices.

    Singular indices no larger than s + order are initial-condition
    territory and come from companion powering with a longer truncation
    (at an ordinary point the leading polynomial is a pure falling factorial,
    so all its roots fall in that range).  Deeper singular indices require a
    Taylor shift to an ordinary point; inside the shifted solve they would
    signal a bug, hence allow_shift=False there.  Indices reachable by both
    routes are cross-checked.
    """
    f = spec.f
    s = rec.s
    problems = detect_problem_indices(rec, K)
    cutoff = s + op.order
    small = [i for i in problems if i <= cutoff]
    large = [i for i in problems if i > cutoff]
    known = {}
    t0 = time.perf_counter_ns()
    if small:
        vals = companion_pow_mod(spec, N, max(small) + 1)
        for i in small:
            known[i] = vals[i]
    if large:
        if not allow_shift:
            raise PolypowError(
                "singular index persists at an ordinary point; "
                "this indicates a bug or a degenerate operator"
            )
        known.update(_recover_via_shift(spec, op, N, problems, small, known))
    t1 = time.perf_counter_ns()
    init = companion_pow_mod(spec, N, s) if s > 0 else []
    t2 = time.perf_counter_ns()
    cvec = unroll(rec, init, K, known)
    t3 = time.perf_counter_ns()
    if stage is not None:
        stage["REPAIR"] = stage.get("REPAIR", 0) + (t1 - t0)
        stage["IT"] = stage.get("IT", 0) + (t2 - t1)
        stage["UR"] = stage.get("UR", 0) + (t3 - t2)
    return cvec


def _recover_via_shift(spec, op, N, problems, small, known_small):
    """Unroll at an ordinary point and undo the Taylor shift at the targets."""
    f = spec.f
    bound = N * spec.d + spec.init_excess
    c = choose_ordinary_point(op)
    op_v = shift_ode(op, c)
    rec_v = ode_to_rec(op_v)
    K_v = bound + rec_v.s
    if K_v >= f.p:
        raise PreconditionError(f"prime {f.p} too small for shifted range {K_v}")
    spec_v = spec.shifted(c)
    d_vec = _unroll_with_repair(spec_v, op_v, rec_v, N, K_v, allow_shift=False)
    for t in range(bound + 1, K_v + 1):
        if int(d_vec[t]) != 0:
            raise VerificationError("shifted solution violates its degree bound")
    recovered = recover_coefficients(d_vec, c, problems, f)
    for i in small:
        if recovered[i] != known_small[i]:
            raise VerificationError(
                f"coefficient {i} disagrees between companion powering "
                f"({known_small[i]}) and the shifted solve ({recovered[i]})"
            )
    return {i: recovered[i] for i in problems if i not in small}


def fib_closed_form(N, f):
    """Fibonacci polynomial F_N by direct summation of its binomial expansion.

    F_N(x) = sum_l C(N-l-1, l) x^(N-2l-1); serves as an independent oracle
    for the pipeline.
    """
    if N < 1:
        raise PreconditionError("index must be positive")
    if N - 1 >= f.p:
        raise PreconditionError("prime too small for the binomial range")
    fact, fact_inv = f.factorial_tables(max(N - 1, 1))
    p = f.p
    half = (N - 1) // 2
    if f.p < _kernels.KERNEL_MODULUS_LIMIT:
        ls = np.arange(half + 1, dtype=np.int64)
        top = np.asarray(fact)[N - 1 - ls]
        inv1 = np.asarray(fact_inv)[ls]
        inv2 = np.asarray(fact_inv)[N - 1 - 2 * ls]
        vals = _kernels.mul_pointwise(_kernels.mul_pointwise(top, inv1, p), inv2, p)
        coeffs = np.zeros(N, dtype=np.int64)
        coeffs[N - 1 - 2 * ls] = vals
        return Poly._wrap(f, coeffs)
    coeffs = [0] * N
    for l in range(half + 1):
        v = int(fact[N - 1 - l]) * int(fact_inv[l]) % p * int(fact_inv[N - 1 - 2 * l]) % p
        coeffs[N - 1 - 2 * l] = v
    return Poly(f, coeffs, normalized=False)


def fibonacci_spec(f):
    """F_{n+2} = x F_{n+1} + F_n with F_0 = 0, F_1 = 1."""
    return CFiniteSpec(f, [Poly.one(f), Poly.x(f)], [Poly.zero(f), Poly.one(f)])
