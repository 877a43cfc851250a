"""Reduction-based derivation of differential operators for coefficient sequences.

Given a rational generating function U(x,y) whose y-coefficients form the
sequence of interest, the derivatives of U(x,y)/y^(n+1) with respect to x
are reduced modulo exact y-derivatives.  Every derivative leaves a residual
whose y-degree is capped by the squarefree part of the denominator, so
finitely many derivatives admit a linear relation over F_p(x); the relation
coefficients are the operator.

Two reduction entry points exist.  ``param_reduce`` performs the full
parameterized reduction at a scalar parameter value, producing certificate
and residual.  ``residual_series`` runs the same recursion with the
parameter factored out, returning slices a_j with
b(lam) = sum_j lam**j * a_j; the slices are parameter-free, which is what
makes caching across many exponents possible.

Denominators travel through the recursion in factored form (pairwise-coprime
monic squarefree bases with multiplicities), so after the one squarefree
decomposition of the input denominator no gcd in y is ever taken.
"""

from .errors import (
    ParameterCollision,
    PreconditionError,
    ReconstructionError,
    TelescoperNotFound,
)
from .ratfun import RatFun, ratfun_reconstruct
from .upoly import Poly, poly_gcd
from .ypoly import BiPoly, YPoly, ypoly_yun

AUDIT_REDUCTIONS = False  # verify the reduction identity on every param_reduce call


class DiffOp:
    """Linear differential operator sum_i q_i(x) * d^i/dx^i.

    Scalar operators hold ``coeffs`` (list of Poly) in normal form: the
    coefficient tuple is primitive and scaled so that the leading coefficient
    of the top q is 1.  Operators in the symbolic parameter hold
    ``param_coeffs`` instead: one BiPoly per derivative order, whose "y"
    variable is the parameter and whose coefficients are Poly in x.
    """

    __slots__ = ("f", "coeffs", "param_coeffs")

    def __init__(self, f, coeffs=None, param_coeffs=None, normalize=True):
        self.f = f
        self.param_coeffs = None
        if param_coeffs is not None:
            param_coeffs = list(param_coeffs)
            while param_coeffs and param_coeffs[-1].is_zero():
                param_coeffs.pop()
            if not param_coeffs:
                raise PreconditionError("zero differential operator")
            self.param_coeffs = param_coeffs
            self.coeffs = None
            return
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            raise PreconditionError("zero differential operator")
        if normalize:
            g = Poly.zero(f)
            for q in coeffs:
                if q.is_zero():
                    continue
                g = q.monic() if g.is_zero() else poly_gcd(g, q)
                if g.degree == 0:
                    break
            if g.degree > 0:
                coeffs = [q // g if not q.is_zero() else q for q in coeffs]
            scale = f.inv(coeffs[-1].lc())
            if scale != 1:
                coeffs = [q.mul_scalar(scale) for q in coeffs]
        self.coeffs = coeffs

    @property
    def order(self):
        if self.coeffs is not None:
            return len(self.coeffs) - 1
        return len(self.param_coeffs) - 1

    def degree_x(self):
        if self.coeffs is not None:
            return max(q.degree for q in self.coeffs if not q.is_zero())
        best = -1
        for c in self.param_coeffs:
            if not c.is_zero():
                best = max(best, c.degree_x())
        return best

    def degree_n(self):
        if self.param_coeffs is None:
            return 0
        return max(c.degree_y for c in self.param_coeffs if not c.is_zero())

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (
            self.f.p == other.f.p
            and self.coeffs == other.coeffs
            and self.param_coeffs == other.param_coeffs
        )

    def __repr__(self):
        if self.coeffs is not None:
            return "DiffOp[" + "; ".join(repr(q) for q in self.coeffs) + "]"
        return "DiffOp-symbolic[" + "; ".join(repr(q) for q in self.param_coeffs) + "]"

    def apply(self, u):
        """Image of a polynomial under a scalar operator."""
        if self.coeffs is None:
            raise PreconditionError("symbolic operator must be specialized first")
        acc = Poly.zero(self.f)
        d = u
        for i, q in enumerate(self.coeffs):
            if i > 0:
                d = d.deriv()
            if not q.is_zero():
                acc = acc + q * d
        return acc

    def specialize(self, nu):
        """Scalar operator at a concrete parameter value."""
        if self.param_coeffs is None:
            raise PreconditionError("operator carries no symbolic parameter")
        f = self.f
        nu = int(nu) % f.p
        coeffs = []
        for c in self.param_coeffs:
            acc = Poly.zero(f)
            for k in range(c.degree_y, -1, -1):
                acc = acc.mul_scalar(nu) + c.coeff(k)
            coeffs.append(acc)
        return DiffOp(f, coeffs)


class ReductionPair:
    """Certificate numerator B and residual numerator b of one reduction."""

    __slots__ = ("B", "b")

    def __init__(self, B, b):
        self.B = B
        self.b = b


# -- factored denominators ---------------------------------------------------


def _star(f, factors):
    acc = YPoly.one(f)
    for base, _ in factors:
        acc = acc * base
    return acc


def _minus(f, factors):
    acc = YPoly.one(f)
    for base, mult in factors:
        if mult > 1:
            acc = acc * base ** (mult - 1)
    return acc


def _ypoly_invmod(a, m):
    """u with u*a = 1 mod m in L[y]; requires gcd(a, m) = 1."""
    f = a.f
    r0, r1 = m, a % m
    u0, u1 = YPoly.zero(f), YPoly.one(f)
    while not r1.is_zero() and r1.degree_y > 0:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
    if r1.is_zero():
        raise PreconditionError("inverse modulo a non-coprime polynomial")
    return u1.mul_ratfun(r1.coeff(0).inv()) % m


def _antiderivative_y(w):
    """Polynomial antiderivative in y; needs every exponent + 1 nonzero mod p."""
    f = w.f
    out = [RatFun.zero(f)]
    for k, c in enumerate(w.cy):
        if (k + 1) % f.p == 0:
            raise PreconditionError("antiderivative exponent hits the characteristic")
        out.append(c * RatFun.const(f, f.inv((k + 1) % f.p)))
    return YPoly(f, out)


def _hermite_factored(P, factors):
    """Hermite reduction over a factored denominator D = prod base**mult.

    Returns (A, a) with  P/D = d/dy(A/D^-) + a/D*  and deg_y a < deg_y D*.
    Splits off the highest multiplicity with a Bezout solve and integrates
    that part by parts until the denominator is squarefree; an improper
    leftover is absorbed into the certificate through its y-antiderivative.
    """
    f = P.f
    mults = [m for _, m in factors]
    d_minus_full = _minus(f, factors)
    a_acc = YPoly.zero(f)
    cur = P
    while True:
        mmax = max(mults, default=1)
        if mmax <= 1:
            break
        jmax = mults.index(mmax)
        v = factors[jmax][0]
        s = YPoly.one(f)
        for idx, (base, _) in enumerate(factors):
            if idx != jmax and mults[idx] > 0:
                s = s * base ** mults[idx]
        sv = s * v.deriv_y()
        u = _ypoly_invmod(sv % v, v)
        b_part = (cur * u) % v
        c_part = (cur - b_part * sv) // v
        inv_m1 = RatFun.const(f, f.inv((mmax - 1) % f.p))
        # cofactor of v**(mmax-1) inside the certificate denominator D^-
        cof = YPoly.one(f)
        for idx, (base, m_orig) in enumerate(factors):
            e = (m_orig - 1) - (mmax - 1 if idx == jmax else 0)
            if e > 0:
                cof = cof * base ** e
        a_acc = a_acc - (b_part * cof).mul_ratfun(inv_m1)
        cur = c_part + (b_part.deriv_y() * s).mul_ratfun(inv_m1)
        mults[jmax] = mmax - 1
    dstar = _star(f, factors)
    if cur.degree_y >= dstar.degree_y:
        w, rem = divmod(cur, dstar)
        a_acc = a_acc + _antiderivative_y(w) * d_minus_full
        cur = rem
    return a_acc, cur


def hermite_reduce(P, Q):
    """Hermite reduction in L[y]:  P/Q = d/dy(A/Q^-) + a/Q*, deg_y a < deg_y Q*.

    Q* and Q^- follow the monic convention of y_squarefree_part, i.e.
    Q = lc * Q* * Q^-; the unit lc is folded into the numerator.
    """
    if Q.is_zero():
        raise PreconditionError("zero denominator")
    factors = ypoly_yun(Q)
    scaled = P.mul_ratfun(Q.lc().inv())
    return _hermite_factored(scaled, factors)


def _twist(poly_part, lam):
    """B with y*dB/dy - lam*B = P1: divide the k-th coefficient by k - lam."""
    f = poly_part.f
    p = f.p
    out = []
    for k, c in enumerate(poly_part.cy):
        if c.is_zero():
            out.append(c)
            continue
        d = (k - lam) % p
        if d == 0:
            raise ParameterCollision(f"parameter collides with exponent {k}")
        out.append(c * RatFun.const(f, f.inv(d)))
    return YPoly(f, out)


def _reduce_factored(P, factors, lam, want_certificate):
    """Parameterized reduction by induction on the non-squarefree part.

    Solves  P/(D y) = d/dy(B/D^-) - lam*B/(D^- y) + b/(D* y)  for a factored
    denominator D; multiplying through by y^-lam turns this into the usual
    reduction statement for P/(D y^(lam+1)).  With ``want_certificate`` False,
    the parameter is factored out and a dict {depth: residual slice} comes
    back, encoding b(lam) = sum_j lam**j * slice_j.
    """
    f = P.f
    if all(m == 1 for _, m in factors):
        dstar = _star(f, factors)
        p1, rem = divmod(P, dstar)
        if want_certificate:
            return _twist(p1, lam), rem
        return {0: rem}
    yfac = factors + [(YPoly.y_power(f, 1), 1)]
    a_cert, a_res = _hermite_factored(P, yfac)
    r_factors = [(base, max(1, m - 1)) for base, m in factors]
    ratio_up = YPoly.one(f)  # R / D^-: product of the multiplicity-one bases
    for base, m in factors:
        if m == 1:
            ratio_up = ratio_up * base
    child_input = a_cert * ratio_up
    if not want_certificate:
        child = _reduce_factored(child_input, r_factors, lam, False)
        out = {0: a_res}
        for depth, piece in child.items():
            out[depth + 1] = piece
        return out
    c_cert, c_res = _reduce_factored(
        child_input.mul_ratfun(RatFun.const(f, lam % f.p)), r_factors, lam, True
    )
    ratio_down = YPoly.one(f)  # D^- / R^-: product of the repeated bases
    for base, m in factors:
        if m >= 2:
            ratio_down = ratio_down * base
    return a_cert + c_cert * ratio_down, a_res + c_res


def param_reduce(P, Q, lam):
    """Parameterized reduction of P/(Q y^(lam+1)) at a scalar parameter.

    Returns a ReductionPair (B, b) with deg_y b <= deg_y Q* such that
        P/(Q y^(lam+1)) = d/dy( B/(Q^- y^lam) ) + b/(Q* y^(lam+1)).
    Requires Q(0) != 0 in y.  ParameterCollision signals that a certificate
    coefficient would divide by zero; this cannot happen once lam exceeds
    every y-degree in sight (lam = N mod p for y-degree bound < N < p).
    """
    if Q.is_zero() or Q.coeff(0).is_zero():
        raise PreconditionError("denominator must have a nonzero constant term in y")
    f = P.f
    factors = ypoly_yun(Q)
    scaled = P.mul_ratfun(Q.lc().inv())
    cert, res = _reduce_factored(scaled, factors, lam % f.p, True)
    pair = ReductionPair(cert, res)
    if AUDIT_REDUCTIONS:
        if not verify_reduction(P, Q, lam, pair):
            raise PreconditionError("reduction identity failed the audit")
    return pair


def verify_reduction(P, Q, lam, pair):
    """Check the reduction identity exactly, by clearing denominators.

    With Q = lc * Q* * Q^- the identity of param_reduce is equivalent to
        P Q^- = lc * [ Q* (B' Q^- y - B (Q^-' y + lam Q^-)) + b Q^-^2 ].
    """
    f = P.f
    factors = ypoly_yun(Q)
    lead = Q.lc()
    qstar = _star(f, factors)
    qminus = _minus(f, factors)
    y = YPoly.y_power(f, 1)
    lam_c = RatFun.const(f, lam % f.p)
    lhs = P * qminus
    inner = pair.B.deriv_y() * qminus * y - pair.B * (
        qminus.deriv_y() * y + qminus.mul_ratfun(lam_c)
    )
    rhs = (qstar * inner + pair.b * qminus * qminus).mul_ratfun(lead)
    return lhs == rhs


def residual_series(P, Q):
    """Parameter-free residual slices of the reduction of P/(Q y^(n+1)).

    Returns [a_0, a_1, ...] such that for every scalar lam the residual of
    param_reduce(P, Q, lam) equals sum_j lam**j * a_j.
    """
    if Q.is_zero() or Q.coeff(0).is_zero():
        raise PreconditionError("denominator must have a nonzero constant term in y")
    factors = ypoly_yun(Q)
    return _series_factored(P, factors, Q.lc())


def _series_factored(P, factors, lead):
    slices = _reduce_factored(P.mul_ratfun(lead.inv()), factors, 0, False)
    top = max(slices)
    return [slices.get(j, YPoly.zero(P.f)) for j in range(top + 1)]


def assemble_residual(slices, lam, p):
    """b(lam) from residual slices, by Horner in the parameter."""
    f = slices[0].f
    acc = YPoly.zero(f)
    lam = lam % p
    for piece in reversed(slices):
        acc = acc.mul_ratfun(RatFun.const(f, lam)) + piece
    return acc


# -- the telescoper ----------------------------------------------------------


class ResidualRecipe:
    """Parameter-independent residual data for U and its x-derivatives.

    slices_per_order[i] holds the parameter slices of the residual of
    (d/dx)^i U / y^(n+1); gamma[i] is the polynomial content stripped from
    that derivative's numerator (the relation solve rescales by it).
    """

    __slots__ = ("f", "dstar", "slices_per_order", "gamma")

    def __init__(self, f, dstar, slices_per_order, gamma):
        self.f = f
        self.dstar = dstar
        self.slices_per_order = slices_per_order
        self.gamma = gamma


def build_recipe(U, max_order=None):
    """Reduce U, dU/dx, ... and store their parameter slices.

    Derivative numerators are maintained incrementally over the growing
    denominator power by the quotient rule, stripping polynomial content as
    it accumulates.  By default the derivative order goes up to d* (the
    y-degree of the squarefree part), which is where a relation must appear.
    """
    f = U.f
    if U.den_at_y0().is_zero():
        raise PreconditionError("denominator vanishes at y = 0")
    q_y = U.den.to_ypoly()
    factors = ypoly_yun(q_y)
    lead = q_y.lc()
    dstar = sum(base.degree_y for base, _ in factors)
    if max_order is None:
        max_order = dstar
    num = U.num
    den = U.den
    den_dx = den.deriv_x()
    slices_per_order = []
    gamma = []
    g = Poly.one(f)
    cur_factors = list(factors)
    cur_lead = lead
    for i in range(max_order + 1):
        if i > 0:
            num = num.deriv_x() * den - num.mul_poly(Poly.const(f, i)) * den_dx
            content = num.content_x()
            if content.degree > 0:
                num = num.div_content(content)
                g = g * content
            cur_factors = [(b, m + morig) for (b, m), (_, morig) in zip(cur_factors, factors)]
            cur_lead = cur_lead * lead
        gamma.append(g)
        if num.is_zero():
            slices_per_order.append([YPoly.zero(f)])
        else:
            slices_per_order.append(_series_factored(num.to_ypoly(), cur_factors, cur_lead))
    return ResidualRecipe(f, dstar, slices_per_order, gamma)


def _solve_in_span(f, cols, target):
    """Express `target` in the span of the independent columns `cols`.

    Fraction-free Bareiss elimination on the augmented matrix; only the
    final triangular back-substitution divides.  Returns the coefficient
    list over F_p(x), or None when target lies outside the span.
    """
    t = len(cols)
    nrows = len(target)
    if t == 0:
        return [] if all(v.is_zero() for v in target) else None
    m = [[cols[j][i] for j in range(t)] + [target[i]] for i in range(nrows)]
    prev = Poly.one(f)
    row = 0
    for col in range(t):
        piv = None
        for rr in range(row, nrows):
            if not m[rr][col].is_zero():
                piv = rr
                break
        if piv is None:
            raise PreconditionError("span columns were not independent")
        if piv != row:
            m[row], m[piv] = m[piv], m[row]
        for rr in range(row + 1, nrows):
            for cc in range(col + 1, t + 1):
                num = m[row][col] * m[rr][cc] - m[rr][col] * m[row][cc]
                if prev.degree > 0:
                    quo, rem = divmod(num, prev)
                    if not rem.is_zero():
                        raise PreconditionError("inexact elimination division")
                    m[rr][cc] = quo
                else:
                    m[rr][cc] = num.mul_scalar(f.inv(prev.lc())) if not num.is_zero() else num
            m[rr][col] = Poly.zero(f)
        prev = m[row][col]
        row += 1
    for rr in range(row, nrows):
        if not m[rr][t].is_zero():
            return None
    xs = [None] * t
    for i in range(t - 1, -1, -1):
        acc = RatFun.of_poly(m[i][t])
        for j in range(i + 1, t):
            if not m[i][j].is_zero():
                acc = acc - RatFun.of_poly(m[i][j]) * xs[j]
        xs[i] = acc / RatFun.of_poly(m[i][i])
    return xs


def telescoper_from_recipe(recipe, lam):
    """Operator of order <= d* annihilating the lam-th coefficient extraction."""
    f = recipe.f
    columns = []
    denoms = []
    for i, slices in enumerate(recipe.slices_per_order):
        b = assemble_residual(slices, lam, f.p)
        cleared, den = b.clear_denominators()
        col = [cleared.coeff(j) for j in range(recipe.dstar + 1)]
        xs = _solve_in_span(f, columns, col)
        if xs is None:
            columns.append(col)
            denoms.append(den)
            continue
        # col_i = sum_j xs_j col_j, and the true residual of order j is
        # gamma_j * col_j / den_j, so the operator coefficients are
        # q_i = den_i/gamma_i and q_j = -xs_j * den_j/gamma_j.
        coeffs_rat = []
        for j in range(i):
            if j < len(xs) and not xs[j].is_zero():
                coeffs_rat.append(-xs[j] * RatFun(denoms[j], recipe.gamma[j]))
            else:
                coeffs_rat.append(RatFun.zero(f))
        coeffs_rat.append(RatFun(den, recipe.gamma[i]))
        common = Poly.one(f)
        for c in coeffs_rat:
            if c.is_zero():
                continue
            g = poly_gcd(common, c.den)
            common = common * (c.den // g)
        coeffs = [
            Poly.zero(f) if c.is_zero() else c.num * (common // c.den)
            for c in coeffs_rat
        ]
        return DiffOp(f, coeffs)
    raise TelescoperNotFound(f"no relation among residuals up to order {recipe.dstar}")


def telescoper_at(U, lam):
    """Telescoper of U/y^(n+1) at the scalar parameter value lam."""
    return telescoper_from_recipe(build_recipe(U), lam)


def telescoper_symbolic(U, n_deg_hint=None):
    """Reconstruct the operator as a function of the symbolic parameter.

    Runs the scalar telescoper at 2*(hint+1)+1 parameter values, normalizes
    each output identically, rebuilds every x-coefficient of every q_i as a
    rational function of the parameter, and clears the common denominator.
    On reconstruction failure the sample count doubles, three times at most.
    """
    f = U.f
    recipe = build_recipe(U)
    if n_deg_hint is None:
        n_deg_hint = max(2, 2 * recipe.dstar)
    hint = max(1, int(n_deg_hint))
    base = (1 << 20) + 7
    last_error = None
    for _ in range(4):
        m = 2 * (hint + 1) + 1
        nus = [(base + 37 * j) % f.p for j in range(m)]
        try:
            ops = [telescoper_from_recipe(recipe, nu) for nu in nus]
            order = max(op.order for op in ops)
            samples = [(nu, op) for nu, op in zip(nus, ops) if op.order == order]
            if len(samples) < 2 * hint + 3:
                raise ReconstructionError("operator order degenerated at sample points")
            dx = max(op.degree_x() for _, op in samples)
            recon = {}
            for i in range(order + 1):
                for j in range(dx + 1):
                    pts = [(nu, op.coeffs[i][j]) for nu, op in samples]
                    recon[(i, j)] = ratfun_reconstruct(f, pts, hint, hint)
            return _assemble_symbolic(f, order, dx, recon)
        except (ReconstructionError, TelescoperNotFound) as e:
            last_error = e
            hint *= 2
            base += 101
    raise ReconstructionError(f"telescoper reconstruction failed: {last_error}")


def _assemble_symbolic(f, order, dx, recon):
    common = Poly.one(f)
    for r in recon.values():
        if r.is_zero():
            continue
        g = poly_gcd(common, r.den)
        common = common * (r.den // g)
    param_coeffs = []
    for i in range(order + 1):
        npow_rows = {}
        for j in range(dx + 1):
            r = recon[(i, j)]
            if r.is_zero():
                continue
            poly_n = r.num * (common // r.den)
            for k, v in enumerate(poly_n.coeff_list()):
                if v:
                    npow_rows.setdefault(k, {})[j] = v
        top = max(npow_rows, default=-1)
        cy = []
        for k in range(top + 1):
            row = npow_rows.get(k, {})
            dense = [0] * (max(row, default=-1) + 1)
            for j, v in row.items():
                dense[j] = v
            cy.append(Poly(f, dense))
        param_coeffs.append(BiPoly(f, cy))
    # joint primitivization in both variables
    ncontent = Poly.zero(f)
    xcontent = Poly.zero(f)
    for c in param_coeffs:
        for s in _x_slices(f, c):
            if not s.is_zero():
                ncontent = s.monic() if ncontent.is_zero() else poly_gcd(ncontent, s)
        for yp in c.cy:
            if not yp.is_zero():
                xcontent = yp.monic() if xcontent.is_zero() else poly_gcd(xcontent, yp)
    if ncontent.degree > 0:
        param_coeffs = [_divide_n(f, c, ncontent) for c in param_coeffs]
    if xcontent.degree > 0:
        param_coeffs = [
            BiPoly(f, [yp // xcontent if not yp.is_zero() else yp for yp in c.cy])
            for c in param_coeffs
        ]
    return DiffOp(f, param_coeffs=param_coeffs)


def _x_slices(f, c):
    """BiPoly-in-the-parameter transposed into Poly-in-parameter per x power."""
    dx = max((q.degree for q in c.cy if not q.is_zero()), default=-1)
    return [Poly(f, [q[j] for q in c.cy]) for j in range(dx + 1)]


def _divide_n(f, c, g):
    slices = [s // g if not s.is_zero() else s for s in _x_slices(f, c)]
    dn = max((s.degree for s in slices if not s.is_zero()), default=-1)
    return BiPoly(f, [Poly(f, [s[k] for s in slices]) for k in range(dn + 1)])
