"""Polynomials in y over F_p[x] and over F_p(x); bivariate rational functions.

BiPoly keeps dense Poly coefficients per power of y and is the carrier for
generating-function numerators/denominators, characteristic polynomials and
resultants.  YPoly has RatFun coefficients and only appears inside the
reduction machinery, where fraction arithmetic in the coefficients is
unavoidable.  Resultants and characteristic polynomials are computed by
evaluating x at enough points, running scalar linear algebra per point, and
interpolating.
"""

from .errors import FieldDivisionError, PreconditionError
from .ratfun import RatFun
from .upoly import Poly, poly_gcd, poly_interp


class BiPoly:
    """Element of F_p[x][y]; y-coefficient vector with nonzero leader."""

    __slots__ = ("f", "cy")

    def __init__(self, f, y_coeffs=(), normalized=False):
        self.f = f
        if normalized:
            self.cy = y_coeffs
            return
        cy = list(y_coeffs)
        while cy and cy[-1].is_zero():
            cy.pop()
        self.cy = cy

    @staticmethod
    def zero(f):
        return BiPoly(f, (), normalized=True)

    @staticmethod
    def one(f):
        return BiPoly(f, [Poly.one(f)], normalized=True)

    @staticmethod
    def of_poly(q):
        return BiPoly(q.f, [q])

    @staticmethod
    def y_power(f, k):
        return BiPoly(f, [Poly.zero(f)] * k + [Poly.one(f)], normalized=True)

    @property
    def degree_y(self):
        return len(self.cy) - 1

    def degree_x(self):
        return max((c.degree for c in self.cy), default=-1)

    def is_zero(self):
        return not self.cy

    def __bool__(self):
        return bool(self.cy)

    def coeff(self, k):
        if 0 <= k < len(self.cy):
            return self.cy[k]
        return Poly.zero(self.f)

    def is_monic_y(self):
        return bool(self.cy) and self.cy[-1] == Poly.one(self.f)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.f.p == other.f.p and self.cy == other.cy

    def __hash__(self):
        return hash(tuple(c.key() for c in self.cy))

    def __repr__(self):
        return "BiPoly[" + "; ".join(repr(c) for c in self.cy) + "]"

    def __neg__(self):
        return BiPoly(self.f, [-c for c in self.cy], normalized=True)

    def __add__(self, other):
        n = max(len(self.cy), len(other.cy))
        out = [self.coeff(k) + other.coeff(k) for k in range(n)]
        return BiPoly(self.f, out)

    def __sub__(self, other):
        n = max(len(self.cy), len(other.cy))
        out = [self.coeff(k) - other.coeff(k) for k in range(n)]
        return BiPoly(self.f, out)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return BiPoly.zero(self.f)
        out = [Poly.zero(self.f) for _ in range(len(self.cy) + len(other.cy) - 1)]
        for i, a in enumerate(self.cy):
            if a.is_zero():
                continue
            for j, b in enumerate(other.cy):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return BiPoly(self.f, out)

    def mul_poly(self, q):
        if q.is_zero() or self.is_zero():
            return BiPoly.zero(self.f)
        return BiPoly(self.f, [c * q for c in self.cy], normalized=True)

    def truncate_y(self, n):
        return BiPoly(self.f, self.cy[:n])

    def reverse_y(self, r):
        """y**r * P(x, 1/y); requires r >= deg_y."""
        if r < self.degree_y:
            raise PreconditionError("reversal order below y-degree")
        out = [Poly.zero(self.f)] * (r + 1)
        for k, c in enumerate(self.cy):
            out[r - k] = c
        return BiPoly(self.f, out)

    def deriv_x(self):
        return BiPoly(self.f, [c.deriv() for c in self.cy])

    def deriv_y(self):
        out = [self.cy[k].mul_scalar(k % self.f.p) for k in range(1, len(self.cy))]
        return BiPoly(self.f, out)

    def eval_x(self, alpha):
        """Univariate polynomial in y obtained by fixing x."""
        return Poly(self.f, [c.eval(alpha) for c in self.cy])

    def eval_y_poly(self, q):
        """Substitute a Poly for y (Horner)."""
        acc = Poly.zero(self.f)
        for c in reversed(self.cy):
            acc = acc * q + c
        return acc

    def content_x(self):
        """Monic gcd of all coefficient polynomials (zero for the zero element)."""
        g = Poly.zero(self.f)
        for c in self.cy:
            if c.is_zero():
                continue
            g = c.monic() if g.is_zero() else poly_gcd(g, c)
            if g.degree == 0:
                return Poly.one(self.f)
        return g

    def div_content(self, g):
        if g.degree == 0:
            inv = self.f.inv(g.lc())
            return BiPoly(self.f, [c.mul_scalar(inv) for c in self.cy], normalized=True)
        return BiPoly(self.f, [c // g for c in self.cy], normalized=True)

    def to_ypoly(self):
        return YPoly(self.f, [RatFun.of_poly(c) for c in self.cy])


def ypoly_divrem(a, b):
    """Euclidean division in F_p[x][y] by a divisor monic in y."""
    if b.is_zero():
        raise FieldDivisionError("bivariate division by zero")
    if not b.is_monic_y():
        raise PreconditionError("divisor must be monic in y")
    f = a.f
    db = b.degree_y
    if a.degree_y < db:
        return BiPoly.zero(f), a
    r = list(a.cy)
    q = [Poly.zero(f)] * (len(r) - db)
    for i in range(len(r) - db - 1, -1, -1):
        c = r[i + db]
        if c.is_zero():
            continue
        q[i] = c
        for j in range(db):
            if not b.cy[j].is_zero():
                r[i + j] = r[i + j] - c * b.cy[j]
        r[i + db] = Poly.zero(f)
    return BiPoly(f, q), BiPoly(f, r[:db])


class YPoly:
    """Element of L[y] with L = F_p(x)."""

    __slots__ = ("f", "cy")

    def __init__(self, f, y_coeffs=(), normalized=False):
        self.f = f
        if normalized:
            self.cy = y_coeffs
            return
        cy = list(y_coeffs)
        while cy and cy[-1].is_zero():
            cy.pop()
        self.cy = cy

    @staticmethod
    def zero(f):
        return YPoly(f, (), normalized=True)

    @staticmethod
    def one(f):
        return YPoly(f, [RatFun.one(f)], normalized=True)

    @staticmethod
    def of_ratfun(r):
        return YPoly(r.f, [r])

    @staticmethod
    def y_power(f, k):
        return YPoly(f, [RatFun.zero(f)] * k + [RatFun.one(f)], normalized=True)

    @property
    def degree_y(self):
        return len(self.cy) - 1

    def is_zero(self):
        return not self.cy

    def __bool__(self):
        return bool(self.cy)

    def coeff(self, k):
        if 0 <= k < len(self.cy):
            return self.cy[k]
        return RatFun.zero(self.f)

    def lc(self):
        if not self.cy:
            raise PreconditionError("zero polynomial has no leading coefficient")
        return self.cy[-1]

    def __eq__(self, other):
        if not isinstance(other, YPoly):
            return NotImplemented
        return self.f.p == other.f.p and self.cy == other.cy

    def __repr__(self):
        return "YPoly[" + "; ".join(repr(c) for c in self.cy) + "]"

    def __neg__(self):
        return YPoly(self.f, [-c for c in self.cy], normalized=True)

    def __add__(self, other):
        n = max(len(self.cy), len(other.cy))
        return YPoly(self.f, [self.coeff(k) + other.coeff(k) for k in range(n)])

    def __sub__(self, other):
        n = max(len(self.cy), len(other.cy))
        return YPoly(self.f, [self.coeff(k) - other.coeff(k) for k in range(n)])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return YPoly.zero(self.f)
        out = [RatFun.zero(self.f) for _ in range(len(self.cy) + len(other.cy) - 1)]
        for i, a in enumerate(self.cy):
            if a.is_zero():
                continue
            for j, b in enumerate(other.cy):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return YPoly(self.f, out)

    def mul_ratfun(self, r):
        if r.is_zero() or self.is_zero():
            return YPoly.zero(self.f)
        return YPoly(self.f, [c * r for c in self.cy], normalized=True)

    def monic_y(self):
        if self.is_zero():
            raise PreconditionError("cannot normalize the zero polynomial")
        return self.mul_ratfun(self.lc().inv())

    def __divmod__(self, other):
        if other.is_zero():
            raise FieldDivisionError("division by the zero polynomial")
        f = self.f
        db = other.degree_y
        if self.degree_y < db:
            return YPoly.zero(f), self
        lead_inv = other.lc().inv()
        r = list(self.cy)
        q = [RatFun.zero(f)] * (len(r) - db)
        for i in range(len(r) - db - 1, -1, -1):
            c = r[i + db]
            if c.is_zero():
                continue
            c = c * lead_inv
            q[i] = c
            for j in range(db):
                bj = other.cy[j]
                if not bj.is_zero():
                    r[i + j] = r[i + j] - c * bj
        return YPoly(f, q), YPoly(f, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e):
        result = YPoly.one(self.f)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def deriv_y(self):
        p = self.f.p
        out = [
            self.cy[k] * RatFun.const(self.f, k % p) for k in range(1, len(self.cy))
        ]
        return YPoly(self.f, out)

    def eval_y0(self):
        """Constant-in-y coefficient."""
        return self.coeff(0)

    def clear_denominators(self):
        """(BiPoly numerator, Poly common denominator)."""
        f = self.f
        den = Poly.one(f)
        for c in self.cy:
            if c.is_zero():
                continue
            g = poly_gcd(den, c.den)
            den = den * (c.den // g)
        out = []
        for c in self.cy:
            if c.is_zero():
                out.append(Poly.zero(f))
            else:
                out.append(c.num * (den // c.den))
        return BiPoly(f, out), den


def ypoly_gcd(a, b):
    """Monic gcd in L[y] by the Euclidean chain."""
    if a.is_zero() and b.is_zero():
        raise FieldDivisionError("gcd(0, 0) is undefined")
    x, y = a, b
    while not y.is_zero():
        y = y.monic_y()
        x, y = y, x % y
    return x.monic_y()


def y_squarefree_part(q):
    """(Q*, Q_minus) over L[y]: Q = lc * Q* * Q_minus, Q* squarefree monic."""
    factors = ypoly_yun(q)
    f = q.f
    qstar = YPoly.one(f)
    qminus = YPoly.one(f)
    for base, mult in factors:
        qstar = qstar * base
        if mult > 1:
            qminus = qminus * base ** (mult - 1)
    return qstar, qminus


def ypoly_yun(q):
    """Yun's squarefree decomposition in L[y]: list of (monic factor, multiplicity)."""
    if q.is_zero():
        raise PreconditionError("squarefree decomposition of zero")
    if q.degree_y >= q.f.p:
        raise PreconditionError("y-degree must stay below p")
    if q.degree_y == 0:
        return []
    fq = q.monic_y()
    g = ypoly_gcd(fq, fq.deriv_y())
    b = fq // g
    c = fq.deriv_y() // g
    d = c - b.deriv_y()
    factors = []
    i = 1
    while b.degree_y > 0:
        a = ypoly_gcd(b, d)
        if a.degree_y > 0:
            factors.append((a, i))
        b = b // a
        c = d // a
        d = c - b.deriv_y()
        i += 1
    return factors


class BiRat:
    """Rational function in (x, y) as a BiPoly pair with common x-content removed."""

    __slots__ = ("num", "den")

    def __init__(self, num, den, normalized=False):
        if den.is_zero():
            raise FieldDivisionError("bivariate rational function with zero denominator")
        if not normalized and not num.is_zero():
            gn = num.content_x()
            gd = den.content_x()
            g = poly_gcd(gn, gd)
            if g.degree > 0:
                num = num.div_content(g)
                den = den.div_content(g)
        self.num = num
        self.den = den

    @property
    def f(self):
        return self.den.f

    def den_at_y0(self):
        """den(x, 0); several callers require it to be nonzero."""
        return self.den.coeff(0)

    def deriv_x(self):
        """Quotient rule, with common content cleaned up by the constructor."""
        num = self.num.deriv_x() * self.den - self.num * self.den.deriv_x()
        return BiRat(num, self.den * self.den)

    def __eq__(self, other):
        if not isinstance(other, BiRat):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __repr__(self):
        return f"BiRat({self.num!r} / {self.den!r})"


def birat_dx(h):
    return h.deriv_x()


class PolyMatrix:
    """Square matrix over F_p[x]."""

    __slots__ = ("f", "r", "rows")

    def __init__(self, f, rows):
        self.f = f
        self.r = len(rows)
        for row in rows:
            if len(row) != self.r:
                raise PreconditionError("matrix must be square")
        self.rows = [list(row) for row in rows]

    @staticmethod
    def identity(f, r):
        return PolyMatrix(
            f,
            [[Poly.one(f) if i == j else Poly.zero(f) for j in range(r)] for i in range(r)],
        )

    @property
    def d(self):
        """Largest entry degree actually present (0 for constant matrices)."""
        best = 0
        for row in self.rows:
            for e in row:
                if not e.is_zero() and e.degree > best:
                    best = e.degree
        return best

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.r == other.r and self.rows == other.rows

    def __repr__(self):
        return f"PolyMatrix(r={self.r}, d={self.d})"

    def __mul__(self, other):
        if self.r != other.r:
            raise PreconditionError("size mismatch")
        f = self.f
        r = self.r
        out = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = Poly.zero(f)
                for k in range(r):
                    a = self.rows[i][k]
                    b = other.rows[k][j]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(f, out)

    def mul_scalar_poly(self, q):
        return PolyMatrix(self.f, [[e * q for e in row] for row in self.rows])

    def add(self, other):
        return PolyMatrix(
            self.f,
            [
                [self.rows[i][j] + other.rows[i][j] for j in range(self.r)]
                for i in range(self.r)
            ],
        )

    def eval_x(self, alpha):
        return [[e.eval(alpha) for e in row] for row in self.rows]

    def is_identity(self):
        one = Poly.one(self.f)
        for i in range(self.r):
            for j in range(self.r):
                want = one if i == j else Poly.zero(self.f)
                if self.rows[i][j] != want:
                    return False
        return True


def _hessenberg_charpoly(f, a):
    """det(yI - A) for a scalar matrix, low-degree-first coefficient list."""
    n = len(a)
    p = f.p
    h = [[int(v) % p for v in row] for row in a]
    for col in range(n - 2):
        piv = None
        for row in range(col + 1, n):
            if h[row][col] != 0:
                piv = row
                break
        if piv is None:
            continue
        if piv != col + 1:
            h[piv], h[col + 1] = h[col + 1], h[piv]
            for row in h:
                row[piv], row[col + 1] = row[col + 1], row[piv]
        inv = f.inv(h[col + 1][col])
        for row in range(col + 2, n):
            factor = h[row][col] * inv % p
            if factor == 0:
                continue
            hr = h[row]
            hc = h[col + 1]
            for j in range(n):
                hr[j] = (hr[j] - factor * hc[j]) % p
            # similarity: add factor times column `row` back onto column col+1
            for i in range(n):
                h[i][col + 1] = (h[i][col + 1] + factor * h[i][row]) % p
    # determinant recurrence for Hessenberg matrices
    dets = [[1]]  # dets[k] = det(yI_k - H_k), coefficients low-first
    for k in range(1, n + 1):
        prev = dets[k - 1]
        cur = [0] * (k + 1)
        hkk = h[k - 1][k - 1]
        for idx, v in enumerate(prev):
            cur[idx + 1] = (cur[idx + 1] + v) % p
            cur[idx] = (cur[idx] - hkk * v) % p
        sub = 1
        for i in range(k - 1, 0, -1):
            sub = sub * h[i][i - 1] % p
            if sub == 0:
                break
            coef = h[i - 1][k - 1] * sub % p
            if coef == 0:
                continue
            for idx, v in enumerate(dets[i - 1]):
                cur[idx] = (cur[idx] - coef * v) % p
        dets.append(cur)
    return dets[n]


def charpoly(m):
    """det(y I - M) as a BiPoly, monic in y, by evaluation-interpolation."""
    f = m.f
    r = m.r
    bound = r * m.d
    if f.p <= bound:
        raise PreconditionError(f"prime {f.p} too small for charpoly degree {bound}")
    points = [[] for _ in range(r + 1)]
    xs = list(range(bound + 1))
    for alpha in xs:
        coeffs = _hessenberg_charpoly(f, m.eval_x(alpha))
        for k in range(r + 1):
            points[k].append((alpha, coeffs[k]))
    cy = [poly_interp(f, pts) for pts in points]
    return BiPoly(f, cy)


def resultant_y(pp, qq):
    """A(x, t) = Res_y(P(x,y), t - Q(x,y)) as a BiPoly in t, monic of t-degree r.

    P must be monic in y.  Per evaluation point the resultant is the
    characteristic polynomial of multiplication by Q in F_p[y]/(P), computed
    through the Hessenberg route; the x-dependence is recovered by
    interpolation at Sylvester-degree-many points.
    """
    f = pp.f
    if not pp.is_monic_y():
        raise PreconditionError("resultant base must be monic in y")
    r = pp.degree_y
    if r == 0:
        return BiPoly.one(f)
    dxp = max(pp.degree_x(), 0)
    dxq = max(qq.degree_x(), 0)
    dyq = max(qq.degree_y, 0)
    bound = r * dxq + dxp * dyq
    if f.p <= bound + 1:
        raise PreconditionError(f"prime {f.p} too small for {bound + 1} evaluation points")
    points = [[] for _ in range(r + 1)]
    for alpha in range(bound + 1):
        pa = pp.eval_x(alpha)  # univariate in y, monic of degree r
        qa = qq.eval_x(alpha)
        qa = qa % pa if qa.degree >= r else qa
        # multiplication-by-Q matrix in F_p[y]/(P)
        cols = []
        cur = qa
        for _ in range(r):
            cols.append([cur[i] for i in range(r)])
            cur = Poly(f, [0] + cur.coeff_list()) % pa
        mat = [[cols[j][i] for j in range(r)] for i in range(r)]
        coeffs = _hessenberg_charpoly(f, mat)
        for k in range(r + 1):
            points[k].append((alpha, coeffs[k]))
    cy = [poly_interp(f, pts) for pts in points]
    return BiPoly(f, cy)
