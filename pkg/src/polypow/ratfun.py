"""The fraction field F_p(x): rational functions in canonical form.

Canonical form means gcd(num, den) = 1 with a monic denominator; it is
restored eagerly after every operation, since the reduction machinery built
on top of this field explodes without continual cancellation.  Degrees here
stay small (they do not grow with N), so the gcds are cheap.
"""

from .errors import FieldDivisionError, PreconditionError, ReconstructionError
from .upoly import Poly, poly_divrem, poly_gcd, poly_interp

AUDIT_CANONICAL = False  # set by tests to re-check canonical form after every op


class RatFun:
    """num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduced=False):
        if den is None:
            den = Poly.one(num.f)
        if den.is_zero():
            raise FieldDivisionError("rational function with zero denominator")
        if not reduced:
            if num.is_zero():
                den = Poly.one(num.f)
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num // g
                    den = den // g
                if den.lc() != 1:
                    lead_inv = num.f.inv(den.lc())
                    num = num.mul_scalar(lead_inv)
                    den = den.mul_scalar(lead_inv)
        self.num = num
        self.den = den
        if AUDIT_CANONICAL:
            assert den.lc() == 1
            assert num.is_zero() or poly_gcd(num, den).degree == 0

    @staticmethod
    def zero(f):
        return RatFun(Poly.zero(f), Poly.one(f), reduced=True)

    @staticmethod
    def one(f):
        return RatFun(Poly.one(f), Poly.one(f), reduced=True)

    @staticmethod
    def const(f, v):
        return RatFun(Poly.const(f, v), Poly.one(f), reduced=True)

    @staticmethod
    def of_poly(num):
        return RatFun(num, Poly.one(num.f), reduced=True)

    @property
    def f(self):
        return self.num.f

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self):
        return self.den.degree == 0

    def as_poly(self):
        if self.den.degree != 0:
            raise PreconditionError("rational function is not polynomial")
        return self.num

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num.key(), self.den.key()))

    def __repr__(self):
        if self.den.degree == 0:
            return f"RatFun({self.num!r})"
        return f"RatFun({self.num!r} / {self.den!r})"

    def __neg__(self):
        return RatFun(-self.num, self.den, reduced=True)

    def __add__(self, other):
        # Henrici's scheme: with both operands canonical, the only common
        # factor the sum can pick up divides gcd of the denominators, so
        # coprime denominators need no reduction at all.
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        g = poly_gcd(self.den, other.den)
        if g.degree == 0:
            num = self.num * other.den + other.num * self.den
            if num.is_zero():
                return RatFun.zero(self.f)
            return RatFun(num, self.den * other.den, reduced=True)
        da = self.den // g
        db = other.den // g
        num = self.num * db + other.num * da
        if num.is_zero():
            return RatFun.zero(self.f)
        # one reduction by gcd(num, g) restores canonical form exactly
        h = poly_gcd(num, g)
        if h.degree > 0:
            num = num // h
            den = da * (other.den // h)
        else:
            den = da * other.den
        return RatFun(num, den, reduced=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.num.is_zero() or other.num.is_zero():
            return RatFun.zero(self.f)
        # cross-cancel; afterwards all four parts are pairwise coprime where
        # it matters, so the product is already canonical
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = self.num // g1 if g1.degree > 0 else self.num
        d2 = other.den // g1 if g1.degree > 0 else other.den
        n2 = other.num // g2 if g2.degree > 0 else other.num
        d1 = self.den // g2 if g2.degree > 0 else self.den
        return RatFun(n1 * n2, d1 * d2, reduced=True)

    def __truediv__(self, other):
        if other.num.is_zero():
            raise FieldDivisionError("division by the zero rational function")
        return self * other.inv()

    def mul_poly(self, q):
        if q.is_zero() or self.num.is_zero():
            return RatFun.zero(self.f)
        g = poly_gcd(q, self.den)
        if g.degree > 0:
            return RatFun(self.num * (q // g), self.den // g, reduced=True)
        return RatFun(self.num * q, self.den, reduced=True)

    def inv(self):
        if self.num.is_zero():
            raise FieldDivisionError("inverse of zero rational function")
        scale = self.f.inv(self.num.lc())
        return RatFun(
            self.den.mul_scalar(scale), self.num.mul_scalar(scale), reduced=True
        )

    def deriv(self):
        if self.den.degree == 0:
            return RatFun(self.num.deriv(), self.den, reduced=True)
        num = self.num.deriv() * self.den - self.num * self.den.deriv()
        return RatFun(num, self.den * self.den)

    def eval(self, alpha):
        dv = self.den.eval(alpha)
        if dv == 0:
            raise FieldDivisionError(f"pole at evaluation point {alpha}")
        return self.f.mul(self.num.eval(alpha), self.f.inv(dv))


def ratfun_arith(a, b, op):
    """Convenience dispatcher for the four field operations."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise PreconditionError(f"unknown operation {op!r}")


def ratfun_reconstruct(f, points, max_num_deg, max_den_deg):
    """Unique rational function within the degree bounds through all samples.

    Cauchy interpolation: run the extended Euclidean scheme on the node
    polynomial and the plain interpolant, stop once the remainder degree
    drops to max_num_deg, and read the fraction off the Bezout coefficient.
    The candidate is verified against every sample; failure raises
    ReconstructionError ("degree bounds exceeded") so the caller can retry
    with doubled bounds.
    """
    if len(points) < max_num_deg + max_den_deg + 1:
        raise PreconditionError(
            f"need at least {max_num_deg + max_den_deg + 1} samples, got {len(points)}"
        )
    xs = [int(x) % f.p for x, _ in points]
    if len(set(xs)) != len(xs):
        raise PreconditionError("duplicate abscissa in rational reconstruction")
    node = Poly.one(f)
    xp = Poly.x(f)
    for x in xs:
        node = node * (xp - Poly.const(f, x))
    interp = poly_interp(f, points)
    r0, r1 = node, interp
    t0, t1 = Poly.zero(f), Poly.one(f)
    while not r1.is_zero() and r1.degree > max_num_deg:
        q, r = poly_divrem(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, t0 - q * t1
    num, den = r1, t1
    if den.is_zero() or den.degree > max_den_deg or num.degree > max_num_deg:
        raise ReconstructionError("degree bounds exceeded")
    g = poly_gcd(num, den) if not num.is_zero() else den
    if g.degree > 0:
        num = num // g
        den = den // g
    cand = RatFun(num, den)
    for x, v in points:
        dv = cand.den.eval(x)
        if dv == 0:
            raise ReconstructionError("degree bounds exceeded")
        if cand.num.eval(x) != int(v) % f.p * dv % f.p:
            raise ReconstructionError("degree bounds exceeded")
    return cand
