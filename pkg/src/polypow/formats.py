"""Text formats for polynomials, matrices, sequence specs and instances.

A Poly line is space-separated coefficients, constant term first; the zero
polynomial is the single token "0".  A BiPoly block starts with a line
holding deg_y (-1 for zero) followed by one Poly line per y-coefficient,
constant-in-y first.  Matrix files and sequence-spec files start with the
header line "p r d".
"""

from .errors import ParseError
from .ff import Fp
from .holo import CFiniteSpec
from .upoly import Poly
from .ypoly import BiPoly, PolyMatrix


def poly_to_line(q):
    if q.is_zero():
        return "0"
    return " ".join(str(int(v)) for v in q.c)


def poly_from_line(f, line):
    toks = line.split()
    if not toks:
        raise ParseError("empty polynomial line")
    try:
        coeffs = [int(t) for t in toks]
    except ValueError as e:
        raise ParseError(f"bad coefficient in {line!r}") from e
    return Poly(f, coeffs)


def bipoly_to_lines(b):
    out = [str(b.degree_y)]
    for c in b.cy:
        out.append(poly_to_line(c))
    return out


def bipoly_from_lines(f, lines, at=0):
    """(BiPoly, next line index)."""
    try:
        dy = int(lines[at].split()[0])
    except (IndexError, ValueError) as e:
        raise ParseError("bad bivariate degree line") from e
    if dy < -1:
        raise ParseError("negative bivariate degree")
    cy = []
    for k in range(dy + 1):
        if at + 1 + k >= len(lines):
            raise ParseError("truncated bivariate block")
        cy.append(poly_from_line(f, lines[at + 1 + k]))
    return BiPoly(f, cy), at + 1 + dy + 1


def _header(lines):
    if not lines:
        raise ParseError("empty file")
    toks = lines[0].split()
    if len(toks) != 3:
        raise ParseError("expected header line 'p r d'")
    try:
        p, r, d = (int(t) for t in toks)
    except ValueError as e:
        raise ParseError("non-integer header field") from e
    if r < 1 or d < 0:
        raise ParseError("header out of range")
    return p, r, d


def matrix_to_text(m):
    lines = [f"{m.f.p} {m.r} {m.d}"]
    for row in m.rows:
        for e in row:
            lines.append(poly_to_line(e))
    return "\n".join(lines) + "\n"


def matrix_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    p, r, d = _header(lines)
    f = Fp(p)
    if len(lines) != 1 + r * r:
        raise ParseError(f"matrix file needs {r * r} entry lines, found {len(lines) - 1}")
    rows = []
    k = 1
    for _ in range(r):
        row = []
        for _ in range(r):
            e = poly_from_line(f, lines[k])
            if not e.is_zero() and e.degree > d:
                raise ParseError("entry degree exceeds header degree")
            row.append(e)
            k += 1
        rows.append(row)
    return PolyMatrix(f, rows)


def spec_to_text(spec):
    lines = [f"{spec.f.p} {spec.r} {spec.d}"]
    for q in spec.c:
        lines.append(poly_to_line(q))
    for q in spec.init:
        lines.append(poly_to_line(q))
    return "\n".join(lines) + "\n"


def spec_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    p, r, d = _header(lines)
    f = Fp(p)
    if len(lines) != 1 + 2 * r:
        raise ParseError(f"spec file needs {2 * r} polynomial lines, found {len(lines) - 1}")
    cs = [poly_from_line(f, lines[1 + k]) for k in range(r)]
    for q in cs:
        if not q.is_zero() and q.degree > d:
            raise ParseError("coefficient degree exceeds header degree")
    inits = [poly_from_line(f, lines[1 + r + k]) for k in range(r)]
    return CFiniteSpec(f, cs, inits)


def bivariate_to_text(p_mod, q_base):
    lines = [str(p_mod.f.p)]
    lines.extend(bipoly_to_lines(p_mod))
    lines.extend(bipoly_to_lines(q_base))
    return "\n".join(lines) + "\n"


def bivariate_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty file")
    try:
        p = int(lines[0].split()[0])
    except (IndexError, ValueError) as e:
        raise ParseError("bad prime line") from e
    f = Fp(p)
    p_mod, at = bipoly_from_lines(f, lines, 1)
    q_base, at = bipoly_from_lines(f, lines, at)
    if at != len(lines):
        raise ParseError("trailing lines in bivariate file")
    return p_mod, q_base
