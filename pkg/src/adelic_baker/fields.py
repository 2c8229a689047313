"""Number fields in power-basis representation with exact arithmetic.

A field K = Q[x]/(f) is given by a monic irreducible integer polynomial f;
elements are vectors of rationals in the power basis 1, theta, ..., theta^(D-1).
The rational field is the degree-1 field with polynomial x (theta = 0), and
every formula degrades to it without special-casing.

Irreducibility is certified at construction through sympy's factorization,
which is exact over Z; desk scale keeps degrees small (<= 8).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

import sympy

from .errors import AdelicError


def _poly_trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def poly_sub(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _poly_trim(out)


def poly_divmod(a, b):
    """Euclidean division over Q; b need not be monic."""
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    inv = Fraction(1) / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        if c:
            q[i] = c
            for j, y in enumerate(b):
                a[i + j] -= c * y
    return _poly_trim(q), _poly_trim(a)


class NumberField:
    """Monic irreducible defining polynomial over Z; degree D >= 1."""

    def __init__(self, coeffs, check_irreducible: bool = True):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) < 2:
            raise AdelicError("defining polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise AdelicError("defining polynomial must be monic")
        self.coeffs = coeffs
        self.degree = len(coeffs) - 1
        if check_irreducible and self.degree > 1:
            x = sympy.Symbol("x")
            poly = sympy.Poly(sum(c * x**i for i, c in enumerate(coeffs)), x)
            if not poly.is_irreducible:
                raise AdelicError(f"{self.poly_str()} is reducible over Q")
        # reduction table: theta^k for k in [D, 2D-2] as power-basis vectors
        d = self.degree
        red = []
        cur = [Fraction(-c) for c in coeffs[:-1]]  # theta^D
        red.append(list(cur))
        for _ in range(d - 2):
            cur = [Fraction(0)] + cur
            if len(cur) > d:
                top = cur.pop()
                for i in range(d):
                    cur[i] += top * red[0][i]
            red.append(list(cur))
        self._reduction = red
        self._arch_cache: dict = {}

    # -- identity -----------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def poly_str(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{'+' if c > 0 else '-'}{abs(c)}")
            else:
                xs = "x" if i == 1 else f"x^{i}"
                mag = "" if abs(c) == 1 else str(abs(c))
                terms.append(f"{'+' if c > 0 else '-'}{mag}{xs}")
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s

    def __repr__(self):
        return f"NumberField({self.poly_str()})"

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    # -- element constructors ------------------------------------------

    def element(self, coeffs) -> "FieldElement":
        if isinstance(coeffs, FieldElement):
            if coeffs.field != self:
                raise AdelicError("element belongs to a different field")
            return coeffs
        if isinstance(coeffs, (int, Fraction)):
            vec = [Fraction(coeffs)] + [Fraction(0)] * (self.degree - 1)
            return FieldElement(self, vec)
        vec = [Fraction(c) for c in coeffs]
        if len(vec) > self.degree:
            raise AdelicError("too many coordinates for this field")
        vec += [Fraction(0)] * (self.degree - len(vec))
        return FieldElement(self, vec)

    def zero(self) -> "FieldElement":
        return self.element(0)

    def one(self) -> "FieldElement":
        return self.element(1)

    def gen(self) -> "FieldElement":
        if self.degree == 1:
            # theta = root of x is 0
            return self.zero()
        return self.element([0, 1])

    def reduce_poly(self, vec) -> list:
        """Reduce a rational coefficient vector mod the defining polynomial."""
        vec = [Fraction(c) for c in vec]
        d = self.degree
        if len(vec) <= d:
            return vec + [Fraction(0)] * (d - len(vec))
        f = [Fraction(c) for c in self.coeffs]
        _, r = poly_divmod(vec, f)
        return r + [Fraction(0)] * (d - len(r))


RATIONALS = NumberField((0, 1))  # Q as the degree-1 field with polynomial x
GAUSSIANS = NumberField((1, 0, 1))  # Q(i)


class FieldElement:
    """Element of a number field; exact power-basis coordinates."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        if len(self.coeffs) != field.degree:
            raise AdelicError("coordinate vector has wrong length")

    def __repr__(self):
        return f"FieldElement({list(map(str, self.coeffs))})"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.element(other)
        return (
            isinstance(other, FieldElement)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise AdelicError(f"{self} is not rational")
        return self.coeffs[0]

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise AdelicError("mixed fields")
            return other
        return self.field.element(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        d = self.field.degree
        prod = poly_mul(list(self.coeffs), list(o.coeffs))
        if len(prod) > d:
            red = self.field._reduction
            out = [Fraction(0)] * d
            for i in range(min(d, len(prod))):
                out[i] = prod[i]
            for k in range(d, len(prod)):
                c = prod[k]
                if c:
                    row = red[k - d]
                    for i in range(d):
                        out[i] += c * row[i]
            prod = out
        else:
            prod += [Fraction(0)] * (d - len(prod))
        return FieldElement(self.field, prod)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0")
        if self.field.degree == 1:
            return self.field.element(Fraction(1) / self.coeffs[0])
        # extended gcd of self (as poly) with the defining polynomial
        f = [Fraction(c) for c in self.field.coeffs]
        g = _poly_trim(list(self.coeffs))
        r0, r1 = f, g
        s0, s1 = [], [Fraction(1)]  # coefficients of g in r0, r1
        while r1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
        # r0 = gcd (a nonzero constant since f is irreducible); s0*g = r0 mod f
        c = r0[0]
        inv = [x / c for x in s0]
        return FieldElement(self.field, self.field.reduce_poly(inv))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def denominator_lcm(self) -> int:
        from math import lcm

        return lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1

    def norm(self) -> Fraction:
        """Field norm N_{K/Q}: determinant of the multiplication matrix."""
        d = self.field.degree
        cols = [list((self * self._basis_vector(i)).coeffs) for i in range(d)]
        mat = [[cols[j][i] for j in range(d)] for i in range(d)]
        return _det_fraction(mat)

    def _basis_vector(self, i: int) -> "FieldElement":
        vec = [Fraction(0)] * self.field.degree
        vec[i] = Fraction(1)
        return FieldElement(self.field, vec)

    def embed(self, root) -> "object":
        """Evaluate at an embedding given by a Real/ComplexBall root."""
        acc = None
        for c in reversed(self.coeffs):
            if acc is None:
                acc = root * 0 + Fraction(c)
            else:
                acc = acc * root + Fraction(c)
        return acc


def _det_fraction(mat) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(mat)
    mat = [row[:] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if mat[r][col] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        inv = Fraction(1) / mat[col][col]
        for r in range(col + 1, n):
            if mat[r][col]:
                factor = mat[r][col] * inv
                for c in range(col, n):
                    mat[r][c] -= factor * mat[col][c]
    return det


# -- text forms (External Interfaces) ----------------------------------

_TERM_RE = re.compile(r"([+-]?[^+-]+)")


def parse_field(text: str) -> NumberField:
    """Parse 'x^2+1' style monic integer polynomials ('x' gives Q)."""
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise AdelicError("empty field literal")
    coeffs: dict[int, int] = {}
    for term in _TERM_RE.findall(s):
        m = re.fullmatch(r"([+-]?)(\d*)(x(?:\^(\d+))?)?", term)
        if not m or (not m.group(2) and not m.group(3)):
            raise AdelicError(f"cannot parse term {term!r} in field literal")
        sign = -1 if m.group(1) == "-" else 1
        coef = int(m.group(2)) if m.group(2) else 1
        if m.group(3):
            expo = int(m.group(4)) if m.group(4) else 1
        else:
            expo = 0
        coeffs[expo] = coeffs.get(expo, 0) + sign * coef
    deg = max(coeffs)
    vec = [coeffs.get(i, 0) for i in range(deg + 1)]
    return get_field(tuple(vec))


@lru_cache(maxsize=64)
def get_field(coeff_tuple: tuple) -> NumberField:
    return NumberField(coeff_tuple)


def parse_element(field: NumberField, text: str) -> FieldElement:
    """Parse '[1/2, 3]' rational coordinate vectors (or a bare rational)."""
    s = text.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise AdelicError(f"bad element literal {text!r}")
        items = [t for t in s[1:-1].split(",") if t.strip()]
        return field.element([Fraction(t.strip()) for t in items])
    return field.element(Fraction(s))
