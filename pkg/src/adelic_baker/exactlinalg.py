"""Exact linear algebra over a number field, plus valuation-pivoted
elimination at finite places (Smith-form invariants over the local ring).

Matrices are lists of rows of ``FieldElement``.  Everything here is exact;
nothing touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .errors import AdelicError
from .fields import FieldElement, NumberField
from .places import Place


def coerce_matrix(field: NumberField, rows) -> list:
    return [[field.element(e) for e in row] for row in rows]


def identity(field: NumberField, n: int) -> list:
    return [
        [field.one() if i == j else field.zero() for j in range(n)]
        for i in range(n)
    ]


def mat_mul(a, b) -> list:
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            acc = None
            for k, x in enumerate(row):
                t = x * b[k][j]
                acc = t if acc is None else acc + t
            new.append(acc)
        out.append(new)
    return out


def mat_vec(a, v) -> list:
    out = []
    for row in a:
        acc = None
        for x, y in zip(row, v):
            t = x * y
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def transpose(a) -> list:
    return [list(col) for col in zip(*a)]


def det(a) -> FieldElement:
    n = len(a)
    if n == 0:
        raise AdelicError("determinant of an empty matrix")
    field = a[0][0].field
    m = [row[:] for row in a]
    out = field.one()
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if piv is None:
            return field.zero()
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            out = -out
        out = out * m[col][col]
        inv = m[col][col].inverse()
        for r in range(col + 1, n):
            if not m[r][col].is_zero():
                f = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] = m[r][c] - f * m[col][c]
    return out


def inverse(a) -> list:
    n = len(a)
    field = a[0][0].field
    m = [row[:] + identity(field, n)[i] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if piv is None:
            raise AdelicError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [e * inv for e in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [e - f * g for e, g in zip(m[r], m[col])]
    return [row[n:] for row in m]


def rank(a) -> int:
    if not a or not a[0]:
        return 0
    m = [row[:] for row in a]
    rows, cols = len(m), len(m[0])
    rk = 0
    for col in range(cols):
        piv = next((r for r in range(rk, rows) if not m[r][col].is_zero()), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        inv = m[rk][col].inverse()
        for r in range(rk + 1, rows):
            if not m[r][col].is_zero():
                f = m[r][col] * inv
                for c in range(col, cols):
                    m[r][c] = m[r][c] - f * m[rk][c]
        rk += 1
        if rk == rows:
            break
    return rk


def kernel_basis(a) -> list:
    """Basis of the right kernel, as a list of vectors."""
    if not a:
        raise AdelicError("kernel of an empty matrix")
    field = a[0][0].field
    m = [row[:] for row in a]
    rows, cols = len(m), len(m[0])
    pivots = []
    rk = 0
    for col in range(cols):
        piv = next((r for r in range(rk, rows) if not m[r][col].is_zero()), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        inv = m[rk][col].inverse()
        m[rk] = [e * inv for e in m[rk]]
        for r in range(rows):
            if r != rk and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [e - f * g for e, g in zip(m[r], m[rk])]
        pivots.append(col)
        rk += 1
        if rk == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero()] * cols
        vec[fc] = field.one()
        for r, pc in enumerate(pivots):
            vec[pc] = -m[r][fc]
        basis.append(vec)
    return basis


def solve(a, b) -> list:
    """Solve the square system a x = b exactly."""
    return mat_vec(inverse(a), b)


def maximal_minors(a) -> list:
    """All r x r minors where r = min(rows, cols); exact field elements."""
    rows, cols = len(a), len(a[0])
    r = min(rows, cols)
    out = []
    for ri in combinations(range(rows), r):
        for ci in combinations(range(cols), r):
            out.append(det([[a[i][j] for j in ci] for i in ri]))
    return out


def min_minor_valuation(a, place: Place) -> Fraction:
    """min_v over maximal minors; the Smith covolume exponent of the lattice
    map at the place.  Raises if every maximal minor vanishes (rank deficient).
    """
    best = None
    for m in maximal_minors(a):
        if m.is_zero():
            continue
        v = place.valuation(m)
        if best is None or v < best:
            best = v
    if best is None:
        raise AdelicError("matrix is not of full rank")
    return best


def elementary_divisor_valuations(a, place: Place) -> list:
    """Valuations n_1 <= n_2 <= ... of the Smith invariants pi^(n_i) of the
    matrix over the valuation ring at ``place`` (exact pivoted elimination,
    never floating point).  Zero rows/columns contribute nothing; the length
    of the result is the rank."""
    if not a or not a[0]:
        return []
    m = [row[:] for row in a]
    rows, cols = len(m), len(m[0])
    out = []
    top = 0
    while top < rows and top < cols:
        piv = None
        pv = None
        for r in range(top, rows):
            for c in range(top, cols):
                if not m[r][c].is_zero():
                    v = place.valuation(m[r][c])
                    if pv is None or v < pv:
                        piv, pv = (r, c), v
        if piv is None:
            break
        r0, c0 = piv
        m[top], m[r0] = m[r0], m[top]
        for row in m:
            row[top], row[c0] = row[c0], row[top]
        inv = m[top][top].inverse()
        for r in range(top + 1, rows):
            if not m[r][top].is_zero():
                f = m[r][top] * inv  # valuation >= 0: pivot is minimal
                for c in range(top, cols):
                    m[r][c] = m[r][c] - f * m[top][c]
        for c in range(top + 1, cols):
            if not m[top][c].is_zero():
                f = m[top][c] * inv
                for r in range(top, rows):
                    m[r][c] = m[r][c] - f * m[r][top]
        out.append(pv)
        top += 1
    return out


def padic_image_basis(a, place: Place) -> list:
    """An O_v-basis (square matrix, columns) of the lattice a(O_v^cols) for a
    full-row-rank matrix, by valuation-pivoted column reduction."""
    if not a or not a[0]:
        raise AdelicError("empty matrix")
    m = [row[:] for row in a]
    rows, cols = len(m), len(m[0])
    col_of = list(range(cols))
    top = 0
    for top in range(rows):
        piv = None
        pv = None
        for c in range(top, cols):
            if not m[top][c].is_zero():
                v = place.valuation(m[top][c])
                if pv is None or v < pv:
                    piv, pv = c, v
        if piv is None:
            raise AdelicError("matrix is not of full row rank")
        for row in m:
            row[top], row[piv] = row[piv], row[top]
        inv = m[top][top].inverse()
        for c in range(top + 1, cols):
            if not m[top][c].is_zero():
                f = m[top][c] * inv  # in O_v by pivot minimality in its row
                for r in range(rows):
                    m[r][c] = m[r][c] - f * m[r][top]
    return [[m[r][c] for c in range(rows)] for r in range(rows)]
