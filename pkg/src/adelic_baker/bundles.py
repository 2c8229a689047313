"""Adelic hermitian vector bundles on spec k.

A bundle is k^nu with the standard norm (hermitian l2 at archimedean places,
sup norm at finite places) except at finitely many places, where the norm is
|x|_v := |M_v x|_(2,v) for an invertible matrix M_v over k.  That frame-matrix
representation keeps finite-place norms pure (values in |k_v|_v) and makes
Arakelov degrees exact determinant computations:

    deg(E) = -(1/D) sum_v n_v log |det M_v|_v.

Sub- and quotient bundles are represented by a basis (and a complement) over
the parent; their per-place degree factors come from Gram determinants at
archimedean places and Smith-invariant valuations at finite ones, so the
hermitian exact-sequence additivity deg(sub) + deg(quot) = deg(E) is a real
cross-check of two independent computations, not a definition.

The volume-ratio definition of the degree lives in ``oracles`` as a
Monte-Carlo / lattice-counting check, not as the production path.
All bundle objects are immutable and safe to share across threads.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import exactlinalg as xl
from .balls import ComplexBall, PrecisionContext, RealBall
from .errors import (
    AdelicError,
    DimensionMismatch,
    InexactMaxSlope,
    NotASubspace,
    SingularNormSpec,
    ZeroBundle,
)
from .fields import FieldElement, NumberField
from .places import FINITE, PPower, Place, arch_places, places_above, support_primes

NEG_INF = float("-inf")


class AdelicBundle:
    """Hermitian adelic bundle in frame-matrix form."""

    def __init__(self, field: NumberField, dim: int, deviations: dict = None):
        self.field = field
        self.dim = dim
        devs = {}
        for place, rows in (deviations or {}).items():
            mat = xl.coerce_matrix(field, rows)
            if len(mat) != dim or any(len(r) != dim for r in mat):
                raise DimensionMismatch("deviation matrix has wrong shape")
            if xl.det(mat).is_zero():
                raise SingularNormSpec(f"deviation at {place} is singular")
            devs[place] = mat
        self.deviations = devs

    def __repr__(self):
        return f"AdelicBundle(dim={self.dim}, deviations={list(self.deviations)})"

    # -- local data -----------------------------------------------------

    def local_matrix(self, place: Place):
        return self.deviations.get(place)

    def transformed(self, place: Place, vec: list) -> list:
        mat = self.deviations.get(place)
        return xl.mat_vec(mat, vec) if mat is not None else vec

    def norm_at(self, place: Place, coords, ctx: PrecisionContext = None):
        """|x|_(E,v) of a k-rational vector: RealBall (arch) or PPower (finite)."""
        ctx = ctx or PrecisionContext()
        vec = [self.field.element(c) for c in coords]
        if len(vec) != self.dim:
            raise DimensionMismatch("vector has wrong length")
        y = self.transformed(place, vec)
        if place.kind == FINITE:
            return _sup_abs(y, place)
        root = place.root(ctx.prec)
        acc = None
        for c in y:
            sq = c.embed(root).abs().pow_int(2)
            acc = sq if acc is None else acc + sq
        return acc.sqrt()

    # -- degree / slope ----------------------------------------------------

    def degree(self, ctx: PrecisionContext = None) -> RealBall:
        """Normalized Arakelov degree via the determinant formula."""
        ctx = ctx or PrecisionContext()
        prec = ctx.prec
        if self.dim == 0:
            return RealBall(0, 0, prec)
        total = RealBall(0, 0, prec)
        D = self.field.degree
        for place, mat in self.deviations.items():
            d = xl.det(mat)
            if place.kind == FINITE:
                contrib = -place.valuation(d) * place.n_v
                total = total + RealBall.log_int(place.p, prec) * contrib
            else:
                a = d.embed(place.root(prec))
                total = total + a.abs().log() * place.n_v
        return total * Fraction(-1, D)

    def slope(self, ctx: PrecisionContext = None):
        if self.dim == 0:
            return NEG_INF
        return self.degree(ctx) * Fraction(1, self.dim)

    def is_diagonal(self) -> bool:
        return all(
            all(mat[i][j].is_zero() for i in range(self.dim) for j in range(self.dim) if i != j)
            for mat in self.deviations.values()
        )

    def line_degrees(self, ctx: PrecisionContext = None) -> list:
        """Degrees of the coordinate lines (diagonal bundles only)."""
        ctx = ctx or PrecisionContext()
        if not self.is_diagonal():
            raise InexactMaxSlope("line degrees need a simultaneously diagonal bundle")
        prec = ctx.prec
        out = []
        D = self.field.degree
        for j in range(self.dim):
            total = RealBall(0, 0, prec)
            for place, mat in self.deviations.items():
                e = mat[j][j]
                if place.kind == FINITE:
                    total = total + RealBall.log_int(place.p, prec) * (
                        -place.valuation(e) * place.n_v
                    )
                else:
                    total = total + e.embed(place.root(prec)).abs().log() * place.n_v
            out.append(total * Fraction(-1, D))
        return out

    def max_slope(self, ctx: PrecisionContext = None):
        """(value, exact) - exact for simultaneously diagonal bundles (max of
        the coordinate-line degrees); otherwise a certified lower bound over a
        documented candidate family (coordinate subspaces, deviation-matrix
        column preimages), flagged exact=False."""
        ctx = ctx or PrecisionContext()
        if self.dim == 0:
            return NEG_INF, True
        if self.is_diagonal():
            degs = self.line_degrees(ctx)
            best = degs[0]
            for d in degs[1:]:
                if d.mid > best.mid:
                    best = d
            return best, True
        best = None
        for basis in self._candidate_subspaces():
            sub = SubBundle(self, basis)
            s = sub.degree(ctx) * Fraction(1, len(basis))
            if best is None or s.mid > best.mid:
                best = s
        return best, False

    def _candidate_subspaces(self):
        nu = self.dim
        idx = range(nu)
        coords = []
        subsets = (
            itertools.chain.from_iterable(
                itertools.combinations(idx, r) for r in range(1, nu + 1)
            )
            if nu <= 6
            else itertools.chain(itertools.combinations(idx, 1), [tuple(idx)])
        )
        for js in subsets:
            coords.append([_unit_vec(self.field, nu, j) for j in js])
        for mat in self.deviations.values():
            inv = xl.inverse(mat)
            for j in range(nu):
                coords.append([[inv[i][j] for i in range(nu)]])
        return coords

    # -- heights ---------------------------------------------------------

    def element_height(self, vec: list, ctx: PrecisionContext = None) -> RealBall:
        """h_E(x) = (1/D) sum_v n_v log |x|_(E,v) for x != 0 in k^nu."""
        ctx = ctx or PrecisionContext()
        prec = ctx.prec
        field = self.field
        vec = [field.element(c) for c in vec]
        if len(vec) != self.dim:
            raise DimensionMismatch("vector has wrong length")
        if all(c.is_zero() for c in vec):
            return RealBall(0, 0, prec)
        D = field.degree
        primes = set()
        for c in vec:
            primes.update(support_primes(c))
        for place, mat in self.deviations.items():
            if place.kind == FINITE:
                primes.add(place.p)
                for c in xl.mat_vec(mat, vec):
                    primes.update(support_primes(c))
        total = RealBall(0, 0, prec)
        for p in sorted(primes):
            for place in places_above(field, p):
                n = self.norm_at(place, vec, ctx)
                if not n.is_zero and n.exponent != 0:
                    total = total + n.log_ball(prec) * place.n_v
        for place in arch_places(field):
            total = total + self.norm_at(place, vec, ctx).log() * place.n_v
        return total * Fraction(1, D)

    # -- algebra ---------------------------------------------------------

    def dual(self) -> "AdelicBundle":
        """Dual bundle: per-place matrix (M_v^-1)^T (the duality pairing is
        bilinear, so no conjugation enters even at complex places)."""
        devs = {
            place: xl.transpose(xl.inverse(mat))
            for place, mat in self.deviations.items()
        }
        return AdelicBundle(self.field, self.dim, devs)

    def direct_sum(self, other: "AdelicBundle") -> "AdelicBundle":
        if other.field != self.field:
            raise AdelicError("mixed fields in direct sum")
        n1, n2 = self.dim, other.dim
        zero = self.field.zero()
        devs = {}
        for place in set(self.deviations) | set(other.deviations):
            a = self.deviations.get(place) or xl.identity(self.field, n1)
            b = other.deviations.get(place) or xl.identity(self.field, n2)
            rows = []
            for i in range(n1):
                rows.append(list(a[i]) + [zero] * n2)
            for i in range(n2):
                rows.append([zero] * n1 + list(b[i]))
            devs[place] = rows
        return AdelicBundle(self.field, n1 + n2, devs)

    def sub(self, spanning) -> "SubBundle":
        return SubBundle(self, _basis_from_spanning(self, spanning))

    def quotient(self, spanning) -> "QuotientBundle":
        return QuotientBundle(self, _basis_from_spanning(self, spanning))


def _unit_vec(field, n, j):
    return [field.one() if i == j else field.zero() for i in range(n)]


def _sup_abs(vec, place: Place) -> PPower:
    """sup-norm |y|_v = p^(-min val) of a vector of field elements."""
    best = None
    for c in vec:
        if c.is_zero():
            continue
        v = place.valuation(c)
        if best is None or v < best:
            best = v
    if best is None:
        return PPower(place.p, None)
    return PPower(place.p, -best)


def _basis_from_spanning(bundle: AdelicBundle, spanning) -> list:
    field = bundle.field
    vecs = [[field.element(c) for c in v] for v in spanning]
    if any(len(v) != bundle.dim for v in vecs):
        raise DimensionMismatch("spanning vectors have wrong length")
    rows = [list(v) for v in vecs]
    rk = xl.rank(rows)
    if rk == 0:
        raise NotASubspace("spanning set is zero")
    if rk < len(vecs):
        # extract a maximal independent subset, keeping input order
        basis = []
        for v in vecs:
            if xl.rank(basis + [v]) > len(basis):
                basis.append(v)
        vecs = basis
    return vecs


def _complement_basis(bundle: AdelicBundle, basis: list) -> list:
    field = bundle.field
    out = []
    cur = [list(v) for v in basis]
    for j in range(bundle.dim):
        cand = _unit_vec(field, bundle.dim, j)
        if xl.rank(cur + [cand]) > len(cur):
            cur.append(cand)
            out.append(cand)
    return out


class _DerivedBundle:
    """Shared degree plumbing for sub/quotient bundles."""

    field: NumberField
    dim: int

    def _relevant_places(self):
        parent = self.parent
        primes = set()
        for place in parent.deviations:
            if place.kind == FINITE:
                primes.add(place.p)
        for m in self._finite_matrices_for_support():
            for row in m:
                for e in row:
                    primes.update(support_primes(e))
        places = list(arch_places(parent.field))
        for p in sorted(primes):
            places.extend(places_above(parent.field, p))
        return places

    def degree(self, ctx: PrecisionContext = None) -> RealBall:
        ctx = ctx or PrecisionContext()
        prec = ctx.prec
        total = RealBall(0, 0, prec)
        D = self.field.degree
        for place in self._relevant_places():
            total = total + self._local_degree_term(place, prec)
        return total * Fraction(1, D)

    def slope(self, ctx: PrecisionContext = None):
        if self.dim == 0:
            return NEG_INF
        return self.degree(ctx) * Fraction(1, self.dim)


class SubBundle(_DerivedBundle):
    """Sub-bundle given by a basis over the parent; norms are restrictions."""

    def __init__(self, parent: AdelicBundle, basis: list):
        self.parent = parent
        self.field = parent.field
        self.basis = basis
        self.dim = len(basis)
        # column matrix B, size nu x r
        self.B = [[basis[j][i] for j in range(self.dim)] for i in range(parent.dim)]

    def _finite_matrices_for_support(self):
        mats = [self.B]
        for place, mat in self.parent.deviations.items():
            if place.kind == FINITE:
                mats.append(xl.mat_mul(mat, self.B))
        return mats

    def norm_at(self, place: Place, coords, ctx: PrecisionContext = None):
        vec = xl.mat_vec(self.B, [self.field.element(c) for c in coords])
        return self.parent.norm_at(place, vec, ctx)

    def _local_degree_term(self, place: Place, prec: int) -> RealBall:
        mat = self.parent.deviations.get(place)
        T = xl.mat_mul(mat, self.B) if mat is not None else self.B
        if place.kind == FINITE:
            g = xl.min_minor_valuation(T, place)
            return RealBall.log_int(place.p, prec) * Fraction(g * place.n_v)
        gram = _gram_det_ball(T, place, prec)
        return gram.log() * Fraction(-place.n_v, 2)


class QuotientBundle(_DerivedBundle):
    """Quotient E/F with the minimum-over-preimages norm; coordinates are a
    complement basis picked from the standard frame."""

    def __init__(self, parent: AdelicBundle, sub_basis: list):
        self.parent = parent
        self.field = parent.field
        self.sub_basis = sub_basis
        self.comp_basis = _complement_basis(parent, sub_basis)
        self.dim = len(self.comp_basis)
        if self.dim == 0:
            raise ZeroBundle("quotient by the whole space")
        nu = parent.dim
        r = len(sub_basis)
        cols = sub_basis + self.comp_basis
        full = [[cols[j][i] for j in range(nu)] for i in range(nu)]  # [B C]
        inv = xl.inverse(full)
        self.S = inv[r:]  # projection x -> complement coordinates
        self.B = [[sub_basis[j][i] for j in range(r)] for i in range(nu)]
        self.BC = full

    def _finite_matrices_for_support(self):
        mats = [self.BC, self.S]
        for place, mat in self.parent.deviations.items():
            if place.kind == FINITE:
                mats.append(xl.mat_mul(self.S, xl.inverse(mat)))
        return mats

    def _local_degree_term(self, place: Place, prec: int) -> RealBall:
        mat = self.parent.deviations.get(place)
        if place.kind == FINITE:
            minv = xl.inverse(mat) if mat is not None else None
            W = xl.mat_mul(self.S, minv) if minv is not None else self.S
            g = xl.min_minor_valuation(W, place)
            return RealBall.log_int(place.p, prec) * Fraction(-g * place.n_v)
        M = mat
        TB = xl.mat_mul(M, self.B) if M is not None else self.B
        TBC = xl.mat_mul(M, self.BC) if M is not None else self.BC
        det_full = _gram_det_ball(TBC, place, prec)
        det_sub = _gram_det_ball(TB, place, prec)
        return (det_full.log() - det_sub.log()) * Fraction(-place.n_v, 2)

    def norm_at(self, place: Place, coords, ctx: PrecisionContext = None):
        """Quotient norm of the class with the given complement coordinates."""
        ctx = ctx or PrecisionContext()
        field = self.field
        c = [field.element(t) for t in coords]
        if len(c) != self.dim:
            raise DimensionMismatch("wrong quotient coordinates")
        rep = [None] * self.parent.dim
        for i in range(self.parent.dim):
            acc = None
            for j, cj in enumerate(c):
                t = self.comp_basis[j][i] * cj
                acc = t if acc is None else acc + t
            rep[i] = acc
        mat = self.parent.deviations.get(place)
        if place.kind == FINITE:
            minv = xl.inverse(mat) if mat is not None else None
            W = xl.mat_mul(self.S, minv) if minv is not None else self.S
            basis = xl.padic_image_basis(W, place)
            tau = xl.solve(basis, c)
            return _sup_abs(tau, place)
        # archimedean: norm of the orthogonal projection onto F-perp
        prec = ctx.prec
        M = mat
        TB = xl.mat_mul(M, self.B) if M is not None else self.B
        root = place.root(prec)
        emb_rep = [e.embed(root) for e in (xl.mat_vec(M, rep) if M is not None else rep)]
        emb_B = [[e.embed(root) for e in row] for row in TB]
        return _projection_residual_norm(emb_rep, emb_B, prec)


def _gram_det_ball(T, place: Place, prec: int) -> RealBall:
    """det of the hermitian Gram matrix of the embedded columns of T."""
    root = place.root(prec)
    cols = list(zip(*T))
    emb = [[e.embed(root) for e in col] for col in cols]
    r = len(emb)
    gram = [[_hdot(emb[i], emb[j], prec) for j in range(r)] for i in range(r)]
    d = _ball_det(gram, prec)
    if isinstance(d, ComplexBall):
        d = d.abs()  # hermitian determinant is real; |.| drops the slack
    return d


def _hdot(a, b, prec):
    acc = None
    for x, y in zip(a, b):
        xc = x.conjugate() if isinstance(x, ComplexBall) else x
        t = xc * y
        acc = t if acc is None else acc + t
    return acc


def _ball_det(m, prec):
    n = len(m)
    if n == 1:
        return m[0][0]
    out = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _ball_det(minor, prec)
        if j % 2:
            term = term * (-1)
        out = term if out is None else out + term
    return out


def _projection_residual_norm(vec, Bcols_rows, prec):
    """|v - proj_span(B) v| for embedded balls (normal equations, small dims)."""
    cols = list(zip(*Bcols_rows))
    r = len(cols)
    gram = [[_hdot(list(cols[i]), list(cols[j]), prec) for j in range(r)] for i in range(r)]
    rhs = [_hdot(list(cols[i]), vec, prec) for i in range(r)]
    coef = _ball_solve(gram, rhs, prec)
    acc = None
    for k, v in enumerate(vec):
        s = v
        for j in range(r):
            s = s - coef[j] * cols[j][k]
        t = s.abs().pow_int(2) if isinstance(s, ComplexBall) else s.abs().pow_int(2)
        acc = t if acc is None else acc + t
    return acc.sqrt()


def _ball_solve(m, b, prec):
    n = len(m)
    m = [row[:] + [b[i]] for i, row in enumerate(m)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(_mid(m[r][col])))
        m[col], m[piv] = m[piv], m[col]
        inv_p = m[col][col]
        for r in range(n):
            if r != col:
                f = m[r][col] / inv_p
                m[r] = [e - f * g for e, g in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def _mid(x):
    return x.mid


# -- Liouville ---------------------------------------------------------------


def liouville_check(coords, bundle: AdelicBundle, ctx: PrecisionContext = None,
                    tol=Fraction(1, 10**20)) -> bool:
    """h_E(x) >= -max_slope(E), enclosure-separated (equality cases pass
    within tol).  Requires an exact maximal slope."""
    ctx = ctx or PrecisionContext()
    vec = [bundle.field.element(c) for c in coords]
    if all(c.is_zero() for c in vec):
        raise AdelicError("Liouville needs x != 0")
    mu, exact = bundle.max_slope(ctx)
    if not exact:
        raise InexactMaxSlope("Liouville check requires an exact maximal slope")
    h = bundle.element_height(vec, ctx)
    gap = h + mu
    return gap.upper >= -float(tol)
