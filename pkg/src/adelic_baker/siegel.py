"""Siegel-lemma bounds, twisted norms, and slope-difference arithmetic.

The twisted bundle E_alpha deforms the norm of a hermitian bundle at one
place v0 by adjoining alpha times the image under a linear map a (matrix A in
orthonormal frames):

    |x|_(E_alpha,v0) = (|x|^2 + |alpha A x|^2)^(1/2)   v0 archimedean,
    |x|_(E_alpha,v0) = max(|x|, |alpha A x|)           v0 finite.

The slope drop is controlled exactly by the singular values of A:

    slope(E_alpha) - slope(E) = -(n_v0/(nu D)) sum_i log |(1, alpha s_i)|_2,

computed here with certified archimedean enclosures (SVD of the midpoint
matrix plus a Weyl residual bound) and exact Smith invariants pi^(n_i) at
finite places.  Witness searches are exhaustive with explicit budgets and
lexicographic tie-breaking; LLL-style reduction is deliberately not used.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import exactlinalg as xl
from .balls import ComplexBall, PrecisionContext, RealBall
from .bundles import AdelicBundle
from .errors import (
    AdelicError,
    DimensionMismatch,
    HypothesisViolated,
    RankUncertified,
    SearchBudgetExceeded,
)
from .fields import FieldElement, GAUSSIANS, NumberField, RATIONALS
from .places import FINITE, PPower, Place


# ---------------------------------------------------------------------------
# twisted bundles


class TwistedBundle:
    """A hermitian bundle with the norm at one place deformed by alpha and a
    linear map.  ``alpha`` and the matrix rows are exact field data (finite
    v0 requires exactness so the Smith invariants are exact)."""

    def __init__(self, base: AdelicBundle, v0: Place, alpha, rows):
        self.base = base
        self.v0 = v0
        self.field = base.field
        self.alpha = self.field.element(alpha)
        self.A = xl.coerce_matrix(self.field, rows)
        if any(len(r) != base.dim for r in self.A):
            raise DimensionMismatch("twist matrix must have nu columns")
        self.mu = len(self.A)
        self.nu = base.dim

    def twisted_norm(self, coords, ctx: PrecisionContext = None):
        """Norm of a k-rational vector in E_alpha at v0."""
        ctx = ctx or PrecisionContext()
        vec = [self.field.element(c) for c in coords]
        if len(vec) != self.nu:
            raise DimensionMismatch("vector has wrong length")
        base_norm = self.base.norm_at(self.v0, vec, ctx)
        img = [self.alpha * t for t in xl.mat_vec(self.A, vec)]
        if self.v0.kind == FINITE:
            img_norm = _sup_ppower(img, self.v0)
            if img_norm.is_zero:
                return base_norm
            if base_norm.is_zero:
                return img_norm
            return img_norm if img_norm.exponent > base_norm.exponent else base_norm
        root = self.v0.root(ctx.prec)
        acc = base_norm.pow_int(2)
        for t in img:
            acc = acc + t.embed(root).abs().pow_int(2)
        return acc.sqrt()

    def singular_spectrum(self, ctx: PrecisionContext = None) -> "SingularSpectrum":
        return singular_spectrum(self.A, self.v0, ctx)

    def slope_difference(self, ctx: PrecisionContext = None) -> RealBall:
        return slope_difference(self, ctx)


def _sup_ppower(vec, place: Place) -> PPower:
    best = None
    for c in vec:
        if c.is_zero():
            continue
        v = place.valuation(c)
        if best is None or v < best:
            best = v
    return PPower(place.p, None if best is None else -best)


@dataclass
class SingularSpectrum:
    """Nonzero singular data of the twist matrix at v0.

    Archimedean: ``values`` are positive RealBall enclosures, descending.
    Finite: ``exponents`` lists the Smith exponents n_i of the invariants
    pi^(n_i) (so |sigma_i| = p^(-n_i)), sorted with |sigma_i| descending.
    """

    rho: int
    values: list = None
    exponents: list = None


def singular_spectrum(A_rows, v0: Place, ctx: PrecisionContext = None) -> SingularSpectrum:
    ctx = ctx or PrecisionContext()
    field = v0.field
    A = [[field.element(e) for e in row] for row in A_rows] if not (
        A_rows and isinstance(A_rows[0][0], FieldElement)
    ) else A_rows
    if v0.kind == FINITE:
        exps = xl.elementary_divisor_valuations(A, v0)
        exps = sorted(int(e) for e in exps)
        return SingularSpectrum(rho=len(exps), exponents=exps)
    rho_exact = xl.rank(A)
    prec = ctx.prec
    root = v0.root(prec)
    emb = [[e.embed(root) for e in row] for row in A]
    with mpmath.workprec(prec):
        mid = mpmath.matrix([[_to_mpc(e) for e in row] for row in emb])
        try:
            _, svals, _ = mpmath.svd(mid, full_matrices=False, compute_uv=True)
        except TypeError:
            _, svals, _ = mpmath.svd(mid)
        svals = sorted((mpmath.mpf(s) for s in svals), reverse=True)
        # Weyl: |s_i(A) - s_i(mid)| <= ||A - mid||_2 <= Frobenius of radii
        err = mpmath.mpf(0)
        for row in emb:
            for e in row:
                err += mpmath.mpf(e.rad) ** 2
        err = mpmath.sqrt(err) + mpmath.mpf(2) ** (-prec + 8) * (svals[0] if svals else 1)
    out = []
    for i, s in enumerate(svals):
        ball = RealBall(s, err, prec)
        if i < rho_exact:
            if not ball.nonzero():
                raise RankUncertified(
                    f"singular value {i} enclosure touches 0 at {prec} bits"
                )
            out.append(ball)
        else:
            # exact rank says this one is 0; enclosure must allow it
            if ball.lower > 0:
                raise RankUncertified("spurious nonzero singular value")
    return SingularSpectrum(rho=rho_exact, values=out)


def _to_mpc(ball):
    return ball.mid if isinstance(ball, ComplexBall) else mpmath.mpc(ball.mid)


# ---------------------------------------------------------------------------
# slope differences


def slope_difference(tb: TwistedBundle, ctx: PrecisionContext = None) -> RealBall:
    """slope(E_alpha) - slope(E) by the singular-value formula; always <= 0,
    and 0 exactly at alpha = 0."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    nu, D = tb.nu, tb.field.degree
    n_v = tb.v0.n_v
    if tb.alpha.is_zero():
        return RealBall(0, 0, prec)
    spec = tb.singular_spectrum(ctx)
    if tb.v0.kind == FINITE:
        va = tb.v0.valuation(tb.alpha)
        total = 0
        for n_i in spec.exponents:
            # log |(1, alpha sigma_i)|_2 = max(0, -val(alpha sigma_i)) * log p
            total += max(0, -(int(va) + n_i))
        return RealBall.log_int(tb.v0.p, prec) * Fraction(-n_v * total, nu * D)
    root = tb.v0.root(prec)
    a_abs = tb.alpha.embed(root).abs()
    acc = RealBall(0, 0, prec)
    for s in spec.values:
        acc = acc + ((a_abs * s).pow_int(2) + 1).sqrt().log()
    return acc * Fraction(-n_v, nu * D)


def slope_difference_lower_bound(
    tb: TwistedBundle, opnorm, ctx: PrecisionContext = None
) -> RealBall:
    """-(n_v0 rho/(nu D)) (log |(1, alpha)|_2 + log max(1, |a|)), valid for
    any upper bound ``opnorm`` on the operator norm of the twist map."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    spec = tb.singular_spectrum(ctx)
    rho = spec.rho
    nu, D = tb.nu, tb.field.degree
    n_v = tb.v0.n_v
    opnorm = opnorm if isinstance(opnorm, RealBall) else RealBall.from_fraction(
        Fraction(opnorm), prec
    )
    if tb.v0.kind == FINITE:
        va = tb.v0.valuation(tb.alpha) if not tb.alpha.is_zero() else None
        log_one_alpha = (
            RealBall(0, 0, prec)
            if va is None or va >= 0
            else RealBall.log_int(tb.v0.p, prec) * Fraction(-va)
        )
    else:
        a_abs = tb.alpha.embed(tb.v0.root(prec)).abs()
        log_one_alpha = (a_abs.pow_int(2) + 1).sqrt().log()
    log_op = opnorm.max_with_one().log()
    return (log_one_alpha + log_op) * Fraction(-n_v * rho, nu * D)


def operator_norm_upper(tb: TwistedBundle, ctx: PrecisionContext = None) -> RealBall:
    """Certified upper bound on |a| at v0 (Frobenius at archimedean places,
    max entry absolute value at finite ones, where it is exact)."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    if tb.v0.kind == FINITE:
        a = _sup_ppower([e for row in tb.A for e in row], tb.v0)
        return a.to_ball(prec)
    root = tb.v0.root(prec)
    acc = RealBall(0, 0, prec)
    for row in tb.A:
        for e in row:
            acc = acc + e.embed(root).abs().pow_int(2)
    return acc.sqrt()


# ---------------------------------------------------------------------------
# the four bounds


def classical_siegel_bound(mu: int, nu: int, A) -> float:
    """1 + (nu A)^(mu/(nu-mu)) for an integer system, mu < nu, A = max |a_ij|."""
    if mu >= nu:
        raise HypothesisViolated("classical Siegel lemma needs mu < nu")
    return 1.0 + float(nu * A) ** (mu / (nu - mu))

BUILTIN_ROOT_DISCRIMINANTS = {
    RATIONALS.coeffs: Fraction(1),
    GAUSSIANS.coeffs: Fraction(2),  # |disc Q(i)| = 4, degree 2
}


def bombieri_vaaler_bound(
    bundle: AdelicBundle, rd_k=None, ctx: PrecisionContext = None
) -> RealBall:
    """-slope(E) + (1/2)(log nu + log rd_k); rd built in for Q and Q(i),
    caller-supplied otherwise."""
    ctx = ctx or PrecisionContext()
    if rd_k is None:
        rd_k = BUILTIN_ROOT_DISCRIMINANTS.get(bundle.field.coeffs)
        if rd_k is None:
            raise AdelicError("root discriminant must be supplied for this field")
    prec = ctx.prec
    lognu = RealBall.log_int(bundle.dim, prec)
    logrd = RealBall.from_fraction(Fraction(rd_k), prec).log() if rd_k != 1 else RealBall(0, 0, prec)
    return -bundle.slope(ctx) + (lognu + logrd) * Fraction(1, 2)


def absolute_siegel_bound(bundle: AdelicBundle, ctx: PrecisionContext = None) -> RealBall:
    """-slope(E) + (1/2) log nu (discriminant-free; witness lives over Qbar)."""
    ctx = ctx or PrecisionContext()
    return -bundle.slope(ctx) + RealBall.log_int(bundle.dim, ctx.prec) * Fraction(1, 2)


def approx_absolute_siegel_bound(
    tb: TwistedBundle, opnorm=None, ctx: PrecisionContext = None
) -> RealBall:
    """(n_v0 rho/(nu D)) (log |(1,alpha)|_2 + log max(1,|a|)) + (1/2) log nu
    - slope(E): height budget of the approximate absolute lemma."""
    ctx = ctx or PrecisionContext()
    if opnorm is None:
        opnorm = operator_norm_upper(tb, ctx)
    penalty = -slope_difference_lower_bound(tb, opnorm, ctx)
    return penalty + absolute_siegel_bound(tb.base, ctx)


# ---------------------------------------------------------------------------
# witnesses


@dataclass
class SiegelWitness:
    x: list
    height: object  # max-norm (classical/approx) or h_E(x) ball (absolute)
    bound: object


def _normalize_sign(x: tuple) -> tuple:
    for v in x:
        if v:
            return x if v > 0 else tuple(-w for w in x)
    return x


def classical_siegel_search(a_rows, budget: int = 2_000_000) -> SiegelWitness:
    """Minimal-max-norm nonzero integer solution of the homogeneous system,
    by exhaustive shell enumeration over the free coordinates of the exact
    row-reduced parameterization (all solutions are visited in order of
    free-part max-norm, so minimality is certified when the shell index
    passes the best max-norm found).  Ties break lexicographically after
    sign normalization (first nonzero coordinate positive)."""
    a = [[int(e) for e in row] for row in a_rows]
    mu, nu = len(a), len(a[0])
    if mu >= nu:
        raise HypothesisViolated("classical Siegel search needs mu < nu")
    A = max((abs(e) for row in a for e in row), default=0)
    bound = classical_siegel_bound(mu, nu, A) if A else 1.0
    if all(e == 0 for row in a for e in row):
        x = [0] * nu
        x[0] = 1
        return SiegelWitness(x, 1, bound)
    # exact RREF over Q: pivots P, free F, x_P = R x_F
    rows = [[Fraction(e) for e in row] for row in a]
    pivots = []
    rk = 0
    for col in range(nu):
        piv = next((r for r in range(rk, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = Fraction(1) / rows[rk][col]
        rows[rk] = [e * inv for e in rows[rk]]
        for r in range(len(rows)):
            if r != rk and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [e - f * g for e, g in zip(rows[r], rows[rk])]
        pivots.append(col)
        rk += 1
    free = [c for c in range(nu) if c not in pivots]
    best = None
    visited = 0
    shell = 0
    while True:
        shell += 1
        if best is not None and shell > best[0]:
            break
        for xf in _shell_iter(len(free), shell):
            visited += 1
            if visited > budget:
                raise SearchBudgetExceeded(
                    f"search budget {budget} exceeded at shell {shell}",
                    best=None if best is None else SiegelWitness(list(best[2]), best[0], bound),
                )
            x = [Fraction(0)] * nu
            for fc, v in zip(free, xf):
                x[fc] = Fraction(v)
            ok = True
            for r, pc in enumerate(pivots):
                s = Fraction(0)
                for fc, v in zip(free, xf):
                    s -= rows[r][fc] * v
                if s.denominator != 1:
                    ok = False
                    break
                x[pc] = s
            if not ok:
                continue
            xi = _normalize_sign(tuple(int(v) for v in x))
            cand = (max(abs(v) for v in xi), xi, xi)
            if best is None or (cand[0], cand[1]) < (best[0], best[1]):
                best = cand
    x = list(best[1])
    height = best[0]
    if height > bound + 1e-9:
        raise AdelicError("minimal solution exceeds the classical bound (internal)")
    return SiegelWitness(x, height, bound)


def _shell_iter(dim: int, h: int):
    """All integer points with max-norm exactly h, ascending lexicographic."""
    if dim == 0:
        return
    for x in itertools.product(range(-h, h + 1), repeat=dim):
        if max(abs(v) for v in x) == h:
            yield x


def approx_siegel_search(
    a_rows, H: int, eps, ctx: PrecisionContext = None, budget: int = 4_000_000,
    rho: int = None, row_sum_bound=None, require_hypothesis: bool = True,
) -> SiegelWitness:
    """Nonzero integer x with |x|_inf <= H and max_i |sum_j a_ij x_j| <= eps,
    by exhaustive lexicographic enumeration; checks the pigeonhole
    hypothesis (2 mu H A / eps + 1)^(2 rho) < (H+1)^nu first.  The hypothesis
    is sufficient for existence, not necessary; pass
    ``require_hypothesis=False`` to search anyway."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    balls = [[_as_complex_ball(e, prec) for e in row] for row in a_rows]
    mu, nu = len(balls), len(balls[0])
    if row_sum_bound is None:
        A = RealBall(0, 0, prec)
        for row in balls:
            s = RealBall(0, 0, prec)
            for e in row:
                s = s + e.abs()
            if s.mid > A.mid:
                A = s
        A_up = A.upper
    else:
        A_up = mpmath.mpf(float(row_sum_bound))
    if rho is None:
        rho = _numeric_rank(balls)
    eps_f = mpmath.mpf(float(eps))
    with mpmath.workprec(prec):
        lhs = (2 * mu * H * A_up / eps_f + 1) ** (2 * rho)
        rhs = mpmath.mpf(H + 1) ** nu
    if require_hypothesis and not lhs < rhs:
        raise HypothesisViolated(
            f"(2 mu H A / eps + 1)^(2 rho) = {float(lhs):.4g} >= (H+1)^nu = {float(rhs):.4g}"
        )
    visited = 0
    for x in itertools.product(range(-H, H + 1), repeat=nu):
        if all(v == 0 for v in x):
            continue
        visited += 1
        if visited > budget:
            raise SearchBudgetExceeded(f"approximate search budget {budget} exceeded")
        worst = None
        ok = True
        for row in balls:
            acc = None
            for e, v in zip(row, x):
                if v:
                    t = e * v
                    acc = t if acc is None else acc + t
            val = acc.abs() if acc is not None else RealBall(0, 0, prec)
            if not val.upper <= eps_f:
                ok = False
                break
            if worst is None or val.mid > worst.mid:
                worst = val
        if ok:
            return SiegelWitness(list(x), max(abs(v) for v in x), H)
    raise SearchBudgetExceeded("no witness in the cube (hypothesis held; raise precision?)")


def _as_complex_ball(e, prec):
    if isinstance(e, ComplexBall):
        return e
    if isinstance(e, RealBall):
        return ComplexBall.from_real(e)
    if isinstance(e, (int, Fraction)):
        return ComplexBall.from_fraction(Fraction(e), prec)
    return ComplexBall(e, 0, prec)


def _numeric_rank(balls) -> int:
    with mpmath.workprec(balls[0][0].prec):
        m = mpmath.matrix([[b.mid for b in row] for row in balls])
        try:
            _, svals, _ = mpmath.svd(m, full_matrices=False, compute_uv=True)
        except TypeError:
            _, svals, _ = mpmath.svd(m)
        svals = [mpmath.mpf(s) for s in svals]
        top = max(svals) if svals else mpmath.mpf(0)
        if top == 0:
            return 0
        return sum(1 for s in svals if s > top * mpmath.mpf(2) ** (-40))


def absolute_siegel_witness(
    bundle: AdelicBundle, budget: int = 50, ctx: PrecisionContext = None,
    max_candidates: int = 2_000_000,
) -> SiegelWitness:
    """Search integer vectors |x|_inf <= budget for h_E(x) <= -slope + (1/2)
    log nu.  The lemma guarantees a witness over Qbar; restricting to Z^nu is
    strictly harder, so when nothing certifies within budget the best found
    is reported via ``SearchBudgetExceeded.best`` instead of asserting."""
    ctx = ctx or PrecisionContext()
    if bundle.field != RATIONALS:
        raise AdelicError("witness search implemented over Q only")
    if bundle.dim > 6:
        raise AdelicError("desk scale: nu <= 6")
    target = absolute_siegel_bound(bundle, ctx)
    best = None
    visited = 0
    for h in range(1, budget + 1):
        for x in _shell_iter(bundle.dim, h):
            visited += 1
            if visited > max_candidates:
                raise SearchBudgetExceeded(
                    "candidate budget exceeded",
                    best=None if best is None else SiegelWitness(*best),
                )
            xs = _normalize_sign(x)
            ht = bundle.element_height([Fraction(v) for v in xs], ctx)
            if ht.upper <= target.lower:
                return SiegelWitness(list(xs), ht, target)
            if best is None or ht.mid < best[1].mid:
                best = (list(xs), ht, target)
    raise SearchBudgetExceeded(
        f"no certified witness with |x|_inf <= {budget}",
        best=None if best is None else SiegelWitness(*best),
    )
