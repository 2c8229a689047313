"""Weil heights of field elements and bundle-relative heights of vectors.

h(x) = (1/D) sum_v n_v log max(1, |x|_v): the finite part is an exact
integer combination of log p over the support of x, the archimedean part a
ball.  Reports keep the per-place decomposition so identity failures can be
localized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .balls import PrecisionContext, RealBall
from .errors import AdelicError, DimensionMismatch
from .fields import FieldElement, NumberField
from .places import PPower, Place, arch_places, places_above, support_primes

HEIGHT_TOL = Fraction(1, 10**20)  # default assertion tolerance at 100 bits


@dataclass
class PlaceContribution:
    place: Place
    n_v: int
    contribution: RealBall           # n_v * log max(1, |x|_v), unweighted by 1/D
    exact_log_p_coeff: Fraction | None  # finite places: coefficient of log p


@dataclass
class HeightReport:
    value: RealBall
    per_place: list

    def __repr__(self):
        return f"HeightReport({self.value})"


def weil_height(x: FieldElement, field: NumberField, ctx: PrecisionContext = None) -> HeightReport:
    """h(x) = (1/D) sum_v n_v log max(1, |x|_v); finite sum over the support."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    D = field.degree
    contributions = []
    total = RealBall(0, 0, prec)
    if not x.is_zero():
        for p in support_primes(x):
            for v in places_above(field, p):
                val = v.valuation(x)
                if val is not None and val < 0:
                    coeff = Fraction(-val * v.n_v)
                    ball = RealBall.log_int(p, prec) * coeff
                    contributions.append(PlaceContribution(v, v.n_v, ball, coeff))
                    total = total + ball
        for v in arch_places(field):
            av = v.abs_value(x, ctx)
            ball = av.max_with_one().log() * v.n_v
            contributions.append(PlaceContribution(v, v.n_v, ball, None))
            total = total + ball
    value = total * Fraction(1, D)
    return HeightReport(value, contributions)


def weil_height_value(x: FieldElement, ctx: PrecisionContext = None) -> RealBall:
    return weil_height(x, x.field, ctx).value


def vector_height(coords, bundle, ctx: PrecisionContext = None) -> RealBall:
    """Height of a vector relative to an adelic bundle, h_E(0) := 0."""
    ctx = ctx or PrecisionContext()
    field = bundle.field
    vec = [field.element(c) for c in coords]
    if len(vec) != bundle.dim:
        raise DimensionMismatch(
            f"vector of length {len(vec)} in a {bundle.dim}-dimensional bundle"
        )
    if all(c.is_zero() for c in vec):
        return RealBall(0, 0, ctx.prec)
    return bundle.element_height(vec, ctx)


def height_scaling_check(
    x: FieldElement, m: int, ctx: PrecisionContext = None, tol=HEIGHT_TOL
) -> bool:
    """Asserts |h(x^m) - m h(x)| <= tol, doubling precision once on failure."""
    if x.is_zero():
        raise AdelicError("scaling check needs x != 0")
    if m < 0:
        raise AdelicError("m must be a nonnegative integer")
    ctx = ctx or PrecisionContext()
    for attempt in (ctx, ctx.bump()):
        lhs = weil_height(x**m, x.field, attempt).value
        rhs = weil_height(x, x.field, attempt).value * m
        if (lhs - rhs).abs().upper <= float(tol):
            return True
    return False
