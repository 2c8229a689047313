"""Norms on symmetric and multihomogeneous powers of hermitian bundles.

In an orthonormal frame at a place v, a degree-l element s = sum_i p_i e^i
(i a length-l exponent multi-index) has

    ||s||_v = ( sum_i |p_i|^2 * i!/l! )^(1/2)      v archimedean,
    ||s||_v = max_i |p_i|_v                        v finite;

the multihomogeneous version weights by i!/(l_0! ... l_n!) blockwise.  The
archimedean formula is the quotient norm induced from the tensor power with
orthonormal product basis; ``oracles.sym_norm_by_projection`` recomputes it
by explicit symmetrization in the tensor space for cross-checking.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .balls import ComplexBall, PrecisionContext, RealBall
from .errors import InexactMaxSlope, LengthMismatch
from .fields import FieldElement
from .places import FINITE, Place, PPower


def _multi_factorial(idx) -> int:
    out = 1
    for k in idx:
        out *= math.factorial(k)
    return out


def _flatten(index):
    """Accept either a flat multi-index or a tuple of block multi-indices."""
    if index and isinstance(index[0], (tuple, list)):
        flat = []
        for block in index:
            flat.extend(block)
        return tuple(flat), tuple(tuple(b) for b in index)
    return tuple(index), (tuple(index),)


def _abs_sq_ball(value, place: Place, prec: int) -> RealBall:
    """|p_i|^2 as a ball for scalar types: exact rationals, field elements,
    balls."""
    if isinstance(value, RealBall):
        return value.pow_int(2)
    if isinstance(value, ComplexBall):
        return value.abs().pow_int(2)
    if isinstance(value, FieldElement):
        emb = value.embed(place.root(prec))
        return emb.abs().pow_int(2)
    return RealBall.from_fraction(Fraction(value), prec).pow_int(2)


def _abs_finite(value, place: Place) -> PPower:
    if isinstance(value, FieldElement):
        return place.abs_value(value)
    q = Fraction(value)
    if q == 0:
        return PPower(place.p, None)
    v = 0
    num, den = q.numerator, q.denominator
    while num % place.p == 0:
        num //= place.p
        v += 1
    while den % place.p == 0:
        den //= place.p
        v -= 1
    return PPower(place.p, -v)


def sym_power_norm(coeffs: dict, ell: int, place: Place, ctx: PrecisionContext = None):
    """Norm of sum_i p_i e^i in the degree-l symmetric power, the e's an
    orthonormal frame at ``place``.  Keys are exponent multi-indices of
    length l.  Returns a RealBall (archimedean) or exact PPower (finite)."""
    ctx = ctx or PrecisionContext()
    for idx in coeffs:
        flat, _ = _flatten(idx)
        if sum(flat) != ell:
            raise LengthMismatch(f"index {idx} does not have length {ell}")
    return _power_norm(coeffs, (ell,), place, ctx)


def multihomogeneous_norm(
    coeffs: dict, degrees, place: Place, ctx: PrecisionContext = None
):
    """Norm of a multihomogeneous element of degree (l_0, ..., l_n); keys are
    tuples of block multi-indices, block j of length l_j."""
    ctx = ctx or PrecisionContext()
    degrees = tuple(degrees)
    for idx in coeffs:
        _, blocks = _flatten(idx)
        if len(blocks) != len(degrees):
            raise LengthMismatch(f"index {idx} has {len(blocks)} blocks")
        for block, l in zip(blocks, degrees):
            if sum(block) != l:
                raise LengthMismatch(f"block {block} does not have length {l}")
    return _power_norm(coeffs, degrees, place, ctx)


def _power_norm(coeffs: dict, degrees, place: Place, ctx: PrecisionContext):
    if place.kind == FINITE:
        best = None
        for value in coeffs.values():
            a = _abs_finite(value, place)
            if a.is_zero:
                continue
            if best is None or a.exponent > best.exponent:
                best = a
        return best if best is not None else PPower(place.p, None)
    prec = ctx.prec
    denom = _multi_factorial(degrees)
    acc = RealBall(0, 0, prec)
    for idx, value in coeffs.items():
        flat, _ = _flatten(idx)
        weight = Fraction(_multi_factorial(flat), denom)
        acc = acc + _abs_sq_ball(value, place, prec) * weight
    return acc.sqrt()


def coefficient_length(coeffs: dict, place: Place, ctx: PrecisionContext = None):
    """L(s): sum of |p_i| at archimedean places, max at finite ones."""
    ctx = ctx or PrecisionContext()
    if place.kind == FINITE:
        best = None
        for value in coeffs.values():
            a = _abs_finite(value, place)
            if a.is_zero:
                continue
            if best is None or a.exponent > best.exponent:
                best = a
        return best if best is not None else PPower(place.p, None)
    prec = ctx.prec
    acc = RealBall(0, 0, prec)
    for value in coeffs.values():
        acc = acc + _abs_sq_ball(value, place, prec).sqrt()
    return acc


def length_bound(norm: RealBall, dims, degrees) -> RealBall:
    """Cauchy-Schwarz bound L(s) <= ||s|| * prod nu_j^(l_j/2) (archimedean)."""
    factor = Fraction(1)
    half_powers = []
    for nu, l in zip(dims, degrees):
        q, r = divmod(l, 2)
        factor *= Fraction(nu) ** q
        if r:
            half_powers.append(nu)
    out = norm * factor
    for nu in half_powers:
        out = out * RealBall.from_fraction(nu, norm.prec).sqrt()
    return out


def sym_max_slope_bound(bundle, ell: int, ctx: PrecisionContext = None) -> RealBall:
    """Upper bound l*(max_slope(E) + 2 nu log nu) for the maximal slope of
    the l-th symmetric power; requires the bundle's maximal slope exactly."""
    ctx = ctx or PrecisionContext()
    if ell < 1 or bundle.dim < 1:
        raise LengthMismatch("need l >= 1 and a nonzero bundle")
    mu, exact = bundle.max_slope(ctx)
    if not exact:
        raise InexactMaxSlope("symmetric-power bound needs an exact max slope")
    nu = bundle.dim
    lognu = RealBall.log_int(nu, ctx.prec)
    return (mu + lognu * (2 * nu)) * ell
