"""Sign/log-magnitude representation for quantities like (6n)^(203 n^2).

A ``LogScaleReal`` is sign * exp( sum_b q_b log b + rest ): ``terms`` maps
integer bases (kept prime via factorization) to exact rational exponents,
``rest`` is a RealBall remainder.  Multiplication, division and rational
powers are exact on the symbolic part; comparisons subtract the exact terms
first so shared factors cancel before any ball arithmetic.  No fixed-width
float ever holds the represented value itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .balls import PrecisionContext, RealBall
from .errors import AdelicError, PrecisionExhausted

_DEFAULT_PREC = 120


def _prime_log_terms(n: int) -> dict:
    out = {}
    for p, e in sympy.factorint(n).items():
        out[int(p)] = Fraction(e)
    return out


@dataclass(frozen=True)
class LogScaleReal:
    sign: int
    terms: dict = field(default_factory=dict)  # base -> rational exponent
    rest: RealBall = None

    def __post_init__(self):
        if self.rest is None:
            object.__setattr__(self, "rest", RealBall(0, 0, _DEFAULT_PREC))
        if self.sign not in (-1, 0, 1):
            raise AdelicError("sign must be -1, 0 or 1")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "LogScaleReal":
        return LogScaleReal(0)

    @staticmethod
    def one() -> "LogScaleReal":
        return LogScaleReal(1)

    @staticmethod
    def from_int(n: int) -> "LogScaleReal":
        if n == 0:
            return LogScaleReal.zero()
        return LogScaleReal(1 if n > 0 else -1, _prime_log_terms(abs(n)))

    @staticmethod
    def from_fraction(q) -> "LogScaleReal":
        q = Fraction(q)
        if q == 0:
            return LogScaleReal.zero()
        terms = _prime_log_terms(q.numerator if q > 0 else -q.numerator)
        for p, e in _prime_log_terms(q.denominator).items():
            terms[p] = terms.get(p, Fraction(0)) - e
        return LogScaleReal(1 if q > 0 else -1, terms)

    @staticmethod
    def int_power(base: int, exponent) -> "LogScaleReal":
        """base^exponent for integer base >= 1 and rational exponent."""
        if base < 1:
            raise AdelicError("int_power needs base >= 1")
        exponent = Fraction(exponent)
        terms = {}
        for p, e in _prime_log_terms(base).items():
            terms[p] = e * exponent
        return LogScaleReal(1, terms)

    @staticmethod
    def from_log_ball(log_magnitude: RealBall, sign: int = 1) -> "LogScaleReal":
        return LogScaleReal(sign, {}, log_magnitude)

    @staticmethod
    def from_ball(ball: RealBall) -> "LogScaleReal":
        if ball.contains_zero():
            if ball.mid == 0 and ball.rad == 0:
                return LogScaleReal.zero()
            raise PrecisionExhausted("cannot take log-scale of a ball touching 0")
        sign = 1 if ball.mid > 0 else -1
        return LogScaleReal(sign, {}, ball.abs().log())

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def log_magnitude(self, prec: int = _DEFAULT_PREC) -> RealBall:
        """Enclosure of log |value| (value must be nonzero)."""
        if self.is_zero:
            raise AdelicError("log of zero")
        acc = self.rest
        for base, q in self.terms.items():
            if q:
                acc = acc + RealBall.log_int(base, prec) * q
        return acc

    def to_ball(self, prec: int = _DEFAULT_PREC) -> RealBall:
        if self.is_zero:
            return RealBall(0, 0, prec)
        mag = self.log_magnitude(prec).exp()
        return mag if self.sign > 0 else -mag

    def __repr__(self):
        if self.is_zero:
            return "LogScaleReal(0)"
        sym = " + ".join(f"{q}*log({b})" for b, q in sorted(self.terms.items()) if q)
        s = "-" if self.sign < 0 else ""
        return f"LogScaleReal({s}exp({sym or '0'} + {self.rest!r}))"

    def decimal_log10(self, prec: int = _DEFAULT_PREC) -> str:
        """log10 of the magnitude, as a short decimal string."""
        import mpmath

        mag = self.log_magnitude(prec)
        with mpmath.workprec(prec):
            return mpmath.nstr(mag.mid / mpmath.log(10), 12)

    # -- exact algebra -------------------------------------------------------

    def __mul__(self, other) -> "LogScaleReal":
        o = _coerce(other)
        if self.is_zero or o.is_zero:
            return LogScaleReal.zero()
        terms = dict(self.terms)
        for b, q in o.terms.items():
            terms[b] = terms.get(b, Fraction(0)) + q
        return LogScaleReal(self.sign * o.sign, terms, self.rest + o.rest)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogScaleReal":
        o = _coerce(other)
        if o.is_zero:
            raise ZeroDivisionError("log-scale division by zero")
        if self.is_zero:
            return LogScaleReal.zero()
        terms = dict(self.terms)
        for b, q in o.terms.items():
            terms[b] = terms.get(b, Fraction(0)) - q
        return LogScaleReal(self.sign * o.sign, terms, self.rest - o.rest)

    def __neg__(self) -> "LogScaleReal":
        return LogScaleReal(-self.sign, dict(self.terms), self.rest)

    def abs(self) -> "LogScaleReal":
        if self.is_zero:
            return self
        return LogScaleReal(1, dict(self.terms), self.rest)

    def pow(self, exponent) -> "LogScaleReal":
        """Rational power; negative values only for integer exponents."""
        exponent = Fraction(exponent)
        if self.is_zero:
            if exponent <= 0:
                raise ZeroDivisionError("0 to a nonpositive power")
            return LogScaleReal.zero()
        if self.sign < 0 and exponent.denominator != 1:
            raise AdelicError("fractional power of a negative value")
        sign = self.sign if exponent.numerator % 2 else 1
        terms = {b: q * exponent for b, q in self.terms.items()}
        return LogScaleReal(sign, terms, self.rest * exponent)

    # -- addition (via dominant-term log-sum-exp) ------------------------------

    def __add__(self, other) -> "LogScaleReal":
        o = _coerce(other)
        if self.is_zero:
            return o
        if o.is_zero:
            return self
        delta = _log_ratio(o, self)  # log(|o|/|self|)
        if self.sign == o.sign:
            # |self| (1 + |o|/|self|): bump the rest by log1p(exp(delta))
            bump = delta.log1p_exp() if delta.mid <= 0 else None
            if bump is not None:
                return LogScaleReal(self.sign, dict(self.terms), self.rest + bump)
            return o + self
        # opposite signs: need a strict dominance call
        if delta.upper < 0:
            import mpmath

            with mpmath.workprec(delta.prec):
                hi = mpmath.log1p(-mpmath.exp(delta.lower))
                lo = mpmath.log1p(-mpmath.exp(delta.upper))
                mid = (hi + lo) / 2
                rad = (hi - lo) / 2 + abs(mid) * mpmath.mpf(2) ** (-delta.prec + 4)
            bump = RealBall(mid, rad, delta.prec)
            return LogScaleReal(self.sign, dict(self.terms), self.rest + bump)
        if delta.lower > 0:
            return o + self
        raise PrecisionExhausted("cancellation: cannot resolve sign of the sum")

    __radd__ = __add__

    def __sub__(self, other) -> "LogScaleReal":
        return self + (-_coerce(other))

    # -- comparisons -----------------------------------------------------------

    def compare(self, other) -> int:
        """-1, 0(never for separated), +1; raises PrecisionExhausted on overlap."""
        o = _coerce(other)
        if self.is_zero and o.is_zero:
            return 0
        if self.sign != o.sign:
            return -1 if self.sign < o.sign else 1
        delta = _log_ratio(self, o)  # log(|self|/|o|)
        if delta.mid == 0 and delta.rad == 0:
            return 0
        s = delta.sign_certain()
        return s * self.sign

    def __le__(self, other):
        try:
            return self.compare(other) <= 0
        except PrecisionExhausted:
            return True  # overlapping enclosures: not certainly greater

    def __lt__(self, other):
        return self.compare(other) < 0

    def __ge__(self, other):
        o = _coerce(other)
        return o <= self

    def __gt__(self, other):
        return self.compare(other) > 0


def _coerce(x) -> LogScaleReal:
    if isinstance(x, LogScaleReal):
        return x
    if isinstance(x, int):
        return LogScaleReal.from_int(x)
    if isinstance(x, Fraction):
        return LogScaleReal.from_fraction(x)
    if isinstance(x, RealBall):
        return LogScaleReal.from_ball(x)
    raise TypeError(f"cannot coerce {type(x)} to LogScaleReal")


def _log_ratio(a: LogScaleReal, b: LogScaleReal, prec: int = _DEFAULT_PREC) -> RealBall:
    """Enclosure of log(|a|/|b|) with exact cancellation of shared terms."""
    acc = a.rest - b.rest
    bases = set(a.terms) | set(b.terms)
    for base in bases:
        q = a.terms.get(base, Fraction(0)) - b.terms.get(base, Fraction(0))
        if q:
            acc = acc + RealBall.log_int(base, prec) * q
    return acc
