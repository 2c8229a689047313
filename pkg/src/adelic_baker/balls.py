"""Midpoint-radius ball arithmetic on top of mpmath.

Every archimedean quantity in the library is an enclosure: a ``RealBall``
``[mid - rad, mid + rad]`` or a ``ComplexBall`` (disc of radius ``rad``
around ``mid``).  mpmath's basic arithmetic is correctly rounded and its
elementary functions are accurate to a couple of ulps; each operation here
pads the propagated radius by ``GUARD_ULPS`` ulps of the midpoint, so the
stated enclosures hold with a wide safety margin at the working precisions
used (>= 64 bits, default 100 plus internal guard bits).

Comparisons must be decided with separated enclosures; ``PrecisionExhausted``
is raised otherwise.  All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc

from .errors import PrecisionExhausted

GUARD_ULPS = 8  # pessimistic per-operation rounding slop, in ulps
GUARD_BITS = 20  # extra internal bits on top of a context's arch_bits


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision: archimedean bits and absolute p-adic digits."""

    arch_bits: int = 100
    padic_digits: int = 30

    def __post_init__(self):
        if self.arch_bits < 64:
            raise ValueError("arch_bits must be >= 64")
        if self.padic_digits < 1:
            raise ValueError("padic_digits must be >= 1")

    @property
    def prec(self) -> int:
        return self.arch_bits + GUARD_BITS

    def bump(self, factor: int = 2) -> "PrecisionContext":
        return PrecisionContext(self.arch_bits * factor, self.padic_digits)


DEFAULT_CTX = PrecisionContext()


def _eps(prec: int) -> mpf:
    return mpf(2) ** (-prec + 3)  # a few ulps at precision prec


class RealBall:
    """A real number known to lie in [mid - rad, mid + rad]."""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad=0, prec: int = 120):
        # never re-round an mpf/int midpoint: exactness is load-bearing
        if isinstance(mid, mpf):
            self.mid = mid
        elif isinstance(mid, int):
            with mpmath.workprec(max(prec, mid.bit_length() + 8)):
                self.mid = mpf(mid)
        else:
            with mpmath.workprec(prec):
                self.mid = mpf(mid)
        if isinstance(rad, mpf):
            self.rad = rad
        else:
            with mpmath.workprec(prec):
                self.rad = mpf(rad)
        self.prec = prec
        if self.rad < 0:
            raise ValueError("negative radius")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_fraction(q, prec: int) -> "RealBall":
        q = Fraction(q)
        with mpmath.workprec(prec):
            small = (
                q.numerator.bit_length() < prec and q.denominator.bit_length() < prec
            )
            mid = mpf(q.numerator) / mpf(q.denominator)
            if small and mpmath.fmul(mid, q.denominator, exact=True) == q.numerator:
                return RealBall(mid, 0, prec)
            rad = (abs(mid) + 1e-300) * _eps(prec)
        return RealBall(mid, rad, prec)

    @staticmethod
    def exact_int(n: int, prec: int) -> "RealBall":
        return RealBall(n, 0, prec)

    @staticmethod
    def pi(prec: int) -> "RealBall":
        with mpmath.workprec(prec):
            mid = mpmath.pi()
        return RealBall(mid, abs(mid) * _eps(prec), prec)

    @staticmethod
    def log_int(n: int, prec: int) -> "RealBall":
        """Enclosure of log(n) for an integer n >= 1 (exact 0 for n = 1)."""
        if n == 1:
            return RealBall(0, 0, prec)
        with mpmath.workprec(prec + n.bit_length()):
            mid = mpmath.log(mpf(n))
        return RealBall(mid, abs(mid) * _eps(prec), prec)

    # -- helpers ------------------------------------------------------

    @property
    def lower(self) -> mpf:
        return mpmath.fsub(self.mid, self.rad, prec=self.prec, rounding="d")

    @property
    def upper(self) -> mpf:
        return mpmath.fadd(self.mid, self.rad, prec=self.prec, rounding="u")

    def __repr__(self):
        return f"RealBall({mpmath.nstr(self.mid, 20)} +/- {mpmath.nstr(self.rad, 5)})"

    def str_decimal(self, digits: int = 20) -> str:
        return mpmath.nstr(self.mid, digits)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "RealBall":
        if isinstance(other, RealBall):
            return other
        if isinstance(other, (int, Fraction)):
            return RealBall.from_fraction(Fraction(other), self.prec)
        if isinstance(other, (float, mpf)):
            return RealBall(other, 0, self.prec)
        raise TypeError(f"cannot coerce {type(other)} to RealBall")

    def __add__(self, other):
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        with mpmath.workprec(prec):
            if self.rad == 0 and o.rad == 0:
                exact = mpmath.fadd(self.mid, o.mid, exact=True)
                mid = +exact
                if mid == exact:
                    return RealBall(mid, 0, prec)
            mid = self.mid + o.mid
            rad = self.rad + o.rad + (abs(mid) + 1e-300) * _eps(prec)
        return RealBall(mid, rad, prec)

    __radd__ = __add__

    def __neg__(self):
        with mpmath.workprec(self.prec):
            mid = -self.mid
        return RealBall(mid, self.rad, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        with mpmath.workprec(prec):
            if self.rad == 0 and o.rad == 0:
                exact = mpmath.fmul(self.mid, o.mid, exact=True)
                mid = +exact
                if mid == exact:
                    return RealBall(mid, 0, prec)
            mid = self.mid * o.mid
            rad = (
                abs(self.mid) * o.rad
                + abs(o.mid) * self.rad
                + self.rad * o.rad
                + abs(mid) * _eps(prec)
            )
        return RealBall(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.nonzero():
            raise ZeroDivisionError("divisor ball contains 0")
        prec = min(self.prec, o.prec)
        with mpmath.workprec(prec):
            mid = self.mid / o.mid
            # |a/b - am/bm| <= (|am| rb + |bm| ra) / (|bm| (|bm| - rb))
            denom = abs(o.mid) * (abs(o.mid) - o.rad)
            rad = (abs(self.mid) * o.rad + abs(o.mid) * self.rad) / denom
            rad += abs(mid) * _eps(prec)
        return RealBall(mid, rad, prec)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def abs(self) -> "RealBall":
        if self.mid >= 0:
            return self
        return -self

    def sqrt(self) -> "RealBall":
        if self.lower < 0:
            if self.upper < 0:
                raise ValueError("sqrt of negative ball")
            # straddles 0: conservative interval [0, sqrt(upper)]
            with mpmath.workprec(self.prec):
                hi = mpmath.sqrt(self.upper) * (1 + _eps(self.prec))
                half = hi / 2
            return RealBall(half, half, self.prec)
        with mpmath.workprec(self.prec):
            mid = mpmath.sqrt(self.mid)
            if mid > 0:
                rad = self.rad / mid + abs(mid) * _eps(self.prec)
            else:
                rad = mpmath.sqrt(self.rad)
        return RealBall(mid, rad, self.prec)

    def exp(self) -> "RealBall":
        with mpmath.workprec(self.prec):
            mid = mpmath.exp(self.mid)
            rad = mid * mpmath.expm1(self.rad) + abs(mid) * _eps(self.prec)
        return RealBall(mid, rad, self.prec)

    def log(self) -> "RealBall":
        if self.lower <= 0:
            raise ValueError(f"log of ball touching 0: {self}")
        with mpmath.workprec(self.prec):
            mid = mpmath.log(self.mid)
            rad = self.rad / (self.mid - self.rad)
            rad += (abs(mid) + 1) * _eps(self.prec)
        return RealBall(mid, rad, self.prec)

    def log1p_exp(self) -> "RealBall":
        """Enclosure of log(1 + exp(self)); robust for very negative self."""
        with mpmath.workprec(self.prec):
            hi = mpmath.log1p(mpmath.exp(self.upper))
            lo = mpmath.log1p(mpmath.exp(self.lower))
            mid = (hi + lo) / 2
            rad = (hi - lo) / 2 + (abs(mid) + 1e-300) * _eps(self.prec)
        return RealBall(mid, rad, self.prec)

    def pow_int(self, k: int) -> "RealBall":
        if k == 0:
            return RealBall(1, 0, self.prec)
        if k < 0:
            return RealBall(1, 0, self.prec) / self.pow_int(-k)
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def max_with_one(self) -> "RealBall":
        """Enclosure of max(1, x)."""
        with mpmath.workprec(self.prec):
            lo = max(self.lower, mpf(1))
            hi = max(self.upper, mpf(1))
            mid = (lo + hi) / 2
            rad = (hi - lo) / 2 + (abs(mid) + 1) * _eps(self.prec)
        return RealBall(mid, rad, self.prec)

    # -- predicates ---------------------------------------------------

    def nonzero(self) -> bool:
        return self.lower > 0 or self.upper < 0

    def contains_zero(self) -> bool:
        return not self.nonzero()

    def sign_certain(self) -> int:
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        raise PrecisionExhausted(f"sign of {self} undecided")

    def lt(self, other) -> bool:
        """Certified strict comparison; raises if enclosures overlap."""
        o = self._coerce(other)
        if self.upper < o.lower:
            return True
        if self.lower > o.upper:
            return False
        raise PrecisionExhausted(f"cannot separate {self} and {o}")

    def le_possibly(self, other) -> bool:
        """True unless certainly greater (safe direction for asserting <=)."""
        o = self._coerce(other)
        return not (self.lower > o.upper)

    def overlaps(self, other) -> bool:
        o = self._coerce(other)
        return not (self.upper < o.lower or self.lower > o.upper)


def mpf_to_fraction(x) -> Fraction:
    """Exact value of a finite mpf as a Fraction."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_ if not isinstance(x, mpf) else x._mpf_
    if man == 0 and exp != 0:
        raise ValueError("non-finite mpf")
    val = Fraction(int(man))
    val = val * Fraction(2) ** int(exp)
    return -val if sign else val


def ball_sum(balls, prec: int) -> RealBall:
    out = RealBall(0, 0, prec)
    for b in balls:
        out = out + b
    return out


class ComplexBall:
    """A complex number known to lie in the closed disc |z - mid| <= rad."""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad=0, prec: int = 120):
        with mpmath.workprec(prec):
            self.mid = mpc(mid)
            self.rad = mpf(rad)
        self.prec = prec

    @staticmethod
    def from_fraction(q, prec: int) -> "ComplexBall":
        rb = RealBall.from_fraction(q, prec)
        return ComplexBall(rb.mid, rb.rad, prec)

    @staticmethod
    def from_real(rb: RealBall) -> "ComplexBall":
        return ComplexBall(rb.mid, rb.rad, rb.prec)

    @staticmethod
    def i_times(rb: RealBall) -> "ComplexBall":
        with mpmath.workprec(rb.prec):
            mid = mpc(0, 1) * rb.mid
        return ComplexBall(mid, rb.rad, rb.prec)

    def __repr__(self):
        return f"ComplexBall({mpmath.nstr(self.mid, 20)} +/- {mpmath.nstr(self.rad, 5)})"

    def _coerce(self, other) -> "ComplexBall":
        if isinstance(other, ComplexBall):
            return other
        if isinstance(other, RealBall):
            return ComplexBall.from_real(other)
        if isinstance(other, (int, Fraction)):
            return ComplexBall.from_fraction(Fraction(other), self.prec)
        if isinstance(other, (float, mpf, mpc, complex)):
            return ComplexBall(other, 0, self.prec)
        raise TypeError(f"cannot coerce {type(other)} to ComplexBall")

    def __add__(self, other):
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        with mpmath.workprec(prec):
            mid = self.mid + o.mid
            rad = self.rad + o.rad + (abs(mid) + 1e-300) * _eps(prec)
        return ComplexBall(mid, rad, prec)

    __radd__ = __add__

    def __neg__(self):
        with mpmath.workprec(self.prec):
            mid = -self.mid
        return ComplexBall(mid, self.rad, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        with mpmath.workprec(prec):
            mid = self.mid * o.mid
            rad = (
                abs(self.mid) * o.rad
                + abs(o.mid) * self.rad
                + self.rad * o.rad
                + abs(mid) * _eps(prec)
            )
        return ComplexBall(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        oa = o.abs()
        if not oa.nonzero():
            raise ZeroDivisionError("divisor ball contains 0")
        prec = min(self.prec, o.prec)
        with mpmath.workprec(prec):
            mid = self.mid / o.mid
            denom = abs(o.mid) * (abs(o.mid) - o.rad)
            rad = (abs(self.mid) * o.rad + abs(o.mid) * self.rad) / denom
            rad += abs(mid) * _eps(prec)
        return ComplexBall(mid, rad, prec)

    def abs(self) -> RealBall:
        with mpmath.workprec(self.prec):
            m = abs(self.mid)
            rad = self.rad + (m + 1e-300) * _eps(self.prec)
        return RealBall(m, rad, self.prec)

    def conjugate(self) -> "ComplexBall":
        with mpmath.workprec(self.prec):
            mid = mpmath.conj(self.mid)
        return ComplexBall(mid, self.rad, self.prec)

    def exp(self) -> "ComplexBall":
        with mpmath.workprec(self.prec):
            mid = mpmath.exp(self.mid)
            rad = abs(mid) * mpmath.expm1(self.rad) + abs(mid) * _eps(self.prec)
        return ComplexBall(mid, rad, self.prec)

    def log_principal(self) -> "ComplexBall":
        """Principal log; requires the disc to avoid the cut (-inf, 0]."""
        a, b = self.mid.real, self.mid.imag
        with mpmath.workprec(self.prec):
            dist = abs(self.mid) if a > 0 else abs(b)
            if not dist > self.rad:
                raise PrecisionExhausted(
                    "log: enclosure touches the branch cut or zero"
                )
            mid = mpmath.log(self.mid)
            r = self.rad / abs(self.mid)
            rad = -mpmath.log1p(-r) if r < 1 else mpf("inf")
            rad += (abs(mid) + 1) * _eps(self.prec)
        return ComplexBall(mid, rad, self.prec)

    def pow_int(self, k: int) -> "ComplexBall":
        if k == 0:
            return ComplexBall(1, 0, self.prec)
        if k < 0:
            return ComplexBall(1, 0, self.prec) / self.pow_int(-k)
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def contains_zero(self) -> bool:
        return self.abs().contains_zero()
