"""Q_p numbers at finite absolute precision, with exp and log on their
convergence domains.

A ``PadicNumber`` represents p^val * unit + O(p^N): ``val`` the valuation,
``unit`` an integer prime to p known modulo p^(N - val), ``N`` the absolute
precision.  Zero at this precision is val = N, unit = 0.

exp requires |z| < r_p = p^(-1/(p-1)), i.e. val >= 1 for p >= 3 and val >= 2
for p = 2; log is restricted to the principal domain |u - 1| < r_p (the image
of exp), where the two are mutually inverse.  Series are summed exactly over
Q and reduced, with the truncation index chosen so the dropped tail has
valuation >= N.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import AdelicError, OutsideConvergenceDomain


def _int_val(n: int, p: int) -> int:
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicNumber:
    """An element of Q_p known to absolute precision O(p^N)."""

    __slots__ = ("p", "val", "unit", "N")

    def __init__(self, p: int, val: int, unit: int, N: int):
        if val >= N:
            val, unit = N, 0
        else:
            mod = p ** (N - val)
            unit %= mod
            if unit == 0:
                val, unit = N, 0
            else:
                shift = _int_val(unit, p)
                if shift:
                    # normalize: fold powers of p from the unit into val
                    val += shift
                    if val >= N:
                        val, unit = N, 0
                    else:
                        unit = (unit // p**shift) % p ** (N - val)
        self.p = p
        self.val = val
        self.unit = unit
        self.N = N

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_rational(q, p: int, N: int) -> "PadicNumber":
        q = Fraction(q)
        if q == 0:
            return PadicNumber(p, N, 0, N)
        vnum = _int_val(q.numerator, p)
        vden = _int_val(q.denominator, p)
        val = vnum - vden
        if val >= N:
            return PadicNumber(p, N, 0, N)
        num = q.numerator // p**vnum
        den = q.denominator // p**vden
        mod = p ** (N - val)
        unit = (num * pow(den, -1, mod)) % mod
        return PadicNumber(p, val, unit, N)

    @staticmethod
    def zero(p: int, N: int) -> "PadicNumber":
        return PadicNumber(p, N, 0, N)

    @staticmethod
    def one(p: int, N: int) -> "PadicNumber":
        return PadicNumber(p, 0, 1, N)

    # -- basic structure --------------------------------------------------

    @property
    def is_zero(self) -> bool:
        """Zero at this precision (valuation >= N)."""
        return self.val >= self.N

    def lift(self) -> Fraction:
        """The canonical integer-lift representative p^val * unit."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.p) ** self.val * self.unit

    def abs_exponent(self) -> int:
        """|x|_p = p^(-val); raises on zero-at-precision."""
        if self.is_zero:
            raise AdelicError(f"|x|_p undetermined: x = O({self.p}^{self.N})")
        return -self.val

    def __repr__(self):
        if self.is_zero:
            return f"O({self.p}^{self.N})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.N})"

    def __eq__(self, other):
        if not isinstance(other, PadicNumber):
            return NotImplemented
        n = min(self.N, other.N)
        return self.p == other.p and (self - other).truncate(n).is_zero

    def __hash__(self):
        raise TypeError("PadicNumber is not hashable (precision-dependent ==)")

    def truncate(self, N: int) -> "PadicNumber":
        if N > self.N:
            raise AdelicError("cannot increase precision by truncation")
        return PadicNumber(self.p, self.val, self.unit, N)

    def digits_string(self, k: int = 8) -> str:
        """First k base-p digits of the lift, least significant first."""
        n = int(self.lift() * self.p ** max(0, -self.val))
        out = []
        for _ in range(k):
            n, d = divmod(n, self.p)
            out.append(str(d))
        return " ".join(out)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise AdelicError("mixed primes")
            return other
        return PadicNumber.from_rational(Fraction(other), self.p, self.N)

    def __add__(self, other):
        o = self._coerce(other)
        N = min(self.N, o.N)
        lift = self.lift() + o.lift()
        return PadicNumber.from_rational(lift, self.p, N)

    __radd__ = __add__

    def __neg__(self):
        return PadicNumber(self.p, self.val, -self.unit, self.N)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        # abs precision of product: val1 + N2 and val2 + N1
        N = min(self.val + o.N, o.val + self.N)
        return PadicNumber.from_rational(self.lift() * o.lift(), self.p, N)

    __rmul__ = __mul__

    def scalar_mul(self, q) -> "PadicNumber":
        """Multiply by an exact rational: absolute precision shifts by v_p(q)."""
        q = Fraction(q)
        if q == 0:
            return PadicNumber.zero(self.p, self.N)
        vq = _int_val(q.numerator, self.p) - _int_val(q.denominator, self.p)
        return PadicNumber.from_rational(self.lift() * q, self.p, self.N + vq)


def exp_domain_ok(p: int, val: int) -> bool:
    """Convergence: val > 1/(p-1), i.e. val >= 1 (p odd), val >= 2 (p = 2)."""
    return val * (p - 1) > 1


def padic_exp(z: PadicNumber) -> PadicNumber:
    """exp(z) = sum z^i / i! for |z| < r_p; certified absolute precision N."""
    p, N = z.p, z.N
    if z.is_zero:
        return PadicNumber.one(p, N)
    if not exp_domain_ok(p, z.val):
        raise OutsideConvergenceDomain(
            f"exp needs |z|_{p} < {p}^(-1/{p-1}); got valuation {z.val}"
        )
    v = z.val
    # tail bound: val(z^i/i!) >= i*v - (i-1)/(p-1) >= N once i is big enough
    M = 1
    while (M + 1) * v - Fraction(M, p - 1) < N:
        M += 1
    x = z.lift()
    term = Fraction(1)
    acc = Fraction(0)
    for i in range(0, M + 1):
        if i:
            term = term * x / i
        acc += term
    return PadicNumber.from_rational(acc, p, N)


def padic_log(u: PadicNumber) -> PadicNumber:
    """log(u) = sum (-1)^(i+1) (u-1)^i / i on the principal domain
    |u - 1| < r_p (exp maps its disc onto this one)."""
    p, N = u.p, u.N
    w = u - PadicNumber.one(p, N)
    if w.is_zero:
        return PadicNumber.zero(p, N)
    if not exp_domain_ok(p, w.val):
        raise OutsideConvergenceDomain(
            f"log restricted to |u-1|_{p} < {p}^(-1/{p-1}); got valuation {w.val}"
        )
    v = w.val
    # tail: val(w^i / i) >= i*v - log_p(i); find M with (M+1)v - log_p(M+1) >= N
    M = 1
    while True:
        i = M + 1
        logp = 0
        k = i
        while k >= p:
            k //= p
            logp += 1
        if i * v - logp >= N:
            break
        M += 1
    x = w.lift()
    term = Fraction(1)
    acc = Fraction(0)
    for i in range(1, M + 1):
        term = term * x
        acc += term / i if i % 2 == 1 else -term / i
    return PadicNumber.from_rational(acc, p, N)


def padic_log_element(alpha, place, digits: int) -> PadicNumber:
    """log at a finite place with k_v = Q_p: embeds a field element via the
    linear local factor, then takes the principal p-adic log."""
    if place.residual_degree != 1:
        raise AdelicError(
            "p-adic evaluation implemented for places with k_v = Q_p only"
        )
    emb = embed_at_linear_place(alpha, place, digits)
    return padic_log(emb)


def embed_at_linear_place(x, place, digits: int) -> PadicNumber:
    """Embed a field element into Q_p at a place with residual degree 1."""
    p = place.p
    if place.residual_degree != 1:
        raise AdelicError("embedding into Q_p needs a degree-1 place")
    if x.is_rational():
        return PadicNumber.from_rational(x.as_fraction(), p, digits)
    den = x.denominator_lcm()
    guard = digits + _int_val(den, p) + 2 if den % p == 0 else digits + 2
    h = place.lifted_factor(guard)
    # linear monic factor x + c: theta = -c mod p^guard
    root = (-h[0]) % p**guard
    acc = 0
    m = p**guard
    for c in reversed([int(q * den) for q in x.coeffs]):
        acc = (acc * root + c) % m
    return PadicNumber.from_rational(Fraction(acc, den), p, digits)
