"""Places of a number field with the standard normalization |p|_v = 1/p.

Archimedean places come from certified root enclosures of the defining
polynomial: real roots are isolated exactly by Sturm sequences and refined by
dyadic bisection; complex roots get disc certificates of the form
|z - z0| <= deg * |f(z0)/f'(z0)| (every such disc contains a root; pairwise
disjointness pins down exactly one per disc).

Finite places exist above primes p where the defining polynomial is
squarefree mod p (Dedekind-safe: unramified, monogenic at p); each
irreducible factor mod p is Hensel-lifted to p^N and elements embed into the
unramified completion as polynomials mod (h_v, p^N), where the valuation of
a nonzero reduced polynomial is the minimum of its coefficient valuations.
Other primes raise ``RamifiedOrNonMonogenic``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import sympy

from .balls import ComplexBall, PrecisionContext, RealBall, ball_sum
from .errors import AdelicError, PrecisionExhausted, RamifiedOrNonMonogenic
from .fields import FieldElement, NumberField, poly_divmod

REAL, COMPLEX, FINITE = "real", "complex", "finite"


# ---------------------------------------------------------------------------
# exact absolute values at finite places


class PPower:
    """|x|_v at a finite place: exactly p**exponent (exponent rational),
    or exact zero when ``exponent`` is None."""

    __slots__ = ("p", "exponent")

    def __init__(self, p: int, exponent):
        self.p = p
        self.exponent = None if exponent is None else Fraction(exponent)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def __eq__(self, other):
        if isinstance(other, PPower):
            if self.is_zero or other.is_zero:
                return self.is_zero and other.is_zero
            if self.exponent == 0 and other.exponent == 0:
                return True
            return self.p == other.p and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() == Fraction(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.exponent))

    def as_fraction(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        e = self.exponent
        if e.denominator != 1:
            raise AdelicError("non-integral exponent has no exact rational value")
        return Fraction(self.p) ** e.numerator

    def to_ball(self, prec: int) -> RealBall:
        if self.is_zero:
            return RealBall(0, 0, prec)
        e = self.exponent
        if e.denominator == 1:
            return RealBall.from_fraction(self.as_fraction(), prec)
        return (RealBall.log_int(self.p, prec) * Fraction(e)).exp()

    def log_ball(self, prec: int) -> RealBall:
        if self.is_zero:
            raise ValueError("log of zero")
        return RealBall.log_int(self.p, prec) * Fraction(self.exponent)

    def __repr__(self):
        if self.is_zero:
            return "PPower(0)"
        return f"PPower({self.p}^{self.exponent})"


# ---------------------------------------------------------------------------
# Sturm isolation of real roots (exact, over Q)


def _sturm_chain(f):
    chain = [list(f)]
    d = [i * c for i, c in enumerate(f)][1:]
    if d:
        chain.append(d)
    while len(chain[-1]) > 1:
        _, r = poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _eval_poly(f, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(f):
        acc = acc * x + c
    return acc


def _sign_changes(chain, x: Fraction) -> int:
    signs = []
    for f in chain:
        v = _eval_poly(f, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def isolate_real_roots(int_coeffs) -> list:
    """Disjoint rational intervals (lo, hi), each containing one real root,
    sorted increasingly; roots never sit on endpoints."""
    f = [Fraction(c) for c in int_coeffs]
    chain = _sturm_chain(f)
    bound = Fraction(1) + max(abs(Fraction(c)) for c in f[:-1]) / abs(f[-1])
    lo, hi = -bound, bound
    total = _sign_changes(chain, lo) - _sign_changes(chain, hi)
    out = []

    def split(a, b, count):
        if count == 0:
            return
        if count == 1:
            out.append((a, b))
            return
        m = (a + b) / 2
        while _eval_poly(f, m) == 0:
            m = (a + m) / 2
        left = _sign_changes(chain, a) - _sign_changes(chain, m)
        split(a, m, left)
        split(m, b, count - left)

    split(lo, hi, total)
    return sorted(out)


def refine_real_root(int_coeffs, interval, bits: int):
    """Bisect an isolating interval down to width <= 2**-bits (exact signs)."""
    f = [Fraction(c) for c in int_coeffs]
    a, b = interval
    fa = _eval_poly(f, a)
    if fa == 0:  # cannot happen for irreducible deg >= 2; deg 1 exact root
        return (a, a)
    target = Fraction(1, 2**bits)
    while b - a > target:
        m = (a + b) / 2
        fm = _eval_poly(f, m)
        if fm == 0:
            return (m, m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return (a, b)


# ---------------------------------------------------------------------------
# Hensel lifting (exact, monic factorizations mod p^N)


def _polyz_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _polyz_mul(a, b, m):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % m
    return _polyz_trim(out)


def _polyz_add(a, b, m):
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, y in enumerate(b):
        out[i] = (out[i] + y) % m
    return _polyz_trim(out)


def _polyz_sub(a, b, m):
    return _polyz_add(a, [(-y) % m for y in b], m)


def _polyz_divmod(a, b, m):
    """Division by monic b, coefficients mod m."""
    a = [c % m for c in a]
    _polyz_trim(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] % m
        if c:
            q[i] = c
            for j, y in enumerate(b):
                a[i + j] = (a[i + j] - c * y) % m
    return _polyz_trim(q), _polyz_trim(a)


def _gf_xgcd(a, b, p):
    """Extended gcd over GF(p); returns (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = [c % p for c in a], [c % p for c in b]
    _polyz_trim(r0), _polyz_trim(r1)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        inv = pow(r1[-1], -1, p)
        q = [0] * max(0, len(r0) - len(r1) + 1)
        rr = list(r0)
        for i in range(len(rr) - len(r1), -1, -1):
            c = (rr[i + len(r1) - 1] * inv) % p
            if c:
                q[i] = c
                for j, y in enumerate(r1):
                    rr[i + j] = (rr[i + j] - c * y) % p
        _polyz_trim(rr)
        r0, r1 = r1, rr
        s0, s1 = s1, _polyz_sub(s0, _polyz_mul(q, s1, p), p)
        t0, t1 = t1, _polyz_sub(t0, _polyz_mul(q, t1, p), p)
    lead = pow(r0[-1], -1, p)
    return (
        [(c * lead) % p for c in r0],
        [(c * lead) % p for c in s0],
        [(c * lead) % p for c in t0],
    )


def _hensel_pair(f, g, h, s, t, p, target):
    """Lift f = g*h, s*g + t*h = 1 from mod p to mod p^N, N >= target."""
    m = p
    while m < p**target:
        m2 = m * m
        e = _polyz_sub([c % m2 for c in f], _polyz_mul(g, h, m2), m2)
        q, r = _polyz_divmod(_polyz_mul(s, e, m2), h, m2)
        g = _polyz_add(g, _polyz_add(_polyz_mul(t, e, m2), _polyz_mul(q, g, m2), m2), m2)
        h = _polyz_add(h, r, m2)
        b = _polyz_sub(_polyz_add(_polyz_mul(s, g, m2), _polyz_mul(t, h, m2), m2), [1], m2)
        c, d = _polyz_divmod(_polyz_mul(s, b, m2), h, m2)
        s = _polyz_sub(s, d, m2)
        t = _polyz_sub(t, _polyz_add(_polyz_mul(t, b, m2), _polyz_mul(c, g, m2), m2), m2)
        m = m2
    return g, h, m


def hensel_lift_factors(int_coeffs, p: int, factors_mod_p: list, digits: int) -> list:
    """Lift the (distinct, monic, irreducible) factors of f mod p to p^N with
    p^N >= p^digits; returns monic integer factor lists mod p^N."""
    f = [c % p**digits for c in int_coeffs]

    def rec(fcur, facs, target):
        if len(facs) == 1:
            # fcur is the lift of the single factor itself
            return [[c % p**target for c in fcur]]
        half = len(facs) // 2
        g0 = [1]
        for fac in facs[:half]:
            g0 = _polyz_mul(g0, fac, p)
        h0 = [1]
        for fac in facs[half:]:
            h0 = _polyz_mul(h0, fac, p)
        _, s, t = _gf_xgcd(g0, h0, p)
        g, h, m = _hensel_pair(fcur, g0, h0, s, t, p, target)
        return rec(g, facs[:half], target) + rec(h, facs[half:], target)

    lifted = rec(f, factors_mod_p, digits)
    # sanity: product reproduces f mod p^digits
    m = p**digits
    prod = [1]
    for g in lifted:
        prod = _polyz_mul(prod, g, m)
    if _polyz_sub(prod, [c % m for c in int_coeffs], m):
        raise AdelicError("Hensel lifting failed verification")
    return lifted


# ---------------------------------------------------------------------------
# Place objects


class Place:
    """A place of a number field; immutable, hashable, totally ordered by key."""

    def __init__(self, field: NumberField, kind: str, *, index: int = 0,
                 p: int = None, factor_mod_p: tuple = None, n_v: int = None,
                 root_seed=None):
        self.field = field
        self.kind = kind
        self.index = index
        self.p = p
        self.factor_mod_p = factor_mod_p
        if kind == REAL:
            self.n_v = 1
        elif kind == COMPLEX:
            self.n_v = 2
        else:
            self.n_v = n_v
        self._root_seed = root_seed  # approximation or exact interval
        self._root_cache = {}
        self._lift_cache = {}

    # -- identity ------------------------------------------------------

    def key(self) -> str:
        if self.kind == FINITE:
            return f"{self.p}.{self.index}"
        return f"inf{self.index}"

    def __repr__(self):
        if self.kind == FINITE:
            return f"Place({self.key()}, n_v={self.n_v})"
        return f"Place({self.key()}, {self.kind})"

    def __eq__(self, other):
        return (
            isinstance(other, Place)
            and self.field == other.field
            and self.kind == other.kind
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.field, self.kind, self.key()))

    @property
    def is_arch(self) -> bool:
        return self.kind in (REAL, COMPLEX)

    @property
    def residual_degree(self) -> int:
        if self.kind != FINITE:
            raise AdelicError("residual degree only defined at finite places")
        return len(self.factor_mod_p) - 1

    def r_v(self) -> Fraction | int:
        """Radius exponent data: r_v = p^(-1/(p-1)) finite, 1 archimedean."""
        if self.kind == FINITE:
            return PPower(self.p, Fraction(-1, self.p - 1))
        return PPower(2, 0)  # the constant 1

    # -- archimedean embedding ------------------------------------------

    def root(self, prec: int):
        """Certified enclosure of the defining-polynomial root (ball)."""
        if not self.is_arch:
            raise AdelicError("root() only at archimedean places")
        cached = self._root_cache.get(prec)
        if cached is not None:
            return cached
        ball = _arch_root_ball(self.field, self.kind, self._root_seed, prec)
        self._root_cache[prec] = ball
        return ball

    def embed(self, x: FieldElement, prec: int):
        return x.embed(self.root(prec))

    # -- finite-place machinery ------------------------------------------

    def lifted_factor(self, digits: int) -> list:
        if self.kind != FINITE:
            raise AdelicError("lifted_factor only at finite places")
        best = max(self._lift_cache, default=0)
        if best >= digits:
            return [c % self.p**digits for c in self._lift_cache[best]]
        facs = _finite_place_factors(self.field, self.p)
        lifted = hensel_lift_factors(list(self.field.coeffs), self.p, facs, digits)
        mine = lifted[self.index]
        self._lift_cache[digits] = mine
        return mine

    def valuation(self, x: FieldElement) -> Fraction | None:
        """Exact valuation (normalized v(p) = 1); None encodes +infinity."""
        if self.kind != FINITE:
            raise AdelicError("valuation only at finite places")
        if x.field != self.field:
            raise AdelicError("element of a different field")
        if x.is_zero():
            return None
        p = self.p
        den = x.denominator_lcm()
        num = [int(c * den) for c in x.coeffs]
        vden = _int_val(den, p)
        # cap: v(num(theta)) <= v_p(N(num(theta))) which is exact
        nrm = (x * x.field.element(den)).norm()
        cap = _int_val(int(nrm), p) if nrm != 0 else 0
        digits = cap + 1
        h = self.lifted_factor(digits + vden + 1)
        m = p ** (digits + vden + 1)
        _, r = _polyz_divmod([c % m for c in num], h, m)
        if not r:
            v = digits  # all coefficients vanished: valuation exceeds cap
        else:
            v = min(_int_val(c, p) for c in r if c != 0) if any(r) else digits
        if v > cap:
            raise AdelicError("valuation exceeded its norm cap (internal)")
        return Fraction(v - vden)

    def abs_value(self, x: FieldElement, ctx: PrecisionContext = None):
        """|x|_v: RealBall at archimedean places, exact PPower at finite ones."""
        ctx = ctx or PrecisionContext()
        if self.kind == FINITE:
            v = self.valuation(x)
            if v is None:
                return PPower(self.p, None)
            return PPower(self.p, -v)
        emb = self.embed(x, ctx.prec)
        if isinstance(emb, RealBall):
            return emb.abs()
        return emb.abs()


def _int_val(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# archimedean root certification


def _arch_root_ball(field: NumberField, kind: str, seed, prec: int):
    coeffs = field.coeffs
    if field.degree == 1:
        # root of x + c is -c
        return RealBall.from_fraction(Fraction(-coeffs[0]), prec)
    if kind == REAL:
        lo, hi = refine_real_root(coeffs, seed, prec + 8)
        mid = RealBall.from_fraction((lo + hi) / 2, prec + 16)
        half = RealBall.from_fraction((hi - lo) / 2, prec + 16)
        rad = mpmath.fadd(half.upper, mid.rad, prec=prec, rounding="u")
        return RealBall(mid.mid, rad, prec)
    # complex root: Newton-polish the seed, then certify by the f/f' disc
    deg = field.degree
    with mpmath.workprec(prec + 24):
        z = mpmath.mpc(seed)
        fp = [mpmath.mpf(c) for c in reversed(coeffs)]
        fpd = [mpmath.mpf(c * i) for i, c in enumerate(coeffs)][:0:-1]
        for _ in range(60):
            fz = mpmath.polyval(fp, z)
            dz = mpmath.polyval(fpd, z)
            step = fz / dz
            z = z - step
            if abs(step) < mpmath.mpf(2) ** (-(prec + 12)):
                break
    center = ComplexBall(z, 0, prec + 24)
    fz = _poly_eval_ball(coeffs, center)
    dz = _poly_eval_ball([i * c for i, c in enumerate(coeffs)][1:], center)
    with mpmath.workprec(prec + 24):
        radius = (fz.abs() / dz.abs()).upper * deg
        radius = radius + abs(center.mid) * mpmath.mpf(2) ** (-prec)
    return ComplexBall(center.mid, radius, prec)


def _poly_eval_ball(int_coeffs, ball):
    acc = None
    for c in reversed(int_coeffs):
        if acc is None:
            acc = ball * 0 + c
        else:
            acc = acc * ball + c
    return acc


def _arch_places(field: NumberField) -> list:
    cached = field._arch_cache.get("arch")
    if cached is not None:
        return cached
    places = []
    if field.degree == 1:
        places.append(Place(field, REAL, index=0, root_seed=(Fraction(0), Fraction(0))))
    else:
        intervals = isolate_real_roots(field.coeffs)
        for itv in intervals:
            places.append(Place(field, REAL, root_seed=itv))
        n_complex_pairs = (field.degree - len(intervals)) // 2
        if n_complex_pairs:
            with mpmath.workprec(120):
                roots = mpmath.polyroots(
                    [mpmath.mpf(c) for c in reversed(field.coeffs)],
                    maxsteps=200, extraprec=80,
                )
            cand = sorted(
                (r for r in roots if mpmath.im(r) > 1e-10),
                key=lambda r: (mpmath.re(r), mpmath.im(r)),
            )
            if len(cand) != n_complex_pairs:
                raise PrecisionExhausted("complex root classification failed")
            for r in cand:
                places.append(Place(field, COMPLEX, root_seed=complex(r)))
    # sort: real roots increasing, then complex pairs
    real = [p for p in places if p.kind == REAL]
    real.sort(key=lambda p: p._root_seed[0])
    cplx = [p for p in places if p.kind == COMPLEX]
    places = real + cplx
    for i, pl in enumerate(places):
        pl.index = i
    _certify_disjoint(field, places)
    field._arch_cache["arch"] = places
    return places


def _certify_disjoint(field: NumberField, places: list, prec: int = 100):
    """Each enclosure contains >= 1 root; conjugating complex discs gives D
    pairwise-disjoint regions for the D roots, so each contains exactly one."""
    if field.degree == 1 or len(places) <= 1:
        return
    enclosures = []
    for pl in places:
        b = pl.root(prec)
        if isinstance(b, RealBall):
            enclosures.append((mpmath.mpc(b.mid), b.rad, REAL))
        else:
            # discs of complex places must avoid the real axis entirely
            if not mpmath.im(b.mid) > b.rad:
                raise PrecisionExhausted("complex root disc touches the real axis")
            enclosures.append((b.mid, b.rad, COMPLEX))
    with mpmath.workprec(prec + 30):
        regions = []
        for m, r, kind in enclosures:
            regions.append((m, r))
            if kind == COMPLEX:
                regions.append((mpmath.conj(m), r))
        for i in range(len(regions)):
            for j in range(i + 1, len(regions)):
                (m1, r1), (m2, r2) = regions[i], regions[j]
                if not abs(m1 - m2) > r1 + r2:
                    raise PrecisionExhausted("root enclosures overlap; raise precision")


# ---------------------------------------------------------------------------
# finite places


def _finite_place_factors(field: NumberField, p: int) -> list:
    key = ("fin", p)
    cached = field._arch_cache.get(key)
    if cached is not None:
        return cached
    x = sympy.Symbol("x")
    poly = sympy.Poly(sum(c * x**i for i, c in enumerate(field.coeffs)), x, modulus=p)
    if poly.degree() != field.degree:
        raise RamifiedOrNonMonogenic(
            f"defining polynomial degenerates mod {p}"
        )
    _, factors = poly.factor_list()
    if any(mult > 1 for _, mult in factors):
        raise RamifiedOrNonMonogenic(
            f"defining polynomial is not squarefree mod {p}"
        )
    out = []
    for fac, _ in factors:
        cs = [int(c) % p for c in reversed(fac.all_coeffs())]
        out.append(tuple(cs))
    out.sort(key=lambda t: (len(t), t))
    field._arch_cache[key] = out
    return out


def places_above(field: NumberField, p: int) -> list:
    facs = _finite_place_factors(field, p)
    out = []
    for i, fac in enumerate(facs):
        out.append(
            Place(field, FINITE, index=i, p=p, factor_mod_p=fac, n_v=len(fac) - 1)
        )
    return out


def enumerate_places(field: NumberField, prime_bound: int, on_bad: str = "raise") -> list:
    """All archimedean places plus all finite places above primes <= bound.

    Raises ``RamifiedOrNonMonogenic`` if any prime <= bound is bad for the
    defining polynomial (pass on_bad="skip" to leave those primes out).
    Local degrees above each rational place sum to D.
    """
    if prime_bound < 2:
        raise AdelicError("prime_bound must be >= 2")
    out = list(_arch_places(field))
    for p in sympy.primerange(2, prime_bound + 1):
        try:
            out.extend(places_above(field, p))
        except RamifiedOrNonMonogenic:
            if on_bad != "skip":
                raise
    return out


def arch_places(field: NumberField) -> list:
    return list(_arch_places(field))


def abs_value(x: FieldElement, v: Place, ctx: PrecisionContext = None):
    """Rigorous |x|_v: exact PPower at finite places, RealBall at archimedean."""
    return v.abs_value(x, ctx)


def support_primes(x: FieldElement) -> list:
    """Primes p where some |x|_v might differ from 1 (a superset, exact)."""
    if x.is_zero():
        return []
    den = x.denominator_lcm()
    num_el = x * x.field.element(den)
    nrm = num_el.norm()
    primes = set()
    for n in (den, abs(int(nrm.numerator)), int(nrm.denominator)):
        if n not in (0, 1):
            primes.update(sympy.factorint(n).keys())
    return sorted(primes)


def product_formula_residual(
    x: FieldElement, field: NumberField, ctx: PrecisionContext = None
) -> RealBall:
    """|sum_v n_v log|x|_v| over the support of x plus archimedean places.

    Mathematically zero; the enclosure's width certifies the numerics.  The
    finite part is an exact integer combination of log p.
    """
    ctx = ctx or PrecisionContext()
    if x.is_zero():
        raise AdelicError("product formula needs x != 0")
    prec = ctx.prec
    coeff_by_p: dict[int, int] = {}
    for p in support_primes(x):
        for v in places_above(field, p):
            val = v.valuation(x)
            if val:
                coeff_by_p[p] = coeff_by_p.get(p, 0) - v.n_v * int(val)
    total = RealBall(0, 0, prec)
    for p, c in coeff_by_p.items():
        if c:
            total = total + RealBall.log_int(p, prec) * c
    for v in _arch_places(field):
        av = v.abs_value(x, ctx)
        total = total + av.log() * v.n_v
    return total.abs()
