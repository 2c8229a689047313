"""Explicit lower-bound machinery: the integer slack parameter, the derived
parameter set with its four sanity inequalities, Hilbert-Samuel and dimension
closed forms for the ambient product group, the lcm quantity controlling
ultrametric jet denominators, and the three bound variants.

Everything that can exceed hardware-float range lives in ``LogScaleReal``;
moderate-scale sums (log b + a log e + ...) stay RealBall until the single
final multiplication by the astronomical constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .balls import PrecisionContext, RealBall
from .errors import (
    AdelicError,
    DeskScaleExceeded,
    InvalidFrakE,
    KindMismatch,
    PrecisionExhausted,
)
from .logscale import LogScaleReal


# ---------------------------------------------------------------------------
# the slack parameter e-frak


class FrakE:
    """The convergence-slack base: 'e' exactly (log = 1), a rational > 1, or
    an exact rational power of a prime (ultrametric instances)."""

    def __init__(self, kind: str, value=None, p: int = None, exponent=None):
        self.kind = kind  # "e" | "rational" | "ppower"
        self.value = None if value is None else Fraction(value)
        self.p = p
        self.exponent = None if exponent is None else Fraction(exponent)

    @staticmethod
    def euler() -> "FrakE":
        return FrakE("e")

    @staticmethod
    def rational(q) -> "FrakE":
        q = Fraction(q)
        if q <= 1:
            raise InvalidFrakE("rational slack must exceed 1")
        return FrakE("rational", value=q)

    @staticmethod
    def prime_power(p: int, exponent) -> "FrakE":
        exponent = Fraction(exponent)
        if exponent <= 0:
            raise InvalidFrakE("prime-power slack must exceed 1")
        return FrakE("ppower", p=p, exponent=exponent)

    def log_ball(self, prec: int) -> RealBall:
        if self.kind == "e":
            return RealBall(1, 0, prec)
        if self.kind == "rational":
            return RealBall.from_fraction(self.value, prec).log()
        return RealBall.log_int(self.p, prec) * self.exponent

    def loglog_ball(self, prec: int) -> RealBall:
        if self.kind == "e":
            return RealBall(0, 0, prec)
        return self.log_ball(prec).log()

    def ge_e(self, prec: int) -> bool:
        if self.kind == "e":
            return True
        return self.log_ball(prec).lower >= 1

    def __repr__(self):
        if self.kind == "e":
            return "FrakE(e)"
        if self.kind == "rational":
            return f"FrakE({self.value})"
        return f"FrakE({self.p}^{self.exponent})"


def as_frak_e(x) -> FrakE:
    if isinstance(x, FrakE):
        return x
    if x == "e":
        return FrakE.euler()
    return FrakE.rational(Fraction(x))


# ---------------------------------------------------------------------------
# instances


@dataclass
class BoundInstance:
    """Inputs of the explicit bounds; all heights are caller-certified upper
    bounds (exact rationals or dyadics)."""

    n: int
    t: int
    D: int
    eps0: int                      # 1 archimedean, 0 ultrametric
    frak_e: FrakE
    log_a: tuple                   # n entries, each >= max(h(a_j), eps0*e|u_j|/D)
    log_b: Fraction
    s: int = None                  # defaults to t
    I: tuple = None                # indices 1..n of the maximal free family
    p: int = None                  # residue prime, ultrametric only
    beta10_nonzero: bool = False

    def __post_init__(self):
        self.frak_e = as_frak_e(self.frak_e)
        self.log_a = tuple(Fraction(a) for a in self.log_a)
        self.log_b = Fraction(self.log_b)
        if self.s is None:
            self.s = self.t
        if self.I is None:
            self.I = tuple(range(1, self.n + 1))
        self.I = tuple(sorted(self.I))
        if not (1 <= self.t <= self.n):
            raise AdelicError("need 1 <= t <= n")
        if not (1 <= self.s <= self.t):
            raise AdelicError("need 1 <= s <= t")
        if self.D < 1:
            raise AdelicError("need D >= 1")
        if len(self.log_a) != self.n:
            raise AdelicError("log_a must have n entries")
        if self.eps0 not in (0, 1):
            raise AdelicError("eps0 must be 0 or 1")
        if self.eps0 == 0 and self.p is None:
            raise AdelicError("ultrametric instances need the residue prime")
        if self.eps0 == 1 and not self.frak_e.ge_e(160):
            raise InvalidFrakE("archimedean slack must be >= e")
        if any(a < 0 for a in self.log_a) or self.log_b < self.D:
            raise AdelicError("heights must satisfy log_a >= 0, log_b >= D")
        if not self.I or not set(self.I) <= set(range(1, self.n + 1)):
            raise AdelicError("I must be a nonempty subset of 1..n")


def compute_frak_a(
    D: int, frak_e, eps0: int, p, sum_log_a, ctx: PrecisionContext = None
) -> int:
    """floor( (D/log e) log( e + D/log e + (1-eps0) log p + sum_j log a_j ) ) + 1."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    frak_e = as_frak_e(frak_e)
    if eps0 == 0 and p is None:
        raise InvalidFrakE("ultrametric slack needs the residue prime")
    loge = frak_e.log_ball(prec)
    if not loge.lower > 0:
        raise InvalidFrakE("slack must exceed 1")
    d_over = RealBall.from_fraction(Fraction(D), prec) / loge
    inner = d_over + RealBall(1, 0, prec).exp()  # e + D/log(e-frak)
    if eps0 == 0:
        inner = inner + RealBall.log_int(p, prec)
    inner = inner + RealBall.from_fraction(Fraction(sum_log_a), prec)
    t = d_over * inner.log()
    return _ball_floor(t) + 1


def _ball_floor(ball: RealBall) -> int:
    with mpmath.workprec(ball.prec):
        lo = int(mpmath.floor(ball.lower))
        hi = int(mpmath.floor(ball.upper))
    if lo != hi:
        raise PrecisionExhausted(f"floor undecided on {ball}")
    return lo


@dataclass
class ParamSet:
    C0: int
    y: int
    frak_a: int
    S0: int
    S: int
    U_minus1: LogScaleReal
    U0: LogScaleReal
    Ttilde0: LogScaleReal
    Ttilde: LogScaleReal
    Dtilde: tuple  # LogScaleReal, indices 0..n
    B_factor: LogScaleReal  # log b + D log S + S^y log(e-frak)
    branch: str  # "U_minus1" or "log_p"


def _c_factor(inst: BoundInstance, j: int, prec: int) -> RealBall:
    """1 + D log a_j / log(e-frak)."""
    loge = inst.frak_e.log_ball(prec)
    return RealBall.from_fraction(inst.D * inst.log_a[j - 1], prec) / loge + 1


def compute_params(inst: BoundInstance, ctx: PrecisionContext = None) -> ParamSet:
    """Derived parameters with card(Sigma_p(S)) = S (the degenerate n = 1,
    u_1 = 2 i pi instance is rejected upstream, where u is visible)."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    n, t, D = inst.n, inst.t, inst.D
    C0 = (6 * n) ** (22 * n)
    y = 0 if (t == 1 and inst.beta10_nonzero) else 1
    frak_a = compute_frak_a(
        D, inst.frak_e, inst.eps0, inst.p, sum(inst.log_a), ctx
    )
    S0 = C0 * frak_a
    S = C0**3 * frak_a
    loge = inst.frak_e.log_ball(prec)
    logS = RealBall.exact_int(S, prec).log()
    # B = log b + D log S + S^y log(e-frak)
    B = RealBall.from_fraction(inst.log_b, prec) + logS * D
    if y == 1:
        B = B + loge * S
    else:
        B = B + loge
    B_ls = LogScaleReal.from_ball(B)
    prod_c = RealBall(1, 0, prec)
    for j in range(1, n + 1):
        prod_c = prod_c * _c_factor(inst, j, prec)
    # U_-1 = C0^((3n-1)/t) { t! S prod_c / (n+t)! }^(1/t) B
    inner = (
        LogScaleReal.from_int(math.factorial(t) * S)
        * LogScaleReal.from_ball(prod_c)
        / LogScaleReal.from_int(math.factorial(n + t))
    )
    U_m1 = (
        LogScaleReal.int_power(6 * n, Fraction(22 * n * (3 * n - 1), t))
        * inner.pow(Fraction(1, t))
        * B_ls
    )
    U0, branch = select_U0(U_m1, inst.eps0, inst.p, prec)
    S_loge = LogScaleReal.from_int(S) * LogScaleReal.from_ball(loge)
    Ttilde0 = LogScaleReal.from_int(C0) * U0 / S_loge
    Ttilde = LogScaleReal.from_int(C0**2) * Ttilde0
    Dt = [U0 / B_ls]
    for j in range(1, n + 1):
        denom = S_loge * LogScaleReal.from_ball(_c_factor(inst, j, prec))
        Dt.append(U0 / denom)
    return ParamSet(
        C0=C0, y=y, frak_a=frak_a, S0=S0, S=S,
        U_minus1=U_m1, U0=U0, Ttilde0=Ttilde0, Ttilde=Ttilde,
        Dtilde=tuple(Dt), B_factor=B_ls, branch=branch,
    )


def select_U0(U_m1: LogScaleReal, eps0: int, p, prec: int):
    """U0 = U_-1 at archimedean places, max(U_-1, log p) at ultrametric ones.
    (For representable primes the log p branch is unreachable in practice,
    since U_-1 >= C0^2; the branch is kept for the stated contract.)"""
    if eps0 == 0:
        logp = LogScaleReal.from_ball(RealBall.log_int(p, prec))
        if logp > U_m1:
            return logp, "log_p"
    return U_m1, "U_minus1"


def select_bound_factor(factor: LogScaleReal, eps0: int, p, prec: int, branch: str):
    """max(factor, (1-eps0) log p) for the final bound."""
    if eps0 == 0:
        logp = LogScaleReal.from_ball(RealBall.log_int(p, prec))
        if logp > factor:
            return logp, "log_p"
    return factor, branch


def hilbert_samuel_full(n: int, t: int, degrees) -> LogScaleReal:
    """((n+t)!/t!) D0'^t D1' ... Dn' with D' = max(1, D); asserts the
    dimension comparison H <= (n+t)! nu."""
    degrees = tuple(int(d) for d in degrees)
    if len(degrees) != n + 1:
        raise AdelicError("need degrees D0..Dn")
    dp = [max(1, d) for d in degrees]
    H = math.factorial(n + t) // math.factorial(t) * dp[0] ** t
    for d in dp[1:]:
        H *= d
    nu = dimension_E_int(n, t, degrees)
    if H > math.factorial(n + t) * nu:
        raise AdelicError("Hilbert-Samuel exceeds (n+t)! nu (internal)")
    return LogScaleReal.from_int(H)


def dimension_E_int(n: int, t: int, degrees) -> int:
    degrees = tuple(int(d) for d in degrees)
    nu = math.comb(degrees[0] + t, t)
    for d in degrees[1:]:
        nu *= d + 1
    return nu


def dimension_E(n: int, t: int, degrees) -> LogScaleReal:
    """binom(D0+t, t)(D1+1)...(Dn+1): the section-space dimension."""
    return LogScaleReal.from_int(dimension_E_int(n, t, degrees))


def hs_real_args(n: int, t: int, degrees_ls) -> LogScaleReal:
    """The Hilbert-Samuel form evaluated at real (log-scale) degree values,
    as used inside the subgroup weight x(G')."""
    out = LogScaleReal.from_fraction(
        Fraction(math.factorial(n + t), math.factorial(t))
    ) * degrees_ls[0].pow(t)
    for d in degrees_ls[1:]:
        out = out * d
    return out


def x_zero_subgroup(ps: ParamSet, inst: BoundInstance) -> LogScaleReal:
    """x({0}) = ( Ttilde^n * S / (C0 * H(G; Dtilde)) )^(1/t): the weight of
    the trivial subgroup; <= 1 by the choice of U_-1."""
    H = hs_real_args(inst.n, inst.t, ps.Dtilde)
    inner = (
        ps.Ttilde.pow(inst.n)
        * LogScaleReal.from_int(ps.S)
        / (LogScaleReal.from_int(ps.C0) * H)
    )
    return inner.pow(Fraction(1, inst.t))


def rederive_U_minus1_log(ps: ParamSet, inst: BoundInstance, ctx: PrecisionContext = None) -> RealBall:
    """Solve log x({0}) = 0 for log U0 numerically (affine in log U0), fully
    independent of the closed-form expression for U_-1."""
    ctx = ctx or PrecisionContext()

    def log_x0_at(logU0: RealBall) -> RealBall:
        U0 = LogScaleReal.from_log_ball(logU0)
        prec = ctx.prec
        loge = inst.frak_e.log_ball(prec)
        S_loge = LogScaleReal.from_int(ps.S) * LogScaleReal.from_ball(loge)
        Tt = LogScaleReal.from_int(ps.C0**3) * U0 / S_loge
        Dt = [U0 / ps.B_factor]
        for j in range(1, inst.n + 1):
            Dt.append(U0 / (S_loge * LogScaleReal.from_ball(_c_factor(inst, j, prec))))
        H = hs_real_args(inst.n, inst.t, Dt)
        inner = (
            Tt.pow(inst.n) * LogScaleReal.from_int(ps.S)
            / (LogScaleReal.from_int(ps.C0) * H)
        )
        return inner.pow(Fraction(1, inst.t)).log_magnitude(prec)

    prec = ctx.prec
    p0 = RealBall(0, 0, prec)
    p1 = RealBall(1, 0, prec)
    f0 = log_x0_at(p0)
    f1 = log_x0_at(p1)
    slope = f1 - f0  # = -1 exactly, but derived numerically
    return p0 - f0 / slope


def check_param_properties(
    ps: ParamSet, inst: BoundInstance, ctx: PrecisionContext = None
) -> dict:
    """The four parameter inequalities, each evaluated in log-space; also
    reports x({0}) <= 1."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    n, t, D = inst.n, inst.t, inst.D
    C0 = LogScaleReal.from_int(ps.C0)
    report = {}
    # (i) C0 max{1, Dt0/S^(1-y), Dt1..Dtn} <= Ttilde0
    cands = [LogScaleReal.one()]
    cands.append(ps.Dtilde[0] / LogScaleReal.from_int(ps.S ** (1 - ps.y)))
    cands.extend(ps.Dtilde[1:])
    report["i"] = all(C0 * c <= ps.Ttilde0 for c in cands)
    # (ii) x Dt0 >= 1 (so D0 = [x Dt0] >= 1) and C0 <= max_j Dtj
    x0 = x_zero_subgroup(ps, inst)
    report["ii"] = (x0 * ps.Dtilde[0] >= LogScaleReal.one()) and any(
        C0 <= d for d in ps.Dtilde[1:]
    )
    # (iii) D log(frak_a) <= 2 frak_a log(e-frak)
    loga = RealBall.exact_int(ps.frak_a, prec).log() * D
    rhs = inst.frak_e.log_ball(prec) * (2 * ps.frak_a)
    report["iii"] = loga.lower <= rhs.upper
    # (iv) Ttilde log(4 Dt0) <= (10 n log C0) U0 / D  (Ttilde >= T = [Ttilde])
    log4D0 = ps.Dtilde[0].log_magnitude(prec) + RealBall.log_int(4, prec)
    lhs = ps.Ttilde * LogScaleReal.from_ball(log4D0)
    rhs_iv = (
        LogScaleReal.from_ball(RealBall.exact_int(ps.C0, prec).log() * (10 * n))
        * ps.U0
        / LogScaleReal.from_int(D)
    )
    report["iv"] = lhs <= rhs_iv
    report["x0_le_1"] = x0 <= LogScaleReal.one()
    return report


# ---------------------------------------------------------------------------
# the lcm quantity of ultrametric jet estimates


def delta_lcm(ell: int, h: int) -> int:
    """lcm of the products i_1 ... i_h' over h' in 1..h, i_j >= 1, with
    i_1 + ... + i_h' <= ell; brute-force enumeration, desk scale."""
    if ell < 1 or h < 1:
        raise AdelicError("need ell, h >= 1")
    if ell > 30 or h > 6:
        raise DeskScaleExceeded("delta_lcm is desk-scale: ell <= 30, h <= 6")
    out = 1
    def rec(remaining, parts_left, max_part, product):
        nonlocal out
        out = math.lcm(out, product)
        if parts_left == 0:
            return
        for i in range(1, min(remaining, max_part) + 1):
            rec(remaining - i, parts_left - 1, i, product * i)
    rec(ell, h, ell, 1)
    return out


# ---------------------------------------------------------------------------
# the bounds


@dataclass
class BoundResult:
    value: LogScaleReal        # the lower bound itself (negative)
    const_base: int            # 6n
    const_exponent: int        # 200 n^2 or 203 n^2
    factor: LogScaleReal       # max{U-or-V, (1-eps0) log p}
    branch: str                # "U", "V", or "log_p"
    kind: str

    def log_magnitude(self, prec: int = 160) -> RealBall:
        return self.value.log_magnitude(prec)


def theorem_bound(kind: str, inst: BoundInstance, ctx: PrecisionContext = None) -> BoundResult:
    """Lower bound for log max_i |Lambda_i|_{v0} in the requested variant.

    kinds: 'intro' (uniform heights, archimedean, exponent 200 n^2),
    'principal' (any place, rank parameter s, exponent 203 n^2),
    'reduit' (free families, exponent 200 n^2, with the t = 1 inhomogeneous
    refinement when flagged).
    """
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    n, t, D = inst.n, inst.t, inst.D
    loge = inst.frak_e.log_ball(prec)
    if kind == "intro":
        if inst.eps0 != 1:
            raise KindMismatch("the introductory bound is archimedean-only")
        if len(set(inst.log_a)) != 1:
            raise KindMismatch("the introductory bound needs uniform log a")
        la = inst.log_a[0]
        frak_a = compute_frak_a(D, inst.frak_e, 1, None, la, ctx)
        base = RealBall.from_fraction(inst.log_b, prec) + loge * frak_a
        factor = (
            LogScaleReal.from_int(frak_a).pow(Fraction(1, t))
            * LogScaleReal.from_ball(base)
            * LogScaleReal.from_ball(_c_factor(inst, 1, prec)).pow(Fraction(n, t))
        )
        const_exp = 200 * n * n
        branch = "V"
    elif kind == "principal":
        s = inst.s
        frak_a = compute_frak_a(D, inst.frak_e, inst.eps0, inst.p, sum(inst.log_a), ctx)
        base = (
            RealBall.from_fraction(inst.log_b, prec)
            + loge * frak_a
            + inst.frak_e.loglog_ball(prec) * D
        )
        factor = LogScaleReal.from_int(frak_a).pow(Fraction(1, s)) * LogScaleReal.from_ball(base)
        for i in inst.I:
            factor = factor * LogScaleReal.from_ball(_c_factor(inst, i, prec)).pow(
                Fraction(1, s)
            )
        const_exp = 203 * n * n
        branch = "U"
    elif kind == "reduit":
        frak_a = compute_frak_a(D, inst.frak_e, inst.eps0, inst.p, sum(inst.log_a), ctx)
        if t == 1 and inst.beta10_nonzero:
            base = (
                RealBall.from_fraction(inst.log_b, prec)
                + loge
                + RealBall.exact_int(frak_a, prec).log() * D
            )
        else:
            base = RealBall.from_fraction(inst.log_b, prec) + loge * frak_a
        factor = LogScaleReal.from_int(frak_a).pow(Fraction(1, t)) * LogScaleReal.from_ball(base)
        for j in range(1, n + 1):
            factor = factor * LogScaleReal.from_ball(_c_factor(inst, j, prec)).pow(
                Fraction(1, t)
            )
        const_exp = 200 * n * n
        branch = "V"
    else:
        raise KindMismatch(f"unknown bound kind {kind!r}")
    if kind in ("principal", "reduit"):
        factor, branch = select_bound_factor(factor, inst.eps0, inst.p, prec, branch)
    value = -(LogScaleReal.int_power(6 * n, const_exp) * factor)
    return BoundResult(
        value=value, const_base=6 * n, const_exponent=const_exp,
        factor=factor, branch=branch, kind=kind,
    )


def bound_monotonicity_suite(
    inst: BoundInstance, ctx: PrecisionContext = None, kind: str = "principal"
) -> dict:
    """Bound magnitude is nondecreasing in log b, each log a_j, and D."""
    ctx = ctx or PrecisionContext()
    base = theorem_bound(kind, inst, ctx).value.abs()
    report = {}

    def bumped(**kw):
        fields = dict(
            n=inst.n, t=inst.t, D=inst.D, eps0=inst.eps0, frak_e=inst.frak_e,
            log_a=inst.log_a, log_b=inst.log_b, s=inst.s, I=inst.I, p=inst.p,
            beta10_nonzero=inst.beta10_nonzero,
        )
        fields.update(kw)
        return BoundInstance(**fields)

    report["log_b"] = theorem_bound(
        kind, bumped(log_b=inst.log_b * 2), ctx
    ).value.abs() >= base
    for j in range(inst.n):
        la = list(inst.log_a)
        la[j] = la[j] * 2 + 1
        report[f"log_a_{j + 1}"] = theorem_bound(
            kind, bumped(log_a=tuple(la)), ctx
        ).value.abs() >= base
    report["D"] = theorem_bound(
        kind, bumped(D=inst.D + 1, log_b=max(inst.log_b, inst.D + 1)), ctx
    ).value.abs() >= base
    return report
