"""End-to-end evaluation and verification of linear forms in logarithms.

An instance fixes algebraic numbers alpha_j in a number field, logarithm
choices u_j (archimedean: principal log plus a branch integer times 2 pi i;
finite: the p-adic log, requiring alpha_j inside the principal domain), a
coefficient matrix beta (with the inhomogeneous column beta_{i,0}), and a
distinguished place v0.  ``verify_instance`` evaluates rigorous enclosures of
|Lambda_i|_{v0}, derives the height data through the heights module, and
checks the explicit lower bound with an astronomically positive margin.

Archimedean u_j are specified by branch integers, never by raw decimals, so
e^{u_j} = alpha_j holds exactly by construction.  When every enclosure of
Lambda_i still contains 0 at the maximum precision budget the instance is
reported ``DegenerateInstance`` rather than asserting vanishing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy

from . import exactlinalg as xl
from .balls import ComplexBall, PrecisionContext, RealBall, mpf_to_fraction
from .bounds import BoundInstance, BoundResult, FrakE, theorem_bound
from .errors import (
    AdelicError,
    DegenerateInstance,
    DimensionMismatch,
    OutsideConvergenceDomain,
    PrecisionExhausted,
)
from .fields import FieldElement, NumberField
from .heights import weil_height
from .logscale import LogScaleReal
from .padics import PadicNumber, embed_at_linear_place, exp_domain_ok, padic_exp, padic_log
from .places import FINITE, PPower, Place

MAX_PREC_DOUBLINGS = 5


@dataclass
class LinFormInstance:
    field: NumberField
    alpha: tuple                  # n field elements
    u_kind: str                   # "arch" | "padic"
    branches: tuple               # n branch integers (arch only)
    beta: tuple                   # t rows of n+1 field elements (column 0 first)
    v0: Place
    declared_s: int = None
    declared_I: tuple = None

    def __post_init__(self):
        field = self.field
        self.alpha = tuple(field.element(a) for a in self.alpha)
        self.beta = tuple(tuple(field.element(b) for b in row) for row in self.beta)
        n = len(self.alpha)
        if any(len(row) != n + 1 for row in self.beta):
            raise DimensionMismatch("beta rows must have n+1 entries")
        if not 1 <= len(self.beta) <= n:
            raise DimensionMismatch("need 1 <= t <= n linear forms")
        if any(a.is_zero() for a in self.alpha):
            raise AdelicError("alpha_j must be nonzero")
        if self.u_kind == "arch":
            if not self.v0.is_arch:
                raise AdelicError("archimedean u with a finite v0")
            self.branches = tuple(int(m) for m in (self.branches or (0,) * n))
            if len(self.branches) != n:
                raise DimensionMismatch("need one branch integer per alpha_j")
        elif self.u_kind == "padic":
            if self.v0.kind != FINITE:
                raise AdelicError("p-adic u with an archimedean v0")
            if self.v0.residual_degree != 1:
                raise AdelicError("p-adic evaluation needs k_v0 = Q_p (degree-1 place)")
            self.branches = ()
            p = self.v0.p
            for a in self.alpha:
                w = a - self.field.one()
                if w.is_zero():
                    raise AdelicError("alpha = 1 has zero logarithm")
                v = self.v0.valuation(w)
                if not exp_domain_ok(p, int(v)):
                    raise OutsideConvergenceDomain(
                        f"|alpha - 1|_{p} = p^{-int(v)} outside the principal domain"
                    )
        else:
            raise AdelicError("u_kind must be 'arch' or 'padic'")

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def t(self) -> int:
        return len(self.beta)

    def verify_log_exp_consistency(self, ctx: PrecisionContext = None) -> bool:
        """Numerical check that e^{u_j} recovers alpha_j (exp(log(a)) = a in
        the p-adic case; enclosure identity in the archimedean one)."""
        ctx = ctx or PrecisionContext()
        if self.u_kind == "padic":
            for a in self.alpha:
                emb = embed_at_linear_place(a, self.v0, ctx.padic_digits)
                if not (padic_exp(padic_log(emb)) - emb).is_zero:
                    return False
            return True
        for a, u in zip(self.alpha, self._arch_logs(ctx)):
            back = u.exp() - a.embed(self.v0.root(ctx.prec))
            if not back.abs().lower <= 2.0 ** (-ctx.arch_bits // 2):
                return False
        return True

    # -- logarithms -----------------------------------------------------------

    def _arch_logs(self, ctx: PrecisionContext) -> list:
        prec = ctx.prec
        root = self.v0.root(prec)
        two_pi = RealBall.pi(prec) * 2
        logs = []
        for a, m in zip(self.alpha, self.branches):
            emb = a.embed(root)
            if isinstance(emb, RealBall):
                emb = ComplexBall.from_real(emb)
            u = emb.log_principal()
            if m:
                u = u + ComplexBall.i_times(two_pi * m)
            logs.append(u)
        return logs

    def _padic_logs(self, digits: int) -> list:
        return [
            padic_log(embed_at_linear_place(a, self.v0, digits)) for a in self.alpha
        ]

    def u_abs_values(self, ctx: PrecisionContext = None) -> list:
        """|u_j|_{v0}: RealBall (arch) or exact PPower (finite)."""
        ctx = ctx or PrecisionContext()
        if self.u_kind == "arch":
            return [u.abs() for u in self._arch_logs(ctx)]
        out = []
        for u in self._padic_logs(ctx.padic_digits):
            out.append(PPower(self.v0.p, -u.val))
        return out


@dataclass
class VerificationReport:
    lambda_abs: list              # RealBall or PPower per form
    max_log_lambda: RealBall
    bound: BoundResult
    margin: LogScaleReal          # max_log_lambda - bound (log scale)
    passed: bool
    hypothesis_status: str        # "certified" | "assumed"
    s: int
    I: tuple
    u_domain_ok: bool             # |u_i| < r^2 for i in I (ultrametric)
    instance_params: BoundInstance = None


def eval_linear_forms(inst: LinFormInstance, ctx: PrecisionContext = None) -> list:
    """Rigorous enclosures of |Lambda_i|_{v0}, refining precision until the
    maximum separates from 0 (PrecisionExhausted after the budget)."""
    ctx = ctx or PrecisionContext()
    for attempt in range(MAX_PREC_DOUBLINGS):
        values = _eval_once(inst, ctx)
        if _max_separated(values):
            return values
        ctx = ctx.bump()
    raise PrecisionExhausted(
        "all |Lambda_i| enclosures contain 0 at the precision budget"
    )


def _eval_once(inst: LinFormInstance, ctx: PrecisionContext) -> list:
    if inst.u_kind == "arch":
        prec = ctx.prec
        root = inst.v0.root(prec)
        logs = inst._arch_logs(ctx)
        out = []
        for row in inst.beta:
            acc = _to_cball(row[0].embed(root), prec)
            for b, u in zip(row[1:], logs):
                if not b.is_zero():
                    acc = acc + _to_cball(b.embed(root), prec) * u
            out.append(acc.abs())
        return out
    digits = ctx.padic_digits
    logs = inst._padic_logs(digits + 6)
    out = []
    for row in inst.beta:
        acc = embed_at_linear_place(row[0], inst.v0, digits + 6)
        for b, u in zip(row[1:], logs):
            if not b.is_zero():
                bb = embed_at_linear_place(b, inst.v0, digits + 6)
                acc = acc + bb * u
        out.append(acc.truncate(min(acc.N, digits)))
    return [
        PPower(inst.v0.p, None if lam.is_zero else -lam.val) for lam in out
    ]


def _to_cball(x, prec) -> ComplexBall:
    return x if isinstance(x, ComplexBall) else ComplexBall.from_real(x)


def _max_separated(values) -> bool:
    for v in values:
        if isinstance(v, PPower):
            if not v.is_zero:
                return True
        elif v.nonzero():
            return True
    return False


# ---------------------------------------------------------------------------
# hypothesis certification


def certify_hypotheses(inst: LinFormInstance):
    """For all-rational alpha_j, decide the rank data exactly via prime
    factorization (multiplicative independence = Q-linear independence of the
    logarithms, with the 2 pi i branch row in the archimedean case); returns
    (status, s, I)."""
    if not all(a.is_rational() for a in inst.alpha):
        return "assumed", inst.declared_s, tuple(inst.declared_I or ())
    qs = [a.as_fraction() for a in inst.alpha]
    primes = set()
    for q in qs:
        primes.update(sympy.factorint(q.numerator).keys())
        primes.update(sympy.factorint(q.denominator).keys())
    primes = sorted(int(p) for p in primes)
    rows = []
    for p in primes:
        row = []
        for q in qs:
            e = _int_val_signed(q, p)
            row.append(Fraction(e))
        rows.append(row)
    if inst.u_kind == "arch":
        crow = []
        for q, m in zip(qs, inst.branches):
            crow.append(Fraction(2 * m + (1 if q < 0 else 0)))
        rows.append(crow)
    if not rows:
        rows = [[Fraction(0)] * len(qs)]
    # I: greedy maximal independent column family (first-index-maximal)
    from .fields import RATIONALS

    mat = xl.coerce_matrix(RATIONALS, rows)
    I = []
    cols = []
    for j in range(len(qs)):
        col = [[row[j]] for row in mat]
        cand = [r + c for r, c in zip(cols, col)] if cols else col
        trial = cand if cols else col
        stacked = trial
        if xl.rank(stacked) > (xl.rank(cols) if cols else 0):
            cols = stacked
            I.append(j + 1)
    dim_Tu = len(I)
    # relation space R = kernel of the column map; T_u = annihilator of R
    kern = xl.kernel_basis(mat)  # vectors q with sum q_j col_j = 0
    if kern:
        R_rows = [[v for v in vec] for vec in kern]
        Tu_basis = xl.kernel_basis(R_rows)
    else:
        Tu_basis = [
            [RATIONALS.element(int(i == j)) for j in range(len(qs))]
            for i in range(len(qs))
        ]
    # W0 cap T_u over the instance field: kernel of [beta rows; relation rows]
    field = inst.field
    stacked = [list(row[1:]) for row in inst.beta]  # the homogeneous part
    if kern:
        for vec in kern:
            stacked.append([field.element(v.coeffs[0]) for v in vec])
    w0_cap_Tu = len(
        xl.kernel_basis(
            xl.coerce_matrix(field, [[_as_field(field, e) for e in row] for row in stacked])
        )
    )
    s = dim_Tu - w0_cap_Tu
    if s < 1:
        raise AdelicError("every linear form vanishes on T_u: degenerate instance")
    return "certified", s, tuple(I)


def _as_field(field, e):
    if isinstance(e, FieldElement):
        return e if e.field == field else field.element(e.coeffs[0])
    return field.element(e)


def _int_val_signed(q: Fraction, p: int) -> int:
    v = 0
    n = abs(q.numerator)
    while n and n % p == 0:
        n //= p
        v += 1
    d = q.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# end-to-end verification


def derive_bound_instance(
    inst: LinFormInstance, s: int, I: tuple, ctx: PrecisionContext = None
) -> BoundInstance:
    """Heights through the heights module; every bound input is a certified
    upper bound (safe direction: the lower bound only weakens)."""
    ctx = ctx or PrecisionContext()
    prec = ctx.prec
    field = inst.field
    D = field.degree
    n, t = inst.n, inst.t
    if n == 1 and inst.alpha[0] == field.one():
        raise AdelicError("u_1 a multiple of 2 i pi: excluded degenerate case")
    eps0 = 1 if inst.v0.is_arch else 0
    u_abs = inst.u_abs_values(ctx)
    if eps0 == 0:
        p = inst.v0.p
        # frak_e = min_i r^2/|u_i| over i in I; exact prime power
        exps = []
        for i in I:
            a = u_abs[i - 1]
            exps.append(-a.exponent - Fraction(2, p - 1))
        q = min(exps)
        frak_e = FrakE.prime_power(p, q)  # raises InvalidFrakE if q <= 0
    else:
        p = None
        frak_e = FrakE.euler()
    log_a = []
    e_ball = RealBall(1, 0, prec).exp()
    for j in range(n):
        h = weil_height(inst.alpha[j], field, ctx).value
        cand = mpf_to_fraction(h.upper)
        if eps0 == 1:
            scaled = e_ball * u_abs[j] * Fraction(1, D)
            cand = max(cand, mpf_to_fraction(scaled.upper))
        log_a.append(max(cand, Fraction(0)))
    hmax = Fraction(0)
    for row in inst.beta:
        for b in row:
            h = weil_height(b, field, ctx).value
            hmax = max(hmax, mpf_to_fraction(h.upper))
    log_b = D * max(Fraction(1), hmax)
    beta10_nonzero = t == 1 and not inst.beta[0][0].is_zero()
    return BoundInstance(
        n=n, t=t, D=D, eps0=eps0, frak_e=frak_e, log_a=tuple(log_a),
        log_b=log_b, s=s, I=tuple(I), p=p, beta10_nonzero=beta10_nonzero,
    )


def u_domain_report(inst: LinFormInstance, I: tuple, ctx: PrecisionContext = None) -> bool:
    """The ultrametric theorem hypothesis |u_i| < r^2 for i in I."""
    if inst.v0.is_arch:
        return True
    p = inst.v0.p
    for i in I:
        a = inst.u_abs_values(ctx)[i - 1]
        if not (-a.exponent) > Fraction(2, p - 1):
            return False
    return True


def verify_instance(
    inst: LinFormInstance, kind: str = "principal", ctx: PrecisionContext = None
) -> VerificationReport:
    ctx = ctx or PrecisionContext()
    status, s, I = certify_hypotheses(inst)
    if status == "assumed":
        s = inst.declared_s
        I = tuple(inst.declared_I or range(1, inst.n + 1))
        if s is None:
            raise AdelicError("non-rational alphas need declared_s/declared_I")
    binst = derive_bound_instance(inst, s, I, ctx)
    bound = theorem_bound(kind, binst, ctx)
    try:
        lambda_abs = eval_linear_forms(inst, ctx)
    except PrecisionExhausted as exc:
        raise DegenerateInstance(str(exc)) from exc
    max_log = _max_log_ball(lambda_abs, ctx)
    margin = LogScaleReal.from_ball(max_log) - bound.value if not (
        max_log.mid == 0 and max_log.rad == 0
    ) else -bound.value
    passed = margin.sign > 0
    return VerificationReport(
        lambda_abs=lambda_abs,
        max_log_lambda=max_log,
        bound=bound,
        margin=margin,
        passed=passed,
        hypothesis_status=status,
        s=s,
        I=tuple(I),
        u_domain_ok=u_domain_report(inst, I, ctx),
        instance_params=binst,
    )


def _max_log_ball(values, ctx: PrecisionContext) -> RealBall:
    prec = ctx.prec
    best = None
    for v in values:
        if isinstance(v, PPower):
            if v.is_zero:
                continue
            ball = v.log_ball(prec)
        else:
            if not v.nonzero():
                continue
            ball = v.log()
        if best is None or ball.mid > best.mid:
            best = ball
    if best is None:
        raise DegenerateInstance("no linear form separated from zero")
    return best
