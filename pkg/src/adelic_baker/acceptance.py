"""The acceptance suite: one callable per criterion, returning (ok, detail).

Each criterion pins its tolerance here; the pytest module and the CLI
``selftest`` both dispatch to ``run_all``.  All randomness is seeded and the
oracles come from ``oracles`` (never the production code path they check).
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import mpmath

from . import oracles
from .balls import PrecisionContext, RealBall
from .bounds import (
    BoundInstance,
    bound_monotonicity_suite,
    check_param_properties,
    compute_params,
    delta_lcm,
    rederive_U_minus1_log,
    theorem_bound,
)
from .bundles import AdelicBundle, liouville_check
from .errors import HypothesisViolated, OutsideConvergenceDomain
from .fields import GAUSSIANS, RATIONALS
from .heights import weil_height
from .linforms import LinFormInstance, verify_instance
from .padics import PadicNumber, padic_exp, padic_log
from .places import arch_places, places_above, product_formula_residual
from .siegel import (
    TwistedBundle,
    absolute_siegel_witness,
    approx_siegel_search,
    classical_siegel_search,
    operator_norm_upper,
    slope_difference,
    slope_difference_lower_bound,
)
from .sympower import sym_power_norm

CTX = PrecisionContext(100, 30)


def _random_rational(rng, primes, max_exp=3) -> Fraction:
    q = Fraction(1)
    for p in primes:
        e = rng.randint(-max_exp, max_exp)
        if e:
            q *= Fraction(p) ** e
    return q if q != 1 else Fraction(2, 3)


def _random_gaussian(rng):
    """Random nonzero element of Q(i) supported on unramified primes <= 100:
    a quotient of small Gaussian integers with odd 97-smooth norms."""
    import sympy

    def pick():
        while True:
            a, b = rng.randint(-20, 20), rng.randint(-20, 20)
            n = a * a + b * b
            if n == 0 or n % 2 == 0:
                continue
            if max(sympy.factorint(n).keys(), default=1) <= 97:
                return GAUSSIANS.element([a, b])

    return pick() / pick()


def criterion_1_product_formula():
    """100 random elements over Q and over Q(i): residual <= 1e-20; < 5 s."""
    t0 = time.time()
    rng = random.Random(20260810)
    primes = [2, 3, 5, 7, 11, 13, 41, 97]
    worst = 0.0
    for _ in range(100):
        x = RATIONALS.element(_random_rational(rng, primes))
        r = product_formula_residual(x, RATIONALS, CTX)
        worst = max(worst, float(r.upper))
    for _ in range(100):
        x = _random_gaussian(rng)
        r = product_formula_residual(x, GAUSSIANS, CTX)
        worst = max(worst, float(r.upper))
    dt = time.time() - t0
    ok = worst <= 1e-20 and dt < 5.0
    return ok, f"worst residual {worst:.3e}, {dt:.2f} s"


def criterion_2_height_identities():
    """h(x^m) = m h(x), h(x) = h(1/x), h(xy) <= h(x) + h(y); 200 samples."""
    rng = random.Random(31415)
    primes = [2, 3, 5, 7, 13]
    worst = 0.0
    ok = True
    for k in range(200):
        if k % 2 == 0:
            x = RATIONALS.element(_random_rational(rng, primes))
            y = RATIONALS.element(_random_rational(rng, primes))
            field = RATIONALS
        else:
            x, y = _random_gaussian(rng), _random_gaussian(rng)
            field = GAUSSIANS
        hx = weil_height(x, field, CTX).value
        m = rng.randint(0, 3)
        d1 = (weil_height(x**m, field, CTX).value - hx * m).abs().upper
        d2 = (weil_height(x.inverse(), field, CTX).value - hx).abs().upper
        worst = max(worst, float(d1), float(d2))
        hxy = weil_height(x * y, field, CTX).value
        hy = weil_height(y, field, CTX).value
        if (hxy - (hx + hy)).lower > 1e-20:
            ok = False
    ok = ok and worst <= 1e-20
    return ok, f"worst identity error {worst:.3e}"


def criterion_3_degree_two_ways():
    """Determinant degree vs Monte-Carlo volume ratio (2% in ratio space,
    10^6 samples); finite places matched exactly by lattice counting."""
    rng = random.Random(777)
    inf = arch_places(RATIONALS)[0]
    worst_rel = 0.0
    for trial in range(20):
        nu = rng.choice([1, 2, 3])
        M = [
            [
                Fraction(rng.randint(-3, 3), 10) + (1 if i == j else 0)
                for j in range(nu)
            ]
            for i in range(nu)
        ]
        try:
            bundle = AdelicBundle(RATIONALS, nu, {inf: M})
        except Exception:
            continue
        deg = bundle.degree(CTX)
        exact_ratio = math.exp(float(deg.mid))  # D = 1: ratio = e^deg
        mc = oracles.mc_unit_ball_volume_ratio(M, 10**6, seed=9000 + trial)
        rel = abs(mc / exact_ratio - 1.0)
        worst_rel = max(worst_rel, rel)
    exact_ok = True
    for trial in range(10):
        p = rng.choice([2, 3])
        nu = rng.choice([1, 2])
        place = places_above(RATIONALS, p)[0]
        M = [
            [
                Fraction(p) ** rng.randint(-1, 2) if i == j else Fraction(rng.randint(0, 1))
                for j in range(nu)
            ]
            for i in range(nu)
        ]
        try:
            bundle = AdelicBundle(RATIONALS, nu, {place: M})
        except Exception:
            continue
        deg = bundle.degree(CTX)
        ratio = oracles.padic_inverse_image_volume_ratio(M, p)
        # degree = (1/D) log ratio exactly
        diff = (deg - RealBall.from_fraction(ratio, CTX.prec).log()).abs()
        if float(diff.upper) > 1e-25:
            exact_ok = False
    ok = worst_rel <= 0.02 and exact_ok
    return ok, f"worst MC relative error {worst_rel:.4f}; finite exact: {exact_ok}"


def criterion_4_sym_power_norms():
    """Formula vs brute-force tensor projection, nu <= 3, l <= 3, rel 1e-10."""
    import itertools

    inf = arch_places(RATIONALS)[0]
    worst = 0.0
    for nu in (1, 2, 3):
        for ell in (1, 2, 3):
            for idx in itertools.product(range(ell + 1), repeat=nu):
                if sum(idx) != ell:
                    continue
                val = sym_power_norm({idx: 1}, ell, inf, CTX)
                oracle = oracles.sym_norm_by_projection({idx: 1}, nu, ell)
                rel = abs(float(val.mid) / oracle - 1.0)
                worst = max(worst, rel)
    special = sym_power_norm({(1, 1): 1}, 2, inf, CTX)
    target = (RealBall.from_fraction(Fraction(1, 2), CTX.prec)).sqrt()
    special_err = float((special - target).abs().upper)
    ok = worst <= 1e-10 and special_err <= 1e-25
    return ok, f"worst projection mismatch {worst:.2e}; e1e2 err {special_err:.1e}"


def criterion_5_slope_difference():
    """Exact singular-value formula vs twisted-ball volumes (MC 2% arch,
    exact finite) and the operator-norm lower bound on 100 instances."""
    rng = random.Random(5150)
    inf = arch_places(RATIONALS)[0]
    worst_rel = 0.0
    for trial in range(20):
        nu = rng.choice([1, 2, 3])
        mu = rng.randint(1, nu)
        A = [[Fraction(rng.randint(-2, 2)) for _ in range(nu)] for _ in range(mu)]
        alpha = Fraction(rng.randint(1, 2))
        tb = TwistedBundle(AdelicBundle(RATIONALS, nu), inf, alpha, A)
        sd = slope_difference(tb, CTX)
        exact_ratio = math.exp(float(sd.mid) * nu)  # nu * D * slope-diff
        mc = oracles.mc_twisted_ball_volume_ratio(A, float(alpha), 400_000, seed=100 + trial)
        worst_rel = max(worst_rel, abs(mc / exact_ratio - 1.0))
    finite_ok = True
    for trial in range(20):
        p = rng.choice([2, 3])
        nu = rng.choice([1, 2])
        mu = rng.randint(1, nu)
        place = places_above(RATIONALS, p)[0]
        A = [[Fraction(rng.randint(-2, 2)) for _ in range(nu)] for _ in range(mu)]
        alpha = Fraction(1, p ** rng.randint(0, 2))
        if all(all(e == 0 for e in row) for row in A):
            A[0][0] = Fraction(1)
        tb = TwistedBundle(AdelicBundle(RATIONALS, nu), place, alpha, A)
        sd = slope_difference(tb, CTX)
        ratio = oracles.padic_twisted_volume_ratio(A, alpha, p)
        target = RealBall.from_fraction(ratio, CTX.prec).log() * Fraction(1, nu)
        if float((sd - target).abs().upper) > 1e-25:
            finite_ok = False
    ineq_ok = True
    for trial in range(100):
        nu = rng.choice([1, 2, 3])
        mu = rng.randint(1, 3)
        arch = rng.random() < 0.5
        place = inf if arch else places_above(RATIONALS, rng.choice([2, 3, 5]))[0]
        A = [[Fraction(rng.randint(-3, 3)) for _ in range(nu)] for _ in range(mu)]
        alpha = Fraction(rng.randint(1, 8), rng.randint(1, 8))
        tb = TwistedBundle(AdelicBundle(RATIONALS, nu), place, alpha, A)
        sd = slope_difference(tb, CTX)
        lb = slope_difference_lower_bound(tb, operator_norm_upper(tb, CTX), CTX)
        if sd.upper < lb.lower:  # certified violation
            ineq_ok = False
    ok = worst_rel <= 0.02 and finite_ok and ineq_ok
    return ok, (
        f"worst MC rel {worst_rel:.4f}; finite exact: {finite_ok}; bound holds: {ineq_ok}"
    )


def criterion_6_siegel_witnesses():
    """Classical minimal solutions respect the bound (200 systems); the
    approximate lemma succeeds whenever its hypothesis holds (50 trials);
    absolute witnesses found for 50 random diagonal bundles."""
    rng = random.Random(66)
    for _ in range(200):
        nu = rng.randint(2, 6)
        mu = rng.randint(1, nu - 1)
        rows = [[rng.randint(-9, 9) for _ in range(nu)] for _ in range(mu)]
        w = classical_siegel_search(rows)
        if w.height > w.bound + 1e-9:
            return False, f"classical bound violated on {rows}"
    hits = 0
    for trial in range(50):
        nu = 3
        rows = [[Fraction(rng.randint(-100, 100), 100) for _ in range(nu)]]
        # choose H, eps satisfying (2 mu H A/eps + 1)^(2 rho) < (H+1)^nu
        H = rng.randint(8, 14)
        A = sum(abs(e) for e in rows[0]) + Fraction(1, 100)
        eps = float(2 * H * A) / ((H + 1) ** Fraction(nu, 2) - 1) * 1.02
        try:
            approx_siegel_search(rows, H, eps, CTX)
            hits += 1
        except HypothesisViolated:
            pass
    if hits != 50:
        return False, f"approximate search succeeded {hits}/50"
    for trial in range(50):
        nu = rng.randint(1, 4)
        inf = arch_places(RATIONALS)[0]
        p = rng.choice([2, 3])
        place = places_above(RATIONALS, p)[0]
        dev_inf = [
            [Fraction(rng.randint(1, 8), rng.randint(1, 8)) if i == j else 0 for j in range(nu)]
            for i in range(nu)
        ]
        dev_fin = [
            [Fraction(p) ** rng.randint(-2, 2) if i == j else 0 for j in range(nu)]
            for i in range(nu)
        ]
        bundle = AdelicBundle(RATIONALS, nu, {inf: dev_inf, place: dev_fin})
        w = absolute_siegel_witness(bundle, budget=50, ctx=CTX)
        if (w.height - w.bound).lower > 1e-20:
            return False, "absolute witness exceeded its budget bound"
    return True, "200 classical + 50 approximate + 50 absolute witnesses"


def criterion_7_liouville():
    """h_E(x) >= -max_slope on 100 random vector/diagonal-bundle pairs."""
    rng = random.Random(7)
    inf = arch_places(RATIONALS)[0]
    for _ in range(100):
        nu = rng.randint(1, 4)
        p = rng.choice([2, 3, 5])
        place = places_above(RATIONALS, p)[0]
        dev_inf = [
            [Fraction(rng.randint(1, 9), rng.randint(1, 9)) if i == j else 0 for j in range(nu)]
            for i in range(nu)
        ]
        dev_fin = [
            [Fraction(p) ** rng.randint(-2, 2) if i == j else 0 for j in range(nu)]
            for i in range(nu)
        ]
        bundle = AdelicBundle(RATIONALS, nu, {inf: dev_inf, place: dev_fin})
        x = [rng.randint(-5, 5) for _ in range(nu)]
        if all(v == 0 for v in x):
            x[0] = 1
        if not liouville_check(x, bundle, CTX):
            return False, f"Liouville failed for {x}"
    return True, "100/100 pairs"


def criterion_8_delta_lcm():
    """log delta <= l log(4h), divisibility in both arguments, delta_4(1)=12."""
    if delta_lcm(4, 1) != 12:
        return False, "delta_4(1) != 12"
    for h in range(1, 6):
        prev_l = None
        for ell in range(1, 26):
            d = delta_lcm(ell, h)
            if math.log(d) > ell * math.log(4 * h) + 1e-12:
                return False, f"log bound fails at ell={ell}, h={h}"
            if prev_l is not None and prev_l != 0 and d % prev_l:
                return False, f"divisibility in ell fails at {ell}, {h}"
            prev_l = d
            if h > 1 and d % delta_lcm(ell, h - 1):
                return False, f"divisibility in h fails at {ell}, {h}"
    return True, "ell <= 25, h <= 5 verified"


def _grid_instances():
    for n in (1, 2, 3):
        for t in range(1, n + 1):
            for D in (1, 2, 5, 10):
                for la in (1, 10, 100):
                    for lb in (1, 50):
                        for kind in ("arch", 2, 101):
                            if kind == "arch":
                                yield BoundInstance(
                                    n=n, t=t, D=D, eps0=1, frak_e="e",
                                    log_a=(la,) * n, log_b=max(lb, D),
                                )
                            else:
                                yield BoundInstance(
                                    n=n, t=t, D=D, eps0=0,
                                    frak_e=Fraction(3, 2),
                                    log_a=(la,) * n, log_b=max(lb, D),
                                    p=kind,
                                )


def criterion_9_parameters():
    """Properties (i)-(iv) over the grid; x({0}) <= 1 re-derives the
    closed-form threshold to 1e-12 in log space."""
    count = 0
    worst = 0.0
    for inst in _grid_instances():
        ps = compute_params(inst, CTX)
        rep = check_param_properties(ps, inst, CTX)
        if not all(rep.values()):
            return False, f"property failure {rep} at {inst}"
        lhs = rederive_U_minus1_log(ps, inst, CTX)
        rhs = ps.U_minus1.log_magnitude(CTX.prec)
        err = float((lhs - rhs).abs().upper)
        worst = max(worst, err)
        count += 1
    # y = 0 slice: t = 1 with a nonzero constant coefficient
    for D in (1, 5):
        inst = BoundInstance(
            n=2, t=1, D=D, eps0=1, frak_e="e", log_a=(10, 10), log_b=max(50, D),
            beta10_nonzero=True,
        )
        ps = compute_params(inst, CTX)
        if ps.y != 0 or not all(check_param_properties(ps, inst, CTX).values()):
            return False, "y = 0 slice failed"
    ok = worst <= 1e-12
    return ok, f"{count} grid instances; worst re-derivation error {worst:.2e}"


def criterion_10_padic_analysis():
    """log(exp) = id and exp(log) = id at N = 30, 100 points per prime;
    exp(2) rejected and exp(4) accepted at p = 2."""
    rng = random.Random(1010)
    N = 30
    for p in (2, 3, 5, 7):
        for _ in range(100):
            vmin = 2 if p == 2 else 1
            v = rng.randint(vmin, 4)
            unit = rng.randint(1, p**20)
            if unit % p == 0:
                unit += 1
            z = PadicNumber(p, v, unit, N)
            if not (padic_log(padic_exp(z)) - z).is_zero:
                return False, f"log(exp) != id at p={p}, z={z}"
            u = PadicNumber.one(p, N) + z
            if not (padic_exp(padic_log(u)) - u).is_zero:
                return False, f"exp(log) != id at p={p}, u={u}"
    try:
        padic_exp(PadicNumber.from_rational(2, 2, 10))
        return False, "exp(2) at p=2 was accepted"
    except OutsideConvergenceDomain:
        pass
    padic_exp(PadicNumber.from_rational(4, 2, 10))
    return True, "400 round trips; boundary behavior correct"


def _arch_instances():
    Q = RATIONALS
    inf = arch_places(Q)[0]
    pairs = [
        ((2,), [(0, 1)]),
        ((3,), [(Fraction(-109, 100), 1)]),
        ((2, 3), [(0, 1, 1)]),
        ((2, 3), [(0, 1, 0), (0, 0, 1)]),
        ((2, 5), [(Fraction(1, 10), 1, -1)]),
        ((3, 5), [(0, 2, -1)]),
        ((2, 7), [(0, 1, 1), (1, 1, -1)]),
        ((Fraction(3, 2),), [(Fraction(-2, 5), 1)]),
        ((5, 6), [(0, 1, -1)]),
        ((2, 3, 5), [(0, 1, 1, -1), (Fraction(1, 3), 1, 0, 1)]),
    ]
    for alphas, beta in pairs:
        yield LinFormInstance(
            Q, [Q.element(a) for a in alphas], "arch", (0,) * len(alphas),
            [list(row) for row in beta], inf,
        )


def _padic_instances():
    Q = RATIONALS
    data = [
        (5, (6,), [(0, 1)]),
        (5, (6, 11), [(0, 1, 1)]),
        (5, (6, 11), [(1, 1, 0), (0, 1, -1)]),
        (7, (8,), [(0, 1)]),
        (7, (8, 15), [(Fraction(7), 1, 1)]),
        (3, (10,), [(0, 1)]),
        (3, (10, 19), [(0, 1, -1)]),
        (2, (9,), [(0, 1)]),
        (2, (9, 17), [(0, 1, 1)]),
        (11, (12, 23), [(0, 2, 1)]),
    ]
    for p, alphas, beta in data:
        v0 = places_above(Q, p)[0]
        yield LinFormInstance(
            Q, [Q.element(a) for a in alphas], "padic", (),
            [list(row) for row in beta], v0,
        )


def criterion_11_end_to_end():
    """20 instances verify with positive margin against the main bound; the
    constant reproduces 203 n^2 log(6n) + log(max-factor) to 1e-12; < 60 s."""
    t0 = time.time()
    worst_sym = 0.0
    count = 0
    for inst in list(_arch_instances()) + list(_padic_instances()):
        rep = verify_instance(inst, "principal", CTX)
        if not rep.passed or rep.hypothesis_status != "certified":
            return False, f"instance failed: alphas={inst.alpha}"
        n = inst.n
        lm = rep.bound.log_magnitude(CTX.prec)
        recon = (
            RealBall.log_int(6 * n, CTX.prec) * (203 * n * n)
            + rep.bound.factor.log_magnitude(CTX.prec)
        )
        worst_sym = max(worst_sym, float((lm - recon).abs().upper))
        # independent float-level recomputation of the symbolic magnitude
        with mpmath.workprec(200):
            direct = 203 * n * n * mpmath.log(6 * n) + mpmath.mpf(
                rep.bound.factor.log_magnitude(CTX.prec).mid
            )
            worst_sym = max(worst_sym, abs(float(direct - lm.mid)))
        count += 1
    dt = time.time() - t0
    ok = worst_sym <= 1e-12 and dt < 60.0 and count == 20
    return ok, f"{count} instances, worst constant error {worst_sym:.2e}, {dt:.1f} s"


CRITERIA = [
    ("1 product formula", criterion_1_product_formula),
    ("2 height identities", criterion_2_height_identities),
    ("3 degree two ways", criterion_3_degree_two_ways),
    ("4 symmetric-power norms", criterion_4_sym_power_norms),
    ("5 slope-difference lemma", criterion_5_slope_difference),
    ("6 Siegel witnesses", criterion_6_siegel_witnesses),
    ("7 Liouville", criterion_7_liouville),
    ("8 delta lcm", criterion_8_delta_lcm),
    ("9 parameter machinery", criterion_9_parameters),
    ("10 p-adic analysis", criterion_10_padic_analysis),
    ("11 end-to-end verification", criterion_11_end_to_end),
]


def run_all(stream=None) -> bool:
    import sys

    stream = stream or sys.stdout
    all_ok = True
    for name, fn in CRITERIA:
        ok, detail = fn()
        all_ok = all_ok and ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", file=stream)
    return all_ok
