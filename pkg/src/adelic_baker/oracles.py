"""Independent brute-force oracles backing the production formulas.

These deliberately avoid the production code paths: degrees are checked
against the volume-ratio definition by Monte-Carlo sampling (archimedean)
and kernel counting mod p^k (finite places); symmetric-power norms against
explicit symmetrization in the tensor power; twisted-slope differences
against the twisted-ball volume quotient.  Oracles take explicit seeds and
are deterministic given them.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import AdelicError

_UNIT_BALL_VOL = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


def mc_unit_ball_volume_ratio(matrix, n_samples: int, seed: int) -> float:
    """vol{x : |Mx|_2 <= 1} / vol{|x|_2 <= 1} over R^nu by Monte-Carlo.

    The exact value is 1/|det M|; the oracle never computes a determinant.
    """
    M = np.array([[float(e) for e in row] for row in matrix], dtype=float)
    nu = M.shape[0]
    if nu not in _UNIT_BALL_VOL:
        raise AdelicError("Monte-Carlo volume oracle is desk-scale: nu <= 3")
    Minv = np.linalg.inv(M)
    # box bound: |x|_inf <= max row l2 norm of M^-1 on the unit ball
    L = float(np.abs(Minv).sum(axis=1).max())
    rng = np.random.default_rng(seed)
    x = rng.uniform(-L, L, size=(n_samples, nu))
    inside = (x @ M.T) ** 2
    count = int((inside.sum(axis=1) <= 1.0).sum())
    vol = count / n_samples * (2.0 * L) ** nu
    return vol / _UNIT_BALL_VOL[nu]


def mc_twisted_ball_volume_ratio(A, alpha: float, n_samples: int, seed: int) -> float:
    """vol{x : |x|^2 + |alpha A x|^2 <= 1} / vol{|x| <= 1} by Monte-Carlo
    (real archimedean case of the twisted-norm unit ball)."""
    A = np.array([[float(e) for e in row] for row in A], dtype=float)
    nu = A.shape[1]
    if nu not in _UNIT_BALL_VOL:
        raise AdelicError("Monte-Carlo twisted oracle is desk-scale: nu <= 3")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(n_samples, nu))
    base = (x**2).sum(axis=1)
    tw = ((x @ A.T) * alpha) ** 2
    count = int((base + tw.sum(axis=1) <= 1.0).sum())
    vol = count / n_samples * 2.0**nu
    return vol / _UNIT_BALL_VOL[nu]


def _vden(q: Fraction, p: int) -> int:
    v, d = 0, q.denominator
    while d % p == 0:
        d //= p
        v += 1
    return v


def _rat_mod(q: Fraction, p: int, mod: int) -> int:
    """q mod p^c for a rational with denominator prime to p."""
    if q.denominator % p == 0:
        raise AdelicError("denominator not prime to p")
    return (q.numerator * pow(q.denominator, -1, mod)) % mod


def _count_kernel(rows_int, mod: int, nu: int) -> int:
    count = 0
    for x in itertools.product(range(mod), repeat=nu):
        ok = True
        for row in rows_int:
            s = 0
            for a, xi in zip(row, x):
                s += a * xi
            if s % mod:
                ok = False
                break
        if ok:
            count += 1
    return count


def padic_membership_volume_ratio(B_rows, p: int) -> Fraction:
    """vol{x in Z_p^nu : Bx in Z_p^mu} / vol(Z_p^nu), exactly, by counting
    solutions of the cleared congruence (p^c B) x = 0 mod p^c, where c is the
    largest denominator valuation among the entries of B."""
    B = [[Fraction(e) for e in row] for row in B_rows]
    nu = len(B[0])
    c = max((_vden(e, p) for row in B for e in row), default=0)
    if c == 0:
        return Fraction(1)
    mod = p**c
    if mod**nu > 10**7:
        raise AdelicError("counting oracle desk-scale exceeded")
    scaled = [[_rat_mod(e * mod, p, mod) for e in row] for row in B]
    return Fraction(_count_kernel(scaled, mod, nu), mod**nu)


def padic_inverse_image_volume_ratio(M_rows, p: int) -> Fraction:
    """vol(M^-1 Z_p^nu) / vol(Z_p^nu), exactly, via kernel counting of the
    rescaled integral matrix X = p^a M^-1 (never through |det M|_p)."""
    M = [[Fraction(e) for e in row] for row in M_rows]
    nu = len(M)
    arr = np.array([[float(x) for x in row] for row in M])
    if abs(np.linalg.det(arr)) < 1e-12:
        raise AdelicError("matrix appears singular")
    # exact inverse by fraction Gauss-Jordan
    aug = [row[:] + [Fraction(int(i == j)) for j in range(nu)] for i, row in enumerate(M)]
    for col in range(nu):
        piv = next(r for r in range(col, nu) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [e * inv for e in aug[col]]
        for r in range(nu):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [e - f * g for e, g in zip(aug[r], aug[col])]
    Minv = [row[nu:] for row in aug]
    a = max(0, max(_vden(e, p) for row in Minv for e in row))
    X = [[e * p**a for e in row] for row in Minv]
    detX = Fraction(1)
    tmp = [row[:] for row in X]
    for col in range(nu):
        piv = next(r for r in range(col, nu) if tmp[r][col] != 0)
        if piv != col:
            tmp[col], tmp[piv] = tmp[piv], tmp[col]
            detX = -detX
        detX *= tmp[col][col]
        inv = Fraction(1) / tmp[col][col]
        for r in range(col + 1, nu):
            if tmp[r][col] != 0:
                f = tmp[r][col] * inv
                for cc in range(col, nu):
                    tmp[r][cc] -= f * tmp[col][cc]
    c = _vden(Fraction(1, 1) / detX, p) + 1  # v_p(det X) + 1
    mod = p**c
    if mod**nu > 10**7:
        raise AdelicError("counting oracle desk-scale exceeded")
    Xi = [[_rat_mod(e, p, mod) for e in row] for row in X]
    count = _count_kernel(Xi, mod, nu)
    return Fraction(p) ** (a * nu) / count


def padic_twisted_volume_ratio(A_rows, alpha, p: int) -> Fraction:
    """vol{x in Z_p^nu : max(|x|, |alpha A x|) <= 1} / vol(Z_p^nu), exactly:
    the twisted unit ball is Z_p^nu intersected with (alpha A)^-1 Z_p^mu."""
    alpha = Fraction(alpha)
    scaled = [[Fraction(e) * alpha for e in row] for row in A_rows]
    return padic_membership_volume_ratio(scaled, p)


def sym_norm_by_projection(coeffs: dict, nu: int, ell: int) -> float:
    """Quotient norm of sum_i p_i e^i in S^l(C^nu) computed as the tensor
    norm of the symmetrization of a preimage (floating point, nu,l <= 3-ish).

    Builds the full tensor power with its orthonormal word basis and
    symmetrizes explicitly with permutations; no factorial-weight formula.
    """
    words = list(itertools.product(range(nu), repeat=ell))
    word_index = {w: k for k, w in enumerate(words)}
    vec = np.zeros(len(words), dtype=complex)
    perms = list(itertools.permutations(range(ell)))
    for idx, value in coeffs.items():
        if len(idx) != nu or sum(idx) != ell:
            raise AdelicError(f"bad monomial index {idx}")
        word = []
        for letter, k in enumerate(idx):
            word.extend([letter] * k)
        word = tuple(word)
        # minimum-norm preimage of the monomial class = symmetrized word
        sym = np.zeros(len(words), dtype=complex)
        for perm in perms:
            permuted = tuple(word[j] for j in perm)
            sym[word_index[permuted]] += 1.0 / len(perms)
        vec += complex(value) * sym
    return float(np.linalg.norm(vec))


def shortest_kernel_vector_bruteforce(rows, box: int):
    """Smallest-max-norm nonzero integer solution of rows . x = 0 with
    |x|_inf <= box, by plain cube enumeration (tiny cases only)."""
    rows = [[int(e) for e in row] for row in rows]
    nu = len(rows[0])
    best = None
    for x in itertools.product(range(-box, box + 1), repeat=nu):
        if all(v == 0 for v in x):
            continue
        if any(sum(a * b for a, b in zip(row, x)) for row in rows):
            continue
        cand = (max(abs(v) for v in x), x)
        if best is None or cand < best:
            best = cand
    return None if best is None else list(best[1])
