"""Integer relations, the L-function of the character mod 5, and supercongruences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .catalog import FormulaRecord
from .errors import PrecisionExhausted
from .exact import exact_partial_sum
from .numerics import QuadElem, guard_bits


@dataclass(frozen=True)
class IntegerRelation:
    coefficients: tuple[int, ...]
    norm_bound: object
    residual: object

    def __iter__(self):
        return iter(self.coefficients)


def _canonical_sign(c):
    for v in c:
        if v:
            return tuple(-x for x in c) if v < 0 else tuple(c)
    return tuple(c)


def pslq(values: Sequence, prec: int, max_coeff: int = 10 ** 6,
         max_steps: Optional[int] = None) -> Optional[IntegerRelation]:
    """Find integers c, |c_i| <= max_coeff, with sum c_i x_i = 0 to about 3/4 of ``prec`` bits.

    Returns None when the norm bound proves no such relation exists.  Raises
    PrecisionExhausted when the iteration stalls before deciding.
    """
    n = len(values)
    if n < 2:
        raise ValueError("need at least two values")
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        x = [mp.mpf(v) for v in values]
        scale = max(abs(v) for v in x)
        if scale == 0:
            raise ValueError("all values are zero")
        x = [v / scale for v in x]
        tol = mp.ldexp(1, -(3 * prec) // 4)
        accept = mp.ldexp(1, -prec // 2)
        # a zero entry is a trivial relation
        for i, v in enumerate(x):
            if abs(v) < tol:
                c = tuple(1 if k == i else 0 for k in range(n))
                return IntegerRelation(c, mp.mpf(1), abs(v) * scale)
        gam = mp.sqrt(mp.mpf(4) / 3)
        A = [[int(i == j) for j in range(n)] for i in range(n)]
        B = [[int(i == j) for j in range(n)] for i in range(n)]
        s = [mp.sqrt(mp.fsum(v * v for v in x[k:])) for k in range(n)]
        t = s[0]
        y = [v / t for v in x]
        s = [v / t for v in s]
        H = [[mp.mpf(0)] * (n - 1) for _ in range(n)]
        for i in range(n):
            for j in range(min(i + 1, n - 1)):
                if i == j:
                    H[i][j] = s[j + 1] / s[j]
                else:
                    H[i][j] = -y[i] * y[j] / (s[j] * s[j + 1])

        def reduce_rows(rows):
            for i in rows:
                for j in range(min(i - 1, n - 2), -1, -1):
                    if H[j][j] == 0:
                        continue
                    q = int(mp.nint(H[i][j] / H[j][j]))
                    if q == 0:
                        continue
                    y[j] += q * y[i]
                    for k in range(j + 1):
                        H[i][k] -= q * H[j][k]
                    for k in range(n):
                        A[i][k] -= q * A[j][k]
                        B[k][j] += q * B[k][i]

        reduce_rows(range(1, n))
        steps = max_steps if max_steps is not None else 100 * n * prec
        limit = 2 ** (wp // 2)
        for _ in range(steps):
            m = max(range(n - 1), key=lambda i: gam ** (i + 1) * abs(H[i][i]))
            y[m], y[m + 1] = y[m + 1], y[m]
            A[m], A[m + 1] = A[m + 1], A[m]
            H[m], H[m + 1] = H[m + 1], H[m]
            for row in B:
                row[m], row[m + 1] = row[m + 1], row[m]
            if m < n - 2:
                t0 = mp.hypot(H[m][m], H[m][m + 1])
                t1, t2 = H[m][m] / t0, H[m][m + 1] / t0
                for i in range(m, n):
                    t3, t4 = H[i][m], H[i][m + 1]
                    H[i][m] = t1 * t3 + t2 * t4
                    H[i][m + 1] = -t2 * t3 + t1 * t4
            reduce_rows(range(m + 1, n))
            best = min(range(n), key=lambda j: abs(y[j]))
            if abs(y[best]) < tol:
                c = [B[k][best] for k in range(n)]
                if max(abs(v) for v in c) <= max_coeff and any(c):
                    res = abs(mp.fsum(ci * xi for ci, xi in zip(c, x))) * scale
                    if res < accept * max(1, scale):
                        bound = 1 / max(abs(H[j][j]) for j in range(n - 1))
                        return IntegerRelation(_canonical_sign(c), bound, res)
            hmax = max(abs(H[j][j]) for j in range(n - 1))
            if hmax == 0 or 1 / hmax > max_coeff:
                return None
            if max(abs(v) for row in A for v in row) > limit:
                raise PrecisionExhausted("PSLQ entries exceeded the working precision")
        raise PrecisionExhausted(f"PSLQ did not decide within {steps} iterations")


def identify_constant(value, basis: Sequence, prec: int, max_coeff: int = 10 ** 6):
    """Express ``value`` as a rational combination of ``basis`` via pslq, or None."""
    rel = pslq([value] + list(basis), prec, max_coeff)
    if rel is None or rel.coefficients[0] == 0:
        return None
    c0 = rel.coefficients[0]
    return [Fraction(-c, c0) for c in rel.coefficients[1:]]


# -- L(s, chi_5) -------------------------------------------------------------

CHI5 = (0, 1, -1, -1, 1)


def _hurwitz_tail(s, a, N, wp):
    """Euler-Maclaurin tail of sum_{k>=N} (k+a)^(-s) without the (N+a)^(1-s)/(s-1) term."""
    X = N + a
    out = X ** (-s) / 2
    fact = s  # rising product s (s+1) ... (s+2j-2)
    power = X ** (-s - 1)
    eps = mp.ldexp(1, -wp)
    j = 1
    while True:
        term = mp.bernoulli(2 * j) / mp.factorial(2 * j) * fact * power
        out += term
        if abs(term) < eps * abs(out) or j > wp:
            break
        fact *= (s + 2 * j - 1) * (s + 2 * j)
        power /= X * X
        j += 1
    return out


def dirichlet_L5(s: int, prec: int):
    """L(s, chi) for the real character mod 5 (values +, -, -, +, 0)."""
    if s < 1:
        raise ValueError("s must be a positive integer")
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        N = wp // 4 + 10
        total = mp.mpf(0)
        for r in range(1, 5):
            chi = CHI5[r]
            a = mp.mpf(r) / 5
            head = mp.fsum((k + a) ** (-s) for k in range(N))
            if s == 1:
                # the divergent pieces cancel in the character sum
                main = -mp.log(N + a)
            else:
                main = (N + a) ** (1 - s) / (s - 1)
            total += chi * (head + main + _hurwitz_tail(s, a, N, wp))
        return +(total / mp.mpf(5) ** s)


# -- supercongruences -------------------------------------------------------


@dataclass(frozen=True)
class SupercongruenceReport:
    record: str
    p: int
    applicable: bool
    reason: str = ""
    partial_sum: Optional[Fraction] = None
    main_term: Optional[Fraction] = None
    valuation: Optional[float] = None
    exponent: int = 3

    @property
    def holds(self) -> Optional[bool]:
        """Whether S_p is congruent to A p^e modulo p^5 (None if inapplicable)."""
        if not self.applicable:
            return None
        return self.valuation >= 5


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, math.isqrt(p) + 1))


def p_adic_valuation(r: Fraction, p: int) -> float:
    if r == 0:
        return math.inf
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _inapplicable(rec, p, why, exponent=3):
    return SupercongruenceReport(rec.id, p, False, why, exponent=exponent)


def check_supercongruence(rec: FormulaRecord, p: int, exponent: int = 3) -> SupercongruenceReport:
    """Exact S_p = sum_{n<p} term_n and the p-adic valuation of S_p - A p^exponent.

    A is the constant coefficient of the series polynomial.  In practice
    S_p - A p^2 is the combination divisible by p^5; the default exponent 3
    follows the conjectured form and typically gives valuation 2.
    """
    if not is_prime(p):
        return _inapplicable(rec, p, f"{p} is not prime", exponent)
    if p == 2:
        return _inapplicable(rec, p, "p = 2 is excluded", exponent)
    if not all(v.is_rational for v in (rec.z, rec.A, rec.B, rec.C)):
        return _inapplicable(rec, p, "record has irrational data", exponent)
    for s in rec.shape.params:
        if s.denominator % p == 0:
            return _inapplicable(rec, p, f"p divides the denominator of s = {s}", exponent)
    z = rec.z.p
    if z.numerator % p == 0 or z.denominator % p == 0:
        return _inapplicable(rec, p, "p divides z", exponent)
    S = exact_partial_sum(rec, p)
    A = rec.A.p
    main = A * p ** exponent
    return SupercongruenceReport(rec.id, p, True, "", S, main, p_adic_valuation(S - main, p), exponent)


def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in range(max(lo, 2), hi + 1) if is_prime(p)]
