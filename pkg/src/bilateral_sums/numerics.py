"""Arbitrary-precision scalars, gamma-type functions and exact reconstruction.

Every routine takes an explicit binary precision ``prec`` and evaluates
under ``mpmath.workprec(prec + guard_bits(prec))``; no global precision is
mutated.  Real values are ``mpmath.mpf`` and complex values ``mpmath.mpc``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath as mp

PrecReal = mp.mpf
PrecComplex = mp.mpc

RationalLike = Union[int, Fraction, str]


class PoleError(ArithmeticError):
    """Raised when a gamma-type function is evaluated at a pole."""


def guard_bits(prec: int) -> int:
    """Guard allowance: 10% of the working precision plus 64 bits."""
    return prec // 10 + 64


def digits_to_bits(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10)))


def to_mpf(v) -> mp.mpf:
    """Convert ints, Fractions, QuadElems and mp numbers at the current precision."""
    if isinstance(v, QuadElem):
        return v.to_mpf()
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


def _is_nonpositive_integer(y) -> bool:
    return y <= 0 and y == mp.floor(y)


def _bernoulli_even(k: int):
    return mp.bernoulli(2 * k)


# -- gamma family ---------------------------------------------------------

def _lift_target(wp: int) -> int:
    # Stirling's minimal term is about exp(-2*pi*y); need it below 2^-wp.
    return max(8, int(0.111 * wp) + 2)


def log_gamma(y, prec: int = 53) -> tuple[mp.mpf, int]:
    """Return ``(log|Gamma(y)|, sign(Gamma(y)))`` for real ``y``.

    The argument is pushed above a precision-dependent threshold with the
    recurrence Gamma(y) = Gamma(y + 1) / y, then Stirling's series is used.
    """
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        y = to_mpf(y)
        if _is_nonpositive_integer(y):
            raise PoleError(f"Gamma has a pole at {mp.nstr(y, 10)}")
        target = _lift_target(wp)
        shift = mp.mpf(1)
        while y < target:
            shift *= y
            y += 1
        sign = -1 if shift < 0 else 1
        eps = mp.ldexp(1, -wp)
        s = (y - mp.mpf(1) / 2) * mp.log(y) - y + mp.log(2 * mp.pi) / 2
        y2 = y * y
        ypow = y
        k = 1
        while True:
            term = _bernoulli_even(k) / ((2 * k) * (2 * k - 1) * ypow)
            s += term
            if abs(term) < eps * abs(s):
                break
            ypow *= y2
            k += 1
        s -= mp.log(abs(shift))
    return +s, sign


def gamma_value(y, prec: int = 53) -> mp.mpf:
    lg, sign = log_gamma(y, prec)
    with mp.workprec(prec + guard_bits(prec)):
        return sign * mp.exp(lg)


def polygamma(m: int, y, prec: int = 53) -> mp.mpf:
    """Polygamma function psi^(m)(y) for 0 <= m <= 4 and real y."""
    if not 0 <= m <= 4:
        raise ValueError("polygamma order must be in 0..4")
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        y = to_mpf(y)
        if _is_nonpositive_integer(y):
            raise PoleError(f"polygamma has a pole at {mp.nstr(y, 10)}")
        # higher orders reach their smallest asymptotic term a little later
        target = _lift_target(wp) + 2 * m + 4
        mfact = math.factorial(m)
        sgn = -1 if m % 2 else 1
        # psi^(m)(y) = psi^(m)(y+1) - (-1)^m m! / y^(m+1)
        correction = mp.mpf(0)
        while y < target:
            correction -= sgn * mfact / y ** (m + 1)
            y += 1
        eps = mp.ldexp(1, -wp)
        if m == 0:
            s = mp.log(y) - 1 / (2 * y)
            y2 = y * y
            ypow = y2
            k = 1
            while True:
                term = _bernoulli_even(k) / (2 * k * ypow)
                s -= term
                if abs(term) < eps * abs(s):
                    break
                ypow *= y2
                k += 1
        else:
            s = mp.mpf(math.factorial(m - 1)) / y ** m + mp.mpf(mfact) / (2 * y ** (m + 1))
            y2 = y * y
            ypow = y ** (m + 2)
            k = 1
            prev = None
            while True:
                term = _bernoulli_even(k) * math.factorial(2 * k + m - 1) / (math.factorial(2 * k) * ypow)
                if prev is not None and abs(term) > prev:
                    raise ArithmeticError("polygamma asymptotic series diverged before converging")
                prev = abs(term)
                s += term
                if abs(term) < eps * abs(s):
                    break
                ypow *= y2
                k += 1
            if m % 2 == 0:
                s = -s
        return s + correction


def pochhammer(a, y, prec: int = 53) -> mp.mpf:
    """Rising factorial (a)_y = Gamma(a + y) / Gamma(a) with correct sign."""
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        a = to_mpf(a)
        y = to_mpf(y)
        if _is_nonpositive_integer(a) or _is_nonpositive_integer(a + y):
            raise PoleError(f"Pochhammer ({mp.nstr(a, 8)})_{mp.nstr(y, 8)} hits a pole")
        if y == mp.floor(y) and 0 <= y <= 64:
            out = mp.mpf(1)
            for k in range(int(y)):
                out *= a + k
            return out
        l1, s1 = log_gamma(a + y, prec)
        l0, s0 = log_gamma(a, prec)
        return s1 * s0 * mp.exp(l1 - l0)


# -- exact values ----------------------------------------------------------

def _squarefree_split(n: int) -> tuple[int, int]:
    """Write a positive integer n as k^2 * d with d square-free."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    k, d = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1
    d *= m
    return k, d


def is_squarefree(n: int) -> bool:
    return n > 0 and _squarefree_split(n)[0] == 1


def _exact_sqrt_fraction(r: Fraction) -> Optional[Fraction]:
    if r < 0:
        return None
    a, b = math.isqrt(r.numerator), math.isqrt(r.denominator)
    if a * a == r.numerator and b * b == r.denominator:
        return Fraction(a, b)
    return None


def _frac(v: RationalLike) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class QuadElem:
    """Exact element p + q*sqrt(D) of a real quadratic field (D = 1: rational)."""

    p: Fraction
    q: Fraction = Fraction(0)
    D: int = 1

    def __post_init__(self):
        p, q, D = _frac(self.p), _frac(self.q), int(self.D)
        if not is_squarefree(D):
            raise ValueError(f"D={D} is not a square-free positive integer")
        if D == 1:
            p, q = p + q, Fraction(0)
        elif q == 0:
            D = 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "D", D)

    @classmethod
    def coerce(cls, v) -> "QuadElem":
        if isinstance(v, QuadElem):
            return v
        return cls(_frac(v))

    @classmethod
    def sqrt_rational(cls, r: RationalLike) -> "QuadElem":
        """Exact square root of a non-negative rational, as (a/b)*sqrt(D)."""
        r = _frac(r)
        if r < 0:
            raise ValueError("negative radicand")
        if r == 0:
            return cls(Fraction(0))
        # sqrt(n/d) = sqrt(n*d)/d
        k, D = _squarefree_split(r.numerator * r.denominator)
        return cls(Fraction(0), Fraction(k, r.denominator), D)

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def _common(self, other: "QuadElem") -> int:
        if self.D == 1:
            return other.D
        if other.D == 1 or other.D == self.D:
            return self.D
        raise ValueError(f"mixed quadratic fields sqrt({self.D}) and sqrt({other.D})")

    def __add__(self, other):
        other = QuadElem.coerce(other)
        D = self._common(other)
        return QuadElem(self.p + other.p, self.q + other.q, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.p, -self.q, self.D)

    def __sub__(self, other):
        return self + (-QuadElem.coerce(other))

    def __rsub__(self, other):
        return QuadElem.coerce(other) - self

    def __mul__(self, other):
        other = QuadElem.coerce(other)
        D = self._common(other)
        return QuadElem(self.p * other.p + D * self.q * other.q,
                        self.p * other.q + self.q * other.p, D)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.p, -self.q, self.D)

    def norm(self) -> Fraction:
        return self.p * self.p - self.D * self.q * self.q

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conjugate()
        return QuadElem(c.p / n, c.q / n, self.D)

    def __truediv__(self, other):
        return self * QuadElem.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QuadElem.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadElem(Fraction(1))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def sqrt(self) -> Optional["QuadElem"]:
        """Exact square root if it lies in Q or Q(sqrt(D)), else None."""
        if self.is_rational:
            if self.p < 0:
                return None
            return QuadElem.sqrt_rational(self.p)
        disc = _exact_sqrt_fraction(self.norm())
        if disc is None:
            return None
        for cand in ((self.p + disc) / 2, (self.p - disc) / 2):
            x = _exact_sqrt_fraction(cand)
            if x is None or x == 0:
                continue
            y = self.q / (2 * x)
            r = QuadElem(x, y, self.D)
            if r * r == self:
                return r if r.to_mpf(64) > 0 else -r
        return None

    def to_mpf(self, prec: Optional[int] = None) -> mp.mpf:
        """Numeric value; at the ambient precision when ``prec`` is None."""
        if prec is not None:
            with mp.workprec(prec + guard_bits(prec)):
                return self.to_mpf()
        a = mp.mpf(self.p.numerator) / self.p.denominator
        if not self.q:
            return a
        b = mp.mpf(self.q.numerator) / self.q.denominator * mp.sqrt(self.D)
        if (self.p > 0) != (self.q > 0) and self.p != 0:
            # p and q sqrt(D) cancel: divide the exact norm by the conjugate instead
            n = self.norm()
            return (mp.mpf(n.numerator) / n.denominator) / (a - b)
        return a + b

    def __str__(self) -> str:
        if self.q == 0:
            return str(self.p)
        return f"q({self.p},{self.q},{self.D})"

    def pretty(self) -> str:
        if self.q == 0:
            return str(self.p)
        sign = "+" if self.q > 0 else "-"
        coef = abs(self.q)
        coef_s = "" if coef == 1 else f"{coef}*"
        head = f"{self.p} {sign} " if self.p else ("-" if sign == "-" else "")
        return f"{head}{coef_s}sqrt({self.D})"


def golden_phi() -> QuadElem:
    """Fifth power of the golden ratio, (11 + 5*sqrt(5))/2."""
    return QuadElem(Fraction(11, 2), Fraction(5, 2), 5)


# -- reconstruction ---------------------------------------------------------

def continued_fraction_convergents(r, max_den: int):
    """Yield convergents p/q of ``r`` (as Fractions) while q <= max_den."""
    r = mp.mpf(r)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    x = r
    for _ in range(10_000):
        a = int(mp.floor(x))
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_den:
            return
        yield Fraction(h1, k1)
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def rationalize(r, max_den: int, tol, prec: Optional[int] = None) -> Optional[Fraction]:
    """First continued-fraction convergent p/q with q <= max_den and |r - p/q| < tol."""
    wp = mp.mp.prec if prec is None else prec + guard_bits(prec)
    with mp.workprec(wp):
        r = mp.mpf(r)
        tol = mp.mpf(tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        for c in continued_fraction_convergents(r, max_den):
            if abs(r - mp.mpf(c.numerator) / c.denominator) < tol:
                return c
    return None


def quad_reconstruct(r, D: int, max_height: int, tol, prec: Optional[int] = None) -> Optional[QuadElem]:
    """Identify ``r`` as p + q*sqrt(D) with bounded numerators and denominators."""
    from .relations import pslq

    if not is_squarefree(D):
        raise ValueError(f"D={D} is not square-free")
    wp = mp.mp.prec if prec is None else prec + guard_bits(prec)
    with mp.workprec(wp):
        r = mp.mpf(r)
        tol = mp.mpf(tol)
        if D == 1:
            f = rationalize(r, max_height, tol)
            return None if f is None else QuadElem(f)
        # the relation only needs to hold to the requested tolerance
        bits = min(wp, int(-mp.log(tol, 2) * 4 / 3) + 1)
        rel = pslq([r, mp.mpf(1), mp.sqrt(D)], prec=bits, max_coeff=max_height)
        if rel is None or rel.coefficients[0] == 0:
            return None
        c0, c1, c2 = rel.coefficients
        cand = QuadElem(Fraction(-c1, c0), Fraction(-c2, c0), D)
        if max(abs(cand.p.numerator), cand.p.denominator,
               abs(cand.q.numerator), cand.q.denominator) > max_height:
            return None
        if abs(cand.to_mpf() - r) >= tol:
            return None
        return cand
