"""Summation of hypergeometric-type series and their analytic continuation.

A series sum_n c_n z^n with c_{n+1} Q(n) = c_n P(n) satisfies the
inhomogeneous Euler-operator equation

    Q(theta - 1) F - z P(theta) F = Q(-1) c_0,      theta = z d/dz,

whose only finite singular points are z = 0 and z = 1.  Outside the disk
|z| <= 1/2 the sum is obtained by transporting (F, theta F, ...) from a
base point along a polygonal path with local Taylor expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .errors import NonConvergenceError, PrecisionExhausted, StepUnderflow
from .numerics import guard_bits

# -- polynomial helpers (ascending coefficient lists) -------------------------


def poly_from_roots(shifts) -> list:
    """Coefficients of prod_k (n + shifts[k])."""
    out = [mp.mpf(1)]
    for a in shifts:
        nxt = [mp.mpf(0)] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i] += c * a
            nxt[i + 1] += c
        out = nxt
    return out


def poly_eval(coeffs, n):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


def poly_taylor_shift(coeffs, s) -> list:
    """Coefficients of p(n + s) given those of p(n)."""
    out = list(coeffs)
    d = len(out)
    for i in range(d):
        for k in range(d - 2, i - 1, -1):
            out[k] += s * out[k + 1]
    return out


def poly_mul(a, b) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def affine_weight(coeffs, shift, sign=1) -> list:
    """Rewrite w(t) at t = sign*n + shift as a polynomial in n."""
    out = poly_taylor_shift(list(coeffs), shift)
    return [c * sign ** k for k, c in enumerate(out)]


def _stirling2(kmax: int) -> list[list[int]]:
    S = [[0] * (kmax + 1) for _ in range(kmax + 1)]
    S[0][0] = 1
    for k in range(1, kmax + 1):
        for j in range(1, k + 1):
            S[k][j] = j * S[k - 1][j] + S[k - 1][j - 1]
    return S


def _num(v):
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    if hasattr(v, "to_mpf"):
        return v.to_mpf()
    return mp.mpmathify(v)


# -- domain types ---------------------------------------------------------------


@dataclass(frozen=True)
class TermRatio:
    """c_{n+1}/c_n = P(n)/Q(n) with P(n) = prod(n + a_i), Q(n) = prod(n + b_i).

    Rational shifts are kept exact and converted at the precision in force
    when the ratio is used, so a TermRatio can be built outside workprec.
    """

    upper: tuple
    lower: tuple
    first_term: object = 1
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))
        if len(self.upper) != len(self.lower):
            raise ValueError("P and Q must have equal degree")
        if len(self.upper) > 7:
            raise ValueError("degree above 7 is not supported")
        for b in self.lower:
            b = _num(b)
            if mp.im(b) == 0 and mp.re(b) <= 0 and mp.re(b) == mp.floor(mp.re(b)):
                raise ValueError("Q has a non-negative integer root")

    def shifts(self) -> tuple:
        """(upper, lower) as mp numbers at the current precision."""
        prec = mp.mp.prec
        got = self._cache.get(prec)
        if got is None:
            got = (tuple(_num(a) for a in self.upper), tuple(_num(b) for b in self.lower))
            self._cache[prec] = got
        return got

    def first_value(self):
        return _num(self.first_term)

    @property
    def P(self) -> list:
        return poly_from_roots(self.shifts()[0])

    @property
    def Q(self) -> list:
        return poly_from_roots(self.shifts()[1])

    @property
    def degree(self) -> int:
        return len(self.upper)

    def ratio(self, n):
        num = mp.mpf(1)
        den = mp.mpf(1)
        for a, b in zip(*self.shifts()):
            num *= n + a
            den *= n + b
        return num / den


@dataclass(frozen=True)
class HoloOperator:
    """sum_k (q_k - z p_k) theta^k  applied to F equals ``inhomogeneity``."""

    q: tuple
    p: tuple
    inhomogeneity: object = 0

    @property
    def order(self) -> int:
        return len(self.q) - 1

    def raise_order(self, r: int) -> "HoloOperator":
        """theta^r composed with this operator (homogeneous for r >= 1)."""
        if r <= 0:
            return self
        q = [mp.mpf(0)] * r + list(self.q)
        p = list(self.p)
        for _ in range(r):
            p = poly_mul(p, [1, 1])  # theta^r o z = z (theta + 1)^r
        return HoloOperator(tuple(q), tuple(p), 0)

    def apply_to_polynomial(self, coeffs) -> list:
        """Coefficients of L applied to sum_n coeffs[n] z^n (without the constant)."""
        N = len(coeffs)
        out = [0] * (N + 1)
        for n, c in enumerate(coeffs):
            out[n] += c * poly_eval(self.q, n)
            out[n + 1] -= c * poly_eval(self.p, n)
        return out


@dataclass(frozen=True)
class ContinuationPath:
    waypoints: tuple
    radius_fraction: float = 0.5

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def target(self):
        return self.waypoints[-1]


# -- direct summation ----------------------------------------------------------


def _stop_scale(terms_abs):
    return max(terms_abs) if terms_abs else 0


def theta_sums_direct(tr: TermRatio, z, prec: int, count: int, max_terms: int = 1_000_000) -> list:
    """[sum c_n n^k z^n for k < count] by direct summation (|z| < 1)."""
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        z = mp.mpmathify(z)
        if abs(z) >= 1:
            raise NonConvergenceError(f"|z| = {mp.nstr(abs(z), 8)} >= 1; direct summation diverges")
        eps = mp.ldexp(1, -wp)
        sums = [mp.mpf(0)] * count
        term = tr.first_value()
        scale = mp.mpf(0)
        for n in range(max_terms):
            powk = term
            big = abs(term) * max(1, n) ** max(count - 1, 0)
            for k in range(count):
                sums[k] += powk
                powk *= n
            scale = max(scale, big)
            r = abs(tr.ratio(n) * z)
            if big <= eps * scale and r < 1:
                # geometric majorant of the tail
                if big * (1 + 1 / (1 - r)) <= eps * scale or term == 0:
                    return sums
            term = term * tr.ratio(n) * z
            if term == 0:
                return sums
        raise NonConvergenceError("direct summation did not converge")


def sum_direct(tr: TermRatio, z, prec: int, weight=(1,)):
    """sum_{n>=0} c_n W(n) z^n for |z| < 1, W given by ascending coefficients."""
    vals = theta_sums_direct(tr, z, prec, len(weight))
    with mp.workprec(prec + guard_bits(prec)):
        return mp.fsum(mp.mpmathify(w) * v for w, v in zip(weight, vals))


# -- operator construction -----------------------------------------------------


def build_annihilator(tr: TermRatio) -> HoloOperator:
    """theta-form operator with constant inhomogeneity, coefficients at the current precision."""
    P, Q = tr.P, tr.Q
    if all(c == 0 for c in P) or all(c == 0 for c in Q):
        raise ValueError("degenerate term ratio")
    q = poly_taylor_shift(Q, -1)
    # Q(-1) from the roots, so that a lower parameter 1 gives an exact zero
    q_at = mp.mpf(1)
    for b in tr.shifts()[1]:
        q_at *= b - 1
    inhom = q_at * tr.first_value()
    return HoloOperator(tuple(q), tuple(P), inhom)


# -- Taylor stepping ------------------------------------------------------------


def theta_to_derivs(theta_vec, z) -> list:
    """Convert (theta^k F) to scaled derivatives f_j = F^(j)(z)/j!."""
    m = len(theta_vec)
    S = _stirling2(m)
    f = []
    for k in range(m):
        acc = theta_vec[k]
        zp = 1
        for j in range(k):
            acc -= S[k][j] * zp * math.factorial(j) * f[j]
            zp *= z
        # zp == z**k here
        f.append(acc / (zp * math.factorial(k)))
    return f


def derivs_to_theta(f, z) -> list:
    m = len(f)
    S = _stirling2(m)
    out = []
    for k in range(m):
        acc = 0
        zp = 1
        for j in range(k + 1):
            acc += S[k][j] * zp * math.factorial(j) * f[j]
            zp *= z
        out.append(acc)
    return out


class _Stepper:
    def __init__(self, op: HoloOperator, wp: int):
        m = op.order
        self.m = m
        self.wp = wp
        S = _stirling2(m)
        # A_j(z) = Qj z^j - Pj z^(j+1)
        self.Qj = [sum(S[k][j] * op.q[k] for k in range(j, m + 1)) for j in range(m + 1)]
        self.Pj = [sum(S[k][j] * op.p[k] for k in range(j, m + 1)) for j in range(m + 1)]
        self.inhom = op.inhomogeneity

    def _local_coeffs(self, c, h):
        """Scaled coefficients a_{j,l} h^(l-j) of A_j(c + h s)."""
        entries = []
        for j in range(self.m + 1):
            for l in range(j + 2):
                a = 0
                if l <= j:
                    a += self.Qj[j] * math.comb(j, l) * c ** (j - l)
                a -= self.Pj[j] * math.comb(j + 1, l) * c ** (j + 1 - l)
                if a != 0:
                    entries.append((j, l, a * h ** (l - j)))
        return entries

    def step(self, c, h, f):
        """Transport scaled derivatives f (at c) to c + h."""
        m = self.m
        eps = mp.ldexp(1, -self.wp)
        entries = self._local_coeffs(c, h)
        lead = None
        others = []
        for j, l, a in entries:
            if j == m and l == 0:
                lead = a
            else:
                others.append((j, l, a))
        if lead is None or lead == 0:
            raise StepUnderflow("expansion point is singular")
        g = [f[k] * h ** k for k in range(m)]
        scale = max([abs(x) for x in g] + [mp.mpf(0)])
        max_terms = 40 * self.wp + 200
        N = 0
        while True:
            rhs = self.inhom if N == 0 else 0
            acc = rhs
            for j, l, a in others:
                base = N - l
                if base < 0:
                    continue
                idx = base + j
                ff = 1
                for t in range(base + 1, idx + 1):
                    ff *= t
                acc -= a * ff * g[idx]
            ff = 1
            for t in range(N + 1, N + m + 1):
                ff *= t
            g.append(acc / (lead * ff))
            N += 1
            r = len(g) - 1
            mag = abs(g[r])
            scale = max(scale, mag)
            if r >= m + 16:
                back = abs(g[r - 8])
                if back == 0 and mag == 0:
                    break
                if back != 0:
                    rho = (mag / back) ** (mp.mpf(1) / 8) if mag else mp.mpf(0)
                    if rho < 1:
                        tail = mag * rho / (1 - rho) * (r + 1) ** m
                        if tail < eps * scale and max(abs(x) for x in g[-8:]) * (r + 1) ** m < eps * scale:
                            break
            if N > max_terms:
                raise PrecisionExhausted("Taylor tail bound not met")
        out = []
        for k in range(m):
            acc = mp.fsum(math.comb(r, k) * g[r] for r in range(k, len(g)))
            out.append(acc / h ** k)
        return out


def _nearest_singularity_distance(c):
    return min(abs(c), abs(c - 1))


def continue_path(op: HoloOperator, init, path: ContinuationPath, prec: int) -> list:
    """Transport (F, theta F, ..., theta^(m-1) F) from path.start to path.target."""
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        pts = [mp.mpmathify(p) for p in path.waypoints]
        m = op.order
        if len(init) != m:
            raise ValueError(f"expected {m} initial values, got {len(init)}")
        if m == 0:
            return []
        stepper = _Stepper(op, wp)
        c = pts[0]
        f = theta_to_derivs([mp.mpmathify(v) for v in init], c)
        tiny = mp.ldexp(1, -wp // 2)
        for target in pts[1:]:
            while True:
                d = target - c
                dist = abs(d)
                if dist == 0:
                    break
                rad = _nearest_singularity_distance(c)
                if rad < tiny:
                    raise StepUnderflow("path runs into a singular point")
                maxstep = rad * path.radius_fraction
                h = d if dist <= maxstep else d * (maxstep / dist)
                f = stepper.step(c, h, f)
                c = target if dist <= maxstep else c + h
        return derivs_to_theta(f, c)


def base_point(z):
    """Sign-preserving projection of z to modulus at most 1/4."""
    z = mp.mpmathify(z)
    a = abs(z)
    if a <= mp.mpf(1) / 4:
        return z
    return z / (4 * a)


def default_path(z, side: int = -1) -> ContinuationPath:
    """Straight ray from the base point, detouring below (side=-1) or above 1 for z > 1."""
    z = mp.mpmathify(z)
    z0 = base_point(z)
    if mp.im(z) == 0 and mp.re(z) >= 1:
        if mp.re(z) == 1:
            raise NonConvergenceError("z = 1 is a singular point")
        via = mp.mpc(1, side)
        return ContinuationPath((z0, via, z))
    return ContinuationPath((z0, z))


def theta_values(tr: TermRatio, z, prec: int, count: int, side: int = -1) -> list:
    """[theta^k F(z) for k < count], F = sum c_n z^n continued to z."""
    wp = prec + guard_bits(prec)
    with mp.workprec(wp):
        z = mp.mpmathify(z)
        if z == 0:
            return [tr.first_value()] + [mp.mpf(0)] * (count - 1)
        if abs(z) <= mp.mpf(1) / 2:
            return theta_sums_direct(tr, z, prec, count)
        op = build_annihilator(tr)
        if op.order < count:
            op = op.raise_order(count - op.order)
        path = default_path(z, side)
        init = theta_sums_direct(tr, path.start, prec, op.order)
        vec = continue_path(op, init, path, prec)
        return vec[:count]


def eval_anywhere(tr: TermRatio, weight, z, prec: int, side: int = -1):
    """sum_n c_n W(n) z^n with W(n) = sum_k weight[k] n^k, continued if needed."""
    vals = theta_values(tr, z, prec, len(weight), side)
    with mp.workprec(prec + guard_bits(prec)):
        return mp.fsum(mp.mpmathify(w) * v for w, v in zip(weight, vals))
