"""Expansions at x = 0, the mirror map, tau, derived 1/pi series and upside-down sums.

Throughout, E_k(x) denotes the one-sided sum

    E_k(x) = |z|^x sum_{n>=0} prod_i (s_i)_{n+x}/(1)_{n+x} * (n+x)^k * z^n,

which is the forward half of the bilateral sum with its phase removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import mpmath as mp

from .bilateral import FourierData, forward_parts, fourier_rhs, gamma_factor, minus_z_power, prefactor
from .catalog import FormulaRecord, SeriesShape, normalize
from .engine import TermRatio, affine_weight, eval_anywhere, sum_direct
from .errors import ExtrapolationInstability, NonConvergenceError
from .numerics import QuadElem, guard_bits, polygamma, quad_reconstruct, rationalize, to_mpf

ORDER = 4


def _wp(prec: int) -> int:
    return prec + guard_bits(prec)


# -- x-Taylor coefficients of E_k -------------------------------------------


def _exp_series(logc, order):
    """Coefficients of exp(sum_{r>=1} logc[r] x^r) up to x^order."""
    e = [mp.mpf(1)] + [mp.mpf(0)] * order
    for m in range(1, order + 1):
        e[m] = mp.fsum(r * logc[r] * e[m - r] for r in range(1, m + 1)) / m
    return e


def _series_mul(a, b, order):
    return [mp.fsum(a[i] * b[m - i] for i in range(m + 1)) for m in range(order + 1)]


def _taylor_termwise(shape: SeriesShape, z, prec: int, order: int = ORDER, kmax: int = 2):
    """[x^r] E_k for k <= kmax, r <= order, summing the x-expansion of each term."""
    if order > 5:
        raise ValueError("termwise expansion supports order <= 5")
    z = to_mpf(z)
    if abs(z) >= 1:
        raise NonConvergenceError("termwise expansion needs |z| < 1")
    params = [to_mpf(s) for s in shape.params]
    d = len(params)
    eps = mp.ldexp(1, -mp.mp.prec)
    # D[r] = d^r/dx^r log h(n+x) at x = 0
    D = [mp.mpf(0)] + [mp.fsum(polygamma(r - 1, s, prec) for s in params) - d * polygamma(r - 1, 1, prec)
                       for r in range(1, order + 1)]
    rfact = [math.factorial(r) for r in range(order + 1)]
    acc = [[mp.mpf(0)] * (order + 1) for _ in range(kmax + 1)]
    hz = mp.mpf(1)
    n = 0
    biggest = mp.mpf(0)
    quiet = 0
    while True:
        e = _exp_series([D[r] / rfact[r] for r in range(order + 1)], order)
        for k in range(kmax + 1):
            # (n + x)^k
            poly = [math.comb(k, i) * mp.mpf(n) ** (k - i) for i in range(k + 1)] + [0] * order
            ser = _series_mul(e, poly[:order + 1], order)
            for r in range(order + 1):
                acc[k][r] += hz * ser[r]
        size = abs(hz) * (n + 1) ** kmax * (1 + abs(D[1])) ** order
        biggest = max(biggest, size)
        if size < eps * biggest:
            quiet += 1
            if quiet > 3:
                break
        else:
            quiet = 0
        # advance n -> n+1
        for r in range(1, order + 1):
            sgn = -1 if (r - 1) % 2 else 1
            f = sgn * math.factorial(r - 1)
            D[r] += f * (mp.fsum(1 / (s + n) ** r for s in params) - d / mp.mpf(1 + n) ** r)
        ratio = mp.mpf(1)
        for s in params:
            ratio *= (s + n) / (1 + n)
        hz *= ratio * z
        n += 1
        if n > 100 * mp.mp.prec + 1000:
            raise NonConvergenceError("termwise expansion did not converge")
    # multiply by |z|^x
    lz = mp.log(abs(z))
    zx = [lz ** r / rfact[r] for r in range(order + 1)]
    return [_series_mul(zx, row, order) for row in acc]


@lru_cache(maxsize=None)
def _fd_weights(half: int) -> tuple:
    """Rows W with coefficient r = sum_i W[r][i] f(i) for the interpolant on -half..half."""
    nodes = list(range(-half, half + 1))
    size = len(nodes)
    M = [[Fraction(i) ** r for r in range(size)] + [Fraction(int(j == k)) for j in range(size)]
         for k, i in enumerate(nodes)]
    for col in range(size):
        piv = next(r for r in range(col, size) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(size):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    # M[:, size:] is the inverse of the Vandermonde V[k][r] = i_k^r
    return tuple(tuple(M[r][size + k] for k in range(size)) for r in range(size))


def _phase_free(shape, z, x, node_prec, kmax):
    parts = forward_parts(shape, z, x, node_prec, degree=kmax)
    if z > 0:
        ph = mp.exp(1j * mp.pi * x)
        parts = [p * ph for p in parts]
    return parts


def _taylor_fd(shape: SeriesShape, z, prec: int, order: int = ORDER, kmax: int = 2):
    """[x^r] E_k from a 9-point central interpolant; each node is a separate evaluation."""
    z = to_mpf(z)
    half = 4
    node_prec = prec * 5 // 3 + guard_bits(prec)
    W = _fd_weights(half)
    with mp.workprec(_wp(node_prec)):
        h = mp.ldexp(1, -(prec // 6))
        vals = [_phase_free(shape, z, i * h, node_prec, kmax) for i in range(-half, half + 1)]
        out = []
        for k in range(kmax + 1):
            row = []
            for r in range(order + 1):
                c = mp.fsum(mp.mpf(w.numerator) / w.denominator * v[k] for w, v in zip(W[r], vals))
                row.append(c / h ** r)
            out.append(row)
    return out


def x_taylor(shape: SeriesShape, z, prec: int, method: str = "auto", order: int = ORDER, kmax: int = 2):
    """Coefficients [x^r] E_k(x), k <= kmax, r <= order (list of lists)."""
    if method == "auto":
        method = "termwise" if abs(to_mpf(z)) < 1 else "fd"
    with mp.workprec(_wp(prec)):
        if method == "termwise":
            rows = _taylor_termwise(shape, z, prec, order, kmax)
        elif method == "fd":
            rows = _taylor_fd(shape, z, prec, order, kmax)
        else:
            raise ValueError(f"unknown method {method!r}")
        return [[+v for v in row] for row in rows]


# -- k and j -----------------------------------------------------------------


@dataclass(frozen=True)
class KJExpansion:
    k: object
    j: object
    odd1: object
    odd3: object
    k_exact: Optional[Fraction] = None
    j_exact: Optional[Fraction] = None
    coefficients: tuple = ()

    def __iter__(self):
        return iter((self.k, self.j, self.odd1, self.odd3))


def _real_if_close(v):
    if isinstance(v, mp.mpc) and abs(v.imag) <= mp.ldexp(abs(v), -mp.mp.prec // 2):
        return v.real
    return v


def _kj_from_rows(rec: FormulaRecord, rows, prec: int, max_den: int) -> KJExpansion:
    a, b, c = (v.to_mpf() for v in normalize(rec))
    coef = [_real_if_close(a * rows[0][r] + b * rows[1][r] + c * rows[2][r]) for r in range(ORDER + 1)]
    k = -2 * coef[2]
    j = 24 * coef[4] / mp.pi ** 2
    tol = mp.ldexp(1, -prec // 3)
    ke = rationalize(k, max_den, tol) if not isinstance(k, mp.mpc) else None
    je = rationalize(j, max_den, tol) if not isinstance(j, mp.mpc) else None
    return KJExpansion(k, j, coef[1], coef[3], ke, je, tuple(coef))


def kj_expansion(rec: FormulaRecord, prec: int, method: str = "auto", max_den: int = 10 ** 4) -> KJExpansion:
    """Coefficients of a E_0 + b E_1 + c E_2 = 1/pi^2 - k x^2/2 + j pi^2 x^4/24 + O(x^5).

    Also returns the x^1 and x^3 coefficients, which vanish.
    """
    with mp.workprec(_wp(prec)):
        rows = x_taylor(rec.shape, rec.z.to_mpf(), prec, method)
        return _kj_from_rows(rec, rows, prec, max_den)


# -- mirror map --------------------------------------------------------------


@dataclass(frozen=True)
class MirrorData:
    p1: object
    p2: object
    p3: object
    p4: object
    t: object = None
    q: object = None
    k: object = None
    j: object = None
    tau: object = None
    k_exact: Optional[Fraction] = None
    j_exact: Optional[Fraction] = None


def wronskian_p(rec: FormulaRecord, prec: int, method: str = "auto") -> tuple:
    """(p1, p2, p3, p4): x-coefficients of E_1(0) E_0(x) - E_0(0) E_1(x)."""
    with mp.workprec(_wp(prec)):
        rows = x_taylor(rec.shape, rec.z.to_mpf(), prec, method, kmax=1)
        return _wronskian_from_rows(rows)


def _wronskian_from_rows(rows) -> tuple:
    U0, U1 = rows[0][0], rows[1][0]
    return tuple(_real_if_close(U1 * rows[0][r] - U0 * rows[1][r]) for r in range(1, ORDER + 1))


def _cot2(s):
    return mp.cot(mp.pi * to_mpf(s)) ** 2


def mirror_t_q(p: Sequence, alternating: bool, s1, s2) -> MirrorData:
    """t = -p2/(pi p1), q = -exp(-pi t) (alternating) or exp(-pi t), and k from p4/p2."""
    p1, p2, p3, p4 = p
    if p1 == 0 or p2 == 0:
        raise ZeroDivisionError("p1 and p2 must be non-zero")
    t = -p2 / (mp.pi * p1)
    q = mp.exp(-mp.pi * t)
    if alternating:
        q = -q
    if not abs(q) < 1:
        raise ValueError(f"|q| = {mp.nstr(abs(q), 8)} is not below 1")
    k = 2 * (p4 / (mp.pi ** 2 * p2) - mp.mpf(5) / 3 - _cot2(s1) - _cot2(s2))
    return MirrorData(p1, p2, p3, p4, t, q, k)


def mirror(rec: FormulaRecord, prec: int, method: str = "auto", with_kj: bool = True) -> MirrorData:
    """All mirror quantities of a record: p's, t, q, k (two ways), j and tau."""
    if rec.shape.family != "PI2":
        raise ValueError("the mirror map is defined for the 1/pi^2 family")
    with mp.workprec(_wp(prec)):
        rows = x_taylor(rec.shape, rec.z.to_mpf(), prec, method, kmax=2 if with_kj else 1)
        md = mirror_t_q(_wronskian_from_rows(rows), rec.alternating, rec.shape.s1, rec.shape.s2)
        j = ke = je = None
        if with_kj:
            kj = _kj_from_rows(rec, rows, prec, 10 ** 4)
            j, ke, je = kj.j, kj.k_exact, kj.j_exact
        return MirrorData(md.p1, md.p2, md.p3, md.p4, md.t, md.q, md.k, j, tau_of(rec), ke, je)


# -- tau ---------------------------------------------------------------------


def tau_squared(rec: FormulaRecord) -> QuadElem:
    c = normalize(rec)[2]
    return c * c / (1 - rec.z)


def tau_of(rec: FormulaRecord, prec: int = 256):
    """tau = c / sqrt(1 - z) with c the normalized n^2 coefficient.

    Exact when tau^2 has a square root in the record's field; otherwise the
    numeric value (after a reconstruction attempt).
    """
    c = normalize(rec)[2]
    t2 = tau_squared(rec)
    root = t2.sqrt()
    if root is not None:
        return root if c.to_mpf(64) > 0 else -root
    with mp.workprec(_wp(prec)):
        val = c.to_mpf() / mp.sqrt(1 - rec.z.to_mpf())
        found = quad_reconstruct(val, rec.field_D, 10 ** 6, mp.ldexp(1, -prec // 2))
        return found if found is not None else val


def tau_relation_residual(tau, k, j, s1, s2, prec: int = 256):
    """|tau^2 - (j/12 + k^2/4 + 5k/3 + 1 + C1 C2 + (1 + k)(C1 + C2))| with C = cot^2(pi s)."""
    with mp.workprec(_wp(prec)):
        tau, k, j = (to_mpf(v) for v in (tau, k, j))
        c1, c2 = _cot2(s1), _cot2(s2)
        rhs = j / 12 + k * k / 4 + 5 * k / 3 + 1 + c1 * c2 + (1 + k) * (c1 + c2)
        return +abs(tau * tau - rhs)


# -- derived series ------------------------------------------------------------


@dataclass(frozen=True)
class DerivedSeries:
    """sum_n prod (upper)_n / prod (lower)_n * (w0 + w1 n + w2 n^2) * z'^n = rhs."""

    upper: tuple
    lower: tuple
    weight: tuple
    z_prime: QuadElem
    rhs: object
    rhs_exact: Optional[QuadElem] = None
    rhs_pi_power: Optional[int] = None
    rhs_squared: bool = False
    convergent: bool = True

    def term_ratio(self) -> TermRatio:
        return TermRatio(tuple(self.upper), tuple(self.lower))

    def evaluate(self, prec: int):
        """Value of the series (analytically continued when |z'| > 1)."""
        with mp.workprec(_wp(prec)):
            w = tuple(v.to_mpf() for v in self.weight)
            return eval_anywhere(self.term_ratio(), w, self.z_prime.to_mpf(), prec)

    def rhs_value(self, prec: int):
        """The identified constant, sqrt(S)/pi^e or S/pi^e, at ``prec`` bits."""
        if self.rhs_exact is None:
            return self.rhs
        with mp.workprec(_wp(prec)):
            v = self.rhs_exact.to_mpf()
            if self.rhs_squared:
                v = mp.sqrt(v)
            return v / mp.pi ** self.rhs_pi_power

    def describe(self) -> str:
        if self.rhs_exact is None:
            return mp.nstr(self.rhs, 30)
        s = self.rhs_exact.pretty()
        core = f"sqrt({s})" if self.rhs_squared else f"({s})"
        return f"{core}/pi^{self.rhs_pi_power}"


def _closed_form(rec: FormulaRecord, fd: FourierData, x):
    """fourier_rhs(x) / (prefactor(x) * prod (s_i)_x/(1)_x)."""
    return fourier_rhs(fd, x) / (prefactor(rec.shape, x) * gamma_factor(rec.shape, x, mp.mp.prec))


def _identify_rhs(val, D, prec):
    tol = mp.ldexp(1, -prec // 2)
    if isinstance(val, mp.mpc):
        if abs(val.imag) > tol * max(1, abs(val)):
            return None
        val = val.real
    for e in (1, 2):
        v = val * mp.pi ** e
        for squared in (False, True):
            target = v * v if squared else v
            if squared and v < 0:
                continue
            found = quad_reconstruct(target, D, 10 ** 8, tol * max(1, abs(target)))
            if found is not None:
                return found, e, squared
    return None


def limit_series(rec: FormulaRecord, fd: FourierData, j_index: int, prec: int = 256) -> DerivedSeries:
    """Convergent companion series obtained by letting x -> -s_j in the split identity.

    The series is sum prod (s_j)_n/(s_i+s_j)_n [a + b(-n-s_j) + c(-n-s_j)^2] z^{-n}
    and its value is (-z)^{s_j} times the limit of the closed form, found by
    Richardson extrapolation from x = -s_j + eps, eps in {h, h/2, h/4}.
    """
    params = rec.shape.params
    if not 0 <= j_index < len(params):
        raise ValueError(f"j_index must be in 0..{len(params) - 1}")
    sj = params[j_index]
    a, b, c = normalize(rec)
    weight = (a - b * sj + c * sj * sj, -b + 2 * c * sj, c)
    upper = tuple([sj] * len(params))
    lower = tuple(s + sj for s in params)
    zp = 1 / rec.z
    # the closed form is a 0/0 quotient near -s_j: extra bits absorb the cancellation
    wp = 3 * prec + guard_bits(prec)
    with mp.workprec(wp):
        h = mp.ldexp(1, -(prec // 4))
        x0 = -to_mpf(sj)
        g = [_closed_form(rec, fd, x0 + h / 2 ** i) for i in range(3)]
        r1 = [2 * g[i + 1] - g[i] for i in range(2)]
        r2 = (4 * r1[1] - r1[0]) / 3
        scale = max(1, abs(r2))
        if abs(r1[1] - r1[0]) > mp.ldexp(scale, -(prec // 4)):
            raise ExtrapolationInstability("Richardson estimates disagree")
        value = minus_z_power(rec.z.to_mpf(), -x0) * r2
    with mp.workprec(_wp(prec)):
        value = +_real_if_close(value)
        ident = _identify_rhs(value, rec.field_D, prec)
    convergent = abs(rec.z.to_mpf(64)) > 1
    if ident is None:
        return DerivedSeries(upper, lower, weight, zp, value, convergent=convergent)
    exact, e, squared = ident
    return DerivedSeries(upper, lower, weight, zp, value, exact, e, squared, convergent)


# -- upside-down series ------------------------------------------------------


def upside_down_term_ratio(shape: SeriesShape, z_prime) -> TermRatio:
    """Terms prod (1)_n/(s_i)_n / n^d * z'^n, n >= 1, re-indexed from m = n - 1."""
    params = shape.params
    first = to_mpf(z_prime)
    for s in params:
        first /= to_mpf(s)
    return TermRatio((1,) * len(params), tuple(1 + s for s in params), first)


def upside_down_eval(shape: SeriesShape, weight: Sequence, z_prime, prec: int):
    """sum_{n>=1} prod_i (1)_n/(s_i)_n * W(n)/n^d * z'^n with W given by its coefficients."""
    with mp.workprec(_wp(prec)):
        zp = to_mpf(z_prime)
        if abs(zp) >= 1:
            raise NonConvergenceError("upside-down series needs |z'| < 1")
        w = [to_mpf(v) for v in weight]
        tr = upside_down_term_ratio(shape, zp)
        return +sum_direct(tr, zp, prec, tuple(affine_weight(w, 1, 1)))


def upside_down_of(rec: FormulaRecord, prec: int):
    """Upside-down companion of a record: weight A - B n + C n^2 and z' = 1/z."""
    with mp.workprec(_wp(prec)):
        w = (rec.A.to_mpf(), -rec.B.to_mpf(), rec.C.to_mpf())
        zp = (1 / rec.z).to_mpf()
    return upside_down_eval(rec.shape, w, zp, prec)
