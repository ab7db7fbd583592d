"""Bilateral sums f(x) and their terminating Fourier expansions.

For a record with parameters s_i (d of them) and weight w(t) = a + b t + c t^2
the bilateral function is

    f(x) = prod_i (cos(pi x) - cos(pi s_i)) / (1 - cos(pi s_i))
           * sum_{n in Z} (-1)^n prod_i (s_i)_{n+x} / (1)_{n+x} * w(n+x) * (-z)^{n+x}

and it is conjectured to equal a trigonometric polynomial of degree 2 (degree
1 for the 1/pi family) divided by pi^2 (pi).  The n >= 0 half is the forward
sum, the n < 0 half the backward sum; whichever half diverges is replaced by
its analytic continuation.  For z > 0, (-z)^w means exp(w (log z - i pi)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .catalog import FormulaRecord, SeriesShape, normalize
from .engine import TermRatio, theta_values
from .errors import IdentificationError, IllConditioned
from .numerics import PoleError, QuadElem, guard_bits, pochhammer, quad_reconstruct, rationalize, to_mpf

DEFAULT_SAMPLES = tuple(Fraction(k, 7) for k in range(1, 7))


@dataclass(frozen=True)
class FourierData:
    """Coefficients of u1 cos 2pi x + u2 cos 4pi x + (1-u1-u2) + v1 sin 2pi x + v2 sin 4pi x.

    When ``imaginary_sines`` is set the sine coefficients are i*v1 and i*v2.
    The 1/pi family uses only u1 (and v1).
    """

    u1: Fraction
    u2: Fraction = Fraction(0)
    v1: Fraction = Fraction(0)
    v2: Fraction = Fraction(0)
    residual: object = None
    imaginary_sines: bool = False
    family: str = "PI2"

    @property
    def constant(self) -> Fraction:
        return 1 - self.u1 - self.u2


@dataclass(frozen=True)
class BilateralValue:
    x: object
    forward: object
    backward: object
    prefactor: object
    f_of_x: object


@dataclass(frozen=True)
class Discovery:
    a: object
    b: object
    c: object
    fourier: FourierData
    primitive: Optional[tuple] = None
    scale: Optional[QuadElem] = None
    identified: bool = True
    numeric: tuple = field(default=())


# -- small helpers ------------------------------------------------------------


def _wp(prec: int) -> int:
    return prec + guard_bits(prec)


def reduce_x(x):
    """Representative of x modulo 1 in (-1/2, 1/2]."""
    if isinstance(x, Fraction):
        r = x - math.ceil(x - Fraction(1, 2))
        return r
    x = to_mpf(x)
    return x - mp.ceil(x - mp.mpf(1) / 2)


def _check_poles(params, x):
    tiny = mp.ldexp(1, -mp.mp.prec // 2)
    for s in params:
        d = to_mpf(x) - to_mpf(s)
        if abs(d - mp.nint(d)) < tiny:
            raise PoleError(f"x = {mp.nstr(to_mpf(x), 10)} is congruent to a parameter s = {s}")


def prefactor(shape: SeriesShape, x):
    cx = mp.cospi(to_mpf(x))
    out = mp.mpf(1)
    for s in shape.params:
        cs = mp.cospi(to_mpf(s))
        out *= (cx - cs) / (1 - cs)
    return out


def gamma_factor(shape: SeriesShape, x, prec: int):
    """prod_i (s_i)_x / (1)_x."""
    out = mp.mpf(1)
    one = pochhammer(1, x, prec)
    for s in shape.params:
        out *= pochhammer(s, x, prec) / one
    return out


def minus_z_power(z, x):
    """(-z)^x on the branch exp(x (log z - i pi)) for z > 0."""
    z = to_mpf(z)
    x = to_mpf(x)
    if z < 0:
        return (-z) ** x
    return mp.exp(x * (mp.log(z) - 1j * mp.pi))


def _expand_shift(thetas, shift, sign, degree):
    """[sum c_n (sign*n + shift)^k z^n for k <= degree] from theta values."""
    out = []
    for k in range(degree + 1):
        acc = 0
        for i in range(k + 1):
            acc += math.comb(k, i) * shift ** (k - i) * sign ** i * thetas[i]
        out.append(acc)
    return out


def _weights(rec: FormulaRecord):
    return tuple(v.to_mpf() for v in normalize(rec))


# -- the two halves ----------------------------------------------------------


def forward_parts(shape: SeriesShape, z, x, prec: int, degree: int = 2) -> list:
    """[sum_{n>=0} (-1)^n prod (s_i)_{n+x}/(1)_{n+x} (n+x)^k (-z)^{n+x}, k <= degree]."""
    with mp.workprec(_wp(prec)):
        x = to_mpf(x)
        z = to_mpf(z)
        _check_poles(shape.params, x)
        d = shape.degree
        tr = TermRatio(tuple(to_mpf(s) + x for s in shape.params), (1 + x,) * d)
        th = theta_values(tr, z, prec, degree + 1, side=+1)
        base = gamma_factor(shape, x, prec) * minus_z_power(z, x)
        return [base * v for v in _expand_shift(th, x, 1, degree)]


def backward_parts(shape: SeriesShape, z, x, prec: int, degree: int = 2) -> list:
    """[sum_{n>=1} (-1)^n prod (s_i)_{x-n}/(1)_{x-n} (x-n)^k (-z)^{x-n}, k <= degree]."""
    with mp.workprec(_wp(prec)):
        x = to_mpf(x)
        z = to_mpf(z)
        if x == 0:
            return [mp.mpf(0)] * (degree + 1)
        _check_poles(shape.params, x)
        d = shape.degree
        params = [to_mpf(s) for s in shape.params]
        y = 1 / z
        tr = TermRatio((1 - x,) * d, tuple(1 + s - x for s in params))
        th = theta_values(tr, y, prec, degree + 1, side=-1)
        denom = mp.mpf(1)
        for s in params:
            denom *= s - x
        base = gamma_factor(shape, x, prec) * x ** d * minus_z_power(z, x) * (-1) ** d * y / denom
        return [base * v for v in _expand_shift(th, x - 1, -1, degree)]


def forward_sum(rec: FormulaRecord, x, prec: int):
    with mp.workprec(_wp(prec)):
        a, b, c = _weights(rec)
        F = forward_parts(rec.shape, rec.z.to_mpf(), x, prec)
        return a * F[0] + b * F[1] + c * F[2]


def backward_sum(rec: FormulaRecord, x, prec: int):
    with mp.workprec(_wp(prec)):
        a, b, c = _weights(rec)
        B = backward_parts(rec.shape, rec.z.to_mpf(), x, prec)
        return a * B[0] + b * B[1] + c * B[2]


def eval_f(rec: FormulaRecord, x, prec: int) -> BilateralValue:
    """f(x) after reducing x into (-1/2, 1/2]; components exposed."""
    with mp.workprec(_wp(prec)):
        xr = reduce_x(x)
        fw = forward_sum(rec, xr, prec)
        bw = backward_sum(rec, xr, prec)
        pf = prefactor(rec.shape, xr)
        return BilateralValue(xr, fw, bw, pf, pf * (fw + bw))


def fourier_rhs(fd: FourierData, x, prec: Optional[int] = None):
    wp = mp.mp.prec if prec is None else _wp(prec)
    with mp.workprec(wp):
        x = to_mpf(x)
        u1, u2, v1, v2 = (to_mpf(v) for v in (fd.u1, fd.u2, fd.v1, fd.v2))
        if fd.imaginary_sines:
            v1, v2 = 1j * v1, 1j * v2
        val = (u1 * mp.cospi(2 * x) + u2 * mp.cospi(4 * x) + (1 - u1 - u2)
               + v1 * mp.sinpi(2 * x) + v2 * mp.sinpi(4 * x))
        power = 1 if fd.family == "PI" else 2
        return val / mp.pi ** power


# -- solving for the Fourier coefficients ------------------------------------


def _basis(x, family):
    x = to_mpf(x)
    if family == "PI":
        return [mp.cospi(2 * x) - 1, mp.sinpi(2 * x)]
    return [mp.cospi(2 * x) - 1, mp.cospi(4 * x) - 1, mp.sinpi(2 * x), mp.sinpi(4 * x)]


def _lstsq(rows, rhs):
    A = mp.matrix(rows)
    b = mp.matrix(rhs)
    if A.rows < A.cols:
        raise IllConditioned("fewer equations than unknowns")
    # normal equations via QR; reject near rank deficiency
    sol, res = mp.qr_solve(A, b)
    Q, R = mp.qr(A)
    diag = [abs(R[i, i]) for i in range(A.cols)]
    if min(diag) < max(diag) * mp.ldexp(1, -mp.mp.prec // 3):
        raise IllConditioned("least-squares system is rank deficient")
    return [sol[i] for i in range(A.cols)]


def _identify_fraction(val, prec, max_den=10 ** 6):
    return rationalize(val, max_den, mp.ldexp(1, -prec // 2))


def _fourier_numeric(rec: FormulaRecord, xs, prec: int):
    family = rec.shape.family
    rows, re_rhs, im_rhs = [], [], []
    for x in xs:
        fx = eval_f(rec, x, prec).f_of_x
        y = fx * mp.pi ** rec.shape.pi_power - 1
        rows.append(_basis(x, family))
        re_rhs.append(mp.re(y))
        im_rhs.append(mp.im(y))
    re_sol = _lstsq(rows, re_rhs)
    im_sol = _lstsq(rows, im_rhs)
    return re_sol, im_sol


def _to_fourier(rec, re_sol, im_sol, prec) -> Optional[FourierData]:
    family = rec.shape.family
    tol = mp.ldexp(1, -prec // 2)
    n_cos = 1 if family == "PI" else 2
    u = re_sol[:n_cos]
    u_im = im_sol[:n_cos]
    v_re = re_sol[n_cos:]
    v_im = im_sol[n_cos:]
    if any(abs(t) > tol for t in u_im):
        return None
    imaginary = any(abs(t) > tol for t in v_im)
    if imaginary and any(abs(t) > tol for t in v_re):
        return None
    v = v_im if imaginary else v_re
    fr = [_identify_fraction(t, prec) for t in list(u) + list(v)]
    if any(f is None for f in fr):
        return None
    if family == "PI":
        return FourierData(fr[0], Fraction(0), fr[1], Fraction(0), None, imaginary, family)
    return FourierData(fr[0], fr[1], fr[2], fr[3], None, imaginary, family)


def solve_fourier(rec: FormulaRecord, sample_xs: Sequence = DEFAULT_SAMPLES, prec: int = 256,
                  holdout: int = 2) -> FourierData:
    """Fit the trigonometric ansatz to f at the samples and rationalize.

    The last ``holdout`` samples are not used in the fit; the residual reported
    is the largest |f(x) - fourier_rhs(x)| over them.
    """
    xs = list(sample_xs)
    nunk = 2 if rec.shape.family == "PI" else 4
    if len(xs) - holdout < nunk or holdout < 1:
        raise IllConditioned("not enough sample points")
    train, held = xs[:-holdout], xs[-holdout:]
    fd = None
    for p in (prec, 2 * prec):
        with mp.workprec(_wp(p)):
            re_sol, im_sol = _fourier_numeric(rec, train, p)
            fd = _to_fourier(rec, re_sol, im_sol, p)
        if fd is not None:
            prec = p
            break
    if fd is None:
        raise IdentificationError(f"{rec.id}: Fourier coefficients do not look rational")
    with mp.workprec(_wp(prec)):
        res = max(abs(eval_f(rec, x, prec).f_of_x - fourier_rhs(fd, x)) for x in held)
    return FourierData(fd.u1, fd.u2, fd.v1, fd.v2, res, fd.imaginary_sines, fd.family)


# -- discovery ---------------------------------------------------------------


def bilateral_parts(shape: SeriesShape, z, x, prec: int) -> list:
    """prefactor(x) * (forward + backward) for the weights 1, t, t^2."""
    with mp.workprec(_wp(prec)):
        xr = reduce_x(x)
        F = forward_parts(shape, z, xr, prec)
        B = backward_parts(shape, z, xr, prec)
        pf = prefactor(shape, xr)
        return [pf * (f + b) for f, b in zip(F, B)]


def _primitive(triple: Sequence[QuadElem]):
    """Rescale by a rational so all components are coprime integers (c > 0)."""
    D = max(v.D for v in triple)
    if all(v.p == 0 for v in triple) and D > 1:
        triple = [v * QuadElem(0, Fraction(1), D) for v in triple]
    comps = [f for v in triple for f in (v.p, v.q)]
    den = 1
    for f in comps:
        den = den * f.denominator // math.gcd(den, f.denominator)
    ints = [int(f * den) for f in comps]
    g = 0
    for i in ints:
        g = math.gcd(g, i)
    if g == 0:
        return None, None
    scale = Fraction(den, g)
    lead = next(v for v in reversed(list(triple)) if v != QuadElem(0))
    if lead.to_mpf(64) < 0:
        scale = -scale
    out = tuple(v * scale for v in triple)
    return out, scale


def discover(shape: SeriesShape, z: QuadElem, sample_xs: Sequence = None, prec: int = 256,
             full: Optional[bool] = None, max_height: int = 10 ** 6) -> Discovery:
    """Solve for (a, b, c) and the Fourier data from z and the shape alone.

    Unknowns are a, b, c, u1, u2 (and v1, v2 when ``full``; for z > 0 the sine
    coefficients are taken purely imaginary).  The normalization is f(0) = 1/pi^2.
    """
    z = QuadElem.coerce(z)
    zf = z.to_mpf(64)
    if full is None:
        full = zf > 0
    if shape.family != "PI2":
        raise ValueError("discovery is implemented for the 1/pi^2 family")
    nunk = 7 if full else 5
    if sample_xs is None:
        sample_xs = [Fraction(k, 19) for k in range(1, 10)] if full else [Fraction(k, 13) for k in range(1, 7)]
    xs = list(sample_xs)
    if len(xs) < (9 if full else 5):
        raise IllConditioned("not enough sample points")
    wp = _wp(prec)
    with mp.workprec(wp):
        zv = z.to_mpf()
        rows, rhs = [], []
        for x in xs:
            B = bilateral_parts(shape, zv, x, prec)
            xm = to_mpf(reduce_x(x))
            pi2 = mp.pi ** 2
            trig = [-(mp.cospi(2 * xm) - 1) / pi2, -(mp.cospi(4 * xm) - 1) / pi2]
            if full:
                trig += [-1j * mp.sinpi(2 * xm) / pi2, -1j * mp.sinpi(4 * xm) / pi2]
            row = list(B) + trig
            rows.append([mp.re(v) for v in row])
            rhs.append(1 / pi2)
            if full:
                rows.append([mp.im(v) for v in row])
                rhs.append(mp.mpf(0))
        sol = _lstsq(rows, rhs)
        tol = mp.ldexp(1, -prec // 2)
        D = z.D
        exact = [quad_reconstruct(v, D, max_height, tol) for v in sol[:3]]
        fr = [rationalize(v, max_height, tol) for v in sol[3:]]
    numeric = tuple(sol)
    if any(e is None for e in exact) or any(f is None for f in fr):
        fd = FourierData(*(Fraction(0),) * 4, imaginary_sines=full)
        return Discovery(*sol[:3], fd, identified=False, numeric=numeric)
    fr += [Fraction(0)] * (4 - len(fr))
    fd = FourierData(fr[0], fr[1], fr[2], fr[3], None, full and zf > 0)
    prim, scale = _primitive(exact)
    return Discovery(exact[0], exact[1], exact[2], fd, prim,
                     QuadElem(scale) if scale is not None else None, True, numeric)
