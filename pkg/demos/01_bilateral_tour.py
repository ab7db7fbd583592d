"""
A bilateral tour of one series
==============================

Start from a classical series for 1/pi^2, let the summation index run over
n + x for real x, and watch the resulting function of x.  It turns out to be a
short trigonometric polynomial, and its coefficients are small rationals.

Run with ``python3 demos/01_bilateral_tour.py``.
"""

from fractions import Fraction

import mpmath as mp

from bilateral_sums import eval_f, fourier_rhs, load_catalog, solve_fourier, verify_identity

mp.mp.dps = 40
PREC = 160

catalog = load_catalog()
rec = catalog["f3"]
print(f"record {rec.id}: s = {rec.shape.params}, z = {rec.z.pretty()}")
print(f"  A, B, C = {rec.A.pretty()}, {rec.B.pretty()}, {rec.C.pretty()};  sum = {rec.R.pretty()}/pi^2")

# the one-sided series first
print(f"  |one-sided sum - constant| = {mp.nstr(verify_identity(rec, PREC), 3)}")

# now the bilateral function on a few points of one period
print("\n  x        f(x)")
for x in (Fraction(0), Fraction(1, 10), Fraction(1, 3), Fraction(2, 5), Fraction(4, 3)):
    v = eval_f(rec, x, PREC)
    print(f"  {str(x):6s}  {mp.nstr(mp.re(v.f_of_x), 25)}")

# f takes the value 1/pi^2 at x = 0 and x = 1/3 but not in between; the
# Fourier solve identifies the exact trigonometric polynomial
fd = solve_fourier(rec, prec=PREC)
print(f"\nFourier data: u1 = {fd.u1}, u2 = {fd.u2}, v1 = {fd.v1}, v2 = {fd.v2}")
x = Fraction(1, 10)
print(f"  at x = 1/10 the trig polynomial gives {mp.nstr(fourier_rhs(fd, x), 25)}")

# a record where f(x) genuinely moves
rec = catalog["d3"]
fd = solve_fourier(rec, prec=PREC)
print(f"\nrecord {rec.id}, z = {rec.z.pretty()} (outside the unit disk, so continuation is used)")
print(f"Fourier data: u1 = {fd.u1}, u2 = {fd.u2};  residual {mp.nstr(fd.residual, 3)}")
for x in (Fraction(1, 7), Fraction(2, 7), Fraction(3, 7)):
    lhs = mp.re(eval_f(rec, x, PREC).f_of_x)
    rhs = fourier_rhs(fd, x)
    print(f"  x = {x}:  f(x) = {mp.nstr(lhs, 25)}   |f - trig poly| = {mp.nstr(abs(lhs - rhs), 3)}")
