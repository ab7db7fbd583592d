"""
Recovering a series from its argument
=====================================

Given only the hypergeometric shape and z, the bilateral function is a
combination of three unknown functions of x weighted by a, b, c.  Requiring it
to be a trigonometric polynomial fixes a : b : c, and the constant then
follows from the Fourier data.

Run with ``python3 demos/02_discovery.py``.
"""

from fractions import Fraction

import mpmath as mp

from bilateral_sums import SeriesShape, discover, QuadElem

HALF = Fraction(1, 2)

for label, z in (("z = -1/4", QuadElem(Fraction(-1, 4))), ("z = -4", QuadElem(-4))):
    res = discover(SeriesShape("PI2", HALF, HALF), z, prec=200)
    a, b, c = res.primitive
    print(f"{label}:  weight {a.pretty()} + {b.pretty()} n + {c.pretty()} n^2")
    print(f"    sum = {res.scale.pretty()}/pi^2")
    print(f"    Fourier: u1 = {res.fourier.u1}, u2 = {res.fourier.u2}")

# the second case lies outside |z| < 1 and is only defined by continuation;
# the series and its bilateral function still single out integer weights.
