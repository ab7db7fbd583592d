"""Cached heavy computations shared across test modules."""

from fractions import Fraction
from functools import lru_cache

from bilateral_sums import load_catalog, solve_fourier
from bilateral_sums.numerics import digits_to_bits

PREC100 = digits_to_bits(100)
# solving samples disjoint from {1/7, 2/7, 3/7}
SOLVE_SAMPLES = tuple(Fraction(k, 13) for k in range(1, 7))
HELD_OUT = (Fraction(1, 7), Fraction(2, 7), Fraction(3, 7))


@lru_cache(maxsize=None)
def catalog():
    return load_catalog(verify_numeric=False)


@lru_cache(maxsize=None)
def fourier(rid, prec=PREC100, samples=SOLVE_SAMPLES):
    return solve_fourier(catalog()[rid], samples, prec)
