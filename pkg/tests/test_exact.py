from fractions import Fraction

import mpmath as mp
import pytest

from bilateral_sums import exact_term, exact_terms
from bilateral_sums.exact import exact_partial_sum
from bilateral_sums.numerics import QuadElem


def test_d6_terms(cat):
    assert exact_term(cat["d6"], 0) == 30
    # (24/1250) * 758 * (-3125/256)
    assert exact_term(cat["d6"], 1) == Fraction(24, 1250) * 758 * Fraction(-3125, 256)
    assert exact_term(cat["d6"], 1) == Fraction(-5685, 32)


@pytest.mark.parametrize("rid", ["f1", "f3", "d5", "r882"])
def test_first_term_is_A(cat, rid):
    t = exact_term(cat[rid], 0)
    assert QuadElem.coerce(t) == cat[rid].A


def test_negative_index_rejected(cat):
    with pytest.raises(ValueError):
        exact_term(cat["f3"], -1)


def _float_term(rec, n, prec):
    with mp.workprec(prec):
        h = mp.mpf(1)
        for s in rec.shape.params:
            h *= mp.rf(mp.mpf(s.numerator) / s.denominator, n)
        h /= mp.factorial(n) ** rec.shape.degree
        w = rec.A.to_mpf() + rec.B.to_mpf() * n + rec.C.to_mpf() * n * n
        return h * w * rec.z.to_mpf() ** n


def test_exact_matches_floating_terms(cat):
    prec = 200
    for rec in cat.values():
        for t in exact_terms(rec):
            if t.n > 50:
                break
            with mp.workprec(prec):
                v = t.value.to_mpf() if isinstance(t.value, QuadElem) else mp.mpf(t.value.numerator) / t.value.denominator
                ref = _float_term(rec, t.n, prec)
                assert abs(v - ref) <= mp.ldexp(abs(ref), -(prec - 90)), (rec.id, t.n)


def test_f3_partial_sums_converge(cat):
    s = exact_partial_sum(cat["f3"], 200)
    with mp.workprec(200):
        v = mp.mpf(s.numerator) / s.denominator
        assert abs(v - 8 / mp.pi ** 2) < mp.mpf("1e-50")


def test_terms_are_reproducible(cat):
    a = [t.value for t, _ in zip(exact_terms(cat["d6"]), range(40))]
    b = [t.value for t, _ in zip(exact_terms(cat["d6"]), range(40))]
    assert [str(v) for v in a] == [str(v) for v in b]
