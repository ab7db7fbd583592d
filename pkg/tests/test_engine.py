from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from bilateral_sums.catalog import normalize
from bilateral_sums.engine import (
    ContinuationPath, TermRatio, build_annihilator, continue_path, default_path, eval_anywhere,
    sum_direct, theta_sums_direct, theta_values,
)
from bilateral_sums.errors import NonConvergenceError, StepUnderflow
from bilateral_sums.numerics import guard_bits

PREC = 256
G = guard_bits(PREC)
HALF = Fraction(1, 2)


def close(a, b, bits=PREC - 2 * G):
    return abs(a - b) <= mp.ldexp(max(1, abs(b)), -bits)


def base_ratio(rec, x=0):
    params = rec.shape.params
    return TermRatio(tuple(s + x for s in params), tuple(1 + x for _ in params))


def weights(rec):
    return tuple(v.to_mpf() for v in (rec.A, rec.B, rec.C))


# -- direct summation ------------------------------------------------------------


def test_sum_direct_f3_f2(cat):
    with mp.workprec(PREC):
        f3 = sum_direct(base_ratio(cat["f3"]), mp.mpf(-1) / 4, PREC, (1, 8, 20))
        assert close(f3, 8 / mp.pi ** 2)
        assert mp.nstr(f3, 11) == "0.81056946914"
        f2 = sum_direct(base_ratio(cat["f2"]), mp.mpf(1) / 16, PREC, (3, 34, 120))
        assert close(f2, 32 / mp.pi ** 2)


def test_sum_direct_geometric():
    with mp.workprec(PREC):
        assert close(sum_direct(TermRatio((1,), (1,)), mp.mpf(1) / 2, PREC), 2)


def test_sum_direct_outside_disk():
    with pytest.raises(NonConvergenceError):
        sum_direct(TermRatio((1,), (1,)), 2, PREC)


# -- operators ---------------------------------------------------------------------


def test_geometric_operator_and_continuation():
    tr = TermRatio((1,), (1,))
    with mp.workprec(PREC + G):
        op = build_annihilator(tr)
        assert op.order == 1 and op.inhomogeneity == 0
        init = theta_sums_direct(tr, mp.mpf("0.2"), PREC, op.order)
        # z = 0 is a regular singular point of the theta-form operator: go around it
        path = ContinuationPath((mp.mpf("0.2"), mp.mpc(0, "0.3"), mp.mpf("-0.5")))
        y = continue_path(op, init, path, PREC)[0]
        assert close(y, mp.mpf(2) / 3)


def test_gauss_operator_homogeneous():
    tr = TermRatio((Fraction(1, 3), Fraction(2, 5)), (Fraction(3, 7), 1))
    with mp.workprec(PREC):
        op = build_annihilator(tr)
        assert op.order == 2
        assert op.inhomogeneity == 0


def test_f3_shifted_operator_residual(cat):
    x = Fraction(1, 7)
    tr = base_ratio(cat["f3"], x)
    with mp.workprec(PREC + G):
        op = build_annihilator(tr)
        assert op.order == 5
        c0 = tr.first_value()
        assert close(op.inhomogeneity, (mp.mpf(1) / 7) ** 5 * c0)
        coeffs, c = [], c0
        for n in range(60):
            coeffs.append(c)
            c = c * tr.ratio(n)
        out = op.apply_to_polynomial(coeffs)
        assert close(out[0], op.inhomogeneity)
        assert max(abs(v) for v in out[1:60]) < mp.mpf("1e-40")


def test_singular_points_are_0_1_inf(cat):
    with mp.workprec(PREC):
        op = build_annihilator(base_ratio(cat["d5"], Fraction(1, 7)))
        # leading coefficient q_m - z p_m vanishes only at z = 1
        assert close(op.q[-1] / op.p[-1], 1)


def test_2f1_log_continuation():
    tr = TermRatio((1, 1), (2, 1))
    with mp.workprec(PREC + G):
        op = build_annihilator(tr)
        z0 = mp.mpf(1) / 4
        init = theta_sums_direct(tr, z0, PREC, op.order)
        y = continue_path(op, init, ContinuationPath((z0, mp.mpc(0, 1), mp.mpf(-3))), PREC)[0]
        assert close(y, mp.log(4) / 3)
        assert mp.nstr(mp.re(y), 11) == "0.46209812037"


def test_continuation_stops_at_singularity():
    tr = TermRatio((1, 1), (2, 1))
    with mp.workprec(PREC):
        op = build_annihilator(tr)
        init = theta_sums_direct(tr, mp.mpf("0.25"), PREC, op.order)
        with pytest.raises(StepUnderflow):
            continue_path(op, init, ContinuationPath((mp.mpf("0.25"), mp.mpf(1))), PREC)


# -- catalog evaluations ---------------------------------------------------------


def test_d1_combination(cat):
    rec = cat["d1"]
    with mp.workprec(PREC + G):
        v = eval_anywhere(base_ratio(rec), weights(rec), rec.z.to_mpf(), PREC)
        assert close(v, rec.R.to_mpf() / mp.pi ** 2)
        assert mp.nstr(4 / mp.pi ** 2, 11) == "0.40528473457"
        assert rec.R.to_mpf() == 4


@pytest.mark.parametrize("rid, R", [("d2", 16), ("d6", 80)])
def test_divergent_values(cat, rid, R):
    rec = cat[rid]
    with mp.workprec(PREC + G):
        v = eval_anywhere(base_ratio(rec), weights(rec), rec.z.to_mpf(), PREC)
        assert close(v, R / mp.pi ** 2)


@pytest.mark.parametrize("rid", [f"d{i}" for i in range(1, 7)])
def test_divergent_normalized_300_bits(cat, rid):
    rec = cat[rid]
    with mp.workprec(300 + guard_bits(300)):
        w = tuple(v.to_mpf() for v in normalize(rec))
        v = eval_anywhere(base_ratio(rec), w, rec.z.to_mpf(), 300)
        assert abs(v - 1 / mp.pi ** 2) < mp.mpf("1e-50")


def test_f3_normalized(cat):
    rec = cat["f3"]
    with mp.workprec(PREC):
        w = tuple(v.to_mpf() for v in normalize(rec))
        assert close(eval_anywhere(base_ratio(rec), w, mp.mpf(-1) / 4, PREC), 1 / mp.pi ** 2)


# -- invariants --------------------------------------------------------------------


def test_derivative_transport(cat):
    rec = cat["d3"]
    tr = base_ratio(rec)
    prec = 200
    with mp.workprec(prec + guard_bits(prec)):
        z = rec.z.to_mpf()
        th = theta_values(tr, z, prec, 2)
        h = mp.ldexp(1, -prec // 3)
        yp = theta_values(tr, z + h, prec, 1)[0]
        ym = theta_values(tr, z - h, prec, 1)[0]
        fd = z * (yp - ym) / (2 * h)
        assert abs(fd - th[1]) < mp.ldexp(abs(th[1]), -prec // 2)


def test_precision_doubling(cat):
    rec = cat["d4"]
    tr = base_ratio(rec)
    with mp.workprec(2 * PREC):
        hi = eval_anywhere(tr, weights(rec), rec.z.to_mpf(), 2 * PREC)
    with mp.workprec(PREC):
        lo = eval_anywhere(tr, weights(rec), rec.z.to_mpf(), PREC)
        assert close(lo, hi, PREC - G)


def test_default_path_detours_around_cut():
    path = default_path(mp.mpf(16), side=1)
    assert mp.im(path.waypoints[1]) > 0
    assert abs(path.start) <= mp.mpf(1) / 2
    assert default_path(mp.mpf(-36905)).waypoints[0] == mp.mpf(-1) / 4


def test_sides_are_conjugate():
    tr = TermRatio((HALF, HALF), (1, 1))
    with mp.workprec(PREC):
        up = theta_values(tr, mp.mpf(4), PREC, 2, side=1)
        down = theta_values(tr, mp.mpf(4), PREC, 2, side=-1)
        for a, b in zip(up, down):
            assert close(a, mp.conj(b))


@settings(max_examples=15, deadline=None)
@given(zr=st.floats(-0.49, 0.49).filter(lambda v: abs(v) > 0.02),
       x=st.fractions(Fraction(-9, 20), Fraction(9, 20), max_denominator=20))
def test_overlap_consistency(cat, zr, x):
    tr = base_ratio(cat["f4"], x)
    with mp.workprec(PREC + G):
        op = build_annihilator(tr)
        z = mp.mpf(zr)
        z0 = -z / 3
        init = theta_sums_direct(tr, z0, PREC, op.order)
        cont = continue_path(op, init, ContinuationPath((z0, mp.mpc(0, abs(z)), z)), PREC)
        direct = theta_sums_direct(tr, z, PREC, op.order)
        for a, b in zip(cont, direct):
            assert close(a, b)
