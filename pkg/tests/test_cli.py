import io
import json
import subprocess
import sys
from fractions import Fraction

import mpmath as mp
import pytest

from bilateral_sums.cli import EXIT_IDENTIFY, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, _ = call(*argv, "--output", "json")
    return code, json.loads(out)


def exact_value(c, prec):
    """Rebuild a {"exact": ...} constant as an mpf."""
    s = c["exact"]
    if s.startswith("("):
        p, q, d = (Fraction(v) for v in s.strip("()").split(","))
        return mp.mpf(p.numerator) / p.denominator + mp.mpf(q.numerator) / q.denominator * mp.sqrt(int(d))
    f = Fraction(s)
    return mp.mpf(f.numerator) / f.denominator


def test_verify_text():
    code, out, _ = call("verify", "f3", "--digits", "120")
    assert code == EXIT_OK
    assert "OK |LHS-RHS| < 1e-120" in out


def test_fourier_d5_json():
    code, rep = call_json("fourier", "d5", "--digits", "60")
    assert code == EXIT_OK and rep["exit_code"] == 0
    fd = rep["fourier"]
    assert fd["u1"]["exact"] == "17/36" and fd["u2"]["exact"] == "3/16"
    assert fd["v1"]["exact"] == "0" and fd["imaginary_sines"] is False


def test_mirror_f9_text():
    code, out, _ = call("mirror", "f9", "--digits", "60")
    assert code == EXIT_OK
    assert "t = 3.6194033967309285221408600424532859049" in out
    assert "k ~ 8/3" in out


def test_json_constants_round_trip():
    code, rep = call_json("discover", "--s1", "1/2", "--s2", "1/2", "--z=-1/4", "--digits", "50")
    assert code == EXIT_OK
    with mp.workprec(200):
        for group in ("normalized", "primitive"):
            for c in rep[group].values():
                assert abs(exact_value(c, 200) - mp.mpf(c["decimal"])) < mp.mpf("1e-45")
    assert rep["primitive"]["a"]["exact"] == "1"


def test_congruence_json():
    code, rep = call_json("congruence", "d6", "--primes", "5..13", "--digits", "20")
    assert code == EXIT_OK
    rows = {r["p"]: r for r in rep["primes"]}
    assert rows[5]["applicable"] is False and "reason" in rows[5]
    assert rows[7]["valuation"] == 2 and rows[7]["holds"] is False


def test_identify():
    code, out, _ = call("identify", "--values", "1", "pi", "--digits", "40", "--max-coeff", "100")
    assert code == EXIT_IDENTIFY
    code, rep = call_json("identify", "--values", "1", "sqrt(5)", "phi", "--digits", "40")
    assert code == EXIT_OK
    assert sorted(abs(int(c)) for c in rep["coefficients"]) == [2, 5, 11]


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("verify", "f3", "--digits", "10"),
    ("verify", "nope"),
    ("bilateral", "f3"),
])
def test_usage_errors(argv):
    code, _, err = call(*argv)
    assert code == EXIT_USAGE and err


def test_pole_is_numeric_failure():
    code, rep = call_json("bilateral", "d3", "--x", "1/2", "--digits", "30")
    assert code == EXIT_NUMERIC and rep["exit_code"] == EXIT_NUMERIC
    assert "error" in rep


def test_deterministic_output():
    a = call("fourier", "f3", "--digits", "40", "--output", "json")
    b = call("fourier", "f3", "--digits", "40", "--output", "json")
    assert a == b


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "bilateral_sums", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "d5" in proc.stdout


def test_verify_json_fields():
    code, rep = call_json("verify", "f1", "--digits", "40")
    assert code == EXIT_OK and rep["ok"] is True and "error" not in rep
    assert float(rep["abs_error"]) < 1e-40
