"""Command-line interface: ``python3 -m bilateral_sums <command> ...``.

Exit codes: 0 success, 2 identification failure, 3 numeric failure, 64 usage
or input error.  With ``--output json`` every numeric field is a decimal
string and every identified constant is {"exact": ..., "decimal": ...}, where
exact is "p/q" for rationals and "(p,q,D)" for p + q*sqrt(D).
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp

from . import analysis, bilateral, relations
from .catalog import SeriesShape, load_catalog, normalize, parse_quad, parse_rational, verify_identity
from .errors import CatalogError, IdentificationError, NumericFailure, PoleError
from .numerics import QuadElem, digits_to_bits, guard_bits

EXIT_OK = 0
EXIT_IDENTIFY = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64

MIN_DIGITS = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class Config:
    digits: int = 100
    catalog_path: Optional[str] = None
    output: str = "text"
    sample_xs: Optional[list] = None

    @property
    def prec(self) -> int:
        """Target binary precision; library routines add their own guard bits."""
        return digits_to_bits(self.digits)

    @property
    def working_prec(self) -> int:
        return self.prec + guard_bits(self.prec)


# -- formatting ----------------------------------------------------------------


def exact_str(v) -> str:
    if isinstance(v, QuadElem):
        if v.is_rational:
            return str(v.p)
        return f"({v.p},{v.q},{v.D})"
    return str(Fraction(v))


def dec(v, digits: int) -> str:
    """Decimal string with ``digits`` significant digits (complex as a+bj)."""
    if isinstance(v, mp.mpc):
        if v.imag == 0:
            return mp.nstr(v.real, digits, min_fixed=-mp.inf, max_fixed=mp.inf)
        return f"{mp.nstr(v.real, digits)}{'+' if v.imag >= 0 else '-'}{mp.nstr(abs(v.imag), digits)}j"
    return mp.nstr(mp.mpf(v), digits)


def const(v, digits: int, prec: int) -> dict:
    with mp.workprec(prec + guard_bits(prec)):
        val = v.to_mpf() if isinstance(v, QuadElem) else mp.mpf(v.numerator) / v.denominator
        return {"exact": exact_str(v), "decimal": dec(val, digits)}


class Report:
    def __init__(self, command: str, cfg: Config):
        self.cfg = cfg
        self.data = {"command": command, "digits": cfg.digits}
        self.lines: list[str] = []

    def put(self, key, value, text: Optional[str] = None):
        self.data[key] = value
        if text is not None:
            self.lines.append(text)

    def text(self, line: str):
        self.lines.append(line)

    def render(self) -> str:
        if self.cfg.output == "json":
            return json.dumps(self.data, indent=2)
        return "\n".join(self.lines)


# -- argument helpers ------------------------------------------------------------


_NAMED = {
    "pi": lambda: mp.pi,
    "pi2": lambda: mp.pi ** 2,
    "e": lambda: mp.e,
    "zeta3": lambda: mp.zeta(3),
    "log2": lambda: mp.log(2),
    "catalan": lambda: mp.catalan,
    "phi": lambda: (11 + 5 * mp.sqrt(5)) / 2,
}


def parse_value(text: str):
    """Decimal literal, rational p/q, a named constant, or sqrt(n).

    Named constants: pi, pi2 (pi^2), e, zeta3, log2, catalan and phi, the
    fifth power of the golden ratio.
    """
    t = text.strip()
    if t in _NAMED:
        return _NAMED[t]()
    m = re.fullmatch(r"sqrt\((\d+)\)", t)
    if m:
        return mp.sqrt(int(m.group(1)))
    if re.fullmatch(r"-?\d+/\d+", t):
        f = Fraction(t)
        return mp.mpf(f.numerator) / f.denominator
    try:
        return mp.mpf(t)
    except (ValueError, TypeError):
        raise UsageError(f"cannot parse value {text!r}") from None


def parse_primes(text: str) -> list[int]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        return relations.primes_between(int(m.group(1)), int(m.group(2)))
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"bad prime list {text!r}; use a..b or p,q,r") from None


def parse_samples(text: str) -> list[Fraction]:
    try:
        return [parse_rational(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"bad sample list {text!r}") from None


def _catalog(cfg: Config):
    try:
        return load_catalog(cfg.catalog_path, verify_numeric=False)
    except OSError as exc:
        raise UsageError(f"cannot read catalog: {exc}") from None


def _record(cfg: Config, rid: str):
    cat = _catalog(cfg)
    if rid not in cat:
        raise UsageError(f"unknown formula id {rid!r}; known: {', '.join(cat)}")
    return cat[rid]


def _fourier_text(fd) -> list[str]:
    lines = [f"u1 = {fd.u1}", f"u2 = {fd.u2}"]
    unit = "i*" if fd.imaginary_sines else ""
    lines += [f"v1 = {unit}{fd.v1}", f"v2 = {unit}{fd.v2}"]
    return lines


def _fourier_json(fd, cfg) -> dict:
    out = {k: const(getattr(fd, k), cfg.digits, cfg.prec) for k in ("u1", "u2", "v1", "v2")}
    out["imaginary_sines"] = fd.imaginary_sines
    out["family"] = fd.family
    if fd.residual is not None:
        out["residual"] = dec(abs(fd.residual), 5)
    return out


# -- commands ------------------------------------------------------------------


def cmd_list(args, cfg, rep):
    rows = []
    for rec in _catalog(cfg).values():
        sh = rec.shape
        shape = f"({sh.s1})" if sh.s2 is None else f"({sh.s1},{sh.s2})"
        rows.append({"id": rec.id, "family": sh.family, "shape": shape, "z": exact_str(rec.z),
                     "R": exact_str(rec.R), "status": rec.status})
        rep.text(f"{rec.id:5s} {sh.family:4s} {shape:12s} z={exact_str(rec.z):24s} {rec.status}")
    rep.put("records", rows)
    return EXIT_OK


def cmd_verify(args, cfg, rep):
    rec = _record(cfg, args.id)
    err = verify_identity(rec, cfg.prec)
    bound = mp.mpf(10) ** (-cfg.digits)
    ok = err < bound
    rep.put("id", rec.id)
    rep.put("abs_error", dec(err, 5))
    rep.put("ok", bool(ok))
    if ok:
        rep.text(f"OK |LHS-RHS| < 1e-{cfg.digits}")
        return EXIT_OK
    rep.text(f"FAIL |LHS-RHS| = {mp.nstr(err, 5)}")
    return EXIT_NUMERIC


def cmd_bilateral(args, cfg, rep):
    rec = _record(cfg, args.id)
    x = parse_value(args.x) if not re.fullmatch(r"-?\d+/\d+", args.x) else parse_rational(args.x)
    with mp.workprec(cfg.working_prec):
        bv = bilateral.eval_f(rec, x, cfg.prec)
        for key in ("forward", "backward", "prefactor", "f_of_x"):
            v = getattr(bv, key)
            rep.put(key, dec(v, cfg.digits), f"{key} = {dec(v, cfg.digits)}")
        rep.put("x", args.x)
    return EXIT_OK


def cmd_fourier(args, cfg, rep):
    rec = _record(cfg, args.id)
    samples = cfg.sample_xs or bilateral.DEFAULT_SAMPLES
    fd = bilateral.solve_fourier(rec, samples, cfg.prec)
    rep.put("id", rec.id)
    rep.put("fourier", _fourier_json(fd, cfg))
    for line in _fourier_text(fd):
        rep.text(line)
    rep.text(f"held-out residual = {dec(abs(fd.residual), 5)}")
    return EXIT_OK


def cmd_discover(args, cfg, rep):
    try:
        s1 = parse_rational(args.s1)
        s2 = parse_rational(args.s2)
        z = parse_quad(args.z)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    shape = SeriesShape("PI2", s1, s2)
    try:
        shape.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    d = bilateral.discover(shape, z, cfg.sample_xs, cfg.prec)
    if not d.identified:
        rep.put("numeric", [dec(v, cfg.digits) for v in d.numeric])
        raise IdentificationError("a, b, c or the Fourier data could not be identified")
    names = ("a", "b", "c")
    rep.put("normalized", {n: const(v, cfg.digits, cfg.prec) for n, v in zip(names, (d.a, d.b, d.c))})
    rep.put("primitive", {n: const(v, cfg.digits, cfg.prec) for n, v in zip(names, d.primitive)})
    rep.put("scale", const(d.scale, cfg.digits, cfg.prec))
    rep.put("fourier", _fourier_json(d.fourier, cfg))
    for n, v in zip(names, d.primitive):
        rep.text(f"{n} = {v.pretty()}")
    rep.text(f"sum = {d.scale.pretty()}/pi^2 for these weights")
    for line in _fourier_text(d.fourier):
        rep.text(line)
    return EXIT_OK


def cmd_mirror(args, cfg, rep):
    rec = _record(cfg, args.id)
    md = analysis.mirror(rec, cfg.prec)
    with mp.workprec(cfg.working_prec):
        for key in ("p1", "p2", "p3", "p4", "t", "q", "k", "j"):
            v = getattr(md, key)
            rep.put(key, dec(v, cfg.digits), f"{key} = {dec(v, cfg.digits)}")
        if md.k_exact is not None:
            rep.put("k_exact", const(md.k_exact, cfg.digits, cfg.prec), f"k ~ {md.k_exact}")
        if md.j_exact is not None:
            rep.put("j_exact", const(md.j_exact, cfg.digits, cfg.prec), f"j ~ {md.j_exact}")
        if isinstance(md.tau, QuadElem):
            rep.put("tau", const(md.tau, cfg.digits, cfg.prec), f"tau = {md.tau.pretty()}")
        else:
            rep.put("tau", dec(md.tau, cfg.digits), f"tau = {dec(md.tau, cfg.digits)}")
    return EXIT_OK


def cmd_derive(args, cfg, rep):
    rec = _record(cfg, args.id)
    samples = cfg.sample_xs or bilateral.DEFAULT_SAMPLES
    fd = bilateral.solve_fourier(rec, samples, cfg.prec)
    ds = analysis.limit_series(rec, fd, args.sj, cfg.prec)
    with mp.workprec(cfg.working_prec):
        rep.put("upper", [str(s) for s in ds.upper])
        rep.put("lower", [str(s) for s in ds.lower])
        rep.put("weight", [const(w, cfg.digits, cfg.prec) for w in ds.weight])
        rep.put("z_prime", const(ds.z_prime, cfg.digits, cfg.prec))
        rep.put("convergent", ds.convergent)
        rep.put("rhs", dec(ds.rhs, cfg.digits))
        rep.text("sum_n prod (" + ", ".join(str(s) for s in ds.upper) + ")_n / prod ("
                 + ", ".join(str(s) for s in ds.lower) + ")_n * W(n) * z'^n")
        rep.text("W(n) = " + " + ".join(f"({w.pretty()})*n^{i}" for i, w in enumerate(ds.weight)))
        rep.text(f"z' = {ds.z_prime.pretty()}" + ("" if ds.convergent else "  (|z'| > 1: formal)"))
        if ds.rhs_exact is None:
            rep.text(f"rhs = {dec(ds.rhs, cfg.digits)} (not identified)")
            raise IdentificationError("right-hand constant not identified")
        rep.put("rhs_exact", {"value": const(ds.rhs_exact, cfg.digits, cfg.prec),
                              "pi_power": ds.rhs_pi_power, "square_root": ds.rhs_squared})
        rep.text(f"rhs = {ds.describe()} = {dec(ds.rhs, cfg.digits)}")
    return EXIT_OK


def cmd_upside(args, cfg, rep):
    rec = _record(cfg, args.id)
    try:
        v = analysis.upside_down_of(rec, cfg.prec)
    except NumericFailure:
        raise
    rep.put("id", rec.id)
    rep.put("value", dec(v, cfg.digits), f"upside-down sum = {dec(v, cfg.digits)}")
    return EXIT_OK


def cmd_congruence(args, cfg, rep):
    rec = _record(cfg, args.id)
    primes = parse_primes(args.primes)
    rows = []
    for p in primes:
        r = relations.check_supercongruence(rec, p, args.exponent)
        row = {"p": p, "applicable": r.applicable}
        if r.applicable:
            val = "inf" if r.valuation == math.inf else int(r.valuation)
            row.update({"valuation": val, "holds": r.holds})
            rep.text(f"p={p:4d}  v_p(S_p - A p^{args.exponent}) = {val}  {'ok' if r.holds else 'no'}")
        else:
            row["reason"] = r.reason
            rep.text(f"p={p:4d}  inapplicable: {r.reason}")
        rows.append(row)
    rep.put("id", rec.id)
    rep.put("exponent", args.exponent)
    rep.put("primes", rows)
    return EXIT_OK


def cmd_identify(args, cfg, rep):
    with mp.workprec(cfg.working_prec):
        vals = [parse_value(v) for v in args.values]
        rel = relations.pslq(vals, cfg.prec, args.max_coeff)
        if rel is None:
            rep.text("no relation within the coefficient bound")
            raise IdentificationError("no integer relation found")
        rep.put("coefficients", [str(c) for c in rel.coefficients])
        rep.put("residual", dec(rel.residual, 5))
        rep.text("relation: " + " ".join(f"{c:+d}*[{v}]" for c, v in zip(rel.coefficients, args.values)) + " = 0")
        rep.text(f"residual = {dec(rel.residual, 5)}")
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--digits", type=int, default=100, help="decimal digits (>= 20)")
    common.add_argument("--output", choices=("text", "json"), default="text")
    common.add_argument("--catalog", default=None, help="catalog file (else $BILATERAL_CATALOG or the shipped file)")
    common.add_argument("--samples", default=None, help="comma-separated rational sample points")

    parser = _Parser(prog="bilateral_sums", description="Bilateral sums for Ramanujan-like series")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("list", parents=[common], help="list catalog records")
    p.set_defaults(func=cmd_list)
    p = sub.add_parser("verify", parents=[common], help="check a series against its constant")
    p.add_argument("id")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("bilateral", parents=[common], help="evaluate f(x)")
    p.add_argument("id")
    p.add_argument("--x", required=True)
    p.set_defaults(func=cmd_bilateral)
    p = sub.add_parser("fourier", parents=[common], help="solve for the Fourier coefficients")
    p.add_argument("id")
    p.set_defaults(func=cmd_fourier)
    p = sub.add_parser("discover", parents=[common], help="find a, b, c from z and the shape")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.add_argument("--z", required=True, help="rational or q(p,q,D)")
    p.set_defaults(func=cmd_discover)
    p = sub.add_parser("mirror", parents=[common], help="mirror-map quantities t, q, k, j, tau")
    p.add_argument("id")
    p.set_defaults(func=cmd_mirror)
    p = sub.add_parser("derive", parents=[common], help="derived series from x -> -s_j")
    p.add_argument("id")
    p.add_argument("--sj", type=int, required=True, help="index j of s_j in (1/2, s1, s2, 1-s1, 1-s2)")
    p.set_defaults(func=cmd_derive)
    p = sub.add_parser("upside", parents=[common], help="evaluate the upside-down companion series")
    p.add_argument("id")
    p.set_defaults(func=cmd_upside)
    p = sub.add_parser("congruence", parents=[common], help="supercongruence valuations")
    p.add_argument("id")
    p.add_argument("--primes", default="7..101")
    p.add_argument("--exponent", type=int, default=3, help="main term A*p^exponent")
    p.set_defaults(func=cmd_congruence)
    p = sub.add_parser("identify", parents=[common], help="integer relation among values")
    p.add_argument("--values", nargs="+", required=True)
    p.add_argument("--max-coeff", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_identify)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.digits < MIN_DIGITS:
            raise UsageError(f"--digits must be at least {MIN_DIGITS}")
        cfg = Config(args.digits, args.catalog, args.output,
                     parse_samples(args.samples) if args.samples else None)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    rep = Report(args.command, cfg)
    code = EXIT_OK
    try:
        code = args.func(args, cfg, rep)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except CatalogError as exc:
        print(f"catalog error: {exc}", file=stderr)
        return EXIT_USAGE
    except IdentificationError as exc:
        rep.put("error", str(exc))
        code = EXIT_IDENTIFY
    except (NumericFailure, PoleError, ZeroDivisionError) as exc:
        rep.put("error", f"{type(exc).__name__}: {exc}")
        rep.text(f"numeric failure: {exc}")
        code = EXIT_NUMERIC
    rep.put("exit_code", code)
    print(rep.render(), file=stdout)
    return code


def main() -> None:
    sys.exit(run())
