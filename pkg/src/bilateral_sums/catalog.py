"""File-backed database of Ramanujan-like series.

The text format is line based::

    formula d3
      family PI2
      s1 1/2
      s2 1/3
      z -27
      A 3
      ...

with quadratic literals written ``q(p,q,D)`` for p + q*sqrt(D).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

import mpmath as mp

from .errors import CatalogError
from .numerics import QuadElem

ADMISSIBLE_COUPLES = [
    (Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 3)),
    (Fraction(1, 2), Fraction(1, 4)), (Fraction(1, 2), Fraction(1, 6)),
    (Fraction(1, 3), Fraction(1, 3)), (Fraction(1, 3), Fraction(1, 4)),
    (Fraction(1, 3), Fraction(1, 6)), (Fraction(1, 4), Fraction(1, 4)),
    (Fraction(1, 4), Fraction(1, 6)), (Fraction(1, 6), Fraction(1, 6)),
    (Fraction(1, 5), Fraction(2, 5)), (Fraction(1, 8), Fraction(3, 8)),
    (Fraction(1, 10), Fraction(3, 10)), (Fraction(1, 12), Fraction(5, 12)),
]

# the three-factor 1/pi family: s1 in {1/2, 1/3, 1/4, 1/6}
ADMISSIBLE_PI = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 6)]

STATUSES = ("proved", "conjectured", "divergent-proved", "divergent-conjectured")
FAMILIES = ("PI2", "PI")
KEYS = ("family", "s1", "s2", "z", "A", "B", "C", "R", "status")

_RATIONAL = r"-?\d+(?:/\d+)?"
_QUAD_RE = re.compile(rf"^q\(({_RATIONAL}),({_RATIONAL}),(\d+)\)$")
_RAT_RE = re.compile(rf"^{_RATIONAL}$")


def parse_rational(text: str) -> Fraction:
    if not _RAT_RE.match(text):
        raise ValueError(f"bad rational literal {text!r}")
    return Fraction(text)


def parse_quad(text: str) -> QuadElem:
    m = _QUAD_RE.match(text)
    if m:
        return QuadElem(Fraction(m.group(1)), Fraction(m.group(2)), int(m.group(3)))
    return QuadElem(parse_rational(text))


def format_rational(f: Fraction) -> str:
    return str(f)


def format_quad(v: QuadElem) -> str:
    if v.q == 0:
        return format_rational(v.p)
    return f"q({v.p},{v.q},{v.D})"


@dataclass(frozen=True)
class SeriesShape:
    family: str
    s1: Fraction
    s2: Optional[Fraction] = None

    @property
    def params(self) -> list[Fraction]:
        """All Pochhammer parameters s_0, s_1, ... (closed under s -> 1 - s)."""
        half = Fraction(1, 2)
        if self.family == "PI":
            return [half, self.s1, 1 - self.s1]
        return [half, self.s1, self.s2, 1 - self.s1, 1 - self.s2]

    @property
    def degree(self) -> int:
        return len(self.params)

    @property
    def pi_power(self) -> int:
        return 1 if self.family == "PI" else 2

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "PI2":
            if self.s2 is None:
                raise ValueError("PI2 shape needs s2")
            if (self.s1, self.s2) not in ADMISSIBLE_COUPLES:
                raise ValueError(f"({self.s1}, {self.s2}) is not an admissible couple")
        else:
            if self.s2 is not None:
                raise ValueError("PI shape takes no s2")
            if self.s1 not in ADMISSIBLE_PI:
                raise ValueError(f"s1={self.s1} is not admissible for the PI family")
        ps = sorted(self.params)
        if ps != sorted(1 - s for s in ps):
            raise ValueError("parameter multiset not closed under s -> 1 - s")


@dataclass(frozen=True)
class FormulaRecord:
    id: str
    shape: SeriesShape
    z: QuadElem
    A: QuadElem
    B: QuadElem
    C: QuadElem
    R: QuadElem
    status: str

    @property
    def divergent(self) -> bool:
        return self.status.startswith("divergent")

    @property
    def alternating(self) -> bool:
        return self.z.to_mpf(64) < 0

    @property
    def field_D(self) -> int:
        return max(v.D for v in (self.z, self.A, self.B, self.C, self.R))

    def z_mpf(self):
        return self.z.to_mpf()

    def abs_z(self):
        return abs(self.z.to_mpf(64))


def normalize(rec: FormulaRecord) -> tuple[QuadElem, QuadElem, QuadElem]:
    """(A, B, C)/R: weights for which the series sums to exactly 1/pi^2 (or 1/pi)."""
    if rec.R == QuadElem(0):
        raise ValueError("R must be non-zero")
    return rec.A / rec.R, rec.B / rec.R, rec.C / rec.R


def _check_record(rec: FormulaRecord) -> None:
    rec.shape.validate()
    az = rec.abs_z()
    if az == 1:
        raise ValueError("|z| = 1")
    if rec.status not in STATUSES:
        raise ValueError(f"unknown status {rec.status!r}")
    if rec.divergent != (az > 1):
        raise ValueError(f"status {rec.status} inconsistent with |z| = {mp.nstr(az, 6)}")
    if rec.R == QuadElem(0):
        raise ValueError("R = 0")


def verify_identity(rec: FormulaRecord, prec: int = 64):
    """|sum - 1/pi^k| for the normalized record (k = 2, or 1 for the PI family)."""
    from .engine import TermRatio, eval_anywhere

    with mp.workprec(prec + 32):
        a, b, c = (v.to_mpf() for v in normalize(rec))
        tr = TermRatio(tuple(rec.shape.params), (1,) * rec.shape.degree)
        val = eval_anywhere(tr, (a, b, c), rec.z.to_mpf(), prec)
        return abs(val - 1 / mp.pi ** rec.shape.pi_power)


def default_catalog_path() -> Path:
    env = os.environ.get("BILATERAL_CATALOG")
    if env:
        return Path(env)
    return Path(str(resources.files("bilateral_sums") / "data" / "formulas.txt"))


def parse_catalog(text: str, verify_numeric: bool = True) -> dict[str, FormulaRecord]:
    records: dict[str, FormulaRecord] = {}
    current: Optional[tuple[str, int, dict]] = None

    def finish():
        if current is None:
            return
        rid, line_no, fields = current
        try:
            family = fields["family"]
            s2 = fields.get("s2")
            shape = SeriesShape(family, parse_rational(fields["s1"]),
                                parse_rational(s2) if s2 is not None else None)
            rec = FormulaRecord(
                rid, shape,
                *(parse_quad(fields[k]) for k in ("z", "A", "B", "C", "R")),
                fields["status"],
            )
            _check_record(rec)
        except KeyError as exc:
            raise CatalogError(f"record {rid} (line {line_no}): missing field {exc.args[0]}") from None
        except ValueError as exc:
            raise CatalogError(f"record {rid} (line {line_no}): {exc}") from None
        if verify_numeric:
            err = verify_identity(rec)
            if not err < mp.mpf(2) ** -40:
                raise CatalogError(f"record {rid}: series does not sum to its constant (error {mp.nstr(err, 5)})")
        if rid in records:
            raise CatalogError(f"record {rid} (line {line_no}): duplicate id")
        records[rid] = rec

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("formula "):
            finish()
            rid = line[len("formula "):].strip()
            if not re.match(r"^\w+$", rid):
                raise CatalogError(f"line {line_no}: bad record id {rid!r}")
            current = (rid, line_no, {})
            continue
        if not line.startswith("  ") or current is None:
            raise CatalogError(f"line {line_no}: unexpected text {line!r}")
        parts = line.strip().split(" ")
        if len(parts) != 2 or parts[0] not in KEYS:
            raise CatalogError(f"line {line_no}: malformed field {line.strip()!r}")
        key, value = parts
        if key in current[2]:
            raise CatalogError(f"line {line_no}: repeated field {key}")
        if key not in ("family", "status"):
            try:
                parse_quad(value)
            except ValueError as exc:
                raise CatalogError(f"line {line_no}: {exc}") from None
        current[2][key] = value
    finish()
    return records


def load_catalog(path=None, verify_numeric: bool = True) -> dict[str, FormulaRecord]:
    """Load and validate the catalog (``path`` defaults to the shipped file)."""
    path = Path(path) if path is not None else default_catalog_path()
    return parse_catalog(path.read_text(encoding="utf-8"), verify_numeric=verify_numeric)


def serialize(records) -> str:
    if isinstance(records, dict):
        records = records.values()
    lines = []
    for rec in records:
        lines.append(f"formula {rec.id}")
        lines.append(f"  family {rec.shape.family}")
        lines.append(f"  s1 {format_rational(rec.shape.s1)}")
        if rec.shape.s2 is not None:
            lines.append(f"  s2 {format_rational(rec.shape.s2)}")
        for key in ("z", "A", "B", "C", "R"):
            lines.append(f"  {key} {format_quad(getattr(rec, key))}")
        lines.append(f"  status {rec.status}")
    return "\n".join(lines) + "\n"
