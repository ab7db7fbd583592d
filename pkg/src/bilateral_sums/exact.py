"""Exact terms of the series at rational (or quadratic) parameters."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .catalog import FormulaRecord
from .numerics import QuadElem

Exact = Union[Fraction, QuadElem]


@dataclass(frozen=True)
class ExactTerm:
    n: int
    value: Exact


def _plain(v: QuadElem) -> Exact:
    return v.p if v.is_rational else v


def exact_terms(rec: FormulaRecord) -> Iterator[ExactTerm]:
    """Terms prod_i (s_i)_n / (1)_n^d * (A + B n + C n^2) * z^n for n = 0, 1, 2, ...

    The hypergeometric part is updated by its rational ratio, never recomputed.
    """
    params = rec.shape.params
    d = len(params)
    z = _plain(rec.z)
    A, B, C = (_plain(v) for v in (rec.A, rec.B, rec.C))
    hz = Fraction(1)
    n = 0
    while True:
        yield ExactTerm(n, hz * (A + B * n + C * n * n))
        num = Fraction(1)
        for s in params:
            num *= s + n
        hz = hz * (num / Fraction(n + 1) ** d) * z
        n += 1


def exact_term(rec: FormulaRecord, n: int) -> Exact:
    if n < 0:
        raise ValueError("n must be non-negative")
    for t in exact_terms(rec):
        if t.n == n:
            return t.value
    raise AssertionError("unreachable")


def exact_partial_sum(rec: FormulaRecord, count: int) -> Exact:
    """Sum of the terms with n < count."""
    total = Fraction(0)
    for t in exact_terms(rec):
        if t.n >= count:
            break
        total = total + t.value
    return total
