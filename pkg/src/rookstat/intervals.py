"""Directed-rounding real intervals on top of ``mpmath.iv``.

Every bound in :mod:`rookstat.bounds` is assembled from exact rationals and a
handful of transcendental operations (``exp``, ``sqrt``).  The rationals are
enclosed with outward rounding, the transcendental steps run in mpmath's
interval context, and the result is stored as a :class:`RealInterval` whose
endpoints are converted back to exact rationals.  Comparisons against exact
Stirling numbers therefore never trust a float.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from mpmath import iv, libmp

from .errors import DomainError

DEFAULT_PRECISION = 96

Exact = Union[int, Fraction]


@contextmanager
def working_precision(bits: int = DEFAULT_PRECISION) -> Iterator[None]:
    if bits < 80:
        raise DomainError(f"working precision {bits} is below 80 bits")
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def iv_rational(q: Exact):
    q = Fraction(q)
    prec = iv.prec
    lo = libmp.from_rational(q.numerator, q.denominator, prec, libmp.round_floor)
    hi = libmp.from_rational(q.numerator, q.denominator, prec, libmp.round_ceiling)
    return iv.make_mpf((lo, hi))


def _endpoint(raw) -> Fraction:
    try:
        p, q = libmp.to_rational(raw)
    except ValueError as exc:
        raise DomainError(f"interval endpoint is not finite: {exc}") from exc
    return Fraction(int(p), int(q))


@dataclass(frozen=True)
class RealInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value: Exact) -> "RealInterval":
        value = Fraction(value)
        return cls(value, value)

    @classmethod
    def from_iv(cls, x) -> "RealInterval":
        a, b = iv.convert(x)._mpi_
        return cls(_endpoint(a), _endpoint(b))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def certainly_le(self, value: Exact) -> bool:
        return self.hi <= value

    def certainly_ge(self, value: Exact) -> bool:
        return self.lo >= value

    def certainly_lt(self, value: Exact) -> bool:
        return self.hi < value

    def certainly_gt(self, value: Exact) -> bool:
        return self.lo > value

    def contains(self, value: Exact) -> bool:
        return self.lo <= value <= self.hi

    def __float__(self) -> float:
        return float(self.midpoint)

    def __str__(self) -> str:
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"
