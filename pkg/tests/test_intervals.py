from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import iv

from rookstat.errors import DomainError
from rookstat.intervals import RealInterval, iv_rational, working_precision
from rookstat.laws import FiniteLaw


@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=10**9))
def test_rational_enclosure_is_outward(q):
    with working_precision(96):
        enclosure = RealInterval.from_iv(iv_rational(q))
    assert enclosure.contains(q)
    assert enclosure.width <= abs(q) * Fraction(1, 2**90) + Fraction(1, 2**200)


def test_precision_is_restored():
    before = iv.prec
    with working_precision(128):
        assert iv.prec == 128
    assert iv.prec == before


def test_precision_floor():
    with pytest.raises(DomainError):
        with working_precision(64):
            pass


def test_exp_enclosure_brackets_e():
    with working_precision():
        e = RealInterval.from_iv(iv.exp(iv_rational(1)))
    assert e.certainly_gt(Fraction(27182818, 10**7))
    assert e.certainly_lt(Fraction(27182819, 10**7))
    assert abs(float(e) - 2.718281828459045) < 1e-15


def test_interval_comparisons():
    box = RealInterval(Fraction(1), Fraction(2))
    assert box.certainly_le(2) and not box.certainly_lt(2)
    assert box.certainly_ge(1) and box.certainly_gt(Fraction(1, 2))
    assert box.contains(Fraction(3, 2)) and box.midpoint == Fraction(3, 2)
    with pytest.raises(DomainError):
        RealInterval(Fraction(2), Fraction(1))


def test_finite_law_validation():
    with pytest.raises(DomainError):
        FiniteLaw({"a": Fraction(1, 2)})
    with pytest.raises(DomainError):
        FiniteLaw({"a": Fraction(3, 2), "b": Fraction(-1, 2)})
    with pytest.raises(DomainError):
        FiniteLaw.from_counts({})


def test_finite_law_operations():
    law = FiniteLaw.from_counts({1: 1, 2: 2, 3: 0, 4: 1})
    assert len(law) == 3 and 3 not in law
    assert law.mass(2) == Fraction(1, 2) and law.mass(9) == 0
    assert law.mean(lambda x: x) == Fraction(9, 4)
    assert law.probability(lambda x: x > 1) == Fraction(3, 4)
    assert dict(law.marginal(lambda x: x % 2)) == {1: Fraction(1, 4), 0: Fraction(3, 4)}
