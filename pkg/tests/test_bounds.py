from __future__ import annotations

import logging
import math
from fractions import Fraction

import pytest

from rookstat.bounds import (
    chen_stein_report,
    compare_row,
    compare_table,
    conditional_tail_bound,
    lll_lower,
    point_probability_terms,
    process_tv,
    row_column_pairs,
    sandwich,
    suen_terms,
    suen_upper,
)
from rookstat.errors import DomainError
from rookstat.stirling_exact import Kind, Model, stirling


def test_report_constants_n6_r3():
    report = chen_stein_report(6, 3)
    assert report.p == Fraction(11, 45)
    assert report.q == Fraction(4, 45)
    assert report.b1_a == Fraction(484, 225)
    assert report.b1_a == 2 * math.comb(3, 2) * 3 * 2 * report.p**2


def test_single_rook_has_no_error_terms():
    for n in (2, 7, 50):
        report = chen_stein_report(n, 1)
        terms = [report.b1_a, report.b1_l, report.b1_al, report.b1, report.b2_a, report.b2_l, report.b2_al]
        assert all(t == 0 for t in terms)
        assert report.b2 == 0 and report.d == 0 and report.d_moment == 0


def test_d_at_n100_r10():
    assert abs(float(chen_stein_report(100, 10).d) - 3.139) < 5e-4


def test_b1_parts_add_up_to_closed_form():
    for n in range(2, 80):
        for r in range(0, 15):
            report = chen_stein_report(n, r)
            assert report.b1 == report.b1_display


def test_d_grows_with_rooks():
    for n in (5, 30, 200):
        values = [chen_stein_report(n, r).d for r in range(0, 25)]
        assert values == sorted(values)


def test_rates():
    report = chen_stein_report(400, 20)
    assert report.lambda_r == report.lambda_c == 190 * report.p


def test_row_column_pairs():
    # (1,2) -> 1 on B_2; (1,2), (1,3), (2,3) -> 2 + 4 + 2 on B_3
    assert row_column_pairs(2) == 1
    assert row_column_pairs(3) == 8


def test_report_rejects_small_boards():
    with pytest.raises(DomainError):
        chen_stein_report(1, 0)


def test_point_probability_terms_first_kind():
    terms = point_probability_terms(Kind.FIRST, 10, 3)
    p = chen_stein_report(10, 3).p
    assert terms["rate"] == 3 * p
    assert terms["f1"] == 3 * 3 * p * p
    assert terms["f2"] == Fraction(9, 45)


def test_sandwich_trivial_cases():
    for n in (3, 8, 20):
        sw = sandwich(Kind.FIRST, n, n)
        assert sw.valid and sw.lower.contains(1) and sw.upper.contains(1)
        sw = sandwich(Kind.FIRST, n, n - 1)
        assert sw.valid and sw.lower.contains(math.comb(n, 2)) and sw.upper.contains(math.comb(n, 2))


def test_sandwich_contains_exact_first_kind():
    sw = sandwich(Kind.FIRST, 10, 7)
    assert sw.valid
    assert sw.lower.certainly_le(9450) and sw.upper.certainly_ge(9450)


def test_sandwich_contains_exact_second_kind():
    sw = sandwich(Kind.SECOND, 100, 97)
    exact = stirling(Kind.SECOND, 100, 97)
    assert sw.valid
    assert sw.lower.certainly_le(exact) and sw.upper.certainly_ge(exact)


def test_sandwich_grid():
    for kind in Kind:
        for n in range(2, 31):
            for k in range(1, n + 1):
                sw = sandwich(kind, n, k)
                if sw.valid:
                    exact = stirling(kind, n, k)
                    assert sw.lower.certainly_le(exact) and sw.upper.certainly_ge(exact), (kind, n, k)


def test_lll_trivial_and_invalid_cases():
    low = lll_lower(Kind.FIRST, 9, 9)
    assert low.valid and low.value.contains(1)
    low = lll_lower(Kind.FIRST, 9, 8)
    assert low.valid and low.value.contains(math.comb(9, 2))
    low = lll_lower(Kind.FIRST, 10, 7)
    assert not low.valid and low.value is None
    assert low.details["discriminant"] < 0


def test_lll_second_kind_small_board():
    low = lll_lower(Kind.SECOND, 4, 1)
    assert not low.valid or low.value.certainly_le(1)


def test_lll_is_a_lower_bound_when_valid():
    checked = 0
    for kind in Kind:
        for n in (50, 200, 1000):
            for k in range(n - 6, n + 1):
                low = lll_lower(kind, n, k)
                if low.valid:
                    checked += 1
                    assert low.value.certainly_le(stirling(kind, n, k))
    assert checked > 0


def test_suen_upper_bounds():
    high = suen_upper(Kind.FIRST, 12, 12)
    assert high.valid and high.value.contains(1)
    high = suen_upper(Kind.FIRST, 10, 7)
    assert high.valid and high.value.certainly_ge(9450)
    high = suen_upper(Kind.SECOND, 10, 7)
    assert high.valid and high.value.certainly_ge(5880)
    assert set(high.variants) <= {"display_c2a", "display_c3a"}


def test_suen_terms_second_kind():
    terms = suen_terms(Kind.SECOND, 10, 2)
    p = chen_stein_report(10, 2).p
    assert terms["mu"] == 2 * p
    assert terms["Delta"] == Fraction(1, 45)
    assert terms["delta"] == p


def test_suen_overflow_is_reported_not_raised():
    high = suen_upper(Kind.SECOND, 40, 2)
    assert high.valid
    high = suen_upper(Kind.SECOND, 2000, 1000)
    assert not high.valid and high.value is None


def test_suen_overflow_logs_at_debug(caplog):
    caplog.set_level(logging.DEBUG, logger="rookstat.bounds")
    suen_upper(Kind.SECOND, 2000, 1000)
    levels = [rec.levelno for rec in caplog.records if "not representable" in rec.getMessage()]
    assert levels == [logging.DEBUG]


def test_conditional_tail():
    tail = conditional_tail_bound(Model.PARTITION, 10, 10)
    assert tail.valid and tail.value.contains(0)
    assert not conditional_tail_bound(Model.PARTITION, 900, 870).valid
    tail = conditional_tail_bound(Model.PARTITION, 40000, 39800)
    assert tail.valid
    assert tail.value.certainly_gt(Fraction(24, 1000)) and tail.value.certainly_lt(Fraction(26, 1000))


def test_process_tv_below_d():
    for n, r in ((5, 2), (6, 3)):
        assert process_tv(n, r).certainly_le(chen_stein_report(n, r).d)


def test_compare_without_rooks_is_exact():
    row = compare_row(Kind.FIRST, 50, 50)
    assert row["exact"] == 1
    assert row["rel_err_sandwich_lo"] == row["rel_err_sandwich_hi"] == 0
    assert row["rel_err_lll"] == 0 and row["rel_err_suen"] == 0


def test_compare_table_rows():
    rows = list(compare_table(Kind.FIRST, 1000, range(997, 989, -1)))
    assert [row["r"] for row in rows] == list(range(3, 11))
    for row in rows:
        assert math.isfinite(row["rel_err_sandwich_lo"])
        if row["lll_valid"]:
            assert row["lll_lower"] <= row["exact"]
        if row["suen_valid"]:
            assert row["suen_upper"] >= row["exact"]


def test_compare_size_limit():
    with pytest.raises(DomainError):
        list(compare_table(Kind.SECOND, 3000, [2999], max_n=2000))
