from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rookstat.errors import CapExceededError, DomainError
from rookstat.stirling_exact import (
    CyclePermutation,
    Kind,
    Model,
    SetPartition,
    SpectrumVector,
    bell,
    enum_structures,
    exact_spectrum_law,
    stirling,
    stirling_row,
)


@pytest.mark.parametrize(
    "kind, n, k, expected",
    [
        ("second", 4, 2, 7),
        ("first", 4, 2, 11),
        ("second", 8, 5, 1050),
        ("first", 10, 7, 9450),
        ("second", 10, 7, 5880),
        ("first", 5, 6, 0),
        ("second", 0, 0, 1),
        ("second", 5, 0, 0),
    ],
)
def test_known_values(kind, n, k, expected):
    assert stirling(kind, n, k) == expected


@given(st.integers(min_value=0, max_value=30))
def test_diagonal_is_one(n):
    assert stirling(Kind.SECOND, n, n) == 1
    assert stirling(Kind.FIRST, n, n) == 1


@given(st.integers(min_value=2, max_value=60))
def test_one_rook_counts_board_squares(n):
    assert stirling(Kind.SECOND, n, n - 1) == math.comb(n, 2)
    assert stirling(Kind.FIRST, n, n - 1) == math.comb(n, 2)


@given(st.integers(min_value=1, max_value=40), st.integers(min_value=1, max_value=40))
def test_recurrences(n, k):
    assert stirling(Kind.SECOND, n, k) == k * stirling(Kind.SECOND, n - 1, k) + stirling(Kind.SECOND, n - 1, k - 1)
    assert stirling(Kind.FIRST, n, k) == (n - 1) * stirling(Kind.FIRST, n - 1, k) + stirling(Kind.FIRST, n - 1, k - 1)


@given(st.integers(min_value=0, max_value=25))
def test_rows_match_pointwise_values(n):
    for kind in Kind:
        assert stirling_row(kind, n) == tuple(stirling(kind, n, k) for k in range(n + 1))


def test_first_kind_row_sums_to_factorial():
    for n in range(0, 15):
        assert sum(stirling_row(Kind.FIRST, n)) == math.factorial(n)


def test_large_values_stay_exact():
    value = stirling(Kind.SECOND, 400, 380)
    assert isinstance(value, int)
    assert value == 380 * stirling(Kind.SECOND, 399, 380) + stirling(Kind.SECOND, 399, 379)


def test_negative_arguments_rejected():
    with pytest.raises(DomainError):
        stirling(Kind.SECOND, -1, 0)


@pytest.mark.parametrize("model", list(Model))
def test_enumeration_matches_recurrence(model):
    for n in range(1, 8):
        for k in range(0, n + 2):
            assert sum(1 for _ in enum_structures(model, n, k)) == stirling(model.kind, n, k)


def test_enumerated_structures_are_distinct():
    seen = list(enum_structures(Model.PERMUTATION, 6, 3))
    assert len(seen) == len(set(seen)) == stirling(Kind.FIRST, 6, 3)


def test_small_partitions_by_hand():
    got = {str(s) for s in enum_structures(Model.PARTITION, 3, 2)}
    assert got == {"1 2|3", "1 3|2", "1|2 3"}


def test_small_permutations_by_hand():
    got = {str(s) for s in enum_structures(Model.PERMUTATION, 3, 2)}
    assert got == {"(1 2)(3)", "(1 3)(2)", "(1)(2 3)"}


def test_enumeration_empty_when_k_exceeds_n():
    assert list(enum_structures(Model.PARTITION, 3, 4)) == []


def test_enumeration_cap():
    with pytest.raises(CapExceededError):
        list(enum_structures(Model.PARTITION, 13, 2))
    assert sum(1 for _ in enum_structures(Model.PARTITION, 13, 12, cap=13)) == math.comb(13, 2)


def test_bell_numbers():
    assert [bell(n) for n in range(1, 8)] == [1, 2, 5, 15, 52, 203, 877]


def test_spectrum_law_point_mass():
    law = exact_spectrum_law(Model.PARTITION, 3, 2)
    assert dict(law) == {SpectrumVector.of(1, 1): Fraction(1)}
    assert dict(exact_spectrum_law(Model.PARTITION, 5, 5)) == {SpectrumVector.of(5): Fraction(1)}


def test_permutation_spectrum_law():
    law = exact_spectrum_law(Model.PERMUTATION, 4, 2)
    assert dict(law) == {SpectrumVector.of(1, 0, 1): Fraction(8, 11), SpectrumVector.of(0, 2): Fraction(3, 11)}


def test_partition_spectrum_law_n8_k5():
    law = exact_spectrum_law(Model.PARTITION, 8, 5)
    assert law.mass(SpectrumVector.of(2, 3)) == Fraction(420, 1050)
    assert law.mass(SpectrumVector.of(3, 1, 1)) == Fraction(560, 1050)
    assert law.mass(SpectrumVector.of(4, 0, 0, 1)) == Fraction(70, 1050)


def test_spectrum_law_rejects_bad_k():
    with pytest.raises(DomainError):
        exact_spectrum_law(Model.PARTITION, 4, 0)


@given(st.lists(st.integers(min_value=0, max_value=6), max_size=8))
def test_spectrum_vector_render_parse(counts):
    vector = SpectrumVector(tuple(counts))
    assert SpectrumVector.parse(vector.render()) == vector
    assert not vector.counts or vector.counts[-1] != 0


def test_spectrum_vector_indexing():
    vector = SpectrumVector.from_sizes([3, 1, 1, 2])
    assert vector.counts == (2, 1, 1)
    assert (vector[1], vector[2], vector[3], vector[9]) == (2, 1, 1, 0)
    assert vector.blocks == 4 and vector.total == 7 and vector.largest == 3


def test_spectrum_vector_rejects_negative():
    with pytest.raises(DomainError):
        SpectrumVector.of(1, -1)


def test_structure_parsing_canonicalises():
    assert SetPartition.parse("6 3 1|2|5|4") == SetPartition.parse("1 3 6|2|4|5")
    assert CyclePermutation.parse("(2 1 3)") == CyclePermutation.parse("(1 3 2)")
    assert str(CyclePermutation.parse("(3)(2 1)")) == "(1 2)(3)"


def test_structure_validation():
    with pytest.raises(DomainError):
        SetPartition(3, ((1, 2),))
    with pytest.raises(DomainError):
        CyclePermutation(3, ((1, 2), (2, 3)))
