from __future__ import annotations

from collections import defaultdict

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rookstat.errors import AttackViolationError, DomainError
from rookstat.rook_board import (
    Mark,
    RookPlacement,
    Square,
    board_squares,
    classify_pair,
    decode,
    encode,
    enum_placements,
    has_attack,
)
from rookstat.stirling_exact import CyclePermutation, Model, SetPartition, stirling


def placement(n, *squares):
    return RookPlacement(n, tuple(Square(i, j) for i, j in squares))


def test_board_squares():
    assert board_squares(2) == [Square(1, 2)]
    assert board_squares(3) == [Square(1, 2), Square(1, 3), Square(2, 3)]
    assert len(board_squares(6)) == 15


@pytest.mark.parametrize(
    "a, b, marks",
    [
        ((2, 4), (4, 6), {Mark.RC}),
        ((1, 3), (1, 5), {Mark.RR}),
        ((2, 5), (2, 5), {Mark.RR, Mark.CC}),
        ((4, 6), (2, 4), {Mark.CR}),
        ((1, 2), (3, 4), set()),
    ],
)
def test_classify_pair(a, b, marks):
    assert classify_pair(Square(*a), Square(*b)) == frozenset(marks)


squares = st.integers(min_value=2, max_value=9).flatmap(
    lambda n: st.sampled_from(board_squares(n))
)


@given(squares, squares)
def test_classify_pair_swaps_alignment_marks(a, b):
    swap = {Mark.RR: Mark.RR, Mark.CC: Mark.CC, Mark.RC: Mark.CR, Mark.CR: Mark.RC}
    assert classify_pair(b, a) == frozenset(swap[m] for m in classify_pair(a, b))


def test_attack_rules():
    assert has_attack(placement(6, (1, 3), (2, 3)), Model.PARTITION)
    assert not has_attack(placement(6, (2, 4), (2, 5)), Model.PERMUTATION)
    assert has_attack(placement(6, (2, 4), (2, 5)), Model.PARTITION)
    assert has_attack(placement(6, (1, 4), (3, 4)), Model.PERMUTATION)


def test_decode_examples():
    assert decode(placement(6), Model.PARTITION) == SetPartition.singletons(6)
    assert decode(placement(6, (2, 4), (4, 5)), Model.PARTITION) == SetPartition(6, ((1,), (2, 4, 5), (3,), (6,)))
    assert decode(placement(6, (2, 4)), Model.PERMUTATION) == CyclePermutation(6, ((2, 4), (1,), (3,), (5,), (6,)))
    assert str(decode(placement(5, (2, 4), (2, 5)), Model.PERMUTATION)) == "(1)(2 4 5)(3)"
    assert str(decode(placement(5, (2, 4), (4, 5)), Model.PERMUTATION)) == "(1)(2 5 4)(3)"


def test_decode_rejects_attacks():
    with pytest.raises(AttackViolationError):
        decode(placement(4, (1, 3), (2, 3)), Model.PERMUTATION)


def test_encode_examples():
    assert encode(SetPartition.parse("1 3 6|2|4|5")) == placement(6, (1, 3), (3, 6))
    assert encode(CyclePermutation.identity(5)) == placement(5)
    assert encode(CyclePermutation.parse("(1 3 2)")) == placement(3, (1, 2), (2, 3))


def test_encode_model_mismatch():
    with pytest.raises(DomainError):
        encode(SetPartition.singletons(3), Model.PERMUTATION)


def test_placement_validation_and_text():
    with pytest.raises(DomainError):
        placement(4, (3, 2))
    with pytest.raises(DomainError):
        placement(4, (1, 5))
    text = "6;(1,3),(3,6)"
    assert str(RookPlacement.parse(text)) == text
    with pytest.raises(DomainError):
        RookPlacement.parse("6;(1,3),junk")


@pytest.mark.parametrize("model", list(Model))
def test_placement_counts_match_stirling(model):
    for n in range(1, 8):
        for r in range(0, n):
            assert sum(1 for _ in enum_placements(n, r, model)) == stirling(model.kind, n, n - r)


def test_no_placement_beyond_n_minus_one_rooks():
    assert list(enum_placements(4, 4, Model.PERMUTATION)) == []


@pytest.mark.parametrize("model", list(Model))
def test_decode_is_a_bijection_onto_structures(model):
    n = 6
    for r in range(0, n):
        images = [decode(p, model) for p in enum_placements(n, r, model)]
        assert len(set(images)) == len(images)
        assert all(s.k == n - r for s in images)


@st.composite
def set_partitions(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    labels = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    blocks = defaultdict(list)
    for element, label in enumerate(labels, start=1):
        blocks[label].append(element)
    return SetPartition(n, tuple(tuple(b) for b in blocks.values()))


@st.composite
def cycle_permutations(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    image = draw(st.permutations(range(1, n + 1)))
    return CyclePermutation.from_successor(n, dict(zip(range(1, n + 1), image)))


@given(set_partitions())
def test_partition_round_trip(partition):
    rooks = encode(partition)
    assert rooks.r == partition.n - partition.k
    assert not has_attack(rooks, Model.PARTITION)
    assert decode(rooks, Model.PARTITION) == partition


@given(cycle_permutations())
def test_permutation_round_trip(perm):
    rooks = encode(perm)
    assert rooks.r == perm.n - perm.k
    assert not has_attack(rooks, Model.PERMUTATION)
    assert decode(rooks, Model.PERMUTATION) == perm
