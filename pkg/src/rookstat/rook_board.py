"""Staircase board B_n, attack predicates and the rook bijections.

A placement of r non-attacking rooks on ``{(i, j): 1 <= i < j <= n}``
corresponds to a set partition of 1..n into n - r blocks (no shared row or
column) or to a permutation with n - r cycles (no shared column).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Set, Tuple, Union

from .errors import AttackViolationError, DomainError
from .stirling_exact import CyclePermutation, Model, SetPartition, Structure

logger = logging.getLogger(__name__)


class Square(NamedTuple):
    row: int
    col: int

    def __str__(self) -> str:
        return f"({self.row},{self.col})"


class Mark(str, Enum):
    RR = "RR"
    CC = "CC"
    RC = "RC"
    CR = "CR"


ALIGNMENT_MARKS = frozenset({Mark.RC, Mark.CR})

_SQUARE_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


@dataclass(frozen=True)
class RookPlacement:
    """Labelled rooks on B_n; rook 1 is ``rooks[0]``."""

    n: int
    rooks: Tuple[Square, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"board size must be positive, got {self.n}")
        rooks = tuple(Square(int(i), int(j)) for i, j in self.rooks)
        for sq in rooks:
            if not 1 <= sq.row < sq.col <= self.n:
                raise DomainError(f"square {sq} is not on the board B_{self.n}")
        object.__setattr__(self, "rooks", rooks)

    @property
    def r(self) -> int:
        return len(self.rooks)

    @classmethod
    def parse(cls, text: str) -> "RookPlacement":
        head, _, body = text.strip().partition(";")
        try:
            n = int(head)
        except ValueError as exc:
            raise DomainError(f"malformed placement {text!r}") from exc
        rooks = [Square(int(i), int(j)) for i, j in _SQUARE_RE.findall(body)]
        if _SQUARE_RE.sub("", body).replace(",", "").strip():
            raise DomainError(f"malformed placement {text!r}")
        return cls(n, tuple(rooks))

    def __str__(self) -> str:
        return f"{self.n};" + ",".join(str(sq) for sq in self.rooks)


def board_squares(n: int) -> List[Square]:
    if n < 1:
        raise DomainError(f"board size must be positive, got {n}")
    return [Square(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def classify_pair(a: Square, b: Square) -> FrozenSet[Mark]:
    """Marks for the ordered pair (a, b), a being the lower-labelled rook."""
    marks = set()
    if a.row == b.row:
        marks.add(Mark.RR)
    if a.col == b.col:
        marks.add(Mark.CC)
    if a.col == b.row:
        marks.add(Mark.RC)
    if a.row == b.col:
        marks.add(Mark.CR)
    return frozenset(marks)


def has_attack(placement: RookPlacement, model: Union[Model, str]) -> bool:
    model = Model(model)
    cols = [sq.col for sq in placement.rooks]
    if len(set(cols)) != len(cols):
        return True
    if model is Model.PARTITION:
        rows = [sq.row for sq in placement.rooks]
        return len(set(rows)) != len(rows)
    return False


def _decode_partition(placement: RookPlacement) -> SetPartition:
    parent = list(range(placement.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in placement.rooks:
        parent[find(j)] = find(i)

    blocks: Dict[int, List[int]] = {}
    for x in range(1, placement.n + 1):
        blocks.setdefault(find(x), []).append(x)
    return SetPartition(placement.n, tuple(tuple(b) for b in blocks.values()))


def _decode_permutation(placement: RookPlacement) -> CyclePermutation:
    sigma = {x: x for x in range(1, placement.n + 1)}
    pred = dict(sigma)
    # rook (i, j) splices j in immediately before i
    for i, j in sorted(placement.rooks, key=lambda sq: sq.col):
        p = pred[i]
        sigma[p] = j
        pred[j] = p
        sigma[j] = i
        pred[i] = j
    return CyclePermutation.from_successor(placement.n, sigma)


def decode(placement: RookPlacement, model: Union[Model, str]) -> Structure:
    model = Model(model)
    if has_attack(placement, model):
        raise AttackViolationError(f"placement {placement} has attacking rooks in the {model.value} model")
    if model is Model.PARTITION:
        return _decode_partition(placement)
    return _decode_permutation(placement)


def _encode_partition(partition: SetPartition) -> RookPlacement:
    rooks = [Square(a, b) for block in partition.blocks for a, b in zip(block, block[1:])]
    return RookPlacement(partition.n, tuple(sorted(rooks)))


def _encode_permutation(perm: CyclePermutation) -> RookPlacement:
    sigma = perm.successor()
    pred = {v: k for k, v in sigma.items()}
    minima = {cycle[0] for cycle in perm.cycles}
    rooks = []
    for j in range(perm.n, 0, -1):
        if j in minima:
            continue
        i = sigma[j]
        rooks.append(Square(i, j))
        p = pred[j]
        sigma[p] = i
        pred[i] = p
    return RookPlacement(perm.n, tuple(sorted(rooks)))


def encode(structure: Structure, model: Union[Model, str, None] = None) -> RookPlacement:
    """Inverse of :func:`decode`; rooks come back sorted row-major."""
    if model is None:
        model = Model.PARTITION if isinstance(structure, SetPartition) else Model.PERMUTATION
    model = Model(model)
    if model is Model.PARTITION:
        if not isinstance(structure, SetPartition):
            raise DomainError("partition model encodes SetPartition values only")
        return _encode_partition(structure)
    if not isinstance(structure, CyclePermutation):
        raise DomainError("permutation model encodes CyclePermutation values only")
    return _encode_permutation(structure)


def enum_placements(n: int, r: int, model: Union[Model, str]) -> Iterator[RookPlacement]:
    """All unlabelled non-attacking r-rook placements, rooks in row-major order."""
    model = Model(model)
    squares = board_squares(n)
    chosen: List[Square] = []
    used_rows: Set[int] = set()
    used_cols: Set[int] = set()

    def extend(start: int) -> Iterator[RookPlacement]:
        if len(chosen) == r:
            yield RookPlacement(n, tuple(chosen))
            return
        for idx in range(start, len(squares) - (r - len(chosen)) + 1):
            sq = squares[idx]
            if sq.col in used_cols:
                continue
            if model is Model.PARTITION and sq.row in used_rows:
                continue
            chosen.append(sq)
            used_cols.add(sq.col)
            used_rows.add(sq.row)
            yield from extend(idx + 1)
            chosen.pop()
            used_cols.discard(sq.col)
            if not any(c.row == sq.row for c in chosen):
                used_rows.discard(sq.row)

    if r < 0:
        raise DomainError(f"rook count must be non-negative, got {r}")
    logger.debug("Enumerating %s placements of %s rooks on B_%s", model.value, r, n)
    return extend(0)

