from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import CapExceededError, DomainError
from .laws import FiniteLaw

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 12


class Kind(str, Enum):
    FIRST = "first"
    SECOND = "second"


class Model(str, Enum):
    PARTITION = "partition"
    PERMUTATION = "permutation"

    @property
    def kind(self) -> Kind:
        return Kind.SECOND if self is Model.PARTITION else Kind.FIRST


@dataclass(frozen=True, order=True)
class SpectrumVector:
    """Component-size profile (D1, D2, ...); trailing zeros are dropped."""

    counts: Tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise DomainError(f"spectrum entries must be non-negative: {counts}")
        while counts and counts[-1] == 0:
            counts = counts[:-1]
        object.__setattr__(self, "counts", counts)

    @classmethod
    def of(cls, *counts: int) -> "SpectrumVector":
        return cls(tuple(counts))

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "SpectrumVector":
        tally = Counter(sizes)
        longest = max(tally, default=0)
        return cls(tuple(tally.get(i, 0) for i in range(1, longest + 1)))

    @classmethod
    def parse(cls, text: str) -> "SpectrumVector":
        try:
            return cls(tuple(int(part) for part in text.strip().split(":") if part != ""))
        except ValueError as exc:
            raise DomainError(f"malformed spectrum {text!r}") from exc

    def __getitem__(self, size: int) -> int:
        if size < 1:
            raise IndexError(size)
        return self.counts[size - 1] if size <= len(self.counts) else 0

    @property
    def blocks(self) -> int:
        return sum(self.counts)

    @property
    def total(self) -> int:
        return sum(i * c for i, c in enumerate(self.counts, start=1))

    @property
    def largest(self) -> int:
        return len(self.counts)

    def render(self) -> str:
        return ":".join(str(c) for c in self.counts)

    def __str__(self) -> str:
        return self.render()


SpectrumLaw = FiniteLaw


@dataclass(frozen=True)
class SetPartition:
    n: int
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        if any(not b for b in blocks):
            raise DomainError("set partition blocks must be non-empty")
        elements = [x for b in blocks for x in b]
        if sorted(elements) != list(range(1, self.n + 1)):
            raise DomainError(f"blocks {blocks} do not partition 1..{self.n}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def parse(cls, text: str) -> "SetPartition":
        try:
            blocks = [tuple(int(x) for x in part.split()) for part in text.strip().split("|")]
        except ValueError as exc:
            raise DomainError(f"malformed set partition {text!r}") from exc
        n = sum(len(b) for b in blocks)
        return cls(n, tuple(blocks))

    @classmethod
    def singletons(cls, n: int) -> "SetPartition":
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    @property
    def k(self) -> int:
        return len(self.blocks)

    def spectrum(self) -> SpectrumVector:
        return SpectrumVector.from_sizes(len(b) for b in self.blocks)

    def __str__(self) -> str:
        return "|".join(" ".join(str(x) for x in b) for b in self.blocks)


def _rotate_to_min(cycle: Tuple[int, ...]) -> Tuple[int, ...]:
    i = cycle.index(min(cycle))
    return cycle[i:] + cycle[:i]


@dataclass(frozen=True)
class CyclePermutation:
    n: int
    cycles: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if any(not c for c in self.cycles):
            raise DomainError("cycles must be non-empty")
        cycles = tuple(sorted((_rotate_to_min(tuple(c)) for c in self.cycles), key=lambda c: c[0]))
        elements = [x for c in cycles for x in c]
        if sorted(elements) != list(range(1, self.n + 1)):
            raise DomainError(f"cycles {cycles} do not cover 1..{self.n} exactly once")
        object.__setattr__(self, "cycles", cycles)

    @classmethod
    def identity(cls, n: int) -> "CyclePermutation":
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def from_successor(cls, n: int, successor: Mapping[int, int]) -> "CyclePermutation":
        seen = set()
        cycles: List[Tuple[int, ...]] = []
        for start in range(1, n + 1):
            if start in seen:
                continue
            cycle = []
            x = start
            while x not in seen:
                seen.add(x)
                cycle.append(x)
                x = successor[x]
            if x != start:
                raise DomainError("successor map is not a permutation")
            cycles.append(tuple(cycle))
        return cls(n, tuple(cycles))

    @classmethod
    def parse(cls, text: str) -> "CyclePermutation":
        body = text.strip()
        if not body.startswith("(") or not body.endswith(")"):
            raise DomainError(f"malformed cycle notation {text!r}")
        try:
            cycles = [tuple(int(x) for x in part.split()) for part in body[1:-1].split(")(")]
        except ValueError as exc:
            raise DomainError(f"malformed cycle notation {text!r}") from exc
        n = sum(len(c) for c in cycles)
        return cls(n, tuple(cycles))

    @property
    def k(self) -> int:
        return len(self.cycles)

    def successor(self) -> Dict[int, int]:
        sigma: Dict[int, int] = {}
        for cycle in self.cycles:
            for i, x in enumerate(cycle):
                sigma[x] = cycle[(i + 1) % len(cycle)]
        return sigma

    def spectrum(self) -> SpectrumVector:
        return SpectrumVector.from_sizes(len(c) for c in self.cycles)

    def __str__(self) -> str:
        return "".join("(" + " ".join(str(x) for x in c) + ")" for c in self.cycles)


Structure = Union[SetPartition, CyclePermutation]


@lru_cache(maxsize=8192)
def _stirling(kind: Kind, n: int, k: int) -> int:
    if k > n or (k == 0 and n != 0):
        return 0
    r = n - k
    # diagonal sweep: diag[j] holds the value at (j + d, j) for the current d
    diag = [1] * (k + 1)
    for d in range(1, r + 1):
        nxt = [0] * (k + 1)
        for j in range(1, k + 1):
            coef = j if kind is Kind.SECOND else j + d - 1
            nxt[j] = coef * diag[j] + nxt[j - 1]
        diag = nxt
    return diag[k]


def stirling(kind: Union[Kind, str], n: int, k: int) -> int:
    """S(n, k) for ``kind="second"``, unsigned s(n, k) for ``kind="first"``."""
    if n < 0 or k < 0:
        raise DomainError(f"Stirling numbers need non-negative arguments, got n={n}, k={k}")
    return _stirling(Kind(kind), n, k)


@lru_cache(maxsize=256)
def stirling_row(kind: Union[Kind, str], n: int) -> Tuple[int, ...]:
    kind = Kind(kind)
    row = [1]
    for m in range(1, n + 1):
        prev = row + [0]
        row = [0] * (m + 1)
        for j in range(1, m + 1):
            coef = j if kind is Kind.SECOND else m - 1
            row[j] = coef * prev[j] + prev[j - 1]
    return tuple(row)


def _check_cap(n: int, cap: Optional[int]) -> None:
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if n > cap:
        raise CapExceededError("enumeration", n, cap)


def _partitions(n: int, k: int) -> Iterator[SetPartition]:
    blocks: List[List[int]] = []

    def place(m: int) -> Iterator[SetPartition]:
        if m > n:
            yield SetPartition(n, tuple(tuple(b) for b in blocks))
            return
        remaining = n - m
        if len(blocks) + remaining >= k:
            for block in blocks:
                block.append(m)
                yield from place(m + 1)
                block.pop()
        if len(blocks) < k:
            blocks.append([m])
            yield from place(m + 1)
            blocks.pop()

    return place(1)


def _permutations(n: int, k: int) -> Iterator[CyclePermutation]:
    succ: Dict[int, int] = {}

    def place(m: int, cycles: int) -> Iterator[CyclePermutation]:
        if m > n:
            yield CyclePermutation.from_successor(n, succ)
            return
        remaining = n - m
        if cycles + remaining >= k:
            for x in range(1, m):
                succ[m] = succ[x]
                succ[x] = m
                yield from place(m + 1, cycles)
                succ[x] = succ[m]
                del succ[m]
        if cycles < k:
            succ[m] = m
            yield from place(m + 1, cycles + 1)
            del succ[m]

    return place(1, 0)


def enum_structures(model: Union[Model, str], n: int, k: int, *, cap: Optional[int] = None) -> Iterator[Structure]:
    model = Model(model)
    _check_cap(n, cap)
    if n < 1 or k < 1 or k > n:
        return iter(())
    logger.debug("Enumerating %s structures for n=%s k=%s", model.value, n, k)
    if model is Model.PARTITION:
        return _partitions(n, k)
    return _permutations(n, k)


def bell(n: int, *, cap: Optional[int] = None) -> int:
    """Bell number by enumeration (independent of the recurrences)."""
    return sum(1 for k in range(1, n + 1) for _ in enum_structures(Model.PARTITION, n, k, cap=cap))


def exact_spectrum_law(model: Union[Model, str], n: int, k: int, *, cap: Optional[int] = None) -> SpectrumLaw:
    model = Model(model)
    _check_cap(n, cap)
    if n < 1 or not 1 <= k <= n:
        raise DomainError(f"no {model.value} of {n} elements has {k} components")
    counts = Counter(s.spectrum() for s in enum_structures(model, n, k, cap=cap))
    logger.debug("Exact %s spectrum law n=%s k=%s over %s structures", model.value, n, k, sum(counts.values()))
    return FiniteLaw.from_counts(counts)
