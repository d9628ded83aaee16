from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterator, Mapping, TypeVar

from .errors import DomainError

K = TypeVar("K", bound=Hashable)
V = TypeVar("V", bound=Hashable)


class FiniteLaw(Mapping[K, Fraction]):
    def __init__(self, masses: Mapping[K, Fraction]) -> None:
        cleaned: Dict[K, Fraction] = {}
        for key, mass in masses.items():
            mass = Fraction(mass)
            if mass < 0:
                raise DomainError(f"negative mass {mass} at {key!r}")
            if mass:
                cleaned[key] = mass
        total = sum(cleaned.values(), Fraction(0))
        if total != 1:
            raise DomainError(f"law has total mass {total}, expected exactly 1")
        self._masses = cleaned

    @classmethod
    def from_counts(cls, counts: Mapping[K, int]) -> "FiniteLaw[K]":
        total = sum(counts.values())
        if total <= 0:
            raise DomainError("cannot normalise an empty count table")
        return cls({key: Fraction(count, total) for key, count in counts.items()})

    def __getitem__(self, key: K) -> Fraction:
        return self._masses[key]

    def __iter__(self) -> Iterator[K]:
        return iter(self._masses)

    def __len__(self) -> int:
        return len(self._masses)

    def __repr__(self) -> str:
        body = ", ".join(f"{key!r}: {mass}" for key, mass in self._masses.items())
        return f"FiniteLaw({{{body}}})"

    def mass(self, key: K) -> Fraction:
        return self._masses.get(key, Fraction(0))

    def probability(self, predicate: Callable[[K], bool]) -> Fraction:
        return sum((m for key, m in self._masses.items() if predicate(key)), Fraction(0))

    def mean(self, fn: Callable[[K], int]) -> Fraction:
        return sum((m * fn(key) for key, m in self._masses.items()), Fraction(0))

    def marginal(self, fn: Callable[[K], V]) -> "FiniteLaw[V]":
        out: Counter = Counter()
        for key, m in self._masses.items():
            out[fn(key)] += m
        return FiniteLaw(out)
