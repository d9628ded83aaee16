"""The iid rook model: r labelled rooks dropped uniformly on B_n, repeats allowed.

Coincidence statistics count ordered-by-label rook pairs sharing a row (RR),
a column (CC), or an alignment where one rook's column is another's row
(RC / CR).  R1 and R2 count overlapping coincidences and control the event
that a component of size four or more appears.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple, Union

import numpy as np

from .errors import CapExceededError, DomainError
from .laws import FiniteLaw
from .rook_board import ALIGNMENT_MARKS, Mark, RookPlacement, Square, board_squares, classify_pair
from .sharding import run_sharded
from .stirling_exact import Model, stirling

logger = logging.getLogger(__name__)

DEFAULT_PLACEMENT_CAP = 10_000_000
STATISTICS = ("w_rr", "w_cc", "w_rc", "w_cr")


@dataclass(frozen=True, order=True)
class CoincidenceVector:
    w_rr: int
    w_cc: int
    w_rc: int
    w_cr: int
    r1: int = 0
    r2: int = 0

    @property
    def w_l(self) -> int:
        return self.w_rc + self.w_cr

    @property
    def w_p(self) -> int:
        return self.w_rc + self.w_cr + self.w_rr

    @property
    def counts(self) -> Tuple[int, int, int, int]:
        return (self.w_rr, self.w_cc, self.w_rc, self.w_cr)


@dataclass(frozen=True)
class PairProbabilities:
    n: int
    p: Fraction
    q: Fraction
    p2_paper: Fraction
    p2_iid: Fraction


@dataclass
class CoincidenceSummary:
    n: int
    r: int
    samples: int
    means: Dict[str, float] = field(default_factory=dict)
    std_errors: Dict[str, float] = field(default_factory=dict)
    no_attack_partition: float = 0.0
    no_attack_permutation: float = 0.0
    no_attack_partition_se: float = 0.0
    no_attack_permutation_se: float = 0.0


@lru_cache(maxsize=64)
def _square_tables(n: int) -> Tuple[np.ndarray, np.ndarray]:
    squares = board_squares(n)
    rows = np.array([sq.row for sq in squares], dtype=np.int64)
    cols = np.array([sq.col for sq in squares], dtype=np.int64)
    return rows, cols


def sample_iid_placement(n: int, r: int, rng: np.random.Generator) -> RookPlacement:
    if n < 2:
        raise DomainError(f"the board B_{n} has no squares")
    if r < 0:
        raise DomainError(f"rook count must be non-negative, got {r}")
    rows, cols = _square_tables(n)
    idx = rng.integers(0, len(rows), size=r)
    return RookPlacement(n, tuple(Square(int(rows[i]), int(cols[i])) for i in idx))


def coincidence_vector(placement: RookPlacement) -> CoincidenceVector:
    tally: Counter = Counter()
    # (rook pair, mark) items entering R1; alignments alone enter R2
    overlapping: List[Tuple[Tuple[int, int], Mark]] = []
    for a, b in itertools.combinations(range(placement.r), 2):
        for mark in classify_pair(placement.rooks[a], placement.rooks[b]):
            tally[mark] += 1
            if mark is not Mark.CC:
                overlapping.append(((a, b), mark))

    r1 = r2 = 0
    for (pair_x, mark_x), (pair_y, mark_y) in itertools.combinations(overlapping, 2):
        if set(pair_x) & set(pair_y):
            r1 += 1
            if mark_x in ALIGNMENT_MARKS and mark_y in ALIGNMENT_MARKS:
                r2 += 1

    return CoincidenceVector(
        w_rr=tally[Mark.RR],
        w_cc=tally[Mark.CC],
        w_rc=tally[Mark.RC],
        w_cr=tally[Mark.CR],
        r1=r1,
        r2=r2,
    )


def double_alignment_free(vector: CoincidenceVector, model: Union[Model, str]) -> bool:
    """R2 = 0 for partitions, R1 = 0 for permutations."""
    return vector.r2 == 0 if Model(model) is Model.PARTITION else vector.r1 == 0


def merged_pairs(vector: CoincidenceVector, model: Union[Model, str]) -> int:
    """Coincidences that merge two 2-components: W_L (partitions) or W_P (permutations)."""
    return vector.w_l if Model(model) is Model.PARTITION else vector.w_p


@lru_cache(maxsize=1024)
def pair_probabilities(n: int) -> PairProbabilities:
    if n < 2:
        raise DomainError(f"pair probabilities need n >= 2, got {n}")
    big_n = math.comb(n, 2)
    denom = big_n * big_n
    p = Fraction(sum((c - 1) ** 2 for c in range(2, n + 1)), denom)
    q = Fraction(sum((c - 1) * (n - c) for c in range(2, n)), denom)
    pairs = math.comb(big_n, 2)
    # B_2 has a single square, so there are no distinct square pairs
    distinct = Fraction(2 * math.comb(n, 3), pairs) if pairs else Fraction(0)
    p2_paper = distinct + Fraction(1, big_n)
    p2_iid = 2 * p - Fraction(1, big_n)
    return PairProbabilities(n=n, p=p, q=q, p2_paper=p2_paper, p2_iid=p2_iid)


def exhaustive_coincidence_law(n: int, r: int, *, cap: int = DEFAULT_PLACEMENT_CAP) -> FiniteLaw:
    squares = board_squares(n)
    total = len(squares) ** r
    if total > cap:
        raise CapExceededError("placement enumeration", total, cap)
    if not squares:
        raise DomainError(f"the board B_{n} has no squares")
    logger.debug("Enumerating %s labelled placements for n=%s r=%s", total, n, r)
    counts: Counter = Counter()
    for rooks in itertools.product(squares, repeat=r):
        counts[coincidence_vector(RookPlacement(n, rooks))] += 1
    return FiniteLaw.from_counts(counts)


def no_attack_probability(model: Union[Model, str], n: int, r: int) -> Fraction:
    """r! * Stirling(n, n - r) / C(n,2)^r."""
    model = Model(model)
    if r < 0 or r >= n:
        raise DomainError(f"need 0 <= r < n, got r={r}, n={n}")
    return Fraction(math.factorial(r) * stirling(model.kind, n, n - r), math.comb(n, 2) ** r)


def coincidence_batch(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """W statistics for a batch of placements.

    ``rows`` and ``cols`` have shape (samples, r); the result has shape
    (samples, 4) with columns ordered as :data:`STATISTICS`.
    """
    r = rows.shape[1]
    upper = np.triu(np.ones((r, r), dtype=bool), k=1)
    rr = (rows[:, :, None] == rows[:, None, :]) & upper
    cc = (cols[:, :, None] == cols[:, None, :]) & upper
    rc = (cols[:, :, None] == rows[:, None, :]) & upper
    cr = (rows[:, :, None] == cols[:, None, :]) & upper
    return np.stack([m.sum(axis=(1, 2)) for m in (rr, cc, rc, cr)], axis=1).astype(np.int64)


def draw_batch(n: int, r: int, size: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    rows, cols = _square_tables(n)
    idx = rng.integers(0, len(rows), size=(size, r))
    return rows[idx], cols[idx]


def _coincidence_shard(n: int, r: int, batch_size: int):
    def run(count: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        sums = np.zeros(4, dtype=np.float64)
        squares = np.zeros(4, dtype=np.float64)
        free = np.zeros(2, dtype=np.int64)
        remaining = count
        while remaining > 0:
            size = min(batch_size, remaining)
            rows, cols = draw_batch(n, r, size, rng)
            w = coincidence_batch(rows, cols)
            sums += w.sum(axis=0)
            squares += (w.astype(np.float64) ** 2).sum(axis=0)
            free[0] += int(np.count_nonzero(w[:, 0] + w[:, 1] == 0))
            free[1] += int(np.count_nonzero(w[:, 1] == 0))
            remaining -= size
        return {"sums": sums, "squares": squares, "free": free}

    return run


def monte_carlo_coincidence(
    n: int,
    r: int,
    samples: int,
    seed: int,
    shards: int = 1,
    *,
    batch_size: int = 4096,
    max_workers: int = 4,
) -> CoincidenceSummary:
    """Empirical means and no-attack frequencies of the W statistics."""
    if n < 2:
        raise DomainError(f"the board B_{n} has no squares")
    if samples < 1:
        raise DomainError(f"samples must be positive, got {samples}")
    parts = run_sharded(_coincidence_shard(n, r, batch_size), samples, seed, shards, max_workers=max_workers)
    sums = sum(part["sums"] for part in parts)
    squares = sum(part["squares"] for part in parts)
    free = sum(part["free"] for part in parts)

    means = sums / samples
    variances = np.maximum(squares / samples - means**2, 0.0)
    ses = np.sqrt(variances / samples)
    free_rates = free / samples
    free_ses = np.sqrt(free_rates * (1 - free_rates) / samples)
    logger.info("Monte Carlo coincidences n=%s r=%s over %s samples (%s shards)", n, r, samples, shards)
    return CoincidenceSummary(
        n=n,
        r=r,
        samples=samples,
        means={name: float(m) for name, m in zip(STATISTICS, means)},
        std_errors={name: float(s) for name, s in zip(STATISTICS, ses)},
        no_attack_partition=float(free_rates[0]),
        no_attack_permutation=float(free_rates[1]),
        no_attack_partition_se=float(free_ses[0]),
        no_attack_permutation_se=float(free_ses[1]),
    )
