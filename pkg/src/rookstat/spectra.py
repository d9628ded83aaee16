"""Poisson approximations to block and cycle spectra, TV distances and the rejection sampler.

With r = n - k rooks and no double alignment, every component has size at
most three and each merging coincidence turns two 2-components into one
3-component, so the spectrum is ``(2k - n + Z, n - k - 2Z, Z)``.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from mpmath import iv

from .coincidence import draw_batch, sample_iid_placement
from .errors import AttemptCapError, DomainError
from .intervals import DEFAULT_PRECISION, RealInterval, iv_rational, working_precision
from .laws import FiniteLaw
from .rook_board import decode, has_attack
from .sharding import run_sharded
from .stirling_exact import Model, SpectrumVector, exact_spectrum_law

logger = logging.getLogger(__name__)

DEFAULT_ATTEMPT_CAP = 1_000_000


@dataclass(frozen=True)
class ApproxSpectrumLaw:
    model: Model
    n: int
    k: int
    rate: Fraction
    paper_form: bool = False

    def vector_map(self, z: int) -> Tuple[int, int, int]:
        n, k = self.n, self.k
        if self.paper_form:
            return (n - 2 * k + z, k - 2 * z, z)
        return (2 * k - n + z, n - k - 2 * z, z)

    def spectrum(self, z: int) -> Optional[SpectrumVector]:
        """The spectrum for Z = z, or None when some entry is negative."""
        coords = self.vector_map(z)
        if min(coords) < 0:
            return None
        return SpectrumVector(coords)

    def legal_support(self) -> List[Tuple[int, SpectrumVector]]:
        # the middle entry decreases in z, so it bounds the search
        z_max = max(self.k, self.n - self.k) // 2
        out = []
        for z in range(0, z_max + 1):
            vector = self.spectrum(z)
            if vector is not None:
                out.append((z, vector))
        return out

    def weight(self, z: int) -> Fraction:
        """rate^z / z!, the Poisson mass without the e^-rate factor."""
        return Fraction(self.rate**z, math.factorial(z))

    def pmf(self, z: int, *, precision: int = DEFAULT_PRECISION) -> RealInterval:
        with working_precision(precision):
            return RealInterval.from_iv(iv_rational(self.weight(z)) * iv.exp(-iv_rational(self.rate)))


def spectrum_rate(model: Union[Model, str], n: int, k: int) -> Fraction:
    model = Model(model)
    r = n - k
    factor = Fraction(2, 3) if model is Model.PARTITION else Fraction(4, 3)
    return factor * Fraction(r * r, n)


def approx_law(model: Union[Model, str], n: int, k: int, *, paper_form: bool = False) -> ApproxSpectrumLaw:
    model = Model(model)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    return ApproxSpectrumLaw(model=model, n=n, k=k, rate=spectrum_rate(model, n, k), paper_form=paper_form)


def tv_spectrum_exact(
    model: Union[Model, str],
    n: int,
    k: int,
    *,
    cap: Optional[int] = None,
    paper_form: bool = False,
    precision: int = DEFAULT_PRECISION,
) -> RealInterval:
    """TV distance between the exact spectrum law and its Poisson approximation.

    Poisson mass on Z values with no legal spectrum is counted in full.
    """
    exact = exact_spectrum_law(model, n, k, cap=cap)
    approx = approx_law(model, n, k, paper_form=paper_form)
    support = approx.legal_support()
    matched = {vector for _, vector in support}

    with working_precision(precision):
        decay = iv.exp(-iv_rational(approx.rate))
        total = iv_rational(0)
        legal_mass = iv_rational(0)
        for z, vector in support:
            q = iv_rational(approx.weight(z)) * decay
            legal_mass += q
            total += abs(iv_rational(exact.mass(vector)) - q)
        unmatched = sum((m for v, m in exact.items() if v not in matched), Fraction(0))
        total += iv_rational(unmatched) + (1 - legal_mass)
        result = RealInterval.from_iv(total / 2)
    logger.debug("TV %s n=%s k=%s in %s", Model(model).value, n, k, result)
    return result


def tv_discrete(law_a: Mapping, law_b: Mapping) -> Fraction:
    keys = set(law_a) | set(law_b)
    return sum((abs(Fraction(law_a.get(key, 0)) - Fraction(law_b.get(key, 0))) for key in keys), Fraction(0)) / 2


def tv_empirical_poisson(
    counts: Mapping[int, int], rate: Fraction, *, precision: int = DEFAULT_PRECISION
) -> RealInterval:
    """TV between an empirical law on the non-negative integers and Poisson(rate)."""
    total = sum(counts.values())
    if total <= 0:
        raise DomainError("empirical law has no observations")
    if any(z < 0 for z in counts):
        raise DomainError("empirical values must be non-negative integers")
    rate = Fraction(rate)
    top = max(counts)
    with working_precision(precision):
        decay = iv.exp(-iv_rational(rate))
        acc = iv_rational(0)
        covered = iv_rational(0)
        for z in range(top + 1):
            q = iv_rational(Fraction(rate**z, math.factorial(z))) * decay
            covered += q
            acc += abs(iv_rational(Fraction(counts.get(z, 0), total)) - q)
        acc += 1 - covered
        return RealInterval.from_iv(acc / 2)


def placement_spectrum(n: int, rows: Sequence[int], cols: Sequence[int]) -> SpectrumVector:
    """Spectrum of a non-attacking placement from its rook graph alone.

    Components of the decoded structure are the connected components of the
    graph with one edge {i, j} per rook; untouched elements are singletons.
    """
    parent: Dict[int, int] = {}

    def find(x: int) -> int:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in zip(rows, cols):
        parent[find(int(j))] = find(int(i))
    sizes = Counter(find(x) for x in list(parent))
    tally = Counter(sizes.values())
    tally[1] += n - len(parent)
    return SpectrumVector.from_sizes(size for size, count in tally.items() for _ in range(count))


def rejection_sample(
    model: Union[Model, str],
    n: int,
    k: int,
    rng: np.random.Generator,
    *,
    attempt_cap: int = DEFAULT_ATTEMPT_CAP,
) -> Tuple[SpectrumVector, int]:
    """One uniform structure's spectrum and the number of iid placements drawn."""
    model = Model(model)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    r = n - k
    if r == 0:
        return SpectrumVector.of(n), 1
    for attempt in range(1, attempt_cap + 1):
        placement = sample_iid_placement(n, r, rng)
        if not has_attack(placement, model):
            return decode(placement, model).spectrum(), attempt
    raise AttemptCapError(f"no non-attacking {model.value} placement in {attempt_cap} attempts (n={n}, k={k})")


@dataclass
class EmpiricalSpectrum:
    sample_count: int
    frequencies: Counter = field(default_factory=Counter)
    attempts: int = 0

    @property
    def acceptance_rate(self) -> Fraction:
        if self.attempts == 0:
            return Fraction(0)
        return Fraction(self.sample_count, self.attempts)

    def law(self) -> FiniteLaw:
        return FiniteLaw.from_counts(self.frequencies)

    def merge(self, other: "EmpiricalSpectrum") -> "EmpiricalSpectrum":
        return EmpiricalSpectrum(
            sample_count=self.sample_count + other.sample_count,
            frequencies=self.frequencies + other.frequencies,
            attempts=self.attempts + other.attempts,
        )


def attack_mask(rows: np.ndarray, cols: np.ndarray, model: Union[Model, str]) -> np.ndarray:
    clash = np.any(np.diff(np.sort(cols, axis=1), axis=1) == 0, axis=1)
    if Model(model) is Model.PARTITION:
        clash |= np.any(np.diff(np.sort(rows, axis=1), axis=1) == 0, axis=1)
    return clash


def _spectrum_shard(model: Model, n: int, k: int, batch_size: int, attempt_cap: int):
    r = n - k

    def run(count: int, rng: np.random.Generator) -> EmpiricalSpectrum:
        out = EmpiricalSpectrum(sample_count=0)
        if r == 0:
            out.sample_count = count
            out.attempts = count
            if count:
                out.frequencies[SpectrumVector.of(n)] = count
            return out
        dry = 0
        while out.sample_count < count:
            rows, cols = draw_batch(n, r, batch_size, rng)
            accepted = np.flatnonzero(~attack_mask(rows, cols, model))
            needed = count - out.sample_count
            if accepted.size == 0:
                dry += batch_size
                out.attempts += batch_size
                if dry >= attempt_cap:
                    raise AttemptCapError(
                        f"no non-attacking {model.value} placement in {dry} attempts (n={n}, k={k})"
                    )
                continue
            dry = 0
            used = accepted[:needed]
            out.attempts += (int(used[-1]) + 1) if used.size == needed else batch_size
            for idx in used:
                out.frequencies[placement_spectrum(n, rows[idx], cols[idx])] += 1
            out.sample_count += int(used.size)
        return out

    return run


def empirical_spectrum(
    model: Union[Model, str],
    n: int,
    k: int,
    samples: int,
    seed: int,
    shards: int = 1,
    *,
    batch_size: int = 4096,
    max_workers: int = 4,
    attempt_cap: int = DEFAULT_ATTEMPT_CAP,
) -> EmpiricalSpectrum:
    """Rejection-sampled spectrum frequencies; a pure function of (seed, shards)."""
    model = Model(model)
    if samples < 1:
        raise DomainError(f"samples must be positive, got {samples}")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    parts = run_sharded(
        _spectrum_shard(model, n, k, batch_size, attempt_cap), samples, seed, shards, max_workers=max_workers
    )
    result = EmpiricalSpectrum(sample_count=0)
    for part in parts:
        result = result.merge(part)
    logger.info(
        "Sampled %s %s spectra n=%s k=%s, acceptance %.5f",
        result.sample_count,
        model.value,
        n,
        k,
        float(result.acceptance_rate),
    )
    return result


def coordinate_law(empirical: Union[EmpiricalSpectrum, FiniteLaw], size: int) -> FiniteLaw:
    if isinstance(empirical, EmpiricalSpectrum):
        counts: Counter = Counter()
        for vector, count in empirical.frequencies.items():
            counts[vector[size]] += count
        return FiniteLaw.from_counts(counts)
    return empirical.marginal(lambda vector: vector[size])


def largest_component_frequency(empirical: EmpiricalSpectrum, size: int) -> Fraction:
    hits = sum(count for vector, count in empirical.frequencies.items() if vector.largest >= size)
    return Fraction(hits, empirical.sample_count)

