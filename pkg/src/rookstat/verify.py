from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np
from mpmath import iv

from .bounds import (
    chen_stein_report,
    lll_lower,
    point_probability_terms,
    process_tv,
    sandwich,
    suen_upper,
)
from .coincidence import (
    DEFAULT_PLACEMENT_CAP,
    coincidence_vector,
    double_alignment_free,
    draw_batch,
    exhaustive_coincidence_law,
    merged_pairs,
    monte_carlo_coincidence,
    no_attack_probability,
    pair_probabilities,
)
from .intervals import RealInterval, iv_rational, working_precision
from .rook_board import board_squares, decode, encode, enum_placements
from .sharding import shard_streams
from .spectra import approx_law, empirical_spectrum, spectrum_rate, tv_spectrum_exact
from .stirling_exact import Kind, Model, bell, enum_structures, exact_spectrum_law, stirling

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _stirling_vs_enumeration(max_n: int, cap: int) -> Tuple[bool, str]:
    for model in Model:
        for n in range(1, max_n + 1):
            for k in range(0, n + 2):
                counted = sum(1 for _ in enum_structures(model, n, k, cap=cap))
                if counted != stirling(model.kind, n, k):
                    return False, f"{model.value} n={n} k={k}: enumerated {counted}"
    return True, f"n <= {max_n}"


def _row_sums(max_n: int, cap: int) -> Tuple[bool, str]:
    for n in range(1, max_n + 1):
        if sum(stirling(Kind.SECOND, n, k) for k in range(n + 1)) != bell(n, cap=cap):
            return False, f"Bell mismatch at n={n}"
        if sum(stirling(Kind.FIRST, n, k) for k in range(n + 1)) != math.factorial(n):
            return False, f"n! mismatch at n={n}"
    return True, f"n <= {max_n}"


def _spectrum_conservation(max_n: int, cap: int) -> Tuple[bool, str]:
    for model in Model:
        for n in range(1, max_n + 1):
            for k in range(1, n + 1):
                for vector in exact_spectrum_law(model, n, k, cap=cap):
                    if vector.blocks != k or vector.total != n:
                        return False, f"{model.value} n={n} k={k}: {vector}"
    return True, f"n <= {max_n}"


def _round_trip(max_n: int, cap: int) -> Tuple[bool, str]:
    for model in Model:
        for n in range(1, max_n + 1):
            for k in range(1, n + 1):
                for structure in enum_structures(model, n, k, cap=cap):
                    placement = encode(structure, model)
                    if placement.r != n - k or decode(placement, model) != structure:
                        return False, f"{model.value} {structure}"
    return True, f"n <= {max_n}"


def _placement_counts(max_n: int, cap: int) -> Tuple[bool, str]:
    for model in Model:
        for n in range(1, max_n + 1):
            for r in range(0, n):
                counted = sum(1 for _ in enum_placements(n, r, model))
                if counted != stirling(model.kind, n, n - r):
                    return False, f"{model.value} n={n} r={r}: {counted} placements"
    return True, f"n <= {max_n}"


def _exhaustive_grid(max_n: int):
    for n in range(2, min(max_n, 7) + 1):
        for r in range(0, 4):
            yield n, r


def _marginal_means(max_n: int, cap: int, placement_cap: int = DEFAULT_PLACEMENT_CAP) -> Tuple[bool, str]:
    for n, r in _exhaustive_grid(max_n):
        law = exhaustive_coincidence_law(n, r, cap=placement_cap)
        pp = pair_probabilities(n)
        pairs = math.comb(r, 2)
        expected = (pairs * pp.p, pairs * pp.p, pairs * pp.q, pairs * pp.q)
        for i, target in enumerate(expected):
            if law.mean(lambda v, i=i: v.counts[i]) != target:
                return False, f"n={n} r={r} coordinate {i}"
    return True, "n <= 7, r <= 3"


def _no_attack_identity(max_n: int, cap: int, placement_cap: int = DEFAULT_PLACEMENT_CAP) -> Tuple[bool, str]:
    for n, r in _exhaustive_grid(max_n):
        if r >= n:
            continue
        law = exhaustive_coincidence_law(n, r, cap=placement_cap)
        free_partition = law.probability(lambda v: v.w_rr + v.w_cc == 0)
        free_permutation = law.probability(lambda v: v.w_cc == 0)
        if free_partition != no_attack_probability(Model.PARTITION, n, r):
            return False, f"partition n={n} r={r}"
        if free_permutation != no_attack_probability(Model.PERMUTATION, n, r):
            return False, f"permutation n={n} r={r}"
    return True, "n <= 7, r <= 3"


def _double_alignment_mean(max_n: int, cap: int, placement_cap: int = DEFAULT_PLACEMENT_CAP) -> Tuple[bool, str]:
    for n, r in _exhaustive_grid(max_n):
        mean = exhaustive_coincidence_law(n, r, cap=placement_cap).mean(lambda v: v.r2)
        if mean > Fraction(r**3, 3 * n * n):
            return False, f"E[R2]={mean} at n={n} r={r}"
    return True, "n <= 7, r <= 3"


def _structure_equivalence(max_n: int, cap: int) -> Tuple[bool, str]:
    for model in Model:
        for n in range(2, min(max_n, 7) + 1):
            for r in range(0, min(3, n - 1) + 1):
                approx = approx_law(model, n, n - r)
                for placement in enum_placements(n, r, model):
                    vector = coincidence_vector(placement)
                    spectrum = decode(placement, model).spectrum()
                    simple = spectrum.largest <= 3 and spectrum[3] == merged_pairs(vector, model)
                    if simple != double_alignment_free(vector, model):
                        return False, f"{model.value} {placement}"
                    if simple and approx.spectrum(merged_pairs(vector, model)) != spectrum:
                        return False, f"{model.value} {placement}: {spectrum}"
    return True, "n <= 7, r <= 3"


def _closed_forms(max_n: int, cap: int) -> Tuple[bool, str]:
    report = chen_stein_report(6, 3)
    if (report.p, report.q, report.b1_a) != (Fraction(11, 45), Fraction(4, 45), Fraction(484, 225)):
        return False, "n=6 r=3 constants"
    for n in range(2, 201):
        previous = Fraction(0)
        for r in range(0, 21):
            report = chen_stein_report(n, r)
            if report.b1 != report.b1_display:
                return False, f"b1 at n={n} r={r}"
            if report.b1_a != report.r * (report.r - 1) * (report.r - Fraction(3, 2)) * 4 * report.p**2:
                return False, f"b1_a at n={n} r={r}"
            if report.d < previous:
                return False, f"d decreases at n={n} r={r}"
            previous = report.d
    return True, "2 <= n <= 200, r <= 20"


def _process_tv(max_n: int, cap: int, placement_cap: int = DEFAULT_PLACEMENT_CAP) -> Tuple[bool, str]:
    for n in (5, 6, 7):
        for r in (2, 3):
            bound = chen_stein_report(n, r).d
            if not process_tv(n, r, cap=placement_cap).certainly_le(bound):
                return False, f"n={n} r={r}"
    return True, "n in 5..7, r in 2..3"


def _point_probability(max_n: int, cap: int, placement_cap: int = DEFAULT_PLACEMENT_CAP) -> Tuple[bool, str]:
    for n in (5, 6, 7):
        for r in (2, 3):
            law = exhaustive_coincidence_law(n, r, cap=placement_cap)
            events = {
                Kind.FIRST: law.probability(lambda v: v.w_cc == 0),
                Kind.SECOND: law.probability(lambda v: v.w_rr + v.w_cc == 0),
            }
            for kind, exact in events.items():
                terms = point_probability_terms(kind, n, r)
                rate = terms["rate"]
                slack = min(Fraction(1), 1 / rate) * terms["error"]
                with working_precision():
                    gap = RealInterval.from_iv(abs(iv_rational(exact) - iv.exp(-iv_rational(rate))))
                if not gap.certainly_le(slack):
                    return False, f"{kind.value} n={n} r={r}"
    return True, "n in 5..7, r in 2..3"


def _sandwich_containment(max_n: int, cap: int, grid_n: int = 60) -> Tuple[bool, str]:
    checked = 0
    for kind in Kind:
        for n in range(2, grid_n + 1):
            for k in range(1, n + 1):
                exact = stirling(kind, n, k)
                sw = sandwich(kind, n, k)
                if sw.valid:
                    checked += 1
                    if not (sw.lower.certainly_le(exact) and sw.upper.certainly_ge(exact)):
                        return False, f"sandwich {kind.value} n={n} k={k}"
                low = lll_lower(kind, n, k)
                if low.valid and not low.value.certainly_le(exact):
                    return False, f"lll {kind.value} n={n} k={k}"
                high = suen_upper(kind, n, k)
                if high.valid and not high.value.certainly_ge(exact):
                    return False, f"suen {kind.value} n={n} k={k}"
    return True, f"{checked} valid sandwiches, n <= {grid_n}"


def _tv_single_rook(max_n: int, cap: int) -> Tuple[bool, str]:
    for n in range(4, min(cap, 12) + 1):
        rate = spectrum_rate(Model.PARTITION, n, n - 1)
        with working_precision():
            target = RealInterval.from_iv(1 - iv.exp(-iv_rational(rate)))
        tv = tv_spectrum_exact(Model.PARTITION, n, n - 1, cap=cap)
        if abs(tv.midpoint - target.midpoint) > Fraction(1, 10**12):
            return False, f"n={n}: {tv} vs {target}"
    return True, f"4 <= n <= {min(cap, 12)}"


def _tv_decreasing(max_n: int, cap: int) -> Tuple[bool, str]:
    sizes = [n for n in (8, 10, 12) if n <= cap]
    values = [tv_spectrum_exact(Model.PARTITION, n, n - 3, cap=cap) for n in sizes]
    for a, b in zip(values, values[1:]):
        if not b.certainly_le(a.lo):
            return False, ", ".join(str(v) for v in values)
    return True, ", ".join(f"{float(v):.4f}" for v in values)


def _sample_sizes(samples: int) -> List[Tuple[int, int, int]]:
    return [(8, 5, samples), (400, 380, max(samples // 4, 1))]


def _iid_uniformity(samples: int, seed: int, n: int = 6) -> Tuple[bool, str]:
    squares = board_squares(n)
    rows, cols = draw_batch(n, 1, samples, shard_streams(seed, 1)[0])
    keys = rows[:, 0] * (n + 1) + cols[:, 0]
    counts = np.array([np.count_nonzero(keys == sq.row * (n + 1) + sq.col) for sq in squares])
    if counts.sum() != samples:
        return False, f"{samples - counts.sum()} draws off the board"
    share = 1 / len(squares)
    se = math.sqrt(share * (1 - share) / samples)
    worst = float(np.abs(counts / samples - share).max())
    return worst <= 5 * se, f"max deviation {worst:.5f} over {len(squares)} squares"


def _acceptance_rate(max_n: int, cap: int, samples: int, seed: int) -> Tuple[bool, str]:
    rates = []
    for model in Model:
        for n, k, count in _sample_sizes(samples):
            result = empirical_spectrum(model, n, k, count, seed)
            target = float(no_attack_probability(model, n, n - k))
            rate = float(result.acceptance_rate)
            se = math.sqrt(target * (1 - target) / result.attempts)
            if abs(rate - target) > 4 * se:
                return False, f"{model.value} n={n} k={k}: {rate:.5f} vs {target:.5f}"
            rates.append(f"{rate:.4f}")
    return True, ", ".join(rates)


def _sampled_conservation(max_n: int, cap: int, samples: int, seed: int) -> Tuple[bool, str]:
    for model in Model:
        for n, k, count in _sample_sizes(samples):
            for vector in empirical_spectrum(model, n, k, count, seed).frequencies:
                if vector.blocks != k or vector.total != n:
                    return False, f"{model.value} n={n} k={k}: {vector}"
    return True, "n=8 k=5, n=400 k=380"


def _rejection_law(max_n: int, cap: int, samples: int, seed: int) -> Tuple[bool, str]:
    n, k = 8, 5
    for model in Model:
        exact = exact_spectrum_law(model, n, k, cap=cap)
        result = empirical_spectrum(model, n, k, samples, seed)
        stray = set(result.frequencies) - set(exact)
        if stray:
            return False, f"{model.value}: unexpected {sorted(str(v) for v in stray)}"
        for vector, mass in exact.items():
            freq = result.frequencies[vector] / samples
            se = math.sqrt(float(mass) * (1 - float(mass)) / samples)
            if abs(freq - float(mass)) > 4 * se:
                return False, f"{model.value} {vector}: {freq:.5f} vs {float(mass):.5f}"
    return True, f"{samples} samples per model at n={n} k={k}"


def _monte_carlo_means(max_n: int, cap: int, samples: int, seed: int) -> Tuple[bool, str]:
    n, r = 400, 20
    summary = monte_carlo_coincidence(n, r, samples, seed)
    pp = pair_probabilities(n)
    pairs = math.comb(r, 2)
    targets = {"w_rr": pairs * pp.p, "w_cc": pairs * pp.p, "w_rc": pairs * pp.q, "w_cr": pairs * pp.q}
    for name, target in targets.items():
        if abs(summary.means[name] - float(target)) > 4 * summary.std_errors[name]:
            return False, f"{name}: {summary.means[name]:.5f} vs {float(target):.5f}"
    free = {
        Model.PARTITION: (summary.no_attack_partition, summary.no_attack_partition_se),
        Model.PERMUTATION: (summary.no_attack_permutation, summary.no_attack_permutation_se),
    }
    for model, (rate, se) in free.items():
        target = float(no_attack_probability(model, n, r))
        if abs(rate - target) > 4 * se:
            return False, f"no attack {model.value}: {rate:.5f} vs {target:.5f}"
    return True, f"{samples} samples at n={n} r={r}"


def run_checks(
    max_n: int = 7,
    cap: int = 12,
    *,
    samples: int = 20000,
    seed: int = 20240611,
    placement_cap: int = DEFAULT_PLACEMENT_CAP,
    include_monte_carlo: bool = True,
) -> List[CheckResult]:
    checks: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ("stirling_vs_enumeration", lambda: _stirling_vs_enumeration(max_n, cap)),
        ("row_sums", lambda: _row_sums(max_n, cap)),
        ("spectrum_conservation", lambda: _spectrum_conservation(max_n, cap)),
        ("bijection_round_trip", lambda: _round_trip(max_n, cap)),
        ("placement_counts", lambda: _placement_counts(max_n, cap)),
        ("marginal_means", lambda: _marginal_means(max_n, cap, placement_cap)),
        ("no_attack_identity", lambda: _no_attack_identity(max_n, cap, placement_cap)),
        ("double_alignment_mean", lambda: _double_alignment_mean(max_n, cap, placement_cap)),
        ("structure_equivalence", lambda: _structure_equivalence(max_n, cap)),
        ("closed_forms", lambda: _closed_forms(max_n, cap)),
        ("process_tv_below_d", lambda: _process_tv(max_n, cap, placement_cap)),
        ("point_probability", lambda: _point_probability(max_n, cap, placement_cap)),
        ("bound_containment", lambda: _sandwich_containment(max_n, cap)),
        ("tv_single_rook", lambda: _tv_single_rook(max_n, cap)),
        ("tv_decreasing", lambda: _tv_decreasing(max_n, cap)),
    ]
    if include_monte_carlo:
        checks.append(("iid_uniformity", lambda: _iid_uniformity(samples, seed)))
        checks.append(("acceptance_rate", lambda: _acceptance_rate(max_n, cap, samples, seed)))
        checks.append(("sampled_spectrum_conservation", lambda: _sampled_conservation(max_n, cap, samples, seed)))
        checks.append(("rejection_law", lambda: _rejection_law(max_n, cap, samples, seed)))
        checks.append(("monte_carlo_means", lambda: _monte_carlo_means(max_n, cap, samples, seed)))

    results = []
    for name, check in checks:
        try:
            passed, detail = check()
        except Exception as exc:  # noqa: BLE001
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        logger.info("Check %s: %s (%s)", name, "pass" if passed else "FAIL", detail)
        results.append(CheckResult(name=name, passed=passed, detail=detail))
    return results


def failed(results: List[CheckResult]) -> Optional[List[str]]:
    names = [r.name for r in results if not r.passed]
    return names or None
