"""Closed-form Poisson-approximation quantities and effective Stirling bounds.

Polynomial ingredients (pair probabilities, neighbourhood sums, rates) are
exact :class:`fractions.Fraction` values.  Exponentials and square roots run
through ``mpmath.iv`` with outward rounding and come back as
:class:`~rookstat.intervals.RealInterval`, so every containment check against
an exact Stirling number is rigorous.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Optional, Union

from mpmath import iv

from .coincidence import DEFAULT_PLACEMENT_CAP, exhaustive_coincidence_law, pair_probabilities
from .errors import DomainError
from .intervals import DEFAULT_PRECISION, RealInterval, iv_rational, working_precision
from .stirling_exact import Kind, Model, stirling

logger = logging.getLogger(__name__)

# exponents beyond this are not materialised as exact rationals
MAX_EXPONENT = Fraction(100_000)

COMPARE_COLUMNS = [
    "kind",
    "n",
    "k",
    "r",
    "exact",
    "sandwich_lower",
    "sandwich_upper",
    "sandwich_valid",
    "lll_lower",
    "lll_valid",
    "suen_upper",
    "suen_valid",
    "rel_err_sandwich_lo",
    "rel_err_sandwich_hi",
    "rel_err_lll",
    "rel_err_suen",
]


@dataclass(frozen=True)
class BoundReport:
    n: int
    r: int
    p: Fraction
    q: Fraction
    b1_a: Fraction
    b1_l: Fraction
    b1_al: Fraction
    b1: Fraction
    b2_a: Fraction
    b2_l: Fraction
    b2_al: Fraction
    b2: Fraction
    d: Fraction
    d_moment: Fraction
    b1_display: Fraction
    b2_display: Fraction
    lambda_r: Fraction
    lambda_c: Fraction


@dataclass(frozen=True)
class SandwichBound:
    lower: RealInterval
    upper: RealInterval
    valid: bool


@dataclass(frozen=True)
class LsBound:
    value: Optional[RealInterval]
    valid: bool
    details: Dict[str, Fraction] = field(default_factory=dict)
    variants: Dict[str, RealInterval] = field(default_factory=dict)


def _rook_count(n: int, k: int) -> int:
    if n < 2:
        raise DomainError(f"bounds need n >= 2, got {n}")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    return n - k


def _cubic(r: int) -> Fraction:
    return Fraction(r * (r - 1) * (2 * r - 3), 2)


def _base(n: int, r: int) -> Fraction:
    """C(n,2)^r / r!, the number of labelled placements over r!."""
    return Fraction(math.comb(n, 2) ** r, math.factorial(r))


def _display_d(n: int, r: int) -> Fraction:
    return (
        _cubic(r)
        * Fraction(362, 9 * n * n)
        * (n * (n - Fraction(301, 181)) + 166)
        / Fraction((n - 1) ** 2)
    )


def _display_b1(n: int, r: int) -> Fraction:
    return _cubic(r) * Fraction(112, 9 * n * n) * (n * (n - Fraction(13, 7)) + 1) / Fraction((n - 1) ** 2)


def _display_b2(n: int, r: int) -> Fraction:
    return (
        r * (r - 1) * (r - 2)
        * Fraction(23 * 18, 3 * n * n)
        * (n * (n - Fraction(31, 23)) + Fraction(18, 23))
        / Fraction((n - 1) ** 2)
    )


def _b2_attack(n: int, r: int) -> Fraction:
    return (
        r * (r - 1) * (r - 2)
        * Fraction(40, 3 * n * n)
        * (n * (n - Fraction(17, 5)) + Fraction(17, 5))
        / Fraction((n - 1) ** 2)
    )


def row_column_pairs(n: int) -> int:
    """Sum over squares (i, j) of (n - i)(j - 1): same-row times same-column choices."""
    return sum((n - i) * (j - 1) for i in range(1, n + 1) for j in range(i + 1, n + 1))


def chen_stein_report(n: int, r: int) -> BoundReport:
    if n < 2:
        raise DomainError(f"bounds need n >= 2, got {n}")
    if r < 0:
        raise DomainError(f"rook count must be non-negative, got {r}")
    pp = pair_probabilities(n)
    p, q = pp.p, pp.q
    pairs = math.comb(r, 2)
    # each pair index has 2r - 3 overlapping pair indices (itself included)
    overlap = 2 * pairs * (2 * r - 3)

    b1_a = overlap * 2 * p * p
    b1_l = overlap * 2 * q * q
    b1_al = overlap * 2 * p * q
    b2_a = _b2_attack(n, r)
    b2_l = Fraction(r * (r - 1) * (r - 2), n * n) * Fraction(n * (n - 1) + 2, (n - 1) ** 2)
    b2_al = Fraction(r * (r - 1) * (r - 2) * 4 * (n - 2), 3 * n * n * (n - 1))
    b1 = b1_a + b1_l + b1_al
    b2 = b2_a + b2_l + b2_al

    report = BoundReport(
        n=n,
        r=r,
        p=p,
        q=q,
        b1_a=b1_a,
        b1_l=b1_l,
        b1_al=b1_al,
        b1=b1,
        b2_a=b2_a,
        b2_l=b2_l,
        b2_al=b2_al,
        b2=b2,
        d=_display_d(n, r),
        d_moment=4 * (b1 + b2),
        b1_display=_display_b1(n, r),
        b2_display=_display_b2(n, r),
        lambda_r=pairs * p,
        lambda_c=pairs * p,
    )
    if report.b1 != report.b1_display:
        raise RuntimeError(f"b1 parts disagree with the closed form at n={n}, r={r}")
    return report


def _exp(x):
    hi = RealInterval.from_iv(x).hi
    if hi > MAX_EXPONENT:
        raise DomainError(f"exponent {float(hi):.6g} is too large to enclose exactly")
    return iv.exp(x)


def point_probability_terms(kind: Union[Kind, str], n: int, r: int) -> Dict[str, Fraction]:
    """Poisson rate and neighbourhood sum for the no-attack event.

    First kind counts column coincidences only; second kind counts rows and
    columns.  ``error`` is the b1 + b2 sum used by the point-probability
    inequality.
    """
    kind = Kind(kind)
    p = pair_probabilities(n).p
    pairs = math.comb(r, 2)
    if kind is Kind.FIRST:
        f1 = pairs * (2 * r - 3) * p * p
        f2 = Fraction(pairs * (2 * r - 3), math.comb(n, 2))
        return {"rate": pairs * p, "error": f1 + f2, "f1": f1, "f2": f2}
    c1 = chen_stein_report(n, r).b1_a
    c2 = _b2_attack(n, r)
    return {"rate": 2 * pairs * p, "error": c1 + c2, "c1_a": c1, "c2_a": c2}


def sandwich(kind: Union[Kind, str], n: int, k: int, *, precision: int = DEFAULT_PRECISION) -> SandwichBound:
    kind = Kind(kind)
    r = _rook_count(n, k)
    terms = point_probability_terms(kind, n, r)
    base = _base(n, r)
    with working_precision(precision):
        rate = iv_rational(terms["rate"])
        err = iv_rational(terms["error"])
        decay = iv.exp(-rate)
        scale = iv_rational(base)
        lower = RealInterval.from_iv(scale * (decay - err))
        upper = RealInterval.from_iv(scale * (decay + err))
        bracket = RealInterval.from_iv(1 - iv.exp(rate) * err)
    valid = bracket.certainly_gt(0)
    logger.debug("Sandwich %s n=%s k=%s valid=%s", kind.value, n, k, valid)
    return SandwichBound(lower=lower, upper=upper, valid=valid)


def lll_lower(kind: Union[Kind, str], n: int, k: int, *, precision: int = DEFAULT_PRECISION) -> LsBound:
    kind = Kind(kind)
    r = _rook_count(n, k)
    pp = pair_probabilities(n)
    p = pp.p if kind is Kind.FIRST else pp.p2_paper
    pairs = math.comb(r, 2)
    base = _base(n, r)
    if pairs == 0:
        return LsBound(value=RealInterval.exact(base), valid=True, details={"p": p})

    m = 2 * r - 2
    discriminant = 1 - (4 * m - 2) * p + p * p
    details = {"p": p, "m": Fraction(m), "discriminant": discriminant}
    if discriminant < 0:
        logger.debug("LLL %s n=%s k=%s: negative discriminant %s", kind.value, n, k, discriminant)
        return LsBound(value=None, valid=False, details=details)

    with working_precision(precision):
        g = (1 - iv_rational(p) - iv.sqrt(iv_rational(discriminant))) / 2
        x = iv_rational(p) * iv.exp(g)
        x_bounds = RealInterval.from_iv(x)
        valid = x_bounds.certainly_gt(0) and x_bounds.certainly_lt(1)
        value = None
        if valid:
            value = RealInterval.from_iv(iv_rational(base) * (1 - x) ** pairs)
        g_bounds = RealInterval.from_iv(g)
    details.update({"g_lo": g_bounds.lo, "g_hi": g_bounds.hi, "x_lo": x_bounds.lo, "x_hi": x_bounds.hi})
    return LsBound(value=value, valid=valid, details=details)


def suen_terms(kind: Union[Kind, str], n: int, r: int) -> Dict[str, Fraction]:
    """Mean sum, edge sum Delta and max neighbourhood mean delta of the attack family."""
    kind = Kind(kind)
    p = pair_probabilities(n).p
    big_n = math.comb(n, 2)
    pairs = math.comb(r, 2)
    if kind is Kind.FIRST:
        return {
            "mu": pairs * p,
            "Delta": Fraction(pairs * (r - 2), big_n) if r >= 2 else Fraction(0),
            "delta": 2 * (r - 2) * p if r >= 2 else Fraction(0),
        }
    if r < 2:
        return {"mu": Fraction(0), "Delta": Fraction(0), "delta": Fraction(0)}
    t = row_column_pairs(n)
    shared = pairs * (r - 2) * (Fraction(2, big_n) + Fraction(2 * t, big_n**3))
    return {
        "mu": 2 * pairs * p,
        "Delta": Fraction(pairs, big_n) + shared,
        "delta": (1 + 4 * (r - 2)) * p,
    }


def _suen_display_variants(kind: Kind, n: int, r: int, base: Fraction) -> Dict[str, RealInterval]:
    pp = pair_probabilities(n)
    pairs = math.comb(r, 2)
    p = pp.p if kind is Kind.FIRST else pp.p2_paper
    coefficients = {"display_c2a": _b2_attack(n, r), "display_c3a": _display_b2(n, r)}
    out: Dict[str, RealInterval] = {}
    for name, c in coefficients.items():
        try:
            inner = _exp(iv_rational(2 * p * (2 * r - 3)))
            outer = _exp(iv_rational(c) * inner)
            out[name] = RealInterval.from_iv(iv_rational(base) * iv.exp(-iv_rational(pairs * p)) * outer)
        except DomainError as exc:
            logger.debug("Suen display variant %s skipped at n=%s r=%s: %s", name, n, r, exc)
    return out


def suen_upper(kind: Union[Kind, str], n: int, k: int, *, precision: int = DEFAULT_PRECISION) -> LsBound:
    kind = Kind(kind)
    r = _rook_count(n, k)
    terms = suen_terms(kind, n, r)
    base = _base(n, r)
    with working_precision(precision):
        try:
            exponent = -iv_rational(terms["mu"]) + iv_rational(terms["Delta"]) * _exp(2 * iv_rational(terms["delta"]))
            value: Optional[RealInterval] = RealInterval.from_iv(iv_rational(base) * _exp(exponent))
        except DomainError as exc:
            logger.debug("Suen bound for %s n=%s k=%s not representable: %s", kind.value, n, k, exc)
            value = None
        variants = _suen_display_variants(kind, n, r, base)
    return LsBound(value=value, valid=value is not None, details=dict(terms), variants=variants)


def conditional_tail_bound(
    model: Union[Model, str], n: int, k: int, *, precision: int = DEFAULT_PRECISION
) -> LsBound:
    """Bound on P(a component of size >= 4 | no attack)."""
    model = Model(model)
    r = _rook_count(n, k)
    report = chen_stein_report(n, r)
    if model is Model.PARTITION:
        numerator = Fraction(r**3, 3 * n * n)
        rate = report.lambda_r + report.lambda_c
    else:
        numerator = report.d / 2
        rate = report.lambda_c
    details = {"numerator": numerator, "rate": rate, "d": report.d}
    with working_precision(precision):
        denominator = iv.exp(-iv_rational(rate)) - iv_rational(report.d)
        bounds = RealInterval.from_iv(denominator)
        valid = bounds.certainly_gt(0)
        value = RealInterval.from_iv(iv_rational(numerator) / denominator) if valid else None
    details.update({"denominator_lo": bounds.lo, "denominator_hi": bounds.hi})
    logger.debug("Conditional tail %s n=%s k=%s valid=%s", model.value, n, k, valid)
    return LsBound(value=value, valid=valid, details=details)


def process_tv(
    n: int, r: int, *, cap: int = DEFAULT_PLACEMENT_CAP, precision: int = DEFAULT_PRECISION
) -> RealInterval:
    """TV between the exhaustive (W_RR, W_CC, W_RC, W_CR) law and independent Poissons with matched means."""
    law = exhaustive_coincidence_law(n, r, cap=cap).marginal(lambda v: v.counts)
    means = [law.mean(lambda counts, i=i: counts[i]) for i in range(4)]
    with working_precision(precision):
        decay = iv.exp(-iv_rational(sum(means, Fraction(0))))
        total = iv_rational(0)
        covered = iv_rational(0)
        for counts, mass in law.items():
            weight = Fraction(1)
            for mu, c in zip(means, counts):
                weight *= Fraction(mu**c, math.factorial(c))
            q = iv_rational(weight) * decay
            covered += q
            total += abs(iv_rational(mass) - q)
        return RealInterval.from_iv((total + 1 - covered) / 2)


def _relative(bound: Optional[Fraction], exact: int) -> Optional[float]:
    if bound is None or exact == 0:
        return None
    return float(Fraction(bound) / exact - 1)


def compare_row(kind: Union[Kind, str], n: int, k: int, *, precision: int = DEFAULT_PRECISION) -> Dict[str, object]:
    kind = Kind(kind)
    exact = stirling(kind, n, k)
    sw = sandwich(kind, n, k, precision=precision)
    lll = lll_lower(kind, n, k, precision=precision)
    suen = suen_upper(kind, n, k, precision=precision)
    lll_value = lll.value.lo if lll.value is not None else None
    suen_value = suen.value.hi if suen.value is not None else None
    return {
        "kind": kind.value,
        "n": n,
        "k": k,
        "r": n - k,
        "exact": exact,
        "sandwich_lower": sw.lower.lo,
        "sandwich_upper": sw.upper.hi,
        "sandwich_valid": sw.valid,
        "lll_lower": lll_value,
        "lll_valid": lll.valid,
        "suen_upper": suen_value,
        "suen_valid": suen.valid,
        "rel_err_sandwich_lo": _relative(sw.lower.lo, exact),
        "rel_err_sandwich_hi": _relative(sw.upper.hi, exact),
        "rel_err_lll": _relative(lll_value, exact),
        "rel_err_suen": _relative(suen_value, exact),
    }


def compare_table(
    kind: Union[Kind, str],
    n: int,
    k_range: Iterable[int],
    *,
    max_n: int = 2000,
    precision: int = DEFAULT_PRECISION,
) -> Iterator[Dict[str, object]]:
    """Rows comparing the sandwich and LLL/Suen bounds with the exact value, one per k."""
    if n > max_n:
        raise DomainError(f"n={n} exceeds the comparison limit {max_n}")
    for k in k_range:
        yield compare_row(kind, n, k, precision=precision)
