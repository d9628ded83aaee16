"""Emission of exact values as CSV, JSON or aligned text.

Rationals are written as decimal strings (never floats) plus a ``num/den``
field, and interval endpoints are rounded outward.
"""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, TextIO, Union

import pandas as pd

from .errors import ConfigError
from .intervals import RealInterval
from .laws import FiniteLaw

SIGNIFICANT_DIGITS = 40
FORMATS = ("csv", "json", "text")

Number = Union[int, Fraction]


def decimal_string(value: Number, *, rounding: str = ROUND_HALF_EVEN, digits: int = SIGNIFICANT_DIGITS) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    ctx = Context(prec=digits, rounding=rounding)
    quotient = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    return format(quotient.normalize(ctx), "f") if abs(quotient.adjusted()) < digits else str(quotient)


def rational_fields(name: str, value: Number) -> Dict[str, str]:
    value = Fraction(value)
    return {name: decimal_string(value), f"{name}_fraction": f"{value.numerator}/{value.denominator}"}


def interval_fields(name: str, value: Optional[RealInterval]) -> Dict[str, str]:
    if value is None:
        return {f"{name}_lo": "", f"{name}_hi": ""}
    return {
        f"{name}_lo": decimal_string(value.lo, rounding=ROUND_FLOOR),
        f"{name}_hi": decimal_string(value.hi, rounding=ROUND_CEILING),
    }


def format_compare_row(row: Mapping[str, Any]) -> Dict[str, Any]:
    """Render a comparison row; lower endpoints round down, upper endpoints round up."""
    out: Dict[str, Any] = {}
    for key, value in row.items():
        if value is None:
            out[key] = ""
        elif key in ("sandwich_lower", "lll_lower"):
            out[key] = decimal_string(value, rounding=ROUND_FLOOR)
        elif key in ("sandwich_upper", "suen_upper"):
            out[key] = decimal_string(value, rounding=ROUND_CEILING)
        elif key == "exact":
            out[key] = str(value)
        elif isinstance(value, bool):
            out[key] = "true" if value else "false"
        elif isinstance(value, float):
            out[key] = repr(value)
        else:
            out[key] = value
    return out


def spectrum_law_frame(law: Union[FiniteLaw, Mapping[Any, int]]) -> pd.DataFrame:
    """``spectrum,probability`` rows sorted by spectrum; counts are normalised exactly."""
    if not isinstance(law, FiniteLaw):
        law = FiniteLaw.from_counts(law)
    rows = [
        {"spectrum": vector.render(), "probability": decimal_string(mass)}
        for vector, mass in sorted(law.items(), key=lambda item: item[0])
    ]
    return pd.DataFrame(rows, columns=["spectrum", "probability"])


def check_format(fmt: str) -> str:
    if fmt not in FORMATS:
        raise ConfigError("format", f"must be one of {', '.join(FORMATS)}, got {fmt!r}")
    return fmt


@contextmanager
def open_output(out: Optional[str]) -> Iterator[TextIO]:
    if out is None or out == "-":
        yield sys.stdout
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        yield handle


def _text_lines(record: Mapping[str, Any]) -> List[str]:
    width = max((len(str(key)) for key in record), default=0)
    return [f"{str(key).ljust(width)}: {value}" for key, value in record.items()]


def write_frame(df: pd.DataFrame, out: Optional[str], fmt: str) -> None:
    check_format(fmt)
    with open_output(out) as handle:
        if fmt == "csv":
            df.to_csv(handle, index=False, lineterminator="\n")
        elif fmt == "json":
            handle.write(json.dumps(df.to_dict(orient="records"), sort_keys=True, indent=2) + "\n")
        else:
            for record in df.to_dict(orient="records"):
                handle.write("\n".join(_text_lines(record)) + "\n\n")
        handle.flush()


def write_record(record: Mapping[str, Any], out: Optional[str], fmt: str) -> None:
    check_format(fmt)
    with open_output(out) as handle:
        if fmt == "csv":
            pd.DataFrame([dict(record)]).to_csv(handle, index=False, lineterminator="\n")
        elif fmt == "json":
            handle.write(json.dumps(dict(record), sort_keys=True, indent=2) + "\n")
        else:
            handle.write("\n".join(_text_lines(record)) + "\n")
        handle.flush()


def stream_rows(rows: Iterable[Mapping[str, Any]], out: Optional[str], fmt: str, columns: List[str]) -> int:
    check_format(fmt)
    count = 0
    with open_output(out) as handle:
        for row in rows:
            if fmt == "csv":
                pd.DataFrame([row], columns=columns).to_csv(
                    handle, index=False, header=count == 0, lineterminator="\n"
                )
            elif fmt == "json":
                handle.write(json.dumps({key: row.get(key) for key in columns}, sort_keys=True) + "\n")
            else:
                handle.write("\n".join(_text_lines({key: row.get(key) for key in columns})) + "\n\n")
            handle.flush()
            count += 1
        if count == 0 and fmt == "csv":
            handle.write(",".join(columns) + "\n")
    return count
