"""Percentages with one decimal, rounded half up."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal

ONE_DECIMAL = Decimal("0.1")


def percent(numerator: int, denominator: int) -> Decimal | None:
    """``numerator / denominator * 100`` rounded half-up to one decimal.

    Exact rational arithmetic avoids binary float artefacts such as
    17.45 rendering as 17.4.
    """
    if denominator == 0:
        return None
    value = Decimal(numerator) * 100 / Decimal(denominator)
    return value.quantize(ONE_DECIMAL, rounding=ROUND_HALF_UP)


def percent_float(numerator: int, denominator: int) -> float | None:
    value = percent(numerator, denominator)
    return None if value is None else float(value)
