"""
Rendering helpers for exact and floating values in reports.
"""
from fractions import Fraction
from typing import Union

Number = Union[Fraction, float]


def format_rational(value: Fraction) -> str:
    """Render a rational in lowest terms as "p/q" (denominator always explicit)"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse "p/q", an integer or a decimal string into a Fraction"""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Not a rational: {text!r} ({str(e)})")


def round_float(value: float) -> float:
    """Round to 12 significant digits, the precision floats are reported with"""
    return float(format(float(value), ".12g"))


def format_number(value: Number) -> Union[str, float]:
    """Rationals become "p/q" strings, floats stay floats at report precision"""
    if isinstance(value, float):
        return round_float(value)
    return format_rational(value)


def parse_number(value: Union[str, int, float]) -> Number:
    """Inverse of format_number"""
    if isinstance(value, float):
        return value
    return parse_rational(value)
