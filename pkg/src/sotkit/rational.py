"""Exact rational parsing and rendering.

Instances carry weights either as "p/q" strings or as JSON numbers.
Strings are parsed exactly; numbers are converted through their decimal
literal (0.1 becomes 1/10, not the binary double), which is what
``json.load(parse_float=parse_rational)`` feeds us.
"""

from fractions import Fraction

from .errors import InputError

Rat = Fraction

FLOAT_TOL = 1e-9


def parse_rational(value) -> Fraction:
    """Convert a JSON-ish value ("3/4", "0.25", 2, 0.25) to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"expected a rational, got boolean {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # repr() is the shortest decimal that round-trips; expand it exactly
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {value!r}: {exc}") from exc
    raise InputError(f"cannot parse rational from {type(value).__name__} {value!r}")


def render(value: Fraction, mode: str = "exact"):
    """Serialize a Fraction: "p/q" string in exact mode, round-trip float otherwise."""
    if mode == "float":
        return float(value)
    return str(value)


def close(a: Fraction, b: Fraction, mode: str = "exact") -> bool:
    """Equality test: exact, or |a-b| <= 1e-9 * max(1, |a|, |b|) in float mode."""
    if mode == "exact":
        return a == b
    fa, fb = float(a), float(b)
    return abs(fa - fb) <= FLOAT_TOL * max(1.0, abs(fa), abs(fb))
