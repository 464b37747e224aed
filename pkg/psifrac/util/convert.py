import math
import typing as t

from ..error import InvalidParameterError


__all__ = [
    "format_real",
    "parse_param",
    "parse_params",
]


def format_real(value: float) -> str:
    """17 significant digits with `.` as decimal separator.

    Note:
        Formatting goes through `format` rather than `locale`, so the
        output does not depend on the user's locale.
    """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def parse_param(text: str) -> t.Tuple[str, float]:
    """Split `key=value` and convert the value to a float.

    Raises:
        InvalidParameterError: Raised if there is no `=`, the key is empty
            or the value is not a finite number.
    """
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise InvalidParameterError(
            f"parameter must look like key=value, got '{text}'"
        )

    try:
        number = float(value)
    except ValueError:
        raise InvalidParameterError(
            f"parameter {key} must be a number, got '{value}'"
        )
    if not math.isfinite(number):
        raise InvalidParameterError(f"parameter {key} must be finite")
    return key, number


def parse_params(items: t.Iterable[str]) -> t.Dict[str, float]:
    params: t.Dict[str, float] = {}
    for item in items:
        key, value = parse_param(item)
        if key in params:
            raise InvalidParameterError(f"parameter {key} given twice")
        params[key] = value
    return params
