import json
import math
import sys
import typing as t

from ..quad import EvalResult
from ..util.convert import format_real


__all__ = [
    "CSV_HEADER",
    "Row_t",
    "render",
    "render_csv",
    "render_json",
    "write",
]


CSV_HEADER = "x,value,err_est"

Row_t = t.Tuple[float, EvalResult]


def render_csv(rows: t.Sequence[Row_t]) -> str:
    lines = [CSV_HEADER]
    for x, result in rows:
        lines.append(",".join((
            format_real(x),
            format_real(result.value),
            format_real(result.err_est),
        )))
    return "\n".join(lines) + "\n"


def _json_number(value: float) -> t.Union[float, str]:
    # JSON has no literal for nan and the infinities
    if math.isfinite(value):
        return value
    return format_real(value)


def render_json(inputs: t.Mapping[str, t.Any], rows: t.Sequence[Row_t]) -> str:
    """Object with the echoed `inputs` and one `results` entry per point."""
    results = []
    for x, result in rows:
        entry: t.Dict[str, t.Any] = {
            "x": _json_number(x),
            "value": _json_number(result.value),
            "err_est": _json_number(result.err_est),
        }
        if result.notes:
            entry["notes"] = list(result.notes)
        results.append(entry)

    doc = {"inputs": dict(inputs), "results": results}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render(
    fmt: str,
    inputs: t.Mapping[str, t.Any],
    rows: t.Sequence[Row_t],
) -> str:
    if fmt == "json":
        return render_json(inputs, rows)
    return render_csv(rows)


def write(text: str, path: t.Optional[str] = None) -> None:
    """Write to `path`, or to standard output when it is None or `-`."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return

    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
