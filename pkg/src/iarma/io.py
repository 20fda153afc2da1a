"""Series file format: two-column CSV with header ``t,x``.

Values are decimal-point floats in UTF-8; blank lines and lines starting
with ``#`` are ignored.  Rows must be sorted by t with no duplicates (the
series constructor enforces this).  Writers print 17 significant digits so
a written series parses back bit-identically.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from typing import Iterable

import numpy as np

from .errors import ParameterError
from .model import IrregularSeries

__all__ = ["read_series_csv", "write_series_csv", "write_key_values"]

_HEADER = ("t", "x")


class SeriesFormatError(ParameterError):
    """The contents of a series file violate the t,x format."""


def _parse_line(line: str, lineno: int, path: str) -> tuple[float, float]:
    parts = [p.strip() for p in line.split(",")]
    if len(parts) != 2:
        raise SeriesFormatError(
            f"{path}:{lineno}: expected two comma-separated columns, got {len(parts)}"
        )
    try:
        t, x = float(parts[0]), float(parts[1])
    except ValueError:
        raise SeriesFormatError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
    if not (math.isfinite(t) and math.isfinite(x)):
        raise SeriesFormatError(f"{path}:{lineno}: non-finite value in {line!r}")
    return t, x


def read_series_csv(path) -> IrregularSeries:
    """Parse a ``t,x`` CSV file into an :class:`~iarma.model.IrregularSeries`."""
    times: list[float] = []
    values: list[float] = []
    saw_header = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not saw_header:
                cols = tuple(p.strip().lower() for p in line.split(","))
                if cols != _HEADER:
                    raise SeriesFormatError(
                        f"{path}:{lineno}: expected header 't,x', got {line!r}"
                    )
                saw_header = True
                continue
            t, x = _parse_line(line, lineno, str(path))
            times.append(t)
            values.append(x)
    if not saw_header:
        raise SeriesFormatError(f"{path}: empty file (missing 't,x' header)")
    if not times:
        raise SeriesFormatError(f"{path}: no data rows")
    return IrregularSeries(np.asarray(times), np.asarray(values))


def write_series_csv(series: IrregularSeries, path) -> None:
    """Write a series as ``t,x`` CSV with full float precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,x\n")
        for t, x in zip(series.times, series.values):
            fh.write(f"{t:.17g},{x:.17g}\n")


def write_key_values(path, items: Mapping[str, object] | Iterable[tuple[str, object]]) -> None:
    """Write a plain ``key=value`` text file (metadata sidecars)."""
    pairs = items.items() if isinstance(items, Mapping) else items
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for key, value in pairs:
            fh.write(f"{key}={value}\n")
