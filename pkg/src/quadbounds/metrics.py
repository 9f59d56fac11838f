"""Curve tables and the range-restricted Cramer-von Mises distance."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = ["CurveTable", "cvm_distance", "cvm_distance_normalized", "format_number"]


def format_number(x) -> str:
    """Locale-independent decimal with 15 significant digits."""
    x = float(x) + 0.0  # drops the sign of negative zero
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".15g")


@dataclass
class CurveTable:
    """Named value columns sampled on a shared, strictly increasing threshold grid."""

    h: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        if self.h.ndim != 1 or self.h.size == 0:
            raise ValueError("grid must be a non-empty 1-D array")
        if np.any(np.diff(self.h) <= 0):
            raise ValueError("grid must be strictly increasing")
        cols = {}
        for name, values in self.columns.items():
            values = np.asarray(values, dtype=float)
            if values.shape != self.h.shape:
                raise ValueError(f"column {name!r} has shape {values.shape}, grid has {self.h.shape}")
            finite = values[np.isfinite(values)]
            if np.any((finite < 0) | (finite > 1)):
                raise ValueError(f"column {name!r} has values outside [0, 1]")
            cols[name] = values
        self.columns = cols

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return self.h.size

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["h", *self.columns])
        for i, h in enumerate(self.h):
            writer.writerow([format_number(h), *(format_number(col[i]) for col in self.columns.values())])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def cvm_distance(exact, approx, p_range=(0.0, 0.1)) -> float:
    """Squared Cramer-von Mises distance ``sum (F_i - G_i)^2 |F_{i+1} - F_i|``.

    ``exact`` and ``approx`` are sampled on the same grid. Only cells whose left
    endpoint has ``exact`` inside ``p_range`` contribute. The measure comes from the
    exact curve; its absolute increment is used so decreasing curves (false-alarm
    bounds) are handled like increasing ones.

    Raises
    ------
    ValueError
        On mismatched shapes, an invalid range, or when no cell falls in range.
    """
    f = np.asarray(exact, dtype=float)
    g = np.asarray(approx, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise ValueError("exact and approx must be 1-D arrays on the same grid")
    lo, hi = p_range
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"probability range must satisfy 0 <= lo < hi <= 1, got {p_range}")
    if f.size < 2:
        raise ValueError("need at least two grid points")
    left = f[:-1]
    mask = (left >= lo) & (left <= hi)
    if not mask.any():
        raise ValueError(f"no grid cell has an exact value inside [{lo}, {hi}]")
    diff = (left - g[:-1])[mask]
    return float(np.sum(diff * diff * np.abs(np.diff(f))[mask]))


def cvm_distance_normalized(exact, approx, p_range=(0.0, 0.1)) -> float:
    """:func:`cvm_distance` divided by the width of ``p_range``."""
    return cvm_distance(exact, approx, p_range) / (p_range[1] - p_range[0])
