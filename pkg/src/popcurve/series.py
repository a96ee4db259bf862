"""Raw series ingestion and max-normalization to a fixed-length window."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyFile, MalformedCsv, TooShort

DEFAULT_SIM_LENGTH = 400


@dataclass(frozen=True)
class RawSeries:
    """One species' population trace as exported from a simulation run."""

    values: np.ndarray
    species_name: str
    model_id: str = ""
    dataset_tag: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("values must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must all be finite")
        if np.any(vals < 0):
            raise ValueError("population counts must be >= 0")
        object.__setattr__(self, "values", vals)

    @property
    def origin(self) -> str:
        return f"{self.model_id}/{self.species_name}"


@dataclass(frozen=True)
class NormalizedSeries:
    """Fixed-length trace scaled so its maximum is 1 (all-zero input stays 0)."""

    values: np.ndarray
    origin: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size


def preprocess(raw: RawSeries, sim_length: int = DEFAULT_SIM_LENGTH) -> NormalizedSeries:
    """Truncate to the first ``sim_length`` points and scale to [0, 1] by the
    window maximum. Series shorter than the window are rejected.
    """
    if sim_length <= 0:
        raise ValueError("sim_length must be positive")
    vals = raw.values
    if vals.size < sim_length:
        raise TooShort(
            f"{raw.origin}: {vals.size} points, need {sim_length}"
        )
    window = vals[:sim_length].copy()
    peak = window.max()
    if peak > 0:
        window /= peak
    return NormalizedSeries(values=window, origin=raw.origin)


def ingest_csv(path, dataset_tag: str = "") -> list[RawSeries]:
    """Read one simulation CSV: a header row, a time column, then one column
    per species. Returns one RawSeries per species column in column order.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyFile(f"{path}: no rows")
    header, data_rows = rows[0], rows[1:]
    if not data_rows:
        raise EmptyFile(f"{path}: header only, no data rows")
    if len(header) < 2:
        raise MalformedCsv(f"{path}: need a time column plus at least one species")
    ncols = len(header)
    columns = [[] for _ in range(ncols - 1)]
    for r, row in enumerate(data_rows, start=2):
        if len(row) != ncols:
            raise MalformedCsv(
                f"{path}: row {r} has {len(row)} cells, expected {ncols}"
            )
        for c, cell in enumerate(row[1:], start=2):
            try:
                v = float(cell)
            except ValueError:
                raise MalformedCsv(
                    f"{path}: non-numeric cell {cell!r} at row {r}, column {c}"
                ) from None
            if not math.isfinite(v) or v < 0:
                raise MalformedCsv(
                    f"{path}: invalid population value {cell!r} at row {r}, column {c}"
                )
            columns[c - 2].append(v)
    model_id = path.stem
    return [
        RawSeries(
            values=np.array(col),
            species_name=header[i + 1].strip(),
            model_id=model_id,
            dataset_tag=dataset_tag,
        )
        for i, col in enumerate(columns)
    ]
