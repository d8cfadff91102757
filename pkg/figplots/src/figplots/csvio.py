"""Readers for the two heatrev CSV schemas (trajectory and scan)."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

# Minimal identity columns per schema; everything else a panel needs is
# demanded by name, so a missing column is reported as such rather than as
# an unrecognizable file.
TRAJECTORY_KEY_COLUMNS = ("t", "E_over_omega")
SCAN_KEY_COLUMNS = ("beta_S_omega", "beta_B_omega")


class CsvFormatError(ValueError):
    """Input CSV is empty, malformed, or missing a required column."""

    def __init__(self, message: str, column: str | None = None):
        self.column = column
        super().__init__(message)


@dataclass(frozen=True)
class Table:
    path: str
    columns: tuple[str, ...]
    data: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(next(iter(self.data.values()))) if self.data else 0

    def column(self, name: str) -> np.ndarray:
        if name not in self.data:
            raise CsvFormatError(
                f"{self.path}: missing required column {name!r}", column=name
            )
        return self.data[name]


def read_table(path) -> Table:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise CsvFormatError(f"{path}: empty CSV")
    header = tuple(rows[0])
    body = rows[1:]
    if not body:
        raise CsvFormatError(f"{path}: CSV has a header but no data rows")
    try:
        values = np.array([[float(v) for v in row] for row in body])
    except ValueError as exc:
        raise CsvFormatError(f"{path}: non-numeric cell: {exc}") from exc
    if values.shape[1] != len(header):
        raise CsvFormatError(f"{path}: ragged rows (header has {len(header)} columns)")
    data = {name: values[:, i] for i, name in enumerate(header)}
    return Table(path=str(path), columns=header, data=data)


def table_kind(table: Table) -> str:
    """'trajectory' or 'scan', decided from the schema's key columns."""
    if all(c in table.data for c in TRAJECTORY_KEY_COLUMNS):
        return "trajectory"
    if all(c in table.data for c in SCAN_KEY_COLUMNS):
        return "scan"
    raise CsvFormatError(
        f"{table.path}: header matches neither the trajectory nor the scan schema"
    )
