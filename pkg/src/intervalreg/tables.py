"""Interval-valued data tables.

The atomic cell is a closed real interval [lower, upper].  A table is a
named grid of such cells with at most one column designated as the
response.  This module also provides the midpoint / half-range transform
used by every regression method in the package, aggregation of a classic
(single-valued) table into an interval table, and CSV input/output.

CSV layout: two columns per interval variable, suffixed ``_lo`` and
``_hi`` (e.g. ``Y_lo,Y_hi,X1_lo,X1_hi``).  UTF-8, comma separated, one
header line, decimal point ``.``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import isfinite
from typing import Sequence

import numpy as np


class TableError(ValueError):
    """Malformed interval data or classic-table input."""


class CsvFormatError(TableError):
    """Structural problem in a CSV file (header, pairing, cell types)."""


class IntervalOrderError(TableError):
    """A cell with lower > upper."""


def _check_name(name: str) -> str:
    if not isinstance(name, str) or not name.strip():
        raise TableError(f"variable name must be a non-empty string, got {name!r}")
    if "," in name or "\n" in name:
        raise TableError(f"variable name may not contain commas or newlines: {name!r}")
    return name


@dataclass(frozen=True)
class Interval:
    """A closed real interval [lower, upper]; degenerate (lower == upper) is legal."""

    lower: float
    upper: float

    def __post_init__(self):
        lo = float(self.lower)
        hi = float(self.upper)
        if not (isfinite(lo) and isfinite(hi)):
            raise TableError(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise IntervalOrderError(f"interval lower bound exceeds upper: [{lo}, {hi}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2.0

    @property
    def half_range(self) -> float:
        return (self.upper - self.lower) / 2.0

    def __repr__(self) -> str:
        return f"[{self.lower}, {self.upper}]"


@dataclass(frozen=True)
class IntervalTable:
    """Named interval columns, optionally with one designated response.

    ``variable_names`` keeps the source column order; ``rows`` is an
    n x (number of variables) grid of :class:`Interval`.  A table with
    ``response_name=None`` is predictor-only (prediction input,
    aggregation output).  Instances are immutable and safe to share.
    """

    variable_names: tuple[str, ...]
    rows: tuple[tuple[Interval, ...], ...]
    response_name: str | None = None

    def __post_init__(self):
        names = tuple(_check_name(n) for n in self.variable_names)
        if len(set(names)) != len(names):
            raise TableError(f"duplicate variable names in {names}")
        rows = tuple(tuple(r) for r in self.rows)
        if not rows:
            raise TableError("table needs at least one row")
        if not names:
            raise TableError("table needs at least one variable")
        for i, row in enumerate(rows):
            if len(row) != len(names):
                raise TableError(
                    f"row {i} has {len(row)} cells, expected {len(names)}"
                )
            for cell in row:
                if not isinstance(cell, Interval):
                    raise TableError(f"row {i} contains a non-interval cell: {cell!r}")
        if self.response_name is not None:
            if self.response_name not in names:
                raise TableError(
                    f"response {self.response_name!r} is not a table variable"
                )
            if len(names) < 2:
                raise TableError("a table with a response needs at least one predictor")
        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "rows", rows)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def predictor_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.variable_names if n != self.response_name)

    def with_response(self, name: str) -> "IntervalTable":
        """Return the same table with ``name`` designated as the response."""
        return IntervalTable(self.variable_names, self.rows, response_name=name)

    def column(self, name: str) -> tuple[Interval, ...]:
        try:
            j = self.variable_names.index(name)
        except ValueError:
            raise TableError(f"no variable named {name!r}") from None
        return tuple(row[j] for row in self.rows)

    def take(self, indices: Sequence[int]) -> "IntervalTable":
        """Row subset in the given order (used by cross-validation folds)."""
        picked = tuple(self.rows[int(i)] for i in indices)
        return IntervalTable(self.variable_names, picked, self.response_name)

    def response_intervals(self) -> tuple[Interval, ...]:
        if self.response_name is None:
            raise TableError("table has no designated response")
        return self.column(self.response_name)


@dataclass(frozen=True, eq=False)
class CenterRangeView:
    """Midpoint and half-range matrices derived from an interval table.

    ``centers_X[i, j] = (a_ij + b_ij) / 2`` and
    ``halfranges_X[i, j] = (b_ij - a_ij) / 2``; likewise for the response
    vectors.  Reconstructing ``[c - r, c + r]`` recovers the source
    endpoints up to floating rounding of the (c, r) pair.
    """

    centers_X: np.ndarray
    centers_y: np.ndarray
    halfranges_X: np.ndarray
    halfranges_y: np.ndarray
    predictor_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for arr in (self.centers_X, self.centers_y, self.halfranges_X, self.halfranges_y):
            arr.flags.writeable = False


def _predictor_indices(table: IntervalTable) -> list[int]:
    return [j for j, n in enumerate(table.variable_names) if n != table.response_name]


def to_center_range(table: IntervalTable) -> CenterRangeView:
    """Split a table into midpoint and half-range design matrices."""
    if table.response_name is None:
        raise TableError("center/range view needs a designated response")
    pred_idx = _predictor_indices(table)
    resp_idx = table.variable_names.index(table.response_name)
    n, p = table.n_rows, len(pred_idx)
    cx = np.empty((n, p))
    rx = np.empty((n, p))
    cy = np.empty(n)
    ry = np.empty(n)
    for i, row in enumerate(table.rows):
        for k, j in enumerate(pred_idx):
            cx[i, k] = row[j].midpoint
            rx[i, k] = row[j].half_range
        cy[i] = row[resp_idx].midpoint
        ry[i] = row[resp_idx].half_range
    return CenterRangeView(cx, cy, rx, ry, predictor_names=table.predictor_names)


def predictor_bounds(table: IntervalTable) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper endpoint matrices of the predictor columns (n x p)."""
    pred_idx = _predictor_indices(table)
    lo = np.array([[row[j].lower for j in pred_idx] for row in table.rows])
    hi = np.array([[row[j].upper for j in pred_idx] for row in table.rows])
    return lo, hi


def response_bounds(table: IntervalTable) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper endpoint vectors of the response column."""
    col = table.response_intervals()
    return np.array([c.lower for c in col]), np.array([c.upper for c in col])


# ---------------------------------------------------------------------------
# Classic-table aggregation
# ---------------------------------------------------------------------------

def aggregate_classic(
    columns: Sequence[str],
    rows: Sequence[Sequence],
    concept: str,
    value_columns: Sequence[str] | None = None,
) -> IntervalTable:
    """Group a classic (single-valued) table and summarize columns as intervals.

    One output row per distinct value of the ``concept`` column, ordered by
    first appearance; every value column becomes ``[min, max]`` over its
    group.  The result has no designated response.

    Parameters
    ----------
    columns : column names of the classic table.
    rows : cell grid; value-column cells must parse as decimal numbers.
    concept : name of the grouping column (string or numeric values).
    value_columns : columns to aggregate; defaults to all except ``concept``.
    """
    columns = list(columns)
    if concept not in columns:
        raise TableError(f"unknown concept column {concept!r}")
    if value_columns is None:
        value_columns = [c for c in columns if c != concept]
    else:
        value_columns = list(value_columns)
        for c in value_columns:
            if c not in columns:
                raise TableError(f"unknown value column {c!r}")
    if not value_columns:
        raise TableError("no value columns to aggregate")
    if not rows:
        raise TableError("classic table is empty")

    concept_idx = columns.index(concept)
    value_idx = [columns.index(c) for c in value_columns]

    order: list = []
    groups: dict = {}
    for i, row in enumerate(rows):
        if len(row) != len(columns):
            raise TableError(f"row {i} has {len(row)} cells, expected {len(columns)}")
        key = row[concept_idx]
        if key not in groups:
            groups[key] = []
            order.append(key)
        parsed = []
        for c, j in zip(value_columns, value_idx):
            try:
                v = float(row[j])
            except (TypeError, ValueError):
                raise TableError(
                    f"non-numeric cell in column {c!r}, row {i}: {row[j]!r}"
                ) from None
            if not isfinite(v):
                raise TableError(f"non-finite cell in column {c!r}, row {i}")
            parsed.append(v)
        groups[key].append(parsed)

    out_rows = []
    for key in order:
        block = np.asarray(groups[key])
        out_rows.append(
            tuple(Interval(lo, hi) for lo, hi in zip(block.min(axis=0), block.max(axis=0)))
        )
    return IntervalTable(tuple(value_columns), tuple(out_rows))


# ---------------------------------------------------------------------------
# CSV input/output
# ---------------------------------------------------------------------------

def _parse_header(header: Sequence[str]) -> tuple[list[str], dict[str, list[int]]]:
    """Map `name_lo`/`name_hi` column pairs to variable names in file order."""
    seen: dict[str, list[int | None]] = {}
    order: list[str] = []
    for idx, col in enumerate(header):
        col = col.strip()
        if col.endswith("_lo"):
            name, slot = col[:-3], 0
        elif col.endswith("_hi"):
            name, slot = col[:-3], 1
        else:
            raise CsvFormatError(
                f"column {col!r} has neither `_lo` nor `_hi` suffix"
            )
        if not name:
            raise CsvFormatError(f"column {col!r} has an empty variable name")
        if name not in seen:
            seen[name] = [None, None]
            order.append(name)
        if seen[name][slot] is not None:
            raise CsvFormatError(f"duplicate column for variable {name!r}")
        seen[name][slot] = idx
    for name in order:
        lo_idx, hi_idx = seen[name]
        if lo_idx is None:
            raise CsvFormatError(f"variable {name!r} is missing its `_lo` column")
        if hi_idx is None:
            raise CsvFormatError(f"variable {name!r} is missing its `_hi` column")
    return order, {n: [seen[n][0], seen[n][1]] for n in order}


def read_interval_csv(path, response: str | None = None) -> IntervalTable:
    """Read an interval table from a `_lo`/`_hi` paired CSV file.

    ``response`` optionally designates the response variable; prediction
    inputs may leave it unset.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty") from None
        order, slots = _parse_header(header)
        rows = []
        for lineno, rec in enumerate(reader, start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise CsvFormatError(
                    f"{path}: row {lineno} has {len(rec)} cells, expected {len(header)}"
                )
            cells = []
            for name in order:
                lo_idx, hi_idx = slots[name]
                try:
                    lo = float(rec[lo_idx])
                    hi = float(rec[hi_idx])
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: non-numeric cell for variable {name!r}, row {lineno}"
                    ) from None
                try:
                    cells.append(Interval(lo, hi))
                except IntervalOrderError:
                    raise IntervalOrderError(
                        f"{path}: variable {name!r}, row {lineno}: "
                        f"lower bound {lo} exceeds upper bound {hi}"
                    ) from None
                except TableError as exc:
                    raise CsvFormatError(
                        f"{path}: variable {name!r}, row {lineno}: {exc}"
                    ) from None
            rows.append(tuple(cells))
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    return IntervalTable(tuple(order), tuple(rows), response_name=response)


def write_interval_csv(table: IntervalTable, path) -> None:
    """Write a table in the paired `_lo`/`_hi` CSV layout.

    The response designation is not part of the file format; it is chosen
    again when the file is read.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header: list[str] = []
        for name in table.variable_names:
            header += [f"{name}_lo", f"{name}_hi"]
        writer.writerow(header)
        for row in table.rows:
            rec: list[str] = []
            for cell in row:
                rec += [repr(cell.lower), repr(cell.upper)]
            writer.writerow(rec)


def read_classic_csv(path) -> tuple[list[str], list[list[str]]]:
    """Read a classic CSV as (header, raw string rows); parsing happens later."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [c.strip() for c in next(reader)]
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty") from None
        rows = [rec for rec in reader if rec and any(c.strip() for c in rec)]
    return header, rows
