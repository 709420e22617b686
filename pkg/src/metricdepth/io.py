"""CSV ingestion and output with round-trip precision."""

from __future__ import annotations

import csv
import io
import os

import numpy as np

from .ddclass import LabeledSample


class DataError(ValueError):
    """Malformed or unreadable input data."""


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_rows(path) -> list[tuple[int, list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = [(lineno, [c.strip() for c in row]) for lineno, row in enumerate(csv.reader(fh), start=1)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    rows = [(ln, r) for ln, r in rows if r and any(r)]
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def _split_header(rows):
    """A first row with any non-numeric cell is taken as the header."""
    first = rows[0][1]
    if all(_is_number(c) for c in first):
        return None, rows
    return first, rows[1:]


def _numeric_matrix(path, rows, width) -> np.ndarray:
    out = np.empty((len(rows), width))
    for r, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise DataError(f"{path}, line {lineno}: expected {width} fields, found {len(cells)}")
        for c, cell in enumerate(cells):
            try:
                out[r, c] = float(cell)
            except ValueError:
                raise DataError(f"{path}, line {lineno}, column {c + 1}: non-numeric value {cell!r}") from None
    if not np.all(np.isfinite(out)):
        raise DataError(f"{path}: non-finite values are not allowed")
    return out


def read_points_csv(path) -> np.ndarray:
    """Numeric CSV, one observation per row, optional header."""
    header, rows = _split_header(_read_rows(path))
    if not rows:
        raise DataError(f"{path}: header but no data rows")
    width = len(header) if header is not None else len(rows[0][1])
    return _numeric_matrix(path, rows, width)


def read_labeled_csv(path, label_col="label") -> tuple[LabeledSample, np.ndarray]:
    """Points plus integer group labels taken from ``label_col`` (name or 0-based index).

    Returns the sample with labels recoded to 0..G-1 and the original label
    values in code order.
    """
    header, rows = _split_header(_read_rows(path))
    if not rows:
        raise DataError(f"{path}: header but no data rows")
    width = len(header) if header is not None else len(rows[0][1])
    if isinstance(label_col, str) and not label_col.lstrip("-").isdigit():
        if header is None or label_col not in header:
            raise DataError(f"{path}: unknown label column {label_col!r}")
        col = header.index(label_col)
    else:
        col = int(label_col)
        if col < 0:
            col += width
        if not 0 <= col < width:
            raise DataError(f"{path}: label column index {label_col} out of range for {width} columns")
    matrix = _numeric_matrix(path, rows, width)
    raw = matrix[:, col]
    if np.any(raw != np.round(raw)):
        raise DataError(f"{path}: label column must hold integers")
    values, codes = np.unique(raw.astype(int), return_inverse=True)
    points = np.delete(matrix, col, axis=1)
    return LabeledSample(points, codes.astype(int)), values


def write_table(path, rows, header=None):
    """Write rows as CSV; ``path`` of None or '-' means standard output.

    Floats are printed with 17 significant digits so they read back exactly.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path in (None, "-"):
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def write_dicts(path, rows: list[dict]):
    if not rows:
        write_table(path, [], header=[])
        return
    keys = list(rows[0])
    write_table(path, [[r[k] for k in keys] for r in rows], header=keys)


def write_distance_matrix(path, d):
    d = np.asarray(d, dtype=float)
    write_table(path, [[d.shape[0]]] + d.tolist())


def read_distance_matrix(path) -> np.ndarray:
    """Matrix cache: a first row holding n, then n rows of n numbers."""
    rows = _read_rows(path)
    lineno, first = rows[0]
    try:
        n = int(first[0]) if len(first) == 1 else None
    except ValueError:
        n = None
    if n is None or n < 1:
        raise DataError(f"{path}, line {lineno}: expected a single positive integer n")
    body = rows[1:]
    if len(body) != n:
        raise DataError(f"{path}: header says n={n} but found {len(body)} matrix rows")
    return _numeric_matrix(path, body, n)


def default_threads() -> int:
    env = os.environ.get("METRICDEPTH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DataError(f"METRICDEPTH_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1
