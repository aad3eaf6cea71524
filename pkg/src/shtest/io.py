"""File input and output: data matrices, report tables, atomic writes."""

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ParseError

REPORT_COLUMNS = (
    "scenario_id",
    "method",
    "statistic_mean",
    "rejection_rate",
    "se",
    "reps",
    "alpha",
    "seed",
    "n_x",
    "n_y",
    "n_nonzero",
)


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_matrix(path, transpose=False):
    """Read a numeric CSV with observations in rows.

    A first row containing any non-numeric cell is taken as a header and
    skipped. With ``transpose`` the file is read with observations in columns.

    Raises
    ------
    ParseError
        On empty input, ragged rows or non-numeric cells, with the 1-based
        line and column of the offending cell.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if rows and not all(_is_number(c) for c in rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise ParseError("no numeric rows", path=path)
    width = len(rows[0][1])
    values = np.empty((len(rows), width))
    for k, (line, row) in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"expected {width} fields, found {len(row)}", path=path, line=line)
        for j, cell in enumerate(row):
            try:
                values[k, j] = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r}", path=path, line=line, column=j + 1) from None
    if not np.all(np.isfinite(values)):
        k, j = np.argwhere(~np.isfinite(values))[0]
        raise ParseError("non-finite value", path=path, line=rows[k][0], column=int(j) + 1)
    return values.T.copy() if transpose else values


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def format_table(rows, columns, fmt="csv"):
    """Render a list of dicts as CSV (shortest round-trip floats) or JSON."""
    if fmt == "json":
        return json.dumps([{c: r.get(c) for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _convert(value):
    if value == "":
        return None
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def read_table(path):
    """Read a CSV written by :func:`format_table` back into a list of dicts."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError("empty report", path=path)
        rows = []
        for line, r in enumerate(reader, start=2):
            if None in r or any(v is None for v in r.values()):
                raise ParseError("row width does not match header", path=path, line=line)
            rows.append({k: _convert(v) for k, v in r.items()})
    return rows
