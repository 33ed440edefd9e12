"""Deterministic CSV and key = value report writers.

Every CSV starts with a ``#`` version-stamp line followed by a column
header; numbers are written with ``%.17g`` so repeated runs on fixed grids
produce byte-identical bodies.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from . import __version__

__all__ = ["format_value", "write_csv", "write_report", "read_report", "read_csv"]


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    if isinstance(v, (complex, np.complexfloating)):
        return f"{format_value(v.real)}{'+' if v.imag >= 0 else '-'}{format_value(abs(v.imag))}j"
    return str(v)


def write_csv(path, columns: dict, stamp=""):
    """Write equal-length columns (name -> sequence) as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    cols = [np.ravel(np.asarray(columns[k])) if np.ndim(columns[k]) else np.array([columns[k]])
            for k in names]
    n = max((c.size for c in cols), default=0)
    for k, c in zip(names, cols):
        if c.size != n:
            raise ValueError(f"column {k!r} has {c.size} rows, expected {n}")
    with open(path, "w", newline="") as fh:
        fh.write(f"# inghamlab {__version__}{(' ' + stamp) if stamp else ''}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(n):
            w.writerow([format_value(c[i]) for c in cols])
    return path


def read_csv(path):
    """Read a CSV written by :func:`write_csv` into name -> list of strings."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    names = rows[0]
    return {k: [r[i] for r in rows[1:]] for i, k in enumerate(names)}


def write_report(path, record: dict, title=""):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"# inghamlab {__version__}{(' ' + title) if title else ''}\n")
        for k, v in record.items():
            fh.write(f"{k} = {format_value(v)}\n")
    return path


def read_report(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, _, v = line.partition("=")
            out[k.strip()] = v.strip()
    return out
