"""CSV artifacts: traces, classification reports and family manifests.

Column orders are fixed here and nowhere else. Floats are written with
``repr`` so a re-run writes the same bytes; every file is written to a
temporary sibling and renamed into place.
"""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from .flow import LiftedTrace
from .singular import PointClassification

__all__ = [
    "TRACE_COLUMNS",
    "REPORT_COLUMNS",
    "MANIFEST_COLUMNS",
    "atomic_write_bytes",
    "atomic_write_text",
    "csv_text",
    "trace_rows",
    "report_row",
    "emit_csv",
]

TRACE_COLUMNS = ("t", "x", "y", "p_or_q", "chart", "Delta", "F", "causal", "event")
REPORT_COLUMNS = ("x", "y", "K1", "class", "roots", "eps1", "eps2")
MANIFEST_COLUMNS = ("member_id", "role", "parameter", "fit_model", "fit_values", "fit_stderr", "causal")


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float) or hasattr(v, "dtype"):
        f = float(v)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return repr(f)
    if isinstance(v, complex):
        return repr(v)
    return str(v)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        if isinstance(r, dict):
            r = [r.get(c) for c in columns]
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def trace_rows(tr: LiftedTrace) -> list[tuple]:
    return list(tr.rows())


def _eps_cell(z) -> str:
    if z is None:
        return ""
    z = complex(z)
    if z.imag == 0.0:
        return repr(z.real)
    return f"{z.real!r}{z.imag:+}j"


def report_row(pc: PointClassification) -> dict:
    e1 = e2 = None
    if pc.eps is not None:
        e1, e2 = pc.eps.eps1, pc.eps.eps2
    return {
        "x": float(pc.point[0]),
        "y": float(pc.point[1]),
        "K1": float(pc.K1),
        "class": pc.tag,
        "roots": pc.roots_text(),
        "eps1": _eps_cell(e1),
        "eps2": _eps_cell(e2),
    }


def emit_csv(path, obj) -> int:
    """Write a trace, a list of classifications or manifest rows; returns the data row count."""
    if isinstance(obj, LiftedTrace):
        rows = trace_rows(obj)
        text = csv_text(TRACE_COLUMNS, rows)
    else:
        items = list(obj)
        if items and isinstance(items[0], PointClassification):
            rows = [report_row(pc) for pc in items]
            text = csv_text(REPORT_COLUMNS, rows)
        else:
            rows = items
            text = csv_text(MANIFEST_COLUMNS, rows)
    atomic_write_text(path, text)
    return len(rows)
