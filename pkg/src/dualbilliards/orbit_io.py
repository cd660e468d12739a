"""CSV export and import of orbits.

Floats are written with 17 significant digits so that a round trip is exact.
"""

from __future__ import annotations

import csv
import io
from typing import Optional

ANGULAR_COLUMNS = ["step", "x", "y", "phi", "r", "phibar", "delta", "case"]
BIRKHOFF_COLUMNS = ["step", "phi", "p", "hit_x", "hit_y", "integral_value"]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _write(rows, columns, path: Optional[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def angular_rows(states, diags):
    """Rows for an angular orbit; the diagnostics of row ``k`` describe the
    step from state ``k`` to ``k + 1`` and are blank on the last row."""
    rows = []
    for k, s in enumerate(states):
        d = diags[k] if k < len(diags) else None
        rows.append([k, s.point.x, s.point.y, s.phi, s.r,
                     None if d is None else d.phibar,
                     None if d is None else d.delta,
                     "" if d is None else d.case])
    return rows


def write_angular_csv(states, diags, path: Optional[str] = None) -> str:
    return _write(angular_rows(states, diags), ANGULAR_COLUMNS, path)


def birkhoff_rows(states, integral=None):
    from .birkhoff import eval_integral
    rows = []
    for k, s in enumerate(states):
        hit = s.hit
        rows.append([k, s.line.phi, s.line.p,
                     None if hit is None else hit.x,
                     None if hit is None else hit.y,
                     None if integral is None else eval_integral(integral, s.line)])
    return rows


def write_birkhoff_csv(states, integral=None, path: Optional[str] = None) -> str:
    return _write(birkhoff_rows(states, integral), BIRKHOFF_COLUMNS, path)


def read_orbit_csv(path: str):
    """Returns ``(kind, rows)`` with ``kind`` in ``{"angular", "birkhoff"}``
    and each row a dict of floats (blank cells become ``None``)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header == ANGULAR_COLUMNS:
            kind = "angular"
        elif header == BIRKHOFF_COLUMNS:
            kind = "birkhoff"
        else:
            raise ValueError(f"unrecognised CSV header {header}")
        rows = []
        for raw in reader:
            row = {}
            for name, cell in zip(header, raw):
                if name == "case":
                    row[name] = cell
                elif name == "step":
                    row[name] = int(cell)
                else:
                    row[name] = float(cell) if cell != "" else None
            rows.append(row)
    return kind, rows

