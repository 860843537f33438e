"""CSV import/export of designs and their provenance sidecar."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import Z4DomainError
from .z4core import BinaryDesign, Branching, ColumnClass


class DesignFormatError(Z4DomainError):
    pass


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".prov.json")


def design_to_csv(D: BinaryDesign) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"c{j}" for j in range(1, D.n_factors + 1)])
    w.writerows(D.matrix.tolist())
    return buf.getvalue()


def matrix_to_csv(M: np.ndarray, prefix: str = "c") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{prefix}{j}" for j in range(1, M.shape[1] + 1)])
    w.writerows(np.asarray(M).tolist())
    return buf.getvalue()


def design_from_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise DesignFormatError("empty design file")
    header, body = rows[0], rows[1:]
    m = len(header)
    if header != [f"c{j}" for j in range(1, m + 1)]:
        raise DesignFormatError(f"header must be c1,...,c{m}, got {','.join(header)}")
    if not body:
        raise DesignFormatError("design has no runs")
    out = np.empty((len(body), m), dtype=np.int8)
    for i, r in enumerate(body, start=2):
        if len(r) != m:
            raise DesignFormatError(f"line {i}: expected {m} entries, got {len(r)}")
        for j, cell in enumerate(r):
            cell = cell.strip()
            if cell not in ("1", "-1", "+1"):
                raise DesignFormatError(f"line {i}, column c{j + 1}: {cell!r} is not -1 or 1")
            out[i - 2, j] = int(cell)
    return out


def provenance(D: BinaryDesign) -> dict:
    return {
        "v": None if D.v is None else list(D.v),
        "branches": [
            {"column": b.column, "class": None if b.column_class is None else b.column_class.value}
            for b in D.branches
        ],
    }


def write_design(D: BinaryDesign, path: str | Path) -> None:
    path = Path(path)
    path.write_text(design_to_csv(D))
    sidecar_path(path).write_text(json.dumps(provenance(D), indent=2) + "\n")


def read_design(path: str | Path) -> BinaryDesign:
    """Load a design CSV, attaching provenance from its sidecar when present."""
    path = Path(path)
    M = design_from_csv(path.read_text())
    side = sidecar_path(path)
    if not side.exists():
        return BinaryDesign(M)
    try:
        prov = json.loads(side.read_text())
        v = None if prov.get("v") is None else tuple(int(z) for z in prov["v"])
        branches = tuple(
            Branching(int(b["column"]), None if b.get("class") is None else ColumnClass(b["class"]))
            for b in prov.get("branches", [])
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise DesignFormatError(f"malformed provenance file {side}: {exc}") from None
    return BinaryDesign(M, v=v, branches=branches)
