"""CSV formats for paired datasets and phase samples.

Paired data: header ``x,y`` for univariate sides, otherwise a first line
``# dims: k,m`` followed by the header ``x1,...,xk,y1,...,ym``.  Phase data:
a single ``theta_rad`` column.  Floats are written with ``repr`` so they
read back bit-exactly; files are UTF-8 with LF line endings.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .core import PairedDataset
from .errors import DomainError
from .models.circular import PhaseSample


def _fmt(v) -> str:
    return repr(float(v))


def dataset_to_csv(data: PairedDataset) -> str:
    buf = io.StringIO()
    if data.dx == 1 and data.dy == 1:
        header = ["x", "y"]
    else:
        buf.write(f"# dims: {data.dx},{data.dy}\n")
        header = [f"x{i + 1}" for i in range(data.dx)] + [f"y{j + 1}" for j in range(data.dy)]
    buf.write(",".join(header) + "\n")
    rows = np.hstack([data.x, data.y])
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_dataset(path, data: PairedDataset) -> None:
    Path(path).write_text(dataset_to_csv(data), encoding="utf-8", newline="\n")


def _parse_rows(lines, width, source):
    if not lines:
        raise DomainError(f"{source}: no data rows")
    rows = []
    for lineno, row in lines:
        if len(row) != width:
            raise DomainError(f"{source}:{lineno}: expected {width} fields, got {len(row)}")
        try:
            rows.append([float(v) for v in row])
        except ValueError as exc:
            raise DomainError(f"{source}:{lineno}: {exc}") from None
    return np.array(rows, dtype=float).reshape(-1, width)


def parse_dataset(text: str, source="<string>") -> PairedDataset:
    lines = text.splitlines()
    dims = None
    start = 0
    if lines and lines[0].startswith("#"):
        body = lines[0][1:].strip()
        if not body.startswith("dims:"):
            raise DomainError(f"{source}:1: unrecognised comment line")
        try:
            dx, dy = (int(v) for v in body[len("dims:"):].split(","))
        except ValueError:
            raise DomainError(f"{source}:1: malformed dims line") from None
        dims = (dx, dy)
        start = 1
    if len(lines) <= start:
        raise DomainError(f"{source}: missing header")
    header = [h.strip() for h in lines[start].split(",")]
    if dims is None:
        if header != ["x", "y"]:
            raise DomainError(f"{source}: expected header 'x,y', got {lines[start]!r}")
        dims = (1, 1)
    else:
        expected = [f"x{i + 1}" for i in range(dims[0])] + [f"y{j + 1}" for j in range(dims[1])]
        if header != expected:
            raise DomainError(f"{source}: header does not match dims {dims}")
    reader = csv.reader(lines[start + 1:])
    body = [(i + start + 2, row) for i, row in enumerate(reader) if row]
    arr = _parse_rows(body, dims[0] + dims[1], source)
    return PairedDataset(arr[:, : dims[0]], arr[:, dims[0]:])


def read_dataset(path) -> PairedDataset:
    return parse_dataset(Path(path).read_text(encoding="utf-8"), str(path))


def write_phases(path, sample: PhaseSample) -> None:
    text = "theta_rad\n" + "".join(_fmt(t) + "\n" for t in sample.theta)
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def read_phases(path) -> PhaseSample:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != "theta_rad":
        raise DomainError(f"{path}: expected header 'theta_rad'")
    body = [(i + 2, [line]) for i, line in enumerate(lines[1:]) if line.strip()]
    return PhaseSample(_parse_rows(body, 1, str(path))[:, 0])
