"""CSV input and output for curve datasets.

Curves: one row per curve, a header whose first column is ``id``, followed
by one column per grid value.  Responses: long format with header
``curve,response`` and one strictly positive response per row, keyed by the
curve identifier.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import StructuralError
from .functional import Curve, Dataset


class ParseError(Exception):
    """A CSV file could not be parsed; message carries path and line number."""


def load_curves(path) -> list[Curve]:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    curves: list[Curve] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not header or header[0].strip().lower() != "id":
            raise ParseError(f"{path}:1: expected a header row starting with 'id'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 4:
                raise ParseError(f"{path}:{lineno}: a curve needs at least 3 values")
            try:
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric curve value ({exc})") from None
            try:
                curves.append(Curve(values, identifier=row[0].strip()))
            except StructuralError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not curves:
        raise ParseError(f"{path}: no curves found")
    ids = [c.identifier for c in curves]
    if len(set(ids)) != len(ids):
        raise ParseError(f"{path}: duplicate curve identifiers")
    return curves


def load_responses(path, curves: list[Curve]) -> Dataset:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    by_id: dict[str, list[float]] = {c.identifier: [] for c in curves}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["curve", "response"]:
            raise ParseError(f"{path}:1: expected header 'curve,response'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise ParseError(f"{path}:{lineno}: expected 'curve,response'")
            cid = row[0].strip()
            if cid not in by_id:
                raise ParseError(f"{path}:{lineno}: unknown curve identifier {cid!r}")
            try:
                by_id[cid].append(float(row[1]))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric response ({exc})") from None
    missing = [cid for cid, vals in by_id.items() if not vals]
    if missing:
        raise ParseError(f"{path}: no responses for curves {missing}")
    try:
        return Dataset(curves, [np.asarray(by_id[c.identifier]) for c in curves])
    except StructuralError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_curves(path, curves: list[Curve]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    length = len(curves[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"v{j + 1}" for j in range(length)])
        for c in curves:
            writer.writerow([c.identifier] + [format(v, ".12g") for v in c.values])
    return path


def write_responses(path, ds: Dataset) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["curve", "response"])
        for curve, resp in zip(ds.curves, ds.responses):
            for value in resp:
                writer.writerow([curve.identifier, format(float(value), ".12g")])
    return path
