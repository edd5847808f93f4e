"""Readers and writers for the matrix JSON, split descriptor JSON and CSV formats.

Matrix JSON is ``{"n": int, "re": [[...]], "im": [[...]]}``.  Floats are
written with ``repr`` (shortest string that round-trips exactly).
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .split import SpectralSplit


def _load_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def matrix_to_dict(M) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    if not np.isfinite(M).all():
        raise InputError("matrix has non-finite entries")
    return {"n": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def _part(data: dict, key: str, n: int, where: str) -> np.ndarray:
    rows = data.get(key)
    if not isinstance(rows, list) or len(rows) != n:
        raise InputError(f"{where}: field '{key}' must be a list of {n} rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"{where}: field '{key}' row {i} must have {n} entries")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise InputError(f"{where}: field '{key}'[{i}][{j}] is not a finite number")
    return np.array(rows, dtype=float)


def matrix_from_dict(data, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected a JSON object")
    n = data.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"{where}: field 'n' must be a positive integer")
    re = _part(data, "re", n, where)
    im = _part(data, "im", n, where) if "im" in data else np.zeros((n, n))
    return re + 1j * im


def read_matrix(path) -> np.ndarray:
    return matrix_from_dict(_load_json(path), where=str(path))


def write_matrix(M, path) -> None:
    dump_json(matrix_to_dict(M), path)


def read_split(path) -> SpectralSplit:
    return SpectralSplit.from_dict(_load_json(path))


def write_split(split: SpectralSplit, path) -> None:
    dump_json(split.to_dict(), path)


def write_instance(directory, A, V, split: SpectralSplit, prefix: str = "") -> dict:
    """Dump ``A``, ``V`` and the split descriptor; returns the file paths."""
    os.makedirs(directory, exist_ok=True)
    paths = {k: os.path.join(directory, f"{prefix}{k}.json") for k in ("A", "V", "split")}
    write_matrix(A, paths["A"])
    write_matrix(V, paths["V"])
    write_split(split, paths["split"])
    return paths


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise InputError(f"row has {len(row)} cells, header has {len(header)}")
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list, list]:
    """Inverse of :func:`csv_text`: header plus rows of floats (``None`` for
    empty cells, strings for non-numeric cells)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty CSV") from None
    rows = []
    for line in reader:
        row = []
        for cell in line:
            if cell == "":
                row.append(None)
            else:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
        rows.append(row)
    return header, rows
