"""Flat-file input and output."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DataError


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def read_data_csv(path) -> np.ndarray:
    """Headerless CSV, one observation per line. Blank lines are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise DataError(f"{path}:{lineno}: cannot parse {text!r} as a number") from None
            if not math.isfinite(v):
                raise DataError(f"{path}:{lineno}: non-finite value {text!r}")
            values.append(v)
    return np.array(values, dtype=float)


def write_data_csv(path, xs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x in np.asarray(xs, dtype=float).ravel():
            fh.write(fmt(x) + "\n")


def write_table_csv(path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    cols = [np.asarray(columns[n], dtype=float).ravel() for n in names]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*cols):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_draws_csv(path, draws: np.ndarray) -> None:
    """One draw per row, k columns, no header."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.asarray(draws, dtype=float):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_draws_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(path, obj) -> None:
    # float repr is the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(obj, indent=2, default=_default) + "\n", encoding="utf-8")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
