#!/usr/bin/env python3
"""
datasets.py

Dataset sources for the experiment harness:
- `generate_orthogonal3d`: seeded Gaussian vectors in R^3.
- `load_csv_dataset` / `write_csv_dataset`: (input, target) pairs in a CSV
  with header `x0,x1,...,y0,y1,...`.
"""

from __future__ import annotations

import csv
import logging
import re
from pathlib import Path
from typing import List, Tuple

import numpy as np

from src.numerics.vecnum import Vector, norm, vector


logger = logging.getLogger(__name__)

ORTHOGONAL3D = "orthogonal3d"

# Gaussian draws this close to the origin are redrawn.
MIN_NORM = 1e-8

_COLUMN = re.compile(r"^([xy])(\d+)$")


class DataError(ValueError):
    """Dataset content is malformed or inconsistent."""


def generate_orthogonal3d(n: int, seed: int) -> np.ndarray:
    """n standard-normal 3-vectors, none of them (near) zero."""
    if n < 2:
        raise ValueError(f"need at least 2 vectors, got {n}")
    rng = np.random.default_rng(seed)
    out = rng.standard_normal((n, 3))
    small = norm(out) < MIN_NORM
    while np.any(small):
        out[small] = rng.standard_normal((int(np.count_nonzero(small)), 3))
        small = norm(out) < MIN_NORM
    return out


def _parse_header(header: List[str]) -> Tuple[int, int]:
    columns = [col.strip() for col in header]
    for col in columns:
        if _COLUMN.match(col) is None:
            raise DataError(f"line 1: unexpected column '{col}' (expected x<i> or y<i>)")
    n_in = sum(1 for col in columns if col.startswith("x"))
    n_out = len(columns) - n_in
    expected = [f"x{i}" for i in range(n_in)] + [f"y{i}" for i in range(n_out)]
    if n_in == 0 or n_out == 0 or columns != expected:
        raise DataError("line 1: header must be x0..x{n-1} followed by y0..y{m-1}")
    return n_in, n_out


def load_csv_dataset(path: Path) -> List[Tuple[Vector, Vector]]:
    """Read (input, target) pairs; errors name the offending line."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header:
            raise DataError(f"{path}: empty file")
        n_in, n_out = _parse_header(header)

        pairs: List[Tuple[Vector, Vector]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != n_in + n_out:
                raise DataError(f"{path}: line {line_no}: expected {n_in + n_out} values, got {len(row)}")
            try:
                values = [float(cell) for cell in row]
                pairs.append((vector(values[:n_in]), vector(values[n_in:])))
            except ValueError as exc:
                raise DataError(f"{path}: line {line_no}: {exc}") from exc

    if not pairs:
        raise DataError(f"{path}: dataset has no rows")
    logger.info(f"Loaded {len(pairs)} pairs (input dim {n_in}, target dim {n_out}) from {path}")
    return pairs


def write_csv_dataset(path: Path, inputs: np.ndarray, targets: np.ndarray, force: bool = False) -> Path:
    path = Path(path)
    inputs = np.asarray(inputs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if inputs.ndim != 2 or targets.ndim != 2 or inputs.shape[0] != targets.shape[0]:
        raise DataError(f"inputs {inputs.shape} and targets {targets.shape} must be paired 2-D arrays")
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; pass force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [f"x{i}" for i in range(inputs.shape[1])] + [f"y{i}" for i in range(targets.shape[1])]
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for x, y in zip(inputs, targets):
            writer.writerow([repr(float(v)) for v in x] + [repr(float(v)) for v in y])
    return path
