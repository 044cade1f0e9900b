#!/usr/bin/env python3
"""
vecnum.py

Dense vector/matrix helpers shared by the normalizers, the toy transformer and
the experiment harness. Everything is float64 numpy; the constructors below
validate finiteness once so downstream code can assume clean inputs.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np


Vector = np.ndarray  # shape (d,), float64, finite
Matrix = np.ndarray  # shape (rows, cols), float64, finite

ArrayLike = Union[np.ndarray, Sequence[float], Iterable[float]]

NORM_ORDERS = (1, 2)


class ShapeError(ValueError):
    """Operands do not conform (dimension or shape mismatch)."""


class NonFiniteError(ValueError):
    """A NaN or infinite value was passed to a constructor."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def vector(values: ArrayLike) -> Vector:
    """Build a read-only float64 vector, rejecting empty or non-finite input."""
    arr = np.atleast_1d(np.array(values, dtype=np.float64))
    if arr.ndim != 1:
        raise ShapeError(f"vector needs a flat sequence, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeError("vector must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"vector has non-finite components: {arr}")
    return _frozen(arr)


def matrix(rows: ArrayLike, n_rows: int | None = None, n_cols: int | None = None) -> Matrix:
    """
    Build a read-only float64 matrix.

    Accepts nested rows, or a flat row-major sequence together with
    `n_rows`/`n_cols`.
    """
    arr = np.array(rows, dtype=np.float64)
    if n_rows is not None or n_cols is not None:
        if n_rows is None or n_cols is None:
            raise ShapeError("both n_rows and n_cols are required for flat entries")
        if arr.size != n_rows * n_cols:
            raise ShapeError(f"{arr.size} entries cannot fill a {n_rows}x{n_cols} matrix")
        arr = arr.reshape(n_rows, n_cols)
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeError(f"matrix needs a non-empty 2-D layout, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix has non-finite entries")
    return _frozen(arr)


def identity(n: int) -> Matrix:
    return _frozen(np.eye(n, dtype=np.float64))


def _check_order(p: int) -> None:
    if p not in NORM_ORDERS:
        raise ValueError(f"norm order must be one of {NORM_ORDERS}, got {p}")


def norm(x: np.ndarray, p: int = 2, keepdims: bool = False) -> np.ndarray | float:
    """L1 or L2 norm along the last axis (a float for a plain vector)."""
    _check_order(p)
    x = np.asarray(x, dtype=np.float64)
    if p == 2:
        out = np.sqrt(np.sum(x * x, axis=-1, keepdims=keepdims))
    else:
        out = np.sum(np.abs(x), axis=-1, keepdims=keepdims)
    return float(out) if np.ndim(out) == 0 else out


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise ShapeError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")


def dot(x: np.ndarray, y: np.ndarray) -> np.ndarray | float:
    """Inner product along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_same_dim(x, y)
    out = np.sum(x * y, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def matvec(m: Matrix, x: Vector) -> Vector:
    m = np.asarray(m, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if m.ndim != 2 or x.ndim != 1 or m.shape[1] != x.shape[0]:
        raise ShapeError(f"cannot multiply {m.shape} matrix by {x.shape} vector")
    return _frozen(m @ x)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return _frozen(a @ b)


def transpose(m: Matrix) -> Matrix:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"transpose needs a matrix, got shape {m.shape}")
    return _frozen(np.ascontiguousarray(m.T))


def outer(x: Vector, y: Vector) -> Matrix:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise ShapeError("outer product needs two vectors")
    return _frozen(np.outer(x, y))
