#!/usr/bin/env python3
"""
metrics.py

Error metrics and their HoloNorm-compressed readings, one IterationRecord per
row of an experiment table.

hn_metric(m) = m / (1 + m) squeezes any nonnegative error into [0, 1) without
losing information: holonorm_scalar_inverse recovers m exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict, Sequence

import numpy as np

from src.numerics.normalizers import DomainError, holonorm_scalar, holonorm_scalar_inverse
from src.numerics.vecnum import ShapeError


# Reporting convention: energy units per wall-clock second.
ENERGY_PER_SECOND = 10.0


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    elapsed_s: float
    energy: float
    rmse: float
    mae: float
    hn_rmse: float
    hn_mae: float
    similarity_score: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IterationRecord":
        return cls(
            iteration=int(data["iteration"]),
            elapsed_s=float(data["elapsed_s"]),
            energy=float(data["energy"]),
            rmse=float(data["rmse"]),
            mae=float(data["mae"]),
            hn_rmse=float(data["hn_rmse"]),
            hn_mae=float(data["hn_mae"]),
            similarity_score=float(data["similarity_score"]),
        )


def _paired(pred: Sequence[np.ndarray] | np.ndarray, target: Sequence[np.ndarray] | np.ndarray):
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.size == 0 or t.size == 0:
        raise ValueError("metrics need at least one prediction/target pair")
    if p.shape != t.shape:
        raise ShapeError(f"prediction shape {p.shape} does not match target shape {t.shape}")
    return p, t


def rmse(pred, target) -> float:
    """Root of the grand mean of squared componentwise errors."""
    p, t = _paired(pred, target)
    return float(np.sqrt(np.mean((p - t) ** 2)))


def mae(pred, target) -> float:
    p, t = _paired(pred, target)
    return float(np.mean(np.abs(p - t)))


def hn_metric(m: float) -> float:
    if m < 0:
        raise DomainError(f"hn_metric needs a nonnegative metric, got {m}")
    return float(holonorm_scalar(float(m)))


def hn_metric_inverse(y: float) -> float:
    if not 0.0 <= y < 1.0:
        raise DomainError(f"hn_metric values live in [0, 1), got {y}")
    return float(holonorm_scalar_inverse(float(y)))


def hn_percent(m: float) -> float:
    return 100.0 * hn_metric(m)


def hn_complement(m: float) -> float:
    return 1.0 - hn_metric(m)


def tanh_metric(m: float) -> float:
    """tanh-compressed metric, the reading printed by tanh-normalised runs."""
    if m < 0:
        raise DomainError(f"tanh_metric needs a nonnegative metric, got {m}")
    return float(np.tanh(m))


def energy_proxy(elapsed_s: float) -> float:
    if elapsed_s < 0:
        raise ValueError(f"elapsed time must be >= 0, got {elapsed_s}")
    return ENERGY_PER_SECOND * elapsed_s


def make_record(
    iteration: int,
    elapsed_s: float,
    rmse_value: float,
    mae_value: float,
    similarity_score: float,
) -> IterationRecord:
    return IterationRecord(
        iteration=iteration,
        elapsed_s=elapsed_s,
        energy=energy_proxy(elapsed_s),
        rmse=rmse_value,
        mae=mae_value,
        hn_rmse=hn_metric(rmse_value),
        hn_mae=hn_metric(mae_value),
        similarity_score=similarity_score,
    )
