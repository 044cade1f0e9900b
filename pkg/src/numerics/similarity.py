#!/usr/bin/env python3
"""
similarity.py

Cosine similarity, HoloNorm similarity and the similarity-score report that
measures how far a normalizer bends pairwise angles (0 means geometry kept).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from src.numerics.normalizers import LayerNormParams, NormalizerKind, holonorm, normalize, tanh_normalize
from src.numerics.vecnum import ShapeError, dot, norm


logger = logging.getLogger(__name__)

DEFAULT_PAIR_BUDGET = 100_000

# Below this norm a vector counts as zero for cosine purposes.
ZERO_TOL = 1e-300


class ZeroVectorError(ValueError):
    """Cosine is undefined for a zero vector."""


class NotOrthogonalError(ValueError):
    """Input pair is expected to be orthogonal."""


@dataclass(frozen=True)
class SimilarityScoreReport:
    mean_abs_change: float  # percent
    max_abs_change: float  # percent
    pair_count: int
    skipped_vectors: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean_abs_change": self.mean_abs_change,
            "max_abs_change": self.max_abs_change,
            "pair_count": self.pair_count,
            "skipped_vectors": self.skipped_vectors,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SimilarityScoreReport":
        return cls(
            mean_abs_change=float(data["mean_abs_change"]),
            max_abs_change=float(data["max_abs_change"]),
            pair_count=int(data["pair_count"]),
            skipped_vectors=int(data.get("skipped_vectors", 0)),
        )


def cosine(x: np.ndarray, y: np.ndarray) -> float:
    """dot(x, y) / (||x|| ||y||), clipped to [-1, 1]."""
    nx, ny = norm(x), norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for a zero vector")
    return float(np.clip(dot(x, y) / (nx * ny), -1.0, 1.0))


def holonorm_similarity(x: np.ndarray, y: np.ndarray) -> float:
    """dot(x, y) / ((1 + ||x||)(1 + ||y||)): signed, magnitude below 1."""
    return dot(x, y) / ((1.0 + norm(x)) * (1.0 + norm(y)))


def _pair_indices(n: int, pair_budget: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """All unordered pairs, or a seeded subset of `pair_budget` of them."""
    rows, cols = np.triu_indices(n, k=1)
    if rows.size > pair_budget:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(rows.size, size=pair_budget, replace=False))
        rows, cols = rows[pick], cols[pick]
    return rows, cols


def _pairwise_cosines(vectors: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    unit = vectors / norm(vectors, keepdims=True)
    return np.clip(np.sum(unit[rows] * unit[cols], axis=-1), -1.0, 1.0)


def similarity_change(
    before: np.ndarray,
    after: np.ndarray,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    seed: int = 0,
) -> SimilarityScoreReport:
    """
    Percent-scaled change of pairwise cosines between two aligned state sets.

    `before[k]` and `after[k]` are the same item before and after a transform.
    Items that are zero on either side are skipped and counted.
    """
    before = np.asarray(before, dtype=np.float64)
    after = np.asarray(after, dtype=np.float64)
    before = before.reshape(-1, before.shape[-1])
    after = after.reshape(-1, after.shape[-1])
    if before.shape[0] != after.shape[0]:
        raise ShapeError(f"state counts differ: {before.shape[0]} vs {after.shape[0]}")
    if pair_budget < 1:
        raise ValueError("pair_budget must be >= 1")

    keep = (norm(before) > ZERO_TOL) & (norm(after) > ZERO_TOL)
    skipped = int(before.shape[0] - np.count_nonzero(keep))
    if skipped:
        logger.warning(f"Similarity score skipped {skipped} zero vector(s)")
    before, after = before[keep], after[keep]
    if before.shape[0] < 2:
        raise ValueError("similarity score needs at least 2 nonzero vectors")

    rows, cols = _pair_indices(before.shape[0], pair_budget, seed)
    change = 100.0 * np.abs(_pairwise_cosines(before, rows, cols) - _pairwise_cosines(after, rows, cols))
    return SimilarityScoreReport(
        mean_abs_change=float(np.mean(change)),
        max_abs_change=float(np.max(change)),
        pair_count=int(rows.size),
        skipped_vectors=skipped,
    )


def similarity_score(
    vectors: Sequence[np.ndarray] | np.ndarray,
    kind: NormalizerKind,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    seed: int = 0,
    params: Optional[LayerNormParams] = None,
) -> SimilarityScoreReport:
    """Similarity score of `kind` applied to a set of vectors."""
    arr = np.asarray(vectors, dtype=np.float64)
    kind = NormalizerKind(kind)
    if kind is NormalizerKind.LAYERNORM and params is None:
        params = LayerNormParams.default(arr.shape[-1])
    return similarity_change(arr, normalize(kind, arr, params), pair_budget=pair_budget, seed=seed)


def orthogonality_destruction_demo(
    x: np.ndarray,
    y: np.ndarray,
    tol: float = 1e-12,
) -> Tuple[float, float, float]:
    """
    Inner products of an orthogonal pair before and after each squashing map.

    Returns (dot(x, y), dot(tanh x, tanh y), dot(holonorm x, holonorm y)).
    """
    if norm(x) == 0.0 or norm(y) == 0.0:
        raise ZeroVectorError("orthogonality demo needs nonzero vectors")
    before = dot(x, y)
    if abs(before) > tol * norm(x) * norm(y):
        raise NotOrthogonalError(f"inputs are not orthogonal: dot = {before}")
    after_tanh = dot(tanh_normalize(x), tanh_normalize(y))
    after_holonorm = dot(holonorm(x), holonorm(y))
    return before, after_tanh, after_holonorm
