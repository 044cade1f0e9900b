#!/usr/bin/env python3
"""
normalizers.py

HoloNorm, elementwise tanh and LayerNorm behind one `normalize` dispatch.

HoloNorm maps x to x / (1 + ||x||): every output lies in the open unit ball and
points the same way as its input, and the map has a closed-form inverse,
Jacobian and primitive. All vector operations act on the last axis, so a batch
of token states (..., d) goes through in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.numerics.vecnum import Matrix, ShapeError, Vector, norm


# Inverse refuses anything this close to the unit sphere.
BALL_MARGIN = 1e-12


class DomainError(ValueError):
    """Argument lies outside the domain of the requested map."""


class NormalizerKind(str, Enum):
    HOLONORM = "holonorm"
    TANH = "tanh"
    LAYERNORM = "layernorm"
    IDENTITY = "identity"

    @classmethod
    def parse(cls, text: str) -> "NormalizerKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown normalizer '{text}' (expected one of: {choices})") from None


@dataclass(frozen=True)
class LayerNormParams:
    gamma: np.ndarray
    beta: np.ndarray
    epsilon: float = 1e-5

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=np.float64)
        beta = np.asarray(self.beta, dtype=np.float64)
        if gamma.shape[-1:] != beta.shape[-1:]:
            raise ShapeError(f"gamma/beta feature dims differ: {gamma.shape} vs {beta.shape}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)

    @property
    def dim(self) -> int:
        return int(self.gamma.shape[-1])

    @classmethod
    def default(cls, d: int, epsilon: float = 1e-5) -> "LayerNormParams":
        return cls(gamma=np.ones(d), beta=np.zeros(d), epsilon=epsilon)


# =========================
# HoloNorm (vector form)
# =========================

def holonorm(x: np.ndarray, p: int = 2) -> np.ndarray:
    """x / (1 + ||x||_p) along the last axis; zero maps to zero."""
    x = np.asarray(x, dtype=np.float64)
    return x / (1.0 + norm(x, p, keepdims=True))


def holonorm_inverse(z: np.ndarray, p: int = 2) -> np.ndarray:
    """z / (1 - ||z||_p), defined on the open unit ball only."""
    z = np.asarray(z, dtype=np.float64)
    n = norm(z, p, keepdims=True)
    if np.any(n >= 1.0 - BALL_MARGIN):
        raise DomainError(f"holonorm inverse needs ||z||_{p} < 1, got max norm {float(np.max(n))}")
    return z / (1.0 - n)


def holonorm_jacobian(x: Vector) -> Matrix:
    """
    I/(1+r) - x x^T / ((1+r)^2 r) with r = ||x||_2.

    At the origin the continuous limit I is returned.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"jacobian needs a single vector, got shape {x.shape}")
    d = x.shape[0]
    r = norm(x)
    if r == 0.0:
        return np.eye(d)
    return np.eye(d) / (1.0 + r) - np.outer(x, x) / ((1.0 + r) ** 2 * r)


def holonorm_primitive(x: np.ndarray) -> np.ndarray | float:
    """||x|| - ln(1 + ||x||), the potential whose gradient is holonorm(x)."""
    r = norm(np.asarray(x, dtype=np.float64))
    return r - np.log1p(r)


# =========================
# HoloNorm (scalar form, softsign)
# =========================

def holonorm_scalar(x):
    return x / (1.0 + np.abs(x))


def holonorm_scalar_inverse(y):
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(np.abs(y_arr) >= 1.0):
        raise DomainError(f"holonorm scalar inverse needs |y| < 1, got {y}")
    return y / (1.0 - np.abs(y))


def holonorm_scalar_derivative(x):
    return 1.0 / (1.0 + np.abs(x)) ** 2


def holonorm_scalar_primitive(x):
    # |x| - ln(1 + |x|): vanishes at 0, derivative is x / (1 + |x|) on both sides
    ax = np.abs(x)
    return ax - np.log1p(ax)


# =========================
# Tanh
# =========================

def tanh_normalize(x: np.ndarray) -> np.ndarray:
    return np.tanh(np.asarray(x, dtype=np.float64))


def tanh_jacobian(x: Vector) -> Matrix:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"jacobian needs a single vector, got shape {x.shape}")
    t = np.tanh(x)
    return np.diag(1.0 - t * t)


def tanh_scalar_inverse(y):
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(np.abs(y_arr) >= 1.0):
        raise DomainError(f"artanh needs |y| < 1, got {y}")
    return np.arctanh(y)


def tanh_scalar_primitive(x):
    """ln(cosh x) without overflowing for large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


# =========================
# LayerNorm
# =========================

def layernorm(x: np.ndarray, params: LayerNormParams) -> np.ndarray:
    """gamma * (x - mean) / sqrt(var + eps) + beta with population variance."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.dim:
        raise ShapeError(f"layernorm params are for d={params.dim}, input has d={x.shape[-1]}")
    mu = np.mean(x, axis=-1, keepdims=True)
    centered = x - mu
    var = np.mean(centered * centered, axis=-1, keepdims=True)
    return params.gamma * (centered / np.sqrt(var + params.epsilon)) + params.beta


def layernorm_jacobian(x: Vector, params: LayerNormParams) -> Matrix:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != params.dim:
        raise ShapeError(f"layernorm jacobian needs a vector of dimension {params.dim}")
    d = x.shape[0]
    centered = x - np.mean(x)
    s = np.sqrt(np.mean(centered * centered) + params.epsilon)
    x_hat = centered / s
    core = np.eye(d) - np.full((d, d), 1.0 / d) - np.outer(x_hat, x_hat) / d
    return (params.gamma[:, None] / s) * core


# =========================
# Dispatch
# =========================

def normalize(
    kind: NormalizerKind,
    x: np.ndarray,
    params: Optional[LayerNormParams] = None,
    p: int = 2,
) -> np.ndarray:
    kind = NormalizerKind(kind)
    if kind is NormalizerKind.HOLONORM:
        return holonorm(x, p)
    if kind is NormalizerKind.TANH:
        return tanh_normalize(x)
    if kind is NormalizerKind.LAYERNORM:
        if params is None:
            raise ValueError("layernorm normalizer requires LayerNormParams")
        return layernorm(x, params)
    return np.asarray(x, dtype=np.float64)


def normalizer_jacobian(
    kind: NormalizerKind,
    x: Vector,
    params: Optional[LayerNormParams] = None,
) -> Matrix:
    kind = NormalizerKind(kind)
    if kind is NormalizerKind.HOLONORM:
        return holonorm_jacobian(x)
    if kind is NormalizerKind.TANH:
        return tanh_jacobian(x)
    if kind is NormalizerKind.LAYERNORM:
        if params is None:
            raise ValueError("layernorm normalizer requires LayerNormParams")
        return layernorm_jacobian(x, params)
    return np.eye(np.asarray(x).shape[-1])
