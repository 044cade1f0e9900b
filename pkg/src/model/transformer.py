#!/usr/bin/env python3
"""
transformer.py

Single-head causal transformer with a pluggable normalizer, inference only.
Training is gradient-free (see src/optim/pso.py), so the parameters flatten to
one vector and back.

Per layer, with N the configured normalizer and h its feed-forward activation:

    y1 = N(x)                      (pre placement)
    q, k, v = Wq y1, Wk y1, Wv y1
    att_i = sum_{j<=i} softmax_j(<q_i, k_j> / sqrt(d)) v_j
    y2 = x + att
    y3 = N(y2)
    out = y2 + W2 h(W1 y3 + b1) + b2

Arrays carry optional leading batch axes everywhere: tokens are (..., T, d)
and weights are (..., rows, cols). Weight batch axes broadcast against token
batch axes the numpy way, which is how a whole swarm is evaluated at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.numerics.normalizers import (
    LayerNormParams,
    NormalizerKind,
    holonorm,
    layernorm,
    tanh_normalize,
)
from src.numerics.vecnum import ShapeError


TokenSequence = np.ndarray  # shape (..., T, d_model)

INIT_LOW = -0.5
INIT_HIGH = 0.5


class Placement(str, Enum):
    PRE = "pre"
    POST = "post"


@dataclass(frozen=True)
class TransformerConfig:
    d_model: int = 3
    d_ff: int = 8
    n_layers: int = 1
    max_seq_len: int = 10
    normalizer: NormalizerKind = NormalizerKind.HOLONORM
    placement: Placement = Placement.PRE
    layernorm_epsilon: float = 1e-5

    def __post_init__(self):
        object.__setattr__(self, "normalizer", NormalizerKind(self.normalizer))
        object.__setattr__(self, "placement", Placement(self.placement))
        for name in ("d_model", "d_ff", "max_seq_len"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.n_layers < 0:
            raise ValueError(f"n_layers must be >= 0, got {self.n_layers}")

    @property
    def uses_layernorm(self) -> bool:
        return self.normalizer is NormalizerKind.LAYERNORM

    def layer_shapes(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """Flattening order and shape of one layer's parameters."""
        d, f = self.d_model, self.d_ff
        shapes = [
            ("w_q", (d, d)),
            ("w_k", (d, d)),
            ("w_v", (d, d)),
            ("w_1", (f, d)),
            ("b_1", (f,)),
            ("w_2", (d, f)),
            ("b_2", (d,)),
        ]
        if self.uses_layernorm:
            shapes += [("ln1_gamma", (d,)), ("ln1_beta", (d,)), ("ln2_gamma", (d,)), ("ln2_beta", (d,))]
        return shapes

    @property
    def layer_parameter_count(self) -> int:
        return sum(int(np.prod(shape)) for _, shape in self.layer_shapes())

    @property
    def parameter_count(self) -> int:
        return self.n_layers * self.layer_parameter_count


@dataclass(frozen=True)
class LayerParams:
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    w_1: np.ndarray
    b_1: np.ndarray
    w_2: np.ndarray
    b_2: np.ndarray
    ln1: Optional[LayerNormParams] = None
    ln2: Optional[LayerNormParams] = None


@dataclass(frozen=True)
class TransformerParams:
    layers: Tuple[LayerParams, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class BlockTrace:
    """Where the first normalizer of a block acted: its argument and its output."""

    normalizer_input: np.ndarray
    normalizer_output: np.ndarray
    output: np.ndarray


# =========================
# Parameter plumbing
# =========================

def flatten_params(params: TransformerParams, config: TransformerConfig) -> np.ndarray:
    pieces = []
    for layer in params.layers:
        values = {
            "w_q": layer.w_q,
            "w_k": layer.w_k,
            "w_v": layer.w_v,
            "w_1": layer.w_1,
            "b_1": layer.b_1,
            "w_2": layer.w_2,
            "b_2": layer.b_2,
        }
        if config.uses_layernorm:
            if layer.ln1 is None or layer.ln2 is None:
                raise ShapeError("layernorm config requires ln1/ln2 parameters on every layer")
            values.update(
                ln1_gamma=layer.ln1.gamma,
                ln1_beta=layer.ln1.beta,
                ln2_gamma=layer.ln2.gamma,
                ln2_beta=layer.ln2.beta,
            )
        for name, shape in config.layer_shapes():
            arr = np.asarray(values[name], dtype=np.float64)
            if arr.shape[arr.ndim - len(shape):] != shape:
                raise ShapeError(f"{name} has shape {arr.shape}, expected (..., {shape})")
            pieces.append(arr.reshape(arr.shape[: arr.ndim - len(shape)] + (-1,)))
    if not pieces:
        return np.zeros(0)
    return np.concatenate(pieces, axis=-1)


def unflatten_params(flat: np.ndarray, config: TransformerConfig) -> TransformerParams:
    """Inverse of flatten_params; leading axes of `flat` become weight batch axes."""
    flat = np.asarray(flat, dtype=np.float64)
    if flat.shape[-1] != config.parameter_count:
        raise ShapeError(f"expected {config.parameter_count} parameters, got {flat.shape[-1]}")
    lead = flat.shape[:-1]
    layers = []
    offset = 0
    for _ in range(config.n_layers):
        values = {}
        for name, shape in config.layer_shapes():
            size = int(np.prod(shape))
            values[name] = flat[..., offset : offset + size].reshape(lead + shape)
            offset += size
        ln1 = ln2 = None
        if config.uses_layernorm:
            eps = config.layernorm_epsilon
            ln1 = LayerNormParams(values.pop("ln1_gamma"), values.pop("ln1_beta"), eps)
            ln2 = LayerNormParams(values.pop("ln2_gamma"), values.pop("ln2_beta"), eps)
        layers.append(LayerParams(ln1=ln1, ln2=ln2, **values))
    return TransformerParams(layers=tuple(layers))


def init_params(
    config: TransformerConfig,
    seed: int,
    low: float = INIT_LOW,
    high: float = INIT_HIGH,
) -> TransformerParams:
    rng = np.random.default_rng(seed)
    return unflatten_params(rng.uniform(low, high, size=config.parameter_count), config)


def zero_params(config: TransformerConfig) -> TransformerParams:
    return unflatten_params(np.zeros(config.parameter_count), config)


def token_sequence(tokens: Sequence[Sequence[float]] | np.ndarray, config: TransformerConfig) -> TokenSequence:
    """Validate a (T, d_model) token array."""
    arr = np.asarray(tokens, dtype=np.float64)
    if arr.ndim < 2 or arr.shape[-1] != config.d_model:
        raise ShapeError(f"tokens must be (..., T, {config.d_model}), got {arr.shape}")
    if arr.shape[-2] < 1 or arr.shape[-2] > config.max_seq_len:
        raise ShapeError(f"sequence length {arr.shape[-2]} outside 1..{config.max_seq_len}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("token sequence has non-finite values")
    return arr


# =========================
# Attention
# =========================

def attention_scores(queries: np.ndarray, keys: np.ndarray, d: int) -> np.ndarray:
    """<q_i, k_j> / sqrt(d), with -inf where j > i."""
    q = np.asarray(queries, dtype=np.float64)
    k = np.asarray(keys, dtype=np.float64)
    if q.ndim < 2 or q.shape[-2] == 0:
        raise ValueError("attention needs a non-empty sequence")
    if q.shape[-2:] != k.shape[-2:] or q.shape[-1] != d:
        raise ShapeError(f"query/key shapes {q.shape} / {k.shape} do not match d={d}")
    t = q.shape[-2]
    scores = np.matmul(q, np.swapaxes(k, -1, -2)) / np.sqrt(d)
    future = np.triu(np.ones((t, t), dtype=bool), k=1)
    return np.where(future, -np.inf, scores)


def attention_weights(queries: np.ndarray, keys: np.ndarray, d: int) -> np.ndarray:
    """Causal softmax rows alpha_ij; row i is a distribution over j <= i."""
    scores = attention_scores(queries, keys, d)
    scores = scores - np.max(scores, axis=-1, keepdims=True)
    weights = np.exp(scores)
    return weights / np.sum(weights, axis=-1, keepdims=True)


def causal_attention(queries: np.ndarray, keys: np.ndarray, values: np.ndarray, d: int) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    weights = attention_weights(queries, keys, d)
    if v.shape[-2] != weights.shape[-1]:
        raise ShapeError(f"values have length {v.shape[-2]}, expected {weights.shape[-1]}")
    return np.matmul(weights, v)


# =========================
# Blocks
# =========================

def _linear(x: np.ndarray, w: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
    out = np.matmul(x, np.swapaxes(w, -1, -2))
    if b is not None:
        out = out + b[..., None, :]
    return out


def _token_ln(params: Optional[LayerNormParams]) -> Optional[LayerNormParams]:
    # gamma/beta carry weight batch axes; add the token axis so they broadcast over T
    if params is None:
        return None
    return LayerNormParams(params.gamma[..., None, :], params.beta[..., None, :], params.epsilon)


def _normalizer(config: TransformerConfig, x: np.ndarray, ln: Optional[LayerNormParams]) -> np.ndarray:
    kind = config.normalizer
    if kind is NormalizerKind.HOLONORM:
        return holonorm(x)
    if kind is NormalizerKind.TANH:
        return tanh_normalize(x)
    if kind is NormalizerKind.LAYERNORM:
        if ln is None:
            raise ShapeError("layernorm config requires ln1/ln2 parameters")
        return layernorm(x, _token_ln(ln))
    return x


def _activation(config: TransformerConfig, x: np.ndarray) -> np.ndarray:
    kind = config.normalizer
    if kind is NormalizerKind.TANH:
        return tanh_normalize(x)
    if kind is NormalizerKind.IDENTITY:
        return x
    # holonorm, and the layernorm fallback (layernorm over d_ff is not a pointwise activation)
    return holonorm(x)


def _check_layer(x: np.ndarray, layer: LayerParams, config: TransformerConfig) -> None:
    d, f = config.d_model, config.d_ff
    if x.ndim < 2 or x.shape[-1] != d:
        raise ShapeError(f"tokens must be (..., T, {d}), got {x.shape}")
    if x.shape[-2] > config.max_seq_len:
        raise ShapeError(f"sequence length {x.shape[-2]} exceeds max_seq_len {config.max_seq_len}")
    expected = {"w_q": (d, d), "w_k": (d, d), "w_v": (d, d), "w_1": (f, d), "w_2": (d, f)}
    for name, shape in expected.items():
        if getattr(layer, name).shape[-2:] != shape:
            raise ShapeError(f"{name} has shape {getattr(layer, name).shape}, expected (..., {shape})")


def _feed_forward(x: np.ndarray, layer: LayerParams, config: TransformerConfig) -> np.ndarray:
    hidden = _activation(config, _linear(x, layer.w_1, layer.b_1))
    return _linear(hidden, layer.w_2, layer.b_2)


def _block(x: np.ndarray, layer: LayerParams, config: TransformerConfig) -> BlockTrace:
    _check_layer(x, layer, config)
    d = config.d_model
    if config.placement is Placement.PRE:
        y1 = _normalizer(config, x, layer.ln1)
        att = causal_attention(_linear(y1, layer.w_q), _linear(y1, layer.w_k), _linear(y1, layer.w_v), d)
        y2 = x + att
        y3 = _normalizer(config, y2, layer.ln2)
        out = y2 + _feed_forward(y3, layer, config)
        return BlockTrace(normalizer_input=np.broadcast_to(x, y1.shape), normalizer_output=y1, output=out)

    att = causal_attention(_linear(x, layer.w_q), _linear(x, layer.w_k), _linear(x, layer.w_v), d)
    residual = x + att
    y2 = _normalizer(config, residual, layer.ln1)
    out = _normalizer(config, y2 + _feed_forward(y2, layer, config), layer.ln2)
    return BlockTrace(normalizer_input=residual, normalizer_output=y2, output=out)


def transformer_block(x: TokenSequence, layer: LayerParams, config: TransformerConfig) -> TokenSequence:
    return _block(np.asarray(x, dtype=np.float64), layer, config).output


def forward_with_states(
    x: TokenSequence,
    params: TransformerParams,
    config: TransformerConfig,
) -> Tuple[TokenSequence, List[BlockTrace]]:
    h = np.asarray(x, dtype=np.float64)
    traces: List[BlockTrace] = []
    for layer in params.layers:
        trace = _block(h, layer, config)
        traces.append(trace)
        h = trace.output
    return h, traces


def forward(x: TokenSequence, params: TransformerParams, config: TransformerConfig) -> TokenSequence:
    """Compose the blocks; with no layers the input comes back unchanged."""
    return forward_with_states(x, params, config)[0]
