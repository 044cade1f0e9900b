import math

import numpy as np
import pytest

from src.model.transformer import (
    LayerParams,
    Placement,
    TransformerConfig,
    TransformerParams,
    attention_scores,
    attention_weights,
    causal_attention,
    flatten_params,
    forward,
    forward_with_states,
    init_params,
    token_sequence,
    transformer_block,
    unflatten_params,
    zero_params,
)
from src.numerics.normalizers import NormalizerKind
from src.numerics.similarity import cosine
from src.numerics.vecnum import ShapeError, norm


ALL_KINDS = list(NormalizerKind)


def test_single_token_attends_to_itself():
    v = np.array([[3.0, -1.0]])
    out = causal_attention(np.array([[0.2, 0.1]]), np.array([[0.5, 0.5]]), v, 2)
    np.testing.assert_allclose(out, v)


def test_equal_scores_average_the_prefix():
    q = np.zeros((4, 2))
    weights = attention_weights(q, np.random.default_rng(0).normal(size=(4, 2)), 2)
    for i in range(4):
        np.testing.assert_allclose(weights[i, : i + 1], 1.0 / (i + 1))
        assert np.all(weights[i, i + 1 :] == 0.0)


def test_attention_hand_computed():
    q = np.array([[0.0], [1.0]])
    k = np.array([[0.0], [1.0]])
    v = np.array([[1.0], [2.0]])
    out = causal_attention(q, k, v, 1)
    e = math.e
    assert out[0, 0] == pytest.approx(1.0)
    assert out[1, 0] == pytest.approx((1.0 + 2.0 * e) / (1.0 + e))


def test_attention_rows_are_causal_distributions():
    rng = np.random.default_rng(1)
    q, k = rng.normal(size=(2, 3, 7, 4)) * 3
    weights = attention_weights(q, k, 4)
    np.testing.assert_allclose(np.sum(weights, axis=-1), 1.0, atol=1e-12)
    assert np.all(weights[..., np.triu_indices(7, k=1)[0], np.triu_indices(7, k=1)[1]] == 0.0)
    assert np.all(weights >= 0.0)


def test_softmax_shift_invariance():
    rng = np.random.default_rng(2)
    q, k = rng.normal(size=(2, 5, 3))
    # adding u to every key shifts row i by <q_i, u> / sqrt(d)
    shifted = attention_weights(q, k + rng.normal(size=3), 3)
    np.testing.assert_allclose(shifted, attention_weights(q, k, 3), atol=1e-12)


def test_scores_of_unit_vectors_are_scaled_cosines():
    rng = np.random.default_rng(3)
    q = rng.normal(size=(4, 3))
    k = rng.normal(size=(4, 3))
    q /= norm(q, keepdims=True)
    k /= norm(k, keepdims=True)
    scores = attention_scores(q, k, 3)
    for i in range(4):
        for j in range(i + 1):
            assert abs(scores[i, j] * math.sqrt(3) - cosine(q[i], k[j])) < 1e-12


def test_attention_shape_errors():
    with pytest.raises(ShapeError):
        attention_scores(np.zeros((3, 2)), np.zeros((2, 2)), 2)
    with pytest.raises(ValueError):
        attention_scores(np.zeros((0, 2)), np.zeros((0, 2)), 2)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_zero_parameters_give_identity_block(kind):
    config = TransformerConfig(d_model=3, d_ff=5, normalizer=kind)
    x = np.random.default_rng(4).normal(size=(6, 3))
    layer = zero_params(config).layers[0]
    np.testing.assert_array_equal(transformer_block(x, layer, config), x)


def test_hand_traced_identity_block():
    config = TransformerConfig(d_model=2, d_ff=2, normalizer=NormalizerKind.IDENTITY)
    layer = LayerParams(
        w_q=np.array([[0.3, -0.2], [0.1, 0.4]]),
        w_k=np.array([[1.0, 0.0], [0.5, 0.5]]),
        w_v=np.array([[1.0, 0.0], [0.0, 2.0]]),
        w_1=np.eye(2),
        b_1=np.array([1.0, 1.0]),
        w_2=np.array([[1.0, 1.0], [0.0, 1.0]]),
        b_2=np.array([0.5, -0.5]),
    )
    # v = (1, 4), y2 = (2, 6), hidden = (3, 7), ff = (10.5, 6.5)
    out = transformer_block(np.array([[1.0, 2.0]]), layer, config)
    np.testing.assert_allclose(out, [[12.5, 12.5]])


def test_causal_perturbation():
    config = TransformerConfig(d_model=3, d_ff=6, n_layers=2, normalizer=NormalizerKind.TANH)
    params = init_params(config, seed=5)
    x = np.random.default_rng(6).normal(size=(6, 3))
    changed = x.copy()
    changed[3] += np.array([0.7, -1.1, 0.4])
    a = forward(x, params, config)
    b = forward(changed, params, config)
    np.testing.assert_array_equal(a[:3], b[:3])
    assert not np.allclose(a[3], b[3])


@pytest.mark.parametrize("placement", list(Placement))
def test_forward_composes_blocks(placement):
    config = TransformerConfig(d_model=3, d_ff=4, n_layers=2, placement=placement)
    params = init_params(config, seed=8)
    x = np.random.default_rng(9).normal(size=(5, 3))
    expected = transformer_block(transformer_block(x, params.layers[0], config), params.layers[1], config)
    np.testing.assert_array_equal(forward(x, params, config), expected)


def test_zero_layers_is_identity():
    config = TransformerConfig(n_layers=0)
    x = np.random.default_rng(10).normal(size=(4, 3))
    assert config.parameter_count == 0
    np.testing.assert_array_equal(forward(x, unflatten_params(np.zeros(0), config), config), x)


def test_forward_is_deterministic():
    config = TransformerConfig(d_model=4, d_ff=8, n_layers=2, normalizer=NormalizerKind.LAYERNORM)
    params = init_params(config, seed=11)
    x = np.random.default_rng(12).normal(size=(3, 7, 4))
    np.testing.assert_array_equal(forward(x, params, config), forward(x, params, config))


def test_parameter_counts():
    config = TransformerConfig(d_model=4, d_ff=8, n_layers=2)
    assert config.layer_parameter_count == 124
    assert config.parameter_count == 248
    ln = TransformerConfig(d_model=4, d_ff=8, n_layers=2, normalizer=NormalizerKind.LAYERNORM)
    assert ln.parameter_count == 280
    assert TransformerConfig().parameter_count == 3 * 9 + 24 + 8 + 24 + 3


@pytest.mark.parametrize("kind", [NormalizerKind.HOLONORM, NormalizerKind.LAYERNORM])
def test_flatten_unflatten_bijection(kind):
    config = TransformerConfig(d_model=4, d_ff=8, n_layers=2, normalizer=kind)
    flat = np.random.default_rng(13).uniform(-1, 1, size=config.parameter_count)
    np.testing.assert_array_equal(flatten_params(unflatten_params(flat, config), config), flat)
    np.testing.assert_array_equal(flatten_params(zero_params(config), config), np.zeros(config.parameter_count))


def test_unflatten_wrong_length():
    with pytest.raises(ShapeError):
        unflatten_params(np.zeros(247), TransformerConfig(d_model=4, d_ff=8, n_layers=2))


def test_swarm_batch_matches_single_evaluation():
    config = TransformerConfig(d_model=3, d_ff=4, n_layers=2, normalizer=NormalizerKind.HOLONORM)
    positions = np.random.default_rng(14).uniform(-0.5, 0.5, size=(5, config.parameter_count))
    x = np.random.default_rng(15).normal(size=(4, 6, 3))
    batched = forward(x, unflatten_params(positions[:, None, :], config), config)
    assert batched.shape == (5, 4, 6, 3)
    for p in range(5):
        single = forward(x, unflatten_params(positions[p], config), config)
        np.testing.assert_allclose(batched[p], single, rtol=1e-12, atol=1e-12)


def test_holonorm_keeps_large_inputs_bounded():
    rng = np.random.default_rng(16)
    x = rng.normal(size=(8, 4))
    x *= 1e6 / norm(x, keepdims=True)

    def run(kind):
        config = TransformerConfig(d_model=4, d_ff=8, n_layers=2, normalizer=kind)
        params = unflatten_params(rng.uniform(-1, 1, size=config.parameter_count), config)
        return forward_with_states(x, params, config)

    out, traces = run(NormalizerKind.HOLONORM)
    assert np.all(np.isfinite(out))
    for trace in traces:
        assert np.all(norm(trace.normalizer_output) < 1.0)

    _, identity_traces = run(NormalizerKind.IDENTITY)
    hn_peak = max(np.max(norm(t.normalizer_output)) for t in traces)
    id_peak = max(np.max(norm(t.normalizer_output)) for t in identity_traces)
    assert id_peak > hn_peak


def test_post_placement_output_is_normalized():
    config = TransformerConfig(d_model=3, d_ff=4, n_layers=1, placement=Placement.POST)
    x = np.random.default_rng(17).normal(size=(5, 3)) * 10
    out, traces = forward_with_states(x, init_params(config, seed=18), config)
    assert np.all(norm(out) < 1.0)
    np.testing.assert_allclose(traces[0].normalizer_output, traces[0].normalizer_input / (1 + norm(traces[0].normalizer_input, keepdims=True)))


def test_pre_placement_trace_records_block_input():
    config = TransformerConfig(d_model=3, d_ff=4)
    x = np.random.default_rng(19).normal(size=(5, 3))
    _, traces = forward_with_states(x, init_params(config, seed=20), config)
    np.testing.assert_array_equal(traces[0].normalizer_input, x)


def test_token_sequence_validation():
    config = TransformerConfig(d_model=3, max_seq_len=4)
    assert token_sequence(np.zeros((4, 3)), config).shape == (4, 3)
    with pytest.raises(ShapeError):
        token_sequence(np.zeros((5, 3)), config)
    with pytest.raises(ShapeError):
        token_sequence(np.zeros((2, 2)), config)
    with pytest.raises(ShapeError):
        transformer_block(np.zeros((2, 2)), zero_params(config).layers[0], config)


def test_config_validation():
    with pytest.raises(ValueError):
        TransformerConfig(d_model=0)
    with pytest.raises(ValueError):
        TransformerConfig(n_layers=-1)
    assert TransformerConfig(normalizer="tanh", placement="post").placement is Placement.POST
    assert TransformerParams().layers == ()
