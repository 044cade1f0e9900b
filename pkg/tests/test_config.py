import json
from pathlib import Path

import pytest

from src.experiments.config import ConfigError, ExperimentConfig, from_flat, load_config_file, resolve_config
from src.model.transformer import Placement
from src.numerics.normalizers import NormalizerKind


def test_defaults():
    cfg = ExperimentConfig()
    assert cfg.dataset == "orthogonal3d"
    assert cfg.n_vectors == 1000
    assert cfg.iterations == 10
    assert cfg.model.d_model == 3
    assert cfg.model.max_seq_len == 10
    assert (cfg.pso.n_particles, cfg.pso.w, cfg.pso.c1, cfg.pso.c2) == (50, 0.5, 0.5, 0.5)
    assert cfg.pso.seed == cfg.seed
    assert cfg.pair_budget == 100_000


def test_flat_round_trip():
    cfg = from_flat({"n_layers": 2, "placement": "post", "normalizer": "tanh", "seed": 3, "v_max": 0.25})
    again = from_flat(cfg.to_flat())
    assert again == cfg
    assert again.model.placement is Placement.POST
    assert again.model.normalizer is NormalizerKind.TANH
    assert again.pso.seed == 3
    assert again.pso.v_max == 0.25


def test_unknown_and_invalid_keys():
    with pytest.raises(ConfigError, match="n_partcles"):
        from_flat({"n_partcles": 10})
    with pytest.raises(ConfigError):
        from_flat({"normalizer": "rmsnorm"})
    with pytest.raises(ConfigError):
        from_flat({"n_particles": 0})
    with pytest.raises(ConfigError):
        from_flat({"iterations": 0})
    with pytest.raises(ConfigError):
        from_flat({"n_vectors": "many"})


def test_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"iterations": 4, "n_particles": 12}), encoding="utf-8")
    cfg = resolve_config(path, environ={})
    assert cfg.iterations == 4
    assert cfg.pso.n_particles == 12


@pytest.mark.parametrize("text", ["{not json", "[1, 2]", '{"model": {"d_model": 3}}'])
def test_bad_config_files(tmp_path, text):
    path = tmp_path / "cfg.json"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config_file(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        resolve_config(tmp_path / "nope.json", environ={})


def test_precedence(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"seed": 1, "output_dir": "from_file", "iterations": 2}), encoding="utf-8")
    env = {"HOLONORM_SEED": "2", "HOLONORM_OUTPUT_DIR": "from_env"}

    cfg = resolve_config(path, environ=env)
    assert cfg.seed == 2
    assert cfg.output_dir == Path("from_env")
    assert cfg.iterations == 2

    cfg = resolve_config(path, overrides={"seed": 3, "iterations": None}, environ=env)
    assert cfg.seed == 3
    assert cfg.pso.seed == 3
    assert cfg.iterations == 2


def test_bad_env_seed():
    with pytest.raises(ConfigError):
        resolve_config(environ={"HOLONORM_SEED": "seven"})
