import sys
from pathlib import Path

import pytest


# Ensure repository root is on sys.path so `src` package imports work.
repo_root = Path(__file__).resolve().parents[1]
if repo_root.as_posix() not in sys.path:
    sys.path.insert(0, repo_root.as_posix())

from src.experiments.config import ENV_OUTPUT_DIR, ENV_SEED, ExperimentConfig, from_flat  # noqa: E402


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep a developer's HOLONORM_* variables out of config resolution."""
    monkeypatch.delenv(ENV_OUTPUT_DIR, raising=False)
    monkeypatch.delenv(ENV_SEED, raising=False)


@pytest.fixture
def small_config(tmp_path) -> ExperimentConfig:
    """A run that finishes in well under a second."""
    return from_flat(
        {
            "n_vectors": 60,
            "iterations": 3,
            "steps_per_iteration": 4,
            "n_particles": 8,
            "output_dir": (tmp_path / "results").as_posix(),
        }
    )
