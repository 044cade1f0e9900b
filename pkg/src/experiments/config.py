#!/usr/bin/env python3
"""
config.py

Experiment configuration. Values resolve in this order, later wins:
dataclass defaults, a flat JSON config file, environment variables
(HOLONORM_OUTPUT_DIR, HOLONORM_SEED), then command-line flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from src.model.transformer import TransformerConfig
from src.optim.pso import PsoConfig


ENV_OUTPUT_DIR = "HOLONORM_OUTPUT_DIR"
ENV_SEED = "HOLONORM_SEED"

MODEL_KEYS = ("d_model", "d_ff", "n_layers", "max_seq_len", "normalizer", "placement", "layernorm_epsilon")
PSO_KEYS = ("n_particles", "w", "c1", "c2", "init_low", "init_high", "v_max")
EXPERIMENT_KEYS = ("dataset", "n_vectors", "iterations", "steps_per_iteration", "seed", "output_dir", "pair_budget")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "orthogonal3d"  # or a path to a dataset CSV
    n_vectors: int = 1000
    model: TransformerConfig = field(default_factory=TransformerConfig)
    pso: PsoConfig = field(default_factory=PsoConfig)
    iterations: int = 10
    steps_per_iteration: int = 20
    seed: int = 7
    output_dir: Path = Path("results")
    pair_budget: int = 100_000

    def __post_init__(self):
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        # one seed drives the dataset, the initial weights and the swarm
        object.__setattr__(self, "pso", replace(self.pso, seed=self.seed))
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.n_vectors < 2:
            raise ConfigError(f"n_vectors must be >= 2, got {self.n_vectors}")
        if self.steps_per_iteration < 1:
            raise ConfigError(f"steps_per_iteration must be >= 1, got {self.steps_per_iteration}")
        if self.pair_budget < 1:
            raise ConfigError(f"pair_budget must be >= 1, got {self.pair_budget}")

    def to_flat(self) -> Dict[str, Any]:
        """Flat key-value snapshot, the same layout the JSON config file uses."""
        flat: Dict[str, Any] = {key: getattr(self, key) for key in EXPERIMENT_KEYS}
        flat["output_dir"] = self.output_dir.as_posix()
        for key in MODEL_KEYS:
            flat[key] = getattr(self.model, key)
        flat["normalizer"] = self.model.normalizer.value
        flat["placement"] = self.model.placement.value
        flat.update(
            n_particles=self.pso.n_particles,
            w=self.pso.w,
            c1=self.pso.c1,
            c2=self.pso.c2,
            init_low=self.pso.init_range[0],
            init_high=self.pso.init_range[1],
            v_max=self.pso.v_max,
        )
        return flat


def from_flat(flat: Mapping[str, Any], base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Build a config from flat keys layered over `base` (defaults if None)."""
    known = set(MODEL_KEYS) | set(PSO_KEYS) | set(EXPERIMENT_KEYS)
    unknown = sorted(set(flat) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    merged = (base or ExperimentConfig()).to_flat()
    merged.update(flat)

    try:
        model = TransformerConfig(
            d_model=int(merged["d_model"]),
            d_ff=int(merged["d_ff"]),
            n_layers=int(merged["n_layers"]),
            max_seq_len=int(merged["max_seq_len"]),
            normalizer=merged["normalizer"],
            placement=merged["placement"],
            layernorm_epsilon=float(merged["layernorm_epsilon"]),
        )
        pso = PsoConfig(
            n_particles=int(merged["n_particles"]),
            w=float(merged["w"]),
            c1=float(merged["c1"]),
            c2=float(merged["c2"]),
            init_range=(float(merged["init_low"]), float(merged["init_high"])),
            v_max=None if merged["v_max"] is None else float(merged["v_max"]),
            seed=int(merged["seed"]),
        )
        return ExperimentConfig(
            dataset=str(merged["dataset"]),
            n_vectors=int(merged["n_vectors"]),
            model=model,
            pso=pso,
            iterations=int(merged["iterations"]),
            steps_per_iteration=int(merged["steps_per_iteration"]),
            seed=int(merged["seed"]),
            output_dir=Path(merged["output_dir"]),
            pair_budget=int(merged["pair_budget"]),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config_file(path: Path) -> Dict[str, Any]:
    try:
        with Path(path).open("r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
        raise ConfigError(f"config file {path} must be a flat JSON object")
    return data


def _env_overrides(environ: Mapping[str, str]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    if environ.get(ENV_OUTPUT_DIR):
        out["output_dir"] = environ[ENV_OUTPUT_DIR]
    if environ.get(ENV_SEED):
        try:
            out["seed"] = int(environ[ENV_SEED])
        except ValueError as exc:
            raise ConfigError(f"{ENV_SEED} must be an integer, got {environ[ENV_SEED]!r}") from exc
    return out


def resolve_config(
    config_path: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Mapping[str, str] = os.environ,
) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if config_path is not None:
        cfg = from_flat(load_config_file(config_path), cfg)
    env = _env_overrides(environ)
    if env:
        cfg = from_flat(env, cfg)
    cli = {k: v for k, v in (overrides or {}).items() if v is not None}
    if cli:
        cfg = from_flat(cli, cfg)
    return cfg
