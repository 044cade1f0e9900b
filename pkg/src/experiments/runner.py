#!/usr/bin/env python3
"""
runner.py

Train the toy transformer with PSO under one normalizer and record one
IterationRecord per outer iteration, or run all four normalizers side by side.

The task is self-reconstruction: vectors are chunked into token sequences and
the model is scored by RMSE between its output and its input (or the CSV
targets when a dataset file is used).
"""

from __future__ import annotations

import asyncio
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.experiments.config import ConfigError, ExperimentConfig
from src.experiments.datasets import ORTHOGONAL3D, DataError, generate_orthogonal3d, load_csv_dataset
from src.experiments.metrics import IterationRecord, mae, make_record
from src.model.transformer import TransformerConfig, forward, forward_with_states, unflatten_params
from src.numerics.normalizers import NormalizerKind
from src.numerics.similarity import SimilarityScoreReport, similarity_change
from src.optim.pso import Swarm, pso_init, pso_step


logger = logging.getLogger(__name__)

ALL_NORMALIZERS: Tuple[NormalizerKind, ...] = (
    NormalizerKind.HOLONORM,
    NormalizerKind.TANH,
    NormalizerKind.LAYERNORM,
    NormalizerKind.IDENTITY,
)


@dataclass
class RunArtifact:
    config: Dict[str, Any]
    normalizer: NormalizerKind
    records: List[IterationRecord] = field(default_factory=list)
    similarity: Optional[SimilarityScoreReport] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "normalizer": self.normalizer.value,
            "config": dict(self.config),
            "records": [r.to_dict() for r in self.records],
            "similarity": self.similarity.to_dict() if self.similarity else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunArtifact":
        similarity = data.get("similarity")
        return cls(
            config=dict(data.get("config", {})),
            normalizer=NormalizerKind(data["normalizer"]),
            records=[IterationRecord.from_dict(r) for r in data.get("records", [])],
            similarity=SimilarityScoreReport.from_dict(similarity) if similarity else None,
        )


# =========================
# Task construction
# =========================

def load_task(cfg: ExperimentConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Return (inputs, targets) as (n, d) arrays."""
    if cfg.dataset == ORTHOGONAL3D:
        inputs = generate_orthogonal3d(cfg.n_vectors, cfg.seed)
        return inputs, inputs.copy()

    pairs = load_csv_dataset(Path(cfg.dataset))
    inputs = np.stack([x for x, _ in pairs])
    targets = np.stack([y for _, y in pairs])
    if inputs.shape[1] != targets.shape[1]:
        raise DataError(
            f"input dim {inputs.shape[1]} and target dim {targets.shape[1]} differ; "
            "the transformer maps d_model to d_model"
        )
    return inputs, targets


def chunk_sequences(values: np.ndarray, seq_len: int) -> np.ndarray:
    """(n, d) -> (n // seq_len, seq_len, d); a trailing partial sequence is dropped."""
    n, d = values.shape
    seq_len = min(seq_len, n)
    n_seq = n // seq_len
    dropped = n - n_seq * seq_len
    if dropped:
        logger.warning(f"Dropping {dropped} trailing vector(s) that do not fill a sequence of {seq_len}")
    return values[: n_seq * seq_len].reshape(n_seq, seq_len, d)


def make_objective(
    inputs: np.ndarray,
    targets: np.ndarray,
    model: TransformerConfig,
) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised RMSE objective over a (n_particles, n_params) position matrix."""

    def objective(positions: np.ndarray) -> np.ndarray:
        params = unflatten_params(positions[:, None, :], model)
        with np.errstate(over="ignore", invalid="ignore"):
            pred = forward(inputs, params, model)
            err = np.mean((pred - targets) ** 2, axis=(1, 2, 3))
        return np.sqrt(err)

    return objective


# =========================
# Runs
# =========================

def run_experiment(cfg: ExperimentConfig, kind: NormalizerKind) -> RunArtifact:
    kind = NormalizerKind(kind)
    model = replace(cfg.model, normalizer=kind)
    if model.parameter_count == 0:
        raise ConfigError("n_layers must be >= 1 to train a model")

    raw_inputs, raw_targets = load_task(cfg)
    if raw_inputs.shape[1] != model.d_model:
        raise ConfigError(f"d_model is {model.d_model} but the dataset has dimension {raw_inputs.shape[1]}")
    inputs = chunk_sequences(raw_inputs, model.max_seq_len)
    targets = chunk_sequences(raw_targets, model.max_seq_len)

    snapshot = replace(cfg, model=model).to_flat()
    artifact = RunArtifact(config=snapshot, normalizer=kind)
    objective = make_objective(inputs, targets, model)

    logger.info(
        f"Run {kind.value}: {inputs.shape[0]} sequences x {inputs.shape[1]} tokens, "
        f"{model.parameter_count} parameters, {cfg.pso.n_particles} particles"
    )
    start = time.perf_counter()
    swarm: Swarm = pso_init(model.parameter_count, objective, cfg.pso, vectorized=True)

    for iteration in range(1, cfg.iterations + 1):
        for _ in range(cfg.steps_per_iteration):
            swarm = pso_step(swarm, objective, vectorized=True)

        best = unflatten_params(swarm.global_best_pos, model)
        pred, traces = forward_with_states(inputs, best, model)
        first = traces[0]
        report = similarity_change(
            first.normalizer_input,
            first.normalizer_output,
            pair_budget=cfg.pair_budget,
            seed=cfg.seed,
        )
        elapsed = time.perf_counter() - start
        record = make_record(
            iteration=iteration,
            elapsed_s=elapsed,
            rmse_value=swarm.global_best_val,
            mae_value=mae(pred, targets),
            similarity_score=report.mean_abs_change,
        )
        artifact.records.append(record)
        artifact.similarity = report
        logger.info(
            f"[{kind.value}] iteration {iteration}: rmse={record.rmse:.4f} mae={record.mae:.4f} "
            f"hn_rmse={record.hn_rmse:.4f} similarity={record.similarity_score:.4f} ({elapsed:.2f}s)"
        )

    return artifact


async def compare_normalizers_async(
    cfg: ExperimentConfig,
    kinds: Sequence[NormalizerKind] = ALL_NORMALIZERS,
) -> List[RunArtifact]:
    """Run every normalizer with the same seed, concurrently."""
    tasks = [asyncio.to_thread(run_experiment, cfg, kind) for kind in kinds]
    return list(await asyncio.gather(*tasks))


def compare_normalizers(
    cfg: ExperimentConfig,
    kinds: Sequence[NormalizerKind] = ALL_NORMALIZERS,
) -> List[RunArtifact]:
    return asyncio.run(compare_normalizers_async(cfg, kinds))
