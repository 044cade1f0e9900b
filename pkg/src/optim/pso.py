#!/usr/bin/env python3
"""
pso.py

Gradient-free particle swarm optimizer (minimisation) with the canonical
inertia update

    v <- w v + c1 r1 * (pbest - x) + c2 r2 * (gbest - x)
    x <- x + v

Each particle draws from its own seeded random stream, so results do not
depend on the order in which objective values are computed. An objective may
be scalar (one position in, one float out) or vectorised (the whole
(n_particles, dim) position matrix in, one value per particle out).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np


logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]
BatchObjective = Callable[[np.ndarray], np.ndarray]


class ObjectiveError(RuntimeError):
    """The objective produced an unusable value."""


@dataclass(frozen=True)
class PsoConfig:
    n_particles: int = 50
    w: float = 0.5
    c1: float = 0.5
    c2: float = 0.5
    init_range: Tuple[float, float] = (-0.5, 0.5)
    v_max: Optional[float] = None  # defaults to half the init_range width
    seed: int = 0

    def __post_init__(self):
        low, high = (float(v) for v in self.init_range)
        object.__setattr__(self, "init_range", (low, high))
        if self.n_particles < 1:
            raise ValueError(f"n_particles must be >= 1, got {self.n_particles}")
        for name in ("w", "c1", "c2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if low > high:
            raise ValueError(f"init_range is empty: {self.init_range}")
        if self.v_max is not None and not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")

    @property
    def velocity_limit(self) -> float:
        if self.v_max is not None:
            return float(self.v_max)
        low, high = self.init_range
        return (high - low) / 2.0


@dataclass(frozen=True)
class Swarm:
    positions: np.ndarray  # (n_particles, dim)
    velocities: np.ndarray  # (n_particles, dim)
    values: np.ndarray  # objective at current positions, NaN mapped to +inf
    personal_best_pos: np.ndarray
    personal_best_val: np.ndarray
    global_best_pos: np.ndarray
    global_best_val: float
    rng_states: Tuple[Dict[str, Any], ...]
    config: PsoConfig
    step: int = 0

    @property
    def dim(self) -> int:
        return int(self.positions.shape[1])


def _particle_rngs(config: PsoConfig) -> list:
    children = np.random.SeedSequence(config.seed).spawn(config.n_particles)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def _restore_rngs(states: Tuple[Dict[str, Any], ...]) -> list:
    rngs = []
    for state in states:
        bit_gen = np.random.PCG64()
        bit_gen.state = state
        rngs.append(np.random.Generator(bit_gen))
    return rngs


def _evaluate(objective, positions: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        values = np.asarray(objective(positions), dtype=np.float64).reshape(-1)
        if values.shape[0] != positions.shape[0]:
            raise ObjectiveError(f"vectorised objective returned {values.shape[0]} values for {positions.shape[0]} particles")
        return values
    return np.array([float(objective(p)) for p in positions], dtype=np.float64)


def _frozen(*arrays: np.ndarray) -> None:
    for arr in arrays:
        arr.setflags(write=False)


def pso_init(
    dim: int,
    objective,
    config: PsoConfig = PsoConfig(),
    vectorized: bool = False,
) -> Swarm:
    """Seeded uniform positions, zero velocities, one evaluation per particle."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    low, high = config.init_range
    rngs = _particle_rngs(config)
    positions = np.stack([rng.uniform(low, high, size=dim) for rng in rngs])
    velocities = np.zeros_like(positions)

    values = _evaluate(objective, positions, vectorized)
    if np.any(np.isnan(values)):
        raise ObjectiveError("objective returned NaN at initialisation")

    best = int(np.argmin(values))
    swarm = Swarm(
        positions=positions,
        velocities=velocities,
        values=values,
        personal_best_pos=positions.copy(),
        personal_best_val=values.copy(),
        global_best_pos=positions[best].copy(),
        global_best_val=float(values[best]),
        rng_states=tuple(rng.bit_generator.state for rng in rngs),
        config=config,
    )
    _frozen(swarm.positions, swarm.velocities, swarm.values, swarm.personal_best_pos,
            swarm.personal_best_val, swarm.global_best_pos)
    logger.debug(f"PSO init: {config.n_particles} particles, dim={dim}, best={swarm.global_best_val:.6g}")
    return swarm


def pso_step(swarm: Swarm, objective, vectorized: bool = False) -> Swarm:
    """One velocity/position update followed by the best-value bookkeeping."""
    cfg = swarm.config
    rngs = _restore_rngs(swarm.rng_states)
    shape = swarm.positions.shape
    r1 = np.empty(shape)
    r2 = np.empty(shape)
    for k, rng in enumerate(rngs):
        r1[k] = rng.uniform(0.0, 1.0, size=shape[1])
        r2[k] = rng.uniform(0.0, 1.0, size=shape[1])

    x = swarm.positions
    v = (
        cfg.w * swarm.velocities
        + cfg.c1 * r1 * (swarm.personal_best_pos - x)
        + cfg.c2 * r2 * (swarm.global_best_pos - x)
    )
    limit = cfg.velocity_limit
    v = np.clip(v, -limit, limit)
    x = x + v

    values = _evaluate(objective, x, vectorized)
    values = np.where(np.isnan(values), np.inf, values)

    improved = values < swarm.personal_best_val
    pbest_pos = np.where(improved[:, None], x, swarm.personal_best_pos)
    pbest_val = np.where(improved, values, swarm.personal_best_val)

    gbest_pos = swarm.global_best_pos
    gbest_val = swarm.global_best_val
    best = int(np.argmin(pbest_val))
    if pbest_val[best] < gbest_val:
        gbest_pos = pbest_pos[best].copy()
        gbest_val = float(pbest_val[best])

    new = replace(
        swarm,
        positions=x,
        velocities=v,
        values=values,
        personal_best_pos=pbest_pos,
        personal_best_val=pbest_val,
        global_best_pos=gbest_pos,
        global_best_val=gbest_val,
        rng_states=tuple(rng.bit_generator.state for rng in rngs),
        step=swarm.step + 1,
    )
    _frozen(new.positions, new.velocities, new.values, new.personal_best_pos,
            new.personal_best_val, new.global_best_pos)
    logger.debug(f"PSO step {new.step}: best={gbest_val:.6g}")
    return new


def pso_run(dim: int, objective, config: PsoConfig, steps: int, vectorized: bool = False) -> Swarm:
    swarm = pso_init(dim, objective, config, vectorized=vectorized)
    for _ in range(steps):
        swarm = pso_step(swarm, objective, vectorized=vectorized)
    return swarm
