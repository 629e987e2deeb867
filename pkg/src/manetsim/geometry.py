"""Periodic-square geometry and the random-direction mobility update.

Agents live on an L x L square with periodic boundaries.  Every step each
agent draws a fresh heading uniform on [-pi, pi] and moves a fixed distance
``speed`` along it; coordinates are reduced modulo L afterwards.
"""

from __future__ import annotations

import numpy as np


def wrap(values, side: float):
    """Reduce coordinates into [0, side) with a true mathematical modulo."""
    return np.mod(values, side)


def torus_distance(p, q, side: float):
    """Minimum-image distance between points of the periodic square.

    ``p`` and ``q`` are array-likes with coordinates along the last axis,
    shape (..., 2); broadcasting applies.  Coordinates must already be
    reduced into [0, side).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    delta = np.abs(p - q)
    delta = np.minimum(delta, side - delta)
    return np.sqrt(np.sum(delta * delta, axis=-1))


def euclidean_distance(p, q):
    """Plain unwrapped distance (the literal target-metric alternative)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    delta = p - q
    return np.sqrt(np.sum(delta * delta, axis=-1))


def init_positions(n_agents: int, side: float, rng: np.random.Generator) -> np.ndarray:
    """Scatter agents uniformly on the square; returns an (N, 2) array."""
    positions = np.empty((n_agents, 2), dtype=np.float64)
    positions[:, 0] = rng.uniform(0.0, side, n_agents)
    positions[:, 1] = rng.uniform(0.0, side, n_agents)
    return positions


def step_mobility(
    positions: np.ndarray, speed: float, side: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """One mobility update for all agents.

    Headings are drawn uniform on [-pi, pi] in agent-index order, then every
    agent advances ``speed`` along its heading with periodic wrap.  Returns
    (new_positions, headings).
    """
    n = positions.shape[0]
    headings = rng.uniform(-np.pi, np.pi, n)
    moved = np.empty_like(positions)
    moved[:, 0] = np.mod(positions[:, 0] + speed * np.cos(headings), side)
    moved[:, 1] = np.mod(positions[:, 1] + speed * np.sin(headings), side)
    return moved, headings
