"""Model parameters and the seeded random-number substreams.

One master seed drives four independent substreams (mobility, packet
generation, routing tie-breaks, epidemic) so that, for example, turning the
epidemic on does not perturb agent trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

DISTANCE_MODES = ("torus", "euclidean")
QUEUE_MODES = ("strict", "skip_stuck")
POLICIES = ("greedy", "random")

MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    """Invalid parameter value; the message names the offending key."""


@dataclass(frozen=True)
class WorldConfig:
    """All parameters of one simulated world.

    ``capacity`` is the per-step delivering ability of each agent and may be
    ``math.inf`` for unlimited sends.  ``distance`` selects the metric used
    for the greedy next-hop target: ``torus`` (minimum image, the default)
    or ``euclidean`` (no wrap).  Neighbor detection is always toroidal
    because motion is periodic.  ``queue`` selects head-of-line behavior on
    a stuck head packet (``strict``) or scanning past it (``skip_stuck``).
    """

    n_agents: int = 1500
    side_length: float = 10.0
    speed: float = 0.1
    radius: float = 1.0
    capacity: float = 1
    gen_rate: int = 50
    spread_rate: float = 0.0
    recovery_rate: float = 1.0
    initial_infected_fraction: float = 0.1
    rng_seed: int = 1
    transient_steps: int = 5000
    measure_steps: int = 50000
    distance: str = "torus"
    queue: str = "strict"

    def __post_init__(self):
        if not isinstance(self.n_agents, int) or self.n_agents < 1:
            raise ConfigError("n_agents must be a positive integer")
        if not self.side_length > 0:
            raise ConfigError("side_length must be positive")
        if self.speed < 0:
            raise ConfigError("speed must be non-negative")
        if not self.radius > 0:
            raise ConfigError("radius must be positive")
        # minimum-image uniqueness requires r < L/2
        if not self.radius < self.side_length / 2:
            raise ConfigError("radius must be smaller than side_length/2")
        if not math.isinf(self.capacity):
            if self.capacity != int(self.capacity) or self.capacity < 1:
                raise ConfigError("capacity must be a positive integer or inf")
        if not isinstance(self.gen_rate, int) or self.gen_rate < 0:
            raise ConfigError("gen_rate must be a non-negative integer")
        for key in ("spread_rate", "recovery_rate", "initial_infected_fraction"):
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{key} must be a probability in [0, 1]")
        if not isinstance(self.rng_seed, int) or not 0 <= self.rng_seed <= MAX_SEED:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer")
        if not isinstance(self.transient_steps, int) or self.transient_steps < 1:
            raise ConfigError("transient_steps must be a positive integer")
        if not isinstance(self.measure_steps, int) or self.measure_steps < 1:
            raise ConfigError("measure_steps must be a positive integer")
        if self.distance not in DISTANCE_MODES:
            raise ConfigError("distance must be one of: " + ", ".join(DISTANCE_MODES))
        if self.queue not in QUEUE_MODES:
            raise ConfigError("queue must be one of: " + ", ".join(QUEUE_MODES))

    @property
    def total_steps(self) -> int:
        return self.transient_steps + self.measure_steps

    def capacity_int(self) -> int:
        """Capacity as an integer, with a huge sentinel for inf."""
        return 2**62 if math.isinf(self.capacity) else int(self.capacity)


class RngStreams(NamedTuple):
    """Independent per-purpose generators derived from one master seed."""

    mobility: np.random.Generator
    generation: np.random.Generator
    routing: np.random.Generator
    epidemic: np.random.Generator


def make_streams(seed: int) -> RngStreams:
    children = np.random.SeedSequence(seed).spawn(4)
    return RngStreams(*(np.random.default_rng(c) for c in children))


_INT_FIELDS = {"n_agents", "gen_rate", "rng_seed", "transient_steps", "measure_steps"}
_FLOAT_FIELDS = {
    "side_length",
    "speed",
    "radius",
    "spread_rate",
    "recovery_rate",
    "initial_infected_fraction",
}
_STR_FIELDS = {"distance", "queue"}

WORLD_KEYS = {f.name for f in fields(WorldConfig)}


def coerce_world_value(key: str, raw: str):
    """Parse one key=value string into the field's native type."""
    raw = raw.strip()
    try:
        if key in _INT_FIELDS:
            return int(raw)
        if key in _FLOAT_FIELDS:
            return float(raw)
        if key == "capacity":
            if raw.lower() in ("inf", "infinite", "infinity"):
                return math.inf
            return int(raw)
        if key in _STR_FIELDS:
            return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot parse value {raw!r}") from None
    raise ConfigError(f"unknown configuration key: {key}")
