"""Sweep orchestration, realization averaging, and CSV output.

Configs are plain key=value text files ('#' comments allowed); unknown keys
are rejected by name.  Every simulation-derived CSV embeds the master seed
and the per-row realization seeds so any single point can be re-run
exactly.  Realization k of a sweep uses seed = master_seed + k.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import ConfigError, POLICIES, WORLD_KEYS, WorldConfig, coerce_world_value
from .theory import beta_c_free, rho_steady_mf

SWEEP_AXES = ("R", "v", "r", "beta")
AXIS_FIELDS = {"R": "gen_rate", "v": "speed", "r": "radius", "beta": "spread_rate"}

EXPERIMENT_KEYS = {"sweep_axis", "sweep_values", "realizations", "policy"}

RC_SWEEP_HEADER = [
    "axis_value", "eta_mean", "eta_se", "rc_flag",
    "avg_t_mean", "avg_t_se", "master_seed", "seeds",
]
BETA_SWEEP_HEADER = [
    "beta", "rho_mean", "rho_se",
    "avg_t_mean", "betac_theory", "rho_mf", "master_seed", "seeds",
]
RUN_HEADER = ["t", "Np", "deliveries", "rho", "master_seed", "seed"]
LOADS_HEADER = ["bin_left", "bin_right", "p_n", "master_seed", "seed"]
RC_TABLE_HEADER = [
    "axis_value", "rc_mean", "rc_se", "n_realizations", "rc_values",
    "master_seed", "seeds",
]
BETAC_TABLE_HEADER = [
    "axis_value", "betac_mean", "betac_se", "n_realizations", "betac_values",
    "avg_t_mean", "betac_free_theory", "betac_congested_theory",
    "master_seed", "seeds",
]
THEORY_HEADER = ["beta", "rho_mf", "beta_c_free", "beta_c_congested"]


@dataclass(frozen=True)
class ExperimentSpec:
    base: WorldConfig
    sweep_axis: str
    sweep_values: tuple
    realizations: int = 5
    policy: str = "greedy"
    output_path: str | None = None

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError("sweep_axis must be one of: " + ", ".join(SWEEP_AXES))
        values = tuple(self.sweep_values)
        if not values:
            raise ConfigError("sweep_values must be a nonempty list")
        if list(values) != sorted(values):
            raise ConfigError("sweep_values must be sorted ascending")
        object.__setattr__(self, "sweep_values", values)
        if not isinstance(self.realizations, int) or self.realizations < 1:
            raise ConfigError("realizations must be a positive integer")
        if self.policy not in POLICIES:
            raise ConfigError("policy must be one of: " + ", ".join(POLICIES))


def apply_axis(config: WorldConfig, axis: str, value) -> WorldConfig:
    field_name = AXIS_FIELDS[axis]
    if axis == "R":
        value = int(value)
    else:
        value = float(value)
    return replace(config, **{field_name: value})


# ----------------------------------------------------------------------
# config file parsing

def _parse_lines(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in pairs:
            raise ConfigError(f"duplicate key: {key}")
        pairs[key] = value.strip()
    return pairs


def parse_config(text: str) -> WorldConfig:
    """World parameters from key=value text; unknown keys are rejected."""
    values = {}
    for key, raw in _parse_lines(text).items():
        if key not in WORLD_KEYS:
            raise ConfigError(f"unknown configuration key: {key}")
        values[key] = coerce_world_value(key, raw)
    return WorldConfig(**values)


def parse_experiment_text(text: str) -> tuple[WorldConfig, dict]:
    """Like parse_config but also lifts out sweep/realization keys."""
    world: dict = {}
    experiment: dict = {}
    for key, raw in _parse_lines(text).items():
        if key in WORLD_KEYS:
            world[key] = coerce_world_value(key, raw)
        elif key in EXPERIMENT_KEYS:
            if key == "sweep_values":
                experiment[key] = tuple(float(v) for v in raw.split(","))
            elif key == "realizations":
                experiment[key] = int(raw)
            else:
                experiment[key] = raw
        else:
            raise ConfigError(f"unknown configuration key: {key}")
    return WorldConfig(**world), experiment


# ----------------------------------------------------------------------
# sweep execution

def _point_task(task):
    """Worker: one (value, realization) simulation point."""
    config, policy, axis = task
    if axis == "beta":
        from .epidemic import _epidemic_run

        return _epidemic_run((config, policy))
    from .metrics import _traffic_run

    return _traffic_run((config, policy))


def _se(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


def _nanmean(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    return float(values.mean()) if values.size else float("nan")


def run_experiment(spec: ExperimentSpec, workers: int = 1, eps_eta: float = 0.01) -> list[dict]:
    """Run every sweep value x realization, aggregate, optionally write CSV."""
    from .engine import warm_kernels
    from .parallel import map_tasks

    warm_kernels()
    seeds = [spec.base.rng_seed + k for k in range(spec.realizations)]
    tasks = []
    for value in spec.sweep_values:
        for seed in seeds:
            cfg = replace(apply_axis(spec.base, spec.sweep_axis, value), rng_seed=seed)
            tasks.append((cfg, spec.policy, spec.sweep_axis))
    flat = map_tasks(_point_task, tasks, workers)

    rows = []
    n = spec.realizations
    for i, value in enumerate(spec.sweep_values):
        chunk = flat[i * n : (i + 1) * n]
        first = np.array([a for a, _ in chunk])   # eta, or steady rho on the beta axis
        avg_ts = np.array([b for _, b in chunk])
        row = {
            "master_seed": spec.base.rng_seed,
            "seeds": ";".join(str(s) for s in seeds),
            "avg_t_mean": _nanmean(avg_ts),
            "avg_t_se": _se(avg_ts),
        }
        if spec.sweep_axis == "beta":
            cfg = spec.base
            avg_t = row["avg_t_mean"]
            betac = beta_c_free(cfg.n_agents, cfg.gen_rate, avg_t) if np.isfinite(avg_t) else float("nan")
            row.update(
                beta=float(value),
                rho_mean=_nanmean(first),
                rho_se=_se(first),
                betac_theory=betac,
                rho_mf=rho_steady_mf(float(value), betac) if np.isfinite(betac) else float("nan"),
            )
        else:
            eta_mean = _nanmean(first)
            row.update(
                axis_value=float(value),
                eta_mean=eta_mean,
                eta_se=_se(first),
                rc_flag=int(eta_mean >= eps_eta),
            )
        rows.append(row)
    if spec.output_path:
        header = BETA_SWEEP_HEADER if spec.sweep_axis == "beta" else RC_SWEEP_HEADER
        write_csv(spec.output_path, header, rows)
    return rows


# ----------------------------------------------------------------------
# CSV plumbing

def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header: list[str], rows: list[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(row[col]) for col in header])


def write_run_trace(path, config: WorldConfig, result) -> None:
    rho = result.rho_series
    rows = []
    for i in range(result.steps_run):
        r = 0.0
        if rho is not None and np.isfinite(rho[i]):
            r = float(rho[i])
        rows.append(
            {
                "t": i,
                "Np": int(result.np_series[i]),
                "deliveries": int(result.deliveries[i]),
                "rho": r,
                "master_seed": config.rng_seed,
                "seed": config.rng_seed,
            }
        )
    write_csv(path, RUN_HEADER, rows)


def write_loads(path, config: WorldConfig, edges: np.ndarray, probs: np.ndarray) -> None:
    rows = [
        {
            "bin_left": float(edges[i]),
            "bin_right": float(edges[i + 1]),
            "p_n": float(probs[i]),
            "master_seed": config.rng_seed,
            "seed": config.rng_seed,
        }
        for i in range(len(probs))
    ]
    write_csv(path, LOADS_HEADER, rows)


def write_theory_table(path, n_agents: int, gen_rate: float, avg_t: float,
                       capacity: float, betas) -> None:
    bc_free = beta_c_free(n_agents, gen_rate, avg_t)
    bc_cong = float("nan") if math.isinf(capacity) else 1.0 / capacity
    rows = [
        {
            "beta": float(b),
            "rho_mf": rho_steady_mf(float(b), bc_free),
            "beta_c_free": bc_free,
            "beta_c_congested": bc_cong,
        }
        for b in betas
    ]
    write_csv(path, THEORY_HEADER, rows)
