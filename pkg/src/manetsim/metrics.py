"""Traffic observables.

The order parameter is the capacity-normalized growth rate of the in-flight
packet count: zero in free flow where generation balances removal, positive
once congestion accumulates packets.  The critical generation rate is the
largest rate whose ensemble-mean order parameter stays below a small
threshold.  Travel time is measured per delivered packet as steps from
creation to removal (a packet delivered on the step after its creation
scores 1).  An agent's load is its time-averaged queue length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass
class TrafficMetrics:
    np_series: np.ndarray
    eta: float
    avg_travel_time: float
    loads: np.ndarray
    load_bin_edges: np.ndarray
    load_probabilities: np.ndarray
    window: tuple[int, int]


def order_parameter(np_series, transient: int, capacity: float, gen_rate: int) -> float:
    """(C/R) times the least-squares slope of N_p(t) past the transient.

    Negative slope estimates (free-flow fluctuations) clamp to zero.
    """
    if math.isinf(capacity):
        raise ValueError("order parameter requires a finite capacity")
    series = np.asarray(np_series, dtype=float)
    if series.size <= transient + 2:
        raise ValueError("series too short for the requested transient window")
    window = series[transient:]
    steps = np.arange(window.size, dtype=float)
    slope = np.polyfit(steps, window, 1)[0]
    return max(0.0, float(capacity / gen_rate * slope))


def avg_travel_time(deliveries, travel_sums, window: tuple[int, int]) -> float:
    """Mean travel time over packets delivered inside the step window."""
    lo, hi = window
    count = int(np.sum(deliveries[lo:hi]))
    if count == 0:
        raise ValueError("no deliveries in window (congested or window too short)")
    return float(np.sum(travel_sums[lo:hi]) / count)


def agent_loads(load_sums, n_steps: int) -> np.ndarray:
    """Per-agent mean queue length from accumulated per-step sums."""
    if n_steps < 1:
        raise ValueError("load window is empty")
    return np.asarray(load_sums, dtype=float) / n_steps


def load_histogram(
    loads, int_bin_limit: int = 10, log_factor: float = 1.5
) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of loads over agents: unit bins below ``int_bin_limit``,
    geometric bins (factor ``log_factor``) above.  Probabilities sum to 1."""
    loads = np.asarray(loads, dtype=float)
    edges = list(range(0, int_bin_limit + 1))
    top = loads.max(initial=0.0)
    while edges[-1] <= top:
        edges.append(edges[-1] * log_factor)
    edges = np.asarray(edges, dtype=float)
    counts, _ = np.histogram(loads, bins=edges)
    return edges, counts / loads.size


def load_stats(load_sums, n_steps: int, **hist_kwargs):
    """Loads plus their histogram, from window-accumulated queue lengths."""
    loads = agent_loads(load_sums, n_steps)
    edges, probs = load_histogram(loads, **hist_kwargs)
    return loads, edges, probs


def traffic_metrics(result) -> TrafficMetrics:
    """Assemble the standard observables from one run."""
    cfg = result.config
    window = result.measure_window
    eta = order_parameter(result.np_series, cfg.transient_steps, cfg.capacity, cfg.gen_rate) \
        if not math.isinf(cfg.capacity) else float("nan")
    try:
        avg_t = avg_travel_time(result.deliveries, result.travel_sums, window)
    except ValueError:
        avg_t = float("nan")
    loads, edges, probs = load_stats(result.load_sums, max(1, result.load_steps))
    return TrafficMetrics(
        np_series=result.np_series,
        eta=eta,
        avg_travel_time=avg_t,
        loads=loads,
        load_bin_edges=edges,
        load_probabilities=probs,
        window=window,
    )


# ----------------------------------------------------------------------
# critical generation rate

def _traffic_run(task):
    """Worker: one traffic realization; returns (eta, avg travel time).

    With unlimited capacity the order parameter is undefined (no
    congestion is possible) and reported as nan; the travel-time output
    is the payload of such sweeps.
    """
    from .engine import Simulation

    config, policy = task
    result = Simulation(config, policy=policy).run()
    if math.isinf(config.capacity):
        eta = float("nan")
    else:
        eta = order_parameter(result.np_series, config.transient_steps, config.capacity, config.gen_rate)
    try:
        avg_t = avg_travel_time(result.deliveries, result.travel_sums, result.measure_window)
    except ValueError:
        avg_t = float("nan")
    return eta, avg_t


def ensemble_eta(config, policy: str, gen_rate: int, seeds, workers: int = 1) -> np.ndarray:
    from .parallel import map_tasks

    tasks = [(replace(config, gen_rate=int(gen_rate), rng_seed=s), policy) for s in seeds]
    return np.array([eta for eta, _ in map_tasks(_traffic_run, tasks, workers)])


def find_rc(
    config,
    policy: str,
    r_lo: int,
    r_hi: int,
    eps_eta: float = 0.01,
    realizations: int = 5,
    workers: int = 1,
) -> int:
    """Largest integer generation rate whose ensemble-mean eta < eps_eta.

    Integer bisection against a fixed seed ensemble (config.rng_seed + k).
    The bracket must satisfy eta(r_lo) < eps_eta <= eta(r_hi).
    """
    from .engine import warm_kernels

    if not (0 < r_lo < r_hi):
        raise ValueError("invalid generation-rate bracket")
    warm_kernels()
    seeds = [config.rng_seed + k for k in range(realizations)]
    cache: dict[int, float] = {}

    def mean_eta(rate: int) -> float:
        if rate not in cache:
            cache[rate] = float(ensemble_eta(config, policy, rate, seeds, workers).mean())
        return cache[rate]

    eta_lo = mean_eta(r_lo)
    eta_hi = mean_eta(r_hi)
    if not (eta_lo < eps_eta <= eta_hi):
        raise ValueError(
            f"bracket invalid: mean eta is {eta_lo:.4g} at R={r_lo} "
            f"and {eta_hi:.4g} at R={r_hi} (eps_eta={eps_eta})"
        )
    lo, hi = r_lo, r_hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mean_eta(mid) < eps_eta:
            lo = mid
        else:
            hi = mid
    return lo


def _rc_single(task):
    """Worker: per-realization critical-rate bisection."""
    config, policy, r_lo, r_hi, eps_eta, resolution = task
    cache: dict[int, float] = {}

    def eta_at(rate: int) -> float:
        if rate not in cache:
            cache[rate] = _traffic_run((replace(config, gen_rate=int(rate)), policy))[0]
        return cache[rate]

    eta_lo = eta_at(r_lo)
    eta_hi = eta_at(r_hi)
    if not (eta_lo < eps_eta <= eta_hi):
        raise ValueError(
            f"bracket invalid for seed {config.rng_seed}: eta {eta_lo:.4g} at R={r_lo}, "
            f"{eta_hi:.4g} at R={r_hi}"
        )
    lo, hi = r_lo, r_hi
    while hi - lo > max(1, int(resolution * lo)):
        mid = (lo + hi) // 2
        if eta_at(mid) < eps_eta:
            lo = mid
        else:
            hi = mid
    return lo


def rc_ensemble(
    config,
    policy: str,
    r_lo: int,
    r_hi: int,
    eps_eta: float = 0.01,
    realizations: int = 5,
    resolution: float = 0.0,
    workers: int = 1,
) -> np.ndarray:
    """Per-realization critical-rate estimates (for means with errors).

    ``resolution`` > 0 stops each bisection once the bracket narrows to that
    relative width, trading precision for fewer evaluations.
    """
    from .engine import warm_kernels
    from .parallel import map_tasks

    if not (0 < r_lo < r_hi):
        raise ValueError("invalid generation-rate bracket")
    warm_kernels()
    tasks = [
        (replace(config, rng_seed=config.rng_seed + k), policy, r_lo, r_hi, eps_eta, resolution)
        for k in range(realizations)
    ]
    return np.array(map_tasks(_rc_single, tasks, workers))
