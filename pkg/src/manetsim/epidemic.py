"""Traffic-driven SIS dynamics riding on packet receipts.

Seeding happens only after the traffic transient.  Each step, every packet
hop (forwards and final deliveries alike) is a receipt stamped with the
sender's health at the start of that delivery phase.  The update is
parallel: receivers of k infecting receipts turn infected with probability
1 - (1-beta)^k, while all agents infected at step start recover with
probability mu (mu = 1 by default, i.e. deterministic recovery) and may be
re-infected in the same update.  Once no agent is infected the zero state
is absorbing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

SUSCEPTIBLE = 0
INFECTED = 1


@dataclass
class EpidemicMetrics:
    rho_series: np.ndarray
    rho_steady: float
    beta: float
    beta_c_estimate: float | None
    seeded_step: int


def seed_infection(n_agents: int, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """Uniformly chosen distinct agent ids to infect, round(fraction * N) of them."""
    if fraction * n_agents < 1:
        raise ValueError("initial_infected_fraction too small: would seed zero agents")
    count = round(fraction * n_agents)
    return rng.choice(n_agents, size=count, replace=False)


def epidemic_update(
    health: np.ndarray,
    receipt_to: np.ndarray,
    receipt_infected: np.ndarray,
    beta: float,
    mu: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One parallel SIS update from this step's receipts.

    Draw order is fixed for determinism: recovery survival draws for the
    currently infected (ascending id, skipped entirely at mu = 1), then one
    infection draw per agent that received at least one infecting receipt
    (ascending id).
    """
    n = health.shape[0]
    nxt = np.zeros(n, dtype=np.uint8)
    if mu < 1.0:
        infected = np.flatnonzero(health)
        if infected.size:
            stay = infected[rng.random(infected.size) >= mu]
            nxt[stay] = INFECTED
    infecting = receipt_to[receipt_infected.astype(bool)]
    if infecting.size:
        counts = np.bincount(infecting, minlength=n)
        exposed = np.flatnonzero(counts)
        p_hit = 1.0 - (1.0 - beta) ** counts[exposed]
        hit = exposed[rng.random(exposed.size) < p_hit]
        nxt[hit] = INFECTED
    return nxt


def steady_rho(rho_series, window: int) -> float:
    """Mean infected density over the final ``window`` entries."""
    series = np.asarray(rho_series, dtype=float)
    if window < 1 or window > series.size:
        raise ValueError("steady-state window exceeds the recorded series")
    return float(series[-window:].mean())


def _epidemic_run(task):
    """Worker: one epidemic realization; returns (steady rho, avg travel time)."""
    from .engine import Simulation
    from .metrics import avg_travel_time

    config, policy = task
    sim = Simulation(config, policy=policy, epidemic=True)
    result = sim.run(stop_on_extinction=True)
    window = max(1, config.measure_steps // 2)
    rho = steady_rho(result.rho_series, window)
    start = config.transient_steps
    stop = result.steps_run
    try:
        avg_t = avg_travel_time(result.deliveries, result.travel_sums, (start, stop))
    except ValueError:
        avg_t = float("nan")
    return rho, avg_t


def _ensemble_steady(config, policy, beta, seeds, workers):
    from .parallel import map_tasks

    tasks = [(replace(config, spread_rate=beta, rng_seed=s), policy) for s in seeds]
    out = map_tasks(_epidemic_run, tasks, workers)
    rhos = np.array([r for r, _ in out])
    avg_ts = np.array([a for _, a in out])
    return rhos, avg_ts


def find_beta_c(
    config,
    policy: str,
    beta_lo: float,
    beta_hi: float,
    eps_rho: float | None = None,
    realizations: int = 10,
    rel_tol: float = 0.05,
    workers: int = 1,
    return_details: bool = False,
):
    """Bisect for the smallest beta whose ensemble-mean steady rho exceeds eps_rho.

    The same seed ensemble (config.rng_seed + k) is reused at every
    evaluation.  The bracket must be extinct at beta_lo and endemic at
    beta_hi; bisection stops once the bracket width falls below
    rel_tol * beta_hi and returns the endemic end.
    """
    from .engine import warm_kernels

    if eps_rho is None:
        eps_rho = 5.0 / config.n_agents
    if not 0.0 <= beta_lo < beta_hi <= 1.0:
        raise ValueError("invalid beta bracket")
    warm_kernels()
    seeds = [config.rng_seed + k for k in range(realizations)]

    evaluations = {}

    def mean_rho(beta):
        if beta not in evaluations:
            rhos, avg_ts = _ensemble_steady(config, policy, beta, seeds, workers)
            evaluations[beta] = (float(rhos.mean()), avg_ts)
        return evaluations[beta][0]

    rho_lo = mean_rho(beta_lo)
    rho_hi = mean_rho(beta_hi)
    if not (rho_lo <= eps_rho < rho_hi):
        raise ValueError(
            "bracket invalid: mean steady rho is "
            f"{rho_lo:.4g} at beta={beta_lo} and {rho_hi:.4g} at beta={beta_hi} "
            f"(eps_rho={eps_rho:.4g})"
        )
    lo, hi = beta_lo, beta_hi
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if mean_rho(mid) > eps_rho:
            hi = mid
        else:
            lo = mid
    if return_details:
        # travel times from the endemic bracket end: those runs went full length
        avg_ts = evaluations[beta_hi][1]
        avg_ts = avg_ts[np.isfinite(avg_ts)]
        details = {
            "avg_t_mean": float(avg_ts.mean()) if avg_ts.size else float("nan"),
            "avg_t_se": float(avg_ts.std(ddof=1) / np.sqrt(avg_ts.size)) if avg_ts.size > 1 else 0.0,
            "evaluations": {b: v[0] for b, v in evaluations.items()},
        }
        return hi, details
    return hi


def _betac_single(task):
    """Worker: per-realization threshold bisection (for error bars)."""
    config, policy, beta_lo, beta_hi, eps_rho, rel_tol = task
    cache = {}

    def rho_at(beta):
        if beta not in cache:
            cache[beta] = _epidemic_run((replace(config, spread_rate=beta), policy))
        return cache[beta]

    rho_lo, _ = rho_at(beta_lo)
    rho_hi, avg_t = rho_at(beta_hi)
    if not (rho_lo <= eps_rho < rho_hi):
        raise ValueError(
            f"bracket invalid for seed {config.rng_seed}: steady rho "
            f"{rho_lo:.4g} at beta={beta_lo}, {rho_hi:.4g} at beta={beta_hi}"
        )
    lo, hi = beta_lo, beta_hi
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if rho_at(mid)[0] > eps_rho:
            hi = mid
        else:
            lo = mid
    return hi, avg_t


def betac_ensemble(
    config,
    policy: str,
    beta_lo: float,
    beta_hi: float,
    eps_rho: float | None = None,
    realizations: int = 8,
    rel_tol: float = 0.05,
    workers: int = 1,
):
    """Per-realization beta_c estimates (each its own bisection).

    Returns (beta_c values, avg travel times), one entry per realization;
    use these for means with standard errors.
    """
    from .engine import warm_kernels
    from .parallel import map_tasks

    if eps_rho is None:
        eps_rho = 5.0 / config.n_agents
    warm_kernels()
    tasks = [
        (replace(config, rng_seed=config.rng_seed + k), policy, beta_lo, beta_hi, eps_rho, rel_tol)
        for k in range(realizations)
    ]
    out = map_tasks(_betac_single, tasks, workers)
    return np.array([b for b, _ in out]), np.array([a for _, a in out])
