"""Closed-form mean-field predictions for the epidemic threshold.

In free flow each agent handles on average R*T/N packets per step (T the
measured mean travel time), which sets the threshold beta_c = N/(R*T).
Under full congestion every agent sends exactly its capacity C per step and
the threshold saturates at 1/C.  The measured travel time is always an
input here, never derived.
"""

from __future__ import annotations

import math


def beta_c_free(n_agents: int, gen_rate: float, avg_travel_time: float) -> float:
    """Free-flow threshold N/(R*T); values above 1 mean no threshold below 1."""
    if gen_rate * avg_travel_time <= 0:
        raise ValueError("gen_rate * avg_travel_time must be positive")
    return n_agents / (gen_rate * avg_travel_time)


def beta_c_congested(capacity: float) -> float:
    """Fully congested threshold 1/C for finite capacity."""
    if math.isinf(capacity):
        raise ValueError("capacity is infinite; use beta_c_free")
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    return 1.0 / capacity


def rho_steady_mf(beta: float, beta_c: float) -> float:
    """Stationary infected density of the mean-field rate equation.

    Zero at or below threshold, 1 - beta_c/beta above it.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be a probability")
    if beta == 0.0 and beta_c == 0.0:
        raise ValueError("rho is undefined at beta = beta_c = 0")
    if beta <= beta_c:
        return 0.0
    return 1.0 - beta_c / beta
