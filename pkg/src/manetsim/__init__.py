"""Greedy packet routing, congestion onset, and traffic-driven SIS
spreading among mobile agents on a periodic square."""

from .config import ConfigError, RngStreams, WorldConfig, make_streams
from .engine import AgentState, Packet, RunResult, Simulation, StepRecord, warm_kernels
from .epidemic import (
    EpidemicMetrics,
    betac_ensemble,
    epidemic_update,
    find_beta_c,
    seed_infection,
    steady_rho,
)
from .experiment import ExperimentSpec, parse_config, run_experiment
from .geometry import (
    euclidean_distance,
    init_positions,
    step_mobility,
    torus_distance,
    wrap,
)
from .metrics import (
    TrafficMetrics,
    avg_travel_time,
    find_rc,
    load_histogram,
    load_stats,
    order_parameter,
    rc_ensemble,
    traffic_metrics,
)
from .routing import DELIVER, FORWARD, STUCK, RoutingDecision, route_greedy, route_random
from .spatial import NeighborIndex
from .theory import beta_c_congested, beta_c_free, rho_steady_mf

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "ConfigError",
    "DELIVER",
    "EpidemicMetrics",
    "ExperimentSpec",
    "FORWARD",
    "NeighborIndex",
    "Packet",
    "RngStreams",
    "RoutingDecision",
    "RunResult",
    "STUCK",
    "Simulation",
    "StepRecord",
    "TrafficMetrics",
    "WorldConfig",
    "avg_travel_time",
    "beta_c_congested",
    "beta_c_free",
    "betac_ensemble",
    "epidemic_update",
    "euclidean_distance",
    "find_beta_c",
    "find_rc",
    "init_positions",
    "load_histogram",
    "load_stats",
    "make_streams",
    "order_parameter",
    "parse_config",
    "rc_ensemble",
    "rho_steady_mf",
    "route_greedy",
    "route_random",
    "run_experiment",
    "seed_infection",
    "steady_rho",
    "step_mobility",
    "torus_distance",
    "traffic_metrics",
    "warm_kernels",
    "wrap",
]
