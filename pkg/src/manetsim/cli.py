"""Command-line entry points.

Subcommands: run, sweep-rc, sweep-beta, find-rc, find-betac, theory.
All simulation commands accept --config (key=value file), --seed, --policy
and --out; exit status is 0 on success and 2 with a diagnostic on any
configuration or bracket error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, POLICIES, WorldConfig
from .experiment import (
    BETAC_TABLE_HEADER,
    RC_TABLE_HEADER,
    SWEEP_AXES,
    ExperimentSpec,
    apply_axis,
    parse_experiment_text,
    write_csv,
    write_loads,
    write_run_trace,
    write_theory_table,
)


def _load_config(args) -> tuple[WorldConfig, dict]:
    if args.config:
        text = Path(args.config).read_text()
        config, experiment = parse_experiment_text(text)
    else:
        config, experiment = WorldConfig(), {}
    if getattr(args, "seed", None) is not None:
        config = replace(config, rng_seed=args.seed)
    return config, experiment


def _policy(args, experiment: dict) -> str:
    policy = args.policy or experiment.get("policy", "greedy")
    if policy not in POLICIES:
        raise ConfigError("policy must be one of: " + ", ".join(POLICIES))
    return policy


def _values(args, experiment: dict) -> list[float]:
    if args.values:
        return [float(v) for v in args.values.split(",")]
    if "sweep_values" in experiment:
        return list(experiment["sweep_values"])
    raise ConfigError("sweep values missing: pass --values or sweep_values in the config")


def _add_common(sub, out_required=True):
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--policy", choices=POLICIES, help="routing policy")
    sub.add_argument("--out", required=out_required, help="output CSV path")
    sub.add_argument("--workers", type=int, default=1, help="parallel realizations")


def cmd_run(args) -> int:
    from .engine import Simulation
    from .metrics import load_stats

    config, experiment = _load_config(args)
    policy = _policy(args, experiment)
    epidemic = config.spread_rate > 0
    sim = Simulation(config, policy=policy, epidemic=epidemic)
    result = sim.run(args.steps)
    write_run_trace(args.out, config, result)
    if args.loads_out:
        _, edges, probs = load_stats(result.load_sums, max(1, result.load_steps))
        write_loads(args.loads_out, config, edges, probs)
    return 0


def cmd_sweep(args, axis: str | None = None) -> int:
    config, experiment = _load_config(args)
    spec = ExperimentSpec(
        base=config,
        sweep_axis=axis or args.axis or experiment.get("sweep_axis", "R"),
        sweep_values=tuple(_values(args, experiment)),
        realizations=args.realizations or experiment.get("realizations", 5),
        policy=_policy(args, experiment),
        output_path=args.out,
    )
    from .experiment import run_experiment

    run_experiment(spec, workers=args.workers, eps_eta=args.eps_eta)
    return 0


def cmd_find_rc(args) -> int:
    from .metrics import find_rc, rc_ensemble

    config, experiment = _load_config(args)
    policy = _policy(args, experiment)
    realizations = args.realizations or experiment.get("realizations", 5)
    axis_values = _values(args, experiment) if (args.values or "sweep_values" in experiment) else [None]
    rows = []
    for value in axis_values:
        cfg = config if value is None else apply_axis(config, args.axis, value)
        lo, hi = args.lo, args.hi
        if args.auto_bracket:
            lo, hi = _expand_rc_bracket(cfg, policy, lo, hi, args.eps_eta, realizations, args.workers)
        if args.mode == "ensemble":
            rc = find_rc(cfg, policy, lo, hi, eps_eta=args.eps_eta,
                         realizations=realizations, workers=args.workers)
            values = np.array([rc])
        else:
            values = rc_ensemble(cfg, policy, lo, hi, eps_eta=args.eps_eta,
                                 realizations=realizations, resolution=args.resolution,
                                 workers=args.workers)
        rows.append(
            {
                "axis_value": float(value) if value is not None else float("nan"),
                "rc_mean": float(values.mean()),
                "rc_se": float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0,
                "n_realizations": int(realizations),
                "rc_values": ";".join(str(int(v)) for v in values),
                "master_seed": config.rng_seed,
                "seeds": ";".join(str(config.rng_seed + k) for k in range(realizations)),
            }
        )
    write_csv(args.out, RC_TABLE_HEADER, rows)
    return 0


def _expand_rc_bracket(config, policy, lo, hi, eps_eta, realizations, workers,
                       hi_limit=20000):
    # geometric expansion; each probe costs a full ensemble evaluation
    from .metrics import ensemble_eta

    seeds = [config.rng_seed + k for k in range(realizations)]
    cache = {}

    def probe(rate):
        if rate not in cache:
            cache[rate] = float(ensemble_eta(config, policy, rate, seeds, workers).mean())
        return cache[rate]

    while probe(hi) < eps_eta:
        lo = hi
        hi *= 2
        if hi > hi_limit:
            raise ConfigError(f"auto-bracket failed: eta still below eps at R={hi_limit}")
    while probe(lo) >= eps_eta:
        hi = lo
        lo = max(1, lo // 2)
        if lo == 1 and probe(1) >= eps_eta:
            raise ConfigError("auto-bracket failed: eta above eps even at R=1")
    return lo, hi


def cmd_find_betac(args) -> int:
    from .epidemic import betac_ensemble, find_beta_c
    from .theory import beta_c_free

    config, experiment = _load_config(args)
    policy = _policy(args, experiment)
    realizations = args.realizations or experiment.get("realizations", 10)
    axis_values = _values(args, experiment) if (args.values or "sweep_values" in experiment) else [None]
    rows = []
    for value in axis_values:
        cfg = config if value is None else apply_axis(config, args.axis, value)
        if args.mode == "ensemble":
            betac, details = find_beta_c(
                cfg, policy, args.lo, args.hi, realizations=realizations,
                rel_tol=args.rel_tol, workers=args.workers, return_details=True,
            )
            values = np.array([betac])
            avg_t = details["avg_t_mean"]
        else:
            values, avg_ts = betac_ensemble(
                cfg, policy, args.lo, args.hi, realizations=realizations,
                rel_tol=args.rel_tol, workers=args.workers,
            )
            finite = avg_ts[np.isfinite(avg_ts)]
            avg_t = float(finite.mean()) if finite.size else float("nan")
        theory_free = (
            beta_c_free(cfg.n_agents, cfg.gen_rate, avg_t) if np.isfinite(avg_t) else float("nan")
        )
        rows.append(
            {
                "axis_value": float(value) if value is not None else float("nan"),
                "betac_mean": float(values.mean()),
                "betac_se": float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0,
                "n_realizations": int(realizations),
                "betac_values": ";".join(repr(float(v)) for v in values),
                "avg_t_mean": avg_t,
                "betac_free_theory": theory_free,
                "betac_congested_theory": float("nan") if math.isinf(cfg.capacity) else 1.0 / cfg.capacity,
                "master_seed": config.rng_seed,
                "seeds": ";".join(str(config.rng_seed + k) for k in range(realizations)),
            }
        )
    write_csv(args.out, BETAC_TABLE_HEADER, rows)
    return 0


def cmd_theory(args) -> int:
    from .theory import beta_c_congested, beta_c_free

    bc_free = beta_c_free(args.n_agents, args.gen_rate, args.avg_t)
    print(f"beta_c (free flow, N/(R*T)) = {bc_free:.6g}"
          + ("  [no threshold below 1]" if bc_free > 1 else ""))
    if math.isinf(args.capacity):
        print("beta_c (congested, 1/C)     = n/a (infinite capacity)")
    else:
        print(f"beta_c (congested, 1/C)     = {beta_c_congested(args.capacity):.6g}")
    if args.out:
        lo, hi, count = args.beta_grid
        betas = np.linspace(lo, hi, int(count))
        write_theory_table(args.out, args.n_agents, args.gen_rate, args.avg_t,
                           args.capacity, betas)
    return 0


def _beta_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, count = text.split(":")
        return float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError("expected lo:hi:count") from None


def _capacity(text: str) -> float:
    if text.lower() in ("inf", "infinite", "infinity"):
        return math.inf
    return float(int(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manetsim",
        description="Greedy routing, congestion onset, and traffic-driven "
                    "SIS spreading among mobile agents on a periodic square.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single realization time series")
    _add_common(p_run)
    p_run.add_argument("--steps", type=int, help="override transient+measure step count")
    p_run.add_argument("--loads-out", help="also write the agent-load histogram CSV")
    p_run.set_defaults(fn=cmd_run)

    p_rc = sub.add_parser("sweep-rc", help="order parameter and travel time over a sweep")
    _add_common(p_rc)
    p_rc.add_argument("--axis", choices=[a for a in SWEEP_AXES if a != "beta"], default=None)
    p_rc.add_argument("--values", help="comma-separated sweep values")
    p_rc.add_argument("--realizations", type=int, default=None)
    p_rc.add_argument("--eps-eta", type=float, default=0.01)
    p_rc.set_defaults(fn=lambda a: cmd_sweep(a))

    p_beta = sub.add_parser("sweep-beta", help="steady infected density over spreading rates")
    _add_common(p_beta)
    p_beta.add_argument("--values", help="comma-separated beta values")
    p_beta.add_argument("--realizations", type=int, default=None)
    p_beta.add_argument("--eps-eta", type=float, default=0.01)
    p_beta.set_defaults(fn=lambda a: cmd_sweep(a, axis="beta"))

    p_frc = sub.add_parser("find-rc", help="critical generation rate by bisection")
    _add_common(p_frc)
    p_frc.add_argument("--axis", choices=("v", "r"), default="v")
    p_frc.add_argument("--values", help="axis values to scan (else the base config alone)")
    p_frc.add_argument("--lo", type=int, required=True)
    p_frc.add_argument("--hi", type=int, required=True)
    p_frc.add_argument("--eps-eta", type=float, default=0.01)
    p_frc.add_argument("--realizations", type=int, default=None)
    p_frc.add_argument("--mode", choices=("ensemble", "per-seed"), default="ensemble")
    p_frc.add_argument("--resolution", type=float, default=0.0,
                       help="relative bracket width to stop per-seed bisections at")
    p_frc.add_argument("--auto-bracket", action="store_true")
    p_frc.set_defaults(fn=cmd_find_rc)

    p_fbc = sub.add_parser("find-betac", help="epidemic threshold by bisection")
    _add_common(p_fbc)
    p_fbc.add_argument("--axis", choices=("v", "r", "R"), default="v")
    p_fbc.add_argument("--values", help="axis values to scan (else the base config alone)")
    p_fbc.add_argument("--lo", type=float, required=True)
    p_fbc.add_argument("--hi", type=float, required=True)
    p_fbc.add_argument("--realizations", type=int, default=None)
    p_fbc.add_argument("--rel-tol", type=float, default=0.05)
    p_fbc.add_argument("--mode", choices=("ensemble", "per-seed"), default="ensemble")
    p_fbc.set_defaults(fn=cmd_find_betac)

    p_th = sub.add_parser("theory", help="mean-field threshold calculator")
    p_th.add_argument("--n-agents", type=int, default=1500)
    p_th.add_argument("--gen-rate", type=float, required=True)
    p_th.add_argument("--avg-t", type=float, required=True,
                      help="measured mean travel time")
    p_th.add_argument("--capacity", type=_capacity, default=math.inf)
    p_th.add_argument("--beta-grid", type=_beta_grid, default=(0.0, 1.0, 101),
                      help="lo:hi:count grid for the CSV output")
    p_th.add_argument("--out")
    p_th.set_defaults(fn=cmd_theory)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
