"""The per-step simulation loop.

Step order: mobility update, packet generation, neighbor-grid rebuild,
delivery phase, epidemic update (when enabled), step record.  Moving before
generating means delivery always acts on current-step positions.  Freshly
generated or forwarded packets carry the current arrival epoch and become
forwardable only on the next step, so a packet makes at most one hop per
step regardless of agent processing order.

Packet state lives in a struct-of-arrays pool (delivered slots are
recycled); tests and callers get ordinary ``Packet``/``AgentState`` views
built on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import POLICIES, RngStreams, WorldConfig, make_streams
from .epidemic import epidemic_update, seed_infection
from .geometry import init_positions, step_mobility, wrap
from .spatial import NeighborIndex

_POLICY_CODES = {"greedy": _kernels.POLICY_GREEDY, "random": _kernels.POLICY_RANDOM}


@dataclass(frozen=True)
class Packet:
    """Read-only view of one in-flight packet."""

    id: int
    source: int
    dest: int
    created_step: int
    hops: int
    arrived_this_step: bool
    last_sender: int | None
    last_sender_infected: bool


@dataclass(frozen=True)
class AgentState:
    """Read-only view of one agent: position, heading, queue, health."""

    id: int
    position: tuple[float, float]
    heading: float
    queue: tuple[Packet, ...]
    health: int  # 0 susceptible, 1 infected


@dataclass(frozen=True)
class StepRecord:
    t: int
    n_packets: int  # in flight at end of step
    n_delivered: int
    travel_times: np.ndarray
    rho: float | None


@dataclass
class RunResult:
    """Per-step series and window accumulators from one realization."""

    config: WorldConfig
    policy: str
    np_series: np.ndarray
    deliveries: np.ndarray
    travel_sums: np.ndarray
    rho_series: np.ndarray | None
    load_sums: np.ndarray
    load_steps: int
    seeded_step: int | None
    steps_run: int

    @property
    def measure_window(self) -> tuple[int, int]:
        start = self.config.transient_steps
        return start, min(self.steps_run, start + self.config.measure_steps)


class Simulation:
    """One seeded realization of the mobile-agent traffic world."""

    def __init__(
        self,
        config: WorldConfig,
        policy: str = "greedy",
        epidemic: bool = False,
        _generate_before_move: bool = False,
    ):
        if policy not in POLICIES:
            raise ValueError("policy must be one of: " + ", ".join(POLICIES))
        if config.gen_rate > 0 and config.n_agents < 2:
            raise ValueError("packet generation needs at least two agents")
        self.config = config
        self.policy = policy
        self.epidemic = epidemic
        self._policy_code = _POLICY_CODES[policy]
        self._metric_torus = 1 if config.distance == "torus" else 0
        self._capacity = config.capacity_int()
        self._generate_before_move = _generate_before_move

        self.streams: RngStreams = make_streams(config.rng_seed)
        n = config.n_agents
        self.positions = init_positions(n, config.side_length, self.streams.mobility)
        self.headings = np.zeros(n, dtype=np.float64)
        self.health = np.zeros(n, dtype=np.uint8)
        self.index = NeighborIndex(config.side_length, config.radius, n)

        # FIFO queues as linked lists over the packet pool
        self._q_head = np.full(n, -1, dtype=np.int32)
        self._q_tail = np.full(n, -1, dtype=np.int32)
        self._q_len = np.zeros(n, dtype=np.int32)

        cap = max(1024, 4 * config.gen_rate)
        self._pool_cap = cap
        self._pool_used = 0
        self._p_source = np.zeros(cap, dtype=np.int32)
        self._p_dest = np.zeros(cap, dtype=np.int32)
        self._p_created = np.zeros(cap, dtype=np.int32)
        self._p_hops = np.zeros(cap, dtype=np.int32)
        self._p_arrived = np.zeros(cap, dtype=np.int32)
        self._p_last_sender = np.zeros(cap, dtype=np.int32)
        self._p_last_sender_inf = np.zeros(cap, dtype=np.uint8)
        self._p_next = np.zeros(cap, dtype=np.int32)
        self._free = np.zeros(cap, dtype=np.int32)
        self._free_top = 0

        self._nbr_scratch = np.empty(n, dtype=np.int32)
        self._tie_scratch = np.empty(n, dtype=np.int32)
        self._buf_size = 0
        self._ensure_buffers(1024)

        self._t = 0
        self.in_flight = 0
        self.generated_total = 0
        self.delivered_total = 0
        self.seeded = False
        self.seeded_step: int | None = None

    # ------------------------------------------------------------------
    # packet pool plumbing

    def _grow_pool(self, needed: int) -> None:
        new_cap = max(2 * self._pool_cap, needed)
        pad = new_cap - self._pool_cap

        def extend(arr, fill=0):
            return np.concatenate([arr, np.full(pad, fill, dtype=arr.dtype)])

        self._p_source = extend(self._p_source)
        self._p_dest = extend(self._p_dest)
        self._p_created = extend(self._p_created)
        self._p_hops = extend(self._p_hops)
        self._p_arrived = extend(self._p_arrived)
        self._p_last_sender = extend(self._p_last_sender)
        self._p_last_sender_inf = extend(self._p_last_sender_inf)
        self._p_next = extend(self._p_next)
        self._free = extend(self._free)
        self._pool_cap = new_cap

    def _alloc(self, k: int) -> np.ndarray:
        out = np.empty(k, dtype=np.int32)
        take = min(self._free_top, k)
        if take:
            out[:take] = self._free[self._free_top - take : self._free_top]
            self._free_top -= take
        rest = k - take
        if rest:
            if self._pool_used + rest > self._pool_cap:
                self._grow_pool(self._pool_used + rest)
            out[take:] = np.arange(self._pool_used, self._pool_used + rest, dtype=np.int32)
            self._pool_used += rest
        return out

    def _release(self, ids: np.ndarray) -> None:
        k = ids.shape[0]
        if self._free_top + k > self._free.shape[0]:
            self._free = np.concatenate(
                [self._free, np.zeros(max(k, self._free.shape[0]), dtype=np.int32)]
            )
        self._free[self._free_top : self._free_top + k] = ids
        self._free_top += k

    def _ensure_buffers(self, bound: int) -> None:
        if bound <= self._buf_size:
            return
        self._buf_del = np.empty(bound, dtype=np.int32)
        self._buf_travel = np.empty(bound, dtype=np.int32)
        self._buf_rcpt_to = np.empty(bound, dtype=np.int32)
        self._buf_rcpt_inf = np.empty(bound, dtype=np.uint8)
        self._buf_size = bound

    # ------------------------------------------------------------------
    # step pieces

    def _generate(self, t: int) -> int:
        rate = self.config.gen_rate
        if rate == 0:
            return 0
        n = self.config.n_agents
        g = self.streams.generation
        src = g.integers(0, n, rate)
        dst = g.integers(0, n, rate)
        while True:
            clash = np.flatnonzero(src == dst)
            if clash.size == 0:
                break
            dst[clash] = g.integers(0, n, clash.size)
        ids = self._alloc(rate)
        self._p_source[ids] = src
        self._p_dest[ids] = dst
        self._p_created[ids] = t
        self._p_hops[ids] = 0
        self._p_arrived[ids] = t
        self._p_last_sender[ids] = -1
        self._p_last_sender_inf[ids] = 0
        _kernels.append_packets(
            ids, src.astype(np.int32), self._q_head, self._q_tail, self._q_len, self._p_next
        )
        self.in_flight += rate
        self.generated_total += rate
        return rate

    def _seed_now(self) -> None:
        chosen = seed_infection(
            self.config.n_agents,
            self.config.initial_infected_fraction,
            self.streams.epidemic,
        )
        self.health[:] = 0
        self.health[chosen] = 1
        self.seeded = True
        self.seeded_step = self._t

    # ------------------------------------------------------------------

    @property
    def now(self) -> int:
        """Index of the next step to execute."""
        return self._t

    def step(self) -> StepRecord:
        cfg = self.config
        t = self._t
        if self.epidemic and not self.seeded and t == cfg.transient_steps:
            self._seed_now()
        if self._generate_before_move:
            self._generate(t)
            self.positions, self.headings = step_mobility(
                self.positions, cfg.speed, cfg.side_length, self.streams.mobility
            )
        else:
            self.positions, self.headings = step_mobility(
                self.positions, cfg.speed, cfg.side_length, self.streams.mobility
            )
            self._generate(t)
        self.index.rebuild(self.positions, epoch=t)

        bound = max(1, min(self.in_flight, cfg.n_agents * self._capacity))
        self._ensure_buffers(bound)
        collect = 1 if (self.epidemic and self.seeded) else 0
        nd, nr, ns = _kernels.delivery_phase(
            t,
            self._policy_code,
            self._capacity,
            self._metric_torus,
            self.positions,
            cfg.side_length,
            cfg.radius,
            self.index.dim,
            self.index.offsets,
            self.index.cell_of,
            self.index.cell_start,
            self.index.cell_agents,
            self._q_head,
            self._q_tail,
            self._q_len,
            self._p_dest,
            self._p_created,
            self._p_hops,
            self._p_arrived,
            self._p_last_sender,
            self._p_last_sender_inf,
            self._p_next,
            self.health,
            collect,
            self.streams.routing,
            self._buf_del,
            self._buf_travel,
            self._buf_rcpt_to,
            self._buf_rcpt_inf,
            self._nbr_scratch,
            self._tie_scratch,
        )
        travel = self._buf_travel[:nd].copy()
        self._release(self._buf_del[:nd])
        self.delivered_total += nd
        self.in_flight -= nd

        rho: float | None = None
        if self.epidemic and self.seeded:
            self.health = epidemic_update(
                self.health,
                self._buf_rcpt_to[:nr],
                self._buf_rcpt_inf[:nr],
                cfg.spread_rate,
                cfg.recovery_rate,
                self.streams.epidemic,
            )
            rho = float(self.health.mean())

        # conservation: everything generated is either delivered or queued
        assert self.generated_total == self.delivered_total + self.in_flight
        self._t = t + 1
        return StepRecord(t, self.in_flight, nd, travel, rho)

    def run(self, n_steps: int | None = None, stop_on_extinction: bool = False) -> RunResult:
        """Execute ``n_steps`` (default transient + measure) collecting series.

        With ``stop_on_extinction`` an epidemic run ends as soon as the
        infected set empties (the zero state is absorbing); the rho series
        is padded with zeros to full length, traffic series are truncated.
        """
        cfg = self.config
        total = cfg.total_steps if n_steps is None else n_steps
        np_series = np.zeros(total, dtype=np.int64)
        deliveries = np.zeros(total, dtype=np.int32)
        travel_sums = np.zeros(total, dtype=np.int64)
        rho_series = np.full(total, np.nan) if self.epidemic else None
        load_sums = np.zeros(cfg.n_agents, dtype=np.float64)
        load_steps = 0
        meas_lo = cfg.transient_steps
        meas_hi = cfg.transient_steps + cfg.measure_steps
        steps_run = total
        for i in range(total):
            record = self.step()
            np_series[i] = record.n_packets
            deliveries[i] = record.n_delivered
            travel_sums[i] = int(record.travel_times.sum())
            if rho_series is not None and record.rho is not None:
                rho_series[i] = record.rho
            if meas_lo <= record.t < meas_hi:
                load_sums += self._q_len
                load_steps += 1
            if (
                stop_on_extinction
                and self.epidemic
                and self.seeded
                and record.rho == 0.0
            ):
                steps_run = i + 1
                rho_series[i + 1 :] = 0.0
                np_series = np_series[: i + 1]
                deliveries = deliveries[: i + 1]
                travel_sums = travel_sums[: i + 1]
                break
        return RunResult(
            config=cfg,
            policy=self.policy,
            np_series=np_series,
            deliveries=deliveries,
            travel_sums=travel_sums,
            rho_series=rho_series,
            load_sums=load_sums,
            load_steps=load_steps,
            seeded_step=self.seeded_step,
            steps_run=steps_run,
        )

    # ------------------------------------------------------------------
    # introspection and test hooks

    def queue_ids(self, i: int) -> list[int]:
        out = []
        pid = int(self._q_head[i])
        while pid != -1:
            out.append(pid)
            pid = int(self._p_next[pid])
        return out

    def packet(self, pid: int) -> Packet:
        last = int(self._p_last_sender[pid])
        return Packet(
            id=pid,
            source=int(self._p_source[pid]),
            dest=int(self._p_dest[pid]),
            created_step=int(self._p_created[pid]),
            hops=int(self._p_hops[pid]),
            arrived_this_step=bool(self._p_arrived[pid] == self._t - 1),
            last_sender=None if last < 0 else last,
            last_sender_infected=bool(self._p_last_sender_inf[pid]),
        )

    def agent(self, i: int) -> AgentState:
        return AgentState(
            id=i,
            position=(float(self.positions[i, 0]), float(self.positions[i, 1])),
            heading=float(self.headings[i]),
            queue=tuple(self.packet(p) for p in self.queue_ids(i)),
            health=int(self.health[i]),
        )

    def queue_lengths(self) -> np.ndarray:
        return self._q_len.copy()

    def place_agents(self, positions) -> None:
        """Test hook: pin agent positions (wrapped into the square)."""
        arr = np.asarray(positions, dtype=np.float64)
        if arr.shape != (self.config.n_agents, 2):
            raise ValueError("positions must have shape (n_agents, 2)")
        self.positions = wrap(arr, self.config.side_length)

    def inject_packet(
        self, holder: int, dest: int, created_step: int | None = None, eligible: bool = True
    ) -> int:
        """Test hook: put one packet on an agent's queue tail.

        With ``eligible`` the packet may move on the very next step (its
        creation is backdated accordingly, keeping travel time equal to the
        number of hops to come).
        """
        if holder == dest:
            raise ValueError("source and destination must differ")
        stamp = (self._t - 1) if eligible else self._t
        if created_step is not None:
            stamp = created_step
        pid = int(self._alloc(1)[0])
        self._p_source[pid] = holder
        self._p_dest[pid] = dest
        self._p_created[pid] = stamp
        self._p_hops[pid] = 0
        self._p_arrived[pid] = stamp
        self._p_last_sender[pid] = -1
        self._p_last_sender_inf[pid] = 0
        _kernels.append_packets(
            np.array([pid], dtype=np.int32),
            np.array([holder], dtype=np.int32),
            self._q_head,
            self._q_tail,
            self._q_len,
            self._p_next,
        )
        self.in_flight += 1
        self.generated_total += 1
        return pid


def warm_kernels() -> None:
    """Compile the jitted kernels on a toy world (cached across processes)."""
    cfg = WorldConfig(
        n_agents=8,
        side_length=4.0,
        speed=0.2,
        radius=1.0,
        gen_rate=2,
        rng_seed=7,
        transient_steps=1,
        measure_steps=2,
    )
    for policy in POLICIES:
        Simulation(cfg, policy=policy).run(3)
