"""Jitted hot loops for the per-step delivery phase.

Packets are rows of a struct-of-arrays pool; each agent's FIFO queue is an
intrusive singly linked list over the pool (``p_next``), with head/tail/len
per agent.  Arrival epochs replace per-packet boolean flags: a packet whose
``p_arrived`` equals the current step was generated or forwarded this step
and must wait, which enforces at most one hop per packet per step without a
flag-clearing pass.  Queues are epoch-sorted by construction (appends only
ever happen at the current step), so eligibility scanning can stop at the
first fresh packet.

The delivery outcome of an agent depends only on the phase-start snapshot
(positions, neighbor grid, its own queue prefix, sender health), never on
what other agents did earlier in the same phase; ascending-id processing
matters only for the order in which tie-break draws are consumed.
"""

from numba import njit

POLICY_GREEDY = 0
POLICY_RANDOM = 1


@njit(cache=True, nogil=True, inline="always")
def _torus_dist(ax, ay, bx, by, side):
    dx = abs(ax - bx)
    if dx > side - dx:
        dx = side - dx
    dy = abs(ay - by)
    if dy > side - dy:
        dy = side - dy
    return (dx * dx + dy * dy) ** 0.5


@njit(cache=True, nogil=True, inline="always")
def _plain_dist(ax, ay, bx, by):
    dx = ax - bx
    dy = ay - by
    return (dx * dx + dy * dy) ** 0.5


@njit(cache=True, nogil=True)
def append_packets(ids, holders, q_head, q_tail, q_len, p_next):
    """Append packets to their holders' queue tails, in array order."""
    for i in range(ids.shape[0]):
        pid = ids[i]
        a = holders[i]
        p_next[pid] = -1
        tail = q_tail[a]
        if tail == -1:
            q_head[a] = pid
        else:
            p_next[tail] = pid
        q_tail[a] = pid
        q_len[a] += 1


@njit(cache=True, nogil=True)
def delivery_phase(
    t,
    policy,
    capacity,
    metric_torus,
    pos,
    side,
    radius,
    dim,
    offsets,
    cell_of,
    cell_start,
    cell_agents,
    q_head,
    q_tail,
    q_len,
    p_dest,
    p_created,
    p_hops,
    p_arrived,
    p_last_sender,
    p_last_sender_inf,
    p_next,
    health,
    collect_receipts,
    rng,
    out_del_pkt,
    out_del_travel,
    out_rcpt_to,
    out_rcpt_inf,
    nbr_scratch,
    tie_scratch,
):
    """One delivery phase over a fixed position snapshot.

    Agents are processed in ascending id; each pops up to ``capacity``
    eligible packets off its queue head.  Returns (n_delivered, n_receipts,
    n_sent).  Neighbor lists are scanned from the wrapped cell grid once per
    agent and reused for all of its packets this step.

    An isolated holder (no neighbors) is stuck on every packet it holds, so
    both queue modes stall identically there; the loop breaks as soon as
    isolation is detected.
    """
    n = q_head.shape[0]
    n_off = offsets.shape[0]
    nd = 0
    nr = 0
    ns = 0
    for a in range(n):
        pid = q_head[a]
        if pid == -1 or p_arrived[pid] >= t:
            continue
        ax = pos[a, 0]
        ay = pos[a, 1]
        nbr_count = -1  # lazily filled, shared by all packets of this agent
        sent = 0
        while sent < capacity:
            pid = q_head[a]
            if pid == -1 or p_arrived[pid] >= t:
                break
            d = p_dest[pid]
            dx = pos[d, 0]
            dy = pos[d, 1]
            if _torus_dist(ax, ay, dx, dy, side) < radius:
                # destination in range: deliver and remove from the system
                nxt = p_next[pid]
                q_head[a] = nxt
                if nxt == -1:
                    q_tail[a] = -1
                q_len[a] -= 1
                p_next[pid] = -1
                p_hops[pid] += 1
                out_del_pkt[nd] = pid
                out_del_travel[nd] = t - p_created[pid]
                nd += 1
                if collect_receipts == 1:
                    out_rcpt_to[nr] = d
                    out_rcpt_inf[nr] = health[a]
                    nr += 1
                ns += 1
                sent += 1
                continue
            if nbr_count < 0:
                nbr_count = 0
                cell = cell_of[a]
                cx = cell // dim
                cy = cell % dim
                for io in range(n_off):
                    gx = cx + offsets[io]
                    if gx < 0:
                        gx += dim
                    elif gx >= dim:
                        gx -= dim
                    row = gx * dim
                    for jo in range(n_off):
                        gy = cy + offsets[jo]
                        if gy < 0:
                            gy += dim
                        elif gy >= dim:
                            gy -= dim
                        c = row + gy
                        for k in range(cell_start[c], cell_start[c + 1]):
                            j = cell_agents[k]
                            if j == a:
                                continue
                            if _torus_dist(ax, ay, pos[j, 0], pos[j, 1], side) < radius:
                                nbr_scratch[nbr_count] = j
                                nbr_count += 1
            if nbr_count == 0:
                break  # stuck: isolated holder keeps its whole queue
            if policy == POLICY_GREEDY:
                best = 1e300
                ties = 0
                for ii in range(nbr_count):
                    j = nbr_scratch[ii]
                    if metric_torus == 1:
                        dj = _torus_dist(pos[j, 0], pos[j, 1], dx, dy, side)
                    else:
                        dj = _plain_dist(pos[j, 0], pos[j, 1], dx, dy)
                    if dj < best:
                        best = dj
                        tie_scratch[0] = j
                        ties = 1
                    elif dj == best:
                        tie_scratch[ties] = j
                        ties += 1
                if ties == 1:
                    target = tie_scratch[0]
                else:
                    target = tie_scratch[rng.integers(0, ties)]
            else:
                target = nbr_scratch[rng.integers(0, nbr_count)]
            # pop from holder, push onto target's tail
            nxt = p_next[pid]
            q_head[a] = nxt
            if nxt == -1:
                q_tail[a] = -1
            q_len[a] -= 1
            tail = q_tail[target]
            p_next[pid] = -1
            if tail == -1:
                q_head[target] = pid
            else:
                p_next[tail] = pid
            q_tail[target] = pid
            q_len[target] += 1
            p_hops[pid] += 1
            p_arrived[pid] = t
            p_last_sender[pid] = a
            p_last_sender_inf[pid] = health[a]
            if collect_receipts == 1:
                out_rcpt_to[nr] = target
                out_rcpt_inf[nr] = health[a]
                nr += 1
            ns += 1
            sent += 1
    return nd, nr, ns
