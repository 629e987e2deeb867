"""Per-packet next-hop choice.

Both policies deliver directly whenever the destination is itself a
neighbor.  Otherwise greedy forwards to the neighbor closest to the
destination (ties broken uniformly at random) and the random baseline
forwards to a uniformly chosen neighbor.  A holder with no neighbors is
stuck and keeps the packet.

Greedy imposes no progress requirement: the chosen hop may sit farther from
the destination than the holder does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import euclidean_distance, torus_distance

DELIVER = "deliver"
FORWARD = "forward"
STUCK = "stuck"


@dataclass(frozen=True)
class RoutingDecision:
    kind: str  # deliver | forward | stuck
    to: int | None
    distance_after: float


def _target_distance(points, dest_point, side: float, metric: str):
    if metric == "torus":
        return torus_distance(points, dest_point, side)
    return euclidean_distance(points, dest_point)


def route_greedy(
    holder: int,
    dest: int,
    neighbors,
    positions: np.ndarray,
    side: float,
    rng: np.random.Generator,
    metric: str = "torus",
) -> RoutingDecision:
    """Greedy next hop: the neighbor nearest the destination.

    ``neighbors`` is the current neighbor set of the holder (any iterable of
    ids, holder excluded).  Requires dest != holder.  A single rng draw is
    consumed only when two or more neighbors tie for the minimum.
    """
    nbrs = np.asarray(list(neighbors) if not isinstance(neighbors, np.ndarray) else neighbors)
    if nbrs.size == 0:
        d_hold = _target_distance(positions[holder], positions[dest], side, metric)
        return RoutingDecision(STUCK, None, float(d_hold))
    if np.any(nbrs == dest):
        return RoutingDecision(DELIVER, dest, 0.0)
    dists = _target_distance(positions[nbrs], positions[dest], side, metric)
    best = dists.min()
    tied = nbrs[dists == best]
    choice = tied[0] if tied.size == 1 else tied[rng.integers(tied.size)]
    return RoutingDecision(FORWARD, int(choice), float(best))


def route_random(
    holder: int,
    dest: int,
    neighbors,
    rng: np.random.Generator,
    positions: np.ndarray | None = None,
    side: float | None = None,
) -> RoutingDecision:
    """Baseline: uniform choice among neighbors, direct delivery when found.

    ``positions``/``side`` are only needed to fill in distance_after; when
    omitted it is reported as nan.
    """
    nbrs = np.asarray(list(neighbors) if not isinstance(neighbors, np.ndarray) else neighbors)

    def dist(a: int, b: int) -> float:
        if positions is None or side is None:
            return float("nan")
        return float(torus_distance(positions[a], positions[b], side))

    if nbrs.size == 0:
        return RoutingDecision(STUCK, None, dist(holder, dest))
    if np.any(nbrs == dest):
        return RoutingDecision(DELIVER, dest, 0.0)
    choice = int(nbrs[rng.integers(nbrs.size)])
    return RoutingDecision(FORWARD, choice, dist(choice, dest))
