import numpy as np
import pytest

from manetsim import DELIVER, FORWARD, STUCK, route_greedy, route_random, torus_distance

L = 10.0


def random_scene(rng, n=40):
    positions = rng.uniform(0, L, (n, 2))
    holder, dest = 0, 1
    others = np.arange(2, n)
    nbrs = rng.choice(others, size=rng.integers(1, 11), replace=False)
    return positions, holder, dest, nbrs


def test_delivers_when_destination_in_range(rng):
    positions = rng.uniform(0, L, (5, 2))
    decision = route_greedy(0, 3, [2, 3, 4], positions, L, rng)
    assert decision.kind == DELIVER and decision.to == 3 and decision.distance_after == 0.0
    decision = route_random(0, 3, [2, 3, 4], rng)
    assert decision.kind == DELIVER


def test_stuck_without_neighbors(rng):
    positions = rng.uniform(0, L, (3, 2))
    decision = route_greedy(0, 2, [], positions, L, rng)
    assert decision.kind == STUCK and decision.to is None
    assert decision.distance_after == pytest.approx(
        float(torus_distance(positions[0], positions[2], L))
    )
    assert route_random(0, 2, [], rng).kind == STUCK


def test_singleton_neighbor_forwards_with_probability_one(rng):
    positions = rng.uniform(0, L, (4, 2))
    for _ in range(20):
        assert route_random(0, 3, [2], rng).to == 2


def test_greedy_matches_exhaustive_argmin(rng):
    # continuous positions: ties have measure zero, so the argmin is unique
    for _ in range(10_000):
        positions, holder, dest, nbrs = random_scene(rng)
        decision = route_greedy(holder, dest, nbrs, positions, L, rng)
        if dest in nbrs:
            assert decision.kind == DELIVER
            continue
        dists = torus_distance(positions[nbrs], positions[dest], L)
        assert decision.kind == FORWARD
        assert decision.to == nbrs[np.argmin(dists)]
        assert decision.distance_after == pytest.approx(dists.min())


def test_greedy_tie_break_uniform(rng):
    # four neighbors exactly equidistant from the destination
    positions = np.array(
        [[5.0, 5.0], [5.0, 1.0], [4.0, 1.0], [6.0, 1.0], [5.0, 0.0], [5.0, 2.0]]
    )
    nbrs = np.array([2, 3, 4, 5])
    counts = {j: 0 for j in nbrs}
    trials = 8000
    for _ in range(trials):
        decision = route_greedy(0, 1, nbrs, positions, L, rng)
        assert decision.kind == FORWARD and decision.to in counts
        counts[decision.to] += 1
    for j, c in counts.items():
        assert abs(c / trials - 0.25) < 0.02, counts


def test_random_choice_uniform(rng):
    nbrs = np.array([3, 4, 5, 6])
    counts = {j: 0 for j in nbrs}
    trials = 100_000
    for _ in range(trials):
        counts[route_random(0, 2, nbrs, rng).to] += 1
    for j, c in counts.items():
        assert abs(c / trials - 0.25) < 0.01


def test_scale_invariance(rng):
    for _ in range(200):
        positions, holder, dest, nbrs = random_scene(rng)
        if dest in nbrs:
            continue
        a = route_greedy(holder, dest, nbrs, positions, L, rng)
        b = route_greedy(holder, dest, nbrs, positions * 2.0, 2.0 * L, rng)
        assert a.kind == b.kind and a.to == b.to


def test_greedy_may_move_away_from_destination(rng):
    # no progress requirement: the only neighbor is farther than the holder
    positions = np.array([[5.0, 5.0], [5.0, 8.0], [5.0, 4.0]])
    decision = route_greedy(0, 1, [2], positions, L, rng)
    assert decision.kind == FORWARD and decision.to == 2
    assert decision.distance_after > torus_distance(positions[0], positions[1], L)


def test_euclidean_metric_flag_changes_boundary_choice(rng):
    # dest across the seam: torus metric prefers the wrapped-side neighbor
    positions = np.array([[0.5, 5.0], [8.0, 5.0], [0.1, 5.0], [1.2, 5.0]])
    nbrs = [2, 3]
    torus_pick = route_greedy(0, 1, nbrs, positions, L, rng, metric="torus")
    plain_pick = route_greedy(0, 1, nbrs, positions, L, rng, metric="euclidean")
    assert torus_pick.to == 2
    assert plain_pick.to == 3
