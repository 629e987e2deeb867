import numpy as np
import pytest

from manetsim import NeighborIndex, torus_distance


def brute_force_neighbors(positions, side, radius, i):
    d = torus_distance(positions, positions[i], side)
    found = np.flatnonzero(d < radius)
    return found[found != i]


def test_empty_world():
    index = NeighborIndex(10.0, 1.0, 0)
    index.rebuild(np.zeros((0, 2)), epoch=0)
    assert index.cell_start[-1] == 0


def test_all_agents_at_one_point():
    n = 12
    index = NeighborIndex(10.0, 1.0, n)
    positions = np.full((n, 2), 3.7)
    index.rebuild(positions, epoch=0)
    counts = np.diff(index.cell_start)
    assert counts.max() == n and counts.sum() == n
    for i in range(n):
        nbrs = index.neighbors_of(i, epoch=0)
        assert len(nbrs) == n - 1 and i not in nbrs


def test_bucket_counts_sum_to_n(rng):
    n = 200
    index = NeighborIndex(10.0, 0.7, n)
    index.rebuild(rng.uniform(0, 10.0, (n, 2)), epoch=3)
    assert np.diff(index.cell_start).sum() == n
    assert sorted(index.cell_agents) == list(range(n))


def test_mutual_at_half_radius_excluded_at_exact_radius():
    index = NeighborIndex(10.0, 1.0, 2)
    index.rebuild(np.array([[2.0, 2.0], [2.5, 2.0]]), epoch=0)
    assert list(index.neighbors_of(0, epoch=0)) == [1]
    assert list(index.neighbors_of(1, epoch=0)) == [0]
    # strict inequality: ties at exactly r do not communicate
    index.rebuild(np.array([[2.0, 2.0], [3.0, 2.0]]), epoch=1)
    assert len(index.neighbors_of(0, epoch=1)) == 0
    assert len(index.neighbors_of(1, epoch=1)) == 0


def test_stale_query_asserts():
    index = NeighborIndex(10.0, 1.0, 3)
    index.rebuild(np.zeros((3, 2)), epoch=5)
    with pytest.raises(AssertionError):
        index.neighbors_of(0, epoch=6)


@pytest.mark.parametrize("side,radius", [(10.0, 1.0), (10.0, 0.8), (6.0, 1.7), (10.0, 4.9), (5.0, 2.3)])
def test_matches_brute_force(rng, side, radius):
    n = 50
    for _ in range(20):
        positions = rng.uniform(0, side, (n, 2))
        index = NeighborIndex(side, radius, n)
        index.rebuild(positions, epoch=0)
        for i in range(n):
            expected = brute_force_neighbors(positions, side, radius, i)
            got = index.neighbors_of(i, epoch=0)
            assert np.array_equal(got, expected), (side, radius, i)


def test_symmetry_on_random_layout(rng):
    n = 80
    positions = rng.uniform(0, 10.0, (n, 2))
    index = NeighborIndex(10.0, 1.3, n)
    index.rebuild(positions, epoch=0)
    sets = [set(index.neighbors_of(i, epoch=0)) for i in range(n)]
    for i in range(n):
        for j in sets[i]:
            assert i in sets[j]
