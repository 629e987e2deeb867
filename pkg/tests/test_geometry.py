import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manetsim import WorldConfig, init_positions, make_streams, step_mobility, torus_distance, wrap
from manetsim.geometry import euclidean_distance

L = 10.0

coord = st.floats(min_value=0.0, max_value=np.nextafter(L, 0.0), allow_nan=False)
point = st.tuples(coord, coord)


def test_identical_points():
    assert torus_distance((1.0, 1.0), (1.0, 1.0), L) == 0.0


def test_wrap_across_both_seams():
    d = torus_distance((0.5, 0.5), (9.5, 9.5), L)
    assert d == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_three_four_five_no_wrap():
    assert torus_distance((2.0, 3.0), (5.0, 7.0), L) == pytest.approx(5.0, abs=1e-12)


def test_broadcasting_shapes():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [9.0, 0.0]])
    d = torus_distance(pts, (0.0, 0.0), L)
    assert d.shape == (3,)
    assert d[2] == pytest.approx(1.0)


@given(point, point)
@settings(max_examples=300)
def test_metric_symmetry_and_bound(a, b):
    dab = torus_distance(a, b, L)
    dba = torus_distance(b, a, L)
    assert dab == dba
    assert dab <= L / math.sqrt(2.0) + 1e-12


@given(point, point, point)
@settings(max_examples=300)
def test_metric_triangle_inequality(a, b, c):
    assert torus_distance(a, c, L) <= torus_distance(a, b, L) + torus_distance(b, c, L) + 1e-9


@given(point, point)
@settings(max_examples=200)
def test_metric_identity_of_indiscernibles(a, b):
    d = torus_distance(a, b, L)
    if a == b:
        assert d == 0.0
    if d == 0.0:
        assert np.allclose(a, b)


def test_wrap_maps_negatives_into_range():
    assert wrap(-0.25, L) == pytest.approx(9.75)
    assert wrap(np.array([-10.0, 10.0, 23.5]), L) == pytest.approx([0.0, 0.0, 3.5])


def test_euclidean_ignores_wrap():
    assert euclidean_distance((0.5, 0.0), (9.5, 0.0)) == pytest.approx(9.0)


def test_positions_stay_in_range_and_wrap_at_boundary(rng):
    positions = np.array([[9.9, 5.0]])
    # force a heading of zero by monkey-level math: speed along +x wraps
    moved = wrap(positions + [0.2, 0.0], L)
    assert moved[0, 0] == pytest.approx(0.1)

    pos = init_positions(200, L, rng)
    for _ in range(50):
        pos, headings = step_mobility(pos, 0.7, L, rng)
        assert np.all((0.0 <= pos) & (pos < L))
        assert np.all((-math.pi <= headings) & (headings <= math.pi))


def test_zero_speed_keeps_positions(rng):
    pos = init_positions(50, L, rng)
    moved, _ = step_mobility(pos, 0.0, L, rng)
    assert np.array_equal(moved, pos)


def test_per_step_displacement_equals_speed(rng):
    pos = init_positions(100, L, rng)
    speed = 0.3
    for _ in range(20):
        moved, _ = step_mobility(pos, speed, L, rng)
        stepped = torus_distance(moved, pos, L)
        assert np.allclose(stepped, speed, atol=1e-12)
        pos = moved


def test_trajectories_bit_identical_for_same_seed():
    a = make_streams(123).mobility
    b = make_streams(123).mobility
    pa = init_positions(64, L, a)
    pb = init_positions(64, L, b)
    assert np.array_equal(pa, pb)
    for _ in range(25):
        pa, ha = step_mobility(pa, 0.4, L, a)
        pb, hb = step_mobility(pb, 0.4, L, b)
        assert np.array_equal(pa, pb)
        assert np.array_equal(ha, hb)


def test_init_positions_single_agent_in_range(rng):
    pos = init_positions(1, L, rng)
    assert pos.shape == (1, 2)
    assert np.all((0.0 <= pos) & (pos < L))


def test_init_positions_uniform_mean_bound():
    # 3-sigma bound on the mean of 1500 uniforms: L * (1/2 +- 3/sqrt(12 N))
    rng = make_streams(4).mobility
    pos = init_positions(1500, L, rng)
    bound = L * 3.0 / math.sqrt(12.0 * 1500)
    assert abs(pos[:, 0].mean() - L / 2) < bound
    assert abs(pos[:, 1].mean() - L / 2) < bound


def test_config_rejects_bad_geometry():
    with pytest.raises(ValueError, match="radius"):
        WorldConfig(radius=0.0)
    with pytest.raises(ValueError, match="radius"):
        WorldConfig(radius=5.0, side_length=10.0)
    with pytest.raises(ValueError, match="speed"):
        WorldConfig(speed=-0.1)
