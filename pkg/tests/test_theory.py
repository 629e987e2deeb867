import math

import numpy as np
import pytest

from manetsim import beta_c_congested, beta_c_free, rho_steady_mf


def test_beta_c_free_direct_substitution():
    assert beta_c_free(1500, 4000, 3.75) == pytest.approx(0.1)


def test_beta_c_free_inverse_scaling_in_rate():
    t = 4.2
    values = [beta_c_free(1500, rate, t) for rate in (500, 1000, 2000, 4000)]
    for a, b in zip(values, values[1:]):
        assert a / b == pytest.approx(2.0)


def test_beta_c_free_identity():
    for n, rate, t in [(1500, 4000, 3.75), (900, 120, 7.7), (10, 3, 0.5)]:
        assert beta_c_free(n, rate, t) * rate * t / n == pytest.approx(1.0)


def test_beta_c_free_above_one_is_returned():
    assert beta_c_free(1500, 10, 3.0) > 1.0


def test_beta_c_free_rejects_zero_flow():
    with pytest.raises(ValueError):
        beta_c_free(1500, 0, 3.0)


def test_beta_c_congested_values():
    assert beta_c_congested(10) == pytest.approx(0.1)
    assert beta_c_congested(1) == 1.0


def test_beta_c_congested_rejects_infinite():
    with pytest.raises(ValueError, match="infinite"):
        beta_c_congested(math.inf)


def test_rho_steady_threshold_and_algebra():
    assert rho_steady_mf(0.2, 0.2) == 0.0
    assert rho_steady_mf(0.4, 0.2) == pytest.approx(0.5)
    assert rho_steady_mf(0.1, 0.2) == 0.0
    assert rho_steady_mf(0.0, 0.2) == 0.0


def test_rho_steady_rejects_degenerate_origin():
    with pytest.raises(ValueError):
        rho_steady_mf(0.0, 0.0)
    with pytest.raises(ValueError):
        rho_steady_mf(1.5, 0.2)


@pytest.mark.parametrize("beta,beta_c", [(0.3, 0.1), (0.15, 0.1), (0.9, 0.25), (0.11, 0.1)])
def test_rho_steady_is_fixed_point_of_rate_equation(beta, beta_c):
    # independent oracle: iterate the rate equation rho += dt * drho/dt
    # with lam*beta = beta/beta_c until convergence
    lam = 1.0 / beta_c
    rho = 0.5
    dt = 0.1
    for _ in range(200_000):
        drho = -rho + lam * beta * rho * (1.0 - rho)
        rho += dt * drho
    assert rho == pytest.approx(rho_steady_mf(beta, beta_c), abs=1e-9)


def test_rho_steady_vector_monotone_in_beta():
    betas = np.linspace(0.11, 1.0, 50)
    rhos = [rho_steady_mf(float(b), 0.1) for b in betas]
    assert all(b2 >= b1 for b1, b2 in zip(rhos, rhos[1:]))
