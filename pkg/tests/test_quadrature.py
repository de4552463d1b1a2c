import numpy as np
import pytest

from heatlab.errors import DivergentTailError
from heatlab.quadrature import (DEFAULT_CONFIG, central_difference,
                                gauss_panel, geometric_tail,
                                graded_radial_integral,
                                log_singular_closed_form,
                                log_singular_integral)


def test_gauss_panel_polynomial_exact():
    # 24-point Gauss integrates degree-47 polynomials exactly
    val = gauss_panel(lambda x: x ** 7 - 3.0 * x ** 2 + 1.0, 0.0, 2.0)
    exact = 2.0 ** 8 / 8.0 - 2.0 ** 3 + 2.0
    assert abs(val - exact) < 1e-13


@pytest.mark.parametrize("lam", [1.2, 1.4, 1.8, 2.5])
@pytest.mark.parametrize("rho", [1e-1, 1e-2, 1e-3])
def test_model_core_integral_matches_closed_form(lam, rho):
    res = log_singular_integral(lam, rho)
    closed = log_singular_closed_form(lam, rho)
    assert not res.divergent
    assert abs(res.value - closed) / closed < 1e-6


def test_model_core_integral_divergent_at_weak_exponent():
    # lambda <= 1 makes the core non-integrable
    res = log_singular_integral(0.9, 0.1)
    assert res.divergent and np.isinf(res.value)


def test_geometric_tail_power_law():
    # int_2^inf x^-3 dx = 1/8
    res = geometric_tail(lambda x: x ** -3.0, 2.0)
    assert abs(res.value - 0.125) < 1e-10


def test_geometric_tail_divergence():
    with pytest.raises(DivergentTailError):
        geometric_tail(lambda x: 1.0 / x, 1.0)


def test_graded_radial_algebraic_core():
    # int_0^rho s^-a s^(N-1) ds with a < N
    rho, a, N = 0.5, 0.7, 1
    res = graded_radial_integral(lambda s: s ** -a, rho, N)
    exact = rho ** (N - a) / (N - a)
    assert not res.divergent
    assert abs(res.value - exact) / exact < 1e-10


def test_graded_radial_log_core():
    # the critical shape (1/s)(log 1/s)^-lam against its closed form
    lam, rho = 1.4, 0.1
    res = graded_radial_integral(lambda s: s ** -1.0 * np.log(1.0 / s) ** -lam,
                                 rho, 1, levels=60)
    closed = log_singular_closed_form(lam, rho)
    assert not res.divergent
    assert abs(res.value - closed) / closed < 1e-4


def test_graded_radial_divergent_core_reports_exponent():
    # u ~ s^-N: the borderline non-integrable core
    res = graded_radial_integral(lambda s: s ** -1.0, 0.25, 1)
    assert res.divergent and np.isinf(res.value)


def test_graded_radial_divergent_log_core():
    # (1/s)(log 1/s)^-0.9: diverges although every panel decays
    res = graded_radial_integral(lambda s: s ** -1.0 * np.log(1.0 / s) ** -0.9,
                                 0.1, 1)
    assert res.divergent


def test_central_difference():
    got = central_difference(np.exp, 1.0)
    assert abs(got - np.e) / np.e < 1e-9
