import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cweno_nonlocal.grid import Grid
from cweno_nonlocal.quadrature import (SUPPORTED_R, _radau_right, initial_cell_averages,
                                       integrate_on_subinterval, radau_rule)


@pytest.mark.parametrize("R", SUPPORTED_R)
def test_monomials_exact_up_to_2R_minus_2(R):
    rule = radau_rule(R)
    for d in range(2 * R - 1):
        assert abs(rule.weights @ rule.nodes**d - 1.0 / (d + 1)) < 1e-14


@pytest.mark.parametrize("R", SUPPORTED_R)
def test_degree_2R_minus_1_not_exact(R):
    rule = radau_rule(R)
    d = 2 * R - 1
    assert abs(rule.weights @ rule.nodes**d - 1.0 / (d + 1)) > 1e-6


@pytest.mark.parametrize("R,gamma", [(2, 1 / 4), (3, 1 / 9), (4, 1 / 16)])
def test_right_endpoint_weight(R, gamma):
    rule = radau_rule(R)
    assert rule.nodes[-1] == 1.0
    assert abs(rule.gamma_R - gamma) < 1e-14
    assert rule.exactness == 2 * R - 2


@pytest.mark.parametrize("R", SUPPORTED_R)
def test_nodes_and_weights_well_formed(R):
    rule = radau_rule(R)
    assert np.all(np.diff(rule.nodes) > 0) and rule.nodes[0] > 0
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 1.0) < 1e-15


@pytest.mark.parametrize("R", SUPPORTED_R)
def test_computed_rule_matches_stored_constants(R):
    nodes, weights = _radau_right(R)
    np.testing.assert_allclose(nodes, radau_rule(R).nodes, atol=1e-14)
    np.testing.assert_allclose(weights, radau_rule(R).weights, atol=1e-14)


def test_rule_arrays_read_only():
    with pytest.raises(ValueError):
        radau_rule(2).nodes[0] = 0.0


@pytest.mark.parametrize("R", [0, 1, 5])
def test_unsupported_size(R):
    with pytest.raises(ValueError):
        radau_rule(R)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SUPPORTED_R), st.data())
def test_random_polynomials_on_subintervals(R, data):
    deg = 2 * R - 2
    c = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=deg + 1, max_size=deg + 1)))
    a = data.draw(st.floats(-2, 2))
    b = a + data.draw(st.floats(0, 3))
    prim = np.polynomial.polynomial.polyint(c)
    exact = np.polynomial.polynomial.polyval(b, prim) - np.polynomial.polynomial.polyval(a, prim)
    got = integrate_on_subinterval(radau_rule(R), lambda x: np.polynomial.polynomial.polyval(x, c), a, b)
    assert abs(got - exact) <= 1e-12 * (1 + np.abs(c).sum() * max(1, abs(a), abs(b)) ** deg)


def test_reversed_interval_rejected():
    with pytest.raises(ValueError):
        integrate_on_subinterval(radau_rule(2), np.sin, 1.0, 0.0)


def test_cell_averages_of_sine():
    grid = Grid.uniform(-1.0, 1.0, 40)
    avg = initial_cell_averages(lambda x: np.sin(np.pi * x), grid, radau_rule(4))
    e = grid.edges
    exact = (np.cos(np.pi * e[:-1]) - np.cos(np.pi * e[1:])) / (np.pi * grid.h)
    assert np.abs(avg - exact).max() < 1e-12


def test_cell_averages_of_constant_broadcast():
    grid = Grid.uniform(0.0, 1.0, 7)
    np.testing.assert_array_equal(initial_cell_averages(lambda x: 0.3, grid, radau_rule(3)), 0.3)
