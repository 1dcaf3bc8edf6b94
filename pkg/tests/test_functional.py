import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from latticenls import (
    Problem,
    Shift,
    build_graph,
    build_lattice_box,
    constant_potential,
    phi,
    phi_derivative,
    phi_gradient,
    power_nonlinearity,
    residuals,
    translate,
)
from latticenls.calculus import energy
from latticenls.errors import FieldMismatch, ModelError

from oracles import shipped_problems

PROBLEMS = shipped_problems()


def test_single_vertex_values(single_vertex):
    p = single_vertex
    assert phi(p, [1.0]) == pytest.approx(0.25)
    assert phi(p, [0.0]) == 0.0
    assert phi_derivative(p, [1.0], [1.0]) == pytest.approx(0.0)
    r = residuals(p, [2.0])
    assert r.pointwise_sup == pytest.approx(6.0)
    assert r.nehari == pytest.approx(12.0)
    assert residuals(p, [0.0]).nehari is None


def test_two_path_solution(two_path):
    r = residuals(two_path, [1.0, 1.0])
    assert r.pointwise_sup == pytest.approx(0.0, abs=1e-15)
    assert phi(two_path, [1.0, 1.0]) == pytest.approx(0.5)


def test_phi_by_hand():
    g = build_lattice_box(1, [3], "dirichlet_box")
    p = Problem(g, constant_potential(g, 2.0), power_nonlinearity(1.0, 4))
    u = np.array([0.0, 1.0, 0.0])
    # energy 2, potential term 2, F term 1/4
    assert phi(p, u) == pytest.approx(0.5 * (energy(g, u) + 2.0) - 0.25)
    assert phi(p, u) == pytest.approx(1.75)


@pytest.mark.parametrize("name", list(PROBLEMS))
def test_derivative_matches_finite_differences(name, rng):
    p = PROBLEMS[name]
    n = p.graph.vertex_count
    for _ in range(5):
        u = rng.standard_normal(n)
        v = rng.standard_normal(n)
        h = 1e-6
        fd = (phi(p, u + h * v) - phi(p, u - h * v)) / (2 * h)
        an = phi_derivative(p, u, v)
        assert an == pytest.approx(fd, rel=1e-6, abs=1e-7)


@pytest.mark.parametrize("name", list(PROBLEMS))
def test_gradient_pairing(name, rng):
    p = PROBLEMS[name]
    u, v = rng.standard_normal((2, p.graph.vertex_count))
    lhs = float(np.dot(phi_gradient(p, u), v))
    assert lhs == pytest.approx(phi_derivative(p, u, v), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("name", list(PROBLEMS))
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_derivative_linear_in_direction(name, data):
    p = PROBLEMS[name]
    n = p.graph.vertex_count
    el = st.floats(-5, 5, allow_nan=False)
    u = data.draw(arrays(np.float64, n, elements=el))
    v = data.draw(arrays(np.float64, n, elements=el))
    w = data.draw(arrays(np.float64, n, elements=el))
    a = data.draw(el)
    lhs = phi_derivative(p, u, a * v + w)
    rhs = a * phi_derivative(p, u, v) + phi_derivative(p, u, w)
    scale = 1 + abs(a) * np.abs(phi_gradient(p, u)).sum() * (np.abs(v).max() + np.abs(w).max() + 1)
    assert abs(lhs - rhs) <= 1e-11 * scale


def test_translation_invariance(periodic_torus_problem, rng):
    p = periodic_torus_problem
    u = rng.standard_normal(p.graph.vertex_count)
    for s in [Shift((2, 0)), Shift((0, 4)), Shift((2, 2))]:
        v = translate(p.graph, u, s)
        assert phi(p, v) == pytest.approx(phi(p, u), rel=1e-13)
        np.testing.assert_allclose(phi_gradient(p, v), translate(p.graph, phi_gradient(p, u), s), atol=1e-13)


def test_operator_matches_definition(rng):
    p = PROBLEMS["mixed"]
    u = rng.standard_normal(p.graph.vertex_count)
    assert p.inner(u, u) == pytest.approx(energy(p.graph, u) + np.sum(p.V * u * u), rel=1e-13)
    assert (p.operator != p.operator.T).nnz == 0


def test_problem_validation():
    g = build_graph(2, [(0, 1)])
    g3 = build_graph(3, [(0, 1)])
    with pytest.raises(ModelError):
        Problem(g, constant_potential(g3, 1.0), power_nonlinearity(1.0, 4))
    with pytest.raises(ModelError):
        Problem(g, constant_potential(g, 1.0), power_nonlinearity(np.ones(3), 4))
    p = Problem(g, constant_potential(g, 1.0), power_nonlinearity(1.0, 4))
    with pytest.raises(FieldMismatch):
        phi(p, [1.0])
