import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticenls import (
    build_lattice_box,
    check_conditions,
    constant_potential,
    custom_nonlinearity,
    periodic_potential,
    power_nonlinearity,
    well_potential,
)
from latticenls.errors import ModelError
from latticenls.model import default_grid, growth_constant

from oracles import shipped_problems

FAMILY = [
    power_nonlinearity(1.0, 4),
    power_nonlinearity(1.0, 3),
    power_nonlinearity(0.3, 6),
    power_nonlinearity([0.5, 2.0], [3, 5]),
    power_nonlinearity([1.0, 1e-3], [2.5, 7]),
]

values = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_cubic_values():
    nl = power_nonlinearity(1.0, 4)
    assert nl.f(np.array([2.0]))[0] == pytest.approx(8.0)
    assert nl.F(np.array([2.0]))[0] == pytest.approx(4.0)
    assert nl.f(np.array([-2.0]))[0] == pytest.approx(-8.0)
    assert nl.growth_exponent == 4


def test_mixed_values():
    nl = power_nonlinearity([0.5, 2.0], [3, 5])
    u = np.array([1.5])
    assert nl.f(u)[0] == pytest.approx(0.5 * 1.5**2 + 2.0 * 1.5**4)
    assert nl.F(u)[0] == pytest.approx(0.5 * 1.5**3 / 3 + 2.0 * 1.5**5 / 5)


def test_x_dependent_coefficient():
    nl = power_nonlinearity(np.array([1.0, 3.0]), 4)
    np.testing.assert_allclose(nl.f(np.array([1.0, 1.0])), [1.0, 3.0])
    np.testing.assert_allclose(nl.f(np.array([1.0]), np.array([1])), [3.0])
    assert nl.x_dependent


@pytest.mark.parametrize("nl", FAMILY, ids=lambda n: n.label)
@settings(max_examples=50, deadline=None)
@given(u=values)
def test_family_structure(nl, u):
    x = np.array([u])
    f, F = nl.f(x)[0], nl.F(x)[0]
    assert nl.f(-x)[0] == pytest.approx(-f, abs=1e-300)
    assert F >= 0
    # F <= ½ f u, the superquadratic inequality
    assert F <= 0.5 * f * u * (1 + 1e-12) + 1e-300


@pytest.mark.parametrize("nl", FAMILY, ids=lambda n: n.label)
def test_antiderivative_matches_quadrature(nl):
    from scipy.integrate import quad

    for u in (-3.0, -0.2, 0.7, 2.5):
        ref = quad(lambda t: nl.f(np.array([t]))[0], 0, u, epsabs=0, epsrel=1e-12)[0]
        assert nl.F(np.array([u]))[0] == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("nl", FAMILY, ids=lambda n: n.label)
def test_F_over_u_squared_increasing(nl):
    u = np.logspace(-4, 4, 400)
    r = nl.F(u) / u**2
    assert np.all(np.diff(r) > 0)


@pytest.mark.parametrize("nl", FAMILY[:4], ids=lambda n: n.label)
def test_family_passes_conditions(nl):
    rep = check_conditions(nl)
    assert rep.ok, rep


def test_linear_fails_small_condition():
    nl = custom_nonlinearity(lambda x, u: u, lambda x, u: 0.5 * u**2)
    rep = check_conditions(nl)
    assert not rep.small_ok
    assert rep.small_ratio == pytest.approx(1.0)
    assert not rep.ok


def test_saturating_fails_growth_condition():
    # f/|u| increases but F/u² stays bounded; F comes from quadrature
    nl = custom_nonlinearity(lambda x, u: u**3 / (1 + u**2))
    rep = check_conditions(nl, sample_grid=default_grid(points=8), quadrature_samples=3)
    assert rep.small_ok
    assert rep.monotone_ok
    assert not rep.large_ok
    assert rep.large_ratio < 0.5
    assert rep.antiderivative_ok


def test_nonmonotone_fails():
    nl = custom_nonlinearity(
        lambda x, u: np.abs(u) * u * np.exp(-np.abs(u)),
        lambda x, u: 2 - np.exp(-np.abs(u)) * (u**2 + 2 * np.abs(u) + 2),
    )
    rep = check_conditions(nl)
    assert not rep.monotone_ok


def test_wrong_antiderivative_detected():
    nl = custom_nonlinearity(lambda x, u: u**3, lambda x, u: u**4 / 3)
    assert not check_conditions(nl).antiderivative_ok


def test_power_validation():
    with pytest.raises(ModelError, match="exponents"):
        power_nonlinearity(1.0, 2)
    with pytest.raises(ModelError, match="coefficients"):
        power_nonlinearity(-1.0, 4)
    with pytest.raises(ModelError):
        power_nonlinearity([1.0], [3, 4])
    with pytest.raises(ModelError):
        power_nonlinearity(np.array([1.0, 0.0]), 4)


def test_growth_constant():
    assert growth_constant(power_nonlinearity([0.5, 2.0], [3, 5])) == pytest.approx(2.5)
    nl = power_nonlinearity([0.5, 2.0], [3, 5])
    u = np.linspace(-10, 10, 1001)
    assert np.all(np.abs(nl.f(u)) <= 2.5 * (np.abs(u) + np.abs(u) ** 4) + 1e-12)
    assert growth_constant(custom_nonlinearity(lambda x, u: u**3, lambda x, u: u**4 / 4)) is None


def test_constant_potential():
    g = build_lattice_box(1, [4], "dirichlet_box")
    V = constant_potential(g, 2.0)
    assert V.kind == "constant" and V.x_independent
    np.testing.assert_array_equal(V.values, 2.0)
    with pytest.raises(ModelError):
        constant_potential(g, 0.0)


def test_periodic_potential_tiles():
    g = build_lattice_box(2, [4, 6], "periodic_torus")
    V = periodic_potential(g, [[1.0, 2.0], [3.0, 4.0]], 2)
    for x, (a, b) in enumerate(g.coordinates):
        assert V.values[x] == [[1.0, 2.0], [3.0, 4.0]][a % 2][b % 2]
    assert V.period == (2, 2)
    with pytest.raises(ModelError):
        periodic_potential(g, [[1.0, 2.0, 3.0]] * 3, 3)  # 4 not a multiple of 3
    with pytest.raises(ModelError):
        periodic_potential(build_lattice_box(1, [4], "dirichlet_box"), [1.0, 2.0], 2)
    with pytest.raises(ModelError):
        periodic_potential(g, [[1.0, -2.0], [3.0, 4.0]], 2)


def test_well_potential():
    g = build_lattice_box(1, [9], "dirichlet_box")
    V = well_potential(g, 2.0, {4: 1.5})
    assert V.kind == "bounded_well"
    assert V.v0 == pytest.approx(0.5) and V.vinf == 2.0
    assert V.values[4] == pytest.approx(0.5) and V.values[0] == 2.0
    assert well_potential(g, 2.0, {}).kind == "constant"
    with pytest.raises(ModelError):
        well_potential(g, 2.0, {4: 2.0})
    with pytest.raises(ModelError):
        well_potential(g, 2.0, {40: 1.0})


@pytest.mark.parametrize("name", list(shipped_problems()))
def test_shipped_problems_superquadratic(name, rng):
    p = shipped_problems()[name]
    nl = p.nonlinearity
    u = rng.standard_normal(p.graph.vertex_count) * 3
    F, f = nl.F(u), nl.f(u)
    assert np.all(F >= 0)
    assert np.all(F <= 0.5 * f * u * (1 + 1e-12))
