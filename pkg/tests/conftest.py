import numpy as np
import pytest

from latticenls import (
    Problem,
    build_graph,
    build_lattice_box,
    constant_potential,
    periodic_potential,
    power_nonlinearity,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def single_vertex():
    g = build_graph(1, [])
    return Problem(g, constant_potential(g, 1.0), power_nonlinearity(1.0, 4))


@pytest.fixture
def two_path():
    g = build_graph(2, [(0, 1)])
    return Problem(g, constant_potential(g, 1.0), power_nonlinearity(1.0, 4))


@pytest.fixture
def ring16():
    g = build_lattice_box(1, [16], "periodic_torus")
    return Problem(g, constant_potential(g, 1.0), power_nonlinearity(1.0, 4))


@pytest.fixture
def periodic_torus_problem():
    g = build_lattice_box(2, [6, 6], "periodic_torus")
    V = periodic_potential(g, [[1.0, 1.5], [2.0, 1.25]], 2)
    return Problem(g, V, power_nonlinearity([1.0, 0.5], [4, 3]))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.REPORT):
            terminalreporter.write_line(line)
