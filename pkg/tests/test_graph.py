import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticenls import Shift, build_graph, build_lattice_box, build_preset, translate
from latticenls.errors import GraphError, UnsupportedOperation
from latticenls.graph import export_csv

from oracles import lattice_neighbors


def assert_simple_symmetric(g):
    for x, adj in enumerate(g.adjacency):
        assert x not in adj
        assert len(set(adj)) == len(adj)
        for y in adj:
            assert x in g.adjacency[y]
    assert np.all(g.full_degrees <= g.degree_bound)


def test_path_dirichlet():
    g = build_lattice_box(1, [3], "dirichlet_box")
    assert g.adjacency == ((1,), (0, 2), (1,))
    assert g.boundary_degrees.tolist() == [1, 0, 1]
    assert g.full_degrees.tolist() == [2, 2, 2]


def test_four_cycle():
    g = build_lattice_box(1, [4], "periodic_torus")
    assert g.adjacency == ((1, 3), (0, 2), (1, 3), (0, 2))
    assert g.boundary_degrees.tolist() == [0] * 4


def test_3x3_box_matches_hand_enumeration():
    g = build_lattice_box(2, [3, 3], "dirichlet_box")
    assert g.vertex_count == 9
    for c in itertools.product(range(3), range(3)):
        x = c[0] * 3 + c[1]
        nbrs, outside = lattice_neighbors(c, (3, 3), periodic=False)
        assert sorted(a * 3 + b for a, b in nbrs) == list(g.adjacency[x])
        assert g.boundary_degrees[x] == outside
    for corner in (0, 2, 6, 8):
        assert len(g.adjacency[corner]) == 2 and g.boundary_degrees[corner] == 2
    assert g.boundary_degrees[4] == 0


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(1, 5), min_size=1, max_size=3),
    st.sampled_from(["dirichlet_box", "periodic_torus"]),
)
def test_lattice_invariants(sides, mode):
    if mode == "periodic_torus":
        sides = [s + 2 for s in sides]
    g = build_lattice_box(len(sides), sides, mode)
    assert g.vertex_count == int(np.prod(sides))
    assert_simple_symmetric(g)
    assert np.all(g.full_degrees == 2 * len(sides))
    if mode == "periodic_torus":
        assert np.all(g.degrees == 2 * len(sides))


def test_row_major_indexing():
    g = build_lattice_box(3, [2, 3, 4], "dirichlet_box")
    for x in range(g.vertex_count):
        assert np.ravel_multi_index(tuple(g.coordinates[x]), (2, 3, 4)) == x


@pytest.mark.parametrize(
    "args, axis",
    [((1, [0], "dirichlet_box"), "sides[0]"), ((2, [4, 2], "periodic_torus"), "sides[1]")],
)
def test_invalid_sides_name_axis(args, axis):
    with pytest.raises(GraphError, match=axis.replace("[", r"\[").replace("]", r"\]")):
        build_lattice_box(*args)


def test_invalid_dimension():
    with pytest.raises(GraphError):
        build_lattice_box(0, [], "dirichlet_box")
    with pytest.raises(GraphError):
        build_lattice_box(2, [3], "dirichlet_box")


def brute_orbits(g):
    """Orbits of the full shift group: every element checked as an automorphism."""
    edges = {frozenset(e) for e in g.edges()}
    images = [set() for _ in range(g.vertex_count)]
    for s in g.group_elements():
        perm = g.permutation(s)
        assert sorted(perm) == list(range(g.vertex_count))
        assert {frozenset((int(perm[a]), int(perm[b]))) for a, b in edges} == edges
        for x in range(g.vertex_count):
            images[x].add(int(perm[x]))
    return {frozenset(s) for s in images}


@pytest.mark.parametrize(
    "name, size, n, degree, orbits",
    [("ladder", 4, 8, 3, 1), ("hexagonal", 3, 18, 3, 2), ("triangular", 3, 9, 6, 1)],
)
def test_presets(name, size, n, degree, orbits):
    g = build_preset(name, size)
    assert g.vertex_count == n
    assert_simple_symmetric(g)
    assert np.all(g.degrees == degree)
    assert len(brute_orbits(g)) == orbits
    assert g.orbit_count == orbits


def test_ladder_is_z_times_k2():
    g = build_preset("ladder", 5)
    G = nx.Graph(g.edges())
    ref = nx.cartesian_product(nx.cycle_graph(5), nx.complete_graph(2))
    assert nx.is_isomorphic(G, ref)


def test_hexagonal_is_bipartite_honeycomb():
    g = build_preset("hexagonal", 4)
    G = nx.Graph(g.edges())
    assert nx.is_bipartite(G)
    assert nx.is_connected(G)
    # every hexagonal face: girth 6
    assert nx.girth(G) == 6


def test_preset_errors():
    with pytest.raises(GraphError, match="unknown preset"):
        build_preset("kagome", 4)
    with pytest.raises(GraphError):
        build_preset("ladder", 2)


def test_custom_graph():
    g = build_graph(1, [])
    assert g.adjacency == ((),)
    assert g.degree_bound == 1
    g = build_graph(2, [(0, 1)])
    assert g.adjacency == ((1,), (0,))
    with pytest.raises(GraphError):
        build_graph(2, [(0, 0)])
    with pytest.raises(GraphError):
        build_graph(2, [(0, 1), (1, 0)])


def test_translate_delta():
    g = build_lattice_box(1, [4], "periodic_torus")
    d0 = np.array([1.0, 0, 0, 0])
    np.testing.assert_array_equal(translate(g, d0, Shift((1,))), [0, 1.0, 0, 0])


def test_translate_full_period_is_identity(rng):
    g = build_lattice_box(2, [3, 4], "periodic_torus")
    u = rng.standard_normal(g.vertex_count)
    np.testing.assert_array_equal(translate(g, u, Shift((3, 4))), u)


def test_translate_group_law(rng):
    g = build_lattice_box(1, [5], "periodic_torus")
    u = rng.standard_normal(5)
    np.testing.assert_array_equal(translate(g, translate(g, u, Shift((2,))), Shift((3,))), u)


@pytest.mark.parametrize("g", [build_preset("ladder", 4), build_preset("hexagonal", 3), build_lattice_box(2, [3, 5], "periodic_torus")])
def test_translate_inverse_and_norms(g, rng):
    u = rng.standard_normal(g.vertex_count)
    for s in list(g.group_elements())[:12]:
        v = translate(g, u, s)
        np.testing.assert_array_equal(translate(g, v, s.inverse()), u)
        assert np.isclose(np.sum(np.abs(v) ** 3), np.sum(np.abs(u) ** 3))


def test_translate_dirichlet_unsupported():
    g = build_lattice_box(1, [4], "dirichlet_box")
    with pytest.raises(UnsupportedOperation):
        translate(g, np.zeros(4), Shift((1,)))


def test_flip_only_on_ladder():
    g = build_preset("hexagonal", 3)
    with pytest.raises(UnsupportedOperation):
        g.permutation(Shift((0, 0), flip=True))
    ladder = build_preset("ladder", 4)
    perm = ladder.permutation(Shift((0,), flip=True))
    assert perm.tolist() == [1, 0, 3, 2, 5, 4, 7, 6]


def test_export_csv(tmp_path):
    g = build_lattice_box(2, [2, 2], "dirichlet_box")
    export_csv(g, tmp_path / "v.csv", tmp_path / "e.csv")
    vlines = (tmp_path / "v.csv").read_text().splitlines()
    elines = (tmp_path / "e.csv").read_text().splitlines()
    assert vlines[0] == "vertex,x0,x1,degree,boundary_degree,orbit"
    assert len(vlines) == 5
    assert elines[1:] == ["0,1", "0,2", "1,3", "2,3"]
