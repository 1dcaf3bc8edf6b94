"""Finite graphs: truncated and periodic lattice boxes, quasi-transitive presets.

Vertices of a lattice box are indexed row-major over the multi-index
``(x_1, ..., x_N)``, so ``index = np.ravel_multi_index(x, sides)``.  Presets
are built from a periodic grid of unit cells; vertex ``index = cell * cell_size
+ sub`` with ``cell`` row-major over the cell grid.

Two truncation modes exist for lattice boxes:

* ``dirichlet_box`` -- fields are extended by zero outside the box.  The
  neighbors lying outside are not stored, only counted in ``boundary_degrees``,
  so that every vertex still carries the full lattice degree ``2N``.
* ``periodic_torus`` -- adjacency wraps around; shifts act by translation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np
import scipy.sparse as sp

from .errors import FieldMismatch, GraphError, UnsupportedOperation

MODES = ("dirichlet_box", "periodic_torus", "preset", "custom")
PRESETS = ("ladder", "hexagonal", "triangular")


@dataclass(frozen=True)
class Shift:
    """A group element acting on a periodic graph.

    ``displacement`` translates cell coordinates (one entry per torus axis).
    ``flip`` swaps the two rails of the ladder preset; no other graph has it.
    """

    displacement: tuple[int, ...]
    flip: bool = False

    def __post_init__(self):
        object.__setattr__(self, "displacement", tuple(int(d) for d in self.displacement))

    def inverse(self) -> "Shift":
        return Shift(tuple(-d for d in self.displacement), self.flip)


@dataclass(frozen=True, eq=False)
class Graph:
    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    degree_bound: int
    mode: str
    boundary_degrees: np.ndarray
    coordinates: np.ndarray
    dimension: int | None = None
    sides: tuple[int, ...] | None = None
    name: str | None = None
    cell_shape: tuple[int, ...] | None = None
    cell_size: int = 1
    flip_allowed: bool = False
    orbits: tuple[int, ...] | None = field(default=None)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @property
    def full_degrees(self) -> np.ndarray:
        """Stored degree plus neighbors outside a Dirichlet box."""
        return self.degrees + self.boundary_degrees

    @property
    def orbit_count(self) -> int | None:
        return None if self.orbits is None else len(set(self.orbits))

    @property
    def supports_shifts(self) -> bool:
        return self.cell_shape is not None

    @cached_property
    def adjacency_matrix(self) -> sp.csr_matrix:
        rows = np.repeat(np.arange(self.vertex_count), self.degrees)
        cols = np.fromiter((y for adj in self.adjacency for y in adj), dtype=np.int64, count=rows.size)
        data = np.ones(rows.size)
        mat = sp.csr_matrix((data, (rows, cols)), shape=(self.vertex_count, self.vertex_count))
        mat.sort_indices()
        return mat

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as ``(x, y)`` with ``x < y``, ascending."""
        return [(x, y) for x, adj in enumerate(self.adjacency) for y in adj if x < y]

    def center_vertex(self) -> int:
        if self.sides is not None:
            return int(np.ravel_multi_index(tuple(s // 2 for s in self.sides), self.sides))
        return 0

    def check_field(self, u) -> np.ndarray:
        arr = np.asarray(u, dtype=float)
        if arr.shape != (self.vertex_count,):
            raise FieldMismatch(f"field has shape {arr.shape}, graph has {self.vertex_count} vertices")
        if not np.all(np.isfinite(arr)):
            raise FieldMismatch("field contains NaN or Inf")
        return arr

    def permutation(self, shift: Shift) -> np.ndarray:
        """Array ``perm`` with ``perm[x]`` the image of vertex ``x`` under ``shift``."""
        if not self.supports_shifts:
            raise UnsupportedOperation(f"shifts are not defined on a {self.mode} graph")
        if len(shift.displacement) != len(self.cell_shape):
            raise GraphError(
                f"shift has {len(shift.displacement)} components, graph has {len(self.cell_shape)} axes"
            )
        if shift.flip and not self.flip_allowed:
            raise UnsupportedOperation("flip is only defined for the ladder preset")
        cells = np.arange(self.vertex_count) // self.cell_size
        sub = np.arange(self.vertex_count) % self.cell_size
        multi = np.unravel_index(cells, self.cell_shape)
        moved = tuple((m + d) % n for m, d, n in zip(multi, shift.displacement, self.cell_shape))
        new_cells = np.ravel_multi_index(moved, self.cell_shape)
        if shift.flip:
            sub = self.cell_size - 1 - sub
        return new_cells * self.cell_size + sub

    def group_elements(self):
        """Every element of the finite shift group, in a fixed order."""
        if not self.supports_shifts:
            raise UnsupportedOperation(f"shifts are not defined on a {self.mode} graph")
        flips = (False, True) if self.flip_allowed else (False,)
        for disp in product(*(range(n) for n in self.cell_shape)):
            for flip in flips:
                yield Shift(disp, flip)


def _validate_simple(n, adjacency):
    for x, adj in enumerate(adjacency):
        if x in adj:
            raise GraphError(f"self-loop at vertex {x}")
        if len(set(adj)) != len(adj):
            raise GraphError(f"duplicate neighbor entries at vertex {x}")
        for y in adj:
            if not 0 <= y < n:
                raise GraphError(f"vertex {x} has out-of-range neighbor {y}")
            if x not in adjacency[y]:
                raise GraphError(f"adjacency not symmetric between {x} and {y}")


def _orbits(n, generators):
    # union-find over the generator permutations
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for perm in generators:
        for x in range(n):
            ra, rb = find(x), find(int(perm[x]))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = [find(x) for x in range(n)]
    labels = {}
    return tuple(labels.setdefault(r, len(labels)) for r in roots)


def _with_orbits(g: Graph) -> Graph:
    gens = []
    for axis in range(len(g.cell_shape)):
        disp = [0] * len(g.cell_shape)
        disp[axis] = 1
        gens.append(g.permutation(Shift(tuple(disp))))
    if g.flip_allowed:
        gens.append(g.permutation(Shift((0,) * len(g.cell_shape), flip=True)))
    object.__setattr__(g, "orbits", _orbits(g.vertex_count, gens))
    return g


def _readonly(arr):
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


def build_lattice_box(N: int, sides, mode: str = "dirichlet_box") -> Graph:
    """Box ``prod(sides)`` of the lattice Z^N, Dirichlet-truncated or wrapped."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise GraphError(f"dimension must be a positive integer, got {N!r}")
    sides = tuple(int(s) for s in sides)
    if len(sides) != N:
        raise GraphError(f"expected {N} side lengths, got {len(sides)}")
    if mode not in ("dirichlet_box", "periodic_torus"):
        raise GraphError(f"unknown lattice mode {mode!r}")
    min_side = 3 if mode == "periodic_torus" else 1
    for axis, s in enumerate(sides):
        if s < min_side:
            raise GraphError(f"sides[{axis}] = {s} must be >= {min_side} for {mode}")

    n = int(np.prod(sides))
    coords = np.stack(np.unravel_index(np.arange(n), sides), axis=1)
    adjacency = []
    boundary = np.zeros(n, dtype=np.int64)
    for x in range(n):
        nbrs = []
        for axis in range(N):
            for step in (-1, 1):
                c = coords[x].copy()
                c[axis] += step
                if 0 <= c[axis] < sides[axis]:
                    nbrs.append(int(np.ravel_multi_index(tuple(c), sides)))
                elif mode == "periodic_torus":
                    c[axis] %= sides[axis]
                    nbrs.append(int(np.ravel_multi_index(tuple(c), sides)))
                else:
                    boundary[x] += 1
        adjacency.append(tuple(sorted(nbrs)))
    adjacency = tuple(adjacency)
    _validate_simple(n, adjacency)
    g = Graph(
        vertex_count=n,
        adjacency=adjacency,
        degree_bound=2 * N,
        mode=mode,
        boundary_degrees=_readonly(boundary),
        coordinates=_readonly(coords),
        dimension=N,
        sides=sides,
        cell_shape=sides if mode == "periodic_torus" else None,
    )
    return _with_orbits(g) if mode == "periodic_torus" else g


# Unit cells of the presets: (cell_size, bonds) where a bond is
# (sub_from, sub_to, cell offset).  Each undirected bond is listed once.
_PRESET_CELLS = {
    # Z x K2: rails 0 and 1, rung inside the cell, rail bonds to the next cell.
    "ladder": (1, 2, [(0, 1, (0,)), (0, 0, (1,)), (1, 1, (1,))], 3),
    # honeycomb: sublattices A=0, B=1
    "hexagonal": (2, 2, [(0, 1, (0, 0)), (0, 1, (-1, 0)), (0, 1, (0, -1))], 3),
    "triangular": (2, 1, [(0, 0, (1, 0)), (0, 0, (0, 1)), (0, 0, (1, -1))], 6),
}


def build_preset(name: str, size: int, mode: str = "periodic_torus") -> Graph:
    """Periodic quotient of a quasi-transitive graph.

    Orbit counts under the stored shift group:

    * ``ladder`` (Z x K2, translations and rail flip): 1 orbit.  Without the
      flip there would be 2, one per rail.
    * ``hexagonal`` (honeycomb, translations only): 2 orbits, the A/B sublattices.
    * ``triangular`` (translations only): 1 orbit.
    """
    if name not in _PRESET_CELLS:
        raise GraphError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    if mode != "periodic_torus":
        raise GraphError(f"presets only support periodic_torus, got {mode!r}")
    size = int(size)
    if size < 3:
        raise GraphError(f"size = {size} must be >= 3 to keep the quotient simple")
    dim, cell_size, bonds, degree = _PRESET_CELLS[name]
    cell_shape = (size,) * dim
    ncells = size**dim
    n = ncells * cell_size
    nbrs = [set() for _ in range(n)]
    for cell in range(ncells):
        multi = np.unravel_index(cell, cell_shape)
        for a, b, off in bonds:
            other = np.ravel_multi_index(tuple((m + o) % size for m, o in zip(multi, off)), cell_shape)
            x, y = cell * cell_size + a, int(other) * cell_size + b
            nbrs[x].add(y)
            nbrs[y].add(x)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    _validate_simple(n, adjacency)
    cells = np.arange(n) // cell_size
    coords = np.column_stack(np.unravel_index(cells, cell_shape) + (np.arange(n) % cell_size,))
    g = Graph(
        vertex_count=n,
        adjacency=adjacency,
        degree_bound=degree,
        mode="preset",
        boundary_degrees=_readonly(np.zeros(n, dtype=np.int64)),
        coordinates=_readonly(coords),
        name=name,
        cell_shape=cell_shape,
        cell_size=cell_size,
        flip_allowed=(name == "ladder"),
    )
    return _with_orbits(g)


def build_graph(vertex_count: int, edges, degree_bound: int | None = None) -> Graph:
    """Arbitrary simple graph from an edge list (no shifts, no boundary)."""
    n = int(vertex_count)
    if n < 1:
        raise GraphError(f"vertex_count must be >= 1, got {vertex_count}")
    nbrs = [[] for _ in range(n)]
    for x, y in edges:
        x, y = int(x), int(y)
        if not (0 <= x < n and 0 <= y < n):
            raise GraphError(f"edge ({x}, {y}) out of range")
        nbrs[x].append(y)
        nbrs[y].append(x)
    adjacency = tuple(tuple(sorted(a)) for a in nbrs)
    _validate_simple(n, adjacency)
    max_deg = max((len(a) for a in adjacency), default=0)
    bound = max(max_deg, 1) if degree_bound is None else int(degree_bound)
    if bound < max_deg:
        raise GraphError(f"degree_bound {bound} below maximum degree {max_deg}")
    return Graph(
        vertex_count=n,
        adjacency=adjacency,
        degree_bound=bound,
        mode="custom",
        boundary_degrees=_readonly(np.zeros(n, dtype=np.int64)),
        coordinates=_readonly(np.arange(n).reshape(n, 1)),
    )


def translate(g: Graph, u, shift: Shift) -> np.ndarray:
    """``(translate u)(x) = u(shift^{-1}(x))``."""
    u = g.check_field(u)
    perm = g.permutation(shift)
    out = np.empty_like(u)
    out[perm] = u
    return out


def export_csv(g: Graph, vertices_path, edges_path) -> None:
    """Write vertex and edge lists for inspection."""
    ncoord = g.coordinates.shape[1]
    with open(vertices_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vertex"] + [f"x{i}" for i in range(ncoord)] + ["degree", "boundary_degree", "orbit"])
        for x in range(g.vertex_count):
            orbit = "" if g.orbits is None else g.orbits[x]
            w.writerow([x, *g.coordinates[x].tolist(), len(g.adjacency[x]), int(g.boundary_degrees[x]), orbit])
    with open(edges_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["source", "target"])
        w.writerows(g.edges())
