"""The energy functional Φ(u) = ½‖u‖² − Σ F(x, u) and its derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import calculus
from .errors import ModelError
from .graph import Graph
from .model import Nonlinearity, Potential


@dataclass(frozen=True, eq=False)
class Problem:
    """``-Δu + V(x) u = f(x, u)`` on a finite graph."""

    graph: Graph
    potential: Potential
    nonlinearity: Nonlinearity

    def __post_init__(self):
        n = self.graph.vertex_count
        if self.potential.values.shape != (n,):
            raise ModelError(f"potential has {self.potential.values.size} values, graph has {n} vertices")
        for i, a in enumerate(self.nonlinearity.coefficients):
            if not np.isscalar(a) and np.shape(a) != (n,):
                raise ModelError(f"coefficients[{i}] has shape {np.shape(a)}, graph has {n} vertices")

    @property
    def V(self) -> np.ndarray:
        return self.potential.values

    @cached_property
    def operator(self) -> sp.csr_matrix:
        """Sparse matrix of ``-Δ + V``; ``⟨u, v⟩ = v @ operator @ u``."""
        g = self.graph
        diag = sp.diags(g.full_degrees + self.V)
        A = (diag - g.adjacency_matrix).tocsr()
        A.sort_indices()
        return A

    def field(self, u) -> np.ndarray:
        return self.graph.check_field(u)

    def inner(self, u, v) -> float:
        return float(np.dot(self.operator @ u, v))

    def norm(self, u) -> float:
        return math.sqrt(max(self.inner(u, u), 0.0))


def phi(p: Problem, u) -> float:
    u = p.field(u)
    return 0.5 * calculus.weighted_norm(p.graph, p.potential, u) ** 2 - float(np.sum(p.nonlinearity.F(u)))


def phi_derivative(p: Problem, u, v) -> float:
    """``Φ'(u)v = ⟨u, v⟩ − Σ f(x, u) v``."""
    u, v = p.field(u), p.field(v)
    return calculus.weighted_inner(p.graph, p.potential, u, v) - float(np.dot(p.nonlinearity.f(u), v))


def phi_gradient(p: Problem, u) -> np.ndarray:
    """Coordinate (ℓ²) gradient ``-Δu + Vu − f(x, u)``; zero iff ``u`` solves the equation pointwise."""
    u = p.field(u)
    return p.operator @ u - p.nonlinearity.f(u)


@dataclass(frozen=True)
class Residuals:
    pointwise_sup: float
    nehari: float | None  # None when u = 0
    grad_norm: float


def residuals(p: Problem, u) -> Residuals:
    u = p.field(u)
    g = phi_gradient(p, u)
    nehari = None if not np.any(u) else abs(float(np.dot(g, u)))
    return Residuals(
        pointwise_sup=float(np.max(np.abs(g))),
        nehari=nehari,
        grad_norm=float(np.linalg.norm(g)),
    )
