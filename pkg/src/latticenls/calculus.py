"""Discrete operators and norms on a graph with counting measure.

Fields are plain float arrays indexed by vertex.  All integrals are sums over
the stored vertices in ascending index order.

On a Dirichlet box each vertex ``x`` has ``boundary_degrees[x]`` neighbors
outside the box where the field is zero.  Those outside vertices are not
stored, so their share of the gradient form is folded onto ``x``: an edge
from ``x`` to the outside contributes ``u(x) v(x)`` to ``gradient_form(u, v)(x)``.
With this convention ``sum(gradient_form(u, u))`` is the energy of the
zero-extended field on the whole lattice, and summation by parts
``sum(gradient_form(u, v)) == -sum(laplacian(u) * v)`` holds exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ModelError
from .graph import Graph


def _pair(g: Graph, u, v):
    return g.check_field(u), g.check_field(v)


def laplacian(g: Graph, u) -> np.ndarray:
    """``(Δu)(x) = Σ_{y~x} (u(y) - u(x))`` with zero extension outside a box."""
    u = g.check_field(u)
    return g.adjacency_matrix @ u - g.full_degrees * u


def gradient_form(g: Graph, u, v) -> np.ndarray:
    u, v = _pair(g, u, v)
    A = g.adjacency_matrix.tocoo()
    du = u[A.col] - u[A.row]
    dv = v[A.col] - v[A.row]
    out = 0.5 * np.bincount(A.row, weights=du * dv, minlength=g.vertex_count)
    return out + g.boundary_degrees * u * v


def grad_abs(g: Graph, u) -> np.ndarray:
    """Pointwise ``|∇u| = sqrt(Γ(u, u))``."""
    return np.sqrt(gradient_form(g, u, u))


def energy(g: Graph, u) -> float:
    """Dirichlet energy ``½ Σ_x Σ_{y~x} (u(y) - u(x))²``."""
    u = g.check_field(u)
    return float(np.dot(u, -laplacian(g, u)))


def lp_norm(u, p=2.0) -> float:
    """Standard ℓᵖ norm ``(Σ|u|ᵖ)^(1/p)``; ``p = inf`` gives ``max |u|``."""
    u = np.asarray(u, dtype=float)
    if p == math.inf or p == "inf":
        return float(np.max(np.abs(u))) if u.size else 0.0
    p = float(p)
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if u.size == 0:
        return 0.0
    # scale first so |u|^p cannot overflow for large p
    scale = np.max(np.abs(u))
    if scale == 0:
        return 0.0
    return float(scale * np.sum((np.abs(u) / scale) ** p) ** (1.0 / p))


def h1_norm(g: Graph, u) -> float:
    u = g.check_field(u)
    return math.sqrt(energy(g, u) + float(np.dot(u, u)))


def _potential_values(g: Graph, V) -> np.ndarray:
    vals = np.asarray(getattr(V, "values", V), dtype=float)
    if vals.ndim == 0:
        vals = np.full(g.vertex_count, float(vals))
    if vals.shape != (g.vertex_count,):
        raise ModelError(f"potential has shape {vals.shape}, graph has {g.vertex_count} vertices")
    if not np.all(vals > 0):
        bad = int(np.argmin(vals))
        raise ModelError(f"potential must be strictly positive, V[{bad}] = {vals[bad]}")
    return vals


def weighted_inner(g: Graph, V, u, v) -> float:
    """``⟨u, v⟩ = Σ Γ(u, v) + V u v``, the inner product behind ``‖·‖``."""
    u, v = _pair(g, u, v)
    vals = _potential_values(g, V)
    return float(np.dot(-laplacian(g, u), v) + np.dot(vals * u, v))


def weighted_norm(g: Graph, V, u) -> float:
    return math.sqrt(max(weighted_inner(g, V, u, u), 0.0))


def equivalence_constant(g: Graph) -> float:
    """``C'`` with ``‖u‖₂ / C' <= ‖u‖_H1 <= C' ‖u‖₂``.

    ``energy(u) <= 2 * degree_bound * ‖u‖₂²`` (tight for a checkerboard on an
    even torus), hence ``C' = sqrt(1 + 2 * degree_bound)``.
    """
    return math.sqrt(1.0 + 2.0 * g.degree_bound)
