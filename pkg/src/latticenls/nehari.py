"""Ray projection onto the Nehari manifold and the reduced functional on the sphere.

For ``w != 0`` the fibering map ``α_w(s) = Φ(s w)`` has derivative
``α'_w(s) = s (‖w‖² − Σ f(x, s w) w / s)``.  The bracket
``h(s) = ‖w‖² − Σ f(x, s w) w / s`` is strictly decreasing for admissible
nonlinearities, so its single positive root ``s_w`` is found by geometric
bracketing followed by bisection.  ``m(w) = s_w w`` maps the unit sphere of the
weighted norm onto the Nehari manifold; ``Ψ = Φ ∘ m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ProjectionError, SphereError
from .functional import Problem, phi, phi_gradient

TOL_PROJ = 1e-12
SPHERE_TOL = 1e-10
NEHARI_TOL = 1e-10
MAX_EXPAND = 200


@dataclass(frozen=True, eq=False)
class RayProjection:
    s_w: float
    u: np.ndarray
    fiber_value: float
    bracket: tuple[float, float]
    iterations: int


def _nonzero(p: Problem, w) -> np.ndarray:
    w = p.field(w)
    if not np.any(w):
        raise SphereError("direction must be nonzero")
    return w


def fiber(p: Problem, w, s: float) -> tuple[float, float]:
    """``(α_w(s), α'_w(s))``."""
    w = _nonzero(p, w)
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    Aw = p.operator @ w
    sw = s * w
    deriv = s * float(np.dot(Aw, w)) - float(np.dot(p.nonlinearity.f(sw), w))
    return phi(p, sw), deriv


def project(p: Problem, w, tol: float = TOL_PROJ, max_expand: int = MAX_EXPAND) -> RayProjection:
    """The unique maximiser ``s_w`` of ``s -> Φ(s w)`` and the point ``s_w w``."""
    w = _nonzero(p, w)
    nl = p.nonlinearity
    norm2 = p.inner(w, w)

    def h(s):
        return norm2 - float(np.dot(nl.f(s * w), w)) / s

    s = 1.0
    hs = h(s)
    expand = 0
    if hs > 0:
        lo, hi = s, 2.0 * s
        while (hh := h(hi)) > 0:
            expand += 1
            if expand > max_expand or not math.isfinite(hh):
                raise ProjectionError(
                    "bracket expansion failed: fiber derivative stays positive",
                    {"s": hi, "h": hh, "expansions": expand, "norm2": norm2},
                )
            lo, hi = hi, 2.0 * hi
        if hh == 0:
            lo = hi
    elif hs < 0:
        lo, hi = 0.5 * s, s
        while (hl := h(lo)) < 0:
            expand += 1
            if expand > max_expand or not math.isfinite(hl):
                raise ProjectionError(
                    "bracket expansion failed: fiber derivative stays negative",
                    {"s": lo, "h": hl, "expansions": expand, "norm2": norm2},
                )
            lo, hi = 0.5 * lo, lo
        if hl == 0:
            hi = lo
    else:
        lo = hi = s

    target = tol * max(1.0, norm2)
    iters = 0
    s_w = lo
    if lo != hi:
        while True:
            iters += 1
            mid = 0.5 * (lo + hi)
            hm = h(mid)
            # h / ‖w‖² = Φ'(u)u / ‖u‖² keeps the stop rule invariant under w -> t w
            if (abs(mid * hm) <= target and abs(hm) <= tol * norm2) or mid <= lo or mid >= hi:
                s_w = mid
                break
            if hm > 0:
                lo = mid
            else:
                hi = mid
    u = s_w * w
    return RayProjection(s_w=s_w, u=u, fiber_value=phi(p, u), bracket=(lo, hi), iterations=iters)


def on_sphere(p: Problem, w, tol: float = SPHERE_TOL) -> np.ndarray:
    """Renormalise ``w`` if ``|‖w‖ − 1| <= tol``; reject it otherwise."""
    w = p.field(w)
    nrm = p.norm(w)
    if nrm == 0:
        raise SphereError("zero field is not on the unit sphere")
    if abs(nrm - 1.0) > tol:
        raise SphereError(f"‖w‖ = {nrm!r} is off the unit sphere (tolerance {tol})")
    return w / nrm


def normalize(p: Problem, w) -> np.ndarray:
    w = _nonzero(p, w)
    return w / p.norm(w)


def m(p: Problem, w) -> np.ndarray:
    return project(p, on_sphere(p, w)).u


def m_inverse(p: Problem, u, tol: float = NEHARI_TOL) -> np.ndarray:
    u = _nonzero(p, u)
    norm2 = p.inner(u, u)
    nehari = norm2 - float(np.dot(p.nonlinearity.f(u), u))
    if abs(nehari) > tol * max(1.0, norm2):
        raise SphereError(f"u is not on the Nehari manifold: Φ'(u)u = {nehari!r}")
    return u / math.sqrt(norm2)


def psi(p: Problem, w) -> float:
    return project(p, on_sphere(p, w)).fiber_value


def tangent_gradient(p: Problem, w, u) -> np.ndarray:
    """ℓ² field ``g_t`` tangent to the sphere at ``w`` with ``Σ g_t z = ‖u‖ Φ'(u) z`` on ``T_w S``.

    ``T_w S = {z : ⟨w, z⟩ = 0}`` has ℓ² normal ``A w`` (``A = -Δ + V``), so
    removing the ``A w`` component of the scaled gradient leaves the pairing
    with tangent vectors unchanged.
    """
    g = p.norm(u) * phi_gradient(p, u)
    Aw = p.operator @ w
    return g - (float(np.dot(g, Aw)) / float(np.dot(Aw, Aw))) * Aw


def psi_gradient_tangent(p: Problem, w) -> np.ndarray:
    w = on_sphere(p, w)
    return tangent_gradient(p, w, project(p, w).u)


def tangent_part(p: Problem, w, v) -> np.ndarray:
    """``P_w v = v − ⟨v, w⟩ w`` for ``‖w‖ = 1``."""
    return v - p.inner(v, w) * w


def dual_norm(p: Problem, g) -> float:
    """Exact norm of ``v -> Σ g v`` in the dual of ``(H¹, ‖·‖)``: ``sqrt(g · A⁻¹ g)``."""
    r = spla.spsolve(p.operator.tocsc(), g)
    return math.sqrt(max(float(np.dot(g, r)), 0.0))


@dataclass(frozen=True)
class SandwichNorms:
    """Sampled operator norms for ``‖Ψ'(w)‖ <= ‖u‖ ‖Φ'(u)‖ <= (C'+1) ‖Ψ'(w)‖``."""

    psi_norm: float
    u_norm: float
    phi_norm: float


def sandwich_norms(p: Problem, w, rng, directions: int = 200) -> SandwichNorms:
    """Estimate ``‖Ψ'(w)‖`` over tangent directions and ``‖Φ'(u)‖`` over all sampled directions.

    Each random ``v`` contributes itself to the ``Φ'`` estimate and its tangent
    part ``P_w v`` to both estimates, so the two suprema are taken over nested
    sample sets.
    """
    w = on_sphere(p, w)
    u = project(p, w).u
    un = p.norm(u)
    g = phi_gradient(p, u)
    n = p.graph.vertex_count
    vs = rng.standard_normal((directions, n))
    A = p.operator
    Vs = (A @ vs.T).T
    tw = Vs @ w  # ⟨v, w⟩
    zs = vs - np.outer(tw, w)
    v_norms = np.sqrt(np.einsum("ij,ij->i", vs, Vs))
    z_norms = np.sqrt(np.maximum(np.einsum("ij,ij->i", zs, (A @ zs.T).T), 0.0))
    keep = z_norms > 0
    z_ratio = np.abs(zs[keep] @ g) / z_norms[keep]
    v_ratio = np.abs(vs @ g) / v_norms
    psi_norm = un * float(np.max(z_ratio)) if z_ratio.size else 0.0
    phi_norm = float(max(np.max(v_ratio), np.max(z_ratio) if z_ratio.size else 0.0))
    return SandwichNorms(psi_norm=psi_norm, u_norm=un, phi_norm=phi_norm)
