"""Potentials V and nonlinearities f, with numeric checks of their hypotheses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import ModelError
from .graph import Graph


@dataclass(frozen=True, eq=False)
class Potential:
    """Positive per-vertex potential.

    ``kind`` is ``"periodic"`` (with ``period``), ``"bounded_well"`` (with
    ``v0 = min V`` and ``vinf = max V``) or ``"constant"`` (``vinf``).
    """

    values: np.ndarray
    kind: str
    period: tuple[int, ...] | None = None
    v0: float | None = None
    vinf: float | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or not np.all(np.isfinite(vals)):
            raise ModelError("potential values must be a finite 1-d array")
        if not np.all(vals > 0):
            bad = int(np.argmin(vals))
            raise ModelError(f"potential must be strictly positive, V[{bad}] = {vals[bad]}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.kind not in ("periodic", "bounded_well", "constant"):
            raise ModelError(f"unknown potential kind {self.kind!r}")
        if self.kind == "bounded_well" and not (0 < self.v0 <= vals.min() <= vals.max() <= self.vinf):
            raise ModelError("bounded well requires 0 < V0 <= min V <= max V <= Vinf")

    @property
    def x_independent(self) -> bool:
        return bool(np.all(self.values == self.values[0]))


def constant_potential(g: Graph, value: float) -> Potential:
    value = float(value)
    if not value > 0:
        raise ModelError(f"constant potential must be positive, got {value}")
    return Potential(np.full(g.vertex_count, value), "constant", vinf=value, v0=value)


def periodic_potential(g: Graph, cell, T) -> Potential:
    """Tile ``cell`` (values on the fundamental cell ``[0, T)^N``) across a torus."""
    if g.mode != "periodic_torus":
        raise ModelError(f"periodic potential needs a periodic_torus graph, got {g.mode}")
    N = g.dimension
    T = (int(T),) * N if np.isscalar(T) else tuple(int(t) for t in T)
    if len(T) != N:
        raise ModelError(f"period has {len(T)} entries, graph dimension is {N}")
    cell = np.asarray(cell, dtype=float)
    if cell.ndim == 1 and N > 1:
        cell = cell.reshape(T)
    if cell.shape != T:
        raise ModelError(f"cell has shape {cell.shape}, expected {T}")
    for axis, (side, t) in enumerate(zip(g.sides, T)):
        if t < 1 or side % t:
            raise ModelError(f"side {side} on axis {axis} is not a multiple of period {t}")
    if not np.all(cell > 0):
        raise ModelError("periodic potential cell values must be strictly positive")
    idx = tuple((g.coordinates[:, axis] % T[axis]) for axis in range(N))
    return Potential(cell[idx], "periodic", period=T)


def well_potential(g: Graph, vinf: float, dips: dict | None = None) -> Potential:
    """``V = vinf`` except ``V(x) = vinf - depth`` at finitely many dipped vertices."""
    vinf = float(vinf)
    dips = dict(dips or {})
    if not dips:
        return constant_potential(g, vinf)
    vals = np.full(g.vertex_count, vinf)
    for x, depth in dips.items():
        x, depth = int(x), float(depth)
        if not 0 <= x < g.vertex_count:
            raise ModelError(f"dip vertex {x} out of range")
        if depth < 0:
            raise ModelError(f"dip depth at vertex {x} must be >= 0, got {depth}")
        if not vinf - depth > 0:
            raise ModelError(f"vinf - depth = {vinf - depth} at vertex {x} is not positive")
        vals[x] = vinf - depth
    return Potential(vals, "bounded_well", v0=float(vals.min()), vinf=vinf)


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """Pointwise nonlinearity ``f(x, u)`` with antiderivative ``F(x, u)``.

    Evaluators are vectorised: ``x`` is an integer array of vertex indices and
    ``u`` a float array of the same length.  Plug-in evaluators must be pure.
    """

    f_eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    F_eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    exponents: tuple[float, ...] = ()
    coefficients: tuple = ()
    x_dependent: bool = False
    power_family: bool = False
    label: str = "custom"

    def f(self, u, x=None) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        x = np.arange(u.size) if x is None else np.asarray(x)
        return np.asarray(self.f_eval(x, u), dtype=float)

    def F(self, u, x=None) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        x = np.arange(u.size) if x is None else np.asarray(x)
        return np.asarray(self.F_eval(x, u), dtype=float)

    @property
    def growth_exponent(self) -> float | None:
        return max(self.exponents) if self.exponents else None


def _coef_at(a, x):
    return a if np.isscalar(a) else a[x]


def power_nonlinearity(coeffs, exponents) -> Nonlinearity:
    """``f(x, u) = Σ a_i(x) |u|^(q_i - 2) u``, ``F(x, u) = Σ a_i(x) |u|^q_i / q_i``.

    Each ``a_i`` is a positive scalar or a positive per-vertex array.
    """
    exps = tuple(float(q) for q in np.atleast_1d(exponents))
    if np.isscalar(coeffs) or (isinstance(coeffs, np.ndarray) and coeffs.ndim == 1 and len(exps) == 1):
        coeffs = [coeffs]
    if len(coeffs) != len(exps):
        raise ModelError(f"{len(coeffs)} coefficients for {len(exps)} exponents")
    if not exps:
        raise ModelError("at least one exponent is required")
    cs = []
    for i, (a, q) in enumerate(zip(coeffs, exps)):
        if not q > 2:
            raise ModelError(f"exponents[{i}] = {q} must be > 2")
        if np.isscalar(a):
            a = float(a)
            if not a > 0:
                raise ModelError(f"coefficients[{i}] = {a} must be > 0")
        else:
            a = np.array(a, dtype=float)
            if not np.all(a > 0):
                raise ModelError(f"coefficients[{i}] must be > 0 at every vertex")
            a.setflags(write=False)
        cs.append(a)
    cs = tuple(cs)

    def f_eval(x, u):
        au = np.abs(u)
        return sum(_coef_at(a, x) * au ** (q - 2) * u for a, q in zip(cs, exps))

    def F_eval(x, u):
        au = np.abs(u)
        return sum(_coef_at(a, x) * au**q / q for a, q in zip(cs, exps))

    label = " + ".join(
        f"{a if np.isscalar(a) else 'a(x)'}|u|^{q:g}/{q:g}" for a, q in zip(cs, exps)
    )
    return Nonlinearity(
        f_eval,
        F_eval,
        exponents=exps,
        coefficients=cs,
        x_dependent=any(not np.isscalar(a) for a in cs),
        power_family=True,
        label=label,
    )


def custom_nonlinearity(f, F=None, x_dependent=False, label="custom") -> Nonlinearity:
    """Wrap user evaluators ``f(x, u)`` and optionally ``F(x, u)``.

    Without ``F`` the antiderivative is computed by adaptive quadrature per
    sample, which is slow; supply ``F`` for anything beyond small graphs.
    """
    if F is None:

        def F(x, u):
            x = np.broadcast_to(x, np.shape(u))
            return np.array(
                [integrate.quad(lambda t: float(f(np.array([xi]), np.array([t]))[0]), 0.0, ui)[0]
                 for xi, ui in zip(x.ravel(), np.ravel(u))]
            ).reshape(np.shape(u))

    return Nonlinearity(f, F, x_dependent=x_dependent, label=label)


@dataclass
class ConditionReport:
    """Worst-case witnesses for the growth conditions on ``f``: small-u decay, monotone ``f/|u|``, superquadratic ``F``."""

    small_ratio: float  # max |f/u| over small |u|
    monotone_violations: int  # non-increases of f/|u| along sorted u
    large_ratio: float  # min F/u² over large |u|
    antiderivative_error: float  # max |F - ∫f| on sampled points
    small_threshold: float
    large_threshold: float
    antiderivative_tol: float = 1e-6
    details: dict = field(default_factory=dict)

    @property
    def small_ok(self) -> bool:
        return self.small_ratio <= self.small_threshold

    @property
    def monotone_ok(self) -> bool:
        return self.monotone_violations == 0

    @property
    def large_ok(self) -> bool:
        return self.large_ratio >= self.large_threshold

    @property
    def antiderivative_ok(self) -> bool:
        return self.antiderivative_error <= self.antiderivative_tol

    @property
    def ok(self) -> bool:
        return self.small_ok and self.monotone_ok and self.large_ok and self.antiderivative_ok


def default_grid(vertices=(0,), small=(1e-8, 1e-4), large=(1e3, 1e6), points=40):
    """Sample ``(x, u)`` pairs spanning small, moderate and large ``|u|`` of both signs."""
    mags = np.concatenate(
        [
            np.logspace(math.log10(small[0]), math.log10(small[1]), points),
            np.logspace(math.log10(small[1]), math.log10(large[0]), points)[1:-1],
            np.logspace(math.log10(large[0]), math.log10(large[1]), points),
        ]
    )
    us = np.concatenate([-mags[::-1], mags])
    return [(int(x), float(u)) for x in vertices for u in us]


def check_conditions(
    nl: Nonlinearity,
    sample_grid=None,
    small_cutoff=1e-3,
    large_cutoff=1e3,
    small_threshold=1e-3,
    large_threshold=10.0,
    quadrature_samples=8,
) -> ConditionReport:
    """Spot-check ``f = o(u)`` at 0, ``f/|u|`` strictly increasing, and ``F/u² → ∞``."""
    grid = default_grid() if sample_grid is None else list(sample_grid)
    if not grid:
        raise ValueError("sample grid is empty")
    xs = np.array([p[0] for p in grid], dtype=np.int64)
    us = np.array([p[1] for p in grid], dtype=float)
    nz = us != 0
    xs, us = xs[nz], us[nz]
    fv = nl.f(us, xs)
    Fv = nl.F(us, xs)

    small = np.abs(us) <= small_cutoff
    small_ratio = float(np.max(np.abs(fv[small] / us[small]))) if small.any() else math.nan

    violations = 0
    for x in np.unique(xs):
        for sign in (-1.0, 1.0):
            sel = (xs == x) & (np.sign(us) == sign)
            if sel.sum() < 2:
                continue
            order = np.argsort(us[sel])
            ratio = (fv[sel] / np.abs(us[sel]))[order]
            violations += int(np.sum(np.diff(ratio) <= 0))

    large = np.abs(us) >= large_cutoff
    large_ratio = float(np.min(Fv[large] / us[large] ** 2)) if large.any() else math.nan

    # antiderivative spot check on moderate samples
    moderate = np.flatnonzero((np.abs(us) > small_cutoff) & (np.abs(us) < large_cutoff))
    picks = moderate[np.linspace(0, moderate.size - 1, min(quadrature_samples, moderate.size)).astype(int)] if moderate.size else []
    err = 0.0
    for i in picks:
        x, u = xs[i], us[i]
        ref = integrate.quad(lambda t: float(nl.f(np.array([t]), np.array([x]))[0]), 0.0, u, epsabs=0, epsrel=1e-12)[0]
        err = max(err, abs(Fv[i] - ref) / max(1.0, abs(ref)))
    zero = np.abs(nl.F(np.zeros(len(np.unique(xs))), np.unique(xs)))
    err = max(err, float(zero.max()))

    return ConditionReport(
        small_ratio=small_ratio,
        monotone_violations=violations,
        large_ratio=large_ratio,
        antiderivative_error=err,
        small_threshold=small_threshold,
        large_threshold=large_threshold,
    )


def growth_constant(nl: Nonlinearity) -> float | None:
    """``a`` in ``|f(x,u)| <= a(|u| + |u|^(q-1))`` for the power family, ``q = max q_i``."""
    if not nl.power_family:
        return None
    # |u|^(p-1) <= |u| + |u|^(q-1) for 2 <= p <= q
    return float(sum(np.max(a) for a in nl.coefficients))
