"""Ground states by descent on the reduced functional Ψ = Φ ∘ m over the unit sphere.

Each iterate is a direction ``w`` with ``‖w‖ = 1``.  The step is
``w <- normalize(w - η g_t)`` where ``g_t`` is the tangent gradient of Ψ, and
``η`` is chosen by backtracking on Ψ (Armijo).  Every trial direction is
re-projected onto the Nehari manifold, which supplies the geometry that a plain
ℓ² step ignores.

Near convergence the decrease ``η ‖g_t‖²`` drops below the rounding noise of
Ψ.  In that regime a step is accepted when it does not raise Ψ by more than
``noise_floor * max(1, |Ψ|)`` and strictly shrinks ``‖g_t‖``.  The energy
trace is therefore non-increasing up to that floor.

The descent scheme, step rule and initialisation are this package's choices;
only the variational characterisation itself is taken from the theory.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse import csgraph

from .errors import ModelError
from .functional import Problem, Residuals, phi, phi_gradient, residuals
from .graph import build_lattice_box
from .model import Nonlinearity, check_conditions, constant_potential, default_grid
from .nehari import normalize, project

log = logging.getLogger(__name__)

INIT_KINDS = ("bump_at_vertex", "random_positive", "user_field")


@dataclass(frozen=True)
class SolverOptions:
    max_iters: int = 100_000
    tol_grad: float = 1e-9
    tol_point: float = 1e-8  # scaled by max(1, ‖u‖∞)
    tol_nehari: float = 1e-10  # scaled by max(1, ‖u‖²)
    step: float = 1.0
    backtrack: float = 0.5
    armijo: float = 1e-4
    grow: float = 2.0
    max_step: float = 1e3
    min_step: float = 1e-20
    noise_floor: float = 1e-13
    seed: int = 0
    init: str = "bump_at_vertex"
    init_vertex: int | None = None  # None: the graph's center vertex
    init_field: tuple | None = None
    record_trace: bool = True

    def __post_init__(self):
        for name in ("tol_grad", "tol_point", "tol_nehari", "step", "armijo", "min_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if self.init not in INIT_KINDS:
            raise ValueError(f"init must be one of {INIT_KINDS}, got {self.init!r}")
        if self.init == "user_field" and self.init_field is None:
            raise ValueError("init='user_field' needs init_field")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")


@dataclass(frozen=True, eq=False)
class GroundStateResult:
    u_star: np.ndarray
    energy: float
    residuals: Residuals
    iterations: int
    converged: bool
    wall_time: float
    tangent_grad: float
    message: str = ""
    s_history: list = field(default_factory=list)
    energy_trace: list = field(default_factory=list)
    grad_trace: list = field(default_factory=list)
    options: SolverOptions | None = None

    def trace_rows(self):
        """``(iter, s_w, Ψ, tangent_grad_sup)`` per accepted iterate."""
        return list(zip(range(len(self.energy_trace)), self.s_history, self.energy_trace, self.grad_trace))


def initial_field(p: Problem, opts: SolverOptions) -> np.ndarray:
    n = p.graph.vertex_count
    if opts.init == "bump_at_vertex":
        x = p.graph.center_vertex() if opts.init_vertex is None else int(opts.init_vertex)
        if not 0 <= x < n:
            raise ValueError(f"init_vertex {x} out of range")
        w = np.zeros(n)
        w[x] = 1.0
        return w
    if opts.init == "random_positive":
        return np.random.default_rng(opts.seed).uniform(0.0, 1.0, n) + 1e-3
    return p.field(np.asarray(opts.init_field, dtype=float))


def _gate(p: Problem):
    nl = p.nonlinearity
    if nl.power_family:
        return
    verts = range(p.graph.vertex_count) if nl.x_dependent else (0,)
    report = check_conditions(nl, default_grid(vertices=verts))
    if not report.ok:
        raise ModelError(
            "nonlinearity fails admissibility checks: "
            f"small_ratio={report.small_ratio:.3g}, monotone_violations={report.monotone_violations}, "
            f"large_ratio={report.large_ratio:.3g}, antiderivative_error={report.antiderivative_error:.3g}"
        )


class _State:
    __slots__ = ("w", "u", "s", "psi", "gt", "gt_norm", "gt_sup", "point_sup")

    def __init__(self, p: Problem, w):
        proj = project(p, w)
        self.w, self.u, self.s, self.psi = w, proj.u, proj.s_w, proj.fiber_value
        gphi = phi_gradient(p, self.u)
        g = p.norm(self.u) * gphi
        Aw = p.operator @ w
        self.gt = g - (float(np.dot(g, Aw)) / float(np.dot(Aw, Aw))) * Aw
        self.gt_norm = float(np.linalg.norm(self.gt))
        self.gt_sup = float(np.max(np.abs(self.gt)))
        self.point_sup = float(np.max(np.abs(gphi)))


def _point_tol(opts, u):
    return opts.tol_point * max(1.0, float(np.max(np.abs(u))))


def _converged(p, opts, st: _State) -> bool:
    if st.gt_sup > opts.tol_grad or st.point_sup > _point_tol(opts, st.u):
        return False
    nehari = abs(float(np.dot(phi_gradient(p, st.u), st.u)))
    return nehari <= opts.tol_nehari * max(1.0, p.inner(st.u, st.u))


def minimize(p: Problem, opts: SolverOptions | None = None) -> GroundStateResult:
    """Minimise Ψ over the unit sphere; non-convergence is reported, never raised."""
    opts = opts or SolverOptions()
    _gate(p)
    t0 = time.perf_counter()
    st = _State(p, normalize(p, initial_field(p, opts)))
    s_hist, e_trace, g_trace = [st.s], [st.psi], [st.gt_sup]
    eta = opts.step
    converged = _converged(p, opts, st)
    message = "converged" if converged else ""
    it = 0
    while not converged and it < opts.max_iters:
        floor = opts.noise_floor * max(1.0, abs(st.psi))
        accepted = None
        while eta >= opts.min_step:
            trial = _State(p, normalize(p, st.w - eta * st.gt))
            decrease = eta * st.gt_norm**2
            if decrease <= floor:
                # Ψ differences are rounding noise here; only a smaller gradient counts
                if trial.psi <= st.psi + floor and trial.gt_norm < st.gt_norm:
                    accepted = trial
            elif trial.psi <= st.psi - opts.armijo * decrease:
                accepted = trial
            if accepted is not None:
                break
            eta *= opts.backtrack
        if accepted is None:
            message = f"line search stalled at iteration {it}"
            break
        st = accepted
        it += 1
        if opts.record_trace:
            s_hist.append(st.s)
            e_trace.append(st.psi)
            g_trace.append(st.gt_sup)
        eta = min(eta * opts.grow, opts.max_step)
        converged = _converged(p, opts, st)
    if converged:
        message = "converged"
    elif not message:
        message = f"max_iters={opts.max_iters} reached"
    if not converged:
        log.warning("minimize did not converge: %s (tangent grad %.3e)", message, st.gt_sup)

    u = st.u
    if p.nonlinearity.power_family:
        k = int(np.argmax(np.abs(u)))
        if u[k] < 0:
            u = -u
    if not opts.record_trace:
        s_hist, e_trace, g_trace = [st.s], [st.psi], [st.gt_sup]
    return GroundStateResult(
        u_star=u,
        energy=phi(p, u),
        residuals=residuals(p, u),
        iterations=it,
        converged=converged,
        wall_time=time.perf_counter() - t0,
        tangent_grad=st.gt_sup,
        message=message,
        s_history=s_hist,
        energy_trace=e_trace,
        grad_trace=g_trace,
        options=opts,
    )


@dataclass(frozen=True)
class VerifyReport:
    pointwise_sup: float
    pointwise_tol: float
    nehari: float
    nehari_tol: float
    min_ray_max: float  # smallest max_s Φ(s w) over the sampled rays
    energy: float
    infmax_slack: float = 1e-8

    @property
    def pointwise_ok(self) -> bool:
        return self.pointwise_sup <= self.pointwise_tol

    @property
    def nehari_ok(self) -> bool:
        return self.nehari <= self.nehari_tol

    @property
    def infmax_ok(self) -> bool:
        return self.min_ray_max >= self.energy - self.infmax_slack

    @property
    def ok(self) -> bool:
        return self.pointwise_ok and self.nehari_ok and self.infmax_ok


def ray_maximum(p: Problem, w, s_grid) -> float:
    """``max_s Φ(s w)``: grid scan, refined by the exact ray projection."""
    best = max(phi(p, s * w) for s in s_grid)
    return max(best, project(p, w).fiber_value)


def verify(p: Problem, r: GroundStateResult, directions: int = 100, seed: int = 0, s_grid=None) -> VerifyReport:
    """Check (a) the pointwise equation, (b) Nehari membership, (c) no sampled ray beats ``c``."""
    opts = r.options or SolverOptions()
    u = p.field(r.u_star)
    res = residuals(p, u)
    s_grid = np.logspace(-3, 3, 200) if s_grid is None else s_grid
    rng = np.random.default_rng(seed)
    ray_max = math.inf
    for _ in range(directions):
        w = normalize(p, rng.standard_normal(p.graph.vertex_count))
        ray_max = min(ray_max, ray_maximum(p, w, s_grid))
    return VerifyReport(
        pointwise_sup=res.pointwise_sup,
        pointwise_tol=_point_tol(opts, u),
        nehari=res.nehari if res.nehari is not None else math.inf,
        nehari_tol=opts.tol_nehari * max(1.0, p.inner(u, u)),
        min_ray_max=ray_max,
        energy=phi(p, u),
    )


def _run_all(fns, workers: int):
    if workers <= 1:
        return [fn() for fn in fns]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn) for fn in fns]
        return [f.result() for f in futures]


@dataclass(frozen=True, eq=False)
class LimitComparison:
    c: float
    c_inf: float
    well: GroundStateResult
    limit: GroundStateResult

    @property
    def gap(self) -> float:
        return self.c_inf - self.c


def deepest_vertex(p: Problem) -> int:
    """A vertex of minimal V; ties go to the one closest (graph distance) to the center."""
    g = p.graph
    cands = np.flatnonzero(p.V == p.V.min())
    dist = csgraph.shortest_path(g.adjacency_matrix, unweighted=True, indices=g.center_vertex())
    return int(cands[np.argmin(dist[cands])])


def compare_limit_energy(p_well: Problem, opts: SolverOptions | None = None, workers: int = 1) -> LimitComparison:
    """Ground-state energies of the well problem and of its constant ``V_∞`` limit on the same graph.

    Both solves start from the same field; with the default bump init it sits
    at the deepest point of the well (nearest the center on ties).
    """
    if p_well.nonlinearity.x_dependent:
        raise ModelError("compare_limit_energy requires an x-independent nonlinearity")
    pot = p_well.potential
    if pot.kind not in ("bounded_well", "constant"):
        raise ModelError(f"compare_limit_energy requires a bounded_well potential, got {pot.kind}")
    opts = opts or SolverOptions()
    if opts.init == "bump_at_vertex" and opts.init_vertex is None:
        opts = replace(opts, init_vertex=deepest_vertex(p_well))
    p_inf = Problem(p_well.graph, constant_potential(p_well.graph, pot.vinf), p_well.nonlinearity)
    r_well, r_inf = _run_all([lambda: minimize(p_well, opts), lambda: minimize(p_inf, opts)], workers)
    return LimitComparison(c=r_well.energy, c_inf=r_inf.energy, well=r_well, limit=r_inf)


@dataclass(frozen=True)
class TruncationRow:
    size: int
    vertex_count: int
    energy: float
    difference: float | None  # energy minus previous row's energy
    converged: bool
    iterations: int


def truncation_study(
    dimension: int,
    sizes,
    vinf: float,
    nonlinearity: Nonlinearity,
    opts: SolverOptions | None = None,
    workers: int = 1,
) -> list[TruncationRow]:
    """Ground-state energy on Dirichlet boxes of growing side length (cubes ``L^N``)."""
    sizes = [int(s) for s in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be strictly increasing, got {sizes}")
    opts = opts or SolverOptions()

    def solve(L):
        g = build_lattice_box(dimension, [L] * dimension, "dirichlet_box")
        return g, minimize(Problem(g, constant_potential(g, vinf), nonlinearity), opts)

    runs = _run_all([lambda L=L: solve(L) for L in sizes], workers)
    rows, prev = [], None
    for L, (g, r) in zip(sizes, runs):
        rows.append(
            TruncationRow(L, g.vertex_count, r.energy, None if prev is None else r.energy - prev, r.converged, r.iterations)
        )
        prev = r.energy
    return rows
