"""Ground states of the discrete nonlinear Schrödinger equation on lattice graphs."""

from .calculus import energy, gradient_form, h1_norm, laplacian, lp_norm, weighted_inner, weighted_norm
from .functional import Problem, Residuals, phi, phi_derivative, phi_gradient, residuals
from .graph import Graph, Shift, build_graph, build_lattice_box, build_preset, translate
from .model import (
    Nonlinearity,
    Potential,
    check_conditions,
    constant_potential,
    custom_nonlinearity,
    periodic_potential,
    power_nonlinearity,
    well_potential,
)
from .nehari import fiber, m, m_inverse, project, psi, psi_gradient_tangent
from .solver import (
    GroundStateResult,
    SolverOptions,
    compare_limit_energy,
    minimize,
    truncation_study,
    verify,
)

__version__ = "0.1.0"
