"""Fourier-Legendre series, product coefficients, truncation bounds and a
spectral solver for a reaction-diffusion equation with quadratic nonlinearity.

``BACKEND`` names the product kernel in use: ``"cython"`` when the compiled
extension imported, ``"python"`` for the NumPy fallback.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .bounds import (
    BoundEstimate,
    SmoothnessData,
    bound_curve,
    mu_truncation_bound_general,
    mu_truncation_bound_j1,
    mu_truncation_bound_j2,
    smoothness_constant,
    tail_bound_general,
    tail_bound_j1,
    wang_coefficient_bound,
    weighted_norm,
)
from .errors import ConvergenceError, DataError, DivergenceError, DomainError, LegendreError
from .expansion import (
    FunctionSampler,
    LegendreSeries,
    evaluate,
    get_sampler,
    mu_coefficient,
    mu_coefficients,
    power_series,
    product_coefficients_finite,
    project,
    project_power_series,
)
from .legendre_core import (
    QuadratureRule,
    gauss_legendre_rule,
    half_ratio_table,
    legendre_eval,
    legendre_eval_all,
    linearization_coefficient,
    product_linearization,
    rising_factorial,
)
from .pde import (
    ForcingTerm,
    IBVPSpec,
    SolverConfig,
    Trajectory,
    error_table,
    manufactured_case,
    reconstruct,
    relative_error,
    rk4_step,
    solve_ivp,
    spectral_rhs,
)
