"""plevylab: a numerical laboratory for nonlocal p-Levy operators, their
energy forms, complement-value problems, and the nonlocal-to-local limits
(eps -> 0 for approximation-of-identity kernel families, s -> 1^- for the
fractional p-Laplacian)."""

from .constants import ExponentDim, a_scaling, c_frac, c_tilde, k_const, log_gamma, sphere_area
from .grid import Domain, Grid, GridFunction, build_grid, sample
from .kernels import (
    Kernel,
    choose_collar,
    exponential_base,
    fractional_kernel,
    fractional_seminorm_kernel,
    indicator_base,
    plevy_mass,
    rescaled_kernel,
    tail_mass,
)

__version__ = "0.1.0"

__all__ = [
    "ExponentDim",
    "a_scaling",
    "c_frac",
    "c_tilde",
    "k_const",
    "log_gamma",
    "sphere_area",
    "Domain",
    "Grid",
    "GridFunction",
    "build_grid",
    "sample",
    "Kernel",
    "choose_collar",
    "exponential_base",
    "fractional_kernel",
    "fractional_seminorm_kernel",
    "indicator_base",
    "plevy_mass",
    "rescaled_kernel",
    "tail_mass",
    "__version__",
]
