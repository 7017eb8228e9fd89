"""Numerical toolkit for the small-beta spectrum of anisotropic Cauchy-type kernels."""
from .theta import ThetaSpec, eval_theta, tau, validate
from .kernels import KernelSpec, eval_kernel, rescale_beta_to_alpha
from .discretize import GridPolicy, model_operator, nystrom, trapezoid_grid, fourier_grid
from .eigen import top_k, bottom_k, perron_certify
from .asym import sweep, fit_power_law, lambda_reference, eigenfunction_distance

__version__ = "0.1.0"

__all__ = [
    "ThetaSpec", "eval_theta", "tau", "validate", "KernelSpec", "eval_kernel",
    "rescale_beta_to_alpha", "GridPolicy", "model_operator", "nystrom", "trapezoid_grid",
    "fourier_grid", "top_k", "bottom_k", "perron_certify", "sweep", "fit_power_law",
    "lambda_reference", "eigenfunction_distance", "__version__",
]
