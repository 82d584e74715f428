"""Reusable numerical kernels: ODE integration, quadrature, root finding."""

from .integrate import (
    DEFAULT_INTEGRATOR,
    IntegrationError,
    IntegratorSpec,
    NonFiniteFieldError,
    StepSizeUnderflowError,
    Trajectory,
    integrate,
)
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureError,
    QuadratureSpec,
    SubdivisionLimitError,
    quad,
)
from .roots import (
    DEFAULT_ROOT,
    ConvergenceError,
    DivergenceError,
    NdRootResult,
    NoSignChangeError,
    RootFindError,
    RootSpec,
    SingularJacobianError,
    find_root_1d,
    find_root_nd,
    finite_difference_jacobian,
)

__all__ = [
    "DEFAULT_INTEGRATOR",
    "DEFAULT_QUADRATURE",
    "DEFAULT_ROOT",
    "ConvergenceError",
    "DivergenceError",
    "IntegrationError",
    "IntegratorSpec",
    "NdRootResult",
    "NoSignChangeError",
    "NonFiniteFieldError",
    "QuadratureError",
    "QuadratureSpec",
    "RootFindError",
    "RootSpec",
    "SingularJacobianError",
    "StepSizeUnderflowError",
    "SubdivisionLimitError",
    "Trajectory",
    "find_root_1d",
    "find_root_nd",
    "finite_difference_jacobian",
    "integrate",
    "quad",
]
