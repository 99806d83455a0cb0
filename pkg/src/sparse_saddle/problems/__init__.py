"""Model problems, coefficient parametrizations and closed-form constants."""
from .constants import ConstantSet, MaxwellCoercivity, diffusion_constants, maxwell_coercivity, stokes_constants
from .diffusion import build_mixed_diffusion_1d
from .fields import (
    CallableField,
    CellIndicatorField,
    ConstantField,
    ConstantVectorField,
    SineModeField,
    SumField,
)
from .parametrization import (
    EllipticityError,
    ParametrizationMeta,
    build_global_parametrization,
    build_local_parametrization,
    constant_parametrization,
    sampling_grid,
)
from .poincare import discrete_poincare_constant
from .stokes import MacLayout, build_stokes_mac_2d, reflect_y

__all__ = [
    "CallableField",
    "CellIndicatorField",
    "ConstantField",
    "ConstantSet",
    "ConstantVectorField",
    "EllipticityError",
    "MacLayout",
    "MaxwellCoercivity",
    "ParametrizationMeta",
    "SineModeField",
    "SumField",
    "build_global_parametrization",
    "build_local_parametrization",
    "build_mixed_diffusion_1d",
    "build_stokes_mac_2d",
    "constant_parametrization",
    "diffusion_constants",
    "discrete_poincare_constant",
    "maxwell_coercivity",
    "reflect_y",
    "sampling_grid",
    "stokes_constants",
]
