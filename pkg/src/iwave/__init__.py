"""Small-amplitude internal solitary waves in two constant-vorticity layers.

Submodules: params, dispersion, spatial_linear, reduced_dynamics, profile,
dno_operators, functionals, stability, spectral, cli.
"""

from .errors import NumericalFault, ValidationError
from .params import NondimParams, PhysicalParams, critical_pair, family_derivatives, from_groups, nondim

__all__ = [
    "NondimParams",
    "NumericalFault",
    "PhysicalParams",
    "ValidationError",
    "critical_pair",
    "family_derivatives",
    "from_groups",
    "nondim",
]
__version__ = "0.1.0"
