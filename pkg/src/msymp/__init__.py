"""Multi-symplectic formulations of ideal gas dynamics and MHD, with numerical checks.

Submodules: ``exterior`` (one-forms, structure matrices), ``systems``
(gas1d, mhd-b, mhd-a), ``dynamics`` (1.5D solvers), ``claws``
(conservation laws), ``covariant`` (metrics and radial runs),
``adjointb`` (the V_B adjoint identity) and ``cli``.
"""

from .eos import EosParams
from .errors import ConfigError, DomainError, SolverAbort, UsageError
from .exterior import OneForm, assemble_residual, check_closure, exterior_derivative, structure_matrices
from .systems import SystemDef, get_system, map_A_to_B, map_B_to_A

__all__ = [
    "EosParams", "ConfigError", "DomainError", "SolverAbort", "UsageError",
    "OneForm", "assemble_residual", "check_closure", "exterior_derivative",
    "structure_matrices", "SystemDef", "get_system", "map_A_to_B", "map_B_to_A",
]
__version__ = "0.1.0"
