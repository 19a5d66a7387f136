"""Polytropic equation of state ``eps(rho, S) = rho**gamma exp((S - S_ref)/c_v) / (gamma - 1)``.

``eps`` is the internal energy per unit volume.  The other quantities follow
from the thermodynamic identities ``h = eps_rho``, ``rho T = eps_S`` and
``p = rho eps_rho - eps``, which for this closure give ``p = (gamma - 1) eps``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class EosParams:
    gamma: float = 5.0 / 3.0
    c_v: float = 1.0
    S_ref: float = 0.0
    mu0: float = 1.0  # magnetic permeability (code units)

    def __post_init__(self):
        if not self.gamma > 1:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
        if not self.c_v > 0:
            raise ConfigError(f"c_v must be positive, got {self.c_v}")
        if not self.mu0 > 0:
            raise ConfigError(f"mu0 must be positive, got {self.mu0}")


def internal_energy(params: EosParams, rho, S):
    return rho**params.gamma * np.exp((S - params.S_ref) / params.c_v) / (params.gamma - 1.0)


def eos_eval(params: EosParams, rho, S):
    """Return ``(eps, p, h, T)`` at density ``rho`` and entropy ``S``."""
    if np.any(np.real(rho) <= 0):
        raise DomainError("density must be positive")
    eps = internal_energy(params, rho, S)
    h = params.gamma * eps / rho
    p = (params.gamma - 1.0) * eps
    T = eps / (rho * params.c_v)
    return eps, p, h, T


def sound_speed(params: EosParams, rho, S):
    _, p, _, _ = eos_eval(params, rho, S)
    return np.sqrt(params.gamma * p / rho)
