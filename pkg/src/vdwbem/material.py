"""Dielectric response on the imaginary frequency axis.

Frequencies are carried as energies (h-bar * xi, in eV) throughout, so
frequency integrals produce energies in eV without a separate Planck
constant. The default material is Drude gold with plasma energy 9.0 eV and
damping 0.035 eV. The solver only ever sees the scalar response functions
below, so tabulated permittivities can be swapped in later by replacing the
single eps(xi) entry point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MaterialError

__all__ = [
    "DrudeModel",
    "GOLD",
    "eps_imaginary",
    "lambda_of_eps",
    "half_space_reflection",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DrudeModel:
    """Drude metal: eps(i xi) = 1 + wp^2 / (xi (xi + gamma)), energies in eV."""

    plasma_energy_ev: float = 9.0
    damping_energy_ev: float = 0.035

    def __post_init__(self):
        if self.plasma_energy_ev <= 0.0:
            raise MaterialError("plasma energy must be positive")
        if self.damping_energy_ev < 0.0:
            raise MaterialError("damping energy must be non-negative")

    def eps(self, xi_ev):
        return eps_imaginary(self, xi_ev)


GOLD = DrudeModel()


def eps_imaginary(model: DrudeModel, xi_ev):
    """eps(i xi) = 1 + wp^2 / (xi (xi + gamma)); real, > 1, decreasing in xi.

    ``xi_ev`` must be strictly positive (the xi -> 0 divergence is handled
    by quadrature node placement, never by evaluating at zero). Accepts
    scalars or numpy arrays.
    """
    xi = np.asarray(xi_ev, dtype=float)
    if np.any(xi <= 0.0):
        raise MaterialError("eps_imaginary requires xi > 0")
    eps = 1.0 + model.plasma_energy_ev**2 / (xi * (xi + model.damping_energy_ev))
    return float(eps) if np.isscalar(xi_ev) else eps


def lambda_of_eps(eps):
    """Diagonal strength lambda = 2 pi (eps + 1) / (eps - 1) of the panel system."""
    e = np.asarray(eps, dtype=float)
    if np.any(e == 1.0):
        raise MaterialError("lambda is singular at eps = 1 (vacuum body)")
    lam = TWO_PI * (e + 1.0) / (e - 1.0)
    return float(lam) if np.isscalar(eps) else lam


def half_space_reflection(eps):
    """Non-retarded half-space reflection coefficient r = (eps - 1) / (eps + 1)."""
    e = np.asarray(eps, dtype=float)
    if np.any(e == -1.0):
        raise MaterialError("reflection coefficient is singular at eps = -1")
    r = (e - 1.0) / (e + 1.0)
    return float(r) if np.isscalar(eps) else r
