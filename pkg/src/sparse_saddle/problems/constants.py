"""Closed-form well-posedness constants for the model problems."""
from __future__ import annotations

import math
from typing import NamedTuple


class ConstantSet(NamedTuple):
    gamma: float
    delta: float
    alpha: float
    beta: float


class MaxwellCoercivity(NamedTuple):
    alpha: float
    noncoercive: bool


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise ValueError(f"{k} must be positive, got {v}")


def stokes_constants(kappa_min, kappa_max, gamma1, gamma2, C_p) -> ConstantSet:
    """Stokes constants from the Korn constants ``gamma1``, ``gamma2`` and a Poincare constant."""
    _positive(kappa_min=kappa_min, kappa_max=kappa_max, gamma1=gamma1, gamma2=gamma2)
    if C_p < 0:
        raise ValueError(f"C_p must be nonnegative, got {C_p}")
    return ConstantSet(2.0 * gamma2 * kappa_max, 1.0, 2.0 * gamma1 * kappa_min, 1.0 / math.sqrt(1.0 + C_p))


def diffusion_constants(kappa_min, kappa_max, C_p) -> ConstantSet:
    _positive(kappa_min=kappa_min, kappa_max=kappa_max)
    if C_p < 0:
        raise ValueError(f"C_p must be nonnegative, got {C_p}")
    if kappa_min > kappa_max:
        raise ValueError(f"kappa_min = {kappa_min} exceeds kappa_max = {kappa_max}")
    return ConstantSet(float(kappa_max), 1.0, float(kappa_min), 1.0 / math.sqrt(1.0 + C_p))


def maxwell_coercivity(kappa_min, epsilon_max, omega, C_f) -> MaxwellCoercivity:
    """Coercivity of the time-harmonic Maxwell form via the Friedrichs constant ``C_f``.

    A nonpositive result is returned as-is with ``noncoercive`` set.
    """
    for k, v in dict(kappa_min=kappa_min, epsilon_max=epsilon_max, omega=omega, C_f=C_f).items():
        if v < 0:
            raise ValueError(f"{k} must be nonnegative, got {v}")
    alpha = (kappa_min - omega**2 * C_f * epsilon_max) / (1.0 + C_f)
    return MaxwellCoercivity(float(alpha), alpha <= 0.0)
