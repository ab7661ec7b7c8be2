"""Field-noise spectral density and single-ion heating rate.

SI units live here only: the Lambda layers stay in geometry units until a
:class:`~patchnoise.geofactor.LambdaResult` is resolved with a length scale.

The patch-potential spectrum ``R(omega)`` is modelled as a power law
``amplitude * (omega_ref / omega)^beta`` with the amplitude defined at a
reference frequency (default ``2 pi * 1 MHz``).  Absolute heating rates are
therefore relative to that calibration; scaling statements are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import constants

from .geofactor import LambdaResult

__all__ = [
    "UnresolvedUnitsError",
    "NoiseSpectrumModel",
    "IonParams",
    "RFCheck",
    "spectral_density",
    "heating_rate",
    "validity_check_rf",
    "DEFAULT_OMEGA_REF",
]

ALLOWED_BETAS = (1.0, 1.5, 2.0)
DEFAULT_OMEGA_REF = 2.0 * math.pi * 1.0e6


class UnresolvedUnitsError(ValueError):
    """Lambda is still in geometry units (or A/N is missing)."""


@dataclass(frozen=True)
class NoiseSpectrumModel:
    """Power-law potential noise ``R(omega) = amplitude (omega_ref / omega)^beta``.

    Parameters
    ----------
    amplitude : float
        ``R(omega_ref)`` in V^2 s.
    beta : float
        Exponent; one of 1, 1.5, 2 unless ``allow_any_beta``.
    omega_ref : float
        Reference angular frequency in rad/s.
    """

    amplitude: float
    beta: float = 1.0
    omega_ref: float = DEFAULT_OMEGA_REF
    allow_any_beta: bool = False

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if not self.omega_ref > 0:
            raise ValueError("omega_ref must be positive")
        if not self.allow_any_beta and float(self.beta) not in ALLOWED_BETAS:
            raise ValueError(f"beta must be one of {ALLOWED_BETAS} (set allow_any_beta to override)")

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise ValueError("omega must be positive")
        out = self.amplitude * (self.omega_ref / omega) ** self.beta
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class IonParams:
    """Charge (C), mass (kg), secular frequency (rad/s) and hbar (J s)."""

    charge: float
    mass: float
    omega: float
    hbar: float = constants.hbar

    def __post_init__(self):
        for name in ("charge", "mass", "omega", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _lambda_value(lam) -> float:
    if isinstance(lam, LambdaResult):
        if lam.length_scale_m is None:
            raise UnresolvedUnitsError("resolve the LambdaResult with a length scale before converting to SI")
        return lam.value
    return float(lam)


def spectral_density(R: NoiseSpectrumModel, omega, lam) -> float:
    """``S_E(omega) = 2 R(omega) Lambda``.

    ``lam`` is a resolved :class:`LambdaResult` (``m^-p``, A/N included) or a
    bare number already in SI.
    """
    return 2.0 * R(omega) * _lambda_value(lam)


def heating_rate(ion: IonParams, S) -> float:
    """Ground-state heating rate ``q^2 S / (4 m hbar omega)`` in quanta/s."""
    S = np.asarray(S, dtype=float)
    out = ion.charge ** 2 * S / (4.0 * ion.mass * ion.hbar * ion.omega)
    return float(out) if out.ndim == 0 else out


class RFCheck(NamedTuple):
    ratio: float
    warn: bool


def validity_check_rf(omega_k: float, omega_rf: float, threshold: float = 0.01) -> RFCheck:
    """``(omega_k / Omega_rf)^2`` and whether it exceeds ``threshold``.

    The micromotion correction to the secular-mode noise coupling is
    negligible only when the ratio is small.
    """
    if not (omega_k > 0 and omega_rf > 0):
        raise ValueError("frequencies must be positive")
    ratio = (omega_k / omega_rf) ** 2
    return RFCheck(ratio, ratio > threshold)
