"""Racetrack resonator optics: loss budget, Q, FSR, lineshape, mode volume.

Lengths are in meters and losses cross the interface in dB/cm (power
attenuation); the quality-factor formula consumes 1/m, converted as
alpha[1/m] = alpha[dB/cm] * ln(10)/10 * 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateField, DomainError, EmptyGrid, NonMonotonicAxis
from .records import Spectrum

__all__ = [
    "DB_PER_CM_TO_PER_M",
    "RingGeometry", "LossBudget", "CouplingState", "ModeField", "ModeVolume",
    "taper_loss_per_length", "total_loss", "quality_factor",
    "free_spectral_range", "transmission_spectrum", "classify_coupling",
    "effective_mode_volume", "max_purcell",
]

# 1 dB/cm of power attenuation in 1/m
DB_PER_CM_TO_PER_M = math.log(10.0) / 10.0 * 100.0

CRITICAL_COUPLING_TOL = 1e-6


@dataclass(frozen=True)
class RingGeometry:
    """Racetrack geometry and modal constants.

    total_length_m is the full round-trip length; gaas_length_m the printed
    emitter-host section (tapers excluded); taper_length_m one mode
    converter; n_tapers how many converters the round trip crosses.
    """

    total_length_m: float
    gaas_length_m: float
    taper_length_m: float
    group_index: float
    design_wavelength_m: float
    n_tapers: int = 2

    def __post_init__(self):
        if min(self.total_length_m, self.taper_length_m,
               self.design_wavelength_m) <= 0.0 or self.gaas_length_m < 0.0:
            raise DomainError("geometry lengths must be positive")
        if self.n_tapers < 0:
            raise DomainError("n_tapers must be >= 0")
        occupied = self.gaas_length_m + self.n_tapers * self.taper_length_m
        if occupied > self.total_length_m:
            raise DomainError(
                "emitter host plus tapers exceed the round-trip length")
        if not 1.0 < self.group_index < 10.0:
            raise DomainError("group index out of the guided-mode range")


@dataclass(frozen=True)
class LossBudget:
    """Per-section propagation losses, dB/cm, plus the taper efficiency."""

    alpha_gaas_db_per_cm: float
    alpha_taper_db_per_cm: float
    alpha_ln_db_per_cm: float
    taper_efficiency: float

    def __post_init__(self):
        if min(self.alpha_gaas_db_per_cm, self.alpha_taper_db_per_cm,
               self.alpha_ln_db_per_cm) < 0.0:
            raise DomainError("losses must be nonnegative")
        if not 0.0 < self.taper_efficiency <= 1.0:
            raise DomainError("taper efficiency must be in (0, 1]")

    @classmethod
    def from_taper_efficiency(cls, geometry, efficiency, alpha_gaas_db_per_cm,
                              alpha_ln_db_per_cm):
        """Budget with the taper loss derived from its efficiency."""
        alpha_taper = taper_loss_per_length(efficiency,
                                            geometry.taper_length_m)
        return cls(alpha_gaas_db_per_cm=alpha_gaas_db_per_cm,
                   alpha_taper_db_per_cm=alpha_taper,
                   alpha_ln_db_per_cm=alpha_ln_db_per_cm,
                   taper_efficiency=efficiency)


@dataclass(frozen=True)
class CouplingState:
    """Bus-ring coupling: self-coupling t and round-trip amplitude a."""

    self_coupling: float
    round_trip_amplitude: float

    def __post_init__(self):
        if not 0.0 < self.self_coupling < 1.0:
            raise DomainError("self-coupling must be in (0, 1)")
        if not 0.0 < self.round_trip_amplitude < 1.0:
            raise DomainError("round-trip amplitude must be in (0, 1)")


def classify_coupling(coupling, tol=CRITICAL_COUPLING_TOL):
    """'overcoupled' (a > t), 'critical' (|a - t| < tol) or 'undercoupled'."""
    a = coupling.round_trip_amplitude
    t = coupling.self_coupling
    if abs(a - t) < tol:
        return "critical"
    return "overcoupled" if a > t else "undercoupled"


def taper_loss_per_length(efficiency, taper_length_m):
    """Effective taper propagation loss in dB/cm.

    A converter passing the fraction `efficiency` of the power over
    taper_length_m behaves like a waveguide with
    alpha = -10 log10(efficiency) / length[cm].
    """
    if not 0.0 < efficiency <= 1.0:
        raise DomainError("efficiency must be in (0, 1]")
    if taper_length_m <= 0.0:
        raise DomainError("taper length must be positive")
    return -10.0 * math.log10(efficiency) / (taper_length_m * 100.0)


def total_loss(geometry, budget):
    """Length-weighted round-trip propagation loss, dB/cm.

    Sections are weighted by their share of the round trip; the bare-film
    background loss applies over the full length:

        alpha = (a_host L_host + a_taper n L_taper) / L_total + a_film
    """
    g = geometry
    weighted = (budget.alpha_gaas_db_per_cm * g.gaas_length_m
                + budget.alpha_taper_db_per_cm * g.n_tapers * g.taper_length_m)
    return weighted / g.total_length_m + budget.alpha_ln_db_per_cm


def quality_factor(geometry, alpha_total_db_per_cm):
    """Loss-limited (critically coupled) quality factor.

    Q = pi * n_g / (lambda * alpha) with alpha in 1/m.
    """
    if alpha_total_db_per_cm <= 0.0:
        raise DomainError("total loss must be positive")
    alpha_per_m = alpha_total_db_per_cm * DB_PER_CM_TO_PER_M
    return math.pi * geometry.group_index / (
        geometry.design_wavelength_m * alpha_per_m)


def free_spectral_range(geometry):
    """FSR in meters at the design wavelength: lambda^2 / (n_g L)."""
    return geometry.design_wavelength_m ** 2 / (
        geometry.group_index * geometry.total_length_m)


def transmission_spectrum(coupling, geometry, wavelengths_m):
    """All-pass power transmission sampled on an ascending wavelength grid.

    T(phi) = (a^2 - 2 a t cos phi + t^2) / (1 - 2 a t cos phi + (a t)^2),
    phi = 2 pi n_g L / lambda.  Points are independent, so evaluation may
    be partitioned arbitrarily without changing a single bit.
    """
    lam = np.asarray(wavelengths_m, dtype=np.float64)
    if lam.size == 0:
        raise EmptyGrid("wavelength grid is empty")
    if lam.ndim != 1 or np.any(np.diff(lam) <= 0.0):
        raise NonMonotonicAxis("wavelength grid must be strictly ascending")
    if np.any(lam <= 0.0):
        raise DomainError("wavelengths must be positive")
    values = kernels.allpass_transmission(
        lam, geometry.group_index, geometry.total_length_m,
        coupling.self_coupling, coupling.round_trip_amplitude)
    return Spectrum(wavelength_nm=lam * 1e9, values=values,
                    kind="transmission")


@dataclass(frozen=True)
class ModeField:
    """Sampled mode energy density on a grid.

    permittivity and intensity (|E|^2) are arrays of one shape;
    cell_volume_m3 is a scalar for uniform grids or an array of the same
    shape for nonuniform ones.
    """

    permittivity: np.ndarray
    intensity: np.ndarray
    cell_volume_m3: object

    def __post_init__(self):
        eps = np.asarray(self.permittivity, dtype=np.float64)
        inten = np.asarray(self.intensity, dtype=np.float64)
        if eps.size == 0:
            raise EmptyGrid("mode field grid is empty")
        if eps.shape != inten.shape:
            raise EmptyGrid("permittivity and intensity shapes differ")
        vol = np.asarray(self.cell_volume_m3, dtype=np.float64)
        if vol.ndim != 0 and vol.shape != eps.shape:
            raise EmptyGrid("cell volumes must be scalar or match the grid")
        if np.any(vol <= 0.0):
            raise DomainError("cell volumes must be positive")
        if np.any(eps <= 0.0):
            raise DomainError("permittivity must be positive")
        if np.any(inten < 0.0):
            raise DomainError("intensity must be nonnegative")
        object.__setattr__(self, "permittivity", eps)
        object.__setattr__(self, "intensity", inten)
        object.__setattr__(self, "cell_volume_m3", vol)


@dataclass(frozen=True)
class ModeVolume:
    """Effective mode volume in m^3 and, when requested, (lambda/n)^3 units."""

    cubic_meters: float
    normalized: float | None = None


def effective_mode_volume(field, wavelength_m=None, ref_index=None):
    """Energy-density mode volume of a sampled field.

    V = integral(eps |E|^2 dV) / max(eps |E|^2), evaluated as a cell sum.
    Passing wavelength_m and ref_index also reports V / (lambda/n)^3.
    """
    density = field.permittivity * field.intensity
    peak = float(density.max())
    if peak <= 0.0:
        raise DegenerateField("field carries no energy density")
    volume = float(np.sum(density * field.cell_volume_m3) / peak)
    normalized = None
    if wavelength_m is not None and ref_index is not None:
        if wavelength_m <= 0.0 or ref_index <= 0.0:
            raise DomainError("wavelength and index must be positive")
        normalized = volume / (wavelength_m / ref_index) ** 3
    return ModeVolume(cubic_meters=volume, normalized=normalized)


def max_purcell(quality, mode_volume_normalized):
    """Peak Purcell factor (3 / 4 pi^2) * Q / V, V in (lambda/n)^3 units."""
    if quality <= 0.0:
        raise DomainError("quality factor must be positive")
    if mode_volume_normalized <= 0.0:
        raise DomainError("mode volume must be positive")
    return 3.0 / (4.0 * math.pi ** 2) * quality / mode_volume_normalized
