"""Voltage -> field -> strain -> emission-shift chain for the printed dot.

The chain follows the linear piezo/deformation-potential model:

* an electrode pair at gap g turns voltage V into a field V/g along the
  in-plane polar axis of the film,
* the film's piezoelectric tensor (device frame) and the host compliance
  give the engineering strain, scaled by the mechanical clamping factor,
* hydrostatic plus shear deformation potentials give the transition-energy
  shift, converted to a wavelength shift at the emission line.

SI units throughout (m, V/m, Pa, eV); the calibrated tuning path speaks
pm/V at its interface.  Strain components are validated against the
linear-response bound |eps| < 1e-2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError, StrainOutOfRange, VoltageLimitExceeded
from .materials import rotate_piezo_to_xcut

__all__ = [
    "STRAIN_VALIDITY_BOUND",
    "MechanicalContext", "StrainState", "TuningCalibration",
    "field_from_voltage", "strain_from_field", "pikus_bir_shift",
    "wavelength_shift", "tuning_curve", "predicted_tuning_rate",
]

STRAIN_VALIDITY_BOUND = 1e-2

# hc/e in eV*m: converts between transition energy and vacuum wavelength
_HC_EV_M = constants.h * constants.c / constants.e


@dataclass(frozen=True)
class MechanicalContext:
    """How the film is anchored under the electrodes.

    clamping_factor is the ratio of strain transfer relative to the
    oxide-clamped reference geometry (1.0); a released membrane responds
    several times more strongly.
    """

    clamping_factor: float = 1.0
    label: str = "clamped"

    def __post_init__(self):
        if self.clamping_factor < 1.0:
            raise DomainError("clamping factor must be >= 1")


@dataclass(frozen=True)
class StrainState:
    """Engineering Voigt strain (11, 22, 33, 2*23, 2*13, 2*12)."""

    voigt: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.voigt, dtype=np.float64)
        if v.shape != (6,):
            raise DomainError("strain must be a Voigt 6-vector")
        if np.any(np.abs(v) >= STRAIN_VALIDITY_BOUND):
            raise StrainOutOfRange(
                f"strain exceeds the linear-response bound "
                f"{STRAIN_VALIDITY_BOUND:g}")
        object.__setattr__(self, "voigt", v)

    @property
    def hydrostatic(self):
        """Trace eps_xx + eps_yy + eps_zz."""
        return float(self.voigt[0] + self.voigt[1] + self.voigt[2])


def field_from_voltage(voltage_v, gap_m, direction=(0.0, 0.0, 1.0)):
    """Uniform electrode field, V/m, as a device-frame 3-vector.

    direction defaults to the device z axis (the film's in-plane polar
    axis under the x-cut convention).
    """
    if gap_m <= 0.0:
        raise DomainError("electrode gap must be positive")
    d = np.asarray(direction, dtype=np.float64)
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise DomainError("field direction must be nonzero")
    return (voltage_v / gap_m) * (d / norm)


def strain_from_field(field_v_per_m, piezo_device, compliance, context=None):
    """Engineering strain induced in the host by the film's piezo stress.

    eps = -k * S . (e^T . F): the transposed 3x6 piezo tensor turns the
    field into a Voigt stress, the host compliance maps it to strain, and
    the mechanical context scales the transfer.  Raises StrainOutOfRange
    outside the linear-response bound.
    """
    if context is None:
        context = MechanicalContext()
    f = np.asarray(field_v_per_m, dtype=np.float64)
    if f.shape != (3,):
        raise DomainError("field must be a 3-vector")
    e = np.asarray(piezo_device, dtype=np.float64)
    stress = e.T @ f  # Voigt, Pa
    voigt = -context.clamping_factor * (compliance.matrix @ stress)
    return StrainState(voigt=voigt)


def pikus_bir_shift(strain, potentials):
    """Transition-energy shift (eV) of the emitter under a strain state.

    hydro = (a_c + a_v) * tr(eps); the shear part combines the tetragonal
    and rhombohedral terms

        Q = -b/2 * (e_xx + e_yy - 2 e_zz)
        |R|^2 = 3/4 b^2 (e_xx - e_yy)^2 + d^2 e_xy^2

    and lowers the transition as -sqrt(Q^2 + |R|^2).  Degree-1 homogeneous
    in the strain, so doubling the field doubles the shift.
    """
    v = strain.voigt
    e_xx, e_yy, e_zz = v[0], v[1], v[2]
    e_xy = 0.5 * v[5]  # engineering -> tensor shear
    hydro = (potentials.a_c + potentials.a_v) * (e_xx + e_yy + e_zz)
    q = -0.5 * potentials.b * (e_xx + e_yy - 2.0 * e_zz)
    r_sq = 0.75 * potentials.b ** 2 * (e_xx - e_yy) ** 2 \
        + potentials.d ** 2 * e_xy ** 2
    return hydro - math.sqrt(q * q + r_sq)


def wavelength_shift(delta_e_ev, center_wavelength_m):
    """First-order wavelength shift (m) for an energy shift at a line.

    delta_lambda = -lambda^2 dE / (h c); a positive (blue) energy shift
    moves the line to shorter wavelength.
    """
    if center_wavelength_m <= 0.0:
        raise DomainError("center wavelength must be positive")
    return -center_wavelength_m ** 2 * delta_e_ev / _HC_EV_M


@dataclass(frozen=True)
class TuningCalibration:
    """Calibrated strain-tuning response of one device.

    rate_pm_per_v is the measured clamped-reference slope (signed; the
    fabricated devices blue-shift under positive bias, giving a negative
    slope).  clamping_factor rescales it for released geometries; the
    effective slope is their product.  Unmodeled transfer efficiency is
    absorbed into the calibration.
    """

    base_wavelength_m: float
    rate_pm_per_v: float
    clamping_factor: float = 1.0
    voltage_min_v: float = -500.0
    voltage_max_v: float = 500.0
    electrode_gap_m: float = 5e-6

    def __post_init__(self):
        if self.base_wavelength_m <= 0.0:
            raise DomainError("base wavelength must be positive")
        if self.clamping_factor < 1.0:
            raise DomainError("clamping factor must be >= 1")
        if self.voltage_min_v >= self.voltage_max_v:
            raise DomainError("voltage limits must satisfy min < max")
        if self.electrode_gap_m <= 0.0:
            raise DomainError("electrode gap must be positive")

    @property
    def effective_rate_pm_per_v(self):
        return self.rate_pm_per_v * self.clamping_factor


def tuning_curve(calibration, voltages_v):
    """Emission wavelength versus applied voltage, list of (V, lambda_m).

    Strictly linear: lambda(V) = lambda0 + rate_eff * V with the effective
    calibrated slope.  Raises VoltageLimitExceeded outside the device
    limits.
    """
    volts = np.asarray(voltages_v, dtype=np.float64)
    if volts.ndim == 0:
        volts = volts[None]
    lo, hi = calibration.voltage_min_v, calibration.voltage_max_v
    if np.any(volts < lo) or np.any(volts > hi):
        raise VoltageLimitExceeded(
            f"voltages outside the device limits [{lo:g}, {hi:g}] V")
    slope_m_per_v = calibration.effective_rate_pm_per_v * 1e-12
    return [(float(v), calibration.base_wavelength_m + slope_m_per_v * float(v))
            for v in volts]


def predicted_tuning_rate(database, gap_m, center_wavelength_m,
                          clamping_factor=1.0, frame=None,
                          direction=(0.0, 0.0, 1.0)):
    """Ideal-transfer tuning-rate prediction, pm/V, from the full chain.

    Composes field_from_voltage, strain_from_field, pikus_bir_shift and
    wavelength_shift at +1 V.  The shear term makes the chain piecewise
    linear about V = 0, so this is the positive-bias slope.  Measured
    devices respond more weakly (interface transfer is not modeled); the
    calibrated path in tuning_curve is the one tied to data.
    """
    e_dev = rotate_piezo_to_xcut(database.film_piezo_zcut.matrix, frame)
    field = field_from_voltage(1.0, gap_m, direction)
    state = strain_from_field(field, e_dev, database.host_compliance,
                              MechanicalContext(
                                  clamping_factor=clamping_factor,
                                  label="predicted"))
    shift_ev = pikus_bir_shift(state, database.host_potentials)
    return wavelength_shift(shift_ev, center_wavelength_m) / 1e-12
