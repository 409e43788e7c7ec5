"""Fleet alignment planning.

Each device carries an emitter tuned by a strain-cell voltage and a
cavity tuned by an electro-optic voltage, both linear in volts.  The
planner picks one operating wavelength that every emitter and every
cavity can reach within its voltage limits, optimizing either the
worst-case voltage magnitude or the worst-case margin to the limits.

Both objectives are piecewise linear in the target wavelength (a max or
min of affine voltage rays), so the optimum sits on an interval endpoint
or a crossing of two rays.  The planner enumerates those candidates and
is therefore exact, not iterative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cqed import EmitterCavityState, purcell_at_detuning
from .errors import DomainError, InfeasiblePlan

__all__ = ["WavelengthInterval", "DeviceTuningSpec", "DeviceSetting",
           "AlignmentPlan", "device_reach", "plan_alignment",
           "purcell_over_plan", "OBJECTIVES"]

OBJECTIVES = ("minimize_max_abs_voltage", "maximize_margin")


@dataclass(frozen=True)
class WavelengthInterval:
    """Closed wavelength interval in nm."""

    lo_nm: float
    hi_nm: float

    def __post_init__(self):
        if not (np.isfinite(self.lo_nm) and np.isfinite(self.hi_nm)):
            raise DomainError("interval bounds must be finite")
        if self.lo_nm > self.hi_nm:
            raise DomainError(
                f"interval [{self.lo_nm}, {self.hi_nm}] is reversed")

    @property
    def width_nm(self):
        return self.hi_nm - self.lo_nm

    def contains(self, wavelength_nm, atol_nm=0.0):
        return (self.lo_nm - atol_nm <= wavelength_nm
                <= self.hi_nm + atol_nm)

    def intersect(self, other):
        """Overlap with another interval, or None when disjoint."""
        lo = max(self.lo_nm, other.lo_nm)
        hi = min(self.hi_nm, other.hi_nm)
        if lo > hi:
            return None
        return WavelengthInterval(lo, hi)


@dataclass(frozen=True)
class DeviceTuningSpec:
    """Tuning capabilities of one emitter-cavity device.

    Wavelengths are the zero-bias positions; rates are signed pm/V.
    Voltage limits are inclusive and must bracket zero so the unbiased
    state is always legal.
    """

    name: str
    qd_wavelength_nm: float
    cavity_wavelength_nm: float
    strain_rate_pm_per_v: float
    eo_rate_pm_per_v: float
    strain_limits_v: tuple = (-500.0, 500.0)
    eo_limits_v: tuple = (-500.0, 500.0)

    def __post_init__(self):
        if not self.name:
            raise DomainError("device name must be non-empty")
        for label, rate in (("strain", self.strain_rate_pm_per_v),
                            ("eo", self.eo_rate_pm_per_v)):
            if not np.isfinite(rate) or rate == 0.0:
                raise DomainError(
                    f"{label} rate of {self.name!r} must be finite "
                    f"and non-zero")
        for label, (lo, hi) in (("strain", self.strain_limits_v),
                                ("eo", self.eo_limits_v)):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise DomainError(
                    f"{label} limits of {self.name!r} must be finite")
            if not lo <= 0.0 <= hi:
                raise DomainError(
                    f"{label} limits of {self.name!r} must bracket zero")
            if lo == hi:
                raise DomainError(
                    f"{label} limits of {self.name!r} are degenerate")

    def emitter_reach(self):
        """Wavelengths the emitter can be strained to."""
        return _reach(self.qd_wavelength_nm, self.strain_rate_pm_per_v,
                      self.strain_limits_v)

    def cavity_reach(self):
        """Wavelengths the cavity can be biased to."""
        return _reach(self.cavity_wavelength_nm, self.eo_rate_pm_per_v,
                      self.eo_limits_v)

    def strain_voltage_v(self, wavelength_nm):
        """Strain voltage that parks the emitter at wavelength_nm."""
        return (wavelength_nm - self.qd_wavelength_nm) * 1e3 \
            / self.strain_rate_pm_per_v

    def eo_voltage_v(self, wavelength_nm):
        """Electro-optic voltage that parks the cavity at wavelength_nm."""
        return (wavelength_nm - self.cavity_wavelength_nm) * 1e3 \
            / self.eo_rate_pm_per_v


def _reach(base_nm, rate_pm_per_v, limits_v):
    # a negative rate flips which voltage limit maps to which endpoint
    ends = sorted((base_nm + rate_pm_per_v * limits_v[0] * 1e-3,
                   base_nm + rate_pm_per_v * limits_v[1] * 1e-3))
    return WavelengthInterval(ends[0], ends[1])


def device_reach(device):
    """Wavelengths where one device can co-align emitter and cavity.

    Intersection of the emitter and cavity reaches; raises
    InfeasiblePlan when the device cannot self-align at any voltage.
    """
    overlap = device.emitter_reach().intersect(device.cavity_reach())
    if overlap is None:
        raise InfeasiblePlan(
            f"device {device.name!r}: emitter reach "
            f"{_fmt(device.emitter_reach())} and cavity reach "
            f"{_fmt(device.cavity_reach())} do not overlap")
    return overlap


def _fmt(interval):
    return f"[{interval.lo_nm:.6f}, {interval.hi_nm:.6f}] nm"


@dataclass(frozen=True)
class DeviceSetting:
    """Planned bias point of one device."""

    name: str
    strain_voltage_v: float
    eo_voltage_v: float


@dataclass(frozen=True)
class AlignmentPlan:
    """A common operating wavelength plus per-device voltages.

    feasible_lo/hi record the full window the fleet could have used;
    objective_value is worst-case |V| or worst-case margin in volts
    depending on the objective.
    """

    objective: str
    target_wavelength_nm: float
    objective_value: float
    feasible_lo_nm: float
    feasible_hi_nm: float
    settings: tuple


def _fleet_window(devices):
    window = None
    reaches = []
    for dev in devices:
        reach = dev.emitter_reach().intersect(dev.cavity_reach())
        reaches.append((dev, reach))
        if reach is None:
            window = None
            break
        window = reach if window is None else window.intersect(reach)
        if window is None:
            break
    if window is None:
        lines = []
        for dev, reach in reaches:
            own = _fmt(reach) if reach is not None else "empty"
            lines.append(
                f"{dev.name}: emitter {_fmt(dev.emitter_reach())},"
                f" cavity {_fmt(dev.cavity_reach())}, joint {own}")
        raise InfeasiblePlan(
            "no wavelength is reachable by every device; per-device "
            "reaches: " + "; ".join(lines))
    return window


def _voltage_rays(devices):
    """Affine voltage functions V(lam) = slope * lam + offset, labeled."""
    rays = []
    for dev in devices:
        for base, rate, limits, knob in (
                (dev.qd_wavelength_nm, dev.strain_rate_pm_per_v,
                 dev.strain_limits_v, "strain"),
                (dev.cavity_wavelength_nm, dev.eo_rate_pm_per_v,
                 dev.eo_limits_v, "eo")):
            slope = 1e3 / rate
            offset = -base * slope
            rays.append((slope, offset, limits, dev.name, knob))
    return rays


def _candidates(lines, window):
    """Endpoints plus all pairwise crossings of affine lines."""
    cands = [window.lo_nm, window.hi_nm]
    n = len(lines)
    for i in range(n):
        a1, b1 = lines[i]
        for j in range(i + 1, n):
            a2, b2 = lines[j]
            if a1 == a2:
                continue
            lam = (b2 - b1) / (a1 - a2)
            if window.contains(lam):
                cands.append(lam)
    return cands


def plan_alignment(devices, objective="minimize_max_abs_voltage"):
    """Pick the common operating wavelength for a fleet of devices.

    minimize_max_abs_voltage minimizes the largest |voltage| any knob
    needs; maximize_margin maximizes the smallest remaining distance to
    any voltage limit.  Ties prefer the smallest wavelength.  Raises
    InfeasiblePlan with per-device reach diagnostics when no common
    wavelength exists.
    """
    devices = tuple(devices)
    if not devices:
        raise DomainError("fleet must contain at least one device")
    names = [d.name for d in devices]
    if len(set(names)) != len(names):
        raise DomainError("device names must be unique")
    if objective not in OBJECTIVES:
        raise DomainError(
            f"objective must be one of {OBJECTIVES}, got {objective!r}")

    window = _fleet_window(devices)
    rays = _voltage_rays(devices)

    if objective == "minimize_max_abs_voltage":
        # |V| is the max of the two signed rays, so the objective is a
        # max over 4 n affine lines: convex, minimized at a breakpoint
        lines = []
        for slope, offset, _, _, _ in rays:
            lines.append((slope, offset))
            lines.append((-slope, -offset))

        def score(lam):
            return max(a * lam + b for a, b in lines)

        better = min
    else:
        # margin to the limits is a min over 4 n affine lines: concave,
        # maximized at a breakpoint
        lines = []
        for slope, offset, (lo, hi), _, _ in rays:
            lines.append((slope, offset - lo))    # V - lo
            lines.append((-slope, hi - offset))   # hi - V
        def score(lam):
            return min(a * lam + b for a, b in lines)

        better = max

    # ascending candidates with strict improvement: ties keep the
    # smallest wavelength
    best_lam = None
    best_val = None
    for lam in sorted(set(_candidates(lines, window))):
        val = score(lam)
        if best_val is None or better(val, best_val) != best_val:
            best_lam, best_val = lam, val

    settings = tuple(
        DeviceSetting(name=dev.name,
                      strain_voltage_v=dev.strain_voltage_v(best_lam),
                      eo_voltage_v=dev.eo_voltage_v(best_lam))
        for dev in devices)
    return AlignmentPlan(
        objective=objective,
        target_wavelength_nm=best_lam,
        objective_value=best_val,
        feasible_lo_nm=window.lo_nm,
        feasible_hi_nm=window.hi_nm,
        settings=settings,
    )


def purcell_over_plan(plan, devices, states, detuning_tolerance_nm=None):
    """Validate a plan against devices and score each with its cavity.

    devices and states are keyed by device name (states hold the cavity
    linewidth and peak enhancement).  Checks that every planned voltage
    respects its limits and that the achieved emitter-cavity offset
    stays inside detuning_tolerance_nm (default: that device's cavity
    linewidth / 10).  Returns {name: Purcell factor at the achieved
    offset}.  Raises InfeasiblePlan listing every violation.
    """
    by_name = {d.name: d for d in devices}
    if set(by_name) != {s.name for s in plan.settings}:
        raise DomainError("plan and device list name different devices")
    missing = set(by_name) - set(states)
    if missing:
        raise DomainError(f"states missing for {sorted(missing)}")

    problems = []
    scores = {}
    for setting in plan.settings:
        dev = by_name[setting.name]
        state = states[setting.name]
        if not isinstance(state, EmitterCavityState):
            raise DomainError(
                f"state of {setting.name!r} must be an EmitterCavityState")
        for label, volts, (lo, hi) in (
                ("strain", setting.strain_voltage_v, dev.strain_limits_v),
                ("eo", setting.eo_voltage_v, dev.eo_limits_v)):
            if not lo - 1e-9 <= volts <= hi + 1e-9:
                problems.append(
                    f"{setting.name}: {label} voltage {volts:.3f} V "
                    f"outside [{lo:g}, {hi:g}] V")
        achieved_qd = dev.qd_wavelength_nm \
            + dev.strain_rate_pm_per_v * setting.strain_voltage_v * 1e-3
        achieved_cav = dev.cavity_wavelength_nm \
            + dev.eo_rate_pm_per_v * setting.eo_voltage_v * 1e-3
        offset = achieved_qd - achieved_cav
        tol = detuning_tolerance_nm
        if tol is None:
            tol = state.cavity_linewidth_nm / 10.0
        if abs(offset) > tol:
            problems.append(
                f"{setting.name}: residual emitter-cavity offset "
                f"{offset:.6f} nm exceeds {tol:.6f} nm")
        scores[setting.name] = purcell_at_detuning(state, offset)
    if problems:
        raise InfeasiblePlan("; ".join(problems))
    return scores
