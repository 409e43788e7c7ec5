"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Every kernel exists twice with identical semantics: a scalar-loop version
compiled with ``numba.njit`` and a vectorized numpy version.  The active
backend is chosen once at import time:

* ``RINGQED_NO_NUMBA=1`` in the environment forces the numpy path,
* otherwise numba is used when it imports cleanly, numpy when it does not.

``backend()`` reports which path is live; ``IMPL_NUMPY`` / ``IMPL_NUMBA``
expose both families for equivalence tests and benchmarks.  Results agree
to floating-point roundoff (see tests), so swapping backends never changes
physics, only speed.

All kernels are pure functions of their arguments.  Spectrum evaluation is
independent per wavelength point, so any partitioning of the input grid
reproduces identical bits.
"""

import math
import os

import numpy as np
from scipy.special import erfc as _sp_erfc
from scipy.special import erfcx as _sp_erfcx

_SQRT2 = math.sqrt(2.0)

_env_flag = os.environ.get("RINGQED_NO_NUMBA", "").strip().lower()
_numba_disabled = _env_flag not in ("", "0", "false", "no")

HAS_NUMBA = False
if not _numba_disabled:
    try:
        import numba

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - depends on environment
        HAS_NUMBA = False


# ---------------------------------------------------------------------------
# numpy implementations (vectorized)
# ---------------------------------------------------------------------------

def _allpass_transmission_np(wavelength_m, group_index, total_length_m,
                             self_coupling, round_trip_amplitude):
    """All-pass ring power transmission on a wavelength grid.

    T = (a^2 - 2 a t cos(phi) + t^2) / (1 - 2 a t cos(phi) + (a t)^2)
    with round-trip phase phi = 2 pi n_g L / lambda.
    """
    lam = np.asarray(wavelength_m, dtype=np.float64)
    a = round_trip_amplitude
    t = self_coupling
    phi = 2.0 * np.pi * group_index * total_length_m / lam
    c = np.cos(phi)
    at = a * t
    return (a * a - 2.0 * at * c + t * t) / (1.0 - 2.0 * at * c + at * at)


def _decay_profile_np(shifted_ns, rate_per_ns, sigma_ns):
    """IRF-convolved exponential decay: density and cumulative.

    For s = t - t0, the density is the convolution of exp(-rate*s)*step(s)
    with a unit-area Gaussian of width sigma:

        c(s)  = 0.5 * exp(rate*(rate*sigma^2/2 - s)) * erfc(u)
        u     = (rate*sigma^2 - s) / (sigma*sqrt(2))
        C(s)  = (Phi(s/sigma) - c(s)) / rate          (cumulative integral)

    For u > 0 the equivalent form 0.5*erfcx(u)*exp(-s^2/(2 sigma^2)) is used
    to avoid overflow.  sigma == 0 reduces to the bare exponential.
    Returns (density, cumulative) evaluated at each shifted time.
    """
    s = np.asarray(shifted_ns, dtype=np.float64)
    r = rate_per_ns
    if sigma_ns == 0.0:
        dens = np.where(s >= 0.0, np.exp(-np.minimum(r * s, 745.0)), 0.0)
        cum = np.where(s >= 0.0, (1.0 - dens) / r, 0.0)
        return dens, cum
    sig = sigma_ns
    u = (r * sig * sig - s) / (sig * _SQRT2)
    neg = u <= 0.0
    # u <= 0 implies exponent <= -r^2 sig^2 / 2, always safe
    expo = r * (0.5 * r * sig * sig - s)
    dens_neg = 0.5 * np.exp(np.where(neg, expo, 0.0)) * _sp_erfc(np.where(neg, u, 0.0))
    u_pos = np.where(neg, 0.0, u)
    dens_pos = 0.5 * _sp_erfcx(u_pos) * np.exp(-0.5 * (s / sig) ** 2)
    dens = np.where(neg, dens_neg, dens_pos)
    phi = 0.5 * _sp_erfc(-s / (sig * _SQRT2))
    cum = (phi - dens) / r
    return dens, cum


def _g2_comb_np(edges_ns, period_ns, lifetime_ns, n_side, side_area,
                central_area):
    """Bin-integrated pulsed correlation comb.

    Peaks are unit-area two-sided exponentials (1/(2 tau)) exp(-|t-kT|/tau)
    at k = -n_side..n_side, scaled by central_area at k = 0 and side_area
    elsewhere.  Returns exact integrals over each [edge_i, edge_i+1).
    """
    edges = np.asarray(edges_ns, dtype=np.float64)
    tau = lifetime_ns
    ks = np.arange(-n_side, n_side + 1)
    x = edges[None, :] - ks[:, None] * period_ns  # (peaks, edges)
    cdf = np.where(x < 0.0, 0.5 * np.exp(x / tau),
                   1.0 - 0.5 * np.exp(-np.abs(x) / tau))
    areas = np.where(ks == 0, central_area, side_area)
    per_peak = cdf[:, 1:] - cdf[:, :-1]
    return (areas[:, None] * per_peak).sum(axis=0)


# ---------------------------------------------------------------------------
# numba implementations (scalar loops, same math)
# ---------------------------------------------------------------------------

def _allpass_transmission_loop(wavelength_m, group_index, total_length_m,
                               self_coupling, round_trip_amplitude):
    n = wavelength_m.size
    out = np.empty(n, dtype=np.float64)
    a = round_trip_amplitude
    t = self_coupling
    at = a * t
    opl = 2.0 * np.pi * group_index * total_length_m
    for i in range(n):
        c = math.cos(opl / wavelength_m[i])
        out[i] = (a * a - 2.0 * at * c + t * t) / (1.0 - 2.0 * at * c + at * at)
    return out


def _erfcx_pos(u):
    # scaled complementary error function for u > 0 only
    if u > 25.0:
        iu2 = 1.0 / (u * u)
        series = 1.0 + iu2 * (-0.5 + iu2 * (0.75 + iu2 * (-1.875 + iu2 * 6.5625)))
        return series / (u * math.sqrt(math.pi))
    return math.exp(u * u) * math.erfc(u)


def _decay_profile_loop(shifted_ns, rate_per_ns, sigma_ns):
    n = shifted_ns.size
    dens = np.empty(n, dtype=np.float64)
    cum = np.empty(n, dtype=np.float64)
    r = rate_per_ns
    sig = sigma_ns
    if sig == 0.0:
        for i in range(n):
            s = shifted_ns[i]
            if s >= 0.0:
                e = math.exp(-min(r * s, 745.0))
                dens[i] = e
                cum[i] = (1.0 - e) / r
            else:
                dens[i] = 0.0
                cum[i] = 0.0
        return dens, cum
    for i in range(n):
        s = shifted_ns[i]
        u = (r * sig * sig - s) / (sig * _SQRT2)
        if u <= 0.0:
            d = 0.5 * math.exp(r * (0.5 * r * sig * sig - s)) * math.erfc(u)
        else:
            d = 0.5 * _erfcx_pos(u) * math.exp(-0.5 * (s / sig) * (s / sig))
        phi = 0.5 * math.erfc(-s / (sig * _SQRT2))
        dens[i] = d
        cum[i] = (phi - d) / r
    return dens, cum


def _g2_comb_loop(edges_ns, period_ns, lifetime_ns, n_side, side_area,
                  central_area):
    nb = edges_ns.size - 1
    out = np.zeros(nb, dtype=np.float64)
    tau = lifetime_ns
    for k in range(-n_side, n_side + 1):
        area = central_area if k == 0 else side_area
        shift = k * period_ns
        x = edges_ns[0] - shift
        if x < 0.0:
            prev = 0.5 * math.exp(x / tau)
        else:
            prev = 1.0 - 0.5 * math.exp(-x / tau)
        for i in range(nb):
            x = edges_ns[i + 1] - shift
            if x < 0.0:
                cur = 0.5 * math.exp(x / tau)
            else:
                cur = 1.0 - 0.5 * math.exp(-x / tau)
            out[i] += area * (cur - prev)
            prev = cur
    return out


IMPL_NUMPY = {
    "allpass_transmission": _allpass_transmission_np,
    "decay_profile": _decay_profile_np,
    "g2_comb": _g2_comb_np,
}

IMPL_NUMBA = None
if HAS_NUMBA:
    _jit = numba.njit(cache=True, fastmath=False)
    _erfcx_pos = _jit(_erfcx_pos)
    IMPL_NUMBA = {
        "allpass_transmission": _jit(_allpass_transmission_loop),
        "decay_profile": _jit(_decay_profile_loop),
        "g2_comb": _jit(_g2_comb_loop),
    }

_ACTIVE = IMPL_NUMBA if HAS_NUMBA else IMPL_NUMPY


def backend():
    """Name of the live kernel backend, 'numba' or 'numpy'."""
    return "numba" if _ACTIVE is IMPL_NUMBA else "numpy"


def _as_c_f64(x):
    return np.ascontiguousarray(np.asarray(x, dtype=np.float64))


def allpass_transmission(wavelength_m, group_index, total_length_m,
                         self_coupling, round_trip_amplitude):
    return _ACTIVE["allpass_transmission"](
        _as_c_f64(wavelength_m), float(group_index), float(total_length_m),
        float(self_coupling), float(round_trip_amplitude))


def decay_profile(shifted_ns, rate_per_ns, sigma_ns):
    return _ACTIVE["decay_profile"](
        _as_c_f64(shifted_ns), float(rate_per_ns), float(sigma_ns))


def g2_comb(edges_ns, period_ns, lifetime_ns, n_side, side_area,
            central_area):
    return _ACTIVE["g2_comb"](
        _as_c_f64(edges_ns), float(period_ns), float(lifetime_ns),
        int(n_side), float(side_area), float(central_area))
