"""Shipped fit models with analytic Jacobians.

Every model provides `predict(x, p, consts)` and `jacobian(x, p, consts)`
with parameters in a fixed documented order.  Jacobians are exact
derivatives (validated against central finite differences in the test
suite); none of the fitters ever falls back to numeric differentiation.

The decay model consumes bin edges and returns bin-integrated counts, so
fitting synthetic histograms back is exact in the noiseless limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels

__all__ = ["ModelSpec", "MODELS", "model_names"]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ModelSpec:
    """Model function bundle: names, prediction, Jacobian."""

    name: str
    param_names: tuple
    predict: object
    jacobian: object
    x_is_edges: bool = False  # x carries n+1 bin edges for n samples


# -- polynomial -------------------------------------------------------------

def _linear_predict(x, p, consts):
    return p[0] + p[1] * x


def _linear_jac(x, p, consts):
    j = np.empty((x.size, 2))
    j[:, 0] = 1.0
    j[:, 1] = x
    return j


def _quadratic_predict(x, p, consts):
    return p[0] + (p[1] + p[2] * x) * x


def _quadratic_jac(x, p, consts):
    j = np.empty((x.size, 3))
    j[:, 0] = 1.0
    j[:, 1] = x
    j[:, 2] = x * x
    return j


# -- Lorentzian dip / peak --------------------------------------------------
# dip:  f = baseline - depth  / (1 + (2 (x - center) / fwhm)^2)
# peak: f = baseline + height / (1 + (2 (x - center) / fwhm)^2)

def _lorentz_parts(x, center, fwhm):
    z = 2.0 * (x - center) / fwhm
    u = 1.0 / (1.0 + z * z)
    return z, u


def _lorentzian_dip_predict(x, p, consts):
    _, u = _lorentz_parts(x, p[2], p[3])
    return p[0] - p[1] * u


def _lorentzian_dip_jac(x, p, consts):
    depth, center, fwhm = p[1], p[2], p[3]
    z, u = _lorentz_parts(x, center, fwhm)
    u2 = u * u
    j = np.empty((x.size, 4))
    j[:, 0] = 1.0
    j[:, 1] = -u
    j[:, 2] = -depth * u2 * 4.0 * z / fwhm
    j[:, 3] = -depth * u2 * 2.0 * z * z / fwhm
    return j


def _lorentzian_peak_predict(x, p, consts):
    _, u = _lorentz_parts(x, p[2], p[3])
    return p[0] + p[1] * u


def _lorentzian_peak_jac(x, p, consts):
    height, center, fwhm = p[1], p[2], p[3]
    z, u = _lorentz_parts(x, center, fwhm)
    u2 = u * u
    j = np.empty((x.size, 4))
    j[:, 0] = 1.0
    j[:, 1] = u
    j[:, 2] = height * u2 * 4.0 * z / fwhm
    j[:, 3] = height * u2 * 2.0 * z * z / fwhm
    return j


# -- IRF-convolved exponential decay (bin integrated) -----------------------
# params: amplitude, rate (1/ns), t0 (ns); constant: irf_sigma_ns.
# counts_i = A (C(e_{i+1}) - C(e_i)) with C the cumulative of the Gaussian
# (x) one-sided-exponential convolution; see kernels.decay_profile.

def _decay_terms(edges, rate, t0, sigma):
    s = edges - t0
    dens, cum = kernels.decay_profile(s, rate, sigma)
    if sigma > 0.0:
        gauss = np.exp(-0.5 * (s / sigma) ** 2) / (sigma * _SQRT_2PI)
    else:
        gauss = np.zeros_like(s)
    # d/d(rate) of the density, then of the cumulative
    ddens = (rate * sigma * sigma - s) * dens - sigma * sigma * gauss
    dcum = -(cum + ddens) / rate
    return dens, cum, dcum


def _exp_decay_irf_predict(edges, p, consts):
    amp, rate, t0 = p
    _, cum = kernels.decay_profile(edges - t0, rate,
                                   consts["irf_sigma_ns"])
    return amp * np.diff(cum)


def _exp_decay_irf_jac(edges, p, consts):
    amp, rate, t0 = p
    dens, cum, dcum = _decay_terms(edges, rate, t0, consts["irf_sigma_ns"])
    j = np.empty((edges.size - 1, 3))
    j[:, 0] = np.diff(cum)
    j[:, 1] = amp * np.diff(dcum)
    j[:, 2] = -amp * np.diff(dens)
    return j


# -- concentric double Gaussian ---------------------------------------------
# params: center, amp1, sigma1, amp2, sigma2.  Used for correlation-peak
# areas: integral = sqrt(2 pi) (amp1 sigma1 + amp2 sigma2).

def _double_gaussian_predict(x, p, consts):
    c, a1, s1, a2, s2 = p
    d = x - c
    return a1 * np.exp(-0.5 * (d / s1) ** 2) + a2 * np.exp(-0.5 * (d / s2) ** 2)


def _double_gaussian_jac(x, p, consts):
    c, a1, s1, a2, s2 = p
    d = x - c
    g1 = np.exp(-0.5 * (d / s1) ** 2)
    g2 = np.exp(-0.5 * (d / s2) ** 2)
    j = np.empty((x.size, 5))
    j[:, 0] = a1 * g1 * d / (s1 * s1) + a2 * g2 * d / (s2 * s2)
    j[:, 1] = g1
    j[:, 2] = a1 * g1 * d * d / (s1 ** 3)
    j[:, 3] = g2
    j[:, 4] = a2 * g2 * d * d / (s2 ** 3)
    return j


MODELS = {
    "linear": ModelSpec(
        name="linear", param_names=("intercept", "slope"),
        predict=_linear_predict, jacobian=_linear_jac),
    "quadratic": ModelSpec(
        name="quadratic", param_names=("c0", "c1", "c2"),
        predict=_quadratic_predict, jacobian=_quadratic_jac),
    "lorentzian_dip": ModelSpec(
        name="lorentzian_dip",
        param_names=("baseline", "depth", "center", "fwhm"),
        predict=_lorentzian_dip_predict, jacobian=_lorentzian_dip_jac),
    "lorentzian_peak": ModelSpec(
        name="lorentzian_peak",
        param_names=("baseline", "height", "center", "fwhm"),
        predict=_lorentzian_peak_predict, jacobian=_lorentzian_peak_jac),
    "exp_decay_irf": ModelSpec(
        name="exp_decay_irf",
        param_names=("amplitude", "rate_per_ns", "t0_ns"),
        predict=_exp_decay_irf_predict, jacobian=_exp_decay_irf_jac,
        x_is_edges=True),
    "double_gaussian": ModelSpec(
        name="double_gaussian",
        param_names=("center", "amp1", "sigma1", "amp2", "sigma2"),
        predict=_double_gaussian_predict, jacobian=_double_gaussian_jac),
}


def model_names():
    return tuple(MODELS)
