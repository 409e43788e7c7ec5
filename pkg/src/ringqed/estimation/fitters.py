"""The four measurement fitters.

fit_resonance    transmission dips -> center, FWHM, Q, extinction, FSR
fit_decay        decay histograms  -> IRF-deconvolved rate and amplitude
fit_tuning_rate  (V, wavelength)   -> pm/V slope with linear/quadratic
                                      model selection
fit_g2_purity    correlation comb  -> central/side area ratio

All four run on the analytic-Jacobian engine; counted data always carries
Poisson weights sigma = sqrt(max(counts, 1)).  Every routine is
deterministic for identical inputs.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.signal import find_peaks

from ..errors import (DegenerateAbscissa, InsufficientData,
                      InsufficientDynamicRange, NoResonanceFound,
                      PeakDetectionFailure)
from .engine import FitOptions, FitReport, PeakModel, least_squares
from .models import MODELS

__all__ = ["fit_resonance", "fit_all_resonances", "fit_decay",
           "fit_tuning_rate", "fit_g2_purity"]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _propagated_sigma(cov, index_grads):
    """Variance of a derived scalar from a covariance and sparse gradient."""
    if cov is None:
        return None
    g = np.zeros(cov.shape[0])
    for idx, val in index_grads:
        g[idx] = val
    var = float(g @ cov @ g)
    return math.sqrt(var) if var > 0.0 else 0.0


# ---------------------------------------------------------------------------
# resonances
# ---------------------------------------------------------------------------

def _noise_floor(values):
    # robust sigma from successive differences; immune to slow structure
    d = np.diff(values)
    return 1.4826 * float(np.median(np.abs(d))) / math.sqrt(2.0)


def _detect_dips(spectrum):
    lam = spectrum.wavelength_nm
    v = spectrum.values
    if v.size < 16:
        raise NoResonanceFound("spectrum too short for dip detection")
    baseline = float(np.percentile(v, 90.0))
    noise = _noise_floor(v)
    # detect on a lightly smoothed trace so single-sample noise spikes do
    # not qualify; genuine dips span many samples and survive untouched
    kernel = np.ones(3) / 3.0
    smooth = np.convolve(v, kernel, mode="same")
    floor_abs = 1e-9 * max(abs(baseline), 1.0)
    # 5 sigma: a dense trace has thousands of chances for a noise
    # excursion, and 3 sigma wiggles do get through at that count
    threshold = max(5.0 * noise, floor_abs)
    idx, _ = find_peaks(-smooth, prominence=threshold, width=2)
    depths = baseline - v[idx]
    idx = idx[depths >= threshold]
    if idx.size == 0:
        raise NoResonanceFound(
            "no dip exceeds five times the noise floor")
    return idx, baseline, noise, lam, v


def _fwhm_scan(lam, v, idx, baseline):
    """Half-depth crossing walk around a dip sample."""
    half_level = baseline - 0.5 * (baseline - v[idx])
    left = idx
    while left > 0 and v[left] < half_level:
        left -= 1
    right = idx
    n = v.size
    while right < n - 1 and v[right] < half_level:
        right += 1
    width = lam[right] - lam[left]
    step = float(np.median(np.diff(lam)))
    return max(width, 2.0 * step)


def fit_all_resonances(spectrum, options=None):
    """Windowed Lorentzian fits of every detected transmission dip.

    Returns one FitReport per dip, sorted by center wavelength, each with
    parameters baseline, depth, center_nm, fwhm_nm, q_factor, extinction.
    Raises NoResonanceFound when nothing clears the detection threshold or
    when every detected window fails to converge; a single bad window (a
    noise excursion that slipped past detection) is dropped, not fatal.
    """
    options = options or FitOptions()
    window_options = dataclasses.replace(options, strict=False)
    idx_all, baseline, _, lam, v = _detect_dips(spectrum)
    step = float(np.median(np.diff(lam)))
    span = lam[-1] - lam[0]
    reports = []
    for idx in idx_all:
        width0 = _fwhm_scan(lam, v, idx, baseline)
        center0 = float(lam[idx])
        half = max(3.0 * width0, 10.0 * step)
        mask = np.abs(lam - center0) <= half
        if mask.sum() < 8:
            lo_i = max(idx - 12, 0)
            mask = np.zeros_like(lam, dtype=bool)
            mask[lo_i:idx + 13] = True
        x = lam[mask]
        y = v[mask]
        depth0 = max(baseline - float(v[idx]), 1e-12)
        model = PeakModel(
            kind="lorentzian_dip",
            initial_guess={"baseline": baseline, "depth": depth0,
                           "center": center0, "fwhm": width0},
            bounds={"depth": (1e-12, 10.0 * max(depth0, abs(baseline))),
                    "center": (float(x[0]), float(x[-1])),
                    "fwhm": (step, 2.0 * span)},
        )
        report = least_squares(model, (x, y, None), window_options)
        if not report.converged:
            continue
        pars = report.parameters
        center = pars["center"]
        fwhm = pars["fwhm"]
        q = center / fwhm
        extinction = pars["depth"] / pars["baseline"]
        cov = report.covariance
        q_sigma = _propagated_sigma(
            cov, [(2, 1.0 / fwhm), (3, -center / fwhm ** 2)])
        ext_sigma = _propagated_sigma(
            cov, [(0, -pars["depth"] / pars["baseline"] ** 2),
                  (1, 1.0 / pars["baseline"])])
        ordered = {
            "center_nm": center,
            "fwhm_nm": fwhm,
            "q_factor": q,
            "extinction": extinction,
            "baseline": pars["baseline"],
            "depth": pars["depth"],
        }
        errors = None
        if report.standard_errors is not None:
            se = report.standard_errors
            errors = {
                "center_nm": se["center"],
                "fwhm_nm": se["fwhm"],
                "q_factor": q_sigma if q_sigma is not None else 0.0,
                "extinction": ext_sigma if ext_sigma is not None else 0.0,
                "baseline": se["baseline"],
                "depth": se["depth"],
            }
        reports.append(FitReport(
            model_id="lorentzian_dip",
            parameters=ordered,
            standard_errors=errors,
            residual_norm=report.residual_norm,
            iterations=report.iterations,
            converged=report.converged,
            fitted_names=report.fitted_names,
            covariance=cov,
        ))
    if not reports:
        raise NoResonanceFound("no detected dip survived its window fit")
    reports.sort(key=lambda r: r.parameters["center_nm"])
    return reports


def fit_resonance(spectrum, options=None):
    """Primary-resonance report: the deepest dip, plus comb statistics.

    parameters carry center_nm, fwhm_nm, q_factor, extinction of the
    deepest dip and, when several dips are present, fsr_nm (mean adjacent
    spacing) and n_resonances.
    """
    reports = fit_all_resonances(spectrum, options)
    primary = max(reports, key=lambda r: r.parameters["depth"])
    parameters = dict(primary.parameters)
    parameters["n_resonances"] = float(len(reports))
    if len(reports) >= 2:
        centers = np.array([r.parameters["center_nm"] for r in reports])
        parameters["fsr_nm"] = float(np.mean(np.diff(centers)))
    return FitReport(
        model_id=primary.model_id,
        parameters=parameters,
        standard_errors=primary.standard_errors,
        residual_norm=primary.residual_norm,
        iterations=primary.iterations,
        converged=primary.converged,
        fitted_names=primary.fitted_names,
        covariance=primary.covariance,
    )


# ---------------------------------------------------------------------------
# decay
# ---------------------------------------------------------------------------

def fit_decay(histogram, options=None):
    """IRF-deconvolved exponential-decay fit of a DecayHistogram.

    The IRF width rides on the histogram; fitted parameters are amplitude,
    rate_per_ns and t0_ns, with lifetime_ns derived.  Counts must span at
    least one decade.
    """
    options = options or FitOptions()
    counts = histogram.counts
    cmax = float(counts.max())
    floor = max(1.0, float(counts.min()))
    if cmax < 10.0 * floor:
        raise InsufficientDynamicRange(
            "counts span less than one decade above the floor")
    edges = histogram.bin_edges_ns
    centers = histogram.bin_centers_ns
    sigma = histogram.irf_sigma_ns
    i_peak = int(np.argmax(counts))
    t0_init = float(centers[i_peak]) - sigma

    # tail log-slope for the rate guess
    tail_start = centers.searchsorted(t0_init + 4.0 * sigma)
    tail = slice(max(tail_start, i_peak + 1), None)
    tc = centers[tail]
    ty = counts[tail]
    keep = ty >= max(cmax / 100.0, 1.0)
    rate_init = 1.0
    if keep.sum() >= 2:
        coef = np.polyfit(tc[keep], np.log(ty[keep]), 1)
        if coef[0] < 0.0:
            rate_init = -float(coef[0])
    amp_init = rate_init * float(counts.sum())

    span = edges[-1] - edges[0]
    bounds = {"amplitude": (1e-12, np.inf),
              "rate_per_ns": (1e-6, 1e6),
              "t0_ns": (edges[0] - 10.0 * sigma - 0.1 * span, edges[-1])}
    constants = {"irf_sigma_ns": sigma}
    model = PeakModel(
        kind="exp_decay_irf",
        initial_guess={"amplitude": amp_init, "rate_per_ns": rate_init,
                       "t0_ns": t0_init},
        bounds=bounds, constants=constants,
    )
    first = least_squares(model, histogram, options)

    # Refit with variances taken from the first-pass model instead of the
    # observed counts.  Empirical weights give empty tail bins unit
    # variance and bias the rate high by about half a percent at typical
    # statistics; model weights remove that and make inv(J^T W J) the
    # true parameter covariance, so no residual rescale is applied.
    spec = MODELS["exp_decay_irf"]
    p1 = first.parameters
    predicted = spec.predict(
        edges, np.array([p1["amplitude"], p1["rate_per_ns"], p1["t0_ns"]]),
        constants)
    weights = np.sqrt(np.maximum(predicted, 1.0))
    refit_options = dataclasses.replace(options, error_scale="unit")
    report = least_squares(
        PeakModel(kind="exp_decay_irf", initial_guess=dict(p1),
                  bounds=bounds, constants=constants),
        (edges, counts, weights), refit_options)
    rate = report.parameters["rate_per_ns"]
    ordered = {
        "rate_per_ns": rate,
        "lifetime_ns": 1.0 / rate,
        "amplitude": report.parameters["amplitude"],
        "t0_ns": report.parameters["t0_ns"],
    }
    errors = None
    if report.standard_errors is not None:
        se = report.standard_errors
        errors = {
            "rate_per_ns": se["rate_per_ns"],
            "lifetime_ns": se["rate_per_ns"] / rate ** 2,
            "amplitude": se["amplitude"],
            "t0_ns": se["t0_ns"],
        }
    return FitReport(
        model_id=report.model_id,
        parameters=ordered,
        standard_errors=errors,
        residual_norm=report.residual_norm,
        iterations=report.iterations,
        converged=report.converged,
        fitted_names=report.fitted_names,
        covariance=report.covariance,
    )


# ---------------------------------------------------------------------------
# tuning rate
# ---------------------------------------------------------------------------

def _aicc(ssr, n, n_params, floor):
    # Gaussian-likelihood corrected information criterion; the noise
    # variance counts as one estimated parameter
    k = n_params + 1
    ssr = max(ssr, floor)
    return n * math.log(ssr / n) + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0)


def fit_tuning_rate(points, options=None):
    """Tuning slope in pm/V from (voltage, wavelength_nm) samples.

    Fits linear and quadratic models on a centered voltage axis, selects
    by corrected information criterion (the quadratic must win by at
    least 2, ties go to the simpler model) and reports the slope of the
    preferred model at zero volts.
    """
    options = options or FitOptions()
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InsufficientData("need (voltage, wavelength) pairs")
    if pts.shape[0] < 8:
        raise InsufficientData("need at least 8 sweep points")
    volts = pts[:, 0]
    lam = pts[:, 1]
    v_span = float(volts.max() - volts.min())
    if v_span <= 1e-12 * max(1.0, float(np.abs(volts).max())):
        raise DegenerateAbscissa("all sweep voltages coincide")

    # center both axes so the fit never subtracts eight-decade numbers
    v_mean = float(volts.mean())
    vc = volts - v_mean
    lam_mean = float(lam.mean())
    lc = lam - lam_mean
    n = lam.size
    # rounding of the ordinate is set by the raw wavelength magnitude,
    # not the centered residual span, so the SSR floor must use it too
    scale = max(float(np.abs(lam).max()), 1.0e-9)
    floor = n * (1e-12 * scale) ** 2

    slope0 = float((vc @ lc) / (vc @ vc))
    lin = least_squares(PeakModel(
        kind="linear",
        initial_guess={"intercept": 0.0, "slope": slope0}),
        (vc, lc, None), options)
    quad = least_squares(PeakModel(
        kind="quadratic",
        initial_guess={"c0": lin.parameters["intercept"],
                       "c1": lin.parameters["slope"], "c2": 0.0}),
        (vc, lc, None), options)

    aicc_lin = _aicc(lin.residual_norm ** 2, n, 2, floor)
    aicc_quad = _aicc(quad.residual_norm ** 2, n, 3, floor)
    prefer_quad = aicc_quad < aicc_lin - 2.0

    if prefer_quad:
        base = quad
        # slope at V = 0 in the original frame: c1 - 2 c2 v_mean
        slope_nm = base.parameters["c1"] - 2.0 * base.parameters["c2"] * v_mean
        slope_sigma = _propagated_sigma(
            base.covariance, [(1, 1.0), (2, -2.0 * v_mean)])
        intercept = lam_mean + base.parameters["c0"] \
            - base.parameters["c1"] * v_mean \
            + base.parameters["c2"] * v_mean ** 2
    else:
        base = lin
        slope_nm = base.parameters["slope"]
        slope_sigma = _propagated_sigma(base.covariance, [(1, 1.0)])
        intercept = lam_mean + base.parameters["intercept"] \
            - base.parameters["slope"] * v_mean

    parameters = {
        "rate_pm_per_v": slope_nm * 1e3,
        "intercept_nm": intercept,
        "aicc_linear": aicc_lin,
        "aicc_quadratic": aicc_quad,
    }
    if prefer_quad:
        parameters["curvature_pm_per_v2"] = base.parameters["c2"] * 1e3
    errors = None
    if base.standard_errors is not None:
        errors = {"rate_pm_per_v":
                  (slope_sigma if slope_sigma is not None else 0.0) * 1e3}
    return FitReport(
        model_id="quadratic" if prefer_quad else "linear",
        parameters=parameters,
        standard_errors=errors,
        residual_norm=base.residual_norm,
        iterations=lin.iterations + quad.iterations,
        converged=lin.converged and quad.converged,
        fitted_names=base.fitted_names,
        covariance=base.covariance,
    )


# ---------------------------------------------------------------------------
# photon purity
# ---------------------------------------------------------------------------

def _window_area(delay, counts, width, period, options):
    """Estimated total counts of one comb peak and its uncertainty.

    Peaks with enough signal are fit with the concentric double-Gaussian
    and integrated analytically (area / bin width restores count units);
    nearly empty windows fall back to the direct windowed sum with a
    Poisson error bar.
    """
    total = float(counts.sum())
    if total < 25.0:
        return total, math.sqrt(max(total, 1.0)), True
    sigma = np.sqrt(np.maximum(counts, 1.0))
    mu = float((counts @ delay) / total)
    var = float((counts @ (delay - mu) ** 2) / total)
    sd = max(math.sqrt(max(var, 1e-12)), width)
    peak = float(counts.max())
    model = PeakModel(
        kind="double_gaussian",
        initial_guess={"center": mu, "amp1": 0.7 * peak, "sigma1": 0.6 * sd,
                       "amp2": 0.3 * peak, "sigma2": 2.0 * sd},
        bounds={"center": (-period / 4.0, period / 4.0),
                "amp1": (0.0, 10.0 * peak), "amp2": (0.0, 10.0 * peak),
                "sigma1": (width / 2.0, period),
                "sigma2": (width / 2.0, period)},
    )
    soft = dataclasses.replace(options, strict=False, error_scale="unit")
    report = least_squares(model, (delay, counts, sigma), soft)
    if not report.converged:
        return total, math.sqrt(max(total, 1.0)), True
    # model-weight refit, same reasoning as fit_decay: observed-count
    # weights favour downward fluctuations and shave several percent off
    # the area of a dim peak, which the central window always is
    spec = MODELS["double_gaussian"]
    p1 = report.parameters
    pvec = np.array([p1[name] for name in spec.param_names])
    weights = np.sqrt(np.maximum(spec.predict(delay, pvec, {}), 1.0))
    report = least_squares(
        PeakModel(kind="double_gaussian", initial_guess=dict(p1),
                  bounds=model.bounds),
        (delay, counts, weights), soft)
    if not report.converged:
        return total, math.sqrt(max(total, 1.0)), True
    p = report.parameters
    area = _SQRT_2PI * (p["amp1"] * p["sigma1"] + p["amp2"] * p["sigma2"]) \
        / width
    grad = [(1, p["sigma1"]), (2, p["amp1"]), (3, p["sigma2"]),
            (4, p["amp2"])]
    sig = _propagated_sigma(report.covariance,
                            [(i, g * _SQRT_2PI / width) for i, g in grad])
    return area, sig if sig is not None else math.sqrt(max(total, 1.0)), False


def fit_g2_purity(histogram, options=None):
    """Single-photon purity from a pulsed correlation histogram.

    Every comb peak is windowed to one period, its total counts estimated
    (see _window_area), and g2(0) is the central area over the mean side
    area.  Needs at least three side peaks per side.
    """
    options = options or FitOptions()
    delay = histogram.delay_ns
    counts = histogram.counts
    period = histogram.repetition_ns
    width = histogram.bin_width_ns

    span_hi = float(delay[-1]) + 0.5 * width
    n_side = int(math.floor(span_hi / period - 0.5 + 1e-9))
    if n_side < 3:
        raise PeakDetectionFailure(
            "need at least three side peaks on each side")

    side_areas = []
    side_sigmas = []
    central = None
    central_sigma = None
    for k in range(-n_side, n_side + 1):
        center = k * period
        mask = (delay >= center - period / 2.0) \
            & (delay < center + period / 2.0)
        if mask.sum() < 8:
            raise PeakDetectionFailure(
                f"window at {center:g} ns holds too few bins")
        area, sig, _ = _window_area(
            delay[mask] - center, counts[mask], width, period, options)
        if k == 0:
            central, central_sigma = area, sig
        else:
            side_areas.append(area)
            side_sigmas.append(sig)

    side_mean = float(np.mean(side_areas))
    if side_mean <= 0.0:
        raise PeakDetectionFailure("side peaks carry no counts")
    side_mean_sigma = float(np.sqrt(np.sum(np.square(side_sigmas)))) \
        / len(side_areas)
    g2 = central / side_mean
    g2_sigma = math.sqrt((central_sigma / side_mean) ** 2
                         + (central * side_mean_sigma / side_mean ** 2) ** 2)

    parameters = {
        "g2_zero": g2,
        "central_area_counts": central,
        "side_area_mean_counts": side_mean,
        "n_side_peaks": float(2 * n_side),
    }
    return FitReport(
        model_id="g2_comb_areas",
        parameters=parameters,
        standard_errors={"g2_zero": g2_sigma},
        residual_norm=0.0,
        iterations=0,
        converged=True,
        fitted_names=("g2_zero",),
        covariance=None,
    )
