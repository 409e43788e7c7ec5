"""Emitter-cavity coupling: Purcell arithmetic and measurement synthesis.

Interface units are nm for wavelengths/detunings and ns for times; decay
rates are 1/ns.  The IRF is a Gaussian whose width is quoted as FWHM by
instrument calibrations; sigma = FWHM / 2.355 is the conversion used
throughout.

Synthesis is deterministic: a given seed reproduces a histogram bit for
bit (algorithm tag NOISE_ALGORITHM, recorded in output sidecars).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, EmptyGrid, PeakOverlap
from .records import CorrelationHistogram, DecayHistogram

__all__ = [
    "NOISE_ALGORITHM", "IRF_FWHM_TO_SIGMA",
    "EmitterCavityState",
    "purcell_at_detuning", "purcell_from_rates", "beta_factor",
    "decay_rate_at_detuning", "intensity_enhancement",
    "synthesize_decay", "synthesize_g2",
]

# seeded-noise algorithm identifier recorded alongside synthetic data
NOISE_ALGORITHM = "pcg64-poisson"

# Gaussian FWHM = 2 sqrt(2 ln 2) sigma
IRF_FWHM_TO_SIGMA = 1.0 / 2.355


@dataclass(frozen=True)
class EmitterCavityState:
    """Emitter line, cavity mode and their coupling strength.

    Attributes
    ----------
    qd_wavelength_nm : emitter line position.
    cavity_wavelength_nm : cavity resonance position.
    cavity_linewidth_nm : cavity FWHM (kappa).
    purcell_peak : Purcell factor on resonance, >= 0.
    free_rate_per_ns : emitter decay rate far off resonance.
    """

    qd_wavelength_nm: float
    cavity_wavelength_nm: float
    cavity_linewidth_nm: float
    purcell_peak: float
    free_rate_per_ns: float

    def __post_init__(self):
        if self.qd_wavelength_nm <= 0.0 or self.cavity_wavelength_nm <= 0.0:
            raise DomainError("wavelengths must be positive")
        if self.cavity_linewidth_nm <= 0.0:
            raise DomainError("cavity linewidth must be positive")
        if self.purcell_peak < 0.0:
            raise DomainError("peak Purcell factor must be >= 0")
        if self.free_rate_per_ns <= 0.0:
            raise DomainError("free-space rate must be positive")

    @property
    def detuning_nm(self):
        """Emitter minus cavity wavelength."""
        return self.qd_wavelength_nm - self.cavity_wavelength_nm


def purcell_at_detuning(state, detuning_nm):
    """Purcell factor at a spectral detuning from the cavity line.

    Lorentzian rolloff of the peak value:
    F(delta) = F_p / (1 + (2 delta / kappa)^2).
    """
    x = 2.0 * detuning_nm / state.cavity_linewidth_nm
    return state.purcell_peak / (1.0 + x * x)


def purcell_from_rates(rate_on_per_ns, rate_off_per_ns):
    """Purcell factor from on/off-resonance decay rates: on/off - 1."""
    if rate_on_per_ns <= 0.0 or rate_off_per_ns <= 0.0:
        raise DomainError("decay rates must be positive")
    return rate_on_per_ns / rate_off_per_ns - 1.0


def beta_factor(purcell):
    """Fraction of emission routed into the cavity mode: F / (1 + F)."""
    if purcell < 0.0:
        raise DomainError("Purcell factor must be >= 0")
    return purcell / (1.0 + purcell)


def decay_rate_at_detuning(state, detuning_nm):
    """Total decay rate (1/ns): free rate times (1 + F(delta))."""
    return state.free_rate_per_ns * (1.0 + purcell_at_detuning(state,
                                                               detuning_nm))


def intensity_enhancement(state, detuning_on_nm, detuning_off_nm,
                          offres_collection=0.0):
    """Collected-intensity ratio between two detunings.

    The collected signal is modeled as beta(delta) plus a residual
    collection floor for light that bypasses the cavity mode:

        I(delta) ~ beta(delta) + offres_collection

    offres_collection is a calibrated device parameter, not a prediction;
    the shipped example device uses 0.0734, matched to its observed
    on/off contrast.  Equal detunings give exactly 1, and a cavity with
    zero Purcell factor gives 1 everywhere.
    """
    if offres_collection < 0.0:
        raise DomainError("residual collection must be >= 0")
    num = beta_factor(purcell_at_detuning(state, detuning_on_nm)) \
        + offres_collection
    den = beta_factor(purcell_at_detuning(state, detuning_off_nm)) \
        + offres_collection
    if num == 0.0 and den == 0.0:
        return 1.0
    if den == 0.0:
        raise DomainError("reference detuning collects no light")
    return num / den


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def synthesize_decay(state, detuning_nm, irf_sigma_ns, bin_edges_ns,
                     amplitude, t0_ns=1.0, seed=None):
    """Synthetic time-resolved decay histogram.

    The noiseless profile is amplitude times the bin integral of the
    IRF-convolved exponential exp(-rate t) * step(t) with a Gaussian IRF
    of width irf_sigma_ns centered at t0_ns; rate comes from the state and
    detuning.  Total integrated counts equal amplitude / rate when the
    bins cover the decay.  With a seed, per-bin Poisson noise is drawn
    deterministically (NOISE_ALGORITHM).

    Returns DecayHistogram; irf_sigma_ns is carried along for the fitter.
    """
    edges = np.asarray(bin_edges_ns, dtype=np.float64)
    if edges.size < 2:
        raise EmptyGrid("need at least one bin")
    if irf_sigma_ns < 0.0:
        raise DomainError("IRF sigma must be >= 0")
    if amplitude < 0.0:
        raise DomainError("amplitude must be >= 0")
    rate = decay_rate_at_detuning(state, detuning_nm)
    _, cum = kernels.decay_profile(edges - t0_ns, rate, irf_sigma_ns)
    counts = amplitude * np.diff(cum)
    counts = np.maximum(counts, 0.0)  # clip roundoff at the far tail
    if seed is not None:
        counts = _rng(seed).poisson(counts).astype(np.float64)
    return DecayHistogram(bin_edges_ns=edges, counts=counts,
                          irf_sigma_ns=irf_sigma_ns)


def synthesize_g2(purity_deficit, lifetime_ns, repetition_ns, n_side_peaks,
                  counts_scale, seed=None, bin_width_ns=0.05):
    """Synthetic pulsed intensity-correlation histogram.

    Peaks are unit-area two-sided exponentials of the emitter lifetime at
    multiples of the repetition period; side peaks carry counts_scale
    total counts each and the central peak purity_deficit * counts_scale.
    The comb holds n_side_peaks on each side of zero delay.  With a seed,
    Poisson noise is applied deterministically.

    Raises PeakOverlap when the lifetime is too long for the period
    (lifetime >= repetition / 4).
    """
    if purity_deficit < 0.0:
        raise DomainError("purity deficit must be >= 0")
    if lifetime_ns <= 0.0 or repetition_ns <= 0.0:
        raise DomainError("lifetime and repetition period must be positive")
    if n_side_peaks < 1:
        raise DomainError("need at least one side peak")
    if counts_scale <= 0.0:
        raise DomainError("counts scale must be positive")
    if lifetime_ns >= repetition_ns / 4.0:
        raise PeakOverlap("pulse peaks overlap: lifetime >= period / 4")
    half_span = (n_side_peaks + 0.5) * repetition_ns
    n_bins = max(int(round(2.0 * half_span / bin_width_ns)), 3)
    edges = np.linspace(-half_span, half_span, n_bins + 1)
    counts = kernels.g2_comb(edges, repetition_ns, lifetime_ns,
                             n_side_peaks, counts_scale,
                             purity_deficit * counts_scale)
    counts = np.maximum(counts, 0.0)
    if seed is not None:
        counts = _rng(seed).poisson(counts).astype(np.float64)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return CorrelationHistogram(delay_ns=centers, counts=counts,
                                repetition_ns=repetition_ns)
