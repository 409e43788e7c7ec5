"""Shared sampled-measurement records.

These are the plain data carriers exchanged between synthesis, file I/O and
the fitters: wavelength spectra, time-resolved decay histograms and pulsed
correlation histograms.  Validation happens at construction so downstream
code can rely on the invariants.

Units follow the interface convention: wavelengths in nm, times in ns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGrid, NonMonotonicAxis


def _ascending(axis, what):
    axis = np.asarray(axis, dtype=np.float64)
    if axis.ndim != 1 or axis.size == 0:
        raise EmptyGrid(f"{what} axis is empty")
    if np.any(np.diff(axis) <= 0.0):
        raise NonMonotonicAxis(
            f"{what} axis must be strictly ascending (duplicates rejected)")
    return axis


@dataclass
class Spectrum:
    """Sampled spectrum: strictly ascending wavelength axis plus values.

    kind tags what the values mean ("transmission" or "counts").
    """

    wavelength_nm: np.ndarray
    values: np.ndarray
    kind: str = "transmission"

    def __post_init__(self):
        self.wavelength_nm = _ascending(self.wavelength_nm, "wavelength")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.wavelength_nm.shape:
            raise EmptyGrid("wavelengths and values differ in length")

    def __len__(self):
        return self.wavelength_nm.size


@dataclass
class DecayHistogram:
    """Time-resolved decay: bin edges (ns), counts per bin, IRF width.

    counts are nonnegative reals (Poisson draws are stored as floats).
    irf_sigma_ns is the Gaussian IRF standard deviation used in synthesis
    and assumed by the decay fitter.
    """

    bin_edges_ns: np.ndarray
    counts: np.ndarray
    irf_sigma_ns: float

    def __post_init__(self):
        self.bin_edges_ns = _ascending(self.bin_edges_ns, "time-bin")
        self.counts = np.asarray(self.counts, dtype=np.float64)
        if self.counts.size != self.bin_edges_ns.size - 1:
            raise EmptyGrid("need len(edges) == len(counts) + 1")
        if np.any(self.counts < 0.0):
            raise EmptyGrid("counts must be nonnegative")
        if self.irf_sigma_ns < 0.0:
            raise EmptyGrid("irf_sigma_ns must be >= 0")

    @property
    def bin_centers_ns(self):
        return 0.5 * (self.bin_edges_ns[:-1] + self.bin_edges_ns[1:])

    def __len__(self):
        return self.counts.size


@dataclass
class CorrelationHistogram:
    """Pulsed intensity-correlation histogram.

    delay_ns holds uniform bin centers, symmetric about zero delay;
    repetition_ns is the pulse period.
    """

    delay_ns: np.ndarray
    counts: np.ndarray
    repetition_ns: float

    bin_width_ns: float = field(init=False)

    def __post_init__(self):
        self.delay_ns = _ascending(self.delay_ns, "delay")
        self.counts = np.asarray(self.counts, dtype=np.float64)
        if self.counts.shape != self.delay_ns.shape:
            raise EmptyGrid("delays and counts differ in length")
        if self.repetition_ns <= 0.0:
            raise EmptyGrid("repetition period must be positive")
        widths = np.diff(self.delay_ns)
        if widths.size == 0:
            raise EmptyGrid("need at least two delay bins")
        if not np.allclose(widths, widths[0], rtol=1e-9, atol=0.0):
            raise NonMonotonicAxis("delay bins must be uniform")
        if abs(self.delay_ns[0] + self.delay_ns[-1]) > 1e-9 * self.repetition_ns:
            raise NonMonotonicAxis("delay axis must be symmetric about zero")
        self.bin_width_ns = float(widths[0])

    @property
    def bin_edges_ns(self):
        half = 0.5 * self.bin_width_ns
        return np.concatenate([self.delay_ns - half,
                               [self.delay_ns[-1] + half]])

    def __len__(self):
        return self.counts.size
