"""Toolkit for strain- and field-tunable microring cavity QED.

Submodules
----------
resonator   ring transmission, loss budgets, quality factor, mode volume
strain      piezo stack: field, strain tensor, band shift, tuning curves
cqed        emitter-cavity coupling, decay and correlation synthesis
estimation  resonance, decay, tuning-rate and purity fitters
planner     fleet alignment over strain and electro-optic voltages
materials   tensor frames, compliance and piezo data
config      run and fleet file loading
dataio      readers and writers for spectra, histograms, fits, plans
kernels     numeric hot paths with optional compiled backend

Wavelengths at module boundaries are nm, times ns, voltages V; SI
units appear only where a name says so.
"""

__version__ = "0.1.0"

from .errors import RingQedError
from .records import CorrelationHistogram, DecayHistogram, Spectrum

__all__ = ["__version__", "RingQedError", "Spectrum", "DecayHistogram",
           "CorrelationHistogram"]
