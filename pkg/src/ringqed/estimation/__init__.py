"""Nonlinear least-squares engine, model zoo and the measurement fitters."""

from .engine import FitOptions, FitReport, PeakModel, least_squares
from .models import MODELS, model_names
from .fitters import (fit_all_resonances, fit_decay, fit_g2_purity,
                      fit_resonance, fit_tuning_rate)

__all__ = [
    "FitOptions", "FitReport", "PeakModel", "least_squares",
    "MODELS", "model_names",
    "fit_resonance", "fit_all_resonances", "fit_decay", "fit_tuning_rate",
    "fit_g2_purity",
]
