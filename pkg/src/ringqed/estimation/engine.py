"""Damped least-squares engine (Levenberg-Marquardt with box bounds).

The step solves (J^T J + lam * diag(J^T J)) d = J^T r with the damping
factor lam grown on rejected steps and shrunk on accepted ones, which
interpolates between Gauss-Newton and scaled gradient descent.  Trial
points are clipped to the parameter box; convergence is declared on the
projected gradient, the relative step or the relative cost change.

The engine is deterministic: identical inputs produce identical reports.
Standard errors come from the curvature at the solution,
cov = inv(J^T J) * SSR / (m - n), and are only reported on convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (DomainError, InsufficientData, MaxIterations,
                      SingularJacobian)
from ..records import DecayHistogram, Spectrum
from .models import MODELS

__all__ = ["FitOptions", "FitReport", "PeakModel", "least_squares"]


@dataclass(frozen=True)
class FitOptions:
    """Engine knobs; the defaults suit every shipped fitter."""

    max_iterations: int = 200
    gtol: float = 1e-10
    xtol: float = 1e-12
    ftol: float = 1e-12
    ctol: float = 1e-4  # cosine stationarity bound at the damping ceiling
    lambda_init: float = 1e-3
    lambda_up: float = 5.0
    lambda_down: float = 3.0
    strict: bool = True  # raise MaxIterations instead of returning unconverged
    # "residual" rescales the covariance by SSR/(m-n) for data of unknown
    # noise; "unit" trusts the supplied sigmas as true one-sigma errors
    # (the right choice for model-based Poisson weights, whose floored
    # empty bins would otherwise deflate the rescale)
    error_scale: str = "residual"


@dataclass
class FitReport:
    """Outcome of one fit.

    parameters keeps insertion order; serialization relies on it being
    stable.  standard_errors is present exactly when the fit converged.
    covariance (parameter order of `fitted_names`) is carried for error
    propagation by the fitters.
    """

    model_id: str
    parameters: dict
    standard_errors: dict | None
    residual_norm: float
    iterations: int
    converged: bool
    fitted_names: tuple = ()
    covariance: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class PeakModel:
    """A model choice plus starting point for the engine.

    kind names an entry of MODELS; initial_guess maps parameter names to
    starting values (all required); bounds maps names to (lo, hi) boxes,
    others are unbounded; constants carries fixed model inputs such as the
    IRF width.
    """

    kind: str
    initial_guess: dict
    bounds: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODELS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        spec = MODELS[self.kind]
        missing = [n for n in spec.param_names if n not in self.initial_guess]
        if missing:
            raise DomainError(f"initial guess missing {missing}")
        for name, (lo, hi) in self.bounds.items():
            if name not in spec.param_names:
                raise DomainError(f"bound on unknown parameter {name!r}")
            if not lo < hi:
                raise DomainError(f"bound on {name!r} must satisfy lo < hi")
            guess = self.initial_guess[name]
            if not lo <= guess <= hi:
                raise DomainError(
                    f"initial guess for {name!r} is outside its bounds")


def _extract_xy(model_spec, data):
    """Pull (x, y, sigma) out of a record or a raw tuple."""
    if isinstance(data, Spectrum):
        return data.wavelength_nm, data.values, None
    if isinstance(data, DecayHistogram):
        if not model_spec.x_is_edges:
            raise DomainError(
                f"model {model_spec.name!r} cannot consume a histogram")
        sigma = np.sqrt(np.maximum(data.counts, 1.0))
        return data.bin_edges_ns, data.counts, sigma
    x, y, sigma = data
    return (np.asarray(x, dtype=np.float64),
            np.asarray(y, dtype=np.float64),
            None if sigma is None else np.asarray(sigma, dtype=np.float64))


def least_squares(model, data, options=None):
    """Fit a PeakModel to data, returning a FitReport.

    data is a Spectrum, a DecayHistogram (Poisson weights
    sigma = sqrt(max(counts, 1)) implied) or a raw (x, y, sigma) tuple
    with sigma optional.
    """
    options = options or FitOptions()
    if options.error_scale not in ("residual", "unit"):
        raise DomainError(
            f"error_scale must be 'residual' or 'unit', "
            f"got {options.error_scale!r}")
    spec = MODELS[model.kind]
    x, y, sigma = _extract_xy(spec, data)

    n_par = len(spec.param_names)
    n_pts = y.size
    if n_pts < n_par:
        raise InsufficientData(
            f"{n_pts} points cannot constrain {n_par} parameters")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InsufficientData("data contains non-finite values")
    if sigma is None:
        sigma = np.ones(n_pts)
    else:
        if sigma.shape != y.shape or np.any(sigma <= 0.0) \
                or not np.all(np.isfinite(sigma)):
            raise InsufficientData("weights must be finite and positive")

    lo = np.full(n_par, -np.inf)
    hi = np.full(n_par, np.inf)
    for i, name in enumerate(spec.param_names):
        if name in model.bounds:
            lo[i], hi[i] = model.bounds[name]
    p = np.array([float(model.initial_guess[name])
                  for name in spec.param_names])

    def eval_at(params):
        resid = (y - spec.predict(x, params, model.constants)) / sigma
        jac = spec.jacobian(x, params, model.constants) / sigma[:, None]
        return resid, jac

    def projected_gradient(params, grad):
        pg = grad.copy()
        at_lo = (params <= lo) & (pg < 0.0)
        at_hi = (params >= hi) & (pg > 0.0)
        pg[at_lo] = 0.0
        pg[at_hi] = 0.0
        return pg

    r, jac = eval_at(p)
    if not np.all(np.isfinite(r)):
        raise InsufficientData("model is non-finite at the initial guess")
    cost = float(r @ r)
    lam = options.lambda_init
    iterations = 0
    converged = False

    for _ in range(options.max_iterations):
        grad = jac.T @ r  # ascent direction of the fit quality
        if np.max(np.abs(projected_gradient(p, grad))) < options.gtol:
            converged = True
            break
        hess = jac.T @ jac
        diag = np.diag(hess).copy()
        dmax = diag.max()
        if not np.isfinite(dmax) or dmax <= 0.0:
            raise SingularJacobian("Jacobian has no finite curvature")
        diag = np.maximum(diag, 1e-14 * dmax)

        step = None
        while True:
            try:
                cand = np.linalg.solve(hess + lam * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                cand = None
            if cand is not None and np.all(np.isfinite(cand)):
                step = cand
                p_try = np.clip(p + step, lo, hi)
                r_try = (y - spec.predict(x, p_try, model.constants)) / sigma
                cost_try = float(r_try @ r_try) \
                    if np.all(np.isfinite(r_try)) else np.inf
                if cost_try < cost:
                    break  # accept
            lam *= options.lambda_up
            if lam > 1e14:
                break
        if lam > 1e14:
            if step is None:
                raise SingularJacobian(
                    "normal equations remain singular under damping")
            # No step at any damping reduces the cost, so the float
            # resolution of the cost surface is exhausted.  Declare
            # convergence if the gradient is stationary either absolutely
            # or relative to the column scales of the Jacobian (the
            # absolute test alone fails when the data sit many decades
            # above the residuals and cancellation floors the gradient).
            pg = np.abs(projected_gradient(p, grad))
            col = np.sqrt(np.sum(jac * jac, axis=0))
            denom = np.maximum(col * np.sqrt(cost), 1e-300)
            converged = (pg.max() < 1e3 * options.gtol
                         or float((pg / denom).max()) < options.ctol)
            break

        step_applied = p_try - p
        cost_drop = cost - cost_try
        p, r = p_try, r_try
        cost = cost_try
        jac = spec.jacobian(x, p, model.constants) / sigma[:, None]
        iterations += 1
        lam = max(lam / options.lambda_down, 1e-12)

        if np.linalg.norm(step_applied) < options.xtol * (
                np.linalg.norm(p) + options.xtol):
            converged = True
            break
        if cost_drop <= options.ftol * max(cost, 1e-300):
            converged = True
            break
    else:
        converged = False

    if not converged and options.strict:
        raise MaxIterations(
            f"no convergence within {options.max_iterations} iterations")

    parameters = {name: float(val) for name, val in zip(spec.param_names, p)}
    standard_errors = None
    covariance = None
    if converged:
        hess = jac.T @ jac
        if options.error_scale == "unit":
            scale = 1.0
        else:
            scale = cost / (n_pts - n_par) if n_pts > n_par else 1.0
        try:
            covariance = np.linalg.inv(hess) * scale
        except np.linalg.LinAlgError:
            covariance = np.linalg.pinv(hess) * scale
        diag = np.maximum(np.diag(covariance), 0.0)
        standard_errors = {name: float(np.sqrt(d))
                           for name, d in zip(spec.param_names, diag)}

    return FitReport(
        model_id=model.kind,
        parameters=parameters,
        standard_errors=standard_errors,
        residual_norm=float(np.sqrt(cost)),
        iterations=iterations,
        converged=converged,
        fitted_names=spec.param_names,
        covariance=covariance,
    )
