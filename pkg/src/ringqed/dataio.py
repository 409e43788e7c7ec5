"""Readers and writers for spectra, histograms, fits, plans, manifests.

Column data travels as comment-friendly CSV (a '#' starts a comment,
the first non-comment line names the columns); structured results use
the same block format as run files.  Histogram metadata that the CSV
columns cannot carry (IRF width, repetition period) lives in a sidecar
file next to the data, <name>.meta.

Every float is written with 12 significant digits, enough for lossless
round trips at the tolerances the records enforce.  All writes are
atomic, and identical inputs always produce identical bytes (no
timestamps).
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

from . import __version__, kernels
from .errors import DomainError, ParseError
from .estimation import FitReport
from .planner import AlignmentPlan, DeviceSetting
from .records import CorrelationHistogram, DecayHistogram, Spectrum
from .resonator import ModeField
from .textio import atomic_write_text, parse_blocks_file

__all__ = ["write_spectrum", "read_spectrum",
           "write_tuning_curve", "read_tuning_curve",
           "write_decay_histogram", "read_decay_histogram",
           "write_correlation_histogram", "read_correlation_histogram",
           "write_report", "read_report",
           "write_plan", "read_plan",
           "write_mode_field", "read_mode_field",
           "write_manifest", "manifest_path"]


def _g(x):
    return format(float(x), ".12g")


def _read_table(path, n_cols, header):
    """CSV rows of n_cols floats; returns (rows, meta-comment pairs)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc}", path=str(path))
    rows = []
    seen_header = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            continue
        if not seen_header:
            if line != header:
                raise ParseError(
                    f"expected header {header!r}, got {line!r}",
                    path=str(path), line=lineno)
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != n_cols:
            raise ParseError(
                f"expected {n_cols} comma-separated values, got "
                f"{len(parts)}", path=str(path), line=lineno)
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}",
                             path=str(path), line=lineno)
    if not seen_header:
        raise ParseError(f"missing header line {header!r}", path=str(path))
    if not rows:
        raise ParseError("file holds no data rows", path=str(path))
    return np.asarray(rows, dtype=np.float64)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def write_spectrum(path, spectrum):
    lines = [f"# kind = {spectrum.kind}", "wavelength_nm,value"]
    for lam, val in zip(spectrum.wavelength_nm, spectrum.values):
        lines.append(f"{_g(lam)},{_g(val)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_spectrum(path):
    kind = "transmission"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if line.startswith("#") and "=" in line:
                    key, _, value = line.lstrip("#").partition("=")
                    if key.strip() == "kind":
                        kind = value.strip()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc}", path=str(path))
    table = _read_table(path, 2, "wavelength_nm,value")
    return Spectrum(wavelength_nm=table[:, 0], values=table[:, 1], kind=kind)


def write_tuning_curve(path, points):
    """Voltage sweep as CSV; points are (voltage_v, wavelength_nm)."""
    lines = ["voltage_v,wavelength_nm"]
    for volts, lam in points:
        lines.append(f"{_g(volts)},{_g(lam)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_tuning_curve(path):
    """(n, 2) array of (voltage_v, wavelength_nm) rows."""
    return _read_table(path, 2, "voltage_v,wavelength_nm")


# ---------------------------------------------------------------------------
# histograms
# ---------------------------------------------------------------------------

def _sidecar(path):
    return str(path) + ".meta"


def _read_meta(path, section):
    sections = parse_blocks_file(_sidecar(path))
    if section not in sections:
        raise ParseError(f"sidecar lacks [{section}]", path=_sidecar(path))
    return sections[section]


def write_decay_histogram(path, histogram):
    lines = ["t_lo_ns,t_hi_ns,counts"]
    edges = histogram.bin_edges_ns
    for lo, hi, c in zip(edges[:-1], edges[1:], histogram.counts):
        lines.append(f"{_g(lo)},{_g(hi)},{_g(c)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
    atomic_write_text(_sidecar(path),
                      "[decay_histogram]\n"
                      f"irf_sigma_ns = {_g(histogram.irf_sigma_ns)}\n")


def read_decay_histogram(path):
    table = _read_table(path, 3, "t_lo_ns,t_hi_ns,counts")
    lo, hi = table[:, 0], table[:, 1]
    gap = np.abs(hi[:-1] - lo[1:])
    if np.any(gap > 1e-9 * np.maximum(np.abs(hi[:-1]), 1.0)):
        raise ParseError("bins are not contiguous", path=str(path))
    edges = np.concatenate([lo, hi[-1:]])
    meta = _read_meta(path, "decay_histogram")
    return DecayHistogram(bin_edges_ns=edges, counts=table[:, 2],
                          irf_sigma_ns=meta.get_float("irf_sigma_ns"))


def write_correlation_histogram(path, histogram):
    lines = ["delay_ns,counts"]
    for d, c in zip(histogram.delay_ns, histogram.counts):
        lines.append(f"{_g(d)},{_g(c)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
    atomic_write_text(_sidecar(path),
                      "[correlation_histogram]\n"
                      f"repetition_ns = {_g(histogram.repetition_ns)}\n")


def read_correlation_histogram(path):
    table = _read_table(path, 2, "delay_ns,counts")
    meta = _read_meta(path, "correlation_histogram")
    return CorrelationHistogram(delay_ns=table[:, 0], counts=table[:, 1],
                                repetition_ns=meta.get_float("repetition_ns"))


# ---------------------------------------------------------------------------
# fit reports
# ---------------------------------------------------------------------------

def write_report(path, report):
    lines = ["[fit]",
             f"model_id = {report.model_id}",
             f"converged = {'true' if report.converged else 'false'}",
             f"iterations = {report.iterations}",
             f"residual_norm = {_g(report.residual_norm)}",
             "",
             "[parameters]"]
    for key, val in report.parameters.items():
        lines.append(f"{key} = {_g(val)}")
    if report.standard_errors is not None:
        lines.append("")
        lines.append("[standard_errors]")
        for key, val in report.standard_errors.items():
            lines.append(f"{key} = {_g(val)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_report(path):
    sections = parse_blocks_file(path)
    for needed in ("fit", "parameters"):
        if needed not in sections:
            raise ParseError(f"missing [{needed}] section", path=str(path))
    fit = sections["fit"]
    parameters = {key: float(val)
                  for key, val in sections["parameters"].pairs.items()}
    errors = None
    if "standard_errors" in sections:
        errors = {key: float(val)
                  for key, val in sections["standard_errors"].pairs.items()}
    return FitReport(
        model_id=fit.get_str("model_id"),
        parameters=parameters,
        standard_errors=errors,
        residual_norm=fit.get_float("residual_norm"),
        iterations=fit.get_int("iterations"),
        converged=fit.get_bool("converged"),
        fitted_names=tuple(parameters),
    )


# ---------------------------------------------------------------------------
# alignment plans
# ---------------------------------------------------------------------------

def write_plan(path, plan):
    lines = ["[plan]",
             f"objective = {plan.objective}",
             f"target_wavelength_nm = {_g(plan.target_wavelength_nm)}",
             f"objective_value = {_g(plan.objective_value)}",
             f"feasible_lo_nm = {_g(plan.feasible_lo_nm)}",
             f"feasible_hi_nm = {_g(plan.feasible_hi_nm)}"]
    for setting in plan.settings:
        lines.append("")
        lines.append(f"[setting.{setting.name}]")
        lines.append(f"strain_voltage_v = {_g(setting.strain_voltage_v)}")
        lines.append(f"eo_voltage_v = {_g(setting.eo_voltage_v)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_plan(path):
    sections = parse_blocks_file(path)
    if "plan" not in sections:
        raise ParseError("missing [plan] section", path=str(path))
    head = sections["plan"]
    settings = []
    for name, sec in sections.items():
        if name == "plan":
            continue
        if not name.startswith("setting."):
            raise ParseError(f"unexpected section [{name}]",
                             path=str(path), line=sec.line)
        settings.append(DeviceSetting(
            name=name[len("setting."):],
            strain_voltage_v=sec.get_float("strain_voltage_v"),
            eo_voltage_v=sec.get_float("eo_voltage_v")))
    return AlignmentPlan(
        objective=head.get_str("objective"),
        target_wavelength_nm=head.get_float("target_wavelength_nm"),
        objective_value=head.get_float("objective_value"),
        feasible_lo_nm=head.get_float("feasible_lo_nm"),
        feasible_hi_nm=head.get_float("feasible_hi_nm"),
        settings=tuple(settings),
    )


# ---------------------------------------------------------------------------
# mode field grids
# ---------------------------------------------------------------------------

def write_mode_field(path, field, nx, ny, nz):
    """Sampled mode field as a block file; arrays are row-major flat."""
    eps = np.asarray(field.permittivity, dtype=np.float64).ravel()
    inten = np.asarray(field.intensity, dtype=np.float64).ravel()
    if eps.size != nx * ny * nz:
        raise DomainError(f"grid is {nx} x {ny} x {nz} but arrays hold "
                          f"{eps.size} samples")
    cell = np.asarray(field.cell_volume_m3, dtype=np.float64)
    if cell.size != 1:
        raise DomainError("mode field files carry uniform grids only")
    cell_um3 = float(cell) * 1e18
    lines = ["[grid]", f"nx = {nx}", f"ny = {ny}", f"nz = {nz}",
             f"cell_volume_um3 = {_g(cell_um3)}", "", "[permittivity]"]
    lines.extend(" ".join(_g(v) for v in eps[i:i + 8])
                 for i in range(0, eps.size, 8))
    lines.append("")
    lines.append("[intensity]")
    lines.extend(" ".join(_g(v) for v in inten[i:i + 8])
                 for i in range(0, inten.size, 8))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_mode_field(path):
    """ModeField from a block file written by write_mode_field."""
    sections = parse_blocks_file(path)
    for needed in ("grid", "permittivity", "intensity"):
        if needed not in sections:
            raise ParseError(f"missing [{needed}] section", path=str(path))
    grid = sections["grid"]
    n = grid.get_int("nx") * grid.get_int("ny") * grid.get_int("nz")
    cell_m3 = grid.get_float("cell_volume_um3") * 1e-18

    def flat(section):
        vals = [v for row in section.rows for v in row]
        if len(vals) != n:
            raise ParseError(
                f"[{section.name}] holds {len(vals)} samples, grid wants "
                f"{n}", path=str(path), line=section.line)
        return np.asarray(vals, dtype=np.float64)

    return ModeField(permittivity=flat(sections["permittivity"]),
                     intensity=flat(sections["intensity"]),
                     cell_volume_m3=cell_m3)


# ---------------------------------------------------------------------------
# run manifests
# ---------------------------------------------------------------------------

def manifest_path(output_path):
    return str(output_path) + ".manifest"


def write_manifest(path, command, config_path=None, seed=None):
    """Record what produced an output file, for reproducibility.

    Captures the command line, the configuration digest, the seed, the
    active kernel backend and library versions.  Deliberately no
    timestamps, so reruns of the same inputs are byte-identical.
    """
    import scipy

    lines = ["[manifest]", f"command = {command}"]
    if config_path is not None:
        digest = hashlib.sha256()
        with open(config_path, "rb") as fh:
            digest.update(fh.read())
        lines.append(f"config = {os.path.basename(str(config_path))}")
        lines.append(f"config_sha256 = {digest.hexdigest()}")
    if seed is not None:
        lines.append(f"seed = {int(seed)}")
    lines.append(f"backend = {kernels.backend()}")
    lines.append(f"package_version = {__version__}")
    lines.append(f"numpy_version = {np.__version__}")
    lines.append(f"scipy_version = {scipy.__version__}")
    if kernels.HAS_NUMBA:
        import numba
        lines.append(f"numba_version = {numba.__version__}")
    else:
        # not importable or switched off by RINGQED_NO_NUMBA
        lines.append("numba_version = inactive")
    atomic_write_text(path, "\n".join(lines) + "\n")
