"""Ring resonator figures of merit and the mode-volume integrator."""

import math

import numpy as np
import pytest

from ringqed import resonator
from ringqed.errors import (DegenerateField, DomainError, EmptyGrid,
                            NonMonotonicAxis)


def _geometry(**kw):
    base = dict(total_length_m=200e-6, gaas_length_m=25.5e-6,
                taper_length_m=10.5e-6, group_index=2.2625,
                design_wavelength_m=910e-9, n_tapers=2)
    base.update(kw)
    return resonator.RingGeometry(**base)


def test_db_per_cm_conversion():
    # 10 dB/cm is 1000 dB/m; power decays by 10^(-dB/10) = e^(-alpha L)
    assert resonator.DB_PER_CM_TO_PER_M * 10.0 == pytest.approx(
        1000.0 * math.log(10.0) / 10.0, rel=1e-15)


def test_taper_loss_per_length_closed_form():
    got = resonator.taper_loss_per_length(0.982, 10.5e-6)
    want = -10.0 * math.log10(0.982) / (10.5e-6 * 100.0)
    assert got == pytest.approx(want, rel=1e-15)
    assert got == pytest.approx(75.1287, abs=2e-4)
    assert resonator.taper_loss_per_length(1.0, 10.5e-6) == 0.0
    with pytest.raises(DomainError):
        resonator.taper_loss_per_length(0.0, 10.5e-6)
    with pytest.raises(DomainError):
        resonator.taper_loss_per_length(0.9, 0.0)


def test_total_loss_is_length_weighted():
    g = _geometry()
    budget = resonator.LossBudget.from_taper_efficiency(
        geometry=g, efficiency=0.982, alpha_gaas_db_per_cm=75.0,
        alpha_ln_db_per_cm=0.5)
    alpha = resonator.total_loss(g, budget)
    want = ((75.0 * 25.5e-6
             + budget.alpha_taper_db_per_cm * 2 * 10.5e-6) / 200e-6 + 0.5)
    assert alpha == pytest.approx(want, rel=1e-14)
    assert alpha == pytest.approx(17.951, abs=2e-3)


def test_quality_factor_formula():
    g = _geometry()
    alpha_db = 17.951
    q = resonator.quality_factor(g, alpha_db)
    alpha_per_m = alpha_db * math.log(10.0) * 10.0
    assert q == pytest.approx(math.pi * 2.2625 / (910e-9 * alpha_per_m),
                              rel=1e-14)
    assert q == pytest.approx(1.89e4, rel=0.01)
    with pytest.raises(DomainError):
        resonator.quality_factor(g, 0.0)


def test_free_spectral_range_at_design_wavelength():
    fsr = resonator.free_spectral_range(_geometry())
    assert fsr == pytest.approx(910e-9 ** 2 / (2.2625 * 200e-6), rel=1e-15)
    assert fsr * 1e9 == pytest.approx(1.830, abs=0.002)


def test_geometry_validation():
    with pytest.raises(DomainError):
        _geometry(gaas_length_m=300e-6)  # host longer than the ring
    with pytest.raises(DomainError):
        _geometry(total_length_m=-1.0)
    with pytest.raises(DomainError):
        _geometry(group_index=0.5)
    with pytest.raises(DomainError):
        _geometry(n_tapers=-1)
    assert _geometry(n_tapers=0).n_tapers == 0


def test_coupling_state_validation_and_classification():
    with pytest.raises(DomainError):
        resonator.CouplingState(self_coupling=1.0, round_trip_amplitude=0.9)
    with pytest.raises(DomainError):
        resonator.CouplingState(self_coupling=0.9, round_trip_amplitude=0.0)
    over = resonator.CouplingState(self_coupling=0.90,
                                   round_trip_amplitude=0.95)
    under = resonator.CouplingState(self_coupling=0.95,
                                    round_trip_amplitude=0.90)
    crit = resonator.CouplingState(self_coupling=0.93,
                                   round_trip_amplitude=0.93 + 1e-9)
    assert resonator.classify_coupling(over) == "overcoupled"
    assert resonator.classify_coupling(under) == "undercoupled"
    assert resonator.classify_coupling(crit) == "critical"


def test_transmission_spectrum_units_and_validation():
    g = _geometry()
    c = resonator.CouplingState(self_coupling=0.9595,
                                round_trip_amplitude=0.9595)
    lam = np.linspace(909e-9, 911e-9, 2001)
    spec = resonator.transmission_spectrum(c, g, lam)
    np.testing.assert_allclose(spec.wavelength_nm, lam * 1e9)
    assert spec.kind == "transmission"
    assert spec.values.min() < 0.01      # critical coupling extinguishes
    assert spec.values.max() > 0.95
    with pytest.raises(EmptyGrid):
        resonator.transmission_spectrum(c, g, np.array([]))
    with pytest.raises(NonMonotonicAxis):
        resonator.transmission_spectrum(c, g, lam[::-1])
    with pytest.raises(DomainError):
        resonator.transmission_spectrum(c, g, np.array([-1e-9, 910e-9]))


def test_mode_volume_matches_loop_oracle():
    rng = np.random.default_rng(21)
    for _ in range(10):
        shape = tuple(rng.integers(3, 9, size=3))
        eps = rng.uniform(1.0, 12.0, size=shape)
        inten = rng.uniform(0.0, 1.0, size=shape)
        inten.flat[rng.integers(0, inten.size)] = 2.0  # pin the peak
        dv = float(rng.uniform(1e-23, 1e-21))
        field = resonator.ModeField(permittivity=eps, intensity=inten,
                                    cell_volume_m3=dv)
        got = resonator.effective_mode_volume(field).cubic_meters
        dens = eps * inten
        want = sum(dens.flat[i] * dv for i in range(dens.size)) / dens.max()
        assert got == pytest.approx(want, rel=1e-12)


def test_mode_volume_gaussian_closed_form():
    # isotropic gaussian energy density: V = (2 pi)^(3/2) sigma^3
    sigma = 0.2e-6
    ax = np.linspace(-1.5e-6, 1.5e-6, 121)
    dx = ax[1] - ax[0]
    x, y, z = np.meshgrid(ax, ax, ax, indexing="ij")
    inten = np.exp(-(x * x + y * y + z * z) / (2 * sigma * sigma))
    field = resonator.ModeField(permittivity=np.ones_like(inten),
                                intensity=inten, cell_volume_m3=dx ** 3)
    got = resonator.effective_mode_volume(field).cubic_meters
    want = (2 * math.pi) ** 1.5 * sigma ** 3
    assert got == pytest.approx(want, rel=2e-3)


def test_mode_volume_normalization():
    field = resonator.ModeField(permittivity=np.full((4, 4, 4), 12.25),
                                intensity=np.ones((4, 4, 4)),
                                cell_volume_m3=1e-21)
    mv = resonator.effective_mode_volume(field, wavelength_m=910e-9,
                                         ref_index=3.5)
    assert mv.cubic_meters == pytest.approx(64e-21, rel=1e-12)
    assert mv.normalized == pytest.approx(64e-21 / (910e-9 / 3.5) ** 3,
                                          rel=1e-12)
    assert resonator.effective_mode_volume(field).normalized is None
    with pytest.raises(DomainError):
        resonator.effective_mode_volume(field, wavelength_m=-1.0,
                                        ref_index=3.5)


def test_mode_field_validation():
    ones = np.ones((3, 3))
    with pytest.raises(EmptyGrid):
        resonator.ModeField(permittivity=np.empty((0,)),
                            intensity=np.empty((0,)), cell_volume_m3=1.0)
    with pytest.raises(EmptyGrid):
        resonator.ModeField(permittivity=ones, intensity=np.ones((2, 2)),
                            cell_volume_m3=1.0)
    with pytest.raises(DomainError):
        resonator.ModeField(permittivity=ones, intensity=ones,
                            cell_volume_m3=-1.0)
    with pytest.raises(DomainError):
        resonator.ModeField(permittivity=0.0 * ones, intensity=ones,
                            cell_volume_m3=1.0)
    with pytest.raises(DegenerateField):
        resonator.effective_mode_volume(resonator.ModeField(
            permittivity=ones, intensity=0.0 * ones, cell_volume_m3=1.0))


def test_max_purcell_formula():
    got = resonator.max_purcell(1.9e4, 96.4)
    assert got == pytest.approx(3.0 / (4 * math.pi ** 2) * 1.9e4 / 96.4,
                                rel=1e-14)
    assert 14.5 < got < 15.5
    with pytest.raises(DomainError):
        resonator.max_purcell(-1.0, 96.4)
    with pytest.raises(DomainError):
        resonator.max_purcell(1.9e4, 0.0)
