"""Purcell arithmetic and deterministic measurement synthesis."""

import numpy as np
import pytest

from ringqed import cqed
from ringqed.errors import DomainError, EmptyGrid, PeakOverlap


def _state(**kw):
    base = dict(qd_wavelength_nm=912.3, cavity_wavelength_nm=908.75,
                cavity_linewidth_nm=0.04809, purcell_peak=3.52,
                free_rate_per_ns=0.42)
    base.update(kw)
    return cqed.EmitterCavityState(**base)


def test_purcell_from_rates_and_beta():
    f = cqed.purcell_from_rates(1.90, 0.42)
    assert f == pytest.approx(1.90 / 0.42 - 1.0, rel=1e-15)
    assert f == pytest.approx(3.52, abs=0.01)
    b = cqed.beta_factor(3.52)
    assert b == pytest.approx(3.52 / 4.52, rel=1e-15)
    assert b == pytest.approx(0.778, abs=1e-3)
    assert cqed.beta_factor(0.0) == 0.0
    with pytest.raises(DomainError):
        cqed.purcell_from_rates(0.0, 0.42)
    with pytest.raises(DomainError):
        cqed.beta_factor(-0.1)


def test_purcell_lorentzian_rolloff():
    st = _state()
    assert cqed.purcell_at_detuning(st, 0.0) == 3.52
    half = cqed.purcell_at_detuning(st, st.cavity_linewidth_nm / 2.0)
    assert half == pytest.approx(3.52 / 2.0, rel=1e-12)
    far = cqed.purcell_at_detuning(st, 100 * st.cavity_linewidth_nm)
    assert far < 3.52 / 10000 * 1.01
    # symmetric in the detuning sign
    assert cqed.purcell_at_detuning(st, 0.1) == \
        cqed.purcell_at_detuning(st, -0.1)


def test_decay_rate_at_detuning():
    st = _state()
    assert cqed.decay_rate_at_detuning(st, 0.0) == \
        pytest.approx(0.42 * 4.52, rel=1e-12)
    assert cqed.decay_rate_at_detuning(st, 1e6) == \
        pytest.approx(0.42, rel=1e-9)
    assert st.detuning_nm == pytest.approx(3.55, abs=1e-9)


def test_intensity_enhancement_calibrated_contrast():
    # kappa from Q = 1.9e4 at the cavity line; the residual collection
    # floor 0.0734 is calibrated so a 0.41 nm strain detuning gives the
    # observed tenfold contrast
    st = _state(cavity_linewidth_nm=908.75 / 1.9e4)
    ratio = cqed.intensity_enhancement(st, 0.0, 0.41,
                                       offres_collection=0.0734217)
    assert ratio == pytest.approx(10.0, abs=0.05)


def test_intensity_enhancement_trivial_cases():
    st = _state()
    assert cqed.intensity_enhancement(st, 0.2, 0.2, 0.05) == 1.0
    flat = _state(purcell_peak=0.0)
    assert cqed.intensity_enhancement(flat, 0.0, 5.0, 0.0) == 1.0
    assert cqed.intensity_enhancement(flat, 0.0, 5.0, 0.3) == 1.0
    with pytest.raises(DomainError):
        cqed.intensity_enhancement(st, 0.0, 1e9, offres_collection=-0.1)
    with pytest.raises(DomainError):
        # reference detuning so large the Lorentzian underflows to zero:
        # the off-resonance channel then collects nothing without a floor
        cqed.intensity_enhancement(st, 0.0, 1e160, offres_collection=0.0)


def test_state_validation():
    with pytest.raises(DomainError):
        _state(qd_wavelength_nm=-1.0)
    with pytest.raises(DomainError):
        _state(cavity_linewidth_nm=0.0)
    with pytest.raises(DomainError):
        _state(purcell_peak=-0.5)
    with pytest.raises(DomainError):
        _state(free_rate_per_ns=0.0)


def test_synthesize_decay_noiseless_total():
    st = _state()
    edges = np.linspace(0.0, 40.0, 2001)
    hist = cqed.synthesize_decay(st, 0.0, 0.0422, edges, amplitude=3e5)
    rate = cqed.decay_rate_at_detuning(st, 0.0)
    assert hist.counts.sum() == pytest.approx(3e5 / rate, rel=1e-10)
    assert hist.irf_sigma_ns == 0.0422
    assert hist.counts.min() >= 0.0


def test_synthesize_decay_deterministic():
    st = _state()
    edges = np.linspace(0.0, 12.5, 626)
    a = cqed.synthesize_decay(st, 0.0, 0.0422, edges, 3e5, seed=7)
    b = cqed.synthesize_decay(st, 0.0, 0.0422, edges, 3e5, seed=7)
    c = cqed.synthesize_decay(st, 0.0, 0.0422, edges, 3e5, seed=8)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)
    # integer counts once noise is applied
    assert np.all(a.counts == np.round(a.counts))


def test_synthesize_decay_poisson_scale():
    # fluctuation size across seeds matches counting statistics
    st = _state()
    edges = np.linspace(0.0, 12.5, 626)
    clean = cqed.synthesize_decay(st, 0.0, 0.0422, edges, 3e5)
    peak = int(np.argmax(clean.counts))
    draws = np.array([cqed.synthesize_decay(st, 0.0, 0.0422, edges, 3e5,
                                            seed=s).counts[peak]
                      for s in range(300)])
    mu = clean.counts[peak]
    assert draws.mean() == pytest.approx(mu, abs=4 * np.sqrt(mu / 300))
    assert draws.std() == pytest.approx(np.sqrt(mu), rel=0.2)


def test_synthesize_decay_validation():
    st = _state()
    with pytest.raises(EmptyGrid):
        cqed.synthesize_decay(st, 0.0, 0.04, np.array([1.0]), 1e5)
    with pytest.raises(DomainError):
        cqed.synthesize_decay(st, 0.0, -0.1, np.linspace(0, 10, 11), 1e5)
    with pytest.raises(DomainError):
        cqed.synthesize_decay(st, 0.0, 0.04, np.linspace(0, 10, 11), -1.0)


def test_synthesize_g2_comb_structure():
    hist = cqed.synthesize_g2(0.012, 0.55, 12.5, 6, 2e5)
    assert hist.repetition_ns == 12.5
    assert hist.bin_width_ns == pytest.approx(0.05, rel=1e-9)
    # total counts: 12 side peaks plus the suppressed central one
    assert hist.counts.sum() == pytest.approx((12 + 0.012) * 2e5, rel=1e-3)
    # central window is strongly suppressed against any side window
    period = 12.5
    central = hist.counts[np.abs(hist.delay_ns) < period / 2].sum()
    side = hist.counts[np.abs(hist.delay_ns - period) < period / 2].sum()
    assert central < 0.02 * side


def test_synthesize_g2_deterministic():
    a = cqed.synthesize_g2(0.012, 0.55, 12.5, 4, 1e5, seed=42)
    b = cqed.synthesize_g2(0.012, 0.55, 12.5, 4, 1e5, seed=42)
    c = cqed.synthesize_g2(0.012, 0.55, 12.5, 4, 1e5, seed=43)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)


def test_synthesize_g2_validation():
    with pytest.raises(PeakOverlap):
        cqed.synthesize_g2(0.012, 4.0, 12.5, 4, 1e5)
    with pytest.raises(DomainError):
        cqed.synthesize_g2(-0.01, 0.55, 12.5, 4, 1e5)
    with pytest.raises(DomainError):
        cqed.synthesize_g2(0.012, 0.55, 12.5, 0, 1e5)
    with pytest.raises(DomainError):
        cqed.synthesize_g2(0.012, 0.55, 12.5, 4, 0.0)
