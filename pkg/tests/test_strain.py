"""Piezo-strain tuning chain against independent oracles."""

import math

import numpy as np
import pytest
from scipy import constants

from ringqed import materials, strain
from ringqed.errors import DomainError, StrainOutOfRange, VoltageLimitExceeded


@pytest.fixture(scope="module")
def db():
    return materials.load_materials()


@pytest.fixture(scope="module")
def e_dev(db):
    return materials.rotate_piezo_to_xcut(db.film_piezo_zcut.matrix)


def _chain_oracle(field, e_dev, compliance, k):
    # same algebra, written as explicit scalar loops
    stress = [sum(e_dev[i][j] * field[i] for i in range(3)) for j in range(6)]
    eps = [-k * sum(compliance[j][m] * stress[m] for m in range(6))
           for j in range(6)]
    return np.array(eps)


def test_strain_from_field_matches_matrix_chain_oracle(db, e_dev):
    rng = np.random.default_rng(31)
    comp = db.host_compliance.matrix
    for _ in range(1000):
        field = rng.uniform(-2e7, 2e7, size=3)
        k = float(rng.choice([1.0, 2.66]))
        got = strain.strain_from_field(
            field, e_dev, db.host_compliance,
            strain.MechanicalContext(clamping_factor=k, label="test")).voigt
        want = _chain_oracle(field, e_dev, comp, k)
        assert np.abs(got - want).max() < 1e-10


def test_strain_from_field_validation(db, e_dev):
    with pytest.raises(DomainError):
        strain.strain_from_field(np.zeros((2,)), e_dev, db.host_compliance)
    with pytest.raises(StrainOutOfRange):
        # enormous field drives the strain past the linear-response bound
        strain.strain_from_field(np.array([0.0, 0.0, 5e9]), e_dev,
                                 db.host_compliance)


def test_field_from_voltage_geometry():
    f = strain.field_from_voltage(10.0, 5e-6)
    np.testing.assert_allclose(f, [0.0, 0.0, 2e6])
    f = strain.field_from_voltage(-10.0, 2e-6, direction=(3.0, 0.0, 4.0))
    np.testing.assert_allclose(f, [-3e6, 0.0, -4e6])
    with pytest.raises(DomainError):
        strain.field_from_voltage(10.0, 0.0)
    with pytest.raises(DomainError):
        strain.field_from_voltage(10.0, 5e-6, direction=(0, 0, 0))


def test_pikus_bir_positive_homogeneity(db):
    rng = np.random.default_rng(32)
    for _ in range(200):
        v = rng.uniform(-1e-4, 1e-4, size=6)
        c = float(rng.uniform(0.05, 50.0))
        base = strain.pikus_bir_shift(strain.StrainState(voigt=v),
                                      db.host_potentials)
        scaled = strain.pikus_bir_shift(strain.StrainState(voigt=c * v),
                                        db.host_potentials)
        assert abs(scaled - c * base) <= 1e-12 * max(abs(scaled), 1e-30)


def test_pikus_bir_hydrostatic_closed_form(db):
    rng = np.random.default_rng(33)
    pot = db.host_potentials
    for _ in range(200):
        e = float(rng.uniform(-3e-3, 3e-3))
        state = strain.StrainState(voigt=np.array([e, e, e, 0, 0, 0.0]))
        got = strain.pikus_bir_shift(state, pot)
        want = (pot.a_c + pot.a_v) * 3.0 * e
        assert abs(got - want) <= 1e-12 * max(abs(want), 1e-30)


def test_pikus_bir_shear_lowers_transition(db):
    # the sqrt(Q^2 + |R|^2) branch always subtracts
    pot = db.host_potentials
    sheared = strain.pikus_bir_shift(
        strain.StrainState(voigt=np.array([1e-4, -1e-4, 0, 0, 0, 2e-4])),
        pot)
    assert sheared < 0.0


def test_wavelength_shift_sign_and_magnitude():
    # at 910 nm, 1 meV moves the line by lambda^2 dE / hc ~ 0.61 nm, red
    # for a negative (shrinking-gap) energy shift
    hc = constants.h * constants.c / constants.e
    got = strain.wavelength_shift(-1e-3, 910e-9)
    assert got == pytest.approx(910e-9 ** 2 * 1e-3 / hc, rel=1e-12)
    assert got > 0.0
    with pytest.raises(DomainError):
        strain.wavelength_shift(1e-3, 0.0)


def test_strain_state_validation():
    with pytest.raises(DomainError):
        strain.StrainState(voigt=np.zeros(5))
    with pytest.raises(StrainOutOfRange):
        strain.StrainState(voigt=np.array([2e-2, 0, 0, 0, 0, 0.0]))
    s = strain.StrainState(voigt=np.array([1e-3, 2e-3, 3e-3, 0, 0, 0.0]))
    assert s.hydrostatic == pytest.approx(6e-3)


def test_mechanical_context_validation():
    with pytest.raises(DomainError):
        strain.MechanicalContext(clamping_factor=0.5)
    assert strain.MechanicalContext(clamping_factor=2.66).clamping_factor \
        == 2.66


def test_tuning_curve_is_linear_to_machine_precision():
    for rate in (0.47, 3.01, 1.89, 0.57):
        cal = strain.TuningCalibration(base_wavelength_m=912.3e-9,
                                       rate_pm_per_v=rate)
        pts = strain.tuning_curve(cal, np.linspace(-500.0, 500.0, 2001))
        v = np.array([p[0] for p in pts])
        lam = np.array([p[1] for p in pts])
        span = lam.max() - lam.min()
        slope = (lam[-1] - lam[0]) / (v[-1] - v[0])
        dev = np.abs(lam - (lam[0] + slope * (v - v[0]))).max()
        assert dev < 1e-12 * span
        assert slope == pytest.approx(rate * 1e-12, rel=1e-9)


def test_tuning_curve_respects_limits_and_clamping():
    cal = strain.TuningCalibration(base_wavelength_m=912.3e-9,
                                   rate_pm_per_v=0.57, clamping_factor=2.66,
                                   voltage_min_v=-250.0, voltage_max_v=250.0)
    assert cal.effective_rate_pm_per_v == pytest.approx(0.57 * 2.66)
    (v, lam), = strain.tuning_curve(cal, 100.0)
    assert lam - cal.base_wavelength_m == pytest.approx(
        0.57 * 2.66 * 100.0 * 1e-12, rel=1e-12)
    with pytest.raises(VoltageLimitExceeded):
        strain.tuning_curve(cal, [0.0, 251.0])
    with pytest.raises(DomainError):
        strain.TuningCalibration(base_wavelength_m=912.3e-9,
                                 rate_pm_per_v=0.57, voltage_min_v=10.0,
                                 voltage_max_v=-10.0)


def test_predicted_rate_composes_the_full_chain(db):
    gap, lam0 = 5e-6, 912.3e-9
    got = strain.predicted_tuning_rate(db, gap, lam0)

    e_dev = materials.rotate_piezo_to_xcut(db.film_piezo_zcut.matrix)
    field = strain.field_from_voltage(1.0, gap)
    state = strain.strain_from_field(field, e_dev, db.host_compliance)
    want = strain.wavelength_shift(
        strain.pikus_bir_shift(state, db.host_potentials), lam0) / 1e-12
    assert got == pytest.approx(want, rel=1e-12)
    # ideal transfer overshoots the calibrated clamped device, same sign
    assert abs(got) > 0.47
    # released membranes respond stronger by the clamping factor exactly
    boosted = strain.predicted_tuning_rate(db, gap, lam0,
                                           clamping_factor=2.66)
    assert boosted == pytest.approx(2.66 * got, rel=1e-9)
