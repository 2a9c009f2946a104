import math
from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from cascade_entanglement.analytic import (
    SqueezeState, analytic_timeseries, closed_form_duan, closed_form_moments,
    closed_form_photon_number, displacement_amplitudes, squeeze_parameters, squeeze_state,
    su11_factors)
from cascade_entanglement.errors import LossyParams, NonContractive
from cascade_entanglement.fock import (
    FockState, build_effective_hamiltonian, construct_analytic_state, moments_from_state)
from cascade_entanglement.moments import integrate_moments, observables_from_moments
from cascade_entanglement.params import DerivedCouplings, SystemParams, derive_couplings
from cascade_entanglement.timeseries import TimeGrid

REFERENCE = SystemParams()
C = derive_couplings(REFERENCE)


def _expm_vacuum(p, c, t, d=24):
    """Exact propagator on a truncated lattice applied to the vacuum."""
    H = build_effective_hamiltonian(p, c, (d, d)).matrix.toarray()
    v = sla.expm(-1j * H * t)[:, 0]
    return v.reshape(d, d)


def test_identity_at_zero():
    f = su11_factors(C, 0.0)
    assert f.a0 == 1 and f.A_plus == 0


@pytest.mark.parametrize("c", [
    DerivedCouplings(xi=0.3, eta1=0.2, eta2=0.6),    # oscillatory, phi^2 < 0
    DerivedCouplings(xi=0.3, eta1=0.1, eta2=0.2),    # growing, phi^2 > 0
    DerivedCouplings(xi=0.25, eta1=0.2, eta2=0.3),   # degenerate, phi = 0
])
@pytest.mark.parametrize("t", [0.7, 3.0])
def test_factors_vs_matrix_exponential(c, t):
    p = SystemParams(Omega1=0.0, Omega2=0.0)
    amp = _expm_vacuum(p, c, t)
    f = su11_factors(c, t)
    assert amp[0, 0] == pytest.approx(f.a0, abs=1e-10)
    assert amp[1, 1] == pytest.approx(f.a0 * f.A_plus, abs=1e-10)
    assert amp[2, 2] == pytest.approx(f.a0 * f.A_plus ** 2, abs=1e-10)


def test_degenerate_point_closed_form():
    c = DerivedCouplings(xi=0.25, eta1=0.2, eta2=0.3)
    t = np.linspace(0, 10, 7)
    f = su11_factors(c, t)
    np.testing.assert_allclose(f.a0, 1 / (1 + 1j * 0.25 * t), rtol=1e-13)
    np.testing.assert_array_equal(f.A0, f.a0 ** 2)


def test_recurrence_of_a0():
    w = C.oscillation_rate
    assert su11_factors(C, 2 * math.pi / w).a0 == pytest.approx(1, abs=1e-12)
    assert su11_factors(C, math.pi / w).a0 == pytest.approx(-1, abs=1e-12)
    # A+ only cares about wt mod pi
    assert abs(su11_factors(C, math.pi / w).A_plus) < 1e-12


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        su11_factors(C, -1.0)


def test_displacements_vanish():
    f = su11_factors(C, np.array([0.0]))
    assert np.all(displacement_amplitudes(REFERENCE, C, f)[0] == 0)
    p0 = replace(REFERENCE, Omega1=0.0, Omega2=0.0)
    f = su11_factors(C, np.linspace(0, 500, 11))
    a1, a2 = displacement_amplitudes(p0, C, f)
    assert np.all(a1 == 0) and np.all(a2 == 0)


def test_displacements_vs_matrix_exponential():
    p = SystemParams(Omega1=0.3, Omega2=0.4)
    c = DerivedCouplings(xi=0.3, eta1=0.2, eta2=0.6)
    t = 1.3
    amp = _expm_vacuum(p, c, t)
    f = su11_factors(c, t)
    a1, a2 = displacement_amplitudes(p, c, f)
    assert amp[0, 0] != 0
    # <n1,0|psi>/<0,0|psi> = alpha1 / sqrt(1) for the normal-ordered form
    assert amp[1, 0] / amp[0, 0] == pytest.approx(a1, abs=1e-10)
    assert amp[0, 1] / amp[0, 0] == pytest.approx(a2, abs=1e-10)


# values produced by the closed forms at the reference parameters, t = 100
ALPHA1_T100 = -1.03402641566665 - 3.429996771911231j
ALPHA2_T100 = -6.972077724905253 - 15.4311270172922j


def test_frozen_amplitudes_t100():
    s = squeeze_state(REFERENCE, C, su11_factors(C, 100.0))
    assert s.alpha1 == pytest.approx(ALPHA1_T100, rel=1e-12)
    assert s.alpha2 == pytest.approx(ALPHA2_T100, rel=1e-12)
    assert s.r == pytest.approx(0.07962622644389349, rel=1e-12)


def test_frozen_amplitudes_agree_with_moment_engine():
    s = squeeze_state(REFERENCE, C, su11_factors(C, 100.0))
    expected = closed_form_moments(s)
    ts = integrate_moments(REFERENCE, TimeGrid.span(100.0, 0.01))
    m = ts.moments
    assert m.m_a1[-1] == pytest.approx(expected.m_a1, abs=1e-6)
    assert m.m_a2[-1] == pytest.approx(expected.m_a2, abs=1e-6)


@pytest.mark.parametrize("A, r, eps", [
    (0, 0, 0),
    (-0.5, math.atanh(0.5), 0),
    (-0.16j, math.atanh(0.16), math.pi / 2),
    (0.3, math.atanh(0.3), math.pi),
])
def test_squeeze_parameters_examples(A, r, eps):
    rr, ee = squeeze_parameters(A)
    assert rr == pytest.approx(r, abs=1e-15)
    assert ee == pytest.approx(eps, abs=1e-15)


def test_squeeze_examples_decimal():
    assert squeeze_parameters(-0.5)[0] == pytest.approx(0.549306, abs=1e-6)
    assert squeeze_parameters(-0.16j)[0] == pytest.approx(0.161387, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(mag=st.floats(0, 0.99), ang=st.floats(-math.pi, math.pi))
def test_squeeze_reconstructs(mag, ang):
    A = mag * np.exp(1j * ang)
    r, eps = squeeze_parameters(A)
    assert -np.exp(1j * eps) * np.tanh(r) == pytest.approx(A, abs=1e-12)
    assert -math.pi < eps <= math.pi


@pytest.mark.parametrize("A", [1.0, -1j, 1.5])
def test_squeeze_noncontractive(A):
    with pytest.raises(NonContractive):
        squeeze_parameters(A)


def _state(r, eps=0.0, a1=0j, a2=0j):
    return SqueezeState(np.asarray(r), np.asarray(eps), np.asarray(a1), np.asarray(a2))


def test_photon_number_examples():
    assert closed_form_photon_number(_state(0.16)) == pytest.approx(0.051638, abs=1e-6)
    assert closed_form_photon_number(_state(0.0, a1=1, a2=1)) == pytest.approx(2)
    assert closed_form_photon_number(_state(0.0, a1=0.3 + 0.4j, a2=2j)) == pytest.approx(4.25)


@pytest.mark.parametrize("r, eps, D", [
    (0.0, 0.3, 2.0),
    (0.1, math.pi / 2, 1.637462),
    (0.1, 0.0, 2.040134),
])
def test_duan_examples(r, eps, D):
    assert closed_form_duan(r, eps) == pytest.approx(D, abs=1e-6)


def test_duan_has_no_drive_dependence():
    t = np.linspace(0, 300, 31)
    d_on = analytic_timeseries(REFERENCE, TimeGrid.span(300, 10)).duan
    d_off = analytic_timeseries(replace(REFERENCE, Omega1=0, Omega2=0), TimeGrid.span(300, 10)).duan
    assert len(t) == len(d_on)
    np.testing.assert_array_equal(d_on, d_off)


def test_single_row_grid():
    ts = analytic_timeseries(REFERENCE, TimeGrid(dt=0.01, count=1))
    assert len(ts) == 1
    assert ts.N[0] == 0 and ts.duan[0] == 2


def test_lossy_rejected():
    with pytest.raises(LossyParams):
        analytic_timeseries(replace(REFERENCE, kappa=0.01), TimeGrid.span(1, 0.1))


@settings(max_examples=15, deadline=None)
@given(r=st.floats(0, 0.3), eps=st.floats(-3.1, 3.1),
       a1=st.complex_numbers(max_magnitude=1), a2=st.complex_numbers(max_magnitude=1))
def test_closed_forms_vs_fock_construction(r, eps, a1, a2):
    s = _state(r, eps, a1, a2)
    A = -np.exp(1j * eps) * np.tanh(r)
    mom = moments_from_state(construct_analytic_state(a1, a2, A, (30, 30)))
    cf = closed_form_moments(s)
    for name in ("m_a1", "m_a2", "n1", "n2", "c12"):
        assert getattr(mom, name) == pytest.approx(complex(getattr(cf, name)), abs=1e-9)
    N, D = observables_from_moments(mom)
    assert N == pytest.approx(float(closed_form_photon_number(s)), abs=1e-9)
    if a1 == 0 and a2 == 0:
        assert D == pytest.approx(float(closed_form_duan(r, eps)), abs=1e-9)


def test_off_quarter_phase_uses_moments():
    grid = TimeGrid.span(100, 1.0)
    ts = analytic_timeseries(REFERENCE, grid, psi=0.3)
    _, D = observables_from_moments(ts.moments, 0.3)
    np.testing.assert_allclose(ts.duan, D)
    assert not np.allclose(ts.duan, analytic_timeseries(REFERENCE, grid).duan)


def test_timeseries_columns_consistent():
    ts = analytic_timeseries(REFERENCE, TimeGrid.span(100, 1.0))
    np.testing.assert_allclose(ts.n1 + ts.n2, ts.N, rtol=1e-14)
    assert set(ts.extras) >= {"r", "epsilon"}


def test_fock_state_normalised_by_construction():
    f = su11_factors(C, 50.0)
    s = construct_analytic_state(0, 0, complex(f.A_plus), (40, 40))
    assert isinstance(s, FockState)
    assert s.norm() == pytest.approx(1, abs=1e-14)
