"""Closed-form lossless evolution of the two-mode field.

The effective Hamiltonian with the atom frozen in its middle level is an
element of su(1,1) plus a commuting mode-difference term, so ``exp(-iHt)``
factorises into normal-ordered exponentials. Starting from the two-mode
vacuum, the field is a displaced two-mode squeezed state whose photon
number and EPR-variance sum follow in closed form.

Every function here accepts scalar or array times and broadcasts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LossyParams, NonContractive
from .moments import MomentVector, observables_from_moments
from .params import DerivedCouplings, SystemParams, derive_couplings, validate_params
from .timeseries import TimeSeries, TimeGrid

_SERIES_CUTOFF = 1e-12


@dataclass(frozen=True)
class SU11Factors:
    """Disentangling factors of ``exp(-iHt)`` at time(s) ``t``.

    ``A_plus`` multiplies the pair-creation generator and equals ``A_minus``;
    ``A0 = a0**2`` multiplies the Cartan generator in log form.
    """

    t: np.ndarray
    phi_sq: np.ndarray
    a0: np.ndarray
    A_plus: np.ndarray
    A0: np.ndarray


@dataclass(frozen=True)
class SqueezeState:
    """Squeeze magnitude/phase and coherent amplitudes of the evolved field."""

    r: np.ndarray
    epsilon: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray


def _cosh_sinhc(z):
    """cosh(sqrt(z)) and sinh(sqrt(z))/sqrt(z) for real ``z`` of either sign."""
    z = np.asarray(z, dtype=float)
    ch = np.empty_like(z)
    sc = np.empty_like(z)

    small = np.abs(z) < _SERIES_CUTOFF
    pos = (z > 0) & ~small
    neg = (z < 0) & ~small

    zs = z[small]
    ch[small] = 1 + zs / 2 + zs ** 2 / 24 + zs ** 3 / 720
    sc[small] = 1 + zs / 6 + zs ** 2 / 120 + zs ** 3 / 5040

    s = np.sqrt(z[pos])
    ch[pos] = np.cosh(s)
    sc[pos] = np.sinh(s) / s

    s = np.sqrt(-z[neg])
    ch[neg] = np.cos(s)
    sc[neg] = np.sin(s) / s
    return ch, sc


def su11_factors(c: DerivedCouplings, t) -> SU11Factors:
    """Evaluate ``phi**2``, ``a0``, ``A+`` and ``A0`` at time(s) ``t >= 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be nonnegative")
    m = c.mean_shift
    phi_sq = (c.xi ** 2 - m ** 2) * t ** 2
    ch, sc = _cosh_sinhc(phi_sq)
    a0 = 1.0 / (ch + 1j * t * m * sc)
    A_plus = -1j * c.xi * t * sc * a0
    return SU11Factors(t=t, phi_sq=phi_sq, a0=a0, A_plus=A_plus, A0=a0 * a0)


def displacement_amplitudes(p: SystemParams, c: DerivedCouplings, f: SU11Factors):
    """Coherent amplitudes ``(alpha1, alpha2)`` multiplying ``a1^dag``, ``a2^dag``.

    The phase ``exp(-+i t (eta1 - eta2) / 2)`` comes from the mode-difference
    factor of the propagator.
    """
    b1, b2 = p.beta1, p.beta2
    half_diff = 0.5 * f.t * (c.eta1 - c.eta2)
    alpha1 = b2 * f.A_plus + b1 * (f.a0 * np.exp(-1j * half_diff) - 1.0)
    alpha2 = b1 * f.A_plus + b2 * (f.a0 * np.exp(1j * half_diff) - 1.0)
    return alpha1, alpha2


def squeeze_parameters(A_plus):
    """Invert ``A+ = -exp(i eps) tanh(r)``.

    Returns ``(r, eps)`` with ``eps`` in ``(-pi, pi]`` and ``(0, 0)`` where
    ``A+`` vanishes.

    Raises
    ------
    NonContractive
        If ``|A+| >= 1``.
    """
    A_plus = np.asarray(A_plus, dtype=complex)
    mag = np.abs(A_plus)
    if np.any(mag >= 1):
        raise NonContractive(f"|A+| = {mag.max()} >= 1")
    r = np.arctanh(mag)
    eps = np.angle(-A_plus)
    eps = np.where(eps <= -np.pi, np.pi, eps)
    eps = np.where(mag == 0, 0.0, eps)
    return r, eps


def squeeze_state(p: SystemParams, c: DerivedCouplings, f: SU11Factors) -> SqueezeState:
    alpha1, alpha2 = displacement_amplitudes(p, c, f)
    r, eps = squeeze_parameters(f.A_plus)
    return SqueezeState(r=r, epsilon=eps, alpha1=alpha1, alpha2=alpha2)


def closed_form_photon_number(s: SqueezeState):
    """Total mean photon number of the displaced two-mode squeezed state."""
    r, eps = s.r, s.epsilon
    ch2 = np.cosh(r) ** 2
    pair = s.alpha1 * s.alpha2 * np.exp(-1j * eps)
    bracket = ((np.abs(s.alpha1) ** 2 + np.abs(s.alpha2) ** 2) * np.cosh(2 * r)
               - 2.0 * pair.real * np.sinh(2 * r))
    return 2.0 * np.sinh(r) ** 2 + ch2 * bracket


def closed_form_duan(r, epsilon):
    """EPR variance sum at quadrature phase pi/4; below 2 means entangled."""
    r = np.asarray(r, dtype=float)
    return 2.0 * (np.cosh(2 * r) - np.sin(epsilon) * np.sinh(2 * r))


def closed_form_moments(s: SqueezeState) -> MomentVector:
    """First and second moments of ``S(r e^{i eps}) D(alpha cosh r)|0,0>``.

    Uses ``S^dag a1 S = a1 cosh r - e^{i eps} a2^dag sinh r`` (and 1<->2);
    the displaced amplitudes are ``beta_j = alpha_j cosh r``.
    """
    ch, sh = np.cosh(s.r), np.sinh(s.r)
    ph = np.exp(1j * s.epsilon)
    b1, b2 = s.alpha1 * ch, s.alpha2 * ch
    m1 = b1 * ch - ph * sh * np.conj(b2)
    m2 = b2 * ch - ph * sh * np.conj(b1)
    cross = 2.0 * ch * sh * (np.conj(ph) * b1 * b2).real
    n1 = ch ** 2 * np.abs(b1) ** 2 + sh ** 2 * (np.abs(b2) ** 2 + 1) - cross
    n2 = ch ** 2 * np.abs(b2) ** 2 + sh ** 2 * (np.abs(b1) ** 2 + 1) - cross
    c12 = (ch ** 2 * b1 * b2
           - ch * sh * ph * (np.abs(b1) ** 2 + np.abs(b2) ** 2 + 1)
           + ph ** 2 * sh ** 2 * np.conj(b1 * b2))
    return MomentVector(m_a1=m1, m_a2=m2, n1=n1, n2=n2, c12=c12)


def analytic_timeseries(p: SystemParams, grid: TimeGrid, psi: float = np.pi / 4) -> TimeSeries:
    """Closed-form observables on ``grid``.

    Rows carry ``n1, n2, N, duan`` plus the extras ``r, epsilon`` and the
    real/imaginary parts of both coherent amplitudes. At ``psi = pi/4`` the
    variance sum comes from the squeeze parameters alone; other phases go
    through the closed-form moments.

    Raises
    ------
    LossyParams
        If ``p.kappa != 0``.
    """
    p = validate_params(p)
    if p.kappa != 0:
        raise LossyParams(f"closed forms are lossless, got kappa={p.kappa}")
    c = derive_couplings(p)
    t = grid.times()
    s = squeeze_state(p, c, su11_factors(c, t))
    mom = closed_form_moments(s)

    N = closed_form_photon_number(s)
    n1 = np.asarray(mom.n1, dtype=float)
    n2 = N - n1
    if np.isclose(psi, np.pi / 4, rtol=0, atol=1e-15):
        duan = closed_form_duan(s.r, s.epsilon)
    else:
        _, duan = observables_from_moments(mom, psi)

    extras = {
        "r": s.r, "epsilon": s.epsilon,
        "alpha1_re": s.alpha1.real, "alpha1_im": s.alpha1.imag,
        "alpha2_re": s.alpha2.real, "alpha2_im": s.alpha2.imag,
    }
    return TimeSeries(t=t, n1=n1, n2=n2, N=N, duan=np.asarray(duan, dtype=float),
                      grid=grid, extras=extras, moments=mom)
