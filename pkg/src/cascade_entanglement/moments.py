"""Moment equations of the lossy, driven two-mode cavity.

The master equation is quadratic in the field operators, so the means
<a1>, <a2> and the second moments <a1^dag a1>, <a2^dag a2>, <a1 a2> obey a
closed linear system. Conjugate moments are never stored: they are taken as
complex conjugates, which keeps the occupations exactly real.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rk4 import rk4_step
from .errors import NonFiniteState, StepTooLarge
from .params import DerivedCouplings, SystemParams, derive_couplings, validate_params
from .timeseries import TimeGrid, TimeSeries

#: occupations below this are treated as an integrator failure
NEGATIVE_OCCUPATION_TOL = -1e-9


@dataclass(frozen=True)
class MomentVector:
    """``<a1>, <a2>, <a1^dag a1>, <a2^dag a2>, <a1 a2>``; fields may be arrays."""

    m_a1: complex = 0j
    m_a2: complex = 0j
    n1: float = 0.0
    n2: float = 0.0
    c12: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.m_a1, self.m_a2, self.n1, self.n2, self.c12], dtype=complex)

    @classmethod
    def from_array(cls, y) -> "MomentVector":
        return cls(m_a1=y[0], m_a2=y[1], n1=np.real(y[2]), n2=np.real(y[3]), c12=y[4])

    def swapped(self) -> "MomentVector":
        return MomentVector(self.m_a2, self.m_a1, self.n2, self.n1, self.c12)


def drive_constants(p: SystemParams, c: DerivedCouplings) -> tuple[float, float]:
    """Coefficients of ``(a_j + a_j^dag)`` once the displaced operators are expanded."""
    L1 = c.eta1 * p.beta1 + c.xi * p.beta2
    L2 = c.eta2 * p.beta2 + c.xi * p.beta1
    return L1, L2


def _make_rhs(p: SystemParams, c: DerivedCouplings):
    xi, eta1, eta2, kappa = c.xi, c.eta1, c.eta2, p.kappa
    L1, L2 = drive_constants(p, c)
    decay_pair = 2 * kappa + 1j * (eta1 + eta2)
    decay1 = kappa + 1j * eta1
    decay2 = kappa + 1j * eta2

    def rhs(y):
        m1, m2, n1, n2, c12 = y
        n1, n2 = n1.real, n2.real
        # -i[xi(c12* - c12) + L(m* - m)] is real: -2 xi Im c12 - 2 L Im m
        dn1 = -2 * xi * c12.imag - 2 * L1 * m1.imag - 2 * kappa * n1
        dn2 = -2 * xi * c12.imag - 2 * L2 * m2.imag - 2 * kappa * n2
        dc12 = -1j * (xi * (n1 + n2 + 1) + L1 * m2 + L2 * m1) - decay_pair * c12
        dm1 = -1j * (xi * np.conj(m2) + L1) - decay1 * m1
        dm2 = -1j * (xi * np.conj(m1) + L2) - decay2 * m2
        return np.array([dm1, dm2, dn1, dn2, dc12])

    return rhs


def moment_rhs(p: SystemParams, c: DerivedCouplings, m: MomentVector) -> MomentVector:
    """Time derivative of every stored moment."""
    return MomentVector.from_array(_make_rhs(p, c)(m.as_array()))


def integrate_moments(p: SystemParams, grid: TimeGrid, m0: MomentVector | None = None,
                      psi: float = np.pi / 4) -> TimeSeries:
    """RK4-integrate the moment equations with step ``grid.dt``.

    Starts from ``m0`` (two-mode vacuum by default) at ``grid.t0`` and
    samples every step.

    Raises
    ------
    StepTooLarge
        An occupation dropped below ``NEGATIVE_OCCUPATION_TOL``.
    NonFiniteState
        The state overflowed or became NaN.
    """
    p = validate_params(p)
    c = derive_couplings(p)
    rhs = _make_rhs(p, c)
    y = (m0 or MomentVector()).as_array()
    if not np.all(np.isfinite(y)):
        raise NonFiniteState("initial moments are not finite")

    out = np.empty((grid.count, 5), dtype=complex)
    out[0] = y
    dt = grid.dt
    # overflow is reported as NonFiniteState below, not as a numpy warning
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, grid.count):
            y = rk4_step(rhs, y, dt)
            if not np.all(np.isfinite(y)):
                raise NonFiniteState(f"moments diverged at step {k}")
            if y[2].real < NEGATIVE_OCCUPATION_TOL or y[3].real < NEGATIVE_OCCUPATION_TOL:
                raise StepTooLarge(f"negative occupation at t={grid.t0 + k * dt}; reduce dt={dt}")
            out[k] = y

    mom = MomentVector.from_array(out.T)
    N, duan = observables_from_moments(mom, psi)
    return TimeSeries(t=grid.times(), n1=np.asarray(mom.n1), n2=np.asarray(mom.n2),
                      N=N, duan=duan, grid=grid, moments=mom)


def observables_from_moments(m: MomentVector, psi: float = np.pi / 4):
    """Total photon number and EPR variance sum ``Var(x1 + x2) + Var(p1 - p2)``.

    Quadratures are taken at reference phase ``psi``. The variance sum is
    evaluated from centred moments, which is algebraically identical to
    subtracting ``<u>^2 + <v>^2`` from the raw second moments but avoids
    cancellation when the displacement is large.
    """
    n1 = np.real(m.n1)
    n2 = np.real(m.n2)
    N = n1 + n2
    var1 = n1 - np.abs(m.m_a1) ** 2
    var2 = n2 - np.abs(m.m_a2) ** 2
    cov12 = m.c12 - m.m_a1 * m.m_a2
    duan = 2.0 + 2.0 * (var1 + var2) + 4.0 * np.real(np.exp(-2j * psi) * cov12)
    return N, duan
