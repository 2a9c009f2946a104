"""Physical parameters and the effective couplings derived from them.

All rates are angular frequencies in units of ``g1``; times are in units of
``1/g1``. The defaults reproduce the reference configuration
``g1=1, g2=2, Omega=200, Omega1=10, Omega2=40, delta=1000``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import DegenerateDenominator, NegativeRate, NonFiniteInput

#: ratio delta / max(other rates) above which the dispersive regime is reported
LARGE_DETUNING_RATIO = 10.0


@dataclass(frozen=True)
class SystemParams:
    """Inputs of the driven cascade-atom / two-mode cavity model.

    Parameters
    ----------
    g1, g2 : float
        Atom-field couplings on the b<->c and a<->b transitions.
    Omega : float
        Rabi frequency of the resonant a<->c drive.
    Omega1, Omega2 : float
        Rabi frequencies of the classical drives on b<->c and a<->b.
    delta : float
        Common detuning.
    kappa : float
        Cavity amplitude decay rate, identical for both modes.
    large_detuning : bool or None
        Filled in by :func:`validate_params`; ``None`` until validated.
    """

    g1: float = 1.0
    g2: float = 2.0
    Omega: float = 200.0
    Omega1: float = 10.0
    Omega2: float = 40.0
    delta: float = 1000.0
    kappa: float = 0.0
    large_detuning: bool | None = None

    @property
    def beta1(self) -> float:
        """Field shift Omega1/g1 of the displaced mode-1 operator."""
        return self.Omega1 / self.g1

    @property
    def beta2(self) -> float:
        return self.Omega2 / self.g2

    def swapped(self) -> "SystemParams":
        """Return the parameters with the roles of the two modes exchanged."""
        return replace(self, g1=self.g2, g2=self.g1, Omega1=self.Omega2,
                       Omega2=self.Omega1, large_detuning=None)


@dataclass(frozen=True)
class DerivedCouplings:
    """Effective pair-creation coupling ``xi`` and Stark shifts ``eta1, eta2``."""

    xi: float
    eta1: float
    eta2: float

    @property
    def mean_shift(self) -> float:
        """(eta1 + eta2) / 2, the coefficient competing with ``xi``."""
        return 0.5 * (self.eta1 + self.eta2)

    @property
    def oscillation_rate(self) -> complex:
        """sqrt(mean_shift**2 - xi**2); real in the oscillatory regime."""
        w2 = self.mean_shift ** 2 - self.xi ** 2
        return math.sqrt(w2) if w2 >= 0 else 1j * math.sqrt(-w2)


_RATES = ("delta", "kappa", "Omega", "Omega1", "Omega2")


def validate_params(p: SystemParams) -> SystemParams:
    """Check ``p`` and return a copy with ``large_detuning`` populated.

    Raises
    ------
    NonFiniteInput
        Any field is NaN or infinite.
    NegativeRate
        A coupling is not strictly positive, or a rate is negative.
    DegenerateDenominator
        ``delta == Omega``, where the effective couplings diverge.
    """
    for f in fields(SystemParams):
        if f.name == "large_detuning":
            continue
        value = getattr(p, f.name)
        if not math.isfinite(value):
            raise NonFiniteInput(f"{f.name}={value!r} is not finite")
    if p.g1 <= 0 or p.g2 <= 0:
        raise NegativeRate(f"couplings must be positive, got g1={p.g1}, g2={p.g2}")
    for name in _RATES:
        if getattr(p, name) < 0:
            raise NegativeRate(f"{name}={getattr(p, name)} must be nonnegative")
    if p.delta ** 2 - p.Omega ** 2 == 0:
        raise DegenerateDenominator(f"delta == Omega == {p.delta}")
    scale = max(p.Omega, p.Omega1, p.Omega2, p.g1, p.g2)
    return replace(p, large_detuning=p.delta >= LARGE_DETUNING_RATIO * scale)


def derive_couplings(p: SystemParams) -> DerivedCouplings:
    """Effective couplings of the atom-in-``b`` Hamiltonian.

    ``xi = 2 g1 g2 Omega / D``, ``eta_j = 2 g_j**2 delta / D`` with
    ``D = delta**2 - Omega**2``.
    """
    den = p.delta * p.delta - p.Omega * p.Omega
    return DerivedCouplings(
        xi=2.0 * p.g1 * p.g2 * p.Omega / den,
        eta1=2.0 * p.g1 * p.g1 * p.delta / den,
        eta2=2.0 * p.g2 * p.g2 * p.delta / den,
    )
