"""Truncated Fock-space ground truth.

Brute-force representations of the effective field Hamiltonian, the full
three-level cascade Hamiltonian, the lossy master equation and the
closed-form field state. Nothing here uses the su(1,1) algebra, so these
routines independently check the closed forms and the moment equations.

Basis order is atom-major (levels a, b, c -> 0, 1, 2), then mode-1 photon
number, then mode-2 photon number, row-major. A field-only state with
truncations ``(d1, d2)`` stores amplitude ``<n1, n2|psi>`` at ``amp[n1, n2]``;
with the atom it is ``amp[level, n1, n2]``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from ._rk4 import rk4_step
from .errors import (DimensionMismatch, DimensionTooSmall, LeakageExceeded,
                     NoAtomFactor, NonContractive, NormDrift, TraceDrift)
from .moments import MomentVector, drive_constants
from .params import DerivedCouplings, SystemParams

LEVEL_A, LEVEL_B, LEVEL_C = 0, 1, 2
ATOM_DIM = 3

LEAKAGE_TOL = 1e-10
NORM_DRIFT_TOL = 1e-6
TRACE_DRIFT_TOL = 1e-8
HERMITIAN_TOL = 1e-12

DEFAULT_PURE_TRUNC = 40
DEFAULT_MIXED_TRUNC = 15
DEFAULT_DT_EFFECTIVE = 1e-2
# RK4 damps the ~1200 rad/time dressed-level oscillation; 1e-3 loses ~1e-6 of norm
DEFAULT_DT_FULL = 2.5e-4


@dataclass
class FockState:
    """Pure state on the truncated lattice; ``amp.shape == dims``."""

    amp: np.ndarray

    @property
    def dims(self) -> tuple[int, ...]:
        return self.amp.shape

    @property
    def has_atom(self) -> bool:
        return self.amp.ndim == 3

    @property
    def field_dims(self) -> tuple[int, int]:
        return self.amp.shape[-2:]

    def vector(self) -> np.ndarray:
        return self.amp.reshape(-1)

    def norm(self) -> float:
        return float(np.vdot(self.amp, self.amp).real)

    @classmethod
    def basis(cls, dims, index) -> "FockState":
        amp = np.zeros(dims, dtype=complex)
        amp[tuple(index)] = 1.0
        return cls(amp)

    @classmethod
    def vacuum(cls, d1: int, d2: int, level: int | None = None) -> "FockState":
        if level is None:
            return cls.basis((d1, d2), (0, 0))
        return cls.basis((ATOM_DIM, d1, d2), (level, 0, 0))


@dataclass
class DensityMatrix:
    """Field-only density operator on the ``d1*d2`` dimensional truncated space."""

    rho: np.ndarray
    dims: tuple[int, int]

    @classmethod
    def from_state(cls, s: FockState) -> "DensityMatrix":
        if s.has_atom:
            raise DimensionMismatch("density matrices are field-only")
        v = s.vector()
        return cls(np.outer(v, v.conj()), s.dims)

    def trace(self) -> float:
        return float(np.trace(self.rho).real)


@dataclass
class OperatorMatrix:
    matrix: sp.csr_matrix
    dims: tuple[int, ...]
    hermitian: bool = False

    def hermiticity_error(self) -> float:
        diff = (self.matrix - self.matrix.conj().T).tocoo()
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0


def _check_dims(*ds):
    for d in ds:
        if d < 2:
            raise DimensionTooSmall(f"each mode needs at least 2 levels, got {d}")


def _annihilation(d: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, d, dtype=float)), 1, format="csr", dtype=complex)


def mode_operators(d1: int, d2: int):
    """``(a1, a2)`` as sparse matrices on the two-mode space."""
    _check_dims(d1, d2)
    a1 = sp.kron(_annihilation(d1), sp.identity(d2), format="csr")
    a2 = sp.kron(sp.identity(d1), _annihilation(d2), format="csr")
    return a1, a2


def atom_operator(i: int, j: int) -> sp.csr_matrix:
    """``|i><j|`` on the three atomic levels."""
    return sp.csr_matrix(([1.0 + 0j], ([i], [j])), shape=(ATOM_DIM, ATOM_DIM))


def build_effective_hamiltonian(p: SystemParams, c: DerivedCouplings, dims) -> OperatorMatrix:
    """Atom-in-``b`` Hamiltonian written with displaced mode operators.

    ``H = eta1 A1^dag A1 + eta2 A2^dag A2 + (eta1 + eta2)/2 + xi (A1 A2 + h.c.)``
    with ``A_j = a_j + Omega_j / g_j``.
    """
    d1, d2 = dims
    a1, a2 = mode_operators(d1, d2)
    eye = sp.identity(d1 * d2, dtype=complex, format="csr")
    A1 = a1 + p.beta1 * eye
    A2 = a2 + p.beta2 * eye
    pair = A1 @ A2
    H = (c.eta1 * (A1.conj().T @ A1) + c.eta2 * (A2.conj().T @ A2)
         + c.mean_shift * eye + c.xi * (pair + pair.conj().T))
    return OperatorMatrix(H.tocsr(), (d1, d2), hermitian=True)


def build_master_hamiltonian(p: SystemParams, c: DerivedCouplings, dims) -> OperatorMatrix:
    """Bare-operator Hamiltonian of the master equation, drive terms made explicit.

    Differs from :func:`build_effective_hamiltonian` by a multiple of the
    identity (exactly so only without truncation effects on the displaced
    products).
    """
    d1, d2 = dims
    a1, a2 = mode_operators(d1, d2)
    L1, L2 = drive_constants(p, c)
    pair = a1 @ a2
    H = (c.xi * (pair + pair.conj().T)
         + c.eta1 * (a1.conj().T @ a1) + c.eta2 * (a2.conj().T @ a2)
         + L2 * (a2 + a2.conj().T) + L1 * (a1 + a1.conj().T))
    return OperatorMatrix(H.tocsr(), (d1, d2), hermitian=True)


def build_full_hamiltonian(p: SystemParams, dims) -> OperatorMatrix:
    """Cascade atom coupled to both modes, in the interaction picture.

    ``g1 (A1 s_bc + A1^dag s_cb) + g2 (A2 s_ab + A2^dag s_ba)
    + Omega (s_ac + s_ca) - delta (s_aa + s_cc)``, where ``s_ij = |i><j|``.
    """
    d1, d2 = dims
    a1, a2 = mode_operators(d1, d2)
    eye_f = sp.identity(d1 * d2, dtype=complex, format="csr")
    A1 = a1 + p.beta1 * eye_f
    A2 = a2 + p.beta2 * eye_f
    s = atom_operator
    a, b, cc = LEVEL_A, LEVEL_B, LEVEL_C
    H = (p.g1 * (sp.kron(s(b, cc), A1) + sp.kron(s(cc, b), A1.conj().T))
         + p.g2 * (sp.kron(s(a, b), A2) + sp.kron(s(b, a), A2.conj().T))
         + p.Omega * sp.kron(s(a, cc) + s(cc, a), eye_f)
         - p.delta * sp.kron(s(a, a) + s(cc, cc), eye_f))
    return OperatorMatrix(H.tocsr(), (ATOM_DIM, d1, d2), hermitian=True)


def tail_mass(amp_or_diag: np.ndarray) -> float:
    """Probability in the top two Fock layers of either mode.

    Takes amplitudes or a population array whose last two axes are the modes.
    """
    prob = np.abs(amp_or_diag) ** 2 if np.iscomplexobj(amp_or_diag) else amp_or_diag
    prob = prob.reshape((-1,) + prob.shape[-2:]).sum(axis=0)
    total = prob.sum()
    top = prob[-2:, :].sum() + prob[:, -2:].sum() - prob[-2:, -2:].sum()
    return float(top / total) if total > 0 else 0.0


@dataclass
class Evolution:
    """Result of a fixed-step propagation, with the samples taken on the way."""

    state: FockState | DensityMatrix
    times: np.ndarray
    moments: list[MomentVector] = field(default_factory=list)
    populations: list[tuple[float, float, float]] = field(default_factory=list)
    drift: float = 0.0
    leakage: float = 0.0


def _n_steps(t: float, dt: float) -> int:
    n = int(round(t / dt))
    if n < 0 or abs(n * dt - t) > 1e-9 * max(1.0, t):
        raise ValueError(f"t={t} is not a nonnegative multiple of dt={dt}")
    return n


def evolve_state(H: OperatorMatrix, psi0: FockState, t: float, dt: float | None = None, *,
                 sample_every: int | None = None,
                 leakage_tol: float = LEAKAGE_TOL) -> Evolution:
    """Propagate ``|psi0>`` under ``H`` to time ``t`` with fixed-step RK4.

    The state is renormalised once at the end. ``sample_every`` (in steps)
    records moments, and atomic populations when the atom is present.

    Raises
    ------
    NormDrift
        The norm moved by more than ``NORM_DRIFT_TOL`` before renormalisation.
    LeakageExceeded
        A sampled or final state has tail mass above ``leakage_tol``.
    """
    if H.dims != psi0.dims:
        raise DimensionMismatch(f"operator dims {H.dims} vs state dims {psi0.dims}")
    if dt is None:
        dt = DEFAULT_DT_FULL if psi0.has_atom else DEFAULT_DT_EFFECTIVE
    steps = _n_steps(t, dt)
    M = (-1j * H.matrix).tocsr()

    def rhs(v):
        return M @ v

    v = psi0.vector().astype(complex)
    norm0 = np.vdot(v, v).real
    drift = 0.0
    leakage = 0.0
    times, moms, pops = [], [], []

    def sample(k, v):
        nonlocal leakage
        s = FockState(v.reshape(psi0.dims) / np.sqrt(np.vdot(v, v).real))
        leakage = max(leakage, tail_mass(s.amp))
        times.append(k * dt)
        moms.append(moments_from_state(s))
        if s.has_atom:
            pops.append(atom_level_populations(s))

    if sample_every:
        sample(0, v)
    for k in range(1, steps + 1):
        v = rk4_step(rhs, v, dt)
        drift = max(drift, abs(np.vdot(v, v).real - norm0))
        if sample_every and k % sample_every == 0:
            sample(k, v)
    if drift > NORM_DRIFT_TOL:
        raise NormDrift(f"norm drifted by {drift:.3e}; reduce dt={dt}")

    final = FockState(v.reshape(psi0.dims) / np.sqrt(np.vdot(v, v).real))
    leakage = max(leakage, tail_mass(final.amp))
    if leakage > leakage_tol:
        raise LeakageExceeded(f"tail mass {leakage:.3e} > {leakage_tol:.1e}; raise truncation")
    return Evolution(final, np.array(times), moms, pops, drift, leakage)


def evolve_lindblad(p: SystemParams, c: DerivedCouplings, rho0: DensityMatrix, t: float,
                    dt: float = DEFAULT_DT_EFFECTIVE, *, sample_every: int | None = None,
                    leakage_tol: float = LEAKAGE_TOL) -> Evolution:
    """Integrate the cavity master equation with equal amplitude damping ``kappa``.

    ``drho/dt = -i[H, rho] + kappa sum_j (2 a_j rho a_j^dag - {a_j^dag a_j, rho})``
    with ``H`` from :func:`build_master_hamiltonian`. RK4 in time; ``rho`` is
    re-symmetrised after every step.

    Raises
    ------
    TraceDrift
        ``|tr(rho) - 1|`` exceeded ``TRACE_DRIFT_TOL``.
    LeakageExceeded
        Population in the top two Fock layers exceeded ``leakage_tol``.
    """
    d1, d2 = rho0.dims
    D = d1 * d2
    H = build_master_hamiltonian(p, c, (d1, d2)).matrix
    n_tot = sp.diags(np.add.outer(np.arange(d1), np.arange(d2)).reshape(-1).astype(complex))
    # non-Hermitian part: -i(K rho - rho K^dag) = -i H rho + i rho H - kappa {n, rho}
    minus_iK = (-1j * (H - 1j * p.kappa * n_tot)).tocsr()
    s1 = np.sqrt(np.arange(1, d1, dtype=float))
    s2 = np.sqrt(np.arange(1, d2, dtype=float))
    w1 = 2 * p.kappa * np.outer(s1, s1)[:, None, :, None]
    w2 = 2 * p.kappa * np.outer(s2, s2)[None, :, None, :]

    def rhs(rho):
        X = minus_iK @ rho
        out = X + X.conj().T
        r4 = rho.reshape(d1, d2, d1, d2)
        jump = np.zeros_like(r4)
        jump[:-1, :, :-1, :] += w1 * r4[1:, :, 1:, :]
        jump[:, :-1, :, :-1] += w2 * r4[:, 1:, :, 1:]
        return out + jump.reshape(D, D)

    steps = _n_steps(t, dt)
    rho = rho0.rho.astype(complex)
    drift = 0.0
    leakage = 0.0
    times, moms = [], []

    def sample(k, rho):
        nonlocal leakage
        dm = DensityMatrix(rho, (d1, d2))
        leakage = max(leakage, tail_mass(np.real(np.diag(rho)).reshape(d1, d2)))
        times.append(k * dt)
        moms.append(moments_from_state(dm))

    if sample_every:
        sample(0, rho)
    for k in range(1, steps + 1):
        rho = rk4_step(rhs, rho, dt)
        rho = 0.5 * (rho + rho.conj().T)
        drift = max(drift, abs(np.trace(rho).real - 1.0))
        if sample_every and k % sample_every == 0:
            sample(k, rho)
    if drift > TRACE_DRIFT_TOL:
        raise TraceDrift(f"trace drifted by {drift:.3e}")
    leakage = max(leakage, tail_mass(np.real(np.diag(rho)).reshape(d1, d2)))
    if leakage > leakage_tol:
        raise LeakageExceeded(f"tail population {leakage:.3e} > {leakage_tol:.1e}; raise truncation")
    return Evolution(DensityMatrix(rho, (d1, d2)), np.array(times), moms, [], drift, leakage)


def construct_analytic_state(alpha1: complex, alpha2: complex, A_plus: complex, dims, *,
                             leakage_tol: float = LEAKAGE_TOL) -> FockState:
    """Normalised ``exp(A+ a1^dag a2^dag) exp(alpha1 a1^dag) exp(alpha2 a2^dag)|0,0>``.

    Expanding the exponentials gives
    ``<n1,n2|.> = sqrt(n1! n2!) sum_k A+^k alpha1^(n1-k) alpha2^(n2-k) / (k! (n1-k)! (n2-k)!)``.
    """
    d1, d2 = dims
    _check_dims(d1, d2)
    if abs(A_plus) >= 1:
        raise NonContractive(f"|A+| = {abs(A_plus)} >= 1")
    n1 = np.arange(d1)
    n2 = np.arange(d2)
    amp = np.zeros((d1, d2), dtype=complex)
    half_lf1 = 0.5 * gammaln(n1 + 1)
    half_lf2 = 0.5 * gammaln(n2 + 1)
    for k in range(min(d1, d2)):
        j1 = n1[k:] - k
        j2 = n2[k:] - k
        u = complex(alpha1) ** j1 * np.exp(half_lf1[k:] - gammaln(j1 + 1))
        w = complex(alpha2) ** j2 * np.exp(half_lf2[k:] - gammaln(j2 + 1))
        coeff = complex(A_plus) ** k * np.exp(-gammaln(k + 1))
        amp[k:, k:] += coeff * np.outer(u, w)
    amp /= np.sqrt(np.vdot(amp, amp).real)
    leak = tail_mass(amp)
    if leak > leakage_tol:
        raise LeakageExceeded(f"tail mass {leak:.3e} > {leakage_tol:.1e}; raise truncation")
    return FockState(amp)


def moments_from_state(s: FockState | DensityMatrix) -> MomentVector:
    """Field moments of a pure state (atom traced out) or a density matrix."""
    if isinstance(s, DensityMatrix):
        d1, d2 = s.dims
        a1, a2 = mode_operators(d1, d2)
        rho = s.rho

        def expect(op):
            return complex((op @ rho).trace())

        return MomentVector(
            m_a1=expect(a1), m_a2=expect(a2),
            n1=expect(a1.conj().T @ a1).real, n2=expect(a2.conj().T @ a2).real,
            c12=expect(a1 @ a2),
        )

    amp = s.amp if s.has_atom else s.amp[None]
    d1, d2 = amp.shape[-2:]
    s1 = np.sqrt(np.arange(1, d1))[:, None]
    s2 = np.sqrt(np.arange(1, d2))[None, :]
    prob = np.abs(amp) ** 2
    return MomentVector(
        m_a1=complex(np.sum(amp[:, :-1, :].conj() * s1 * amp[:, 1:, :])),
        m_a2=complex(np.sum(amp[:, :, :-1].conj() * s2 * amp[:, :, 1:])),
        n1=float(np.sum(prob * np.arange(d1)[:, None])),
        n2=float(np.sum(prob * np.arange(d2)[None, :])),
        c12=complex(np.sum(amp[:, :-1, :-1].conj() * (s1 * s2) * amp[:, 1:, 1:])),
    )


def fidelity(x: FockState, y: FockState) -> float:
    """``|<x|y>|^2``."""
    if x.dims != y.dims:
        raise DimensionMismatch(f"{x.dims} vs {y.dims}")
    return float(min(1.0, abs(np.vdot(x.amp, y.amp)) ** 2))


def atom_level_populations(s: FockState) -> tuple[float, float, float]:
    """Marginal probabilities of atomic levels a, b, c."""
    if not s.has_atom:
        raise NoAtomFactor("state has no atomic factor")
    p = np.sum(np.abs(s.amp) ** 2, axis=(1, 2))
    p = p / p.sum()
    return float(p[LEVEL_A]), float(p[LEVEL_B]), float(p[LEVEL_C])


def dump_state(s: FockState, path) -> None:
    """Write the dims as little-endian uint64, then (Re, Im) float64 pairs in basis order.

    Rank is recoverable from the file size: a field-only file is a multiple of
    16 bytes, a file carrying the atom is 8 mod 16.
    """
    dims = s.dims
    payload = np.ascontiguousarray(s.vector(), dtype="<c16").tobytes()
    Path(path).write_bytes(struct.pack(f"<{len(dims)}Q", *dims) + payload)


def load_state(path) -> FockState:
    raw = Path(path).read_bytes()
    rank = 2 if len(raw) % 16 == 0 else 3
    dims = struct.unpack_from(f"<{rank}Q", raw)
    amp = np.frombuffer(raw, dtype="<c16", offset=8 * rank)
    if amp.size != int(np.prod(dims)):
        raise DimensionMismatch(f"payload of {amp.size} amplitudes does not match dims {dims}")
    return FockState(amp.astype(complex).reshape(dims))
