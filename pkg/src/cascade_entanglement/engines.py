"""Dispatch a :class:`Scenario` to one of the five engines."""
from __future__ import annotations

import numpy as np

from .analytic import analytic_timeseries
from .fock import (DensityMatrix, FockState, LEVEL_B, build_effective_hamiltonian,
                   build_full_hamiltonian, evolve_lindblad, evolve_state)
from .moments import MomentVector, integrate_moments, observables_from_moments
from .params import derive_couplings
from .scenario import Scenario
from .timeseries import TimeGrid, TimeSeries


def _from_samples(times, moments: list[MomentVector], psi, dt, extras=None) -> TimeSeries:
    mom = MomentVector(*(np.array([getattr(m, f) for m in moments])
                         for f in ("m_a1", "m_a2", "n1", "n2", "c12")))
    N, duan = observables_from_moments(mom, psi)
    grid = TimeGrid(dt=dt, count=len(times))
    return TimeSeries(t=np.asarray(times), n1=np.asarray(mom.n1), n2=np.asarray(mom.n2),
                      N=N, duan=duan, grid=grid, extras=extras or {}, moments=mom)


def run_scenario(s: Scenario) -> TimeSeries:
    """Observables of ``s`` sampled every ``s.stride`` steps of ``s.dt``."""
    p = s.params
    if s.engine == "analytic":
        return analytic_timeseries(p, s.grid, s.psi).thin(s.stride)
    if s.engine == "moments":
        return integrate_moments(p, s.grid, psi=s.psi).thin(s.stride)

    c = derive_couplings(p)
    dims = (s.trunc1, s.trunc2)
    if s.engine == "lindblad":
        rho0 = DensityMatrix.from_state(FockState.vacuum(*dims))
        ev = evolve_lindblad(p, c, rho0, s.t_max, s.dt, sample_every=s.stride)
        return _from_samples(ev.times, ev.moments, s.psi, s.dt * s.stride)
    if s.engine == "fock-effective":
        H = build_effective_hamiltonian(p, c, dims)
        ev = evolve_state(H, FockState.vacuum(*dims), s.t_max, s.dt, sample_every=s.stride)
        return _from_samples(ev.times, ev.moments, s.psi, s.dt * s.stride)
    if s.engine == "fock-full":
        H = build_full_hamiltonian(p, dims)
        ev = evolve_state(H, FockState.vacuum(*dims, level=LEVEL_B), s.t_max, s.dt,
                          sample_every=s.stride)
        pops = np.array(ev.populations)
        extras = {"Pa": pops[:, 0], "Pb": pops[:, 1], "Pc": pops[:, 2]}
        return _from_samples(ev.times, ev.moments, s.psi, s.dt * s.stride, extras)
    raise ValueError(f"unknown engine {s.engine!r}")
