"""Uniform time grids and per-engine observable series."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .moments import MomentVector


@dataclass(frozen=True)
class TimeGrid:
    """``count`` equally spaced times ``t0 + k*dt``."""

    dt: float
    count: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    @classmethod
    def span(cls, t_max: float, dt: float, t0: float = 0.0) -> "TimeGrid":
        """Grid from ``t0`` to ``t_max`` inclusive; ``t_max - t0`` must be a multiple of ``dt``."""
        steps = (t_max - t0) / dt
        n = int(round(steps))
        if n < 0 or abs(steps - n) > 1e-9 * max(1.0, steps):
            raise ValueError(f"span {t_max - t0} is not a nonnegative multiple of dt={dt}")
        return cls(dt=dt, count=n + 1, t0=t0)

    @property
    def t_max(self) -> float:
        return self.t0 + self.dt * (self.count - 1)

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.count)


@dataclass
class TimeSeries:
    """Observables sampled on a grid.

    ``extras`` holds engine-specific columns (squeeze parameters, atomic
    populations, ...); ``moments`` keeps the sampled moment trajectory when
    the engine produces one.
    """

    t: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    N: np.ndarray
    duan: np.ndarray
    grid: TimeGrid | None = None
    extras: dict[str, np.ndarray] = field(default_factory=dict)
    moments: "MomentVector | None" = None

    def __len__(self):
        return len(self.t)

    def thin(self, stride: int) -> "TimeSeries":
        """Keep every ``stride``-th row."""
        if stride == 1:
            return self
        sl = slice(None, None, stride)
        grid = None
        if self.grid is not None:
            grid = TimeGrid(dt=self.grid.dt * stride, count=len(self.t[sl]), t0=self.grid.t0)
        return TimeSeries(t=self.t[sl], n1=self.n1[sl], n2=self.n2[sl], N=self.N[sl],
                          duan=self.duan[sl], grid=grid,
                          extras={k: v[sl] for k, v in self.extras.items()})
