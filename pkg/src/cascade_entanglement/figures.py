"""Figure-data reproduction: one CSV per curve.

========  ==========================================================  =========
figure    curves                                                      window
========  ==========================================================  =========
fig2      closed-form N and duan, driven                              [0, 2500]
fig3a     N: closed form (kappa=0), moments kappa=0.01, 0.02; undriven [0, 100]
fig3b     as fig3a with Omega1=10, Omega2=40                          [0, 100]
fig4      duan from moments, kappa = 0, 0.01, 0.02                    [0, 100]
========  ==========================================================  =========

All other parameters are the reference set (g1=1, g2=2, Omega=200, delta=1000).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .analytic import analytic_timeseries
from .csvio import write_timeseries_csv
from .moments import integrate_moments
from .params import SystemParams
from .timeseries import TimeGrid

FIGURES = ("fig2", "fig3a", "fig3b", "fig4")
LOSS_RATES = (0.01, 0.02)


@dataclass(frozen=True)
class FigureWindow:
    t_max: float
    dt: float
    stride: int


DEFAULT_WINDOWS = {
    "fig2": FigureWindow(2500.0, 0.5, 1),
    "fig3a": FigureWindow(100.0, 0.01, 10),
    "fig3b": FigureWindow(100.0, 0.01, 10),
    "fig4": FigureWindow(100.0, 0.01, 10),
}


def _kappa_tag(kappa: float) -> str:
    return f"kappa{kappa:g}"


def figure_curves(name: str, t_max: float | None = None, dt: float | None = None,
                  stride: int | None = None):
    """Yield ``(curve_name, TimeSeries)`` for every curve of figure ``name``."""
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    win = DEFAULT_WINDOWS[name]
    win = FigureWindow(t_max if t_max is not None else win.t_max,
                       dt if dt is not None else win.dt,
                       stride if stride is not None else win.stride)
    grid = TimeGrid.span(win.t_max, win.dt)
    base = SystemParams()

    if name == "fig2":
        yield "analytic", analytic_timeseries(base, grid).thin(win.stride)
        return
    if name in ("fig3a", "fig3b"):
        p = base if name == "fig3b" else replace(base, Omega1=0.0, Omega2=0.0)
        yield "analytic", analytic_timeseries(p, grid).thin(win.stride)
        for kappa in LOSS_RATES:
            ts = integrate_moments(replace(p, kappa=kappa), grid)
            yield f"moments_{_kappa_tag(kappa)}", ts.thin(win.stride)
        return
    for kappa in (0.0,) + LOSS_RATES:
        ts = integrate_moments(replace(base, kappa=kappa), grid)
        yield f"moments_{_kappa_tag(kappa)}", ts.thin(win.stride)


def run_figure(name: str, outdir=".", **window) -> list[Path]:
    """Write one CSV per curve as ``<outdir>/<name>_<curve>.csv``."""
    outdir = Path(outdir)
    return [write_timeseries_csv(ts, outdir / f"{name}_{curve}.csv")
            for curve, ts in figure_curves(name, **window)]
