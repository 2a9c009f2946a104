"""Flat ``key=value`` scenario files.

One pair per line; ``#`` starts a comment; blank lines are ignored. Omitted
keys take the reference values (``g1=1, g2=2, Omega=200, Omega1=10,
Omega2=40, delta=1000, kappa=0, engine=analytic, t_max=100, dt=0.01,
psi=pi/4``). ``dt`` defaults to 2.5e-4 for ``fock-full``; truncations
default to 40 per mode for pure-state engines and 15 for ``lindblad``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConstraintViolation, MalformedValue, UnknownKey
from .fock import DEFAULT_DT_FULL, DEFAULT_MIXED_TRUNC, DEFAULT_PURE_TRUNC
from .params import SystemParams, validate_params
from .timeseries import TimeGrid

ENGINES = ("analytic", "moments", "fock-effective", "fock-full", "lindblad")

_FLOAT_KEYS = ("g1", "g2", "Omega", "Omega1", "Omega2", "delta", "kappa", "t_max", "dt", "psi")
_INT_KEYS = ("trunc1", "trunc2", "stride")
_STR_KEYS = ("engine", "output")
KEYS = _FLOAT_KEYS + _INT_KEYS + _STR_KEYS


@dataclass(frozen=True)
class Scenario:
    params: SystemParams
    engine: str = "analytic"
    t_max: float = 100.0
    dt: float = 0.01
    trunc1: int = DEFAULT_PURE_TRUNC
    trunc2: int = DEFAULT_PURE_TRUNC
    psi: float = math.pi / 4
    output: str | None = None
    stride: int = 1

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.span(self.t_max, self.dt)


def _convert(key: str, raw: str):
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
    except ValueError:
        raise MalformedValue(f"{key}={raw!r}") from None
    return raw


def parse_scenario(text: str, **overrides) -> Scenario:
    """Parse scenario text; keyword ``overrides`` win over the file (``None`` ignored).

    Raises
    ------
    UnknownKey, MalformedValue, ConstraintViolation
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MalformedValue(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise UnknownKey(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    for key, value in overrides.items():
        if key not in KEYS:
            raise UnknownKey(key)
        if value is not None:
            values[key] = value
    return build_scenario(values)


def build_scenario(values: dict) -> Scenario:
    values = dict(values)
    engine = values.pop("engine", "analytic")
    if engine not in ENGINES:
        raise MalformedValue(f"engine={engine!r}; choose from {', '.join(ENGINES)}")

    pkeys = {k: values.pop(k) for k in ("g1", "g2", "Omega", "Omega1", "Omega2", "delta", "kappa")
             if k in values}
    params = validate_params(replace(SystemParams(), **pkeys))

    trunc = DEFAULT_MIXED_TRUNC if engine == "lindblad" else DEFAULT_PURE_TRUNC
    values.setdefault("trunc1", trunc)
    values.setdefault("trunc2", trunc)
    values.setdefault("dt", DEFAULT_DT_FULL if engine == "fock-full" else 0.01)
    s = Scenario(params=params, engine=engine, **values)

    if engine == "analytic" and params.kappa != 0:
        raise ConstraintViolation("the analytic engine is lossless; set kappa=0 or pick moments/lindblad")
    if engine in ("fock-effective", "fock-full") and params.kappa != 0:
        raise ConstraintViolation(f"{engine} evolves a pure state; use lindblad for kappa > 0")
    if not s.t_max > 0 or not s.dt > 0:
        raise ConstraintViolation(f"need t_max > 0 and dt > 0, got t_max={s.t_max}, dt={s.dt}")
    if s.trunc1 < 2 or s.trunc2 < 2:
        raise ConstraintViolation("truncations must be at least 2")
    if s.stride < 1:
        raise ConstraintViolation("stride must be >= 1")
    if not math.isfinite(s.psi):
        raise ConstraintViolation("psi must be finite")
    try:
        s.grid
    except ValueError as exc:
        raise ConstraintViolation(str(exc)) from None
    return s
