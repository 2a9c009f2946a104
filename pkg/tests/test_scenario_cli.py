import math
from dataclasses import replace

import numpy as np
import pytest

from cascade_entanglement import analytic, validation
from cascade_entanglement.cli import main
from cascade_entanglement.csvio import format_value, read_timeseries_csv, write_timeseries_csv
from cascade_entanglement.engines import run_scenario
from cascade_entanglement.errors import ConstraintViolation, MalformedValue, UnknownKey
from cascade_entanglement.figures import figure_curves, run_figure
from cascade_entanglement.params import SystemParams
from cascade_entanglement.scenario import parse_scenario
from cascade_entanglement.timeseries import TimeGrid, TimeSeries


def test_empty_scenario_is_reference():
    s = parse_scenario("")
    assert s.params == replace(SystemParams(), large_detuning=False)
    assert (s.engine, s.t_max, s.dt, s.psi) == ("analytic", 100.0, 0.01, math.pi / 4)


def test_lossy_moments_scenario():
    s = parse_scenario("kappa=0.02\nengine=moments  # fig 4 dashed\n\n")
    assert s.params.kappa == 0.02 and s.engine == "moments"


def test_overrides_win():
    s = parse_scenario("engine=moments\nkappa=0.01", kappa=0.02, engine=None)
    assert s.params.kappa == 0.02 and s.engine == "moments"


def test_engine_defaults():
    assert parse_scenario("engine=fock-full\nkappa=0").dt == 2.5e-4
    assert parse_scenario("engine=lindblad").trunc1 == 15


@pytest.mark.parametrize("text, exc", [
    ("engine=analytic\nkappa=0.01", ConstraintViolation),
    ("engine=fock-effective\nkappa=0.01", ConstraintViolation),
    ("t_max=-1", ConstraintViolation),
    ("t_max=1\ndt=0.3", ConstraintViolation),
    ("stride=0", ConstraintViolation),
    ("trunc1=1", ConstraintViolation),
    ("gamma=1", UnknownKey),
    ("kappa=fast", MalformedValue),
    ("engine=euler", MalformedValue),
    ("just words", MalformedValue),
])
def test_scenario_errors(text, exc):
    with pytest.raises(exc):
        parse_scenario(text)


@pytest.mark.parametrize("x, s", [
    (0.0, "0.00000000000000e0"),
    (-0.0, "0.00000000000000e0"),
    (2.0, "2.00000000000000e0"),
    (1.234e-3, "1.23400000000000e-3"),
    (-5e17, "-5.00000000000000e17"),
])
def test_format_value(x, s):
    assert format_value(x) == s


def test_vacuum_row(tmp_path):
    ts = analytic.analytic_timeseries(SystemParams(), TimeGrid(dt=0.01, count=1))
    path = write_timeseries_csv(ts, tmp_path / "v.csv")
    raw = path.read_bytes()
    assert raw.isascii() and b"\r" not in raw
    header, row = raw.decode().splitlines()
    assert header == "t,n1,n2,N,duan,r,epsilon"
    assert row.split(",")[:5] == ["0.00000000000000e0"] * 4 + ["2.00000000000000e0"]


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    cols = rng.normal(size=(5, 7)) * 10.0 ** rng.integers(-8, 8, size=(5, 7))
    ts = TimeSeries(*cols)
    back = read_timeseries_csv(write_timeseries_csv(ts, tmp_path / "x.csv"))
    assert list(back) == ["t", "n1", "n2", "N", "duan"]
    for name, col in zip(back, cols):
        np.testing.assert_array_equal(back[name], [float(f"{v:.14e}") for v in col])


@pytest.mark.parametrize("engine", ["analytic", "moments"])
def test_simulate_deterministic(tmp_path, engine):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(f"engine={engine}\nt_max=20\ndt=0.1\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}.csv"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].count(b"\n") == 202


def test_simulate_engines_agree():
    base = "t_max=10\ndt=0.05\nOmega1=0.3\nOmega2=0.4\ntrunc1=12\ntrunc2=12\n"
    ref = run_scenario(parse_scenario(base))
    for eng in ("moments", "fock-effective"):
        ts = run_scenario(parse_scenario(base + f"engine={eng}"))
        np.testing.assert_allclose(ts.N, ref.N, atol=1e-9)
        np.testing.assert_allclose(ts.duan, ref.duan, atol=1e-9)


def test_simulate_lindblad_engine():
    text = "engine=lindblad\nkappa=0.02\nt_max=2\ndt=0.1\nOmega1=0.3\nOmega2=0.4\ntrunc1=6\ntrunc2=6"
    ts = run_scenario(parse_scenario(text))
    ref = run_scenario(parse_scenario(text.replace("lindblad", "moments")))
    np.testing.assert_allclose(ts.N, ref.N, atol=1e-9)


def test_simulate_full_engine():
    text = "engine=fock-full\nOmega1=0\nOmega2=0\nt_max=0.5\ntrunc1=4\ntrunc2=4\nstride=200"
    ts = run_scenario(parse_scenario(text))
    assert len(ts) == 11
    assert np.all(ts.extras["Pb"] >= 0.99)


def test_simulate_stdout(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("t_max=1\ndt=0.5\n")
    assert main(["simulate", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.startswith("t,n1,n2,N,duan")


def test_cli_usage_errors(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("engine=analytic\n")
    assert main(["simulate", "--config", str(cfg), "--kappa", "0.01"]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == 2
    cfg.write_text("bogus=1\n")
    assert main(["simulate", "--config", str(cfg)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["figure", "fig9"])
    assert exc.value.code == 2


def test_validate_exit_codes(capsys):
    assert main(["validate", "--only", "8", "9"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 2 and all(line.startswith("[PASS]") for line in out)
    assert main(["validate", "--json", "--only", "7a"]) == 1
    assert '"passed": false' in capsys.readouterr().out


def test_fig4_entangled_for_every_loss(tmp_path):
    paths = run_figure("fig4", tmp_path)
    assert sorted(p.name for p in paths) == [
        "fig4_moments_kappa0.01.csv", "fig4_moments_kappa0.02.csv", "fig4_moments_kappa0.csv"]
    for p in paths:
        d = read_timeseries_csv(p)["duan"]
        assert np.any(d < 2)


def test_fig3_amplification():
    undriven = dict(figure_curves("fig3a"))
    driven = dict(figure_curves("fig3b"))
    assert set(undriven) == {"analytic", "moments_kappa0.01", "moments_kappa0.02"}
    for name in driven:
        i = np.searchsorted(driven[name].t, 50.0)
        assert driven[name].t[i] == pytest.approx(50.0)
        assert driven[name].N[i] / undriven[name].N[i] >= 100


def test_fig2_output(tmp_path):
    (path,) = run_figure("fig2", tmp_path, t_max=1250.0, dt=1.25)
    d = read_timeseries_csv(path)
    assert set(d) == {"t", "n1", "n2", "N", "duan", "r", "epsilon"}
    assert d["t"][-1] == 1250.0 and len(d["t"]) == 1001
    assert d["duan"].min() < 2


def test_mutated_coupling_sign_is_caught(monkeypatch):
    orig = analytic.su11_factors

    def flipped(c, t):
        return orig(replace(c, xi=-c.xi), t)

    monkeypatch.setattr(analytic, "su11_factors", flipped)
    monkeypatch.setattr(validation, "su11_factors", flipped)
    results = {r.key: r for r in validation.run_validate(["1", "3"])}
    assert not results["1"].passed
    assert not results["3"].passed
