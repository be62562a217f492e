from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import replace

import numpy as np
import pytest

from spinsync.cli import main
from spinsync.config import Axis, ConfigParseError, JobSpec, parse_config, validate
from spinsync.liouvillian import SystemConfig, three_spin
from spinsync.runner import render, run

FIG4 = """\
[system]
n_spins = 3
gamma = 1
g = 0.12, 0.12

[job]
mode = dist
joint = true
joint_samples = 12
"""


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def column(text, name):
    header, rows = read_csv(text)
    k = header.index(name)
    return np.array([float(r[k]) if r[k] else math.nan for r in rows])


def circular_maxima(values):
    prev, nxt = np.roll(values, 1), np.roll(values, -1)
    return np.flatnonzero((values > prev) & (values >= nxt))


def run_cli(tmp_path, text, mode, *extra, name="out.csv"):
    cfg = tmp_path / "job.ini"
    cfg.write_text(text)
    out = tmp_path / name
    code = main([mode, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


def test_minimal_config_defaults():
    spec = parse_config("[system]\ngamma = 1\n")
    assert spec.mode == "steady"
    assert spec.system == SystemConfig(2, (1.0, 1.0), (1.0, 1.0), (0.0, 0.0), (0.0,))
    assert spec.system.equal_rates
    assert spec.format == "csv" and spec.workers == 1 and spec.samples == 360


def test_fig4_round_trip():
    spec = parse_config(FIG4)
    assert spec.system == three_spin(0.12, 0.12)
    assert parse_config(spec.to_text()) == spec


def test_grid_round_trip_and_aliases():
    text = "[system]\ngamma = 1\n[job]\nmode = sweep2d\n[grid]\nx = omega_a log 0.01 1 5\ny = g_ab linear 0 1 3\n"
    spec = parse_config(text)
    assert spec.grid == (Axis("omega.0", "log", 0.01, 1.0, 5), Axis("g.0", "linear", 0.0, 1.0, 3))
    assert parse_config(spec.to_text()) == spec
    np.testing.assert_allclose(spec.grid[0].values(), np.geomspace(0.01, 1, 5))


def test_default_sweep_axis():
    ax = Axis("omega.0")
    assert (ax.scale, ax.min, ax.max, ax.count) == ("log", 1e-2, 10.0, 50)


def test_negative_rate_names_field():
    text = "[system]\nn_spins = 2\ngamma_g = -1, 1\n"
    with pytest.raises(ConfigParseError) as info:
        parse_config(text)
    assert info.value.key == "gamma_g"
    assert info.value.line == 3
    assert "gamma_g" in str(info.value)


@pytest.mark.parametrize("text,key,line", [
    ("[system]\ngamma = 1\ncolour = red\n", "colour", 3),
    ("[job]\nmode = fly\n", "mode", 2),
    ("[job]\nworkers = two\n", "workers", 2),
    ("[system]\nn_spins = 2\nomega = 0.1\n", "omega", 3),
    ("[job]\nmode = sweep2d\n[grid]\nx = omega.0 log 0 1 4\ny = g.0 log 1 2 3\n", None, None),
    ("[job]\noutputs = m3_A\n", "outputs", 2),
    ("[perturb]\nmax_order = 2\nmonomials = 2:2\n", "monomials", 3),
    ("[grid]\nx = omega.7 log 1 2 3\n", None, None),
])
def test_config_errors(text, key, line):
    with pytest.raises(ConfigParseError) as info:
        parse_config(text)
    if key is not None:
        assert info.value.key == key
        assert info.value.line == line


def test_unknown_section():
    with pytest.raises(ConfigParseError) as info:
        parse_config("[system]\ngamma = 1\n\n[plots]\ncolor = 1\n")
    assert info.value.line == 4


def test_steady_cli(tmp_path):
    code, out = run_cli(tmp_path, "[system]\ngamma = 1\nomega = 0.1, 0\ng = 0.15\n", "steady")
    assert code == 0
    header, rows = read_csv(out.read_text())
    assert len(rows) == 1
    for suffix in ("_re", "_im", "_abs", "_phase"):
        assert "m1_B" + suffix in header and "m2_AB" + suffix in header
    assert header[-1] == "error"
    assert float(rows[0][header.index("m1_A_abs")]) < 1e-12
    assert float(rows[0][header.index("m1_B_re")]) > 0
    assert float(rows[0][header.index("residual")]) < 1e-12


def test_dist_cli_fig2(tmp_path):
    code, out = run_cli(tmp_path, "[system]\ngamma = 1\nomega = 0.1, 0\ng = 0.15\n", "dist")
    assert code == 0
    text = out.read_text()
    phi = column(text, "phi")
    assert len(phi) == 360
    s1b, s1a = column(text, "S1_B"), column(text, "S1_A")
    mb, ma = circular_maxima(s1b), circular_maxima(s1a)
    assert len(mb) == 1 and abs(phi[mb[0]]) < 1e-12
    assert len(ma) == 2
    assert sorted(abs(phi[ma])) == pytest.approx([0.0, np.pi], abs=1e-9)


def test_dist_joint_table(tmp_path):
    code, out = run_cli(tmp_path, FIG4, "dist")
    assert code == 0
    joint = out.with_name("out.joint.csv")
    header, rows = read_csv(joint.read_text())
    assert header == ["phi_1", "phi_2", "S3_ABBC", "S3_ABCA"]
    assert len(rows) == 144
    text = out.read_text()
    s2ca, phi = column(text, "S2_CA"), column(text, "phi")
    assert abs(phi[np.argmax(s2ca)]) < 1e-12


SWEEP = """\
[system]
gamma = 1
[job]
mode = sweep2d
outputs = m1_A, m1_B, m1_AB, m2_AB, p_max
[grid]
x = omega.0 log 0.01 1 {n}
y = g.0 log 0.01 1 {n}
"""


def test_sweep_blockade_columns(tmp_path):
    code, out = run_cli(tmp_path, SWEEP.format(n=5), "sweep2d")
    assert code == 0
    text = out.read_text()
    header, rows = read_csv(text)
    assert header[:2] == ["omega.0", "g.0"]
    assert len(rows) == 25
    assert np.all(column(text, "m1_A_abs") < 1e-12)
    assert np.all(column(text, "m1_AB_abs") < 1e-12)
    assert np.all(column(text, "m1_B_re") > 0)
    # row-major: x varies slowest
    x = column(text, "omega.0")
    assert np.all(np.diff(x[::5]) > 0) and np.all(x[:5] == x[0])


def test_sweep_deterministic_across_workers(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert run_cli(a, SWEEP.format(n=4), "sweep2d", "--workers", "1")[0] == 0
    assert run_cli(b, SWEEP.format(n=4), "sweep2d", "--workers", "3")[0] == 0
    assert (a / "out.csv").read_bytes() == (b / "out.csv").read_bytes()


def test_degenerate_points_reported_in_error_column(tmp_path):
    # no gain and no drive: |0> and |-1> are both dark
    text = ("[system]\nn_spins = 1\ngamma_g = 1\ngamma_d = 1\n"
            "[job]\nmode = sweep2d\noutputs = m1_A\n[grid]\nx = gamma_g.0 linear 0 1 3\ny = gamma_d.0 linear 1 2 2\n")
    code, out = run_cli(tmp_path, text, "sweep2d")
    assert code == 0
    header, rows = read_csv(out.read_text())
    errs = [r[header.index("error")] for r in rows]
    assert errs[0].startswith("DegenerateSteadyState") and errs[1].startswith("DegenerateSteadyState")
    assert all(e == "" for e in errs[2:])
    assert rows[0][header.index("m1_A_re")] == "nan"


def test_entangle_cli(tmp_path):
    code, out = run_cli(tmp_path, "[system]\ngamma = 1\nomega = 0.1, 0\ng = 0.3\n", "entangle",
                        "--entropy-base", "2")
    assert code == 0
    header, rows = read_csv(out.read_text())
    assert {"S_A", "I_AB", "N_AB", "C2_AB_re"} <= set(header)
    assert float(rows[0][header.index("I_AB")]) >= 0


def test_entangle_undefined_correlation_reported(monkeypatch):
    from spinsync import quantities
    from spinsync.correlations import UndefinedCorrelation

    def undefined(*args, **kwargs):
        raise UndefinedCorrelation("variance below 1e-14")

    monkeypatch.setattr(quantities.corr, "correlation", undefined)
    spec = parse_config("[system]\ngamma = 1\ng = 0.1\n[job]\nmode = entangle\noutputs = C1_AB, S_A\n")
    (table,) = run(spec)
    row = dict(zip(table.header, table.rows[0]))
    assert "C1_AB" in row["error"]
    assert math.isnan(row["C1_AB_re"])
    assert row["S_A"] >= 0


def test_locus_cli(tmp_path):
    code, out = run_cli(tmp_path, "[system]\ngamma = 1\n[locus]\ntarget = m1AB\ng = 0.05\nscale = sum\n", "locus")
    assert code == 0
    text = out.read_text()
    ratio = column(text, "ratio")[0]
    pred = column(text, "ratio_asymptotic")[0]
    assert ratio == pytest.approx(0.5 * (1 + np.sqrt(17)) * 0.05**2, rel=0.05)
    assert ratio == pytest.approx(pred, rel=1e-3)


def test_perturb_cli(tmp_path):
    text = "[system]\ngamma = 1\n[perturb]\nmax_order = 4\ntargets = m2_AB\nmonomials = 0:2, 2:2, 0:4\n"
    code, out = run_cli(tmp_path, text, "perturb")
    assert code == 0
    header, rows = read_csv(out.read_text())
    got = {(int(r[1]), int(r[2])): float(r[header.index("coeff_re")]) for r in rows}
    assert got[(0, 2)] == pytest.approx(1 / (8 * np.pi), rel=1e-8)
    assert got[(2, 2)] == pytest.approx(-13 / (12 * np.pi), rel=1e-8)


def test_json_output(tmp_path):
    code, out = run_cli(tmp_path, "[system]\ngamma = 1\n[locus]\ng = 0.05\n", "locus", "--format", "json",
                        name="out.json")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1
    assert doc["mode"] == "locus"
    assert doc["columns"][:3] == ["g", "omega_a", "ratio"]
    assert parse_config(doc["config"]).locus.g == (0.05,)


def test_json_nan_is_null():
    spec = parse_config("[system]\ngamma = 1\n[locus]\ntarget = m1A\ng = 0.05\nbracket = 2, 3\n[job]\nmode = locus\nformat = json\n")
    doc = json.loads(render(run(spec), spec)[0][1])
    assert doc["rows"][0][2] is None
    assert doc["rows"][0][4].startswith("NoSignChange")


def test_config_error_exit_code(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "[system]\ngamma_g = -1, 1\n", "steady")
    assert code == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "gamma_g" in err


def test_job_failure_exit_code(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "[system]\nn_spins = 1\ngamma_g = 0\ngamma_d = 1\n", "dist")
    assert code == 1
    assert "DegenerateSteadyState" in capsys.readouterr().err


def test_stdout_when_no_out(capsys):
    assert main(["steady"]) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 1 and "p_max" in header


def test_cli_overrides_config(tmp_path):
    cfg = tmp_path / "job.ini"
    cfg.write_text("[system]\ngamma = 1\n[job]\nformat = json\nworkers = 2\n")
    spec = parse_config(cfg.read_text())
    assert spec.format == "json"
    out = tmp_path / "x.csv"
    assert main(["steady", "--config", str(cfg), "--out", str(out), "--format", "csv"]) == 0
    assert out.read_text().startswith("m1_A_re")


def test_job_spec_defaults_validate():
    spec = JobSpec()
    assert spec.resolved_outputs()[0] == "m1_A"
    assert spec.with_mode("entangle").resolved_outputs()[0] == "S_A"


def test_sweep_without_grid_uses_default_axes():
    spec = validate(replace(JobSpec(), mode="sweep2d"))
    assert [a.field for a in spec.grid] == ["omega.0", "g.0"]
    assert all((a.scale, a.min, a.max, a.count) == ("log", 1e-2, 10.0, 50) for a in spec.grid)
