import io

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from scdensity.pipeline.run import main


@pytest.fixture
def runner():
    # click 8.2 keeps stderr apart by default and drops the keyword
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


def read_csv(path):
    return pd.read_csv(path, comment="#")


def footer(path):
    values = {}
    for line in path.read_text().splitlines():
        if line.startswith("# ") and " = " in line:
            key, value = line[2:].split(" = ")
            values[key] = float(value)
    return values


def test_density_with_a_single_method(runner, tmp_path):
    out = tmp_path / "density.csv"
    result = runner.invoke(main, ["density", "--methods", "tf", "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    frame = read_csv(out)
    assert list(frame.columns) == ["x", "n_tf"]
    assert len(frame) == 1200
    assert out.read_text().startswith("# potential:")
    assert footer(out)["integral n_tf"] == pytest.approx(4.0, rel=1e-3)


def test_density_writes_to_stdout(runner):
    result = runner.invoke(main, ["density", "--methods", "uniform", "--grid-points", "41"])
    assert result.exit_code == 0, result.stderr
    frame = pd.read_csv(io.StringIO(result.stdout), comment="#")
    assert list(frame.columns) == ["x", "n_uniform"]
    assert len(frame) == 41


def test_ked_columns(runner, tmp_path):
    out = tmp_path / "ked.csv"
    result = runner.invoke(main, ["ked", "--methods", "uniform,tf,exact", "--grid-points", "201",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    frame = read_csv(out)
    assert list(frame.columns) == ["x", "t_uniform", "t_tf", "t_exact"]
    bulk = frame.x.abs() < 2.0
    assert (frame.t_uniform[bulk] > 0).all()
    assert frame.t_exact.min() < 0


def test_overrides_reach_the_system(runner, tmp_path):
    out = tmp_path / "morse.csv"
    result = runner.invoke(main, ["density", "--methods", "tf", "--grid-points", "201", "--out", str(out),
                                  "potential.name=morse", "potential.params.depth=12.5",
                                  "potential.params.width=0.25", "system.n_particles=10"])
    assert result.exit_code == 0, result.stderr
    assert "name: morse" in out.read_text()
    assert footer(out)["integral n_tf"] == pytest.approx(10.0, rel=1e-2)


def test_invalid_potential_exits_with_config_code(runner, tmp_path):
    result = runner.invoke(main, ["density", "--out", str(tmp_path / "x.csv"), "potential.name=square"])
    assert result.exit_code == 2
    assert "error in init_potential" in result.stderr
    assert "harmonic, morse, poschl_teller, quartic" in result.stderr
    assert not (tmp_path / "x.csv").exists()


def test_invalid_method_exits_with_config_code(runner):
    result = runner.invoke(main, ["density", "--methods", "uniform,wkb"])
    assert result.exit_code == 2
    assert "unknown method 'wkb'" in result.stderr


def test_overflowing_spectrum_exits_with_numerical_code(runner):
    result = runner.invoke(main, ["spectrum", "potential.name=morse", "potential.params.depth=12.5",
                                  "potential.params.width=0.5", "system.n_particles=10"])
    assert result.exit_code == 3
    assert "error in " in result.stderr


def test_spectrum(runner, tmp_path):
    out = tmp_path / "spectrum.csv"
    result = runner.invoke(main, ["spectrum", "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    frame = read_csv(out)
    assert list(frame.columns) == ["lambda", "e_wkb", "e_exact", "difference"]
    assert list(frame["lambda"]) == [0.0, 1.0, 2.0, 3.0, 3.5]
    assert frame.difference.dropna().abs().max() < 1e-6
    assert np.isnan(frame.e_exact.iloc[-1])


def test_compare_report(runner, tmp_path):
    out = tmp_path / "compare.csv"
    result = runner.invoke(main, ["compare", "--methods", "uniform,tf", "--grid-points", "301",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    frame = read_csv(out)
    assert list(frame.columns[:4]) == ["kind", "method", "region", "points"]
    density = frame[frame.kind == "density"].set_index(["method", "region"])
    for region in ("allowed", "turning", "forbidden"):
        assert density.loc[("uniform", region), "linf_frac"] < density.loc[("tf", region), "linf_frac"]
    values = footer(out)
    assert values["particle_number exact"] == pytest.approx(4.0, rel=1e-4)
    assert values["particle_number uniform"] == pytest.approx(4.0, rel=0.01)
    assert "Comparison against the exact oracle" in result.stderr


def test_repeated_runs_are_byte_identical(runner, tmp_path):
    out = tmp_path / "density.csv"
    args = ["density", "--methods", "uniform,tf", "--grid-points", "61", "--out", str(out)]
    assert runner.invoke(main, args).exit_code == 0
    first = out.read_bytes()
    assert runner.invoke(main, args).exit_code == 0
    assert out.read_bytes() == first
    assert runner.invoke(main, args + ["n_jobs=2"]).exit_code == 0
    second = out.read_bytes()
    assert first.replace(b"n_jobs: 1", b"n_jobs: 2") == second


def test_flat_config_file(runner, tmp_path):
    config = tmp_path / "quartic.cfg"
    config.write_text("potential.name = quartic\nsystem.n_particles = 3\nmethods = tf\ngrid.points = 201\n")
    out = tmp_path / "quartic.csv"
    result = runner.invoke(main, ["density", "--config", str(config), "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    assert len(read_csv(out)) == 201
    assert footer(out)["integral n_tf"] == pytest.approx(3.0, rel=1e-2)


@pytest.mark.slow
def test_gamma_scan(runner, tmp_path):
    out = tmp_path / "scan.csv"
    result = runner.invoke(main, ["gamma-scan", "--gamma", "1,1/2,1/4", "--grid-points", "401",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    frame = read_csv(out)
    assert list(frame.n_particles) == [4, 8, 16]
    assert np.all(np.diff(frame.bulk_linf_frac) < 0)
    np.testing.assert_allclose(frame.fermi_energy, 4.0, rtol=1e-9)


def test_gamma_scan_rejects_non_reciprocal_values(runner):
    result = runner.invoke(main, ["gamma-scan", "--gamma", "1,0.3"])
    assert result.exit_code == 2
