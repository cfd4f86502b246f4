import csv
import subprocess
import sys
from pathlib import Path

import pytest

from spikelab import __version__
from spikelab.cli import main
from spikelab.config import ladder_of, load_config, parse_config
from spikelab.errors import ConfigError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = """\
[problem]
N = 2
p = 3
domain = box
lower = 0, 0
upper = 1, 1

[problem.J]
kind = constant
value = 1

[problem.V]
kind = quadratic_well
center = 0.5, 0.5

[numerics]
resolution = 65
eps_ladder = 0.3, 0.2, 0.15

[experiment]
q0 = 0.5, 0.5
q = 0.55, 0.5
lattice = 3
"""


def summary(path):
    return dict(line.split("=", 1) for line in Path(path).read_text().splitlines())


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL)
    return path


def test_bad_ladder_names_key(small, tmp_path, capsys):
    code = main(["solve", "--config", str(small), "--out", str(tmp_path / "o"),
                 "--override", "numerics.eps_ladder=0.2,0.3"])
    assert code == 2
    assert "eps_ladder" in capsys.readouterr().err
    with pytest.raises(ConfigError) as info:
        load_config(small, ["numerics.eps_ladder=0.1,0.2"])
    assert info.value.key == "eps_ladder"
    with pytest.raises(ConfigError):
        ladder_of({"numerics": {}}, [0.2, -0.1])


def test_unknown_keys_rejected(small, tmp_path):
    with pytest.raises(ConfigError, match="numerics.resolutoin"):
        load_config(small, ["numerics.resolutoin=3"])
    with pytest.raises(ConfigError):
        load_config(small, ["plotting.colour=red"])
    with pytest.raises(ConfigError):
        load_config(small, ["problem.V.depth=2"])
    assert main(["gamma-scan", "--config", str(small), "--out", str(tmp_path / "g.csv"),
                 "--override", "numerics.bogus=1"]) == 2


def test_missing_config_is_config_error(tmp_path):
    assert main(["gamma-scan", "--out", str(tmp_path / "g.csv")]) == 2
    assert main(["gamma-scan", "--config", str(tmp_path / "nope.ini"),
                 "--out", str(tmp_path / "g.csv")]) == 2


def test_overrides_apply(small):
    cfg = load_config(small, ["numerics.resolution=33,17", "problem.V.curvature=2.5",
                              "experiment.q=0.1,0.2; 0.3,0.4"])
    assert cfg["numerics"]["resolution"] == (33, 17)
    assert cfg["problem.V"]["curvature"] == 2.5
    assert cfg["experiment"]["q"] == [[0.1, 0.2], [0.3, 0.4]]
    assert cfg["numerics"]["newton_tol"] == 1e-8
    assert cfg["experiment"]["seed"] == 0


def test_shipped_configs_parse():
    for path in CONFIGS.glob("*.ini"):
        cfg = load_config(path)
        assert ladder_of(cfg)


def test_ground_state_cli(tmp_path, capsys):
    out = tmp_path / "gs.csv"
    assert main(["ground-state", "--dim", "1", "--p", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# N=1 p=3.0 u0=1.41421356")
    assert lines[1] == "r,u,du"
    s = summary(tmp_path / "gs.summary.txt")
    assert s["version"] == __version__
    assert float(s["c0_bar"]) == pytest.approx(4 / 3, abs=1e-8)
    assert (tmp_path / "gs.config.ini").read_text().startswith(f"# spikelab {__version__}")
    assert "c0_bar=" in capsys.readouterr().out
    assert main(["ground-state", "--out", str(out)]) == 2
    assert main(["ground-state", "--dim", "3", "--p", "6", "--out", str(out)]) == 1


def test_gamma_scan_constant(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["gamma-scan", "--config", str(CONFIGS / "constant.ini"), "--out", str(out),
                 "--lattice", "5"]) == 0
    s = summary(tmp_path / "g.summary.txt")
    assert s["gamma_constant"] == "true"
    assert s["nondegenerate"] == "0"
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["Q1", "Q2", "gamma"] and len(rows) == 26


def test_gamma_scan_two_well(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["gamma-scan", "--config", str(CONFIGS / "two_well.ini"), "--out", str(out)]) == 0
    s = summary(tmp_path / "g.summary.txt")
    assert (s["minima"], s["saddles"], s["gamma_constant"]) == ("2", "1", "false")
    crit = list(csv.DictReader((tmp_path / "g_critical.csv").open()))
    assert sorted(r["kind"] for r in crit) == ["min", "min", "saddle"]


def test_solve_outputs(small, tmp_path):
    out = tmp_path / "run"
    assert main(["solve", "--config", str(small), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.glob("u_eps_*.csv")) == \
        ["u_eps_0.15.csv", "u_eps_0.2.csv", "u_eps_0.3.csv"]
    rows = list(csv.DictReader((out / "summary.csv").open()))
    assert [float(r["eps"]) for r in rows] == [0.3, 0.2, 0.15]
    assert (out / "solve.config.ini").exists()
    assert summary(out / "solve.summary.txt")["rungs_converged"] == "3"


def test_reduce_columns_and_determinism(small, tmp_path):
    outs = []
    for k, jobs in enumerate(("1", "2")):
        out = tmp_path / f"r{k}.csv"
        assert main(["reduce", "--config", str(small), "--out", str(out), "--jobs", jobs]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    header = outs[0].decode().splitlines()[0].split(",")
    assert header == ["Q1", "Q2", "eps", "A_eps", "c0_gamma", "gap", "grad_ratio",
                      "ansatz_residual", "w_norm", "coercivity", "status"]
    s = summary(tmp_path / "r0.summary.txt")
    assert float(s["uniqueness_diff"]) < 1e-8
    assert s["failed_rows"] == "0"


def test_spike_track_summary(small, tmp_path):
    out = tmp_path / "track"
    assert main(["spike-track", "--config", str(small), "--out", str(out)]) == 0
    s = summary(out / "track.summary.txt")
    assert s["pass_concentration"] == "true"
    assert float(s["final_distance_spacings"]) <= 2
    assert "residual_slope" in s
    assert (out / "residuals.csv").exists()


def test_verify_expansion_determinism(small, tmp_path):
    runs = []
    for k in range(2):
        out = tmp_path / f"e{k}.csv"
        assert main(["verify-expansion", "--config", str(small), "--out", str(out),
                     "--lattice", "2", "--eps-ladder", "0.2,0.15"]) == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]
    assert "argmin_threshold_eps" in summary(tmp_path / "e0.summary.txt")


def test_parse_config_requires_problem():
    import configparser
    cp = configparser.ConfigParser()
    cp.read_string("[numerics]\nresolution = 33\n")
    with pytest.raises(ConfigError, match="problem"):
        parse_config(cp)


def test_module_entry_point(tmp_path):
    out = tmp_path / "gs.csv"
    proc = subprocess.run([sys.executable, "-m", "spikelab", "ground-state", "--dim", "2",
                           "--p", "3", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "u0=" in proc.stdout
