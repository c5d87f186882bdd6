import json
import subprocess
import sys

import numpy as np
import pytest

from photon_scatter import cli

from conftest import GOLDEN

GOLDEN_RUNS = [
    ("blockade-g2", "fig3_ratio_0p90"),
    ("blockade-g2", "fig3_ratio_1over1p04"),
    ("blockade-g2", "fig3_ratio_1over1p02"),
    ("phase", "fig4_phase"),
    ("wavepacket-g2", "wavepacket_gamma"),
]


def run(*argv):
    return cli.main(list(argv))


class TestGolden:
    @pytest.mark.parametrize("command, name", GOLDEN_RUNS)
    def test_byte_identical(self, tmp_path, command, name):
        out = tmp_path / "out.csv"
        assert run(command, "--config", str(GOLDEN / f"{name}.json"), "--out", str(out)) == 0
        assert out.read_bytes() == (GOLDEN / f"{name}.csv").read_bytes()

    def test_parallel_identical(self, tmp_path):
        out = tmp_path / "out.csv"
        name = "fig3_ratio_1over1p04"
        assert run("blockade-g2", "--config", str(GOLDEN / f"{name}.json"), "--out", str(out), "--jobs", "3") == 0
        assert out.read_bytes() == (GOLDEN / f"{name}.csv").read_bytes()

    def test_csv_round_trip(self, tmp_path):
        out = tmp_path / "out.csv"
        run("blockade-g2", "--set", "range=[-1,1,9]", "--out", str(out))
        columns, data = cli.read_csv(out)
        assert columns == ["tau", "g2", "flag"]
        config, _ = cli.parse_config("blockade-g2", None, ["range=[-1,1,9]"])
        trace = cli.run_sweep(config)
        assert np.array_equal(data[:, 1], trace.values)


class TestOutput:
    def test_header(self, capsys):
        assert run("pair-rate", "--set", "range=[2,3,3]") == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == f"# photon-scatter v{cli.__version__}"
        assert lines[1] == "k,rate,flag"
        assert len(lines) == 5

    def test_json_mirrors_csv(self, capsys):
        run("zeta", "--set", "range=[-1,1,5]", "--format", "json")
        doc = json.loads(capsys.readouterr().out)
        assert doc["columns"] == ["tau", "zeta", "flag"]
        run("zeta", "--set", "range=[-1,1,5]")
        csv_rows = [list(map(float, line.split(","))) for line in capsys.readouterr().out.splitlines()[2:]]
        assert [[float(v) for v in row] for row in doc["rows"]] == csv_rows

    def test_divergence_flag(self, capsys):
        code = run("blockade-g2", "--set", "fixed.coupling_ratio=1", "--set", "axis=\"k\"",
                   "--set", "range=[0.5,1.5,3]")
        assert code == 2
        rows = capsys.readouterr().out.splitlines()[2:]
        flags = [int(r.split(",")[2]) for r in rows]
        assert flags == [0, 1, 0]
        # Flagged row carries the finite numerator.
        assert np.isfinite(float(rows[1].split(",")[1]))

    def test_unit_scale(self, capsys):
        run("down-g2", "--set", "range=[1,2,2]")
        base = [r.split(",") for r in capsys.readouterr().out.splitlines()[2:]]
        run("down-g2", "--set", "range=[1,2,2]", "--set", "unit_scale=10")
        scaled = [r.split(",") for r in capsys.readouterr().out.splitlines()[2:]]
        assert float(scaled[0][0]) == pytest.approx(float(base[0][0]) / 10)
        assert scaled[0][1] == base[0][1]

    def test_coupling_ratio_axis(self, capsys):
        assert run("blockade-g2", "--set", "axis=\"coupling-ratio\"", "--set", "range=[0.5,0.9,3]") == 0
        assert capsys.readouterr().out.splitlines()[1] == "coupling_ratio,g2,flag"

    def test_kappa_warning(self, capsys):
        run("pair-rate", "--set", "params.kappa_i1=2", "--set", "range=[2,3,2]")
        assert "warning" in capsys.readouterr().err


class TestValidation:
    @pytest.mark.parametrize("overrides, message", [
        (["bogus=1"], "unknown config key"),
        (["params.omega4=1"], "unknown params key"),
        (["fixed.q=1"], "unknown fixed key"),
        (["range=[0,1,1]"], "count must be >= 2"),
        (["range=[1,0,5]"], "empty range"),
        (["range=[0,1]"], "start, stop, count"),
        (["range=[0,1,2.5]"], "integer"),
        (["params.g=\"x\""], "must be a number"),
        (["params.g=-1"], "g must be"),
        (["params.omega2=1.1"], "mode 2 copies mode 1"),
        (["params.degenerate=false"], "needs a degenerate"),
        (["axis=\"gamma\""], "not available"),
        (["scale=\"cubic\""], "linear"),
        (["scale=\"log\"", "range=[-1,1,3]"], "start > 0"),
        (["unit_scale=0"], "unit_scale"),
    ])
    def test_rejected(self, capsys, overrides, message):
        argv = ["blockade-g2"]
        for item in overrides:
            argv += ["--set", item]
        assert run(*argv) == 1
        err = capsys.readouterr().err.strip()
        assert message in err
        assert len(err.splitlines()) == 1

    def test_nan_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"params": {"g": NaN}}')
        assert run("blockade-g2", "--config", str(cfg)) == 1
        assert "finite" in capsys.readouterr().err

    def test_zeta_degenerate(self, capsys):
        assert run("zeta", "--set", "params.degenerate=true") == 1
        assert "non-degenerate" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert run("phase", "--config", "/nonexistent.json") == 1

    def test_bad_json(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{")
        assert run("phase", "--config", str(cfg)) == 1

    def test_bad_set_syntax(self, capsys):
        assert run("phase", "--set", "novalue") == 1

    def test_set_overrides_file(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"params": {"g": 0.05}, "range": [0, 1, 3]}')
        config, _ = cli.parse_config("blockade-g2", json.loads(cfg.read_text()), ["params.g=0.07"])
        assert config.params.g == 0.07

    def test_bad_jobs(self, capsys):
        assert run("phase", "--jobs", "0") == 1

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as info:
            run("nope")
        assert info.value.code == 1


class TestFeynmanCheck:
    @pytest.mark.parametrize("degenerate", ["false", "true"])
    def test_passes(self, capsys, degenerate):
        assert run("feynman-check", "--set", f"params.degenerate={degenerate}") == 0
        out = capsys.readouterr().out
        assert "G3 |sum - closed|" in out and "G22 |sum - closed|" in out

    def test_strong_coupling(self, capsys):
        assert run("feynman-check", "--set", "params.g=2") == 1
        assert "strong-coupling" in capsys.readouterr().err

    def test_truncated_series_fails(self, capsys):
        assert run("feynman-check", "--set", "params.g=0.4", "--set", "fixed.max_order=0") == 1

    def test_rejects_sweep_keys(self, capsys):
        assert run("feynman-check", "--set", "axis=\"tau\"") == 1


def test_entry_point():
    proc = subprocess.run([sys.executable, "-m", "photon_scatter.cli", "pair-rate", "--set", "range=[2,3,2]"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# photon-scatter v")
