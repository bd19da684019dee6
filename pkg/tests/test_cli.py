"""Tests for the command-line front end.

Determinism and round-trip guarantees are exercised at the byte level;
numerical content is spot-checked against the library calls the
commands wrap, so these tests stay plumbing-focused."""

import json
import math

import numpy as np
import pytest

from pontspec import cli
from pontspec.cli import GridSpec, _parse_grid, main, parallel_map
from pontspec.efimov import analytic_levels
from pontspec.errors import ConfigError
from pontspec.special import OMEGA
from pontspec.twocenter import epsilon0_curve


class TestGridSpec:
    def test_linear_and_log_points(self):
        lin = _parse_grid("0.5:2:4")
        assert lin == GridSpec(0.5, 2.0, 4, "linear")
        assert np.allclose(lin.points(), [0.5, 1.0, 1.5, 2.0])
        log = _parse_grid("1:100:3:log")
        assert np.allclose(log.points(), [1.0, 10.0, 100.0])

    def test_rejects_malformed(self):
        for text in ("1:2", "a:2:3", "1:b:3", "1:2:x", "1:2:3:weird",
                     "2:1:3", "1:2:0", "0:2:3:log", "1:inf:3"):
            with pytest.raises(ConfigError):
                _parse_grid(text)


class TestParallelMap:
    def test_order_preserved_with_workers(self, monkeypatch):
        monkeypatch.setenv("PONTSPEC_THREADS", "4")
        items = list(range(60))
        assert parallel_map(lambda x: x * x, items) == [x * x for x in items]

    def test_sequential_default(self, monkeypatch):
        monkeypatch.delenv("PONTSPEC_THREADS", raising=False)
        assert parallel_map(lambda x: -x, [1, 2, 3]) == [-1, -2, -3]

    def test_bad_env_rejected(self, monkeypatch):
        monkeypatch.setenv("PONTSPEC_THREADS", "many")
        with pytest.raises(ConfigError):
            parallel_map(lambda x: x, [1])
        monkeypatch.setenv("PONTSPEC_THREADS", "0")
        with pytest.raises(ConfigError):
            parallel_map(lambda x: x, [1])


class TestExitCodes:
    def test_success(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["scattering", "--t-theta", "0", "--r", "1e-8",
                     "--output", str(out)]) == 0
        assert out.exists()

    def test_config_errors_exit_two(self, tmp_path, capsys):
        assert main(["potential", "--grid", "nope"]) == 2
        assert main(["bo", "--levels", "3"]) == 2  # m_heavy missing
        bad = tmp_path / "bad.cfg"
        bad.write_text("m-heavy = 20\nwhoops = 3\n")
        assert main(["bo", "--config", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "unknown key" in err and "whoops" in err

    def test_numerical_errors_exit_one(self, capsys):
        assert main(["efimov", "--k", "0.2"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_command_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


class TestConfigFile:
    def test_file_fills_and_flags_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# heavy pair\nm-heavy = 20\nlevels = 6\nformat = json\n\n")
        assert main(["bo", "--config", str(cfg), "--levels", "2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["meta"]["m_heavy"] == 20.0
        assert payload["meta"]["requested"] == 2  # flag beat the file

    def test_line_precise_parse_errors(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("m-heavy = 20\njust words\n")
        assert main(["bo", "--config", str(cfg)]) == 2
        assert ":2:" in capsys.readouterr().err
        cfg.write_text("levels = 3\nlevels = 4\n")
        assert main(["bo", "--config", str(cfg), "--m-heavy", "5"]) == 2
        assert "duplicate" in capsys.readouterr().err

    def test_bad_value_names_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("m-heavy = heavy\n")
        assert main(["bo", "--config", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "m_heavy" in err and "heavy" in err


class TestPotentialCommand:
    def test_csv_shape_and_values(self, capsys):
        assert main(["potential", "--t-theta", "1", "--grid", "0.5:20:5"]) == 0
        out = capsys.readouterr().out
        lines = out.split("\n")
        assert lines[0] == "r,epsilon0"
        assert len(lines) == 7 and lines[-1] == ""  # header + 5 rows + LF
        assert "\r" not in out
        r, eps = (float(x) for x in lines[1].split(","))
        assert eps == float(epsilon0_curve(1.0, np.array([r]))[0])

    def test_figure1_reference_column(self, capsys):
        assert main(["potential", "--figure1", "--grid", "0.5:20:4"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "r,epsilon0,inverse_square_envelope"
        for line in lines[1:]:
            r, _, ref = (float(x) for x in line.split(","))
            assert ref == -OMEGA * OMEGA / r**2

    def test_default_grid_is_figure_window(self, capsys):
        assert main(["potential", "--figure1"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 401
        first = float(lines[1].split(",")[0])
        last = float(lines[-1].split(",")[0])
        assert first == 0.5 and last == 20.0

    def test_thread_count_never_changes_bytes(self, tmp_path, monkeypatch):
        args = ["potential", "--grid", "0.5:20:101"]
        monkeypatch.setenv("PONTSPEC_THREADS", "1")
        main(args + ["--output", str(tmp_path / "a.csv")])
        monkeypatch.setenv("PONTSPEC_THREADS", "3")
        main(args + ["--output", str(tmp_path / "b.csv")])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestSpectrumCommands:
    def test_local_pair_rows(self, capsys):
        assert main(["spectrum-local", "--alpha", "-1", "--r", "2"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "n,energy,lam"
        # far-separated pair: both levels near the single-center depth
        for line in lines[1:]:
            _, energy, lam = (float(x) for x in line.split(","))
            assert energy == -lam
            assert abs(lam / (16.0 * math.pi**2) - 1.0) < 1e-6

    def test_positions_file(self, tmp_path, capsys):
        pf = tmp_path / "centers.txt"
        pf.write_text("# one center\n0 0 0 -1.0\n")
        assert main(["spectrum-local", "--positions-file", str(pf)]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 2
        energy = float(lines[1].split(",")[1])
        assert abs(energy / (-16.0 * math.pi**2) - 1.0) < 1e-9

    def test_positions_file_line_precise_error(self, tmp_path, capsys):
        pf = tmp_path / "centers.txt"
        pf.write_text("0 0 0 -1.0\n0 0 1\n")
        assert main(["spectrum-local", "--positions-file", str(pf)]) == 2
        assert ":2:" in capsys.readouterr().err

    def test_pair_and_file_mutually_exclusive(self, tmp_path):
        pf = tmp_path / "centers.txt"
        pf.write_text("0 0 0 -1.0\n")
        assert main(["spectrum-local", "--alpha", "-1", "--r", "2",
                     "--positions-file", str(pf)]) == 2
        assert main(["spectrum-local", "--alpha", "-1"]) == 2

    def test_nonlocal_branch_rows(self, capsys):
        assert main(["spectrum-nonlocal", "--r", "2.5"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "branch,exists,energy,decay_rate"
        even = lines[1].split(",")
        odd = lines[2].split(",")
        assert even[0] == "even" and even[1] == "true"
        assert float(even[2]) < 0.0
        assert odd[0] == "odd" and odd[1] == "false" and odd[2] == "nan"


class TestEfimovCommand:
    def test_both_methods_agree(self, capsys):
        assert main(["efimov", "--k", "5", "--r0", "1", "--levels", "4",
                     "--method", "both"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "n,E_analytic,E_numeric,E_asymptotic,ratio"
        assert len(lines) == 5
        for line in lines[1:]:
            cells = line.split(",")
            e_analytic, e_numeric = float(cells[1]), float(cells[2])
            assert abs(e_numeric / e_analytic - 1.0) < 1e-6

    def test_analytic_matches_library(self, capsys):
        assert main(["efimov", "--k", "5", "--r0", "1", "--levels", "3",
                     "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        spec = analytic_levels(5.0, 1.0, 3)
        got = [row["E_analytic"] for row in payload["rows"]]
        assert got == list(spec.levels)  # exact float round-trip
        assert payload["rows"][-1]["ratio"] is None

    def test_repeat_runs_byte_identical(self, tmp_path):
        for name in ("a", "b"):
            assert main(["efimov", "--k", "5", "--r0", "1", "--levels", "5",
                         "--output", str(tmp_path / f"{name}.csv")]) == 0
            assert main(["efimov", "--k", "5", "--r0", "1", "--levels", "5",
                         "--format", "json",
                         "--output", str(tmp_path / f"{name}.json")]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


class TestScatteringCommand:
    def test_merged_center_limit(self, capsys):
        assert main(["scattering", "--t-theta", "0", "--r", "1e-8"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        row = lines[1].split(",")
        assert abs(float(row[2]) / math.sqrt(2.0) - 1.0) < 1e-6
        assert row[3] == "false"

    def test_requires_parameters(self):
        assert main(["scattering", "--t-theta", "0"]) == 2


class TestBoCommand:
    def test_json_mirrors_spectrum(self, capsys):
        assert main(["bo", "--m-heavy", "20", "--levels", "3",
                     "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        meta = payload["meta"]
        assert meta["efimov_regime"] is True
        assert meta["mu"] == 10.0 and meta["delivered"] == 3
        assert [row["nodes"] for row in payload["rows"]] == [0, 1, 2]

    def test_subcritical_empty_table(self, capsys):
        assert main(["bo", "--m-heavy", "1", "--m-light", "1"]) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[0] == "n,energy,ratio,nodes"
        assert lines[1] == ""  # header only
