"""Tests for the panov-fv command line front end."""

import json

import numpy as np
import pytest

from panov_fv.cli import ConfigError, main, parse_config, serialize_config


def run_cli(*argv, capsys=None):
    code = main(list(argv))
    out, err = capsys.readouterr() if capsys else ("", "")
    return code, out, err


class TestConfigFile:
    def test_parse_and_serialize_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"problem": "ex52", "mesh": 50,\n'
                        ' "custom": {"a": 2.0}}\n')
        settings = parse_config(path)
        text = serialize_config(settings)
        again = serialize_config(json.loads(text))
        assert text == again

    def test_unknown_top_level_key_named(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"problem": "ex52", "bogus_key": 1}')
        with pytest.raises(ConfigError, match="bogus_key"):
            parse_config(path)

    def test_unknown_custom_key_named(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"custom": {"slope": 1.0}}')
        with pytest.raises(ConfigError, match="custom.slope"):
            parse_config(path)

    def test_root_must_be_object(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('[1, 2, 3]')
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_invalid_json_reported(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{problem: ex52}')
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_missing_file_reported(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "absent.json")


class TestRunCommand:
    def test_summary_line_and_artifacts(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli("run", "--problem", "ex52", "--mesh", "24",
                               "--out-dir", str(out_dir), capsys=capsys)
        assert code == 0
        fields = out.strip().split()
        assert len(fields) == 5
        t_end, err, tvu, tvb, ent = map(float, fields)
        assert t_end == 6.0
        assert err > 0 and tvu > 0 and tvb >= 0 and ent >= 0
        sol = (out_dir / "solution.csv").read_text().splitlines()
        assert sol[0] == "x,y,u,beta"
        assert len(sol) == 1 + 24 * 24
        report = json.loads((out_dir / "report.json").read_text())
        assert list(report) == ["M", "dx", "dt", "lambda", "t_end",
                                "l1_error", "tv_u", "tv_beta",
                                "entropy_violation", "conservation_defect"]
        assert report["M"] == 24
        assert report["l1_error"] == pytest.approx(err, rel=1e-15)
        assert report["entropy_violation"] >= 0.0

    def test_one_dimensional_run(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli("run", "--problem", "ex52", "--mesh", "32",
                               "--dim", "1", "--out-dir", str(out_dir),
                               capsys=capsys)
        assert code == 0
        sol = (out_dir / "solution.csv").read_text().splitlines()
        assert sol[0] == "x,u,beta"
        assert len(sol) == 33

    def test_zero_horizon_error_is_zero(self, capsys):
        code, out, _ = run_cli("run", "--problem", "ex51", "--mesh", "4",
                               "--t-end", "0", capsys=capsys)
        assert code == 0
        fields = out.strip().split()
        assert float(fields[0]) == 0.0
        assert float(fields[1]) == 0.0

    def test_steady_problem_error_stays_zero(self, capsys):
        code, out, _ = run_cli("run", "--problem", "steady", "--mesh", "12",
                               capsys=capsys)
        assert code == 0
        assert float(out.strip().split()[1]) == 0.0

    def test_mesh_too_small_exit_2(self, capsys):
        code, _, err = run_cli("run", "--problem", "ex51", "--mesh", "3",
                               capsys=capsys)
        assert code == 2
        assert "mesh" in err

    def test_unknown_problem_exit_2(self, capsys):
        code, _, err = run_cli("run", "--problem", "nope", capsys=capsys)
        assert code == 2
        assert "problem" in err

    def test_unknown_config_key_exit_2(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text('{"problem": "ex51", "bogus_key": 1}')
        code, _, err = run_cli("run", "--config", str(path), capsys=capsys)
        assert code == 2
        assert "bogus_key" in err

    def test_intentional_cfl_breach_exit_3(self, capsys):
        code, _, err = run_cli("run", "--problem", "ex51", "--mesh", "8",
                               "--cfl-fraction", "2.0", capsys=capsys)
        assert code == 3
        assert "lambda" in err

    def test_flags_override_config(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text('{"problem": "ex52", "mesh": 8, "t_end": 0.5}')
        code_cfg, out_cfg, _ = run_cli("run", "--config", str(path),
                                       capsys=capsys)
        code_flag, out_flag, _ = run_cli("run", "--config", str(path),
                                         "--mesh", "16", capsys=capsys)
        assert code_cfg == 0 and code_flag == 0
        assert out_cfg != out_flag

    def test_deterministic_artifacts(self, tmp_path, capsys):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            code, _, _ = run_cli("run", "--problem", "ex52", "--mesh", "16",
                                 "--t-end", "1.0", "--out-dir", str(d),
                                 capsys=capsys)
            assert code == 0
        assert ((dirs[0] / "solution.csv").read_bytes()
                == (dirs[1] / "solution.csv").read_bytes())
        assert ((dirs[0] / "report.json").read_bytes()
                == (dirs[1] / "report.json").read_bytes())


class TestCustomProblem:
    def test_csv_staircase_flux(self, tmp_path, capsys):
        r_csv = tmp_path / "r.csv"
        r_csv.write_text("0.0,0.0\n1.0,1.0\n2.0,0.0\n")
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(
            "run", "--problem", "custom", "--g1", "burgers",
            "--r-csv", str(r_csv), "--u0-const", "0.5",
            "--origin", "0,0", "--extent", "4,4", "--t-end", "0.5",
            "--mesh", "24", "--dim", "1", "--out-dir", str(out_dir),
            capsys=capsys)
        assert code == 0
        fields = out.strip().split()
        assert fields[1] == "nan"
        report = json.loads((out_dir / "report.json").read_text())
        assert report["l1_error"] is None

    def test_unknown_flux_name_exit_2(self, capsys):
        code, _, err = run_cli("run", "--problem", "custom", "--g1", "cubic",
                               capsys=capsys)
        assert code == 2
        assert "custom.g1" in err

    def test_unsorted_breakpoints_exit_2(self, tmp_path, capsys):
        r_csv = tmp_path / "r.csv"
        r_csv.write_text("1.0,0.0\n1.0,1.0\n")
        code, _, err = run_cli("run", "--problem", "custom",
                               "--r-csv", str(r_csv), capsys=capsys)
        assert code == 2
        assert "custom.r_csv" in err

    def test_nonpositive_slope_exit_2(self, capsys):
        code, _, err = run_cli("run", "--problem", "custom", "--a", "-1.0",
                               capsys=capsys)
        assert code == 2
        assert "custom.a" in err


class TestConvergenceCommand:
    def test_table_artifacts(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli("convergence", "--problem", "ex52",
                               "--mesh", "8,16", "--t-end", "1.0",
                               "--out-dir", str(out_dir), capsys=capsys)
        assert code == 0
        assert "min EOC" in out
        csv_lines = (out_dir / "table.csv").read_text().splitlines()
        assert csv_lines[0] == "M,e,tv_u,tv_beta,eoc"
        assert len(csv_lines) == 3
        assert (out_dir / "table.txt").read_text().splitlines()[0].split() \
            == ["M", "e", "tv_u", "tv_beta", "eoc"]

    def test_steady_reports_resolved(self, capsys):
        code, out, _ = run_cli("convergence", "--problem", "steady",
                               "--mesh", "8,16", capsys=capsys)
        assert code == 0
        assert "resolved" in out

    def test_single_mesh_rejected(self, capsys):
        code, _, err = run_cli("convergence", "--problem", "ex52",
                               "--mesh", "8", capsys=capsys)
        assert code == 2
        assert "mesh" in err

    def test_nonincreasing_meshes_rejected(self, capsys):
        code, _, err = run_cli("convergence", "--problem", "ex52",
                               "--mesh", "16,8", capsys=capsys)
        assert code == 2
        assert "mesh" in err


class TestInvariantsCommand:
    def test_short_suite_passes(self, capsys):
        code, out, _ = run_cli("invariants", "--trials", "6", "--seed", "3",
                               capsys=capsys)
        assert code == 0
        assert "all invariants passed" in out
        for name in ("monotonicity", "l1_contraction", "tvd_beta",
                     "linf_bound", "entropy", "conservation"):
            assert name in out

    def test_bad_trials_exit_2(self, capsys):
        code, _, err = run_cli("invariants", "--trials", "0", capsys=capsys)
        assert code == 2
        assert "trials" in err


class TestInstalledEntryPoint:
    def test_help_runs(self):
        import subprocess
        proc = subprocess.run(["panov-fv", "--help"], capture_output=True,
                              text=True)
        assert proc.returncode == 0
        assert "run" in proc.stdout and "convergence" in proc.stdout
