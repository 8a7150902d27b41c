import json
import subprocess
import sys

import pytest

from xpmcap.cli import main

CONFIG = """\
link:
  gamma: 1.2
  alpha_db_per_km: 0.2
  beta2_ps2_per_km: -21.7
  length_km: 50.0
  baud_rate: 32.0e9
  channel_spacing_hz: 50.0e9
  memory: 1
noise:
  sigma_sq_w: 1.0e-3
grid:
  n_samples: 1024
  n_symbols: 32
"""


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(CONFIG, encoding="utf-8")
    return str(path)


def run(args):
    return main(args)


class TestCoeffsCommand:
    def test_writes_tensors_and_manifest(self, tmp_path, config_path):
        out = tmp_path / "out"
        code = run(["--config", config_path, "--out-dir", str(out), "--quiet",
                    "coeffs"])
        assert code == 0
        tx = json.loads((out / "tensor_x.json").read_text())
        tw = json.loads((out / "tensor_w.json").read_text())
        assert len(tx["entries"]) == 27
        assert tw["user"] == "w"
        conv = json.loads((out / "tensor_convergence.json").read_text())
        assert conv["x"]["residual"] <= 1e-6
        manifest = json.loads((out / "coeffs-manifest.json").read_text())
        assert manifest["command"] == "coeffs"
        assert config_path in manifest["inputs"]
        assert len(manifest["outputs"]) == 3

    def test_default_setup_writes_full_windows(self, tmp_path):
        # no config: reference defaults (memory 5 -> 11^3 entries per user)
        out = tmp_path / "full"
        assert run(["--out-dir", str(out), "--quiet", "coeffs"]) == 0
        for user in ("x", "w"):
            doc = json.loads((out / f"tensor_{user}.json").read_text())
            assert len(doc["entries"]) == 1331
            assert doc["memory"] == 5
        conv = json.loads((out / "tensor_convergence.json").read_text())
        assert conv["x"]["residual"] <= 1e-6
        assert conv["w"]["residual"] <= 1e-6

    def test_memory_zero_gives_single_entry(self, tmp_path, config_path):
        out = tmp_path / "m0"
        assert run(["--config", config_path, "--out-dir", str(out), "--quiet",
                    "coeffs", "--memory", "0"]) == 0
        tx = json.loads((out / "tensor_x.json").read_text())
        assert len(tx["entries"]) == 1

    def test_zero_length_gives_zero_tensor(self, tmp_path, config_path):
        out = tmp_path / "l0"
        assert run(["--config", config_path, "--out-dir", str(out), "--quiet",
                    "coeffs", "--length-km", "0"]) == 0
        tx = json.loads((out / "tensor_x.json").read_text())
        assert all(e["re"] == 0.0 and e["im"] == 0.0 for e in tx["entries"])


class TestSweepCommand:
    def test_awgn_anchor_values(self, tmp_path):
        out = tmp_path
        code = run(["--out-dir", str(out), "--quiet", "sweep",
                    "--powers-dbm", "-20", "-5", "10.3",
                    "--g-real", "0", "--g-abs-sq", "0",
                    "--out", "s.csv"])
        assert code == 0
        lines = (out / "s.csv").read_text().strip().splitlines()
        assert lines[0] == "p_dbm,u1,u2,u_sum,awgn,ian1,ian2"
        awgn = [float(line.split(",")[4]) for line in lines[1:]]
        assert awgn == pytest.approx([0.00720, 0.21178, 2.66848], abs=5e-5)

    def test_missing_coefficients_is_usage_error(self, tmp_path, capsys):
        code = run(["--out-dir", str(tmp_path), "--quiet", "sweep",
                    "--powers-dbm", "0"])
        assert code == 2
        assert "missing coefficients" in capsys.readouterr().err

    def test_no_powers_is_usage_error(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--quiet", "sweep",
                    "--g-real", "0", "--g-abs-sq", "0"])
        assert code == 2

    def test_fitted_pair_reproduces_reference_point(self, tmp_path):
        out = tmp_path
        code = run(["--out-dir", str(out), "--quiet", "sweep",
                    "--powers-dbm", "5.2",
                    "--g-real", "0.035", "--g-abs-sq", "5.545e-5",
                    "--out", "fit.csv", "--json", "fit.json",
                    "--svg", "fit.svg"])
        assert code == 0
        row = json.loads((out / "fit.json").read_text())[0]
        assert row["u1"] == pytest.approx(1.60446, abs=5e-3)
        assert (out / "fit.svg").read_text().startswith("<svg")

    def test_rerun_is_bit_identical(self, tmp_path):
        args = ["--out-dir", str(tmp_path), "--quiet", "sweep",
                "--powers-dbm", "-5", "0", "5",
                "--g-real", "0.035", "--g-abs-sq", "5.545e-5",
                "--out", "rerun.csv"]
        assert run(args) == 0
        first = (tmp_path / "rerun.csv").read_bytes()
        m1 = json.loads((tmp_path / "sweep-manifest.json").read_text())
        assert run(args) == 0
        assert (tmp_path / "rerun.csv").read_bytes() == first
        m2 = json.loads((tmp_path / "sweep-manifest.json").read_text())
        assert m1["outputs"] == m2["outputs"]

    def test_coeffs_and_region_reruns_bit_identical(self, tmp_path,
                                                    config_path):
        out = tmp_path / "det"
        args_c = ["--config", config_path, "--out-dir", str(out), "--quiet",
                  "coeffs", "--memory", "0"]
        assert run(args_c) == 0
        first = (out / "tensor_x.json").read_bytes()
        assert run(args_c) == 0
        assert (out / "tensor_x.json").read_bytes() == first
        args_r = ["--out-dir", str(out), "--quiet", "region", "--u1", "0.39",
                  "--u2", "0.39", "--usum", "0.494233", "--out", "r.json"]
        assert run(args_r) == 0
        region_first = (out / "r.json").read_bytes()
        assert run(args_r) == 0
        assert (out / "r.json").read_bytes() == region_first

    def test_tensor_driven_sweep(self, tmp_path, config_path):
        out = tmp_path / "t"
        assert run(["--config", config_path, "--out-dir", str(out), "--quiet",
                    "coeffs"]) == 0
        code = run(["--config", config_path, "--out-dir", str(out), "--quiet",
                    "sweep", "--powers-dbm", "-5", "0",
                    "--coeffs-x", str(out / "tensor_x.json"),
                    "--coeffs-w", str(out / "tensor_w.json"),
                    "--out", "ten.csv"])
        assert code == 0
        manifest = json.loads((out / "sweep-manifest.json").read_text())
        assert str(out / "tensor_x.json") in manifest["inputs"]


class TestRegionCommand:
    def test_published_pentagon(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--quiet", "region",
                    "--u1", "0.39", "--u2", "0.39", "--usum", "0.494233",
                    "--out", "r.json", "--svg", "r.svg",
                    "--awgn", "0.39", "--ian1", "0.2", "--ian2", "0.2"])
        assert code == 0
        doc = json.loads((tmp_path / "r.json").read_text())
        assert len(doc["vertices"]) == 5
        corner = doc["vertices"][2]
        assert corner == pytest.approx([0.39, 0.104233], abs=1e-9)
        assert doc["dominant_face_midpoint"] == pytest.approx(
            [0.2471165, 0.2471165], abs=1e-9)
        svg = (tmp_path / "r.svg").read_text()
        assert "excess area" in svg

    def test_rectangle_json(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--quiet", "region",
                    "--u1", "1", "--u2", "1", "--usum", "3",
                    "--out", "rect.json"])
        assert code == 0
        doc = json.loads((tmp_path / "rect.json").read_text())
        assert len(doc["vertices"]) == 4
        assert doc["dominant_face_midpoint"] is None

    def test_degenerate_point_region(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--quiet", "region",
                    "--u1", "1", "--u2", "1", "--usum", "0",
                    "--out", "pt.json"])
        assert code == 0
        doc = json.loads((tmp_path / "pt.json").read_text())
        assert doc["vertices"] == [[0.0, 0.0]]

    def test_negative_bound_rejected(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--quiet", "region",
                    "--u1", "-1", "--u2", "1", "--usum", "1"])
        assert code == 2

    def test_from_sweep_row(self, tmp_path):
        assert run(["--out-dir", str(tmp_path), "--quiet", "sweep",
                    "--powers-dbm", "-2.9", "0",
                    "--g-real", "0.035", "--g-abs-sq", "5.545e-5",
                    "--out", "s.csv"]) == 0
        code = run(["--out-dir", str(tmp_path), "--quiet", "region",
                    "--from-sweep", str(tmp_path / "s.csv"),
                    "--at-dbm", "-2.9", "--out", "fs.json", "--svg", "fs.svg"])
        assert code == 0
        doc = json.loads((tmp_path / "fs.json").read_text())
        assert doc["tag"] == "theorem1"

    def test_missing_input_file_is_usage_error(self, tmp_path, capsys):
        code = run(["--out-dir", str(tmp_path), "--quiet", "region",
                    "--from-sweep", str(tmp_path / "nope.csv"),
                    "--at-dbm", "0", "--out", "x.json"])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_from_sweep_missing_row(self, tmp_path):
        assert run(["--out-dir", str(tmp_path), "--quiet", "sweep",
                    "--powers-dbm", "0",
                    "--g-real", "0", "--g-abs-sq", "0",
                    "--out", "s.csv"]) == 0
        code = run(["--out-dir", str(tmp_path), "--quiet", "region",
                    "--from-sweep", str(tmp_path / "s.csv"),
                    "--at-dbm", "7.7", "--out", "x.json"])
        assert code == 2


class TestSimulateCommand:
    def test_memoryless_batch(self, tmp_path, config_path):
        code = run(["--config", config_path, "--out-dir", str(tmp_path),
                    "--seed", "7", "--quiet", "simulate", "--n", "64",
                    "--p1-dbm", "0", "--p2-dbm", "0",
                    "--model", "memoryless", "--g-real", "0",
                    "--g-imag", "0.05", "--out", "b.csv"])
        assert code == 0
        lines = (tmp_path / "b.csv").read_text().strip().splitlines()
        assert lines[0] == "k,x_re,x_im,w_re,w_im,y_re,y_im"
        assert len(lines) == 65

    def test_full_model_requires_tensor(self, tmp_path, config_path):
        code = run(["--config", config_path, "--out-dir", str(tmp_path),
                    "--quiet", "simulate", "--model", "full"])
        assert code == 2

    def test_full_model_from_tensor_file(self, tmp_path, config_path):
        out = tmp_path / "sim"
        assert run(["--config", config_path, "--out-dir", str(out), "--quiet",
                    "coeffs"]) == 0
        code = run(["--config", config_path, "--out-dir", str(out),
                    "--seed", "3", "--quiet", "simulate", "--n", "32",
                    "--model", "full",
                    "--coeffs-x", str(out / "tensor_x.json"),
                    "--out", "full.csv"])
        assert code == 0


class TestVerifyCommand:
    def test_dettrace_suite(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--quiet", "verify",
                    "--suite", "dettrace", "--out", "v.json"])
        assert code == 0
        reports = json.loads((tmp_path / "v.json").read_text())
        assert all(r["verdict"] == "pass" for r in reports)

    def test_moments_suite(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--seed", "5", "--quiet",
                    "verify", "--suite", "moments", "--samples", "1000000",
                    "--out", "m.json"])
        assert code == 0
        reports = json.loads((tmp_path / "m.json").read_text())
        assert reports[0]["estimate"] == pytest.approx(1.0, abs=0.01)

    def test_conv4_suite_small(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--seed", "5", "--quiet",
                    "verify", "--suite", "conv4", "--samples", "200000",
                    "--out", "c4.json"])
        assert code == 0

    def test_failing_check_exits_one(self, tmp_path, monkeypatch):
        import xpmcap.cli as climod
        from xpmcap.verify import CheckReport

        def fake_suite(suite, n, seed):
            return [CheckReport(name="forced", n_samples=1, estimate=2.0,
                                bound=1.0, stderr=0.0, verdict="fail",
                                seed=seed, kind="one-sided")]

        monkeypatch.setattr(climod, "run_suite", fake_suite)
        code = run(["--out-dir", str(tmp_path), "--quiet", "verify",
                    "--suite", "moments", "--out", "f.json"])
        assert code == 1

    def test_sample_budget_is_usage_error(self, tmp_path):
        code = run(["--out-dir", str(tmp_path), "--quiet", "verify",
                    "--suite", "moments", "--samples", "10",
                    "--out", "v.json"])
        assert code == 2


class TestEntryPoint:
    def test_console_script_version(self):
        proc = subprocess.run([sys.executable, "-m", "xpmcap.cli",
                               "--version"], capture_output=True, text=True)
        assert proc.returncode == 0

    def test_env_var_supplies_config(self, tmp_path, config_path, monkeypatch):
        monkeypatch.setenv("XPMCAP_CONFIG", config_path)
        code = run(["--out-dir", str(tmp_path), "--quiet", "sweep",
                    "--powers-dbm", "0", "--g-real", "0", "--g-abs-sq", "0",
                    "--out", "env.csv"])
        assert code == 0
        manifest = json.loads((tmp_path / "sweep-manifest.json").read_text())
        assert manifest["config_path"] == config_path
