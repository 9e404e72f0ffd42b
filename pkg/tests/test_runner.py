import json

import pytest

from nlheat.cli import main
from nlheat.runner import ConfigInvalid, profile_from_csv, run, run_batch


def small_grid_cfg():
    return {"rmax": 200.0, "core_nodes": 121, "tail_nodes": 500}


class TestConstantsTable:
    def test_ten_rows_with_passing_checks(self, tmp_path):
        manifest = run(
            {"experiment": "constants-table", "table": {"min": 11, "max": 20}},
            tmp_path,
        )
        assert manifest.all_passed
        lines = (tmp_path / "constants.csv").read_text().strip().splitlines()
        assert lines[0] == "N,p,pF,pS,pc,m,L,lambda1,lambda2"
        assert len(lines) == 11  # header + 10 rows

    def test_infinite_exponents_serialized(self, tmp_path):
        run({"experiment": "constants-table", "table": {"min": 9, "max": 10}}, tmp_path)
        body = (tmp_path / "constants.csv").read_text()
        assert "inf" in body


class TestConfigValidation:
    def test_unknown_experiment(self, tmp_path):
        with pytest.raises(ConfigInvalid) as err:
            run({"experiment": "warp"}, tmp_path)
        assert "experiment" in str(err.value)

    def test_invalid_exponent_names_field(self, tmp_path):
        with pytest.raises(ConfigInvalid) as err:
            run({"experiment": "steady", "dim": 13, "exponent": 0.5}, tmp_path)
        assert err.value.field == "exponent"

    def test_missing_dim(self, tmp_path):
        with pytest.raises(ConfigInvalid) as err:
            run({"experiment": "steady", "exponent": 3.0}, tmp_path)
        assert err.value.field == "dim"


class TestSteadyExperiment:
    def test_outputs_and_determinism(self, tmp_path):
        config = {
            "experiment": "steady",
            "dim": 13,
            "exponent": 3.0,
            "grid": small_grid_cfg(),
        }
        first = run(config, tmp_path / "a")
        second = run(config, tmp_path / "b")
        assert first.all_passed
        assert first.outputs == second.outputs  # byte-identical by hash
        r, v = profile_from_csv(tmp_path / "a" / "profile.csv")
        assert r[0] == 0.0 and v[0] == 1.0
        fit = json.loads((tmp_path / "a" / "fit.json").read_text())
        assert fit["coefficient"] < 0

    def test_manifest_round_trip(self, tmp_path):
        config = {
            "experiment": "steady",
            "dim": 13,
            "exponent": 3.0,
            "grid": small_grid_cfg(),
        }
        manifest = run(config, tmp_path / "a")
        stored = json.loads((tmp_path / "a" / "manifest.json").read_text())
        replay = run(stored["config"], tmp_path / "replay")
        assert replay.outputs == manifest.outputs


class TestEvolveExperiments:
    def test_quasiconvergence_run(self, tmp_path):
        config = {
            "experiment": "liouville-diagnostics",
            "dim": 13,
            "exponent": 3.0,
            "alpha": 1.0,
            "beta": 2.0,
            "u0": {"preset": "blend", "alpha": 1.0, "beta": 2.0, "weight": 0.5},
            "grid": {"rmax": 1e4, "core_nodes": 201, "tail_nodes": 1500},
            "convergence_eps": 1e-6,
            "window": [20.0, 200.0],
        }
        manifest = run(config, tmp_path)
        assert manifest.all_passed, [c for c in manifest.checks if not c.passed]
        diag = (tmp_path / "diagnostics.csv").read_text().splitlines()
        header = diag[0].split(",")
        assert header == [
            "t",
            "residual",
            "gamma_est",
            "weighted_decay",
            "sweep_ratio",
            "sweep_ratio_plus",
            "sweep_ratio_minus",
            "ordering_ok",
        ]
        assert len(manifest.outputs) >= 2  # profiles + diagnostics
        assert manifest.notes  # finite-horizon caveat recorded

    def test_generic_evolve_run(self, tmp_path):
        config = {
            "experiment": "evolve",
            "dim": 13,
            "exponent": 3.0,
            "u0": {"preset": "steady", "alpha": 1.0},
            "grid": small_grid_cfg(),
            "t_max": 1.0,
        }
        manifest = run(config, tmp_path)
        assert manifest.all_passed


class TestOtherExperiments:
    def test_interp(self, tmp_path):
        manifest = run(
            {"experiment": "interp", "dim": 13, "radii": [1.0, 2.0, 4.0, 8.0]},
            tmp_path,
        )
        assert manifest.all_passed
        payload = json.loads((tmp_path / "interp.json").read_text())
        assert payload["constant"] >= 1.0

    def test_blowdown(self, tmp_path):
        config = {
            "experiment": "blowdown",
            "dim": 13,
            "exponent": 3.0,
            "scales": [2.0, 4.0, 8.0, 16.0],
        }
        manifest = run(config, tmp_path)
        assert manifest.all_passed
        lines = (tmp_path / "blowdown.csv").read_text().splitlines()
        assert lines[0] == "scale,r,value"

    def test_blowdown_from_profile_csv(self, tmp_path):
        steady_manifest = run(
            {"experiment": "steady", "dim": 13, "exponent": 3.0},
            tmp_path / "steady",
        )
        assert steady_manifest.all_passed
        config = {
            "experiment": "blowdown",
            "dim": 13,
            "exponent": 3.0,
            "scales": [2.0, 4.0, 8.0, 16.0],
            "input_csv": str(tmp_path / "steady" / "profile.csv"),
        }
        manifest = run(config, tmp_path / "bd")
        assert manifest.all_passed

    def test_batch_runs_each_in_its_own_directory(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NLHEAT_THREADS", "2")
        configs = [
            {"experiment": "constants-table", "table": {"min": 11, "max": 12}},
            {"experiment": "interp", "dim": 13, "radii": [1.0, 2.0]},
        ]
        manifests = run_batch(configs, tmp_path)
        assert len(manifests) == 2
        assert (tmp_path / "exp-00-constants-table" / "manifest.json").exists()
        assert (tmp_path / "exp-01-interp" / "manifest.json").exists()


class TestCli:
    def test_constants_record(self, capsys):
        assert main(["constants", "--dim", "13", "--exponent", "3"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["lambda1"] == pytest.approx(4.0)
        assert record["pc"] == pytest.approx(2.9306913, rel=1e-6)

    def test_constants_table(self, tmp_path, capsys):
        code = main(
            [
                "constants",
                "--table",
                "11..13",
                "--out-dir",
                str(tmp_path),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("N,p,pF,pS,pc,m,L,lambda1,lambda2")

    def test_steady_cli(self, tmp_path, capsys):
        code = main(
            [
                "steady",
                "--dim",
                "13",
                "--exponent",
                "3",
                "--rmax",
                "200",
                "--out",
                str(tmp_path / "profile.csv"),
            ]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["coefficient"] < 0
        assert (tmp_path / "profile.csv").exists()

    def test_linearize_cli(self, tmp_path, capsys):
        code = main(
            [
                "linearize",
                "--dim",
                "13",
                "--exponent",
                "3",
                "--which",
                "Zinf",
                "--rmax",
                "200",
                "--out",
                str(tmp_path / "kernel.csv"),
            ]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["sup_relative_residual"] < 1e-4

    def test_sphere_identity_cli(self, capsys):
        code = main(
            [
                "blowdown",
                "sphere-identity",
                "--preset",
                "cos",
                "--amplitude",
                "0.5",
                "--dim",
                "13",
                "--exponent",
                "3",
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] > 0

    def test_verify_filter_cli(self, capsys):
        assert main(["verify", "--filter", "sphere"]) == 0
        out = capsys.readouterr().out
        assert "[PASS] 10 blowdown: sphere identity" in out

    def test_evolve_cli(self, tmp_path, capsys):
        config = {
            "experiment": "evolve",
            "dim": 13,
            "exponent": 3.0,
            "u0": {"preset": "steady", "alpha": 1.0},
            "grid": small_grid_cfg(),
            "t_max": 1.0,
        }
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(config))
        code = main(
            ["evolve", "--config", str(cfg_path), "--out-dir", str(tmp_path / "out")]
        )
        assert code == 0
        assert (tmp_path / "out" / "manifest.json").exists()
