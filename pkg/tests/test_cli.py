"""The command line entry point: verbs, exit codes, outputs."""

import json

import pytest

from ucfw.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, main

L3_SET = json.dumps({"family": "lp", "p": 3.0, "radius": 1.0, "dim": 4})


class TestVerifyVerb:
    def test_catalog_check_passes(self, capsys):
        code = main(
            ["verify", "--set", L3_SET, "--check", "definition1",
             "--pairs", "200", "--directions", "20"]
        )
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["pass"] is True

    def test_inflated_alpha_fails(self, capsys):
        code = main(
            ["verify", "--set", L3_SET, "--check", "definition1",
             "--alpha", "2.0", "--q", "3.0", "--pairs", "200", "--directions", "20"]
        )
        assert code == EXIT_VIOLATION
        payload = json.loads(capsys.readouterr().out)
        assert payload["pass"] is False

    def test_bad_json_is_config_error(self):
        assert main(["verify", "--set", "{not json", "--check", "definition1"]) == EXIT_ERROR

    def test_unknown_family_is_config_error(self):
        bad = json.dumps({"family": "simplex", "dim": 3})
        assert main(["verify", "--set", bad, "--check", "definition1"]) == EXIT_ERROR

    def test_alpha_without_q_is_config_error(self):
        assert (
            main(["verify", "--set", L3_SET, "--check", "definition1", "--alpha", "1.0"])
            == EXIT_ERROR
        )


class TestSolveVerb:
    CONFIG = {
        "set": {"family": "lp", "p": 3.0, "radius": 1.0, "dim": 4},
        "objective": {
            "family": "quadratic", "dim": 4, "cond": 10.0,
            "x0_direction": "ones", "x0_scale": 3.0,
        },
        "rule": "short",
        "T": 200,
    }

    def test_writes_trace_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["solve", "--config", json.dumps(self.CONFIG), "--out", str(out)])
        assert code == EXIT_OK
        assert (out / "trace.csv").exists()
        assert (out / "trace.json").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["files"] == ["trace.csv", "trace.json"]
        printed = json.loads(capsys.readouterr().out)
        assert printed["final_min_fw_gap"] >= 0.0

    def test_unknown_rule_is_config_error(self, tmp_path):
        config = dict(self.CONFIG, rule="momentum")
        code = main(["solve", "--config", json.dumps(config), "--out", str(tmp_path / "x")])
        assert code == EXIT_ERROR

    def test_config_file_path_accepted(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(self.CONFIG))
        code = main(["solve", "--config", str(cfg_path), "--out", str(tmp_path / "run")])
        assert code == EXIT_OK


class TestSuiteVerb:
    def test_bounds_grid_passes(self, tmp_path, capsys):
        out = tmp_path / "grid"
        code = main(["suite", "bounds_grid", "--out", str(out)])
        assert code == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["pass"] is True
        assert (out / "manifest.json").exists()


class TestOnlineVerb:
    CONFIG = {
        "set": {"family": "lp", "p": 2.0, "radius": 1.0, "dim": 4},
        "stream": {"tag": "adversarial", "base": [1.0, 0.0, 0.0, 0.0],
                   "flip_scale": 0.5, "seed": 0},
        "T": 500,
    }

    def test_regret_within_bound(self, tmp_path, capsys):
        out = tmp_path / "online"
        code = main(["online", "--config", json.dumps(self.CONFIG), "--out", str(out)])
        assert code == EXIT_OK
        manifest = json.loads(capsys.readouterr().out)
        assert manifest["regret_ok"] is True
        assert (out / "online.csv").exists()


class TestEnvSeed:
    def test_overrides_verify_seed(self, capsys, monkeypatch):
        def run(env_seed):
            if env_seed is None:
                monkeypatch.delenv("UCFW_SEED", raising=False)
            else:
                monkeypatch.setenv("UCFW_SEED", str(env_seed))
            code = main(
                ["verify", "--set", L3_SET, "--check", "definition1",
                 "--pairs", "50", "--directions", "10", "--seed", "0"]
            )
            assert code == EXIT_OK
            return json.loads(capsys.readouterr().out)

        base = run(None)
        same = run(0)
        other = run(12345)
        assert same["config"]["seed"] == 0
        assert other["config"]["seed"] == 12345
        assert base["config"]["seed"] == 0

    def test_non_integer_seed_is_error(self, monkeypatch):
        monkeypatch.setenv("UCFW_SEED", "abc")
        code = main(["verify", "--set", L3_SET, "--check", "definition1"])
        assert code == EXIT_ERROR
