import json

import numpy as np
import pytest

from bcucb.cli import main
from bcucb.environments import build_lower_bound_instance, save_instance


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def parse_csv(path):
    rows = []
    with open(path) as fh:
        header = fh.readline()
        assert header.startswith("# config_hash=")
        cols = fh.readline().strip().split(",")
        assert cols == ["policy", "seed", "t", "cumulative_regret"]
        for line in fh:
            policy, seed, t, reg = line.strip().split(",")
            rows.append((policy, int(seed), int(t), float(reg)))
    return rows


class TestRun:
    def test_preset_run_shapes(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(["run", "--preset", "pmc-small", "--seeds", "2",
                   "--horizon", "100", "--out", str(out)])
        assert rc == 0
        rows = parse_csv(out / "regret.csv")
        assert len(rows) == 2 * 2 * 100  # policies x seeds x rounds
        policies = {r[0] for r in rows}
        assert policies == {"bc-ucb", "cucb"}
        manifest = json.loads(read(out / "manifest.json"))
        assert manifest["schema"] == "bcucb-manifest/1"
        assert set(manifest["bounds"]) == {"thm1", "cor1"}
        assert manifest["smoothness"]["gamma_inf"] == 1.0
        assert manifest["config_hash"]
        summary = json.loads(read(out / "summary.json"))
        assert summary["config_hash"] == manifest["config_hash"]
        assert set(summary["policies"]) == {"bc-ucb", "cucb"}

    def test_rerun_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        argv = ["run", "--preset", "pmc-small", "--seeds", "2",
                "--horizon", "50"]
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        assert read(out1 / "regret.csv") == read(out2 / "regret.csv")
        assert read(out1 / "manifest.json") == read(out2 / "manifest.json")
        assert read(out1 / "summary.json") == read(out2 / "summary.json")

    def test_lower_bound_manifest_gaps(self, tmp_path):
        out = tmp_path / "out"
        rc = main(["run", "--preset", "lower-bound", "--seeds", "1",
                   "--horizon", "20", "--out", str(out)])
        assert rc == 0
        manifest = json.loads(read(out / "manifest.json"))
        table = manifest["gap_table"]
        m_bar_eps = 1.0 * 0.1
        assert table["delta_max"] == pytest.approx(m_bar_eps, rel=1e-12)
        defined = [row for row in table["per_arm"]
                   if row["delta_min"] is not None]
        assert len(defined) == 4  # the shared arm plus three suboptimal arms
        for row in defined:
            assert row["delta_min"] == pytest.approx(m_bar_eps, rel=1e-12)
            assert row["delta_max"] == pytest.approx(m_bar_eps, rel=1e-12)

    def test_config_file_with_instance_file(self, tmp_path):
        inst_path = tmp_path / "inst.json"
        save_instance(build_lower_bound_instance(5, 2, 0.1), inst_path)
        config = {"instance": {"file": str(inst_path)},
                  "policies": ["bc-ucb"], "oracle": "exact",
                  "horizon": 30, "seeds": [5, 7]}
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(config))
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg_path),
                     "--out", str(out)]) == 0
        rows = parse_csv(out / "regret.csv")
        assert {r[1] for r in rows} == {5, 7}

    def test_uniform_policy_runs(self, tmp_path):
        out = tmp_path / "out"
        rc = main(["run", "--preset", "pmc-small", "--seeds", "1",
                   "--horizon", "50", "--policies", "uniform",
                   "--oracle", "exact", "--out", str(out)])
        assert rc == 0
        assert {r[0] for r in parse_csv(out / "regret.csv")} == {"uniform"}

    def test_worker_pool_output_identical(self, tmp_path, monkeypatch):
        argv = ["run", "--preset", "pmc-small", "--seeds", "2",
                "--horizon", "60"]
        serial, pooled = tmp_path / "serial", tmp_path / "pooled"
        assert main(argv + ["--out", str(serial)]) == 0
        monkeypatch.setenv("BCUCB_WORKERS", "2")
        assert main(argv + ["--out", str(pooled)]) == 0
        assert read(serial / "regret.csv") == read(pooled / "regret.csv")


class TestExitCodes:
    def test_unknown_preset(self, tmp_path, capsys):
        rc = main(["run", "--preset", "nope", "--out", str(tmp_path)])
        assert rc == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_missing_source(self, tmp_path):
        assert main(["run", "--out", str(tmp_path)]) == 2

    def test_bad_json_config(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        assert main(["run", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2

    def test_bad_policy_name(self, tmp_path):
        rc = main(["run", "--preset", "pmc-small", "--policies", "thompson",
                   "--out", str(tmp_path)])
        assert rc == 2

    def test_capacity_breach_exits_3(self, tmp_path):
        # a budget instance too large to enumerate for the gap table
        doc = {
            "instance": {
                "schema": "bcucb-instance/1", "family": "pmc",
                "L": 40, "K": 8, "M": 1, "weights": [1.0],
                "params": [[0.5] * 40],
                "action_set": {"type": "budget"},
                "correlation": "independent",
            },
            "policies": ["bc-ucb"], "oracle": "greedy",
            "horizon": 10, "seeds": [1],
        }
        cfg = tmp_path / "big.json"
        cfg.write_text(json.dumps(doc))
        rc = main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 3


class TestCertify:
    def test_pmc(self, capsys):
        assert main(["certify", "--family", "pmc", "--k", "4"]) == 0
        out = capsys.readouterr().out
        assert "closed form 0.606531" in out
        assert "certified" in out

    def test_linear(self, capsys):
        assert main(["certify", "--family", "linear", "--k", "4"]) == 0
        out = capsys.readouterr().out
        assert "estimate 1.000000" in out
        assert "closed form 1.000000" in out

    def test_logistic(self, capsys):
        assert main(["certify", "--family", "logistic", "--k", "2",
                     "--c", "1.0"]) == 0
        out = capsys.readouterr().out
        assert "closed form 0.250000" in out


class TestBound:
    def test_thm1(self, capsys):
        rc = main(["bound", "--preset", "pmc-small", "--mode", "thm1",
                   "--horizon", "10000"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "thm1 bound at T=10000" in out
        value = float(out.strip().split()[-1])
        assert value > 0

    def test_cor1_smaller_than_thm1_here(self, capsys):
        assert main(["bound", "--preset", "pmc-small", "--mode", "cor1",
                     "--horizon", "10000"]) == 0
        assert "cor1 bound" in capsys.readouterr().out
