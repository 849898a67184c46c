import json
from pathlib import Path

from click.testing import CliRunner

from tempofleet.cli import main

MICRO1 = "scenarios/micro1.json"
MICRO2 = "scenarios/micro2.json"


def run(*args):
    return CliRunner().invoke(main, list(args))


def fast_scenario(tmp_path):
    """micro1 plus control overrides quick enough for CLI-level tests."""
    d = json.loads(Path(MICRO1).read_text())
    d["control"] = {"k1": 0.5, "kphi": 2.0, "kv": 2.0, "timeout": 60.0}
    p = tmp_path / "fast1.json"
    p.write_text(json.dumps(d))
    return str(p)


class TestTranslate:
    def test_counts_and_export(self, tmp_path):
        out = tmp_path / "nba.txt"
        r = run("translate", "--formula", 'F "1-π2"',
                "--scenario", MICRO1, "--out", str(out))
        assert r.exit_code == 0, r.output
        assert "states:" in r.output and "accepting:" in r.output
        assert out.read_text().startswith("states:")

    def test_conjoined_formulas(self):
        r = run("translate", "--formula", 'F "1-π2"',
                "--formula", 'G F "1-π1"', "--scenario", MICRO1)
        assert r.exit_code == 0, r.output

    def test_parse_error_exit_code(self):
        r = run("translate", "--formula", 'F (("a"')
        assert r.exit_code == 2
        assert "error:" in r.output

    def test_unknown_atom_rejected(self):
        r = run("translate", "--formula", 'F "ghost"', "--scenario", MICRO1)
        assert r.exit_code == 2


class TestBuildTs:
    def test_counts(self, tmp_path):
        out = tmp_path / "ts.txt"
        r = run("build-ts", "--scenario", MICRO1, "--out", str(out))
        assert r.exit_code == 0, r.output
        assert "states: 2" in r.output
        assert "transitions:" in out.read_text()

    def test_budget_exit_code(self):
        r = run("build-ts", "--scenario", MICRO2, "--n-max", "1")
        assert r.exit_code == 4

    def test_bad_scenario_exit_code(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{\"workspace\": {}}")
        r = run("build-ts", "--scenario", str(p))
        assert r.exit_code == 2


class TestPlan:
    def test_exact_and_sampling_agree(self, tmp_path):
        costs = []
        for mode in ("exact", "sampling"):
            out = tmp_path / f"{mode}.txt"
            r = run("plan", "--scenario", MICRO1, "--formula", 'F "1-π2"',
                    "--mode", mode, "--out", str(out))
            assert r.exit_code == 0, r.output
            costs.append(out.read_text().splitlines()[0])
        assert costs[0] == costs[1]
        assert costs[0].startswith("total cost:")

    def test_infeasible_exit_code(self):
        r = run("plan", "--scenario", MICRO1,
                "--formula", '"1-π1" & "1-π2"')
        assert r.exit_code == 3

    def test_sampling_budget_exit_code(self):
        r = run("plan", "--scenario", MICRO1, "--mode", "sampling",
                "--formula", '"1-π1" & "1-π2"')
        assert r.exit_code == 4

    def test_sampling_deterministic_output(self, tmp_path):
        outs = []
        for n in range(2):
            out = tmp_path / f"p{n}.txt"
            r = run("plan", "--scenario", MICRO2, "--formula", 'F "O1-π2"',
                    "--mode", "sampling", "--seed", "7", "--out", str(out))
            assert r.exit_code == 0, r.output
            outs.append(out.read_text())
        assert outs[0] == outs[1]


class TestSimulateAndVerify:
    def test_full_pipeline(self, tmp_path):
        sc = fast_scenario(tmp_path)
        outdir = tmp_path / "run"
        r = run("simulate", "--scenario", sc, "--formula", 'F "1-π2"',
                "--out", str(outdir), "--plot")
        assert r.exit_code == 0, r.output
        report = json.loads((outdir / "report.json").read_text())
        assert report["success"] is True
        assert (outdir / "plan.txt").exists()
        assert (outdir / "trajectories.svg").exists()
        assert list(outdir.glob("trail_*.csv"))

        v = run("verify", "--scenario", sc, "--formula", 'F "1-π2"',
                "--report", str(outdir / "report.json"))
        assert v.exit_code == 0, v.output
        assert "satisfies" in v.output

        v2 = run("verify", "--scenario", sc, "--formula", 'G "1-π1"',
                 "--report", str(outdir / "report.json"))
        assert v2.exit_code == 5

    def test_simulation_failure_exit_code(self, tmp_path):
        # inject failure with a time budget far too small for any motion
        d = json.loads(Path(MICRO1).read_text())
        d["control"] = {"k1": 0.5, "timeout": 0.05}
        p = tmp_path / "strangled.json"
        p.write_text(json.dumps(d))
        outdir = tmp_path / "run"
        r = run("simulate", "--scenario", str(p), "--formula", 'F "1-π2"',
                "--out", str(outdir))
        assert r.exit_code == 5
        assert "timeout" in r.output
        report = json.loads((outdir / "report.json").read_text())
        assert report["success"] is False
