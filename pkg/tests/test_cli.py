import json
import os

import numpy as np
import pytest

from groundlab.cli import main

EXAMPLE_CNF = "c worked example\np cnf 4 3\n1 -3 4 0\n-2 3 -4 0\n-1 2 3 0\n"
TWO_PATH = '{"n": 2, "edges": [{"i": 0, "j": 1, "w": 1.0}]}'
FIVE_NODE = json.dumps({
    "n": 5,
    "edges": [{"i": 0, "j": 1}, {"i": 0, "j": 3}, {"i": 1, "j": 2},
              {"i": 2, "j": 3}, {"i": 2, "j": 4}, {"i": 3, "j": 4}],
})


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


class TestEmbed:
    def test_dimacs_ground_energy(self, workdir):
        (workdir / "f.cnf").write_text(EXAMPLE_CNF)
        code = main(["embed", "--dimacs", "f.cnf", "--out", "h.json"])
        assert code == 0
        payload = json.loads((workdir / "h.json").read_text())
        assert payload["summary"]["ground_energy"] == pytest.approx(0.0, abs=1e-12)
        assert (workdir / "h.json.manifest.json").exists()

    def test_formula_input(self, workdir):
        (workdir / "and.json").write_text(json.dumps({"and": [{"var": 0}, {"var": 1}]}))
        code = main(["embed", "--formula", "and.json", "--out", "op.json"])
        assert code == 0
        payload = json.loads((workdir / "op.json").read_text())
        words = {t["word"]: t["c"] for t in payload["operator"]["terms"]}
        # P1 ⊗ P1 expansion
        assert words["II"] == pytest.approx(0.25)
        assert words["ZZ"] == pytest.approx(0.25)

    def test_missing_file_exit_2(self, workdir, capsys):
        assert main(["embed", "--dimacs", "nope.cnf"]) == 2
        assert "nope.cnf" in capsys.readouterr().err

    def test_parse_error_exit_2(self, workdir, capsys):
        (workdir / "bad.cnf").write_text("p cnf 2 1\n5 0\n")
        assert main(["embed", "--dimacs", "bad.cnf"]) == 2
        assert "VariableOutOfRange" in capsys.readouterr().err


class TestGadget:
    def test_subdivision_row(self, workdir, capsys):
        code = main(["gadget", "--builder", "subdivision", "--alpha", "1",
                     "--eps", "0.05", "--out", "g.csv"])
        assert code == 0
        out = capsys.readouterr().out
        assert "43.05" in out
        lines = (workdir / "g.csv").read_text().splitlines()
        assert lines[0].startswith("# manifest:")
        assert lines[1].split(",")[0] == "alpha"

    def test_zero_alpha_exit_2(self, workdir, capsys):
        assert main(["gadget", "--builder", "subdivision", "--alpha", "0"]) == 2
        assert "ZeroCoupling" in capsys.readouterr().err

    def test_search_min_delta(self, workdir, capsys):
        code = main(["gadget", "--builder", "subdivision", "--alpha", "1",
                     "--eps", "0.1", "--search-min-delta", "--out", "gm.csv"])
        assert code == 0
        row = (workdir / "gm.csv").read_text().splitlines()[2].split(",")
        assert float(row[2]) < 23.1  # below the analytic assignment


class TestVariationalCommands:
    def test_grover_table_row(self, workdir, capsys):
        code = main(["variational", "grover", "--n", "3", "--p", "2",
                     "--mode", "matched", "--restarts", "8", "--seed", "1",
                     "--out", "t.csv"])
        assert code == 0
        row = (workdir / "t.csv").read_text().splitlines()[2].split(",")
        assert int(row[0]) == 8
        assert float(row[4]) == pytest.approx(5.785, abs=0.3)

    def test_clock_report(self, workdir):
        (workdir / "c.json").write_text(
            json.dumps({"n": 1, "gates": [{"kind": "fixed", "qubits": [0], "params": ["H"]}]}))
        code = main(["variational", "clock", "--circuit", "c.json", "--M", "2",
                     "--out", "clock.json"])
        assert code == 0
        report = json.loads((workdir / "clock.json").read_text())["report"]
        assert report["overlap"] == pytest.approx(0.5, abs=1e-9)
        assert report["L"] == 1

    def test_deficit_csv(self, workdir):
        code = main(["variational", "deficit", "--n", "4", "--alpha-grid", "1:2:1",
                     "--p", "1", "--instances", "2", "--restarts", "2",
                     "--seed", "0", "--out", "d.csv"])
        assert code == 0
        lines = (workdir / "d.csv").read_text().splitlines()
        assert lines[1] == "alpha,p,mean_f,stderr,seeds"
        assert len(lines) == 4


class TestWalkAndSweep:
    def test_stationary(self, workdir, capsys):
        (workdir / "g.json").write_text(FIVE_NODE)
        assert main(["walk", "--graph", "g.json", "--stationary", "--out", "pi.dat"]) == 0
        out = capsys.readouterr().out.split()
        assert [float(v) for v in out] == pytest.approx([1/6, 1/6, 1/4, 1/4, 1/6])

    def test_quantum_cosine(self, workdir):
        (workdir / "p.json").write_text(TWO_PATH)
        assert main(["walk", "--graph", "p.json", "--quantum",
                     "--times", "0:1:0.25", "--out", "q.dat"]) == 0
        lines = (workdir / "q.dat").read_text().splitlines()
        t, p0, _p1 = (float(v) for v in lines[3].split(","))
        assert p0 == pytest.approx((1 + np.cos(2 * t)) / 2, abs=1e-10)

    def test_missing_mode_exit_2(self, workdir):
        (workdir / "p.json").write_text(TWO_PATH)
        assert main(["walk", "--graph", "p.json"]) == 2

    def test_sweep_deterministic_bytes(self, workdir):
        args = ["sweep", "--n", "8", "--alpha", "2:4:1", "--beta", "2",
                "--instances", "4", "--seed", "3", "--threads", "1", "--out", "s.csv"]
        assert main(args) == 0
        first = (workdir / "s.csv").read_bytes()
        assert main(args) == 0
        assert (workdir / "s.csv").read_bytes() == first

    def test_sweep_resource_limit_exit_3(self, workdir, capsys):
        assert main(["sweep", "--n", "26", "--alpha", "2:3:1", "--instances", "1",
                     "--out", "s.csv"]) == 3


class TestUsage:
    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0

    def test_subcommand_help_exits_zero(self):
        for cmd in (["embed", "--help"], ["gadget", "--help"], ["sweep", "--help"],
                    ["walk", "--help"], ["variational", "--help"],
                    ["variational", "grover", "--help"]):
            with pytest.raises(SystemExit) as exc:
                main(cmd)
            assert exc.value.code == 0

    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["gadget", "--bogus"])
        assert exc.value.code == 2

    def test_manifest_written_next_to_outputs(self, workdir):
        (workdir / "p.json").write_text(TWO_PATH)
        main(["walk", "--graph", "p.json", "--stationary", "--out", "pi.dat"])
        manifest = json.loads((workdir / "pi.dat.manifest.json").read_text())
        assert manifest["subcommand"] == "walk"
        assert manifest["outputs"] == ["pi.dat"]
        assert "version" in manifest
