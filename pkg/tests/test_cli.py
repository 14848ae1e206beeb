import csv
import io
import json
import subprocess
import sys
import textwrap

import pytest

from hiddentime.cli import main, run
from hiddentime.config import DEFAULT_SEED
from hiddentime.report import Report


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return str(path)


class TestVerifySpinors:
    def test_default_all_pass(self):
        status, text, _ = run(["verify-spinors"])
        report = Report.from_json(text)
        assert status == 0
        assert report.summary["failed"] == 0
        assert report.seed == DEFAULT_SEED
        assert report.summary["total"] == len(report.entries) > 0

    def test_mass_mismatch_fails(self, tmp_path):
        cfg = write(
            tmp_path,
            """
            [verify]
            random_cases = 0
            [[verify.kinematics]]
            m = 1.0
            v = [0.0, 0.0, 0.6]
            operator_mass = 2.0
            """,
        )
        status, text, _ = run(["verify-spinors", "--config", cfg])
        report = Report.from_json(text)
        assert status == 1
        failed = [e for e in report.entries if not e.passed]
        assert failed and all(e.name.startswith("dirac_residual") for e in failed)
        assert failed[0].inputs["operator_mass"] == 2.0

    def test_json_round_trip(self):
        _, text, _ = run(["verify-spinors", "--seed", "7"])
        assert Report.from_json(text).to_json() == text

    def test_random_cases_echoed(self):
        _, text, _ = run(["verify-spinors", "--seed", "3"])
        inputs = {json.dumps(e.inputs, sort_keys=True) for e in Report.from_json(text).entries}
        assert len(inputs) == 105

    def test_malformed_config(self, tmp_path, capsys):
        cfg = write(tmp_path, "[verify]\nrandom_cases = 'many'\n")
        assert main(["verify-spinors", "--config", cfg]) == 2
        assert "verify.random_cases" in capsys.readouterr().err

    def test_bad_toml(self, tmp_path):
        assert main(["verify-spinors", "--config", write(tmp_path, "this is = = not toml")]) == 2

    def test_unknown_tolerance(self, tmp_path, capsys):
        assert main(["winding", "--config", write(tmp_path, "[tolerances]\nfoo = 1.0\n")]) == 2
        assert "tolerances.foo" in capsys.readouterr().err

    def test_tolerance_override(self, tmp_path):
        cfg = write(tmp_path, "[tolerances]\ndirac_residual = 1e-30\n[verify]\nrandom_cases = 3\n")
        status, text, _ = run(["verify-spinors", "--config", cfg])
        assert status == 1


class TestWinding:
    def test_admissible_list(self, tmp_path):
        cfg = write(tmp_path, '[winding]\ng = [0, "1/2", 1, "3/2"]\n')
        status, text, _ = run(["winding", "--config", cfg])
        report = Report.from_json(text)
        assert status == 0
        turns = [e.value for e in report.entries if e.name == "winding_agreement"]
        assert turns == [0.0, -1.0, -2.0, -3.0]

    def test_inadmissible_flagged(self, tmp_path):
        cfg = write(tmp_path, "[winding]\ng = [0.3]\n")
        status, text, _ = run(["winding", "--config", cfg])
        entries = {e.name: e for e in Report.from_json(text).entries}
        assert status == 1
        assert not entries["quantization"].passed
        # the two routes still agree that 0.3 is not quantized
        assert entries["winding_agreement"].passed

    def test_empty_list(self, tmp_path):
        status, text, _ = run(["winding", "--config", write(tmp_path, "[winding]\ng = []\n")])
        assert status == 0
        assert Report.from_json(text).entries == []


class TestBW:
    def test_order_one_matches_dirac(self):
        status, text, _ = run(["bw", "--order", "1"])
        report = Report.from_json(text)
        assert status == 0
        assert any(e.name == "consistency_n1" for e in report.entries)

    def test_order_two(self):
        status, text, _ = run(["bw", "--order", "2"])
        report = Report.from_json(text)
        assert status == 0
        assert all(e.value < 1e-10 for e in report.entries if e.name.startswith("bw_residual"))

    @pytest.mark.parametrize("order", ["0", "5"])
    def test_order_guard(self, order, capsys):
        assert main(["bw", "--order", order]) == 2
        assert "order" in capsys.readouterr().err


class TestSimulate:
    def test_default_two_slit_csv(self):
        status, text, _ = run(["simulate", "--format", "csv"])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert status == 0
        assert list(rows[0]) == ["bin", "analytic_p", "mc_freq", "bound", "pass"]
        assert [r["bin"] for r in rows] == ["-2", "-1", "0", "1", "2", "MISS"]
        assert all(r["pass"] == "true" for r in rows)
        assert "\r" not in text

    def test_repeat_seed_identical(self):
        a = run(["simulate", "--format", "csv", "--seed", "42"])[1]
        b = run(["simulate", "--format", "csv", "--seed", "42"])[1]
        assert a == b

    def test_zero_measure_slit(self, tmp_path, capsys):
        cfg = write(
            tmp_path,
            """
            [experiment]
            kind = "two_slit"
            bins = ["a"]
            [[experiment.slits]]
            label = "L"
            start = 1.0
            end = 1.0
            [[experiment.paths]]
            bin = "a"
            start = 0.0
            end = 2.0
            """,
        )
        assert main(["simulate", "--config", cfg]) == 2
        assert "experiment.slits" in capsys.readouterr().err

    def test_missing_field(self, tmp_path, capsys):
        cfg = write(tmp_path, '[experiment]\nkind = "two_slit"\nbins = ["a"]\n')
        assert main(["simulate", "--config", cfg]) == 2
        assert "experiment.slits" in capsys.readouterr().err

    def test_arcs_experiment(self, tmp_path):
        cfg = write(
            tmp_path,
            """
            [simulate]
            n = 100000
            [experiment]
            kind = "arcs"
            [[experiment.arcs]]
            label = "A"
            start = 0.0
            end = 3.141592653589793
            payload = 1.5
            """,
        )
        status, text, _ = run(["simulate", "--config", cfg, "--format", "csv"])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert status == 0
        assert [r["bin"] for r in rows] == ["A", "MISS"]
        assert float(rows[0]["analytic_p"]) == 0.5

    def test_out_file(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(["simulate", "--n", "1000", "--out", str(out)]) == 0
        assert Report.from_json(out.read_text()).command == "simulate"


def test_seed_range(capsys):
    with pytest.raises(SystemExit):
        main(["winding", "--seed", str(2**64)])


def test_module_entry_point(tmp_path):
    out = tmp_path / "w.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "hiddentime", "winding", "--format", "csv", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("name,value,tolerance,pass\n")


def test_report_summary_must_match_entries():
    report = Report("winding", 1, "0.1.0")
    report.add("x", {}, 0.0, 1.0, True)
    data = report.to_dict()
    data["summary"]["passed"] = 0
    with pytest.raises(ValueError):
        Report.from_dict(data)
