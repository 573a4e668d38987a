import json
import math

import pytest

from quantum_bos import cli
from quantum_bos.cli import MARKER, GameSpec, main, parse_spec_text
from quantum_bos.core import PayoffPair

STATE_11 = {"moduli2": [0.3125, 0.3125, 0.0625, 0.3125]}
BELL = {"amplitudes": [[1 / math.sqrt(2), 0], [0, 0], [0, 0], [1 / math.sqrt(2), 0]]}
PRODUCT = {"amplitudes": [[1, 0], [0, 0], [0, 0], [0, 0]]}
BASE = {"alpha": 2, "beta": 1, "gamma": 0}


@pytest.fixture
def write_spec(tmp_path):
    def _write(state, payoffs=BASE, profile=None, name="spec.json"):
        doc = {"payoffs": payoffs, "state": state}
        if profile is not None:
            doc["profile"] = {"p": profile[0], "q": profile[1]}
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return _write


def machine_part(text):
    return json.loads(text.split(MARKER, 1)[1])


class TestAnalyze:
    def test_asymmetric_state(self, write_spec, capsys):
        assert main(["analyze", write_spec(STATE_11)]) == 0
        doc = machine_part(capsys.readouterr().out)
        eqs = [(e["kind"], e["p"], e["q"]) for e in doc["equilibria"]]
        assert eqs == [("corner", 0, 0), ("corner", 1, 1),
                       ("interior-point", 0.333333333333, 0.333333333333)]
        assert doc["verdict"]["resolved"] is True
        assert doc["verdict"]["unique_solution"] == "11"
        assert doc["corner_payoffs"]["10"] == [0.6875, 0.4375]
        assert doc["coefficients"]["omega"] == 0.75

    def test_classical_limit(self, write_spec, capsys):
        assert main(["analyze", write_spec(PRODUCT)]) == 0
        out = capsys.readouterr().out
        assert "regime: classical limit" in out
        doc = machine_part(out)
        corners = [e for e in doc["equilibria"] if e["kind"] == "corner"]
        assert len(corners) == 2
        assert doc["verdict"]["resolved"] is False

    def test_moduli_not_summing_to_one(self, write_spec, capsys):
        assert main(["analyze", write_spec({"moduli2": [0.3, 0.3, 0.2, 0.1]})]) == cli.EXIT_INPUT
        assert "state" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "doc, field",
        [
            ({"payoffs": {"alpha": 2, "beta": 1}, "state": STATE_11}, "payoffs"),
            ({"payoffs": {"alpha": 1, "beta": 2, "gamma": 3}, "state": STATE_11}, "payoffs"),
            ({"payoffs": BASE, "state": {"moduli2": [1, 0, 0]}}, "state"),
            ({"payoffs": BASE, "state": {**STATE_11, **PRODUCT}}, "state"),
            ({"payoffs": BASE, "state": {"amplitudes": [[2, 0], [0, 0], [0, 0], [0, 0]]}}, "state"),
            ({"payoffs": BASE, "state": {"amplitudes": [[1, 0], [0, 0], [0, 0], "x"]}}, "state"),
            ({"payoffs": BASE, "state": STATE_11, "profile": {"p": 2, "q": 0}}, "profile"),
            ({"payoffs": {"alpha": "a", "beta": 1, "gamma": 0}, "state": STATE_11}, "payoffs"),
        ],
    )
    def test_malformed_spec_names_field(self, tmp_path, capsys, doc, field):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert main(["analyze", str(path)]) == cli.EXIT_INPUT
        assert f"error: {field}" in capsys.readouterr().err

    def test_missing_file_and_bad_json(self, tmp_path, capsys):
        assert main(["analyze", str(tmp_path / "missing.json")]) == cli.EXIT_INPUT
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["analyze", str(bad)]) == cli.EXIT_INPUT

    def test_report_round_trip(self, write_spec, capsys, tmp_path):
        path = write_spec(BELL, profile=(0.25, 0.5))
        original = parse_spec_text(open(path).read())
        assert main(["analyze", path]) == 0
        report = capsys.readouterr().out
        assert parse_spec_text(report) == original
        report_path = tmp_path / "report.txt"
        report_path.write_text(report)
        assert main(["analyze", str(report_path)]) == 0
        assert capsys.readouterr().out == report

    def test_spec_dict_round_trip(self):
        doc = {"payoffs": {"alpha": 3.5, "beta": 1.25, "gamma": -2.0},
               "state": {"amplitudes": [[0.5, 0.5], [0.0, -0.5], [0.5, 0.0], [0.0, 0.0]]},
               "profile": {"p": 0.1, "q": 0.9}}
        spec = GameSpec.from_dict(doc)
        assert spec.to_dict() == doc
        assert GameSpec.from_dict(spec.to_dict()) == spec

    def test_reruns_are_byte_identical(self, write_spec, capsys):
        path = write_spec(STATE_11)
        main(["analyze", path])
        first = capsys.readouterr().out
        main(["analyze", path])
        assert capsys.readouterr().out == first


class TestPayoff:
    @pytest.mark.parametrize(
        "state, profile, expected",
        [
            (STATE_11, (1, 1), "0.9375 0.9375"),
            (STATE_11, (0, 1), "0.4375 0.6875"),
            (BELL, (1, 0), "0 0"),
        ],
    )
    def test_examples(self, write_spec, capsys, state, profile, expected):
        assert main(["payoff", write_spec(state, profile=profile)]) == 0
        assert capsys.readouterr().out == expected + "\n"

    def test_missing_profile(self, write_spec, capsys):
        assert main(["payoff", write_spec(STATE_11)]) == cli.EXIT_INPUT
        assert "profile" in capsys.readouterr().err

    def test_relaxed_payoffs_allowed(self, write_spec, capsys):
        path = write_spec(PRODUCT, payoffs={"alpha": 1, "beta": 2, "gamma": 3}, profile=(1, 1))
        assert main(["payoff", path]) == 0
        assert capsys.readouterr().out == "1 2\n"

    def test_cross_check_failure(self, write_spec, capsys, monkeypatch):
        monkeypatch.setattr(cli, "payoffs_closed_form", lambda *args: PayoffPair(0.0, 0.0))
        assert main(["payoff", write_spec(STATE_11, profile=(1, 1))]) == cli.EXIT_INTERNAL
        assert "internal consistency" in capsys.readouterr().err


class TestScan:
    def test_resolution_16(self, tmp_path, capsys):
        out = tmp_path / "scan.csv"
        args = ["scan", "--alpha", "2", "--beta", "1", "--gamma", "0", "--resolution", "16", "--out", str(out)]
        assert main(args) == 0
        summary = capsys.readouterr().out
        counts = dict(item.split("=") for item in summary.split())
        assert int(counts["total"]) == 969
        assert int(counts["resolved"]) >= 2
        rows = out.read_text().split("\n")
        assert len(rows) == 969 + 2 and rows[-1] == ""
        first = out.read_bytes()
        assert main(args) == 0
        assert out.read_bytes() == first

    def test_resolution_1(self, tmp_path):
        out = tmp_path / "scan.csv"
        assert main(["scan", "--alpha", "2", "--beta", "1", "--gamma", "0",
                     "--resolution", "1", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 1 + 4

    def test_resolution_0_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["scan", "--alpha", "2", "--beta", "1", "--gamma", "0",
                  "--resolution", "0", "--out", str(tmp_path / "x.csv")])
        assert exc.value.code == cli.EXIT_INPUT

    def test_unwritable_path(self, tmp_path, capsys):
        out = tmp_path / "no" / "such" / "dir" / "scan.csv"
        assert main(["scan", "--alpha", "2", "--beta", "1", "--gamma", "0",
                     "--resolution", "2", "--out", str(out)]) == cli.EXIT_INPUT
        assert "out" in capsys.readouterr().err

    def test_non_canonical(self, tmp_path):
        assert main(["scan", "--alpha", "1", "--beta", "2", "--gamma", "0",
                     "--resolution", "2", "--out", str(tmp_path / "x.csv")]) == cli.EXIT_INPUT


class TestReproduce:
    def test_default(self, capsys):
        assert main(["reproduce"]) == 0
        out = capsys.readouterr().out
        doc = machine_part(out)
        assert doc["passed"] and not doc["failures"]
        assert doc["primed"] == {"alpha'": 0.9375, "beta'": 0.6875, "gamma'": 0.4375}
        assert "FAIL" not in out

    def test_other_payoffs(self, capsys):
        assert main(["reproduce", "--alpha", "3", "--beta", "2", "--gamma", "1"]) == 0
        assert machine_part(capsys.readouterr().out)["primed"]["alpha'"] == 1.9375

    def test_non_canonical(self, capsys):
        assert main(["reproduce", "--alpha", "1", "--beta", "1", "--gamma", "0"]) == cli.EXIT_INPUT
        assert "payoffs" in capsys.readouterr().err

    def test_failure_exit_code(self, capsys, monkeypatch):
        from quantum_bos.explorer import Check, ReproductionReport

        def broken(payoffs):
            return ReproductionReport(payoffs, [Check("forced", 1, 2, False)], {})

        monkeypatch.setattr(cli, "reproduce", broken)
        assert main(["reproduce"]) == cli.EXIT_REPRODUCTION
        captured = capsys.readouterr()
        assert "FAIL  forced" in captured.out
        assert machine_part(captured.out)["failures"] == ["forced"]

    def test_module_entry_point(self):
        import subprocess
        import sys

        result = subprocess.run([sys.executable, "-m", "quantum_bos", "reproduce"],
                                capture_output=True, text=True)
        assert result.returncode == 0
        assert "checks passed" in result.stdout
