import io
import json
import os
from pathlib import Path
import subprocess
import sys

import pytest

from hkit.cli import run_command
from hkit.core import Exponent
from hkit.document import format_document, parse_input, rational_str
from hkit.errors import SchemaError

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def sample(name):
    return str(SAMPLES / name)


class TestParse:
    def test_series_document(self):
        doc = parse_input((SAMPLES / "divide.json").read_text())
        assert doc.variables == ("x1", "x2") and doc.trunc == 2
        assert doc.F[Exponent((1, 1), 1)] == 1
        assert len(doc.divisors) == 2

    def test_relations_document(self):
        doc = parse_input((SAMPLES / "fold.json").read_text())
        data = doc.equation_data()
        assert data.target_dim == 2 and data.has_rhs
        assert len(doc.fibre) == 2

    @pytest.mark.parametrize("name", sorted(p.name for p in SAMPLES.glob("*.json")))
    def test_round_trip(self, name):
        doc = parse_input((SAMPLES / name).read_text())
        assert parse_input(format_document(doc)) == doc

    def test_rational_strings(self):
        from fractions import Fraction
        assert rational_str(Fraction(3)) == "3/1"
        assert rational_str(Fraction(-1, 2)) == "-1/2"


class TestSchemaErrors:
    @pytest.mark.parametrize("text, field", [
        ('{"schema": 1, "variables": ["x"], "trunc": 2, "F": [{"coeff": 0.5, "alpha": [1]}]}', "F"),
        ('{"schema": 1, "variables": ["x"], "trunc": 2, "F": [{"coeff": "1/0", "alpha": [1]}]}', "F"),
        ('{"schema": 1, "variables": ["x"], "surprise": 3}', "surprise"),
        ('{"schema": 1, "variables": ["x"], "trunc": true}', "trunc"),
        ('{"schema": 1, "variables": ["x"], "trunc": 2, "F": [{"coeff": "1", "alpha": [1, 0]}]}', "F"),
        ('{"schema": 7}', "schema"),
    ])
    def test_rejected(self, text, field):
        with pytest.raises(SchemaError) as info:
            parse_input(text)
        assert field in str(info.value)

    def test_json_syntax_reports_line(self):
        with pytest.raises(SchemaError) as info:
            parse_input('{\n"schema": 1,\n"trunc": }')
        assert info.value.line == 3

    def test_cli_prints_schema_help(self):
        code, out, err = run("divide", "-", stdin='{"schema": 1, "trunc": 0.5}')
        assert code == 1 and out == ""
        assert "schema error" in err and "variables" in err


class TestCommands:
    def test_divide(self):
        code, out, _ = run("divide", sample("divide.json"))
        rep = json.loads(out)
        assert code == 0
        assert rep["remainder"] == [{"alpha": [0, 0], "coeff": "1/1", "j": 1}]
        one = {"alpha": [0, 0], "coeff": "1/1", "j": 1}
        assert rep["quotients"] == [[one, {"alpha": [0, 1], "coeff": "1/1", "j": 1}], [one]]

    def test_diagram_and_lambda(self):
        code, out, _ = run("diagram", sample("staircase.json"))
        rep = json.loads(out)
        assert code == 0
        assert sorted(v["alpha"] for v in rep["vertices"]) == [[1, 1], [2, 0]]
        code, out, _ = run("lambda", sample("staircase.json"))
        assert code == 0 and json.loads(out)["lambda"] == 2

    def test_complement(self):
        code, out, _ = run("complement", sample("staircase.json"), "--r", "2")
        alphas = sorted(e["alpha"] for e in json.loads(out)["complement"])
        assert code == 0 and alphas == [[0, 0], [0, 1], [0, 2], [1, 0]]

    def test_member_verdict(self):
        code, out, _ = run("member", sample("staircase.json"))
        assert code == 0 and json.loads(out)["member"] is True
        doc = json.loads((SAMPLES / "staircase.json").read_text())
        doc["G"] = [{"coeff": "1", "alpha": [0, 2]}]
        code, out, _ = run("member", "-", stdin=json.dumps(doc))
        rep = json.loads(out)
        assert code == 2 and rep["member"] is False
        assert rep["remainder"] == [{"alpha": [0, 2], "coeff": "1/1", "j": 1}]

    def test_estimate(self):
        code, out, _ = run("chevalley-estimate", sample("staircase.json"), "--l", "1")
        assert code == 0 and json.loads(out)["holds"] is True

    def test_relations(self):
        code, out, _ = run("relations", sample("relations.json"), "--r", "2", "--l", "1")
        rep = json.loads(out)
        assert code == 0 and rep["projected_dim"] == 1 and rep["rho0"] == 5

    def test_chevalley(self):
        code, out, _ = run("chevalley", sample("relations.json"), "--l", "1", "--rmax", "6")
        rep = json.loads(out)
        assert code == 0 and rep["dims"] == [4, 1, 1, 1, 1, 1] and rep["stabilization_r"] == 2
        code, out, _ = run("chevalley", sample("relations.json"), "--l", "1", "--rmax", "2")
        assert code == 2 and json.loads(out)["stabilization_r"] is None

    def test_solve(self):
        code, out, _ = run("solve-jet", sample("solve.json"), "--r", "5")
        rep = json.loads(out)
        assert code == 0 and rep["verdict"] == "SAT"
        assert rep["P"] == [[{"alpha": [3], "coeff": "1/1"}]]
        code, out, _ = run("solve-jet", sample("unsat.json"), "--r", "2")
        assert code == 2 and json.loads(out)["verdict"] == "UNSAT"

    def test_fold(self):
        code, out, _ = run("solve-jet", sample("fold.json"), "--r", "3", "--point", "1,0",
                           "--fibre", "0:1,0;0:-1,0")
        rep = json.loads(out)
        assert code == 0
        assert sorted(t["alpha"] for t in rep["P"][0]) == [[1, 1], [2, 0]]

    def test_scan(self):
        code, out, _ = run("scan", sample("scan.json"))
        rep = json.loads(out)
        assert code == 0
        assert [(g["dim_l"], g["points"]) for g in rep["groups"]] == [
            (0, [["-1/1"], ["1/1"]]), (1, [["0/1"]])]

    def test_borel(self):
        code, out, _ = run("borel", sample("borel.json"))
        rep = json.loads(out)
        assert code == 2 and rep["verdict"] == "FAIL" and rep["alpha"] == [0, 0] and rep["k"] == 1

    def test_borel_function_passes(self):
        doc = {"schema": 1, "variables": ["x1", "x2"], "m": 2,
               "stratum": {"base": ["0", "1"], "directions": [["1", "1"]]},
               "function": [{"coeff": "1", "alpha": [2, 1]}]}
        code, out, _ = run("borel", "-", stdin=json.dumps(doc))
        assert code == 0 and json.loads(out)["verdict"] == "PASS"

    def test_out_file(self, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = run("divide", sample("divide.json"), "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["command"] == "divide"

    def test_missing_field(self):
        code, _, err = run("complement", sample("staircase.json"))
        assert code == 1 and "r" in err

    def test_library_error_exit(self):
        code, _, err = run("relations", sample("fold.json"), "--r", "1", "--point", "1,0",
                           "--fibre", "0:2,0")
        assert code == 1 and "FibreMismatch" in err

    def test_unknown_command(self):
        code, _, _ = run("frobnicate")
        assert code == 1


def test_output_is_deterministic():
    first = run("chevalley", sample("relations.json"), "--l", "1", "--rmax", "4")[1]
    assert all(run("chevalley", sample("relations.json"), "--l", "1", "--rmax", "4")[1] == first
               for _ in range(3))


def test_scan_bytes_independent_of_threads():
    outs = []
    for threads in ("1", "3"):
        env = dict(os.environ, HKIT_THREADS=threads)
        proc = subprocess.run([sys.executable, "-m", "hkit.cli", "scan", sample("scan.json")],
                              capture_output=True, env=env, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
