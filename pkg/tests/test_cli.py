import csv
import io
import json

import pytest

from sq3.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, build_parser, run_capture


def test_diameter_text():
    code, out = run_capture(["diameter", "duval:22"])
    assert code == EXIT_OK
    assert "order 96" in out
    assert "1/4" in out
    assert "pi/3.0000" in out


def test_diameter_json_round_trip():
    code, out = run_capture(["--json", "diameter", "duval:32"])
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["bound"]["cos2"] == "5/16"
    assert data["vertices"] == 12


def test_options_after_subcommand():
    a = run_capture(["diameter", "duval:32", "--json", "--backend", "float"])
    b = run_capture(["--json", "--backend=float", "diameter", "duval:32"])
    assert a == b
    assert json.loads(a[1])["backend"] == "float"


def test_csv_and_md():
    code, out = run_capture(["--csv", "orbit", "duval:22"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 8
    assert rows[0]["layer"] == "0"
    code, out = run_capture(["--md", "hypercube", "2"])
    assert out.startswith("| n |")


def test_table_exit_codes():
    assert run_capture(["table", "nonfib-irrational"])[0] == EXIT_OK
    code, out = run_capture(["table", "nonfib-rational", "--backend", "float"])
    assert code == EXIT_MISMATCH
    assert "2 mismatches" in out


def test_usage_errors():
    assert run_capture(["diameter", "duval:10(m=3"])[0] == EXIT_USAGE
    assert run_capture(["diameter", "duval:99"])[0] == EXIT_USAGE
    assert run_capture(["table", "nope"])[0] == EXIT_USAGE
    assert run_capture([])[0] == EXIT_USAGE


def test_validate_and_cell():
    code, out = run_capture(["validate", "duval:31"])
    assert code == EXIT_OK and "(I/C2;I/C2)" in out
    code, out = run_capture(["cell", "duval:20"])
    assert code == EXIT_OK and "6 vertices" in out


def test_hypercube():
    for n in (1, 2, 3, 4):
        assert run_capture(["hypercube", str(n)])[0] == EXIT_OK


def test_env_backend(monkeypatch):
    monkeypatch.setenv("SQ3_BACKEND", "float")
    code, out = run_capture(["--json", "diameter", "duval:22"])
    assert json.loads(out)["backend"] == "float"


def test_deterministic_output():
    assert run_capture(["--json", "cell", "duval:23"]) == run_capture(["--json", "cell", "duval:23"])


def test_parser_has_serve():
    args = build_parser().parse_args(["serve", "--port", "9000"])
    assert args.command == "serve" and args.port == 9000


@pytest.mark.parametrize("argv", [["--eps", "1e-8", "--backend", "float", "diameter", "duval:10(m=3,n=3)"]])
def test_eps_option(argv):
    code, out = run_capture(argv)
    assert code == EXIT_OK
