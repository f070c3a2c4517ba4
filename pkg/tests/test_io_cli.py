import io as stdio
import json
import subprocess
import sys

import pytest

from cli_cases import CASES, FIXTURES
from linfty import io
from linfty.brackets import SkewBrackets, SymBrackets
from linfty.cli import run
from linfty.errors import InputError


def invoke(*argv):
    out, err = stdio.StringIO(), stdio.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def fixture(name):
    return str(FIXTURES / f"{name}.json")


def test_minimal_abelian_file():
    sf = io.parse_structure_file(fixture("abelian"))
    assert sf.brackets.is_zero()
    assert isinstance(sf.brackets, SkewBrackets)


def test_sl2_round_trips_byte_identically():
    raw = (FIXTURES / "sl2.json").read_text()
    assert io.serialize_structure(io.parse_structure_file(fixture("sl2"))) == raw


def test_degree_violation_names_the_entry():
    with pytest.raises(InputError) as exc:
        io.parse_structure_file(fixture("bad-degree"))
    assert "/brackets/2/0" in str(exc.value)
    code, _, err = invoke("check-jacobi", fixture("bad-degree"))
    assert code == 2 and "/brackets/2/0" in err


def test_schema_errors_carry_pointers():
    with pytest.raises(io.SchemaError) as exc:
        io.validate({"schema": 1, "convention": "linfty", "space": [{"label": "a"}]})
    assert "/space/0" in str(exc.value)
    with pytest.raises(io.SchemaError):
        io.validate({"schema": 2, "convention": "linfty", "space": []})
    # scalars must be exact: floats are refused
    doc = json.loads((FIXTURES / "sl2.json").read_text())
    doc["brackets"]["2"][0]["value"]["h"] = 0.5
    with pytest.raises(InputError):
        io.parse_document(doc)


def test_rational_scalars_accepted():
    doc = json.loads((FIXTURES / "sl2.json").read_text())
    doc["brackets"]["2"][0]["value"]["h"] = "2/4"
    sf = io.parse_document(doc)
    assert str(sf.brackets.bracket(0, 1).coords[2]) == "1/2"
    assert "1/2" in io.serialize_structure(sf)


@pytest.mark.parametrize("command,name,code", CASES, ids=[f"{c}:{n}" for c, n, _ in CASES])
def test_exit_code_contract(command, name, code):
    got, out, _ = invoke(command, fixture(name), "--format", "json")
    assert got == code
    payload = json.loads(out)
    assert payload["exit_code"] == code
    if code != 2:
        assert payload["verdict"] == ("pass" if code == 0 else "fail")


def test_reports_are_byte_identical():
    for command, name, _ in CASES:
        for fmt in ("json", "text"):
            first = invoke(command, fixture(name), "--format", fmt)
            assert invoke(command, fixture(name), "--format", fmt) == first


def test_text_report_shapes():
    code, out, _ = invoke("check-jacobi", fixture("sl2"))
    assert code == 0 and out.endswith("all checks passed\nexit code: 0\n")
    code, out, _ = invoke("check-jacobi", fixture("sl2-broken"))
    assert code == 1 and "verification failed" in out and "n=3" in out


def test_decalage_out_emits_valid_file_in_other_convention(tmp_path):
    code, out, err = invoke("decalage", fixture("sl2"), "--out", "-")
    assert code == 0
    doc = json.loads(out)
    assert doc["convention"] == "linfty1"
    sf = io.parse_document(doc)
    assert isinstance(sf.brackets, SymBrackets)
    assert "all checks passed" in err
    source, target = tmp_path / "sym.json", tmp_path / "back.json"
    source.write_text(out)
    assert invoke("decalage", str(source), "--out", str(target))[0] == 0
    assert target.read_text() == (FIXTURES / "sl2.json").read_text()


def test_flags_override_and_are_reported():
    code, out, _ = invoke("check-jacobi", fixture("sl2"), "--max-arity", "2", "--format", "json")
    assert code == 0
    assert json.loads(out)["effective"]["max_arity"] == 2
    assert invoke("check-jacobi", fixture("sl2"), "--max-arity", "0")[0] == 2


def test_timing_is_opt_in():
    _, out, _ = invoke("check-jacobi", fixture("sl2"), "--format", "json")
    assert "timing_seconds" not in json.loads(out)
    _, out, _ = invoke("check-jacobi", fixture("sl2"), "--format", "json", "--timing")
    assert "timing_seconds" in json.loads(out)


def test_usage_errors_exit_2():
    assert invoke("check-jacobi", str(FIXTURES / "missing.json"))[0] == 2
    proc = subprocess.run([sys.executable, "-m", "linfty", "no-such-command", fixture("sl2")],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_console_entry_matches_in_process_run():
    proc = subprocess.run([sys.executable, "-m", "linfty", "check-jacobi", fixture("sl2"),
                           "--format", "json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == invoke("check-jacobi", fixture("sl2"), "--format", "json")[1]
