from __future__ import annotations

import io
import json

import pytest

from cyclift.cli import run

KUMMER = {"field": {"p": 5, "d": 1, "e": 20, "prec": 240, "sign": "-"}, "r0": "1/4",
          "terms": [[1, {"p_power": "9/10"}], [3, {"p_power": "1"}]]}


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def call_json(*argv):
    code, text = call("--json", *argv)
    return code, json.loads(text)


@pytest.fixture
def kummer_file(tmp_path):
    path = tmp_path / "F.json"
    path.write_text(json.dumps(KUMMER))
    return str(path)


def test_breaks_command():
    code, rep = call_json("breaks", "--p", "5", "--witt", '[["t",-1,1],["t",-34,1]]')
    assert code == 0 and rep["results"]["breaks"] == [1, 34]
    assert rep["schema_version"] == 1 and rep["command"] == "breaks"


def test_normalize_command():
    code, rep = call_json("normalize", "--p", "3", "--witt", '[["t",-3,1]]')
    assert code == 0 and rep["results"]["breaks"] == [1]


def test_check_conditions_command():
    code, rep = call_json("check-conditions", "--p", "5", "--breaks", "1,5,34,170")
    assert code == 0
    assert rep["results"]["tmain"] is False and rep["results"]["witness"] == [3, 2]


def test_solve_g_command():
    code, rep = call_json("solve-g", "--p", "5", "--m", "1", "--nu", "1", "--N", "29")
    assert code == 0 and (rep["results"]["N1"], rep["results"]["N2"]) == (19, 10)
    assert all(rep["certificates"].values())


def test_global_flags_after_command():
    code, text = call("solve-g", "--p", "5", "--m", "1", "--nu", "1", "--N", "29", "--json")
    assert code == 0 and json.loads(text)["results"]["N1"] == 19


def test_matrices_command():
    code, rep = call_json("matrices", "--p", "5", "--breaks", "1,5,34")
    assert code == 0
    assert rep["results"]["C"]["residue"][0] == [4, 0, 0, 0, 1]


def test_kink_command(kummer_file):
    code, rep = call_json("kink", "--input", kummer_file, "--s", "1/5", "--m", "3")
    assert code == 0 and rep["results"]["mu_m"] == "1/20" and rep["results"]["lambda_m"] == "1/20"


def test_delta_profile_csv(kummer_file, tmp_path):
    out = tmp_path / "delta.csv"
    code, _ = call("delta-profile", "--input", kummer_file, "--s", "1/5", "--out", str(out))
    assert code == 0
    assert out.read_text().splitlines() == ["r,value", "0/1,7/20", "1/20,2/5", "1/5,17/20"]


def test_lift_base_command():
    code, rep = call_json("lift-base", "--p", "5", "--m1", "1")
    assert code == 0 and rep["results"]["polygon"]["segments"] == [{"slope": "5/4", "length": 1}]


@pytest.mark.parametrize("name", ["exa2", "econditional", "base-zp", "thm2-sweep"])
def test_repro(name):
    code, rep = call_json("repro", name)
    assert code == 0, [k for k, v in rep["certificates"].items() if not v]


def test_partb_command():
    code, rep = call_json("partb", "--p", "5", "--breaks", "1,5,34", "--F", "T^-34")
    assert code == 0 and rep["results"]["disk"]["witness_a"] == 2


def test_exit_code_certificate_failure():
    # N below m_(n-1)(p-1) has no polynomial solution
    code, rep = call_json("solve-g", "--p", "5", "--m", "1", "--nu", "1", "--N", "2")
    assert code == 2 and rep["error"] == "CertificateError"


def test_exit_code_precision(kummer_file):
    code, rep = call_json("kink", "--input", kummer_file, "--s", "1/5", "--m", "2")
    assert code == 3 and "hint" in rep


def test_exit_code_bad_input(kummer_file):
    assert call_json("check-conditions", "--p", "5", "--breaks", "5,25")[0] == 4
    assert call_json("kink", "--input", kummer_file, "--s", "1/2", "--m", "3")[0] == 4
    with pytest.raises(SystemExit) as exc:
        call("solve-g", "--p", "5")
    assert exc.value.code == 4


def test_json_is_deterministic():
    argv = ("partb", "--p", "5", "--breaks", "1,5,34", "--F", "T^-34")
    assert call("--json", *argv)[1] == call("--json", *argv)[1]


def test_timing_only_on_request():
    _, rep = call_json("solve-g", "--p", "3", "--m", "2", "--nu", "0", "--N", "4")
    assert "timing_seconds" not in rep
    _, rep = call_json("--timing", "solve-g", "--p", "3", "--m", "2", "--nu", "0", "--N", "4")
    assert "timing_seconds" in rep
