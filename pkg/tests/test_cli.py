from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from globomega.cli import RunConfig, main, run

ROOT = Path(__file__).resolve().parents[1]
BZ2 = str(ROOT / "data" / "bz2.json")


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.startswith("{") else out


def test_tower_report(capsys):
    code, report = call(capsys, "tower", BZ2, "--dim", "1")
    assert code == 0 and report["status"] == 0
    assert report["levels"] == [{"objects": 1, "arrows": 2}, {"objects": 4, "arrows": 32}]
    assert report["verified"] is True
    assert len(report["input_sha256"]) == 64
    assert report["config"]["dim"] == 1


def test_op_report(capsys):
    code, report = call(capsys, "op", BZ2, "--name", "a")
    assert code == 0
    assert report["equations"] == {"s.h = f": True, "t.h = g": True}
    assert report["dim"] == 2 and report["table"] == "(1,0,1,0,1)"


def test_certify_report(capsys):
    code, report = call(capsys, "certify", BZ2, "--max-dim", "1", "--max-len", "3", "--oracle")
    assert code == 0 and report["verified"]
    assert report["success_rate"] == 1.0
    assert report["oracle_agreed"] == report["oracle_checked"] == report["pairs"]


def test_discrete_backend(capsys):
    code, report = call(capsys, "tower", "--backend", "discrete", "--size", "3", "--dim", "2")
    assert code == 0
    assert report["levels"] == [{"elements": 3}] * 3
    assert report["boundaries"] == [None, {"elements": 9}, {"elements": 3}]


def test_eval_face(capsys):
    theta = json.dumps({"dom": "(0)", "cod": "(1)", "tops": ["0:t0"]})
    code, report = call(capsys, "eval", BZ2, "--theta", theta)
    assert code == 0
    assert report["domain"] == {"objects": 4, "arrows": 32}
    assert report["codomain"] == {"objects": 1, "arrows": 2}


def test_theta0_hom(capsys):
    code, report = call(capsys, "theta0", "hom", "(1)", "(1,0,1)")
    assert code == 0 and report["count"] == 2


@pytest.mark.parametrize(
    "argv,code,error",
    [
        (["tower", "/nonexistent.json"], 1, "InputError"),
        (["tower"], 1, "InputError"),
        (["theta0", "hom", "(1,1)", "(1)"], 1, "MalformedTable"),
        (["op", BZ2, "--name", "zeta"], 2, "UnknownOperation"),
        (["eval", BZ2, "--theta", "{"], 1, "InputError"),
        (["eval", BZ2, "--theta", '{"dom": "(1)", "cod": "(0)", "tops": ["0:top"]}'], 2, None),
    ],
)
def test_exit_codes(capsys, argv, code, error):
    got, report = call(capsys, *argv)
    assert got == code
    assert report["status"] == code
    if error:
        assert report["error"]["type"] == error


def test_bad_groupoid_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"objects": ["a"], "arrows": [], "compose": [], "identities": {"a": "id"}}')
    code, report = call(capsys, "tower", str(bad))
    assert code == 1 and report["error"]["type"] == "GroupoidFormatError"


def test_negative_dimension_is_an_input_error(capsys):
    assert main(["tower", BZ2, "--dim", "-1"]) == 1


def test_output_file_and_pretty(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["tower", BZ2, "--dim", "1", "-o", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["verified"] is True
    assert main(["tower", BZ2, "--dim", "1", "--pretty"]) == 0
    assert capsys.readouterr().out.startswith("tower: status 0")


def test_run_is_pure():
    config = RunConfig("theta0", tables=("(0)", "(2)"))
    assert run(config) == run(config)
    assert run(config)[1]["count"] == 2  # the two endpoints


def test_module_entry_point_is_byte_stable():
    argv = [sys.executable, "-m", "globomega", "op", BZ2, "--name", "m", "--dim", "1"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first.endswith(b"\n")
