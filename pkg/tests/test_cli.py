from __future__ import annotations

import json

import pytest

from singcubic.catalog import builtin_ids, builtin_text
from singcubic.cli import main


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and out.split() == builtin_ids()


def test_run_text(capsys):
    code, out, _ = run(capsys, "run", "--case", "line-2")
    assert code == 0
    assert out.startswith("case line-2") and "[PASS]" in out and "[FAIL]" not in out


def test_run_json_with_specialization(capsys):
    code, out, _ = run(capsys, "run", "--case", "conic-1", "--specialize", "n=4", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["case"] == "conic-1"
    assert any("D4" in c["detail"] for c in data["checks"])


def test_run_check_filter(capsys):
    code, out, _ = run(capsys, "run", "--case", "line-1", "--check", "invariance", "--format", "json")
    data = json.loads(out)
    assert code == 0 and {c["kind"] for c in data["checks"]} == {"invariance"}


def test_run_param_override(capsys):
    code, out, _ = run(capsys, "run", "--case", "conic-3", "--param", "e2=5", "--format", "json")
    data = json.loads(out)
    assert code == 1 and data["summary"]["fail"] == 1


def test_run_case_file_with_failure(capsys, tmp_path):
    data = json.loads(builtin_text("line-2"))
    data["checks"][1]["point"] = ["1", "1", "1", "1", "1"]
    path = tmp_path / "mutant.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    code, out, _ = run(capsys, "run", "--case", str(path))
    assert code == 1 and "[FAIL]" in out and "witness" in out


def test_load(capsys, tmp_path):
    path = tmp_path / "plane.json"
    path.write_text(builtin_text("plane"), encoding="utf-8")
    code, out, _ = run(capsys, "load", str(path))
    assert code == 0 and out.startswith("plane: ok")


def test_load_rejects_invalid_record(capsys, tmp_path):
    data = json.loads(builtin_text("line-1"))
    data["generators"]["sigma2"]["images"][3] = "-" + data["generators"]["sigma2"]["images"][3]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    code, _, err = run(capsys, "load", str(path))
    assert code == 2 and "sigma2" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["run"],
        ["run", "--case", "line-1", "--specialize", "m=3"],
        ["run", "--case", "line-1", "--specialize", "n=zero"],
        ["run", "--case", "line-1", "--param", "a1"],
        ["run", "--case", "line-1", "--check", "magic"],
        ["run", "--case", "line-1", "--format", "yaml"],
        ["run", "--case", "no-such-case"],
        ["load", "/nonexistent/case.json"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_unknown_parameter_exits_two(capsys):
    code, _, err = run(capsys, "run", "--case", "line-1", "--param", "zz=3")
    assert code == 2 and "zz" in err


def test_run_all_json_is_deterministic(capsys):
    code1, out1, _ = run(capsys, "run-all", "--check", "invariance", "--format", "json")
    code2, out2, _ = run(capsys, "run-all", "--check", "invariance", "--format", "json")
    assert code1 == code2 == 0 and out1 == out2
    reports = json.loads(out1)
    assert [r["case"] for r in reports] == builtin_ids()


def test_run_all_text_has_total(capsys):
    code, out, _ = run(capsys, "run-all", "--check", "semi-invariance", "--conductor", "4")
    assert code == 0 and out.rstrip().splitlines()[-1].startswith("total:")
    assert "skipped" in out
