from __future__ import annotations

import copy
import json

import pytest

from singcubic import driver
from singcubic.catalog import builtin_text, load, load_dict
from singcubic.driver import (
    CheckResult,
    RunOptions,
    VerificationReport,
    aggregate_exit_code,
    pure_power_exponent,
    run_all,
    run_case,
)
from singcubic.mpoly import parse
from singcubic.stabsolve import ResourceCapError


def raw(case_id: str) -> dict:
    return json.loads(builtin_text(case_id))


def by_name(report: VerificationReport) -> dict[str, CheckResult]:
    return {c.name: c for c in report.checks}


# --- single cases ---------------------------------------------------------------


def test_chordal_case_passes(records):
    report = run_case(records["chordal"])
    assert report.ok and report.exit_code() == 0
    checks = by_name(report)
    assert checks["Klein four-group fixes the smooth point [1:0:1:0:1]"].status == "pass"
    semi = [c for c in report.checks if c.kind == "semi-invariance"]
    assert semi and all(c.status == "pass" for c in semi)


def test_torus_specialization_gives_dihedral_group(records):
    report = run_case(records["conic-1"], RunOptions(torus_n=4))
    groups = [c for c in report.checks if c.kind == "group-structure"]
    assert any("D4" in c.detail for c in groups)
    assert all(c.status == "pass" for c in report.checks)
    assert any(c.kind == "no-common-fixed-point" and c.status == "pass" for c in report.checks)


def test_parameter_override_reaches_specialized_checks(records):
    assert run_case(records["conic-3"]).ok
    report = run_case(records["conic-3"], RunOptions(params={"e2": "5"}))
    # the recorded sample point was chosen for the default e2, so only that check moves
    fails = [c for c in report.checks if c.status != "pass"]
    assert [c.kind for c in fails] == ["fixed-point"] and fails[0].witness


def test_mutated_record_fails_with_a_reproducible_witness():
    data = raw("line-1")
    data["cubic"] = data["cubic"].replace("+ x3^2*x4", "- x3^2*x4", 1)
    rec = load_dict(data, validate=False)
    report = run_case(rec)
    fails = [c for c in report.checks if c.status == "fail"]
    assert fails and report.exit_code() == 1
    assert all(c.witness for c in fails)
    inv = next(c for c in fails if c.kind in ("invariance", "semi-invariance"))
    # the witness is a residual in the grammar; re-parsing it gives a nonzero polynomial
    assert parse(inv.witness.split("; ")[0])


def test_engine_does_not_mutate_the_record(records):
    rec = load("line-3")
    before = copy.deepcopy(rec.raw)
    run_case(rec, RunOptions(torus_n=3))
    assert rec.raw == before


def test_failures_do_not_abort_remaining_checks():
    data = raw("line-2")
    data["checks"][1]["point"] = ["1", "1", "1", "1", "1"]
    report = run_case(load_dict(data, validate=False))
    assert [c.status for c in report.checks[:2]] == ["pass", "fail"]
    assert len(report.checks) == len(data["checks"])
    assert all(c.status == "pass" for c in report.checks[2:])


def test_fail_fast_stops_early():
    data = raw("line-2")
    data["checks"][1]["point"] = ["1", "1", "1", "1", "1"]
    report = run_case(load_dict(data, validate=False), RunOptions(fail_fast=True))
    assert len(report.checks) == 2


def test_resource_cap_is_unresolved_not_fatal(monkeypatch, records):
    def capped(*args, **kwargs):
        raise ResourceCapError("basis size exceeds cap 500")

    monkeypatch.setattr(driver, "buchberger", capped)
    report = run_case(records["line-4"])
    dims = [c for c in report.checks if c.kind == "dimension"]
    assert dims and all(c.status == "unresolved" and c.cap_exceeded for c in dims)
    assert report.exit_code() == 3


def test_extra_branches_are_unresolved():
    data = raw("line-2")
    dim = next(c for c in data["checks"] if c["kind"] == "dimension")
    dim["solutions"] = 3
    report = run_case(load_dict(data))
    res = next(c for c in report.checks if c.kind == "dimension")
    assert res.status == "unresolved" and "unresolved branches" in res.detail
    assert report.exit_code() == 1
    dim["expect_unresolved"] = True
    assert run_case(load_dict(data)).exit_code() == 0


def test_wrong_dimension_claim_fails():
    data = raw("line-4")
    dim = next(c for c in data["checks"] if c["kind"] == "dimension")
    dim["dimension"] = 1
    res = next(c for c in run_case(load_dict(data)).checks if c.kind == "dimension")
    assert res.status == "fail" and res.witness


# --- runs over the catalogue ---------------------------------------------------------


def test_kind_filter_runs_only_those_checks():
    reports = run_all(RunOptions(kinds=("stabilizer-system",)), ids=["line-1", "conic-5", "plane"])
    kinds = {c.kind for r in reports for c in r.checks}
    assert kinds == {"stabilizer-system"}


def test_low_conductor_skips_case_with_reason():
    (report,) = run_all(RunOptions(conductor=4), ids=["chordal"])
    assert report.skipped_reason and all(c.status == "skipped" for c in report.checks)
    assert "20" in report.skipped_reason and report.exit_code() == 0
    (report,) = run_all(RunOptions(conductor=4), ids=["line-1"])
    assert not report.skipped_reason


def test_reports_are_deterministic():
    ids = ["line-2", "conic-6", "plane"]
    first = json.dumps([r.as_dict() for r in run_all(ids=ids)])
    second = json.dumps([r.as_dict() for r in run_all(ids=ids)])
    assert first == second


def test_report_serialization():
    report = run_case(load("line-5"))
    data = json.loads(report.to_json())
    assert data["case"] == "line-5" and data["engine"]
    assert data["summary"]["pass"] == len(data["checks"])
    assert all("elapsed" not in c for c in data["checks"])
    assert all("elapsed" in c for c in json.loads(report.to_json(timing=True))["checks"])
    text = report.to_text()
    assert text.startswith("case line-5") and "[PASS]" in text


def test_fail_always_carries_witness():
    data = raw("plane")
    data["generators"]["gl2"]["multiplier"] = "(a*d - b*c)^3"
    report = run_case(load_dict(data, validate=False))
    fails = [c for c in report.checks if c.status == "fail"]
    assert fails and all(c.witness for c in fails)


# --- exit codes ------------------------------------------------------------------------


def _report(*statuses, cap=False, expected=False):
    return VerificationReport("x", [CheckResult("c", "k", s, cap_exceeded=cap, expected_unresolved=expected) for s in statuses])


def test_exit_codes():
    assert _report("pass", "skipped").exit_code() == 0
    assert _report("pass", "fail").exit_code() == 1
    assert _report("unresolved").exit_code() == 1
    assert _report("unresolved", expected=True).exit_code() == 0
    assert _report("unresolved", cap=True).exit_code() == 3
    assert aggregate_exit_code([_report("pass"), _report("unresolved", cap=True)]) == 3
    assert aggregate_exit_code([_report("fail"), _report("unresolved", cap=True)]) == 1
    assert aggregate_exit_code([_report("pass")]) == 0


def test_pure_power_exponent():
    base = parse("a*d - b*c")
    assert pure_power_exponent(base**6, base) == 6
    assert pure_power_exponent(parse("1"), base) == 0
    assert pure_power_exponent(parse("2") * base**2, base) is None


def test_options_are_immutable():
    opts = RunOptions()
    with pytest.raises(AttributeError):
        opts.torus_n = 3  # type: ignore[misc]
