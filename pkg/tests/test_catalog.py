from __future__ import annotations

import copy
import json

import pytest

from singcubic.catalog import (
    CHECK_KINDS,
    CaseError,
    InvarianceError,
    builtin_ids,
    builtin_text,
    load,
    load_dict,
    loads,
    records_equal,
    serialize,
)
from singcubic.driver import EXECUTORS
from singcubic.mpoly import parse
from singcubic.projalg import LinearAction, sym_power

IDS = ["line-1", "line-2", "line-3", "line-4", "line-5"] + [f"conic-{i}" for i in range(1, 8)] + ["chordal", "plane"]


def raw(case_id: str) -> dict:
    return json.loads(builtin_text(case_id))


def test_builtin_ids():
    ids = builtin_ids()
    assert ids == IDS
    assert len(set(ids)) == 14


@pytest.mark.parametrize("case_id", IDS)
def test_round_trip(case_id, records):
    rec = records[case_id]
    assert records_equal(loads(serialize(rec)), rec)


@pytest.mark.parametrize("case_id", IDS)
def test_symbols_are_declared_and_cubic_is_a_cubic(case_id, records):
    rec = records[case_id]
    declared = set(rec.variables.names)
    assert set(rec.cubic.vars) <= declared
    assert rec.cubic.is_homogeneous(rec.coordinates) and rec.cubic.degree_in(rec.coordinates) == 3
    for gen in rec.generators.values():
        for row in gen.action.rows:
            for e in row:
                assert set(e.vars) <= declared | {"a_inv"}, (gen.label, e)


@pytest.mark.parametrize("case_id", IDS)
def test_every_check_kind_is_executable(case_id, records):
    for chk in records[case_id].checks:
        assert chk["kind"] in EXECUTORS
    assert set(CHECK_KINDS) == set(EXECUTORS)


def test_chordal_record(records):
    rec = records["chordal"]
    assert rec.cubic == parse("x1*x4^2 + x2^2*x5 - x1*x3*x5 - 2*x2*x3*x4 + x3^3")
    g = rec.generators["pgl2"].action
    assert g.rows == sym_power(LinearAction.from_rows([["a", "b"], ["c", "d"]]), 4).rows


def test_conic_two_record(records):
    rec = records["conic-2"]
    assert "e2" not in rec.cubic.vars
    assert set(rec.nonzero_parameters()) == {"e1", "e3"}
    assert set(rec.generators) == {"tau", "sigma12", "eta1", "eta1_induced"}
    assert rec.generators["eta1_induced"].action.dim == 6
    assert rec.verdict["value"] == "not-linearizable"


def test_sign_flip_in_generator_fails_at_load():
    data = raw("line-1")
    images = data["generators"]["sigma2"]["images"]
    images[3] = "-" + images[3]
    with pytest.raises(InvarianceError) as err:
        load_dict(data)
    assert err.value.generator == "sigma2" and err.value.residual
    # validation can be switched off to study mutants
    assert load_dict(data, validate=False).id == "line-1"


def test_wrong_declared_multiplier_fails_at_load():
    data = raw("chordal")
    data["generators"]["torus"]["multiplier"] = "a^5"
    with pytest.raises(InvarianceError):
        load_dict(data)


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.update(extra=1), "unknown"),
        (lambda d: d.pop("cubic"), "cubic"),
        (lambda d: d.update(cubic="x1^2*x2 + w"), "w"),
        (lambda d: d.update(cubic="x1^2 + x2^2"), "not a cubic form"),
        (lambda d: d.update(cubic="x1^3 + x2"), "not a cubic form"),
        (lambda d: d["checks"].append({"name": "bad", "kind": "magic"}), "magic"),
        (lambda d: d["verdict"].update(value="maybe"), "verdict"),
        (lambda d: d.update(id=""), "id"),
    ],
)
def test_malformed_records_are_rejected(mutate, fragment):
    data = raw("line-2")
    mutate(data)
    with pytest.raises(CaseError, match=fragment):
        load_dict(data)


def test_load_from_file(tmp_path):
    path = tmp_path / "case.json"
    path.write_text(builtin_text("plane"), encoding="utf-8")
    assert load(str(path)).id == "plane"
    with pytest.raises(CaseError):
        load(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(CaseError, match="invalid JSON"):
        load(str(bad))


def test_records_are_independent_of_raw_data():
    data = raw("line-1")
    snapshot = copy.deepcopy(data)
    load_dict(data)
    assert data == snapshot
