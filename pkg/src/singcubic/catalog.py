"""Case records: loading, validation, and serialization.

A case file is a JSON document with the top-level keys listed in
:data:`TOP_LEVEL_KEYS`.  Polynomials and matrix entries are strings in the
polynomial grammar.  Loading parses everything against the declared
variables and, unless ``validate=False``, checks that every generator
preserves the cubic up to its declared multiplier.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .mpoly import MPoly, ParseError, RelationSet, VarTable, find_multiplier, parse, reduce_mod
from .projalg import CurveParam, LinearAction, RationalMap, sym_power

TOP_LEVEL_KEYS = (
    "id",
    "ambient_dim",
    "max_conductor",
    "variables",
    "parameters",
    "cubic",
    "curves",
    "generators",
    "claimed_group",
    "maps",
    "verdict",
    "checks",
)
VARIABLE_ROLES = ("coordinates", "geometry", "curve", "case", "group", "unknown")
VERDICTS = ("linearizable", "not-linearizable", "open", "unirational")
CHECK_KINDS = (
    "invariance",
    "semi-invariance",
    "singular-along",
    "curve-containment",
    "orbit",
    "fixed-point",
    "no-common-fixed-point",
    "map-identity",
    "map-image-in",
    "map-equivariance",
    "line-in-fibers",
    "group-structure",
    "stabilizer-system",
    "dimension",
    "smooth-plane-cubic",
)
MAP_CLAIMS = ("equivariant", "birational", "non-birational", "image-in", "projection", "embedding")
BUILTIN_IDS = (
    "line-1",
    "line-2",
    "line-3",
    "line-4",
    "line-5",
    "conic-1",
    "conic-2",
    "conic-3",
    "conic-4",
    "conic-5",
    "conic-6",
    "conic-7",
    "chordal",
    "plane",
)


class CaseError(ValueError):
    """A case file is malformed or refers to undeclared names."""


class InvarianceError(CaseError):
    """A generator does not preserve the cubic with its declared multiplier."""

    def __init__(self, case_id: str, generator: str, residual: MPoly | None, multiplier: MPoly | None = None):
        if residual is not None and residual:
            msg = f"{case_id}: generator {generator} does not preserve the cubic; residual {residual}"
        else:
            msg = f"{case_id}: generator {generator} has multiplier {multiplier}, not the declared one"
        super().__init__(msg)
        self.generator = generator
        self.residual = residual
        self.multiplier = multiplier


@dataclass(frozen=True)
class Parameter:
    name: str
    note: str = ""
    nonzero: bool = False
    sample: MPoly | None = None


@dataclass(frozen=True)
class Generator:
    """A labelled linear action with its declared multiplier on the cubic."""

    label: str
    action: LinearAction
    multiplier: MPoly | None
    source: dict = field(compare=False, repr=False)


@dataclass(frozen=True)
class CaseMap:
    label: str
    map: RationalMap
    target: tuple[str, ...]
    claims: tuple[str, ...]
    source: dict = field(compare=False, repr=False)


@dataclass(frozen=True)
class CaseRecord:
    id: str
    ambient_dim: int
    max_conductor: int
    variables: VarTable
    coordinates: tuple[str, ...]
    parameters: tuple[Parameter, ...]
    cubic: MPoly
    curves: dict[str, CurveParam]
    generators: dict[str, Generator]
    claimed_group: str
    maps: dict[str, CaseMap]
    verdict: dict[str, str]
    checks: tuple[dict, ...]
    raw: dict = field(compare=False, repr=False)

    def parse(self, text: Any) -> MPoly:
        return parse_entry(text, self.variables, self.id)

    def parameter_samples(self) -> dict[str, MPoly]:
        return {p.name: p.sample for p in self.parameters if p.sample is not None}

    def nonzero_parameters(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters if p.nonzero)

    def generator(self, label: str) -> Generator:
        try:
            return self.generators[label]
        except KeyError:
            raise CaseError(f"{self.id}: unknown generator {label!r}") from None

    def curve(self, label: str) -> CurveParam:
        try:
            return self.curves[label]
        except KeyError:
            raise CaseError(f"{self.id}: unknown curve {label!r}") from None

    def case_map(self, label: str) -> CaseMap:
        try:
            return self.maps[label]
        except KeyError:
            raise CaseError(f"{self.id}: unknown map {label!r}") from None


def parse_entry(text: Any, table: VarTable, case_id: str = "") -> MPoly:
    if isinstance(text, bool):
        raise CaseError(f"{case_id}: booleans are not polynomials")
    if isinstance(text, int):
        return MPoly.const(text)
    if not isinstance(text, str):
        raise CaseError(f"{case_id}: expected a polynomial string, got {text!r}")
    try:
        return parse(text, table)
    except ParseError as exc:
        raise CaseError(f"{case_id}: {exc}") from exc


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CaseError(msg)


def _build_table(spec: Mapping[str, Any], case_id: str) -> tuple[VarTable, tuple[str, ...]]:
    _require(isinstance(spec, dict), f"{case_id}: variables must be an object")
    unknown = set(spec) - set(VARIABLE_ROLES)
    _require(not unknown, f"{case_id}: unknown variable roles {sorted(unknown)}")
    _require("coordinates" in spec, f"{case_id}: variables.coordinates is required")
    groups: dict[str, list[str]] = {}
    for role in VARIABLE_ROLES:
        names = spec.get(role, [])
        _require(isinstance(names, list) and all(isinstance(n, str) for n in names), f"{case_id}: bad variables.{role}")
        groups["geometry" if role == "coordinates" else role] = groups.get(
            "geometry" if role == "coordinates" else role, []
        ) + list(names)
    try:
        table = VarTable.from_roles(groups)
    except ValueError as exc:
        raise CaseError(f"{case_id}: {exc}") from exc
    return table, tuple(spec["coordinates"])


def _matrix_rows(spec: Any, table: VarTable, case_id: str, label: str) -> list[list[MPoly]]:
    _require(isinstance(spec, list) and spec and all(isinstance(r, list) for r in spec), f"{case_id}: bad matrix for {label}")
    return [[parse_entry(e, table, case_id) for e in row] for row in spec]


def build_action(spec: Mapping[str, Any], table: VarTable, coords: tuple[str, ...], case_id: str, label: str) -> LinearAction:
    """Construct a LinearAction from one of the supported generator encodings."""
    forms = [k for k in ("matrix", "images", "diag", "sym_power") if k in spec]
    _require(len(forms) == 1, f"{case_id}: generator {label} needs exactly one of matrix/images/diag/sym_power")
    on = tuple(spec.get("coordinates", coords))
    relations = tuple(parse_entry(r, table, case_id) for r in spec.get("relations", []))
    witness = parse_entry(spec["witness"], table, case_id) if "witness" in spec else None
    form = forms[0]
    if form == "matrix":
        rows = _matrix_rows(spec["matrix"], table, case_id, label)
        action = LinearAction.from_rows(rows, on if len(on) == len(rows) else (), label=label, relations=relations, witness=witness)
    elif form == "images":
        images = [parse_entry(e, table, case_id) for e in spec["images"]]
        _require(len(images) == len(on), f"{case_id}: generator {label} has {len(images)} images for {len(on)} coordinates")
        try:
            action = LinearAction.from_images(images, on, label=label, relations=relations, witness=witness)
        except ValueError as exc:
            raise CaseError(f"{case_id}: {exc}") from exc
    elif form == "diag":
        entries = [parse_entry(e, table, case_id) for e in spec["diag"]]
        action = LinearAction.diag(entries, on if len(on) == len(entries) else (), label=label, relations=relations, witness=witness)
    else:
        sp = spec["sym_power"]
        base = LinearAction.from_rows(_matrix_rows(sp["matrix"], table, case_id, label), relations=relations)
        action = sym_power(base, int(sp["degree"]))
        action = LinearAction(action.rows, on if len(on) == action.dim else (), label, relations, witness)
    _require(action.dim == len(action.coords) or not action.coords, f"{case_id}: generator {label} has the wrong size")
    return action


def _check_invariance(rec_id: str, cubic: MPoly, coords: tuple[str, ...], gen: Generator) -> None:
    action = gen.action
    rels = RelationSet(action.relations)
    lam, residual = find_multiplier(cubic, action, None, rels, coords)
    if lam is None:
        raise InvarianceError(rec_id, gen.label, residual)
    if gen.multiplier is not None and reduce_mod(lam - gen.multiplier, rels):
        raise InvarianceError(rec_id, gen.label, None, lam)


def load_dict(data: Mapping[str, Any], *, validate: bool = True) -> CaseRecord:
    """Build and (optionally) validate a record from a decoded JSON object."""
    _require(isinstance(data, dict), "a case must be a JSON object")
    case_id = data.get("id", "<unnamed>")
    extra = set(data) - set(TOP_LEVEL_KEYS)
    _require(not extra, f"{case_id}: unknown keys {sorted(extra)}")
    missing = [k for k in TOP_LEVEL_KEYS if k not in data]
    _require(not missing, f"{case_id}: missing keys {missing}")
    _require(isinstance(case_id, str) and case_id, "id must be a nonempty string")
    _require(isinstance(data["ambient_dim"], int) and data["ambient_dim"] >= 1, f"{case_id}: bad ambient_dim")
    _require(isinstance(data["max_conductor"], int) and data["max_conductor"] >= 1, f"{case_id}: bad max_conductor")

    table, coords = _build_table(data["variables"], case_id)
    _require(len(coords) == data["ambient_dim"] + 1, f"{case_id}: need {data['ambient_dim'] + 1} coordinates")

    params = []
    _require(isinstance(data["parameters"], dict), f"{case_id}: parameters must be an object")
    for name, spec in data["parameters"].items():
        _require(name in table, f"{case_id}: parameter {name} is not declared")
        _require(isinstance(spec, dict), f"{case_id}: parameter {name} must be an object")
        bad = set(spec) - {"note", "nonzero", "sample"}
        _require(not bad, f"{case_id}: unknown parameter fields {sorted(bad)}")
        sample = parse_entry(spec["sample"], table, case_id) if "sample" in spec else None
        params.append(Parameter(name, spec.get("note", ""), bool(spec.get("nonzero", False)), sample))

    cubic = parse_entry(data["cubic"], table, case_id)
    _require(cubic.is_homogeneous(coords) and cubic.degree_in(coords) == 3, f"{case_id}: the cubic is not a cubic form")

    curves = {}
    for label, spec in data["curves"].items():
        comps = [parse_entry(c, table, case_id) for c in spec["components"]]
        try:
            curves[label] = CurveParam(tuple(comps), tuple(spec.get("params", ("s", "t"))), label)
        except ValueError as exc:
            raise CaseError(f"{case_id}: {exc}") from exc

    generators = {}
    for label, spec in data["generators"].items():
        action = build_action(spec, table, coords, case_id, label)
        mult = parse_entry(spec["multiplier"], table, case_id) if "multiplier" in spec else None
        generators[label] = Generator(label, action, mult, dict(spec))

    maps = {}
    for label, spec in data["maps"].items():
        comps = [parse_entry(c, table, case_id) for c in spec["components"]]
        source = tuple(spec.get("source", coords))
        claims = tuple(spec.get("claims", ()))
        _require(all(c in MAP_CLAIMS for c in claims), f"{case_id}: unknown claims on map {label}")
        try:
            rm = RationalMap(tuple(comps), source, label)
        except ValueError as exc:
            raise CaseError(f"{case_id}: {exc}") from exc
        maps[label] = CaseMap(label, rm, tuple(spec.get("target", ())), claims, dict(spec))

    verdict = data["verdict"]
    _require(isinstance(verdict, dict) and verdict.get("value") in VERDICTS, f"{case_id}: bad verdict")
    checks = data["checks"]
    _require(isinstance(checks, list), f"{case_id}: checks must be a list")
    names = set()
    for chk in checks:
        _require(isinstance(chk, dict) and chk.get("kind") in CHECK_KINDS, f"{case_id}: bad check {chk!r}")
        _require("name" in chk and chk["name"] not in names, f"{case_id}: check names must be present and unique")
        names.add(chk["name"])

    rec = CaseRecord(
        id=case_id,
        ambient_dim=data["ambient_dim"],
        max_conductor=data["max_conductor"],
        variables=table,
        coordinates=coords,
        parameters=tuple(params),
        cubic=cubic,
        curves=curves,
        generators=generators,
        claimed_group=str(data["claimed_group"]),
        maps=maps,
        verdict=dict(verdict),
        checks=tuple(dict(c) for c in checks),
        raw=json.loads(json.dumps(data)),
    )
    if validate:
        for gen in generators.values():
            if gen.action.dim == len(coords) and gen.source.get("acts_on", "ambient") == "ambient":
                _check_invariance(case_id, cubic, coords, gen)
    return rec


def loads(text: str, *, validate: bool = True) -> CaseRecord:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CaseError(f"invalid JSON: {exc}") from exc
    return load_dict(data, validate=validate)


def builtin_ids() -> list[str]:
    return list(BUILTIN_IDS)


def builtin_text(case_id: str) -> str:
    if case_id not in BUILTIN_IDS:
        raise CaseError(f"unknown built-in case {case_id!r}")
    return resources.files("singcubic").joinpath("data", f"{case_id}.json").read_text(encoding="utf-8")


def load(source: str | Path, *, validate: bool = True) -> CaseRecord:
    """Load a built-in id or a case file path."""
    if isinstance(source, str) and source in BUILTIN_IDS:
        return loads(builtin_text(source), validate=validate)
    path = Path(source)
    if not path.exists():
        raise CaseError(f"no built-in case or file named {source!r}")
    return loads(path.read_text(encoding="utf-8"), validate=validate)


def _canonical_entry(text: Any, table: VarTable) -> Any:
    if isinstance(text, (str, int)) and not isinstance(text, bool):
        return str(parse_entry(text, table))
    return text


def serialize(rec: CaseRecord) -> str:
    """JSON text of the record with polynomials in canonical printed form."""
    data = json.loads(json.dumps(rec.raw))
    table = rec.variables
    data["cubic"] = str(rec.cubic)
    for label, spec in data["curves"].items():
        spec["components"] = [str(c) for c in rec.curves[label].components]
    for spec in data["maps"].values():
        spec["components"] = [_canonical_entry(c, table) for c in spec["components"]]
    for spec in data["generators"].values():
        for key in ("images", "diag", "relations"):
            if key in spec:
                spec[key] = [_canonical_entry(e, table) for e in spec[key]]
        if "matrix" in spec:
            spec["matrix"] = [[_canonical_entry(e, table) for e in row] for row in spec["matrix"]]
        for key in ("multiplier", "witness"):
            if key in spec:
                spec[key] = _canonical_entry(spec[key], table)
    return json.dumps(data, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def records_equal(a: CaseRecord, b: CaseRecord) -> bool:
    return a == b and serialize(a) == serialize(b)
