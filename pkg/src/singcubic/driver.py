"""Run a case record's checks and collect a verification report."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Mapping, Sequence

from . import __version__
from .catalog import CaseError, CaseRecord, build_action, builtin_ids, load
from .cyclo import CycNum
from .groups import (
    GroupCapError,
    close,
    common_fixed_point_on_curve,
    fixed_parameters,
    normalize_group_name,
    orbit,
    recognize,
    restrict,
    stabilizer_order,
)
from .mpoly import MPoly, RelationSet, find_multiplier, parse, reduce_mod
from .projalg import (
    CurveParam,
    IndeterminacyError,
    LinearAction,
    RationalMap,
    TransportError,
    as_point,
    canonical_point,
    cross_residual,
    fixed_points_check,
    format_point,
    induced_param_action,
    line_residual,
    map_apply,
    map_cross_residual,
    singular_along_residual,
    transport_action,
)
from .stabsolve import (
    MatrixShape,
    PolySystem,
    ResourceCapError,
    buchberger,
    determinant,
    invariance_system,
    staircase_dimension,
    standard_monomial_count,
    verify_solution_family,
)

STATUSES = ("pass", "fail", "skipped", "unresolved")


@dataclass(frozen=True)
class RunOptions:
    """Per-run settings; never mutated by the engine."""

    params: Mapping[str, str] = field(default_factory=dict)
    torus_n: int | None = None
    conductor: int | None = None
    kinds: tuple[str, ...] = ()
    fail_fast: bool = False
    timing: bool = False


@dataclass
class CheckResult:
    name: str
    kind: str
    status: str
    detail: str = ""
    witness: str | None = None
    cap_exceeded: bool = False
    expected_unresolved: bool = False
    elapsed: float | None = None

    def as_dict(self, timing: bool = False) -> dict:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind, "status": self.status, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        if timing and self.elapsed is not None:
            out["elapsed"] = round(self.elapsed, 3)
        return out


@dataclass
class VerificationReport:
    case_id: str
    checks: list[CheckResult]
    engine_version: str = __version__
    skipped_reason: str = ""

    def summary(self) -> dict[str, int]:
        counts = {s: 0 for s in STATUSES}
        for c in self.checks:
            counts[c.status] += 1
        return counts

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" or (c.status == "unresolved" and c.expected_unresolved) for c in self.checks)

    def exit_code(self) -> int:
        if any(c.status == "fail" for c in self.checks):
            return 1
        if any(c.status == "unresolved" and c.cap_exceeded for c in self.checks):
            return 3
        if any(c.status == "unresolved" and not c.expected_unresolved for c in self.checks):
            return 1
        return 0

    def as_dict(self, timing: bool = False) -> dict:
        out: dict[str, Any] = {
            "case": self.case_id,
            "engine": self.engine_version,
            "summary": self.summary(),
            "checks": [c.as_dict(timing) for c in self.checks],
        }
        if self.skipped_reason:
            out["skipped_reason"] = self.skipped_reason
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.as_dict(timing), indent=2, ensure_ascii=False)

    def to_text(self, timing: bool = False) -> str:
        lines = [f"case {self.case_id}"]
        if self.skipped_reason:
            lines.append(f"  skipped: {self.skipped_reason}")
        for c in self.checks:
            t = f" ({c.elapsed:.2f}s)" if timing and c.elapsed is not None else ""
            lines.append(f"  [{c.status.upper()}] {c.name} ({c.kind}){t}: {c.detail}")
            if c.witness is not None and c.status != "pass":
                lines.append(f"      witness: {c.witness}")
        s = self.summary()
        lines.append("  " + ", ".join(f"{k} {v}" for k, v in s.items()))
        return "\n".join(lines)


class CheckFailure(Exception):
    """Raised inside an executor to report a failing check with its witness."""

    def __init__(self, detail: str, witness: Any = None):
        super().__init__(detail)
        self.detail = detail
        self.witness = witness


# ---------------------------------------------------------------------------
# context helpers


class Context:
    """Resolves names and specializations for one case under one set of options."""

    def __init__(self, rec: CaseRecord, opts: RunOptions):
        self.rec = rec
        self.opts = opts
        self.overrides = {k: rec.parse(v) for k, v in opts.params.items()}
        for k in self.overrides:
            if k not in {p.name for p in rec.parameters}:
                raise CaseError(f"{rec.id}: --param {k} is not a parameter of this case")

    def parse(self, text: Any) -> MPoly:
        return self.rec.parse(text)

    def values(self, chk: Mapping[str, Any]) -> dict[str, MPoly]:
        """Specialization requested by a check, with command-line overrides applied."""
        spec = chk.get("specialize", {})
        out: dict[str, MPoly] = {}
        if spec == "samples":
            out.update(self.rec.parameter_samples())
        elif isinstance(spec, dict):
            for k, v in spec.items():
                out[k] = self.rec.parameter_samples()[k] if v == "sample" else self.parse(v)
        else:
            raise CaseError(f"{self.rec.id}: bad specialize in {chk.get('name')}")
        for k, v in self.overrides.items():
            if k in out:
                out[k] = v
        torus = chk.get("torus")
        if torus:
            n = self.torus_n(chk)
            out[torus["param"]] = MPoly.const(CycNum.zeta(n))
            if "inverse" in torus:
                out[torus["inverse"]] = MPoly.const(CycNum.zeta(n, n - 1))
        return out

    def torus_n(self, chk: Mapping[str, Any]) -> int:
        torus = chk["torus"]
        return self.opts.torus_n if self.opts.torus_n is not None else int(torus["n"])

    def cubic(self, chk: Mapping[str, Any]) -> MPoly:
        return self.rec.cubic.substitute(self.values(chk))

    def coords(self, chk: Mapping[str, Any]) -> tuple[str, ...]:
        return tuple(chk.get("coordinates", self.rec.coordinates))

    def equations(self, chk: Mapping[str, Any], key: str = "equations") -> list[MPoly]:
        vals = self.values(chk)
        if key in chk:
            return [self.parse(e).substitute(vals) for e in chk[key]]
        return [self.rec.cubic.substitute(vals)]

    def action(self, label: str, chk: Mapping[str, Any]) -> LinearAction:
        act = self.rec.generator(label).action
        vals = self.values(chk)
        return act.specialize(vals) if vals else act

    def multiplier(self, label: str, chk: Mapping[str, Any]) -> MPoly | None:
        m = self.rec.generator(label).multiplier
        return m.substitute(self.values(chk)) if m is not None else None

    def curve(self, label: str, chk: Mapping[str, Any]) -> CurveParam:
        c = self.rec.curve(label)
        vals = self.values(chk)
        if not vals:
            return c
        return CurveParam(tuple(x.substitute(vals) for x in c.components), c.params, c.label)

    def point(self, coords: Sequence[Any], chk: Mapping[str, Any]) -> tuple[MPoly, ...]:
        vals = self.values(chk)
        return tuple(self.parse(c).substitute(vals) for c in coords)

    def resolve_map(self, ref: Any, chk: Mapping[str, Any]) -> RationalMap:
        vals = self.values(chk)
        if isinstance(ref, str):
            m = self.rec.case_map(ref).map
        elif isinstance(ref, dict) and "compose" in ref:
            parts = [self.resolve_map(r, {}) for r in ref["compose"]]
            m = parts[0]
            for nxt in parts[1:]:
                m = m.then(nxt)
        else:
            raise CaseError(f"{self.rec.id}: bad map reference {ref!r}")
        if vals:
            m = RationalMap(tuple(c.substitute(vals) for c in m.components), m.source, m.label)
        return m

    def map_target(self, ref: Any) -> tuple[str, ...]:
        if isinstance(ref, str):
            return self.rec.case_map(ref).target
        return self.map_target(ref["compose"][-1])

    def modulo(self, chk: Mapping[str, Any]) -> list[MPoly]:
        mod = chk.get("modulo", "cubic")
        vals = self.values(chk)
        if mod is None:
            return []
        if mod == "cubic":
            return [self.rec.cubic.substitute(vals)]
        return [self.parse(m).substitute(vals) for m in mod]

    def labels(self, chk: Mapping[str, Any]) -> list[str]:
        if "generators" in chk:
            return list(chk["generators"])
        if "generator" in chk:
            return [chk["generator"]]
        n = len(self.rec.coordinates)
        return [k for k, g in self.rec.generators.items() if g.action.dim == n and g.source.get("acts_on", "ambient") == "ambient"]


def _count(n: int, noun: str) -> str:
    return f"{n} {noun}" if n == 1 else f"{n} {noun}s"


def _expect(chk: Mapping[str, Any], default: Any = True) -> Any:
    return chk.get("expect", default)


# ---------------------------------------------------------------------------
# executors; each returns a detail string or raises CheckFailure


def _multiplier_text(lam: MPoly, base: MPoly | None) -> str:
    if base is not None:
        k = pure_power_exponent(lam, base)
        if k is not None:
            shown = f"({base})" if len(base) > 1 else str(base)
            return f"{shown}^{k}" if k != 1 else str(base)
    return str(lam)


def pure_power_exponent(lam: MPoly, base: MPoly, limit: int = 24) -> int | None:
    """k with lam == base^k, if any (0 <= k <= limit)."""
    power = MPoly.const(1)
    target_deg = lam.total_degree()
    for k in range(limit + 1):
        if power == lam:
            return k
        if power.total_degree() > target_deg:
            return None
        power = power * base
    return None


def run_invariance(ctx: Context, chk: Mapping[str, Any]) -> str:
    f = ctx.cubic(chk)
    coords = ctx.coords(chk)
    done = []
    for label in ctx.labels(chk):
        g = ctx.action(label, chk)
        rels = g.relation_set()
        lam, residual = find_multiplier(f, g, None, rels, coords)
        if lam is None:
            raise CheckFailure(f"{label} does not preserve the cubic", residual)
        if reduce_mod(lam - 1, rels):
            raise CheckFailure(f"{label} scales the cubic by {lam}", lam - 1)
        done.append(label)
    return "strictly invariant under " + ", ".join(done)


def run_semi_invariance(ctx: Context, chk: Mapping[str, Any]) -> str:
    f = ctx.cubic(chk)
    coords = ctx.coords(chk)
    base = ctx.parse(chk["power_of"]) if "power_of" in chk else None
    parts = []
    for label in ctx.labels(chk):
        g = ctx.action(label, chk)
        rels = g.relation_set()
        lam, residual = find_multiplier(f, g, None, rels, coords)
        if lam is None:
            raise CheckFailure(f"{label} does not preserve the cubic up to a scalar", residual)
        expected = ctx.parse(chk["multiplier"]).substitute(ctx.values(chk)) if "multiplier" in chk else ctx.multiplier(label, chk)
        if expected is not None and reduce_mod(lam - expected, rels):
            raise CheckFailure(f"{label}: multiplier {lam}, expected {expected}", reduce_mod(lam - expected, rels))
        if base is not None and pure_power_exponent(lam, base) is None:
            raise CheckFailure(f"{label}: multiplier {lam} is not a power of {base}", lam)
        parts.append(f"{label}: lambda = {_multiplier_text(lam, base)}")
    return "; ".join(parts)


def run_singular_along(ctx: Context, chk: Mapping[str, Any]) -> str:
    C = ctx.curve(chk["curve"], chk)
    eqs = ctx.equations(chk)
    r = singular_along_residual(eqs, C, ctx.coords(chk))
    want = _expect(chk)
    if (r is None) != want:
        raise CheckFailure(
            f"singular along {chk['curve']} is {r is None}, expected {want}",
            r if r is not None else "all Jacobian minors vanish",
        )
    return f"{'singular' if r is None else 'not singular'} along {chk['curve']}" + (f" (witness {r})" if r is not None else "")


def run_curve_containment(ctx: Context, chk: Mapping[str, Any]) -> str:
    C = ctx.curve(chk["curve"], chk)
    coords = ctx.coords(chk)
    residual = None
    for f in ctx.equations(chk):
        r = C.pullback(f, coords)
        if r:
            residual = r
            break
    want = _expect(chk)
    if (residual is None) != want:
        raise CheckFailure(f"containment of {chk['curve']} is {residual is None}, expected {want}", residual or "0")
    return f"{chk['curve']} {'lies' if residual is None else 'does not lie'} on the variety"


def _block_actions(ctx: Context, chk: Mapping[str, Any]) -> list[LinearAction]:
    acts = [ctx.action(label, chk) for label in ctx.labels(chk)]
    if "block" in chk:
        coords = ctx.coords(chk)
        idx = [coords.index(v) if isinstance(v, str) else int(v) for v in chk["block"]]
        acts = [restrict(a, idx) for a in acts]
    return acts


def run_orbit(ctx: Context, chk: Mapping[str, Any]) -> str:
    acts = _block_actions(ctx, chk)
    P = ctx.point(chk["point"], chk)
    orb = orbit(acts, P)
    G = close(acts, cap=int(chk.get("cap", 1000)))
    stab = stabilizer_order(G, P)
    found = {tuple(c.constant_value() for c in p) for p in orb}
    if "expected" in chk:
        exp = {tuple(c.constant_value() for c in canonical_point(ctx.point(q, chk))) for q in chk["expected"]}
        if exp != found:
            missing = sorted(format_point(canonical_point(ctx.point(q, chk))) for q in chk["expected"] if tuple(c.constant_value() for c in canonical_point(ctx.point(q, chk))) not in found)
            extra = sorted(format_point(p) for p in orb if tuple(c.constant_value() for c in p) not in exp)
            raise CheckFailure("orbit differs from the expected points", f"missing {missing}, extra {extra}")
    if "size" in chk and len(orb) != int(chk["size"]):
        raise CheckFailure(f"orbit has {len(orb)} points, expected {chk['size']}", [format_point(p) for p in orb])
    if len(orb) * stab != G.order:
        raise CheckFailure(f"orbit-stabilizer fails: {len(orb)} * {stab} != {G.order}", f"{len(orb)}*{stab}")
    pts = ", ".join(format_point(p) for p in orb)
    return f"orbit of size {len(orb)}: {pts}; |orbit| * |stabilizer| = {len(orb)} * {stab} = |G| = {G.order}"


def run_fixed_point(ctx: Context, chk: Mapping[str, Any]) -> str:
    P = ctx.point(chk["point"], chk)
    eqs = ctx.equations(chk)
    coords = ctx.coords(chk)
    expect = chk.get("expect", {"fixed": True, "on_variety": True, "smooth": True})
    labels = list(chk.get("generators", [chk["generator"]] if "generator" in chk else []))
    parts = []
    if not labels:
        ident = LinearAction.identity(len(coords), coords)
        rep = fixed_points_check(ident, P, eqs, coords)
        got = {"on_variety": rep.on_variety, "smooth": rep.smooth}
        for k, v in got.items():
            if k in expect and expect[k] != v:
                assign = dict(zip(coords, P))
                raise CheckFailure(f"{k} is {v} at {format_point(P)}, expected {expect[k]}", eqs[0].substitute(assign))
        return f"{format_point(P)}: " + ", ".join(f"{k}={v}" for k, v in got.items())
    for label in labels:
        g = ctx.action(label, chk)
        rep = fixed_points_check(g, P, eqs, coords)
        got = {"fixed": rep.fixed, "on_variety": rep.on_variety, "smooth": rep.smooth}
        for k, v in got.items():
            if k in expect and expect[k] != v:
                if k == "fixed":
                    wit = rep.witness if rep.witness is not None else "P*g proportional to P"
                else:
                    wit = eqs[0].substitute(dict(zip(coords, P)))
                raise CheckFailure(f"{label}: {k} is {v} at {format_point(P)}, expected {expect[k]}", wit)
        parts.append(f"{label}: " + ", ".join(f"{k}={got[k]}" for k in expect if k in got))
    return f"{format_point(P)}; " + "; ".join(parts)


def _param_point(p: Sequence[Any], ctx: Context) -> tuple[CycNum, CycNum]:
    u, v = (ctx.parse(x).constant_value() for x in p)
    return (u, v)


def _same_param(p: tuple[CycNum, CycNum], q: tuple[CycNum, CycNum]) -> bool:
    return (p[0] * q[1] - p[1] * q[0]).is_zero()


def _fmt_param(p: tuple[CycNum, CycNum]) -> str:
    return f"({p[0]}:{p[1]})"


def run_no_common_fixed_point(ctx: Context, chk: Mapping[str, Any]) -> str:
    C = ctx.curve(chk["curve"], chk)
    labels = ctx.labels(chk)
    acts = [ctx.action(label, chk) for label in labels]
    conductor = ctx.rec.max_conductor
    parts = []
    for label, pts in chk.get("fixed_parameters", {}).items():
        g = ctx.action(label, chk)
        got = fixed_parameters(g, C, conductor)
        want = [_param_point(p, ctx) for p in pts]
        if got is None or len(got) != len(want) or not all(any(_same_param(a, b) for b in got) for a in want):
            shown = "outside the field" if got is None else ", ".join(_fmt_param(p) for p in got)
            raise CheckFailure(f"{label} fixes {shown} on {chk['curve']}", shown)
        parts.append(f"{label} fixes exactly " + ", ".join(_fmt_param(p) for p in got))
    for label, (p, q) in chk.get("swaps", {}).items():
        m = induced_param_action(ctx.action(label, chk), C)
        p, q = _param_point(p, ctx), _param_point(q, ctx)
        img_p = tuple(x.constant_value() if x else CycNum.rational(0) for x in m.apply(tuple(MPoly.const(c) for c in p)))
        img_q = tuple(x.constant_value() if x else CycNum.rational(0) for x in m.apply(tuple(MPoly.const(c) for c in q)))
        if not (_same_param(img_p, q) and _same_param(img_q, p)):
            raise CheckFailure(f"{label} does not swap {_fmt_param(p)} and {_fmt_param(q)}", str(m))
        parts.append(f"{label} swaps {_fmt_param(p)} and {_fmt_param(q)}")
    res = common_fixed_point_on_curve(acts, C, conductor)
    want = _expect(chk, "none")
    if want == "none":
        if res.status != "none":
            where = _fmt_param(res.point) if res.point else str(res.form)
            raise CheckFailure(f"common fixed point found ({res.status})", where)
        parts.append("no common fixed point; certificate " + " and ".join(res.certificate))
    else:
        if res.status == "none":
            raise CheckFailure("no common fixed point, expected one", ", ".join(res.certificate))
        parts.append(f"common fixed point {_fmt_param(res.point) if res.point else res.form}")
    return "; ".join(parts)


def run_map_identity(ctx: Context, chk: Mapping[str, Any]) -> str:
    if "indeterminate_at" in chk:
        m = ctx.resolve_map(chk["map"], chk)
        P = ctx.point(chk["indeterminate_at"], chk)
        try:
            img = map_apply(m, P)
        except IndeterminacyError:
            return f"{m.label} is undefined at {format_point(P)}"
        raise CheckFailure(f"{m.label} is defined at {format_point(P)}", format_point(img))
    left = ctx.resolve_map(chk["left"], chk)
    right = ctx.resolve_map(chk["right"], chk)
    r = map_cross_residual(left, right, ctx.modulo(chk))
    want = _expect(chk)
    if (r is None) != want:
        raise CheckFailure(f"maps agree: {r is None}, expected {want}", r if r is not None else "all cross products vanish")
    mod = "modulo the cubic" if chk.get("modulo", "cubic") == "cubic" else "identically" if chk.get("modulo", "cubic") is None else "modulo the given equations"
    return f"{left.label} and {right.label} {'agree' if r is None else 'differ'} {mod}"


def run_map_image_in(ctx: Context, chk: Mapping[str, Any]) -> str:
    m = ctx.resolve_map(chk["map"], chk)
    target = tuple(chk.get("target", ctx.map_target(chk["map"])))
    mods = ctx.modulo(chk)
    rels = RelationSet(tuple(mods))
    moved = [(None, m)] + [(label, m.postcompose(ctx.action(label, chk))) for label in chk.get("generators", [])]
    for label, image in moved:
        for text in chk["equations"]:
            eq = ctx.parse(text).substitute(ctx.values(chk))
            r = reduce_mod(image.pullback(eq, target), rels)
            if r:
                via = f" after {label}" if label else ""
                raise CheckFailure(f"{text} does not vanish on the image of {m.label}{via}", r)
    where = "modulo the cubic" if mods else "identically"
    also = f", also after each of {', '.join(chk['generators'])}" if chk.get("generators") else ""
    return f"all {_count(len(chk['equations']), 'equation')} pull back to 0 {where} under {m.label}{also}"


def run_map_equivariance(ctx: Context, chk: Mapping[str, Any]) -> str:
    m = ctx.resolve_map(chk["map"], chk)
    g = ctx.action(chk["generator"], chk)
    mods = ctx.modulo(chk)
    moved = m.precompose(g)
    if "target_action" in chk:
        h = ctx.action(chk["target_action"], chk)
        expected = m.postcompose(h)
        rels = list(mods) + list(g.relations) + [r for r in h.relations if r not in g.relations]
        r = map_cross_residual(moved, expected, rels)
        if r is not None:
            raise CheckFailure(f"{m.label} o {g.label} is not {h.label} o {m.label}", r)
        return f"{m.label} o {g.label} = {h.label} o {m.label}"
    try:
        h = transport_action(m, g, mods)
    except TransportError as exc:
        raise CheckFailure(str(exc), "empty solution space") from exc
    return f"{m.label} o {g.label} = h o {m.label} with h = {h}"


def run_line_in_fibers(ctx: Context, chk: Mapping[str, Any]) -> str:
    P = ctx.point(chk["P"], chk)
    Q = ctx.point(chk["Q"], chk)
    f = ctx.cubic(chk)
    rels = [ctx.parse(c).substitute(ctx.values(chk)) for c in chk.get("constraints", [])]
    r = line_residual(P, Q, f, ctx.coords(chk), rels)
    want = _expect(chk)
    if (r is None) != want:
        raise CheckFailure(f"line in X: {r is None}, expected {want}", r if r is not None else "f(sP+tQ) vanishes")
    if r is None:
        return f"the line through {format_point(P)} and {format_point(Q)} lies in X"
    return f"the line through {format_point(P)} and {format_point(Q)} leaves X (coefficient {r})"


def _evaluate_count(expr: Any, n: int | None, ctx: Context) -> int:
    if isinstance(expr, int):
        return expr
    value = parse(expr, ["n"]).substitute({"n": n} if n is not None else {})
    return int(value.constant_value().to_fraction())


def run_group_structure(ctx: Context, chk: Mapping[str, Any]) -> str:
    acts = _block_actions(ctx, chk)
    G = close(acts, cap=int(chk.get("cap", 1000)))
    fp = G.fingerprint()
    name = recognize(fp)
    n = ctx.torus_n(chk) if "torus" in chk else None
    if "order" in chk:
        want_order = _evaluate_count(chk["order"], n, ctx)
        if G.order != want_order:
            raise CheckFailure(f"group has order {G.order}, expected {want_order}", json.dumps(fp.as_dict(), sort_keys=True))
    if "group" in chk:
        want = normalize_group_name(chk["group"].format(n=n))
        if name != want:
            raise CheckFailure(f"group recognized as {name}, expected {want}", json.dumps(fp.as_dict(), sort_keys=True))
    if "abelian" in chk and fp.abelian != chk["abelian"]:
        raise CheckFailure(f"abelian is {fp.abelian}", json.dumps(fp.as_dict(), sort_keys=True))
    hist = ", ".join(f"{k}:{v}" for k, v in fp.histogram)
    torus = f" at {chk['torus']['param']} = zeta({n})" if n is not None else ""
    return f"order {G.order}, {name}{torus}; element orders {{{hist}}}, center {fp.center_order}, derived {fp.derived_order}"


def _shape(ctx: Context, chk: Mapping[str, Any]) -> MatrixShape:
    rows = [[ctx.parse(e) for e in row] for row in chk["shape"]]
    return MatrixShape(tuple(tuple(r) for r in rows), tuple(chk["unknowns"]))


def _system(ctx: Context, chk: Mapping[str, Any]) -> tuple[PolySystem, MatrixShape, MPoly]:
    shape = _shape(ctx, chk)
    mult = ctx.parse(chk.get("multiplier", "1"))
    f = ctx.cubic(chk)
    witnesses = []
    for w in chk.get("localize", []):
        witnesses.append(shape.determinant() if w == "det" else ctx.parse(w))
    return invariance_system(f, shape, mult, ctx.coords(chk), witnesses), shape, mult


def family_from_generator(shape: MatrixShape, mult: MPoly, g: LinearAction, lam: MPoly | None) -> dict[str, MPoly]:
    """Read the unknowns of a shape off a concrete generator matrix."""
    assign: dict[str, MPoly] = {}
    rels = g.relation_set()

    def bind(pattern: MPoly, value: MPoly, where: str) -> None:
        if pattern.is_constant():
            if reduce_mod(pattern - value, rels):
                raise CheckFailure(f"{g.label} does not fit the shape at {where}", value - pattern)
            return
        if len(pattern.vars) == 1 and len(pattern) == 1 and pattern.total_degree() == 1:
            ((mono, c),) = pattern.items()
            (name,) = mono
            val = value.scale(c.inverse())
            if name in assign and reduce_mod(assign[name] - val, rels):
                raise CheckFailure(f"{g.label} gives {name} two values", assign[name] - val)
            assign[name] = val
            return
        raise CheckFailure(f"shape entry {pattern} is not a constant or a scaled unknown", pattern)

    for i, row in enumerate(shape.rows):
        for j, pattern in enumerate(row):
            bind(pattern, g.rows[i][j], f"({i + 1},{j + 1})")
    if not mult.is_constant():
        if lam is None:
            raise CheckFailure(f"{g.label} has no declared multiplier", str(mult))
        bind(mult, lam, "multiplier")
    return assign


def run_stabilizer_system(ctx: Context, chk: Mapping[str, Any]) -> str:
    system, shape, mult = _system(ctx, chk)
    parts = [f"{_count(len(system.equations), 'equation')} in {_count(len(system.unknowns), 'unknown')}"]
    for label in chk.get("members", []):
        g = ctx.action(label, chk)
        lam = ctx.multiplier(label, chk)
        family = family_from_generator(shape, mult, g, lam)
        ok, residuals = verify_solution_family(system, family, g.relations)
        if not ok:
            raise CheckFailure(f"{label} does not satisfy the system", residuals[0])
        parts.append(f"{label} satisfies it")
    for fam in chk.get("families", []):
        assign = {k: ctx.parse(v) for k, v in fam["assign"].items()}
        rels = [ctx.parse(r) for r in fam.get("relations", [])]
        ok, residuals = verify_solution_family(system, assign, rels)
        if not ok:
            raise CheckFailure(f"family {fam['label']} does not satisfy the system", residuals[0])
        parts.append(f"family {fam['label']} satisfies it")
    return "; ".join(parts)


def run_dimension(ctx: Context, chk: Mapping[str, Any]) -> str:
    base = chk
    if "system" in chk:
        ref = [c for c in ctx.rec.checks if c["name"] == chk["system"]]
        if not ref:
            raise CaseError(f"{ctx.rec.id}: dimension check refers to unknown system {chk['system']}")
        base = {**ref[0], **{k: v for k, v in chk.items() if k not in ("name", "kind", "system")}}
    system, _, _ = _system(ctx, base)
    gb = buchberger(system)
    dim = staircase_dimension(gb)
    want = int(chk["dimension"])
    if dim != want:
        raise CheckFailure(f"staircase dimension {dim}, expected {want}", str(gb))
    detail = f"staircase dimension {dim} ({_count(len(gb.polys), 'basis element')})"
    if dim == 0:
        count = standard_monomial_count(gb)
        detail += f", {count} solution{'s' if count != 1 else ''} counted with multiplicity"
        if "solutions" in chk:
            expected = int(chk["solutions"])
            if count < expected:
                raise CheckFailure(f"{count} solutions, expected {expected}", str(gb))
            if count > expected:
                raise _Unresolved(f"{count - expected} unresolved branches beyond the {expected} claimed solutions", str(gb))
    return detail


def run_smooth_plane_cubic(ctx: Context, chk: Mapping[str, Any]) -> str:
    vals = dict(ctx.values(chk))
    if "equation" in chk:
        f = ctx.parse(chk["equation"]).substitute(vals)
    else:
        f = ctx.rec.cubic.substitute(vals).substitute({k: ctx.parse(v) for k, v in chk.get("restrict", {}).items()})
    coords = tuple(chk["coordinates"])
    if not f or not f.is_homogeneous(coords) or f.degree_in(coords) != 3 or len(coords) != 3:
        raise CheckFailure("not a plane cubic", f)
    stray = set(f.vars) - set(coords)
    if stray:
        raise CheckFailure(f"plane cubic still has parameters {sorted(stray)}", f)
    partials = [f.derivative(v) for v in coords]
    gb = buchberger(PolySystem(coords, tuple(partials)))
    dim = staircase_dimension(gb)
    if dim != 0:
        raise CheckFailure(f"Jacobian ideal has dimension {dim}: the cubic is singular", str(gb))
    return f"{f} = 0 is smooth: its Jacobian ideal is zero-dimensional"


class _Unresolved(Exception):
    def __init__(self, detail: str, witness: Any = None):
        super().__init__(detail)
        self.detail = detail
        self.witness = witness


EXECUTORS: dict[str, Callable[[Context, Mapping[str, Any]], str]] = {
    "invariance": run_invariance,
    "semi-invariance": run_semi_invariance,
    "singular-along": run_singular_along,
    "curve-containment": run_curve_containment,
    "orbit": run_orbit,
    "fixed-point": run_fixed_point,
    "no-common-fixed-point": run_no_common_fixed_point,
    "map-identity": run_map_identity,
    "map-image-in": run_map_image_in,
    "map-equivariance": run_map_equivariance,
    "line-in-fibers": run_line_in_fibers,
    "group-structure": run_group_structure,
    "stabilizer-system": run_stabilizer_system,
    "dimension": run_dimension,
    "smooth-plane-cubic": run_smooth_plane_cubic,
}


def _witness_text(w: Any) -> str:
    if isinstance(w, (list, tuple)):
        return "; ".join(str(x) for x in w)
    return str(w)


def run_check(ctx: Context, chk: Mapping[str, Any]) -> CheckResult:
    name, kind = chk["name"], chk["kind"]
    start = time.perf_counter()
    result = CheckResult(name, kind, "pass", expected_unresolved=bool(chk.get("expect_unresolved", False)))
    try:
        result.detail = EXECUTORS[kind](ctx, chk)
    except CheckFailure as exc:
        result.status, result.detail, result.witness = "fail", exc.detail, _witness_text(exc.witness)
    except _Unresolved as exc:
        result.status, result.detail, result.witness = "unresolved", exc.detail, _witness_text(exc.witness)
    except (ResourceCapError, GroupCapError) as exc:
        result.status, result.detail, result.cap_exceeded = "unresolved", f"resource cap: {exc}", True
        result.witness = str(exc)
    except IndeterminacyError as exc:
        result.status, result.detail, result.witness = "fail", str(exc), format_point(exc.point)
    except CaseError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        result.status, result.detail, result.witness = "fail", f"error: {exc}", str(exc)
    result.elapsed = time.perf_counter() - start
    return result


def run_case(rec: CaseRecord, opts: RunOptions | None = None) -> VerificationReport:
    """Execute every selected check in declared order; failures never abort the run."""
    opts = opts or RunOptions()
    if opts.conductor is not None and opts.conductor < rec.max_conductor:
        reason = f"conductor {opts.conductor} is below the required {rec.max_conductor}"
        skipped = [CheckResult(c["name"], c["kind"], "skipped", reason) for c in rec.checks if not opts.kinds or c["kind"] in opts.kinds]
        return VerificationReport(rec.id, skipped, skipped_reason=reason)
    ctx = Context(rec, opts)
    results = []
    for chk in rec.checks:
        if opts.kinds and chk["kind"] not in opts.kinds:
            continue
        res = run_check(ctx, chk)
        results.append(res)
        if opts.fail_fast and res.status == "fail":
            break
    return VerificationReport(rec.id, results)


def run_all(opts: RunOptions | None = None, ids: Iterable[str] | None = None) -> list[VerificationReport]:
    opts = opts or RunOptions()
    reports = []
    for case_id in ids or builtin_ids():
        rec = load(case_id)
        case_opts = opts
        if opts.params:
            names = {p.name for p in rec.parameters}
            case_opts = replace(opts, params={k: v for k, v in opts.params.items() if k in names})
        reports.append(run_case(rec, case_opts))
    return reports


def aggregate_exit_code(reports: Sequence[VerificationReport]) -> int:
    codes = [r.exit_code() for r in reports]
    if 1 in codes:
        return 1
    if 3 in codes:
        return 3
    return 0
