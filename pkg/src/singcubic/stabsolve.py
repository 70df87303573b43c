"""Stabilizer systems and a small Buchberger engine.

A :class:`MatrixShape` is a matrix whose entries are constants, unknowns, or
small polynomials in them.  :func:`invariance_system` turns "this shape
preserves the cubic up to a multiplier" into coefficient equations, which
:func:`buchberger` analyses.  Nonvanishing witnesses such as a determinant
are imposed by localization: a fresh unknown ``w`` with ``w * witness - 1``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .cyclo import ZERO, CycNum
from .mpoly import (
    MonomialOrder,
    MPoly,
    RelationSet,
    _remap,
    linear_change,
    reduce_mod,
)

MAX_DEGREE = 12
MAX_BASIS = 500


class ResourceCapError(RuntimeError):
    """A Groebner computation exceeded the degree or basis-size cap."""


@dataclass(frozen=True)
class MatrixShape:
    """A square matrix pattern; entries are polynomials in the declared unknowns."""

    rows: tuple[tuple[MPoly, ...], ...]
    unknowns: tuple[str, ...]

    def __post_init__(self):
        rows = tuple(tuple(MPoly.coerce(e) for e in r) for r in self.rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("a matrix shape must be square and nonempty")
        if not self.unknowns:
            raise ValueError("a matrix shape needs at least one unknown")
        if len(set(self.unknowns)) != len(self.unknowns):
            raise ValueError("unknown names must be unique")
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def determinant(self) -> MPoly:
        return determinant(self.rows)


def determinant(rows: Sequence[Sequence[MPoly]]) -> MPoly:
    """Determinant by Laplace expansion along sparse rows (sizes here are at most 6)."""
    rows = [[MPoly.coerce(e) for e in r] for r in rows]

    def det(sub: list[list[MPoly]], cols: tuple[int, ...]) -> MPoly:
        if not sub:
            return MPoly.const(1)
        first, rest = sub[0], sub[1:]
        total = MPoly.zero()
        for k, c in enumerate(cols):
            entry = first[c]
            if not entry:
                continue
            minor = det(rest, cols[:k] + cols[k + 1 :])
            term = entry * minor
            total = total + term if k % 2 == 0 else total - term
        return total

    return det(rows, tuple(range(len(rows))))


@dataclass(frozen=True)
class PolySystem:
    """Equations in ``unknowns``; ``witnesses`` are asserted nonzero, ``relations`` hold identically."""

    unknowns: tuple[str, ...]
    equations: tuple[MPoly, ...]
    witnesses: tuple[MPoly, ...] = ()
    relations: tuple[MPoly, ...] = ()

    def __post_init__(self):
        eqs = tuple(e for e in (MPoly.coerce(q) for q in self.equations) if e)
        object.__setattr__(self, "equations", eqs)

    def localized(self) -> tuple[tuple[MPoly, ...], tuple[str, ...]]:
        """Equations with one localization unknown per witness, and the extended unknown list."""
        eqs = list(self.equations) + list(self.relations)
        names = list(self.unknowns)
        for i, wit in enumerate(self.witnesses, 1):
            w = f"w_loc{i}"
            names.append(w)
            eqs.append(MPoly.var(w) * wit - 1)
        return tuple(eqs), tuple(names)


def invariance_system(
    f: MPoly,
    shape: MatrixShape,
    multiplier: MPoly | str | int = 1,
    coords: Sequence[str] = (),
    witnesses: Iterable[MPoly] = (),
    relations: Iterable[MPoly] = (),
) -> PolySystem:
    """Coefficients of f(x*shape) - multiplier*f in the coordinates, as equations."""
    mult = MPoly.coerce(multiplier)
    unknowns = list(shape.unknowns)
    for v in mult.vars:
        if v not in unknowns:
            unknowns.append(v)
    g = linear_change(f, shape.rows, tuple(coords)) - mult * f
    eqs = [c for _, c in sorted(g.coefficients_in(tuple(coords)).items(), reverse=True)]
    return PolySystem(tuple(unknowns), tuple(eqs), tuple(witnesses), tuple(relations))


# ---------------------------------------------------------------------------
# Buchberger


@dataclass(frozen=True)
class GroebnerBasis:
    order: MonomialOrder
    variables: tuple[str, ...]
    polys: tuple[MPoly, ...]
    reduced: bool = True
    leading: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    def is_unit(self) -> bool:
        return any(p.is_constant() for p in self.polys)

    def reduce(self, f: MPoly) -> MPoly:
        if not self.polys:
            return f
        return reduce_mod(f, RelationSet(self.polys, self.order))

    def contains(self, f: MPoly) -> bool:
        return not self.reduce(MPoly.coerce(f))

    def leading_monomials(self) -> list[dict[str, int]]:
        return [{v: k for v, k in zip(self.variables, e) if k} for e in self.leading]

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.polys) + "}"


class _Engine:
    """Dense-exponent Buchberger over a fixed variable tuple."""

    def __init__(self, variables: tuple[str, ...], order: MonomialOrder):
        self.vars = variables
        self.key = order.key_function(variables)

    def lm(self, p: dict) -> tuple[int, ...]:
        return max(p, key=self.key)

    def monic(self, p: dict) -> dict:
        inv = p[self.lm(p)].inverse()
        if inv.is_one():
            return p
        return {e: c * inv for e, c in p.items()}

    def reduce(self, p: dict, basis: list[tuple[dict, tuple]], full: bool = True) -> dict:
        p = dict(p)
        rem: dict = {}
        key = self.key
        while p:
            m = max(p, key=key)
            c = p[m]
            for g, glm in basis:
                if all(a >= b for a, b in zip(m, glm)):
                    shift = tuple(a - b for a, b in zip(m, glm))
                    for e, gc in g.items():
                        ne = tuple(a + b for a, b in zip(e, shift))
                        v = p.get(ne, ZERO) - c * gc
                        if v.is_zero():
                            p.pop(ne, None)
                        else:
                            p[ne] = v
                    break
            else:
                if not full:
                    rem.update(p)
                    return rem
                rem[m] = c
                del p[m]
        return rem

    def spoly(self, f: tuple[dict, tuple], g: tuple[dict, tuple]) -> dict:
        (fp, flm), (gp, glm) = f, g
        lcm = tuple(max(a, b) for a, b in zip(flm, glm))
        out: dict = {}
        for poly, lm, sign in ((fp, flm, 1), (gp, glm, -1)):
            shift = tuple(a - b for a, b in zip(lcm, lm))
            for e, c in poly.items():
                ne = tuple(a + b for a, b in zip(e, shift))
                v = out.get(ne, ZERO) + (c if sign > 0 else -c)
                if v.is_zero():
                    out.pop(ne, None)
                else:
                    out[ne] = v
        return out


def _divides(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def buchberger(
    system: PolySystem | Sequence[MPoly],
    order: MonomialOrder | None = None,
    *,
    localize: bool = True,
    max_degree: int = MAX_DEGREE,
    max_basis: int = MAX_BASIS,
) -> GroebnerBasis:
    """Reduced Groebner basis of the system's ideal (localized at its witnesses)."""
    if isinstance(system, PolySystem):
        if localize:
            eqs, unknowns = system.localized()
        else:
            eqs, unknowns = system.equations + system.relations, system.unknowns
    else:
        eqs = tuple(MPoly.coerce(e) for e in system)
        unknowns = ()
    eqs = tuple(e for e in eqs if e)
    names = set(unknowns)
    for e in eqs:
        names |= set(e.vars)
    ranking = tuple(v for v in unknowns if v in names)
    order = order or MonomialOrder("grevlex", ranking)
    if not order.ranking and ranking:
        order = MonomialOrder(order.kind, ranking, order.roles)
    variables = order.variables(names)
    eng = _Engine(variables, order)

    for e in eqs:
        if e.total_degree() > max_degree:
            raise ResourceCapError(f"input degree {e.total_degree()} exceeds cap {max_degree}")

    basis: list[tuple[dict, tuple]] = []
    active: list[int] = []
    live: dict[tuple[int, int], tuple[int, ...]] = {}
    heap: list = []
    zero = tuple(0 for _ in variables)

    def add(p: dict) -> None:
        """Insert a reduced monic polynomial, updating pairs by the Gebauer-Moller rules."""
        h = len(basis)
        hlm = eng.lm(p)
        basis.append((p, hlm))
        if len(basis) > max_basis:
            raise ResourceCapError(f"basis size exceeds cap {max_basis}")
        for (g1, g2), l12 in list(live.items()):
            if (
                _divides(hlm, l12)
                and _lcm(basis[g1][1], hlm) != l12
                and _lcm(basis[g2][1], hlm) != l12
            ):
                del live[(g1, g2)]
        classes: dict[tuple[int, ...], list[tuple[int, bool]]] = {}
        for g in active:
            glm = basis[g][1]
            classes.setdefault(_lcm(glm, hlm), []).append((g, _coprime(glm, hlm)))
        lcms = list(classes)
        for l in lcms:
            if any(m != l and _divides(m, l) for m in lcms):
                continue
            group = classes[l]
            if any(cp for _, cp in group):
                continue
            g = group[0][0]
            live[(g, h)] = l
            heapq.heappush(heap, (eng.key(l), g, h))
        active[:] = [g for g in active if not _divides(hlm, basis[g][1])] + [h]

    for e in eqs:
        p = eng.reduce(_remap(e.terms, e.vars, variables), [basis[g] for g in active])
        if p:
            p = eng.monic(p)
            if eng.lm(p) == zero:
                return GroebnerBasis(order, variables, (MPoly.const(1),), True, (zero,))
            add(p)
    if not basis:
        return GroebnerBasis(order, variables, (), True, ())

    while heap:
        _, i, j = heapq.heappop(heap)
        if live.pop((i, j), None) is None:
            continue
        s = eng.spoly(basis[i], basis[j])
        if not s:
            continue
        r = eng.reduce(s, [basis[g] for g in active])
        if not r:
            continue
        r = eng.monic(r)
        if eng.lm(r) == zero:
            return GroebnerBasis(order, variables, (MPoly.const(1),), True, (zero,))
        top = max(sum(e) for e in r)
        if top > max_degree:
            raise ResourceCapError(f"basis element of degree {top} exceeds cap {max_degree}")
        add(r)

    # the active set is minimal; inter-reduce it
    keep = [basis[g] for g in active]
    reduced: list[tuple[dict, tuple]] = []
    for idx, (p, lm) in enumerate(keep):
        others = [b for k, b in enumerate(keep) if k != idx]
        r = eng.monic(eng.reduce(p, others))
        reduced.append((r, eng.lm(r)))
    reduced.sort(key=lambda b: eng.key(b[1]))
    # self-check: every S-polynomial reduces to zero
    for a, b in combinations(reduced, 2):
        if all(x == 0 or y == 0 for x, y in zip(a[1], b[1])):
            continue
        if eng.reduce(eng.spoly(a, b), reduced):
            raise AssertionError("Buchberger self-check failed: nonzero S-polynomial remainder")
    polys = tuple(MPoly(variables, p) for p, _ in reduced)
    return GroebnerBasis(order, variables, polys, True, tuple(lm for _, lm in reduced))


def staircase_dimension(gb: GroebnerBasis, variables: Sequence[str] | None = None) -> int:
    """Krull dimension of k[vars]/I from the leading monomials; -1 for the unit ideal."""
    if gb.is_unit():
        return -1
    vs = tuple(variables) if variables is not None else gb.variables
    index = {v: i for i, v in enumerate(gb.variables)}
    supports = []
    for lm in gb.leading:
        supports.append(frozenset(gb.variables[i] for i, k in enumerate(lm) if k))
    best = 0

    def search(pos: int, chosen: frozenset[str]) -> None:
        nonlocal best
        if len(chosen) + (len(vs) - pos) <= best:
            return
        if pos == len(vs):
            best = max(best, len(chosen))
            return
        bigger = chosen | {vs[pos]}
        if not any(s <= bigger for s in supports):
            search(pos + 1, bigger)
        search(pos + 1, chosen)

    del index
    search(0, frozenset())
    return best


def standard_monomial_count(gb: GroebnerBasis, limit: int = 100000) -> int | None:
    """Number of standard monomials (solution count with multiplicity) if finite, else None."""
    if gb.is_unit():
        return 0
    if staircase_dimension(gb) != 0:
        return None
    n = len(gb.variables)
    seen = {tuple([0] * n)}
    frontier = [tuple([0] * n)]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(n):
                e = m[:i] + (m[i] + 1,) + m[i + 1 :]
                if e in seen or any(_divides(lm, e) for lm in gb.leading):
                    continue
                seen.add(e)
                nxt.append(e)
        if len(seen) > limit:
            raise ResourceCapError("standard monomial enumeration exceeded its limit")
        frontier = nxt
    return len(seen)


def verify_solution_family(
    system: PolySystem,
    family: Mapping[str, MPoly | str | int],
    relations: Iterable[MPoly | str] = (),
) -> tuple[bool, list[MPoly]]:
    """Substitute the family into every equation; returns (ok, nonzero residuals)."""
    missing = [u for u in system.unknowns if u not in family]
    if missing:
        raise ValueError(f"family does not assign {', '.join(missing)}")
    rels = RelationSet(tuple(MPoly.coerce(r) for r in relations) + tuple(system.relations))
    assignment = {k: MPoly.coerce(v) for k, v in family.items()}
    residuals = []
    for eq in system.equations:
        r = reduce_mod(eq.substitute(assignment), rels)
        if r:
            residuals.append(r)
    return not residuals, residuals
