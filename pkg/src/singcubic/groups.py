"""Finite projective matrix groups: closure, fingerprints, orbits, fixed points.

Closure is a breadth-first search over right multiplication by generators.
Every element also gets its permutation of the element list (the right
regular representation), so all later group theory runs on integer
permutations instead of matrices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from math import gcd, lcm
from typing import Iterable, Sequence

from .cyclo import CycNum, totient
from .projalg import (
    BinaryForm,
    LinearAction,
    Point,
    as_point,
    canonical_point,
    common_roots,
    fixed_point_form,
    induced_param_action,
    roots_of_form,
)

Perm = tuple[int, ...]


class GroupCapError(RuntimeError):
    """Closure produced more elements than the cap allows."""


@dataclass(frozen=True)
class GroupFingerprint:
    order: int
    abelian: bool
    histogram: tuple[tuple[int, int], ...]
    center_order: int
    derived_order: int

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "abelian": self.abelian,
            "element_orders": {str(k): v for k, v in self.histogram},
            "center_order": self.center_order,
            "derived_order": self.derived_order,
        }


def _compose(p: Perm, q: Perm) -> Perm:
    """First p, then q."""
    return tuple(q[i] for i in p)


def _perm_order(p: Perm) -> int:
    seen = [False] * len(p)
    result = 1
    for start in range(len(p)):
        if seen[start]:
            continue
        length, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = p[i]
            length += 1
        result = lcm(result, length)
    return result


@dataclass
class FiniteMatrixGroup:
    """Elements in projective canonical form; element 0 is the identity."""

    elements: list[LinearAction]
    generators: list[int]
    perms: list[Perm] = field(repr=False)
    labels: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def mul(self, i: int, j: int) -> int:
        """Index of elements[i] * elements[j]."""
        return self.perms[j][i]

    def inverse(self, i: int) -> int:
        return self.perms[i].index(0)

    def element_order(self, i: int) -> int:
        return _perm_order(self.perms[i])

    def subgroup(self, gens: Iterable[int]) -> set[int]:
        members = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        return members

    def is_abelian(self) -> bool:
        gs = self.generators
        return all(self.mul(a, b) == self.mul(b, a) for a in gs for b in gs)

    def center(self) -> set[int]:
        gs = self.generators
        return {i for i in range(self.order) if all(self.mul(i, g) == self.mul(g, i) for g in gs)}

    def derived_subgroup(self) -> set[int]:
        """Normal closure of the commutators of generators."""
        gs = self.generators
        comms = set()
        for a in gs:
            for b in gs:
                c = self.mul(self.mul(self.inverse(a), self.inverse(b)), self.mul(a, b))
                comms.add(c)
        members = self.subgroup(comms)
        while True:
            conj = {self.mul(self.mul(self.inverse(g), h), g) for h in members for g in gs}
            if conj <= members:
                return members
            members = self.subgroup(members | conj)

    def fingerprint(self) -> GroupFingerprint:
        hist = Counter(self.element_order(i) for i in range(self.order))
        return GroupFingerprint(
            self.order,
            self.is_abelian(),
            tuple(sorted(hist.items())),
            len(self.center()),
            len(self.derived_subgroup()),
        )


def close(gens: Sequence[LinearAction], cap: int = 1000) -> FiniteMatrixGroup:
    """Closure of parameter-free generators under multiplication, modulo scalars."""
    if not gens:
        raise ValueError("at least one generator is needed")
    dims = {g.dim for g in gens}
    if len(dims) != 1:
        raise ValueError("generators have different sizes")
    for g in gens:
        if not g.is_parameter_free():
            raise ValueError(f"generator {g.label} still has parameters {', '.join(g.parameters())}")
    n = dims.pop()
    canon = [g.canonical() for g in gens]
    identity = LinearAction.identity(n, gens[0].coords).canonical()
    elements = [identity]
    index = {identity.key(): 0}
    right: list[list[int]] = [[]]
    frontier = [0]
    # right[i][k] = index of elements[i] * gens[k]; filled as the search proceeds
    while frontier:
        nxt = []
        for i in frontier:
            row = []
            for g in canon:
                h = (elements[i] @ g).canonical()
                key = h.key()
                j = index.get(key)
                if j is None:
                    j = len(elements)
                    if j >= cap:
                        raise GroupCapError(f"closure exceeds {cap} elements")
                    elements.append(h)
                    index[key] = j
                    right.append([])
                    nxt.append(j)
                row.append(j)
            right[i] = row
        frontier = nxt
    order = len(elements)
    gen_perms = [tuple(right[i][k] for i in range(order)) for k in range(len(canon))]
    gen_index = [index[g.key()] for g in canon]
    # permutation of each element from a spanning tree of words in the generators
    perms: list[Perm | None] = [None] * order
    perms[0] = tuple(range(order))
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for k, j in enumerate(right[i]):
                if perms[j] is None:
                    perms[j] = _compose(perms[i], gen_perms[k])
                    nxt.append(j)
        frontier = nxt
    labels = [""] * order
    for k, g in zip(gen_index, gens):
        labels[k] = g.label
    return FiniteMatrixGroup(elements, gen_index, perms, labels)


# ---------------------------------------------------------------------------
# recognition


def _cyclic_hist(n: int) -> Counter:
    return Counter({d: totient(d) for d in range(1, n + 1) if n % d == 0})


def _product_hist(h1: Counter, h2: Counter) -> Counter:
    out: Counter = Counter()
    for a, x in h1.items():
        for b, y in h2.items():
            out[lcm(a, b)] += x * y
    return out


def _abelian_types(n: int) -> list[tuple[int, ...]]:
    """Invariant-factor lists of all abelian groups of order n."""

    def partitions(k: int, largest: int | None = None) -> list[list[int]]:
        largest = largest or k
        if k == 0:
            return [[]]
        out = []
        for first in range(min(k, largest), 0, -1):
            out += [[first] + rest for rest in partitions(k - first, first)]
        return out

    factors: list[tuple[int, int]] = []
    m, p = n, 2
    while m > 1:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            factors.append((p, e))
        p += 1
    choices = [[(p, part) for part in partitions(e)] for p, e in factors]
    types = []
    for combo in product(*choices) if choices else [()]:
        depth = max((len(part) for _, part in combo), default=0)
        inv = [1] * depth
        for p, part in combo:
            for i, e in enumerate(part):
                inv[i] *= p**e
        types.append(tuple(sorted(inv)))
    return types


def _abelian_name(inv: tuple[int, ...]) -> str:
    if len(inv) <= 1:
        return f"C{inv[0] if inv else 1}"
    counts = Counter(inv)
    parts = [f"C{k}^{v}" if v > 1 else f"C{k}" for k, v in sorted(counts.items())]
    return "x".join(parts)


def _fp(order: int, abelian: bool, hist: Counter, center: int, derived: int) -> GroupFingerprint:
    return GroupFingerprint(order, abelian, tuple(sorted(hist.items())), center, derived)


def _nonabelian_candidates(max_order: int) -> list[tuple[str, GroupFingerprint]]:
    out = []
    base = []
    for n in range(3, max_order // 2 + 1):
        hist = _cyclic_hist(n)
        hist[2] += n
        name = "S3" if n == 3 else f"D{n}"
        fp = _fp(2 * n, False, hist, 2 if n % 2 == 0 else 1, n // gcd(n, 2))
        out.append((name, fp))
        base.append((name, fp, hist, n))
    specials = [
        ("A4", 12, Counter({1: 1, 2: 3, 3: 8}), 1, 4),
        ("S4", 24, Counter({1: 1, 2: 9, 3: 8, 4: 6}), 1, 12),
        ("A5", 60, Counter({1: 1, 2: 15, 3: 20, 5: 24}), 1, 60),
    ]
    for name, order, hist, center, derived in specials:
        if order <= max_order:
            out.append((name, _fp(order, False, hist, center, derived)))
    for m in range(2, max_order // 6 + 1):
        cm = _cyclic_hist(m)
        for name, fp, hist, n in base:
            if m == 2 and n % 2 == 1:
                continue  # C2 x D_n with n odd is D_2n
            order = m * fp.order
            if order > max_order:
                continue
            out.append(
                (f"C{m}x{name}", _fp(order, False, _product_hist(cm, hist), m * fp.center_order, fp.derived_order))
            )
        for name, order, hist, center, derived in specials:
            if m * order <= max_order:
                out.append((f"C{m}x{name}", _fp(m * order, False, _product_hist(cm, hist), m * center, derived)))
    return out


def recognize(fp: GroupFingerprint) -> str:
    """A candidate name determined by the fingerprint, or "unrecognized"."""
    if fp.abelian:
        matches = [t for t in _abelian_types(fp.order) if _fp(fp.order, True, _hist_of_abelian(t), fp.order, 1) == fp]
        return _abelian_name(matches[0]) if len(matches) == 1 else "unrecognized"
    matches = [name for name, cand in _nonabelian_candidates(max(fp.order, 6)) if cand == fp]
    return matches[0] if len(matches) == 1 else "unrecognized"


def _hist_of_abelian(inv: tuple[int, ...]) -> Counter:
    return reduce(_product_hist, (_cyclic_hist(k) for k in inv), Counter({1: 1}))


def normalize_group_name(name: str) -> str:
    """Canonical spelling of a group name: C2^2 for the Klein group, D3 as S3."""
    name = name.replace(" ", "").replace("×", "x")
    aliases = {"V4": "C2^2", "K4": "C2^2", "C2xC2": "C2^2", "D2": "C2^2", "D3": "S3", "C1": "C1"}
    return aliases.get(name, name)


# ---------------------------------------------------------------------------
# orbits and fixed points


def _point_key(p: Point) -> tuple:
    return tuple(c.constant_value() if c else CycNum.rational(0) for c in p)


def orbit(G: FiniteMatrixGroup | Sequence[LinearAction], P: Sequence) -> list[Point]:
    """Orbit of a constant point, in canonical form, in order of discovery."""
    gens = [G.elements[i] for i in G.generators] if isinstance(G, FiniteMatrixGroup) else list(G)
    start = canonical_point(P)
    seen = {_point_key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = canonical_point(g.apply(p))
                k = _point_key(q)
                if k not in seen:
                    seen[k] = q
                    nxt.append(q)
        frontier = nxt
    return list(seen.values())


def stabilizer_order(G: FiniteMatrixGroup, P: Sequence) -> int:
    start = _point_key(canonical_point(P))
    return sum(1 for g in G.elements if _point_key(canonical_point(g.apply(as_point(P)))) == start)


def restrict(g: LinearAction, indices: Sequence[int], label: str = "") -> LinearAction:
    """The block of g on the coordinates ``indices``; the block must be invariant."""
    idx = list(indices)
    others = [i for i in range(g.dim) if i not in idx]
    for i in idx:
        for j in others:
            if g.rows[i][j]:
                raise ValueError(f"{g.label} does not preserve the chosen coordinate block")
    rows = [[g.rows[i][j] for j in idx] for i in idx]
    coords = tuple(g.coords[i] for i in idx) if g.coords else ()
    return LinearAction.from_rows(rows, coords, label=label or g.label)


@dataclass(frozen=True)
class CurveFixedPoints:
    """Result of a common fixed-point search on a parametrized curve.

    ``status`` is "none", "point", "form" (common roots outside the field,
    given by ``form``) or "whole-curve".
    """

    status: str
    point: tuple[CycNum, CycNum] | None = None
    form: BinaryForm | None = None
    certificate: tuple[str, ...] = ()
    forms: tuple[tuple[str, BinaryForm], ...] = ()


def common_fixed_point_on_curve(G: FiniteMatrixGroup | Sequence[LinearAction], C, conductor: int = 12) -> CurveFixedPoints:
    """A parameter value fixed by every generator's induced action, or a certificate that none exists."""
    gens = [G.elements[i] for i in G.generators] if isinstance(G, FiniteMatrixGroup) else list(G)
    labelled = []
    for g in gens:
        m = induced_param_action(g, C)
        labelled.append((g.label, fixed_point_form(m)))
    active = [(lab, f) for lab, f in labelled if not f.is_zero()]
    if not active:
        return CurveFixedPoints("whole-curve", (CycNum.rational(1), CycNum.rational(0)), forms=tuple(labelled))
    g, infinity = common_roots([f for _, f in active])
    if len(g) <= 1 and not infinity:
        cert = ()
        for i in range(len(active)):
            for j in range(i + 1, len(active)):
                gg, inf2 = common_roots([active[i][1], active[j][1]])
                if len(gg) <= 1 and not inf2:
                    cert = (active[i][0], active[j][0])
                    break
            if cert:
                break
        return CurveFixedPoints("none", certificate=cert or tuple(lab for lab, _ in active), forms=tuple(labelled))
    if infinity:
        return CurveFixedPoints("point", (CycNum.rational(1), CycNum.rational(0)), forms=tuple(labelled))
    one = CycNum.rational(1)
    if len(g) == 2:
        return CurveFixedPoints("point", (-g[0], one), forms=tuple(labelled))
    form = BinaryForm(tuple(reversed(g)))
    roots = roots_of_form(form, conductor)
    if roots:
        return CurveFixedPoints("point", roots[0], form=form, forms=tuple(labelled))
    return CurveFixedPoints("form", form=form, forms=tuple(labelled))


def fixed_parameters(g: LinearAction, C, conductor: int = 12) -> list[tuple[CycNum, CycNum]] | None:
    """Fixed parameter values of g on C, or None if they lie outside the field."""
    m = induced_param_action(g, C)
    form = fixed_point_form(m)
    if form.is_zero():
        raise ValueError(f"{g.label} acts trivially on the curve")
    return roots_of_form(form, conductor)


def group_name_matches(claimed: str, G: FiniteMatrixGroup) -> tuple[bool, str]:
    name = recognize(G.fingerprint())
    return normalize_group_name(claimed) == name, name


__all__ = [
    "CurveFixedPoints",
    "FiniteMatrixGroup",
    "GroupCapError",
    "GroupFingerprint",
    "close",
    "common_fixed_point_on_curve",
    "fixed_parameters",
    "group_name_matches",
    "normalize_group_name",
    "orbit",
    "recognize",
    "restrict",
    "stabilizer_order",
]
