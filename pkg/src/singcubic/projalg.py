"""Projective linear actions, rational maps, parametrized curves.

Everything uses row vectors: a matrix M acts by x -> x*M, so applying M and
then N is the product M*N.  Points are tuples of polynomials (usually
constants); projective equality is tested by 2x2 cross products, which also
works for points with symbolic coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .cyclo import ONE, ZERO, CycNum, sqrt_in_field
from .mpoly import MPoly, RelationSet, linear_change, reduce_mod
from .stabsolve import determinant

Entry = Union[MPoly, CycNum, int, Fraction, str]
Point = tuple[MPoly, ...]


class IndeterminacyError(ValueError):
    """Every component of a rational map vanishes at the given point."""

    def __init__(self, label: str, point: Sequence[MPoly]):
        super().__init__(f"{label or 'map'} is undefined at {format_point(point)}")
        self.point = tuple(point)


def as_point(coords: Iterable[Entry]) -> Point:
    return tuple(MPoly.coerce(c) for c in coords)


def format_point(p: Sequence[MPoly]) -> str:
    return "[" + " : ".join(str(MPoly.coerce(c)) for c in p) + "]"


def _rels(rels: RelationSet | Iterable[MPoly] | None) -> RelationSet:
    if rels is None:
        return RelationSet()
    if isinstance(rels, RelationSet):
        return rels
    return RelationSet(tuple(MPoly.coerce(r) for r in rels))


def canonical_point(p: Sequence[Entry]) -> Point:
    """Scale a constant point so that its first nonzero coordinate is 1."""
    p = as_point(p)
    for c in p:
        if c:
            inv = c.constant_value().inverse()
            return tuple(x.scale(inv) for x in p)
    raise ValueError("the zero vector is not a projective point")


def proportional(p: Sequence[Entry], q: Sequence[Entry], rels: RelationSet | Iterable[MPoly] | None = None) -> bool:
    """True iff p and q agree projectively (all 2x2 cross products vanish)."""
    return cross_residual(p, q, rels) is None


def cross_residual(
    p: Sequence[Entry], q: Sequence[Entry], rels: RelationSet | Iterable[MPoly] | None = None
) -> MPoly | None:
    """First nonvanishing cross product p_i q_j - p_j q_i, or None."""
    p, q = as_point(p), as_point(q)
    if len(p) != len(q):
        raise ValueError("points live in different spaces")
    rs = _rels(rels)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            r = reduce_mod(p[i] * q[j] - p[j] * q[i], rs)
            if r:
                return r
    return None


# ---------------------------------------------------------------------------
# linear actions


@dataclass(frozen=True)
class LinearAction:
    """A square matrix acting on row vectors of the coordinates ``coords``."""

    rows: tuple[tuple[MPoly, ...], ...]
    coords: tuple[str, ...] = ()
    label: str = ""
    relations: tuple[MPoly, ...] = ()
    witness: MPoly | None = None

    def __post_init__(self):
        rows = tuple(tuple(MPoly.coerce(e) for e in r) for r in self.rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError(f"matrix {self.label or ''} is not square")
        object.__setattr__(self, "rows", rows)
        if self.coords and len(self.coords) != n:
            raise ValueError(f"{n}x{n} matrix given {len(self.coords)} coordinates")
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "relations", tuple(MPoly.coerce(r) for r in self.relations))
        if self.witness is not None:
            object.__setattr__(self, "witness", MPoly.coerce(self.witness))

    # --- constructors ---

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Entry]], coords: Sequence[str] = (), **kw) -> LinearAction:
        return cls(tuple(tuple(MPoly.coerce(e) for e in r) for r in rows), tuple(coords), **kw)

    @classmethod
    def identity(cls, n: int, coords: Sequence[str] = (), label: str = "id") -> LinearAction:
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], coords, label=label)

    @classmethod
    def diag(cls, entries: Sequence[Entry], coords: Sequence[str] = (), **kw) -> LinearAction:
        n = len(entries)
        return cls.from_rows([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], coords, **kw)

    @classmethod
    def from_images(cls, images: Sequence[Entry], coords: Sequence[str], **kw) -> LinearAction:
        """The matrix of x -> (images), each image a linear form in ``coords``."""
        coords = tuple(coords)
        polys = [MPoly.coerce(e) for e in images]
        rows = [[MPoly.zero() for _ in coords] for _ in coords]
        for j, img in enumerate(polys):
            parts = img.coefficients_in(coords)
            for exps, coeff in parts.items():
                if sum(exps) != 1:
                    raise ValueError(f"image {img} is not linear in {', '.join(coords)}")
                rows[exps.index(1)][j] = coeff
        return cls.from_rows(rows, coords, **kw)

    # --- structure ---

    @property
    def dim(self) -> int:
        return len(self.rows)

    def parameters(self) -> tuple[str, ...]:
        names: set[str] = set()
        for r in self.rows:
            for e in r:
                names |= set(e.vars)
        return tuple(sorted(names))

    def is_parameter_free(self) -> bool:
        return not self.parameters()

    def determinant(self) -> MPoly:
        return reduce_mod(determinant(self.rows), self.relation_set())

    def relation_set(self) -> RelationSet:
        return RelationSet(self.relations)

    def with_coords(self, coords: Sequence[str]) -> LinearAction:
        return LinearAction(self.rows, tuple(coords), self.label, self.relations, self.witness)

    def __matmul__(self, other: LinearAction) -> LinearAction:
        """Matrix product: first self, then other."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in product")
        n = self.dim
        cols = list(zip(*other.rows))
        rels = RelationSet(self.relations + tuple(r for r in other.relations if r not in self.relations))
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = MPoly.zero()
                for k in range(n):
                    a, b = self.rows[i][k], cols[j][k]
                    if a and b:
                        acc = acc + a * b
                row.append(reduce_mod(acc, rels) if rels else acc)
            rows.append(tuple(row))
        label = f"{self.label}*{other.label}" if self.label and other.label else ""
        return LinearAction(tuple(rows), self.coords or other.coords, label, rels.relations)

    def transpose(self) -> LinearAction:
        return LinearAction(tuple(zip(*self.rows)), self.coords, self.label + "^T", self.relations)

    def specialize(self, values: Mapping[str, Entry]) -> LinearAction:
        assign = {k: MPoly.coerce(v) for k, v in values.items()}
        rows = tuple(tuple(e.substitute(assign) for e in r) for r in self.rows)
        rels = tuple(r for r in (rel.substitute(assign) for rel in self.relations) if r and not r.is_constant())
        for rel in self.relations:
            r = rel.substitute(assign)
            if r.is_constant() and r:
                raise ValueError(f"specialization violates relation {rel} = 0")
        wit = self.witness.substitute(assign) if self.witness is not None else None
        return LinearAction(rows, self.coords, self.label, rels, wit)

    def canonical(self) -> LinearAction:
        """Projective normal form: first nonzero entry (row-major) scaled to 1."""
        for r in self.rows:
            for e in r:
                if e:
                    if not e.is_constant():
                        raise ValueError("projective normalization needs a parameter-free matrix")
                    inv = e.constant_value().inverse()
                    rows = tuple(tuple(x.scale(inv) for x in row) for row in self.rows)
                    return LinearAction(rows, self.coords, self.label, (), None)
        raise ValueError("zero matrix")

    def key(self) -> tuple:
        """Hashable identity of a parameter-free canonical matrix."""
        return tuple(e.constant_value() if e else ZERO for r in self.rows for e in r)

    def apply(self, p: Sequence[Entry]) -> Point:
        """The row vector p*M."""
        p = as_point(p)
        if len(p) != self.dim:
            raise ValueError(f"point of length {len(p)} for a {self.dim}x{self.dim} matrix")
        out = []
        rels = self.relation_set()
        for j in range(self.dim):
            acc = MPoly.zero()
            for i in range(self.dim):
                if p[i] and self.rows[i][j]:
                    acc = acc + p[i] * self.rows[i][j]
            out.append(reduce_mod(acc, rels) if rels else acc)
        return tuple(out)

    def images(self) -> tuple[MPoly, ...]:
        """The linear forms giving x*M, one per coordinate."""
        return self.apply([MPoly.var(v) for v in self.coords])

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(e) for e in r) for r in self.rows) + "]"


def sym_power(m: LinearAction, d: int) -> LinearAction:
    """Action on degree-d binary forms induced by (s, t) -> (s, t)*m.

    Entry (i, j) is the coefficient of s^(d-i) t^i in
    (a s + c t)^(d-j) (b s + d t)^j for m = [[a, b], [c, d]], so that the
    rational normal curve satisfies nu_d((s,t)*m) = nu_d(s,t) * sym_power(m, d).
    """
    if d < 1:
        raise ValueError("symmetric power degree must be positive")
    if m.dim != 2:
        raise ValueError("sym_power needs a 2x2 matrix")
    (a, b), (c, dd) = m.rows
    s, t = MPoly.var("s_sym"), MPoly.var("t_sym")
    u, v = a * s + c * t, b * s + dd * t
    rows = [[MPoly.zero()] * (d + 1) for _ in range(d + 1)]
    rels = m.relation_set()
    for j in range(d + 1):
        form = u ** (d - j) * v**j
        parts = form.coefficients_in(("s_sym", "t_sym"))
        for i in range(d + 1):
            entry = parts.get((d - i, i), MPoly.zero())
            rows[i][j] = reduce_mod(entry, rels) if rels else entry
    return LinearAction(tuple(tuple(r) for r in rows), (), f"Sym^{d}({m.label})" if m.label else "", m.relations)


# ---------------------------------------------------------------------------
# rational maps and curves


@dataclass(frozen=True)
class RationalMap:
    """x -> (components), homogeneous forms of a common degree in ``source``."""

    components: tuple[MPoly, ...]
    source: tuple[str, ...]
    label: str = ""
    domain: tuple[MPoly, ...] = ()

    def __post_init__(self):
        comps = tuple(MPoly.coerce(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "domain", tuple(MPoly.coerce(d) for d in self.domain))
        degs = {c.degree_in(self.source) for c in comps if c}
        if not degs:
            raise ValueError(f"map {self.label} has only zero components")
        if len(degs) > 1 or not all(c.is_homogeneous(self.source) for c in comps):
            raise ValueError(f"components of {self.label} are not homogeneous of one degree")

    @property
    def target_dim(self) -> int:
        return len(self.components) - 1

    @property
    def degree(self) -> int:
        return max(c.degree_in(self.source) for c in self.components if c)

    def apply(self, p: Sequence[Entry]) -> Point:
        return map_apply(self, p)

    def precompose(self, g: LinearAction) -> RationalMap:
        """The map x -> phi(x*g)."""
        comps = tuple(linear_change(c, g, self.source) for c in self.components)
        if g.relations:
            comps = tuple(reduce_mod(c, g.relation_set()) for c in comps)
        return RationalMap(comps, self.source, f"{self.label} o {g.label}", self.domain)

    def postcompose(self, h: LinearAction) -> RationalMap:
        """The map x -> phi(x)*h."""
        return RationalMap(h.apply(self.components), self.source, f"{h.label} o {self.label}", self.domain)

    def then(self, other: RationalMap) -> RationalMap:
        """other o self, substituting this map's components for other's source coordinates."""
        if len(other.source) != len(self.components):
            raise ValueError(f"cannot compose {other.label} after {self.label}")
        assign = dict(zip(other.source, self.components))
        comps = tuple(c.substitute(assign) for c in other.components)
        return RationalMap(comps, self.source, f"{other.label} o {self.label}", self.domain)

    def pullback(self, f: MPoly, target: Sequence[str]) -> MPoly:
        """f(phi(x)) for f written in the target coordinates."""
        return MPoly.coerce(f).substitute(dict(zip(target, self.components)))


def map_apply(phi: RationalMap, p: Sequence[Entry]) -> Point:
    """Image of p (unnormalized); IndeterminacyError if every component vanishes."""
    p = as_point(p)
    if len(p) != len(phi.source):
        raise ValueError(f"point has {len(p)} coordinates, {phi.label} expects {len(phi.source)}")
    assign = dict(zip(phi.source, p))
    image = tuple(c.substitute(assign) for c in phi.components)
    if not any(image):
        raise IndeterminacyError(phi.label, p)
    return image


def map_cross_residual(phi: RationalMap, psi: RationalMap, X: MPoly | Sequence[MPoly] | None = None) -> MPoly | None:
    """First cross product phi_i psi_j - phi_j psi_i not reducing to 0 modulo X, else None."""
    if len(phi.components) != len(psi.components):
        raise ValueError("maps have different targets")
    rels = _domain_rels(X)
    return cross_residual(phi.components, psi.components, rels)


def maps_equal_mod(phi: RationalMap, psi: RationalMap, X: MPoly | Sequence[MPoly] | None = None) -> bool:
    return map_cross_residual(phi, psi, X) is None


def _domain_rels(X) -> RelationSet:
    if X is None:
        return RelationSet()
    if isinstance(X, RelationSet):
        return X
    if isinstance(X, (MPoly, str)):
        return RelationSet((MPoly.coerce(X),))
    return RelationSet(tuple(MPoly.coerce(x) for x in X))


class TransportError(ValueError):
    """No (or no unique) target matrix makes the map equivariant."""


def nullspace(rows: Sequence[Sequence[CycNum]], ncols: int) -> list[list[CycNum]]:
    """Basis of {h : rows * h = 0} by Gaussian elimination."""
    mat = [list(r) for r in rows if any(not c.is_zero() for c in r)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if not mat[i][col].is_zero()), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = mat[r][col].inverse()
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and not mat[i][col].is_zero():
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ZERO] * ncols
        vec[fc] = ONE
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(vec)
    return basis


def transport_action(phi: RationalMap, g: LinearAction, X: MPoly | Sequence[MPoly] | None = None) -> LinearAction:
    """The target matrix h with phi(x*g) proportional to phi(x)*h on X.

    The cross products are linear in the entries of h, so h is a nullspace
    vector of the coefficient system after reduction modulo X.
    """
    if not g.is_parameter_free():
        raise ValueError("transport_action needs a parameter-free matrix")
    rels = _domain_rels(X)
    moved = phi.precompose(g).components
    comps = phi.components
    m = len(comps)
    # products[i][k] = moved_i * comps_k reduced modulo X
    products = [[reduce_mod(moved[i] * comps[k], rels) for k in range(m)] for i in range(m)]
    n_unknowns = m * m  # h[k][j] at index k*m + j
    equations: list[list[CycNum]] = []
    for i in range(m):
        for j in range(i + 1, m):
            # moved_i * (sum_k comps_k h_kj) - moved_j * (sum_k comps_k h_ki) = 0
            collected: dict = {}
            for k in range(m):
                for mono, c in products[i][k].items():
                    key = tuple(sorted(mono.items()))
                    collected.setdefault(key, {})
                    idx = k * m + j
                    collected[key][idx] = collected[key].get(idx, ZERO) + c
                for mono, c in products[j][k].items():
                    key = tuple(sorted(mono.items()))
                    collected.setdefault(key, {})
                    idx = k * m + i
                    collected[key][idx] = collected[key].get(idx, ZERO) - c
            for key in sorted(collected):
                row = [ZERO] * n_unknowns
                for idx, c in collected[key].items():
                    row[idx] = c
                equations.append(row)
    basis = nullspace(equations, n_unknowns)
    # discard solutions that kill phi (h annihilating every component on X)
    if not basis:
        raise TransportError(f"{phi.label} is not equivariant for {g.label}")
    if len(basis) > 1:
        raise TransportError(f"target action for {g.label} is not unique ({len(basis)}-dimensional solution space)")
    vec = basis[0]
    h = LinearAction(tuple(tuple(MPoly.const(vec[k * m + j]) for j in range(m)) for k in range(m)), (), f"{g.label}'")
    if not any(reduce_mod(c, rels) for c in h.apply(comps)):
        raise TransportError(f"the only solution for {g.label} annihilates {phi.label}")
    return h.canonical()


@dataclass(frozen=True)
class CurveParam:
    """A curve s,t -> (components), binary forms of a common degree."""

    components: tuple[MPoly, ...]
    params: tuple[str, str] = ("s", "t")
    label: str = ""

    def __post_init__(self):
        comps = tuple(MPoly.coerce(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "params", tuple(self.params))
        degs = {c.degree_in(self.params) for c in comps if c}
        if not degs:
            raise ValueError(f"curve {self.label} has only zero components")
        if len(degs) > 1 or not all(c.is_homogeneous(self.params) for c in comps):
            raise ValueError(f"components of {self.label} are not forms of one degree")
        if min(degs) < 1:
            raise ValueError(f"curve {self.label} is constant")

    @property
    def degree(self) -> int:
        return max(c.degree_in(self.params) for c in self.components if c)

    def point(self, s: Entry, t: Entry) -> Point:
        assign = {self.params[0]: MPoly.coerce(s), self.params[1]: MPoly.coerce(t)}
        return tuple(c.substitute(assign) for c in self.components)

    def pullback(self, f: MPoly, coords: Sequence[str]) -> MPoly:
        if len(coords) != len(self.components):
            raise ValueError(f"curve {self.label} lives in a space with {len(self.components)} coordinates")
        return MPoly.coerce(f).substitute(dict(zip(coords, self.components)))


def curve_in_hypersurface(C: CurveParam, f: MPoly, coords: Sequence[str]) -> bool:
    return not C.pullback(f, coords)


def jacobian_minors(fs: Sequence[MPoly], coords: Sequence[str]) -> list[MPoly]:
    """All maximal minors of the Jacobian matrix of fs (the partials when len(fs) == 1)."""
    from itertools import combinations

    jac = [[f.derivative(v) for v in coords] for f in fs]
    k = len(fs)
    return [determinant([[row[c] for c in cols] for row in jac]) for cols in combinations(range(len(coords)), k)]


def singular_along_residual(fs: MPoly | Sequence[MPoly], C: CurveParam, coords: Sequence[str]) -> MPoly | None:
    """First equation or Jacobian minor not vanishing on C, else None."""
    fs = [MPoly.coerce(fs)] if isinstance(fs, (MPoly, str)) else [MPoly.coerce(f) for f in fs]
    for f in fs:
        r = C.pullback(f, coords)
        if r:
            return r
    for minor in jacobian_minors(fs, coords):
        r = C.pullback(minor, coords)
        if r:
            return r
    return None


def singular_along(fs: MPoly | Sequence[MPoly], C: CurveParam, coords: Sequence[str]) -> bool:
    """True iff the variety cut out by fs contains C and its Jacobian drops rank along C."""
    return singular_along_residual(fs, C, coords) is None


def line_residual(
    P: Sequence[Entry],
    Q: Sequence[Entry],
    f: MPoly,
    coords: Sequence[str],
    rels: RelationSet | Iterable[MPoly] | None = None,
) -> MPoly | None:
    """f(s*P + t*Q) reduced modulo rels, or None when it vanishes identically."""
    P, Q = as_point(P), as_point(Q)
    rs = _rels(rels)
    if cross_residual(P, Q, rs) is None:
        raise ValueError("P and Q must be distinct points")
    s, t = MPoly.var("s_line"), MPoly.var("t_line")
    assign = {v: s * p + t * q for v, p, q in zip(coords, P, Q)}
    restricted = MPoly.coerce(f).substitute(assign)
    for _, coeff in sorted(restricted.coefficients_in(("s_line", "t_line")).items()):
        r = reduce_mod(coeff, rs)
        if r:
            return r
    return None


def line_in_hypersurface(
    P: Sequence[Entry],
    Q: Sequence[Entry],
    f: MPoly,
    coords: Sequence[str],
    rels: RelationSet | Iterable[MPoly] | None = None,
) -> bool:
    return line_residual(P, Q, f, coords, rels) is None


# ---------------------------------------------------------------------------
# binary forms and the parameter line


def _trim(p: list[CycNum]) -> list[CycNum]:
    while p and p[-1].is_zero():
        p.pop()
    return p


def upoly_rem(a: list[CycNum], b: list[CycNum]) -> list[CycNum]:
    """Remainder of a by b; coefficient lists, lowest degree first."""
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    inv = b[-1].inverse()
    while len(a) >= len(b):
        f = a[-1] * inv
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - f * c
        a.pop()
        _trim(a)
    return a


def upoly_gcd(a: list[CycNum], b: list[CycNum]) -> list[CycNum]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, upoly_rem(a, b)
    if a:
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


@dataclass(frozen=True)
class BinaryForm:
    """A binary form sum c_i u^(d-i) v^i stored by degree d and coefficients (c_0..c_d)."""

    coeffs: tuple[CycNum, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    @classmethod
    def from_poly(cls, f: MPoly, u: str, v: str, degree: int) -> BinaryForm:
        parts = f.coefficients_in((u, v))
        coeffs = []
        for i in range(degree + 1):
            c = parts.get((degree - i, i), MPoly.zero())
            coeffs.append(c.constant_value())
        return cls(tuple(coeffs))

    def vanishes_at(self, p: tuple[CycNum, CycNum]) -> bool:
        u, v = p
        d = self.degree
        total = ZERO
        for i, c in enumerate(self.coeffs):
            total = total + c * u ** (d - i) * v**i
        return total.is_zero()

    def at_infinity_order(self) -> int:
        """Multiplicity of the root (1:0), i.e. the power of v dividing the form."""
        k = 0
        for c in self.coeffs:
            if c.is_zero():
                k += 1
            else:
                break
        return k

    def affine(self) -> list[CycNum]:
        """Dehomogenize at v = 1: polynomial in u, lowest degree first."""
        return _trim([self.coeffs[self.degree - k] for k in range(self.degree + 1)])

    def __str__(self) -> str:
        u, v = MPoly.var("u"), MPoly.var("v")
        total = MPoly.zero()
        for i, c in enumerate(self.coeffs):
            total = total + (u ** (self.degree - i) * v**i).scale(c)
        return str(total)


def fixed_point_form(m: LinearAction) -> BinaryForm:
    """Quadratic form whose roots are the fixed points of (u, v) -> (u, v)*m.

    A point is fixed iff (u, v) and (u, v)*m are proportional:
    m12 u^2 + (m22 - m11) u v - m21 v^2 = 0.
    """
    if m.dim != 2 or not m.is_parameter_free():
        raise ValueError("fixed points need a parameter-free 2x2 matrix")
    (m11, m12), (m21, m22) = [[e.constant_value() if e else ZERO for e in r] for r in m.rows]
    return BinaryForm((m12, m22 - m11, -m21))


def common_roots(forms: Sequence[BinaryForm]) -> tuple[list[CycNum], bool]:
    """(monic gcd of the affine parts, whether (1:0) is a common root) for nonzero forms."""
    forms = [f for f in forms if not f.is_zero()]
    if not forms:
        raise ValueError("no nonzero forms")
    infinity = all(f.at_infinity_order() > 0 for f in forms)
    g = forms[0].affine()
    for f in forms[1:]:
        g = upoly_gcd(g, f.affine())
    if g:
        inv = g[-1].inverse()
        g = [c * inv for c in g]
    return g, infinity


def roots_of_form(form: BinaryForm, conductor: int) -> list[tuple[CycNum, CycNum]] | None:
    """Projective roots of a form of degree at most 2 inside Q(zeta_conductor), or None if they leave it."""
    if form.is_zero():
        raise ValueError("every point is a root of the zero form")
    roots: list[tuple[CycNum, CycNum]] = []
    if form.at_infinity_order() > 0:
        roots.append((ONE, ZERO))
    aff = form.affine()
    if len(aff) == 2:
        roots.append((-aff[0] * aff[1].inverse(), ONE))
    elif len(aff) == 3:
        c, b, a = aff
        disc = b * b - a * c * 4
        r = sqrt_in_field(disc, conductor)
        if r is None:
            return None
        two_a_inv = (a * 2).inverse()
        for sign in (1, -1):
            roots.append(((-b + r * sign) * two_a_inv, ONE))
        if disc.is_zero():
            roots.pop()
    elif len(aff) > 3:
        raise ValueError("only forms of degree at most 2 are factored")
    return roots


def _binary_gcd_root(forms: list[MPoly], u: str, v: str) -> tuple[CycNum, CycNum] | None:
    """The unique common root of binary forms in (u, v), or None if there is not exactly one."""
    bfs = []
    for f in forms:
        if not f:
            continue
        d = f.degree_in((u, v))
        bfs.append(BinaryForm.from_poly(f, u, v, d))
    if not bfs:
        return None
    g, infinity = common_roots(bfs)
    deg = len(g) - 1
    if infinity and deg <= 0:
        return (ONE, ZERO)
    if not infinity and deg == 1:
        return (-g[0], ONE)
    if not infinity and deg >= 2:
        # a multiple root: accept it if g is a perfect power of a linear factor
        root = -g[deg - 1] * CycNum.rational(Fraction(1, deg))
        lin = [-root, ONE]
        test = [ONE]
        for _ in range(deg):
            nxt = [ZERO] * (len(test) + 1)
            for i, c in enumerate(test):
                nxt[i] = nxt[i] + c * lin[0]
                nxt[i + 1] = nxt[i + 1] + c * lin[1]
            test = nxt
        if all(x == y for x, y in zip(test, g)):
            return (root, ONE)
    return None


def curve_parameter_of(C: CurveParam, point: Sequence[Entry]) -> tuple[CycNum, CycNum] | None:
    """The parameter (s:t) with C(s:t) proportional to point, if unique."""
    point = as_point(point)
    comps = C.components
    minors = []
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            minors.append(comps[i] * point[j] - comps[j] * point[i])
    if any(not m.vars and m for m in minors):
        return None
    if any(set(m.vars) - set(C.params) for m in minors):
        raise ValueError("curve inversion needs constant point coordinates")
    return _binary_gcd_root(minors, *C.params)


def induced_param_action(g: LinearAction, C: CurveParam) -> LinearAction:
    """The 2x2 matrix m with C((s,t)*m) proportional to C(s,t)*g.

    The images of the parameters (1:0), (0:1), (1:1) are found by inverting
    the curve; the scalars are fixed by the third point and the result is
    verified as an identity of binary forms.
    """
    if not g.is_parameter_free():
        raise ValueError("induced_param_action needs a parameter-free matrix")
    base = [(ONE, ZERO), (ZERO, ONE), (ONE, ONE)]
    images = []
    for p in base:
        q = g.apply(C.point(*p))
        if not any(q):
            raise ValueError(f"{g.label} is singular on {C.label}")
        root = curve_parameter_of(C, q)
        if root is None:
            raise ValueError(f"{g.label} does not preserve {C.label}")
        images.append(root)
    (p1, p2, p3) = images
    # mu1*p1 + mu2*p2 = p3
    det = p1[0] * p2[1] - p1[1] * p2[0]
    if det.is_zero():
        raise ValueError(f"{g.label} collapses {C.label}")
    det_inv = det.inverse()
    mu1 = (p3[0] * p2[1] - p3[1] * p2[0]) * det_inv
    mu2 = (p1[0] * p3[1] - p1[1] * p3[0]) * det_inv
    m = LinearAction.from_rows(
        [[MPoly.const(mu1 * p1[0]), MPoly.const(mu1 * p1[1])], [MPoly.const(mu2 * p2[0]), MPoly.const(mu2 * p2[1])]],
        C.params,
        label=f"{g.label}|{C.label}" if g.label else "",
    )
    s, t = (MPoly.var(v) for v in C.params)
    moved_params = m.apply((s, t))
    lhs = tuple(c.substitute(dict(zip(C.params, moved_params))) for c in C.components)
    rhs = g.apply(C.components)
    if cross_residual(lhs, rhs) is not None:
        raise ValueError(f"{g.label} does not preserve {C.label}")
    return m.canonical()


def point_on(fs: Sequence[MPoly], p: Sequence[Entry], coords: Sequence[str]) -> bool:
    assign = dict(zip(coords, as_point(p)))
    return all(not MPoly.coerce(f).substitute(assign) for f in fs)


def smooth_at(f: MPoly, p: Sequence[Entry], coords: Sequence[str]) -> bool:
    """Some partial derivative of f is nonzero at p."""
    assign = dict(zip(coords, as_point(p)))
    return any(f.derivative(v).substitute(assign) for v in coords)


@dataclass(frozen=True)
class FixedPointReport:
    fixed: bool
    on_variety: bool
    smooth: bool
    witness: MPoly | None = field(default=None, compare=False)


def fixed_points_check(
    g: LinearAction, P: Sequence[Entry], f: MPoly | Sequence[MPoly], coords: Sequence[str] | None = None
) -> FixedPointReport:
    """Whether P*g is proportional to P, P lies on f = 0, and f is smooth there.

    ``f`` may be a list of equations; smoothness is then judged on the first.
    """
    coords = tuple(coords or g.coords)
    fs = [MPoly.coerce(f)] if isinstance(f, (MPoly, str)) else [MPoly.coerce(x) for x in f]
    P = as_point(P)
    witness = cross_residual(g.apply(P), P, g.relation_set())
    on = point_on(fs, P, coords)
    smooth = on and smooth_at(fs[0], P, coords) if len(fs) == 1 else on
    return FixedPointReport(witness is None, on, smooth, witness)
