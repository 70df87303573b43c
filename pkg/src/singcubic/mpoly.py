"""Sparse multivariate polynomials over cyclotomic fields.

Polynomials carry their own (sorted) tuple of variable names and a dict from
exponent tuples to nonzero :class:`CycNum` coefficients.  Binary operations
align the two variable tuples, so polynomials in different variables mix
freely.  Variables are ordered by :func:`var_key`, which ranks geometry
coordinates above curve parameters, case parameters, and group parameters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .cyclo import ONE, ZERO, CycNum

Exps = tuple[int, ...]
Scalar = Union[CycNum, int, Fraction]

GEOMETRY, CURVE, CASE, GROUP, UNKNOWN = range(5)
ROLE_NAMES = {"geometry": GEOMETRY, "curve": CURVE, "case": CASE, "group": GROUP, "unknown": UNKNOWN}

_SPLIT = re.compile(r"^(.*?)(\d*)$")
_GEOM = re.compile(r"^[xyz]\d+$|^t\d+$")
_CASEP = re.compile(r"^e\d+$|^a\d+$")


def default_role(name: str) -> int:
    if _GEOM.match(name):
        return GEOMETRY
    if name in ("s", "t"):
        return CURVE
    if _CASEP.match(name):
        return CASE
    if name in ("a", "b", "c", "d", "alpha", "beta", "gamma") or name.endswith("_inv"):
        return GROUP
    return UNKNOWN


def var_key(name: str) -> tuple:
    prefix, digits = _SPLIT.match(name).groups()
    return (default_role(name), prefix, int(digits) if digits else -1, name)


# ---------------------------------------------------------------------------
# monomial orders


def _grevlex_key(e: Sequence[int]) -> tuple:
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order on exponent vectors over a sorted variable tuple.

    ``kind`` is ``"grevlex"``, ``"lex"`` or ``"block"``.  The block order
    compares the role blocks of :func:`default_role` (or ``roles``) in rank
    order, grevlex inside each block.  ``ranking`` optionally overrides the
    variable sequence (first = largest); variables not listed follow in
    :func:`var_key` order.
    """

    kind: str = "block"
    ranking: tuple[str, ...] = ()
    roles: tuple[tuple[str, int], ...] = ()

    def variables(self, names: Iterable[str]) -> tuple[str, ...]:
        names = set(names)
        head = [v for v in self.ranking if v in names]
        tail = sorted((v for v in names if v not in self.ranking), key=var_key)
        return tuple(head + tail)

    def role_of(self, name: str) -> int:
        for v, r in self.roles:
            if v == name:
                return r
        return default_role(name)

    def key_function(self, variables: Sequence[str]) -> Callable[[Exps], tuple]:
        """Sort key for exponent tuples laid out over ``variables``."""
        if self.kind == "lex":
            return lambda e: tuple(e)
        if self.kind == "grevlex":
            return _grevlex_key
        if self.kind != "block":
            raise ValueError(f"unknown monomial order {self.kind!r}")
        ranks = sorted({self.role_of(v) for v in variables})
        blocks = [[i for i, v in enumerate(variables) if self.role_of(v) == r] for r in ranks]
        if len(blocks) == 1:
            return _grevlex_key

        def key(e: Exps) -> tuple:
            return tuple(_grevlex_key([e[i] for i in b]) for b in blocks)

        return key


DEFAULT_ORDER = MonomialOrder()


# ---------------------------------------------------------------------------
# the polynomial type


def _remap(terms: dict[Exps, CycNum], src: tuple[str, ...], dst: tuple[str, ...]) -> dict[Exps, CycNum]:
    if src == dst:
        return terms
    pos = [dst.index(v) for v in src]
    width = len(dst)
    out = {}
    for e, c in terms.items():
        new = [0] * width
        for i, k in zip(pos, e):
            new[i] = k
        out[tuple(new)] = c
    return out


def _merge_vars(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    if a == b:
        return a
    return tuple(sorted(set(a) | set(b), key=var_key))


class MPoly:
    """Immutable sparse polynomial with CycNum coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: tuple[str, ...], terms: dict[Exps, CycNum], *, canonical: bool = False):
        if not canonical:
            terms = {e: c for e, c in terms.items() if not c.is_zero()}
            used = [any(e[i] for e in terms) for i in range(len(vars))]
            if not all(used):
                keep = [i for i, u in enumerate(used) if u]
                vars = tuple(vars[i] for i in keep)
                terms = {tuple(e[i] for i in keep): c for e, c in terms.items()}
        self.vars = vars
        self.terms = terms
        self._hash = None

    # --- constructors ---

    @classmethod
    def zero(cls) -> MPoly:
        return cls((), {}, canonical=True)

    @classmethod
    def const(cls, c: Scalar) -> MPoly:
        c = CycNum.coerce(c)
        return cls((), {(): c} if not c.is_zero() else {}, canonical=True)

    @classmethod
    def var(cls, name: str) -> MPoly:
        return cls((name,), {(1,): ONE}, canonical=True)

    @classmethod
    def coerce(cls, value: MPoly | Scalar | str) -> MPoly:
        if isinstance(value, MPoly):
            return value
        if isinstance(value, str):
            return parse(value)
        return cls.const(value)

    @classmethod
    def from_terms(cls, vars: Sequence[str], terms: Mapping[Exps, Scalar]) -> MPoly:
        vars = tuple(vars)
        order = sorted(range(len(vars)), key=lambda i: var_key(vars[i]))
        svars = tuple(vars[i] for i in order)
        out: dict[Exps, CycNum] = {}
        for e, c in terms.items():
            k = tuple(e[i] for i in order)
            out[k] = out.get(k, ZERO) + CycNum.coerce(c)
        return cls(svars, out)

    # --- structure ---

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.vars

    def constant_value(self) -> CycNum:
        if self.vars:
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), ZERO)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, names: Iterable[str]) -> int:
        idx = [i for i, v in enumerate(self.vars) if v in set(names)]
        return max((sum(e[i] for i in idx) for e in self.terms), default=-1)

    def is_homogeneous(self, names: Iterable[str] | None = None) -> bool:
        """Homogeneity in ``names`` (all variables by default); zero is homogeneous."""
        if names is None:
            degs = {sum(e) for e in self.terms}
        else:
            names = set(names)
            idx = [i for i, v in enumerate(self.vars) if v in names]
            degs = {sum(e[i] for i in idx) for e in self.terms}
        return len(degs) <= 1

    def variables(self) -> tuple[str, ...]:
        return self.vars

    def conductor(self) -> int:
        from math import lcm

        n = 1
        for c in self.terms.values():
            n = lcm(n, c.n)
        return n

    def monomials(self) -> list[dict[str, int]]:
        return [{v: k for v, k in zip(self.vars, e) if k} for e in self.terms]

    def items(self) -> Iterable[tuple[dict[str, int], CycNum]]:
        for e, c in self.terms.items():
            yield {v: k for v, k in zip(self.vars, e) if k}, c

    def coefficient(self, monomial: Mapping[str, int]) -> CycNum:
        if any(v not in self.vars for v, k in monomial.items() if k):
            return ZERO
        e = tuple(monomial.get(v, 0) for v in self.vars)
        return self.terms.get(e, ZERO)

    # --- arithmetic ---

    def _aligned(self, other: MPoly) -> tuple[tuple[str, ...], dict, dict]:
        vs = _merge_vars(self.vars, other.vars)
        return vs, _remap(self.terms, self.vars, vs), _remap(other.terms, other.vars, vs)

    def __add__(self, other: MPoly | Scalar) -> MPoly:
        other = MPoly.coerce(other) if not isinstance(other, MPoly) else other
        if not other.terms:
            return self
        if not self.terms:
            return other
        vs, a, b = self._aligned(other)
        out = dict(a)
        for e, c in b.items():
            if e in out:
                s = out[e] + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return MPoly(vs, out)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()}, canonical=True)

    def __sub__(self, other: MPoly | Scalar) -> MPoly:
        other = MPoly.coerce(other) if not isinstance(other, MPoly) else other
        return self + (-other)

    def __rsub__(self, other: Scalar) -> MPoly:
        return MPoly.coerce(other) - self

    def scale(self, c: Scalar) -> MPoly:
        c = CycNum.coerce(c)
        if c.is_zero():
            return MPoly.zero()
        return MPoly(self.vars, {e: v * c for e, v in self.terms.items()}, canonical=True)

    def __mul__(self, other: MPoly | Scalar) -> MPoly:
        if not isinstance(other, MPoly):
            if isinstance(other, (CycNum, int, Fraction)):
                return self.scale(other)
            return NotImplemented
        if not self.terms or not other.terms:
            return MPoly.zero()
        if not other.vars:
            return self.scale(other.terms[()])
        if not self.vars:
            return other.scale(self.terms[()])
        vs, a, b = self._aligned(other)
        out: dict[Exps, CycNum] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple([x + y for x, y in zip(e1, e2)])
                p = c1 * c2
                if e in out:
                    out[e] = out[e] + p
                else:
                    out[e] = p
        return MPoly(vs, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> MPoly:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = MPoly.const(1), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, exps: Mapping[str, int], c: Scalar = 1) -> MPoly:
        mono = MPoly.from_terms(tuple(exps), {tuple(exps.values()): c})
        return self * mono

    # --- comparison ---

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (CycNum, int, Fraction)):
            other = MPoly.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # --- calculus and substitution ---

    def derivative(self, v: str) -> MPoly:
        if v not in self.vars:
            return MPoly.zero()
        i = self.vars.index(v)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1 :]
                out[ne] = c * k
        return MPoly(self.vars, out)

    def substitute(self, assignment: Mapping[str, MPoly | Scalar | str]) -> MPoly:
        """Simultaneous substitution of variables by polynomials."""
        images = []
        for v in self.vars:
            if v in assignment:
                images.append(MPoly.coerce(assignment[v]))
            else:
                images.append(MPoly.var(v))
        powers: list[dict[int, MPoly]] = [{0: MPoly.const(1), 1: img} for img in images]

        def power(i: int, k: int) -> MPoly:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        acc: dict[Exps, CycNum] = {}
        acc_vars: tuple[str, ...] = ()
        result = MPoly.zero()
        # group terms by identical image products to keep the accumulation flat
        for e, c in self.terms.items():
            term = MPoly.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        del acc, acc_vars
        return result

    def evaluate(self, point: Mapping[str, Scalar]) -> MPoly:
        return self.substitute({v: MPoly.const(c) for v, c in point.items()})

    def coefficients_in(self, names: Sequence[str]) -> dict[Exps, MPoly]:
        """Split into {exponents over names: coefficient polynomial in the other variables}."""
        names = tuple(names)
        idx = [self.vars.index(v) if v in self.vars else -1 for v in names]
        rest = [i for i, v in enumerate(self.vars) if v not in names]
        rest_vars = tuple(self.vars[i] for i in rest)
        groups: dict[Exps, dict[Exps, CycNum]] = {}
        for e, c in self.terms.items():
            key = tuple(e[i] if i >= 0 else 0 for i in idx)
            groups.setdefault(key, {})[tuple(e[i] for i in rest)] = c
        return {k: MPoly(rest_vars, t) for k, t in groups.items()}

    # --- printing ---

    def sorted_terms(self, order: MonomialOrder = DEFAULT_ORDER) -> list[tuple[Exps, CycNum]]:
        key = order.key_function(self.vars)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for n, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if c.is_simple():
                negative = c.coeffs[[i for i, x in enumerate(c.coeffs) if x][0]] < 0
                body_c = str(-c) if negative else str(c)
                if mono:
                    body = mono if body_c == "1" else f"{body_c}*{mono}"
                else:
                    body = body_c
            else:
                negative = False
                body = f"({c})*{mono}" if mono else (f"({c})" if n else str(c))
            if n == 0:
                out = ("-" if negative else "") + body
            else:
                out += (" - " if negative else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"MPoly({self})"


def as_poly(value: MPoly | Scalar | str) -> MPoly:
    return MPoly.coerce(value)


def const(c: Scalar) -> MPoly:
    return MPoly.const(c)


def var(name: str) -> MPoly:
    return MPoly.var(name)


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    """Syntax error in a polynomial expression; ``offset`` is 0-based."""

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}" + (f" in {text!r}" if text else ""))
        self.offset = offset
        self.text = text


@dataclass(frozen=True)
class VarTable:
    """Declared variable names with role tags; the order induces the monomial order."""

    names: tuple[str, ...]
    roles: tuple[tuple[str, int], ...] = ()

    @classmethod
    def from_roles(cls, groups: Mapping[str, Sequence[str]]) -> VarTable:
        names: list[str] = []
        roles: list[tuple[str, int]] = []
        for role, vs in groups.items():
            r = ROLE_NAMES[role]
            for v in vs:
                if v in names:
                    raise ValueError(f"variable {v!r} declared twice")
                names.append(v)
                roles.append((v, r))
        return cls(tuple(names), tuple(roles))

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def role(self, name: str) -> int:
        return dict(self.roles).get(name, default_role(name))

    def order(self, kind: str = "block") -> MonomialOrder:
        return MonomialOrder(kind, self.names, self.roles)

    def with_names(self, extra: Iterable[str], role: str = "unknown") -> VarTable:
        new = [v for v in extra if v not in self.names]
        return VarTable(self.names + tuple(new), self.roles + tuple((v, ROLE_NAMES[role]) for v in new))


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[^\W\d]\w*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            off = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[off]!r}", off, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, table: VarTable | Iterable[str] | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        if table is None:
            self.allowed = None
        elif isinstance(table, VarTable):
            self.allowed = set(table.names)
        else:
            self.allowed = set(table)

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str, tok: tuple[str, str, int] | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.text)

    def expect(self, value: str) -> None:
        tok = self.take()
        if tok[1] != value or tok[0] not in ("op",):
            raise self.error(f"expected {value!r}", tok)

    def parse(self) -> MPoly:
        result = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return result

    def expr(self) -> MPoly:
        result = self.signed_term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.signed_term()
            result = result + t if op == "+" else result - t
        return result

    def signed_term(self) -> MPoly:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return -self.term()
        return self.term()

    def term(self) -> MPoly:
        result = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            result = result * self.factor()
        return result

    def factor(self) -> MPoly:
        base = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise self.error("expected a nonnegative integer exponent", tok)
            base = base ** int(tok[1])
        return base

    def base(self) -> MPoly:
        tok = self.take()
        kind, value, off = tok
        if kind == "num":
            num = int(value)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                dtok = self.take()
                if dtok[0] != "num":
                    raise self.error("expected a positive integer denominator", dtok)
                den = int(dtok[1])
                if den == 0:
                    raise ParseError("zero denominator", dtok[2], self.text)
                return MPoly.const(Fraction(num, den))
            return MPoly.const(num)
        if kind == "name":
            if value == "zeta":
                self.expect("(")
                ntok = self.take()
                if ntok[0] != "num" or int(ntok[1]) <= 0:
                    raise self.error("expected a positive integer conductor", ntok)
                self.expect(")")
                return MPoly.const(CycNum.zeta(int(ntok[1])))
            if self.allowed is not None and value not in self.allowed:
                raise ParseError(f"unknown variable {value!r}", off, self.text)
            return MPoly.var(value)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected {value!r}", tok)


def parse(text: str, vars: VarTable | Iterable[str] | None = None) -> MPoly:
    """Parse the polynomial expression grammar; ``vars`` restricts allowed names."""
    return _Parser(text, vars).parse()


# ---------------------------------------------------------------------------
# substitution, differentiation, linear changes


def substitute(f: MPoly, assignment: Mapping[str, MPoly | Scalar | str]) -> MPoly:
    return f.substitute(assignment)


def derivative(f: MPoly, v: str) -> MPoly:
    return f.derivative(v)


def linear_change(f: MPoly, M, coords: Sequence[str] | None = None) -> MPoly:
    """Evaluate f on the row vector (x) * M.

    ``M`` is either an object with ``rows`` and ``coords`` attributes (a
    LinearAction) or a square sequence of rows; coordinate j becomes
    sum_i x_i * M[i][j].
    """
    rows = getattr(M, "rows", M)
    if coords is None:
        coords = getattr(M, "coords", None)
    if coords is None:
        raise ValueError("coordinates must be given for a bare matrix")
    n = len(coords)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"matrix is not {n}x{n}")
    images = {}
    for j, v in enumerate(coords):
        img = MPoly.zero()
        for i, u in enumerate(coords):
            entry = MPoly.coerce(rows[i][j])
            if entry:
                img = img + MPoly.var(u) * entry
        images[v] = img
    return f.substitute(images)


# ---------------------------------------------------------------------------
# reduction modulo relations


@dataclass(frozen=True)
class RelationSet:
    """Rewrite rules p -> 0 with designated leading monomials.

    The designated leading monomial defaults to the leading monomial under
    ``order``; an explicit designation must agree with the order, otherwise
    division could fail to terminate.
    """

    relations: tuple[MPoly, ...] = ()
    order: MonomialOrder = DEFAULT_ORDER
    leading: tuple[dict[str, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        rels = tuple(MPoly.coerce(r) for r in self.relations)
        object.__setattr__(self, "relations", tuple(r for r in rels if r))
        computed = tuple(leading_monomial(r, self.order) for r in self.relations)
        if self.leading:
            for want, got in zip(self.leading, computed):
                if {k: v for k, v in want.items() if v} != got:
                    raise ValueError(f"designated leading term {want} is not leading under {self.order.kind}")
        object.__setattr__(self, "leading", computed)

    def __iter__(self):
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    def __bool__(self) -> bool:
        return bool(self.relations)

    def extend(self, more: Iterable[MPoly | str]) -> RelationSet:
        return RelationSet(self.relations + tuple(MPoly.coerce(m) for m in more), self.order)


def leading_term(f: MPoly, order: MonomialOrder = DEFAULT_ORDER) -> tuple[dict[str, int], CycNum]:
    if not f:
        raise ValueError("zero polynomial has no leading term")
    key = order.key_function(f.vars)
    e = max(f.terms, key=key)
    return {v: k for v, k in zip(f.vars, e) if k}, f.terms[e]


def leading_monomial(f: MPoly, order: MonomialOrder = DEFAULT_ORDER) -> dict[str, int]:
    return leading_term(f, order)[0]


def divide_terms(
    f: MPoly, divisors: Sequence[MPoly], order: MonomialOrder = DEFAULT_ORDER
) -> tuple[list[MPoly], MPoly]:
    """Multivariate division: f = sum(q_i * g_i) + r, r has no term divisible by any LT(g_i)."""
    divisors = [d for d in divisors if d]
    names = set(f.vars)
    for d in divisors:
        names |= set(d.vars)
    vs = order.variables(names)
    key = order.key_function(vs)
    p = _remap(f.terms, f.vars, vs) if f.vars != vs else dict(f.terms)
    p = dict(p)
    ds = []
    for d in divisors:
        t = _remap(d.terms, d.vars, vs)
        lm = max(t, key=key)
        ds.append((t, lm, t[lm].inverse()))
    quots: list[dict[Exps, CycNum]] = [{} for _ in ds]
    rem: dict[Exps, CycNum] = {}
    while p:
        lm = max(p, key=key)
        lc = p[lm]
        for qi, (t, dlm, dinv) in enumerate(ds):
            if all(a >= b for a, b in zip(lm, dlm)):
                shift = tuple(a - b for a, b in zip(lm, dlm))
                factor = lc * dinv
                q = quots[qi]
                q[shift] = q.get(shift, ZERO) + factor
                for e, c in t.items():
                    ne = tuple(a + b for a, b in zip(e, shift))
                    v = p.get(ne, ZERO) - factor * c
                    if v.is_zero():
                        p.pop(ne, None)
                    else:
                        p[ne] = v
                break
        else:
            rem[lm] = lc
            del p[lm]
    return [MPoly(vs, q) for q in quots], MPoly(vs, rem)


def reduce_mod(f: MPoly, rels: RelationSet | Iterable[MPoly | str], order: MonomialOrder | None = None) -> MPoly:
    """Normal form of f under multivariate division by the relations."""
    if not isinstance(rels, RelationSet):
        rels = RelationSet(tuple(MPoly.coerce(r) for r in rels), order or DEFAULT_ORDER)
    elif order is not None and order != rels.order:
        rels = RelationSet(rels.relations, order)
    if not rels:
        return f
    return divide_terms(f, rels.relations, rels.order)[1]


def divide_exact(f: MPoly, g: MPoly, order: MonomialOrder = DEFAULT_ORDER) -> MPoly | None:
    """f / g if g divides f exactly, else None."""
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    (q,), r = divide_terms(f, [g], order)
    return q if not r else None


# ---------------------------------------------------------------------------
# semi-invariance


def invariance_residual(
    f: MPoly, M, multiplier: MPoly | Scalar, rels: RelationSet | Iterable[MPoly] = (), coords: Sequence[str] | None = None
) -> MPoly:
    """reduce(f(x*M) - multiplier*f) modulo rels; zero iff the identity holds."""
    g = linear_change(f, M, coords)
    return reduce_mod(g - MPoly.coerce(multiplier) * f, rels)


def find_multiplier(
    f: MPoly,
    M,
    mult_vars: Iterable[str] | None = None,
    rels: RelationSet | Iterable[MPoly] = (),
    coords: Sequence[str] | None = None,
) -> tuple[MPoly | None, MPoly]:
    """(lambda, residual) with f(x*M) = lambda*f modulo rels, or (None, residual).

    The multiplier is read off one reference monomial of f (preferring one
    with a constant coefficient) and then verified on every monomial.  On
    failure the residual is f(x*M) - lambda_guess*f reduced modulo rels.
    """
    if not f:
        raise ValueError("semi-invariance of the zero polynomial is undefined")
    coords = tuple(coords if coords is not None else getattr(M, "coords"))
    if not f.is_homogeneous(coords):
        raise ValueError("semi-invariance needs a homogeneous polynomial")
    if not isinstance(rels, RelationSet):
        rels = RelationSet(tuple(rels))
    g = reduce_mod(linear_change(f, M, coords), rels)
    fr = reduce_mod(f, rels)
    fc = fr.coefficients_in(coords)
    gc = g.coefficients_in(coords)
    ref = None
    for mono in sorted(fc, reverse=True):
        if fc[mono].is_constant():
            ref = mono
            break
    if ref is None:
        ref = max(fc)
    lam = divide_exact(gc.get(ref, MPoly.zero()), fc[ref])
    if lam is None:
        guess = MPoly.const(1)
        return None, reduce_mod(g - guess * fr, rels)
    lam = reduce_mod(lam, rels)
    residual = reduce_mod(g - lam * fr, rels)
    if residual:
        return None, residual
    if mult_vars is not None and not set(lam.vars) <= set(mult_vars):
        return None, residual
    return lam, residual


def semi_invariance(
    f: MPoly,
    M,
    mult_vars: Iterable[str] | None = None,
    rels: RelationSet | Iterable[MPoly] = (),
    coords: Sequence[str] | None = None,
) -> MPoly | None:
    """The multiplier lambda with f(x*M) = lambda*f, or None if there is none."""
    return find_multiplier(f, M, mult_vars, rels, coords)[0]
