"""Shared fixtures: a sympy bridge used as an independent oracle, and hypothesis strategies."""

from __future__ import annotations

import sys
from fractions import Fraction
from functools import reduce
from math import lcm

import pytest
import sympy
from hypothesis import strategies as st

from singcubic.catalog import builtin_ids, load
from singcubic.cyclo import CycNum
from singcubic.mpoly import MPoly

ZETA = sympy.Symbol("Z")
CONDUCTORS = (1, 3, 4, 6, 12)


def common_conductor(*polys: MPoly) -> int:
    return reduce(lcm, (c.n for f in polys for _, c in f.items()), 1)


def cyc_to_sympy(c: CycNum, n: int) -> sympy.Expr:
    """c as a polynomial in Z, where Z stands for zeta_n (n a multiple of c's conductor)."""
    lifted = c.lift(n) if c.n != n else c
    return sum((sympy.Rational(q.numerator, q.denominator) * ZETA**k for k, q in enumerate(lifted.coeffs)), sympy.Integer(0))


def poly_to_sympy(f: MPoly, n: int | None = None) -> sympy.Expr:
    n = n or common_conductor(f)
    out = sympy.Integer(0)
    for mono, c in f.items():
        term = cyc_to_sympy(c, n)
        for v, k in mono.items():
            term *= sympy.Symbol(v) ** k
        out += term
    return out


def sympy_vanishes(expr: sympy.Expr, n: int) -> bool:
    """Whether expr is zero once Z is read as a primitive n-th root of unity."""
    expr = sympy.expand(expr)
    if n <= 2:
        return sympy.expand(expr.subs(ZETA, -1 if n == 2 else 1)) == 0
    return sympy.rem(expr, sympy.cyclotomic_poly(n, ZETA), ZETA) == 0


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def cycnums(draw, conductors=CONDUCTORS):
    n = draw(st.sampled_from(conductors))
    k = len(CycNum.zeta(n).coeffs) if n > 2 else 1
    coeffs = draw(st.lists(rationals, min_size=k, max_size=k))
    return CycNum.make(n, [(i, Fraction(c)) for i, c in enumerate(coeffs)])


@st.composite
def small_polys(draw, names=("x", "y", "z"), max_terms=4, max_exp=2, conductors=(1, 3, 4)):
    terms = draw(st.lists(st.tuples(st.tuples(*[st.integers(0, max_exp)] * len(names)), cycnums(conductors)), max_size=max_terms))
    f = MPoly.zero()
    for exps, c in terms:
        mono = MPoly.const(c)
        for v, k in zip(names, exps):
            mono = mono * MPoly.var(v) ** k
        f = f + mono
    return f


@pytest.fixture(scope="session")
def records():
    return {i: load(i) for i in builtin_ids()}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """List the acceptance criteria outcomes, one line each."""
    module = sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
    passed = sum(ok for ok, _ in results.values())
    terminalreporter.write_line(f"{passed}/{len(results)} criteria pass")
