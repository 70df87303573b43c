"""Exact arithmetic in cyclotomic fields Q(zeta_n).

An element is stored as its canonical residue modulo the n-th cyclotomic
polynomial, in the power basis 1, zeta, ..., zeta^(phi(n)-1).  Elements of
different conductors are combined by lifting both into Q(zeta_lcm).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Union

Rational = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    # x^n - 1 divided by Phi_d for all proper divisors d
    num = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        den = cyclotomic_polynomial(d)
        quot = [0] * (len(num) - len(den) + 1)
        rem = list(num)
        for i in range(len(quot) - 1, -1, -1):
            q = rem[i + len(den) - 1]  # den is monic
            quot[i] = q
            if q:
                for j, c in enumerate(den):
                    rem[i + j] -= q * c
        num = quot
    return tuple(num)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k is the reduction of zeta_n^k (0 <= k < n) in the power basis."""
    phi = totient(n)
    cyc = cyclotomic_polynomial(n)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by zeta and reduce the overflow with zeta^phi = -sum(cyc[:phi] * zeta^i)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * cyc[i]
    return tuple(rows)


def _normal_conductor(n: int) -> int:
    # Q(zeta_2m) = Q(zeta_m) for odd m; keep the smaller conductor
    return n // 2 if n % 4 == 2 else n


def _reduce(n: int, dense: dict[int, Fraction]) -> tuple[Fraction, ...]:
    phi = totient(n)
    table = _power_table(n)
    out = [Fraction(0)] * phi
    for k, c in dense.items():
        if not c:
            continue
        row = table[k % n]
        for i, r in enumerate(row):
            if r:
                out[i] += r * c
    return tuple(out)


class CycNum:
    """An element of Q(zeta_n).  Immutable."""

    __slots__ = ("n", "coeffs", "_hash")

    def __init__(self, n: int, coeffs: Iterable[Rational]):
        # callers pass canonical data; use CycNum.make for arbitrary input
        self.n = n
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        self._hash = None

    # --- construction -------------------------------------------------

    @classmethod
    def make(cls, n: int, terms: Iterable[tuple[int, Rational]]) -> CycNum:
        """Build sum(c * zeta_n^k for k, c in terms), canonically reduced."""
        if n <= 0:
            raise ValueError(f"conductor must be positive, got {n}")
        dense: dict[int, Fraction] = {}
        m = _normal_conductor(n)
        for k, c in terms:
            if m != n:
                # zeta_n = -zeta_m^((m+1)/2) when n = 2m with m odd
                k2 = (k * (m + 1) // 2) % m if m > 1 else 0
                c = Fraction(c) * (-1 if k % 2 else 1)
                k = k2
            k %= m
            dense[k] = dense.get(k, Fraction(0)) + Fraction(c)
        return cls(m, _reduce(m, dense))._shrink()

    @classmethod
    def rational(cls, q: Rational) -> CycNum:
        return cls(1, (q,))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> CycNum:
        return cls.make(n, [(k, 1)])

    @classmethod
    def coerce(cls, value: CycNum | Rational) -> CycNum:
        if isinstance(value, CycNum):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to CycNum")

    def _shrink(self) -> CycNum:
        if self.n > 1 and not any(self.coeffs[1:]):
            return CycNum(1, self.coeffs[:1])
        return self

    # --- structure ----------------------------------------------------

    @property
    def conductor(self) -> int:
        return self.n

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.n == 1 and self.coeffs[0] == 1

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def lift(self, m: int) -> CycNum:
        """Image in Q(zeta_m) under zeta_n -> zeta_m^(m/n)."""
        if m <= 0 or m % self.n:
            raise ValueError(f"cannot lift conductor {self.n} to {m}")
        m = _normal_conductor(m) if _normal_conductor(m) % self.n == 0 else m
        if m == self.n:
            return self
        step = m // self.n
        dense = {k * step: c for k, c in enumerate(self.coeffs) if c}
        return CycNum(m, _reduce(m, dense))

    def _common(self, other: CycNum) -> tuple[CycNum, CycNum]:
        if self.n == other.n:
            return self, other
        if other.n == 1:
            return self, CycNum(self.n, other.coeffs + (Fraction(0),) * (totient(self.n) - 1))
        if self.n == 1:
            return CycNum(other.n, self.coeffs + (Fraction(0),) * (totient(other.n) - 1)), other
        m = _lcm(self.n, other.n)
        return self.lift(m), other.lift(m)

    # --- arithmetic ---------------------------------------------------

    def __add__(self, other: CycNum | Rational) -> CycNum:
        if not isinstance(other, CycNum):
            if isinstance(other, (int, Fraction)):
                return CycNum(self.n, (self.coeffs[0] + other,) + self.coeffs[1:])._shrink()
            return NotImplemented
        a, b = self._common(other)
        return CycNum(a.n, [x + y for x, y in zip(a.coeffs, b.coeffs)])._shrink()

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum(self.n, [-x for x in self.coeffs])

    def __sub__(self, other: CycNum | Rational) -> CycNum:
        if not isinstance(other, (CycNum, int, Fraction)):
            return NotImplemented
        return self + (-CycNum.coerce(other))

    def __rsub__(self, other: Rational) -> CycNum:
        return CycNum.coerce(other) - self

    def __mul__(self, other: CycNum | Rational) -> CycNum:
        if not isinstance(other, CycNum):
            if isinstance(other, (int, Fraction)):
                if not other:
                    return ZERO
                return CycNum(self.n, [x * other for x in self.coeffs])
            return NotImplemented
        if other.n == 1:
            c = other.coeffs[0]
            return ZERO if not c else CycNum(self.n, [x * c for x in self.coeffs])
        if self.n == 1:
            c = self.coeffs[0]
            return ZERO if not c else CycNum(other.n, [x * c for x in other.coeffs])
        a, b = self._common(other)
        dense: dict[int, Fraction] = {}
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    dense[i + j] = dense.get(i + j, 0) + x * y
        return CycNum(a.n, _reduce(a.n, dense))._shrink()

    __rmul__ = __mul__

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self.n == 1:
            return CycNum(1, (1 / self.coeffs[0],))
        n, phi = self.n, totient(self.n)
        # column j of the multiplication matrix is self * zeta^j
        cols = []
        for j in range(phi):
            dense = {i + j: c for i, c in enumerate(self.coeffs) if c}
            cols.append(_reduce(n, dense))
        aug = [[cols[j][i] for j in range(phi)] + [Fraction(int(i == 0))] for i in range(phi)]
        for c in range(phi):
            piv = next(r for r in range(c, phi) if aug[r][c])
            aug[c], aug[piv] = aug[piv], aug[c]
            inv = 1 / aug[c][c]
            aug[c] = [v * inv for v in aug[c]]
            for r in range(phi):
                if r != c and aug[r][c]:
                    f = aug[r][c]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
        return CycNum(n, [aug[i][phi] for i in range(phi)])._shrink()

    def __truediv__(self, other: CycNum | Rational) -> CycNum:
        if not isinstance(other, (CycNum, int, Fraction)):
            return NotImplemented
        return self * CycNum.coerce(other).inverse()

    def __rtruediv__(self, other: Rational) -> CycNum:
        return CycNum.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> CycNum:
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # --- comparison ---------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycNum):
            return NotImplemented
        if self.n == other.n:
            return self.coeffs == other.coeffs
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def normalized_trace(self) -> Fraction:
        """Tr(a) / [Q(zeta_n):Q]; independent of the conductor used to store a."""
        n = self.n
        total = Fraction(0)
        for k, c in enumerate(self.coeffs):
            if c:
                m = n // gcd(n, k)
                total += c * Fraction(_mobius(m), totient(m))
        return total

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.normalized_trace(), (self * self).normalized_trace()))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    # --- printing -----------------------------------------------------

    def __str__(self) -> str:
        parts: list[str] = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                z = f"zeta({self.n})" if k == 1 else f"zeta({self.n})^{k}"
                body = z if abs(c) == 1 else f"{abs(c)}*{z}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"CycNum({self})"

    def is_simple(self) -> bool:
        """True when str(self) is a single signed product (no parentheses needed)."""
        return sum(1 for c in self.coeffs if c) <= 1


ZERO = CycNum(1, (0,))
ONE = CycNum(1, (1,))


def cyc_make(n: int, terms: Iterable[tuple[int, Rational]]) -> CycNum:
    return CycNum.make(n, terms)


def cyc_add(a: CycNum, b: CycNum) -> CycNum:
    return a + b


def cyc_mul(a: CycNum, b: CycNum) -> CycNum:
    return a * b


def cyc_inv(a: CycNum) -> CycNum:
    return a.inverse()


def cyc_lift(a: CycNum, m: int) -> CycNum:
    return a.lift(m)


def _odd_prime_factors(n: int) -> list[int]:
    out, p = [], 3
    while n % 2 == 0:
        n //= 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _quadratic_units(conductor: int) -> tuple[CycNum, ...]:
    """Square roots of p* = (-1)^((p-1)/2) p for odd p | conductor, and of 2 when 8 | conductor."""
    roots = []
    for p in _odd_prime_factors(conductor):
        # quadratic Gauss sum: sum of Legendre symbols times zeta_p^k
        squares = {k * k % p for k in range(1, p)}
        roots.append(CycNum.make(p, [(k, 1 if k in squares else -1) for k in range(1, p)]))
    if conductor % 8 == 0:
        roots.append(CycNum.zeta(8) + CycNum.zeta(8, 7))
    return tuple(roots)


def sqrt_in_field(a: CycNum, conductor: int) -> CycNum | None:
    """A square root of a inside Q(zeta_conductor), or None if none is found.

    Searches a = (u * g)^2 * q with u a root of unity, g a product of
    quadratic Gauss sums and q a rational square.  This finds every square
    root of an element of the form (rational) * (root of unity).
    """
    if a.is_zero():
        return ZERO
    big = conductor if conductor % 2 == 0 else 2 * conductor
    units = _quadratic_units(conductor)
    gauss = [ONE]
    for g in units:
        gauss += [x * g for x in gauss]
    for j in range(big):
        u = CycNum.zeta(big, j)
        for g in gauss:
            cand = a * (u * u * g * g).inverse()
            if not cand.is_rational() or cand.to_fraction() < 0:
                continue
            r = _rational_sqrt(cand.to_fraction())
            if r is not None:
                return u * g * r
    return None


def _rational_sqrt(q: Fraction) -> Fraction | None:
    from math import isqrt

    p, d = q.numerator, q.denominator
    rp, rd = isqrt(p), isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Fraction(rp, rd)
    return None
