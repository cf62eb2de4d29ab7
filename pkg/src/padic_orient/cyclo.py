"""Exact arithmetic in Z[zeta_L], either over Q or modulo p^M.

Elements are coordinate tuples on the power basis 1, zeta, ..., zeta^(phi(L)-1),
always reduced modulo the L-th cyclotomic polynomial.  The power basis is an
integral basis of Z[zeta_L], so when p does not divide L an element is divisible
by p^k exactly when every coordinate is.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy

from .errors import DenominatorNotPrime, NonUnit, ParameterError, RingMismatch

__all__ = [
    "CycRing",
    "CycScalar",
    "cyc_normalize",
    "cyc_invert",
    "pow_reduce",
    "vp",
    "gauss_solve",
    "SingularSystem",
]


def vp(x, p: int) -> int | float:
    """p-adic valuation of an int or Fraction; +inf for zero."""
    if x == 0:
        return float("inf")
    if isinstance(x, Fraction):
        return vp(x.numerator, p) - vp(x.denominator, p)
    x = abs(int(x))
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def _cyclotomic(L: int) -> tuple[int, ...]:
    """Coefficients of Phi_L, constant term first."""
    x = sympy.Symbol("x")
    coeffs = sympy.cyclotomic_poly(L, x, polys=True).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def _poly_reduce(a: list, phi: Sequence[int]) -> list:
    d = len(phi) - 1
    for i in range(len(a) - 1, d - 1, -1):
        t = a[i]
        if t:
            base = i - d
            for j in range(d):
                if phi[j]:
                    a[base + j] -= t * phi[j]
    if len(a) < d:
        a.extend([0] * (d - len(a)))
    return a[:d]


@lru_cache(maxsize=None)
def _zeta_powers(L: int) -> tuple[tuple[int, ...], ...]:
    phi = _cyclotomic(L)
    out = []
    for j in range(L):
        mono = [0] * (j + 1)
        mono[j] = 1
        out.append(tuple(_poly_reduce(mono, phi)))
    return tuple(out)


@dataclass(frozen=True)
class CycRing:
    """Z[zeta_L] tensored with Q (p is None) or reduced mod p^M."""

    L: int = 1
    p: int | None = None
    M: int | None = None

    def __post_init__(self):
        if self.L < 1:
            raise ParameterError(f"conductor must be positive, got {self.L}")
        if self.p is None:
            if self.M is not None:
                raise ParameterError("precision M given without a prime")
            return
        if not sympy.isprime(self.p):
            raise ParameterError(f"{self.p} is not prime")
        if self.M is None or self.M < 1:
            raise ParameterError(f"p-adic precision must be >= 1, got {self.M}")
        if self.L % self.p == 0:
            raise ParameterError(
                f"residue ring needs p not dividing the conductor (p={self.p}, L={self.L})"
            )

    # -- shape -------------------------------------------------------------
    @property
    def flavor(self) -> str:
        return "rational" if self.p is None else "residue"

    @property
    def is_residue(self) -> bool:
        return self.p is not None

    @property
    def modulus(self) -> int | None:
        return None if self.p is None else self.p**self.M

    @property
    def phi(self) -> tuple[int, ...]:
        return _cyclotomic(self.L)

    @property
    def degree(self) -> int:
        return len(self.phi) - 1

    def residue(self, p: int, M: int) -> "CycRing":
        return CycRing(self.L, p, M)

    def rational(self) -> "CycRing":
        return CycRing(self.L)

    def with_precision(self, M: int) -> "CycRing":
        return CycRing(self.L, self.p, M)

    def to_json(self) -> dict:
        return {"L": self.L, "flavor": self.flavor, "p": self.p, "M": self.M}

    # -- element construction ----------------------------------------------
    def _coord(self, x):
        if self.p is None:
            return Fraction(x)
        m = self.modulus
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DenominatorNotPrime(f"{x} has {self.p} in its denominator")
            return x.numerator * pow(x.denominator, -1, m) % m
        return int(x) % m

    def _wrap(self, coords: Iterable) -> "CycScalar":
        return CycScalar(self, tuple(self._coord(c) for c in coords))

    def __call__(self, x) -> "CycScalar":
        """Embed an integer or Fraction."""
        if isinstance(x, CycScalar):
            if x.ring != self:
                raise RingMismatch(f"{x.ring} vs {self}")
            return x
        return self._wrap([x] + [0] * (self.degree - 1))

    def zero(self) -> "CycScalar":
        return self(0)

    def one(self) -> "CycScalar":
        return self(1)

    def zeta(self, j: int = 1) -> "CycScalar":
        """The root of unity zeta_L^j."""
        return self._wrap(_zeta_powers(self.L)[j % self.L])

    def root_of_unity(self, angle: Fraction) -> "CycScalar":
        """exp(2*pi*i*angle); angle*L must be an integer."""
        j = angle * self.L
        if j.denominator != 1:
            raise ParameterError(f"exp(2 pi i {angle}) does not live in conductor {self.L}")
        return self.zeta(int(j))

    def random(self, rng, bound: int = 50) -> "CycScalar":
        if self.p is None:
            return self._wrap(
                Fraction(rng.randint(-bound, bound), rng.randint(1, 6)) for _ in range(self.degree)
            )
        return self._wrap(rng.randrange(self.modulus) for _ in range(self.degree))


class CycScalar:
    """An element of a CycRing.  Immutable."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: CycRing, c: tuple):
        self.ring = ring
        self.c = c

    def _coerce(self, other) -> "CycScalar":
        if isinstance(other, CycScalar):
            if other.ring != self.ring:
                raise RingMismatch(f"{other.ring} vs {self.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring(other)
        return NotImplemented

    def _fix(self, coords) -> "CycScalar":
        m = self.ring.modulus
        if m is not None:
            coords = [x % m for x in coords]
        return CycScalar(self.ring, tuple(coords))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._fix([a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._fix([a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._fix([-a for a in self.c])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if self.ring.p is not None and isinstance(other, Fraction):
                other = self.ring._coord(other)
            return self._fix([a * other for a in self.c])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = len(self.c)
        if d == 1:
            return self._fix([self.c[0] * o.c[0]])
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        return self._fix(_poly_reduce(prod, self.ring.phi))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return cyc_invert(self) ** (-e)
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if self.ring.p is None:
                return self._fix([a / other for a in self.c])
            return self * cyc_invert(self.ring(other))
        return self * cyc_invert(self._coerce(other))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring(other)
        if not isinstance(other, CycScalar):
            return NotImplemented
        return self.ring == other.ring and self.c == other.c

    def __hash__(self):
        return hash((self.ring, self.c))

    def __bool__(self):
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def valuation(self, p: int | None = None):
        """Minimum p-adic valuation over coordinates.

        In residue flavor zero coordinates count as M (known only to be >= M).
        """
        ring = self.ring
        if ring.p is not None:
            p = ring.p
            vals = [ring.M if x == 0 else min(vp(x, p), ring.M) for x in self.c]
            return min(vals)
        if p is None:
            raise ParameterError("valuation of a rational-flavor scalar needs a prime")
        return min(vp(x, p) for x in self.c)

    def reduce(self, target: CycRing) -> "CycScalar":
        """Ring morphism rational -> residue, or residue -> coarser residue."""
        if target.L != self.ring.L:
            raise RingMismatch(f"conductor {self.ring.L} vs {target.L}")
        if self.ring.p is not None:
            if target.p != self.ring.p or target.M > self.ring.M:
                raise RingMismatch(f"cannot reduce {self.ring} to {target}")
        return target._wrap(self.c)

    def lift(self) -> "CycScalar":
        """Residue coordinates read as integers in the rational ring."""
        return CycScalar(self.ring.rational(), tuple(Fraction(x) for x in self.c))

    def divide_by_p_power(self, e: int, target: CycRing) -> "CycScalar":
        """Exact division by p^e, landing in `target` (precision M - e or less)."""
        p = self.ring.p if self.ring.p is not None else target.p
        q = p**e
        out = []
        for x in self.c:
            if isinstance(x, Fraction):
                y = x / q
            else:
                if x % q:
                    raise NonUnit(f"coordinate {x} not divisible by {p}^{e}")
                y = x // q
            out.append(y)
        return target._wrap(out)

    def coords_str(self) -> list[str]:
        return [str(x) for x in self.c]

    def __repr__(self):
        if len(self.c) == 1:
            return f"CycScalar({self.c[0]})"
        return f"CycScalar({list(self.c)})"


def cyc_normalize(raw: Sequence, ring: CycRing) -> CycScalar:
    """Canonical representative of the polynomial sum raw[i] * zeta^i."""
    a = list(raw) if raw else [0]
    if ring.p is None:
        a = [Fraction(x) for x in a]
    return ring._wrap(_poly_reduce(a, ring.phi))


class SingularSystem(ArithmeticError):
    """A column of the system has no invertible pivot."""


def gauss_solve(A: list[list], b: list, modulus: int | None = None, p: int | None = None):
    """Solve A x = b for an m x n system with m >= n and full column rank.

    Entries are Fractions (modulus None) or ints mod `modulus` = p^M, where
    pivots must be units mod p.  Returns the solution list, or None when the
    system is inconsistent.  Raises SingularSystem when some column has no
    usable pivot.
    """
    rows = [list(r) + [v] for r, v in zip(A, b)]
    m = len(rows)
    n = len(A[0]) if A else 0

    def unit(x):
        return x != 0 if modulus is None else x % p != 0

    def inv(x):
        return 1 / x if modulus is None else pow(x, -1, modulus)

    def fix(x):
        return x if modulus is None else x % modulus

    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if unit(rows[i][col])), None)
        if piv is None:
            raise SingularSystem(f"no invertible pivot in column {col}")
        rows[r], rows[piv] = rows[piv], rows[r]
        s = inv(rows[r][col])
        rows[r] = [fix(x * s) for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][col]:
                t = rows[i][col]
                rows[i] = [fix(x - t * y) for x, y in zip(rows[i], rows[r])]
        r += 1
    for i in range(r, m):
        if fix(rows[i][n]) != 0:
            return None
    return [rows[i][n] for i in range(n)]


def cyc_invert(a: CycScalar) -> CycScalar:
    """Multiplicative inverse; NonUnit when a is not invertible in its ring."""
    ring = a.ring
    d = ring.degree
    # column i of the multiplication matrix is a * zeta^i
    cols = [(a * ring.zeta(i)).c for i in range(d)]
    A = [[cols[j][i] for j in range(d)] for i in range(d)]
    e0 = [ring._coord(1)] + [ring._coord(0)] * (d - 1)
    try:
        x = gauss_solve(A, e0, ring.modulus, ring.p)
    except SingularSystem:
        raise NonUnit(f"{a} is not a unit in {ring}") from None
    return ring._wrap(x)


def pow_reduce(d: int, e: int, p: int, M: int) -> int:
    """d^e mod p^M, reducing the exponent through the unit group when possible."""
    if e < 0:
        raise ParameterError("pow_reduce needs e >= 0")
    m = p**M
    d %= m
    if d % p:
        e %= (p - 1) * p ** (M - 1)
        return pow(d, e, m)
    if e >= M:
        return 0
    return pow(d, e, m)
