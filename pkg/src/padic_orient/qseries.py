"""Truncated q-expansions carrying weight, level and nebentypus tags."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .chars import DirichletCharacter, parse_character
from .cyclo import CycRing, CycScalar
from .errors import ParameterError, RingMismatch

__all__ = ["QExpansion", "qexp_arith", "qexp_reduce_padic"]


def _merge_tags(f: "QExpansion", g: "QExpansion") -> dict:
    weight = f.weight if f.weight == g.weight else None
    chi = f.chi if f.chi == g.chi else None
    return {"weight": weight, "level": math.lcm(f.level, g.level), "chi": chi}


@dataclass(frozen=True, eq=False)
class QExpansion:
    """a_0 + a_1 q + ... + a_Q q^Q with all a_n in one CycRing.

    Tags are advisory: `weight` may be None for sums across weights, and `chi`
    is None for forms without a nebentypus (operators needing one refuse them).
    Equality compares coefficients up to the smaller precision.
    """

    ring: CycRing
    coeffs: tuple
    weight: int | None = None
    level: int = 1
    chi: DirichletCharacter | None = None

    # -- constructors --------------------------------------------------------
    @classmethod
    def from_values(cls, ring: CycRing, values: Sequence, **tags) -> "QExpansion":
        return cls(ring, tuple(v if isinstance(v, CycScalar) else ring(v) for v in values), **tags)

    @classmethod
    def zero(cls, ring: CycRing, Q: int, **tags) -> "QExpansion":
        z = ring.zero()
        return cls(ring, (z,) * (Q + 1), **tags)

    @classmethod
    def constant(cls, ring: CycRing, value, Q: int, **tags) -> "QExpansion":
        z = ring.zero()
        v = value if isinstance(value, CycScalar) else ring(value)
        return cls(ring, (v,) + (z,) * Q, **tags)

    @classmethod
    def monomial(cls, ring: CycRing, n: int, Q: int, value=1, **tags) -> "QExpansion":
        vals = [ring.zero()] * (Q + 1)
        if n <= Q:
            vals[n] = value if isinstance(value, CycScalar) else ring(value)
        return cls(ring, tuple(vals), **tags)

    # -- basic shape ----------------------------------------------------------
    @property
    def q_prec(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> CycScalar:
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def retag(self, **tags) -> "QExpansion":
        return replace(self, **tags)

    def truncate(self, Q: int) -> "QExpansion":
        if Q > self.q_prec:
            raise ParameterError(f"cannot extend precision {self.q_prec} to {Q}")
        return replace(self, coeffs=self.coeffs[: Q + 1])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def valuation(self, p: int | None = None, start: int = 0):
        """Minimum p-adic valuation over coefficients start..Q."""
        return min((c.valuation(p) for c in self.coeffs[start:]), default=float("inf"))

    # -- arithmetic -----------------------------------------------------------
    def _check(self, other: "QExpansion"):
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        self._check(other)
        n = min(len(self), len(other))
        coeffs = tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))
        return QExpansion(self.ring, coeffs, **_merge_tags(self, other))

    def __sub__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        self._check(other)
        n = min(len(self), len(other))
        coeffs = tuple(a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))
        return QExpansion(self.ring, coeffs, **_merge_tags(self, other))

    def __neg__(self):
        return replace(self, coeffs=tuple(-a for a in self.coeffs))

    def scale(self, s) -> "QExpansion":
        if isinstance(s, CycScalar) and s.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {s.ring}")
        return replace(self, coeffs=tuple(a * s for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycScalar)):
            return self.scale(other)
        if not isinstance(other, QExpansion):
            return NotImplemented
        self._check(other)
        n = min(len(self), len(other))
        a, b = self.coeffs, other.coeffs
        out = []
        zero = self.ring.zero()
        nz_a = [i for i in range(n) if not a[i].is_zero()]
        for m in range(n):
            acc = zero
            for i in nz_a:
                if i > m:
                    break
                bj = b[m - i]
                if bj:
                    acc = acc + a[i] * bj
            out.append(acc)
        if self.weight is not None and other.weight is not None:
            weight = self.weight + other.weight
        else:
            weight = None
        if self.chi is not None and self.chi.is_trivial:
            chi = other.chi
        elif other.chi is not None and other.chi.is_trivial:
            chi = self.chi
        else:
            chi = None
        return QExpansion(self.ring, tuple(out), weight, math.lcm(self.level, other.level), chi)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.ring != other.ring:
            return False
        n = min(len(self), len(other))
        return self.coeffs[:n] == other.coeffs[:n]

    __hash__ = None

    # -- reduction ------------------------------------------------------------
    def reduce(self, target: CycRing) -> "QExpansion":
        return replace(self, ring=target, coeffs=tuple(c.reduce(target) for c in self.coeffs))

    # -- serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "k": self.weight,
            "N": self.level,
            "chi": None if self.chi is None else self.chi.name,
            "coeffs": [c.coords_str() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QExpansion":
        r = obj["ring"]
        ring = CycRing(r["L"], r.get("p"), r.get("M")) if r["flavor"] == "residue" else CycRing(r["L"])
        coeffs = tuple(ring._wrap([Fraction(x) for x in c]) for c in obj["coeffs"])
        for c in coeffs:
            if len(c.c) != ring.degree:
                raise ParameterError(f"coefficient has {len(c.c)} coordinates, ring degree {ring.degree}")
        chi = parse_character(obj["chi"]) if obj.get("chi") else None
        return cls(ring, coeffs, obj.get("k"), obj.get("N", 1), chi)

    def __repr__(self):
        head = ", ".join(
            str(c.c[0]) if len(c.c) == 1 else str([str(x) for x in c.c]) for c in self.coeffs[:6]
        )
        more = ", ..." if len(self) > 6 else ""
        return f"QExpansion(k={self.weight}, N={self.level}, chi={self.chi and self.chi.name}, Q={self.q_prec}: [{head}{more}])"


def qexp_arith(op: str, f: QExpansion, g) -> QExpansion:
    """Dispatch add / sub / scale / mul."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "scale":
        return f.scale(g)
    if op == "mul":
        return f * g
    raise ParameterError(f"unknown q-expansion operation {op!r}")


def qexp_reduce_padic(f: QExpansion, p: int, M: int) -> QExpansion:
    """Coefficientwise reduction of a rational-flavor series mod p^M."""
    if f.ring.is_residue:
        raise RingMismatch("series is already in residue flavor")
    return f.reduce(f.ring.residue(p, M))
