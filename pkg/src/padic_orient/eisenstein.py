"""Eisenstein series G_k^chi as tagged q-expansions.

Normalization: G_k^chi = L(1-k, chi) + 2 * sum_{n>=1} q^n sum_{d|n} chi(d) d^(k-1),
for both the level-1 series (trivial chi mod 1, constant zeta(1-k)) and the
twisted ones.  This is twice the usual level-1 normalization -B_k/2k + sum sigma.
When chi(-1) != (-1)^k the series is defined to be zero.
"""
from __future__ import annotations

from functools import lru_cache

from .chars import (
    DirichletCharacter,
    enumerate_characters,
    l_value,
    l_value_mod,
    stabilized_l_value,
)
from .cyclo import CycRing, pow_reduce
from .errors import ParameterError
from .qseries import QExpansion

__all__ = [
    "eisenstein_chi",
    "eisenstein_level_one",
    "stabilized_eisenstein",
    "trivial_character",
    "NORMALIZATION",
]

NORMALIZATION = "G_k^chi = L(1-k,chi) + 2*sum_n q^n sum_{d|n} chi(d) d^(k-1); zero when chi(-1) != (-1)^k"


def trivial_character() -> DirichletCharacter:
    return enumerate_characters(1)[0]


@lru_cache(maxsize=None)
def _divisors_upto(Q: int) -> tuple[tuple[int, ...], ...]:
    divs: list[list[int]] = [[] for _ in range(Q + 1)]
    for d in range(1, Q + 1):
        for m in range(d, Q + 1, d):
            divs[m].append(d)
    return tuple(tuple(x) for x in divs)


def _check_ring(chi: DirichletCharacter, ring: CycRing):
    if ring.L % chi.order:
        raise ParameterError(f"ring conductor {ring.L} cannot hold values of {chi}")


def _divisor_sums(k: int, chi: DirichletCharacter, Q: int, ring: CycRing, skip_p: int | None = None):
    """[2 * sum_{d|n, p !| d} chi(d) d^(k-1) for n = 1..Q] as ring elements."""
    divs = _divisors_upto(Q)
    out = []
    for n in range(1, Q + 1):
        weights: dict = {}
        for d in divs[n]:
            if skip_p is not None and d % skip_p == 0:
                continue
            a = chi.angle(d)
            if a is None:
                continue
            if ring.is_residue:
                t = pow_reduce(d, k - 1, ring.p, ring.M)
            else:
                t = d ** (k - 1)
            weights[a] = weights.get(a, 0) + t
        acc = ring.zero()
        for a, w in weights.items():
            if w:
                acc = acc + ring.root_of_unity(a) * (2 * w)
        out.append(acc)
    return out


def eisenstein_chi(k: int, chi: DirichletCharacter, Q: int, ring: CycRing | None = None,
                   cache=None) -> QExpansion:
    """G_k^chi to precision q^Q, tagged (k, N, chi).

    In residue flavor the divisor powers go through pow_reduce, so weights such
    as (p-1)p^r are fine; the constant term must be p-integral.
    """
    if k < 1:
        raise ParameterError(f"Eisenstein weight must be >= 1, got {k}")
    ring = ring or chi.natural_ring()
    _check_ring(chi, ring)
    if cache is not None:
        return cache.fetch_eisenstein(k, chi, Q, ring, lambda: eisenstein_chi(k, chi, Q, ring))
    tags = {"weight": k, "level": chi.modulus, "chi": chi}
    if chi.parity != (-1) ** k:
        return QExpansion.zero(ring, Q, **tags)
    if ring.is_residue:
        a0 = l_value_mod(chi, k, ring)
    else:
        a0 = l_value(chi, k, ring)
    return QExpansion(ring, (a0, *_divisor_sums(k, chi, Q, ring)), **tags)


def eisenstein_level_one(k: int, Q: int, ring: CycRing | None = None, cache=None) -> QExpansion:
    """Level-1 G_k (constant zeta(1-k)), built in `ring` so it can meet level-N forms."""
    return eisenstein_chi(k, trivial_character(), Q, ring or CycRing(1), cache)


def stabilized_eisenstein(k: int, chi: DirichletCharacter, Q: int, p: int,
                          ring: CycRing | None = None) -> QExpansion:
    """(1 - p^(k-1) Frob) G_k^chi built directly from its coefficients.

    Constant (1 - chi(p)p^(k-1)) L(1-k, chi); coefficients use only divisors
    prime to p.  In residue flavor the constant must be p-integral; the level-1
    case with (p-1) | k is not, and callers multiply by 1 - c^k first.
    """
    if k < 1:
        raise ParameterError(f"Eisenstein weight must be >= 1, got {k}")
    ring = ring or chi.natural_ring()
    _check_ring(chi, ring)
    tags = {"weight": k, "level": chi.modulus, "chi": chi}
    if chi.parity != (-1) ** k:
        return QExpansion.zero(ring, Q, **tags)
    M = ring.M if ring.is_residue else None
    a0 = stabilized_l_value(chi, k, p, M, ring)
    if ring.is_residue:
        a0 = a0.reduce(ring)
    return QExpansion(ring, (a0, *_divisor_sums(k, chi, Q, ring, skip_p=p)), **tags)


def stabilized_constant(k: int, chi: DirichletCharacter, p: int, M: int | None, ring: CycRing):
    """Rational-flavor constant term of (1 - p^(k-1) Frob) G_k^chi (exact or mod p^M)."""
    _check_ring(chi, ring)
    if chi.parity != (-1) ** k:
        return ring.rational().zero()
    return stabilized_l_value(chi, k, p, M, ring)


def divisor_part(k: int, chi: DirichletCharacter, Q: int, ring: CycRing, skip_p: int | None = None):
    """Coefficients a_1..a_Q of G_k^chi (or of its p-depletion when skip_p is set)."""
    _check_ring(chi, ring)
    if chi.parity != (-1) ** k:
        return [ring.zero()] * Q
    return _divisor_sums(k, chi, Q, ring, skip_p)
