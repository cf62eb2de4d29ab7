"""Dirichlet characters, generalized Bernoulli numbers and L-values at 1-k."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from .cyclo import CycRing, CycScalar, vp
from .errors import ParameterError

__all__ = [
    "DirichletCharacter",
    "enumerate_characters",
    "parse_character",
    "char_eval",
    "bernoulli_number",
    "bernoulli_poly",
    "gen_bernoulli",
    "l_value",
    "stabilized_l_value",
    "l_value_mod",
    "EXACT_WEIGHT_LIMIT",
]

# Above this weight L-values are evaluated by a truncated p-adic sum instead
# of the exact Bernoulli closed form.
EXACT_WEIGHT_LIMIT = 80


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod N.

    `angles[n]` is chi(n) as a fraction of a full turn (chi(n) = exp(2 pi i a)),
    or None when gcd(n, N) > 1.
    """

    modulus: int
    index: int
    angles: tuple

    @property
    def N(self) -> int:
        return self.modulus

    @property
    def order(self) -> int:
        return math.lcm(*(a.denominator for a in self.angles if a is not None))

    @property
    def parity(self) -> int:
        a = self.angles[(self.modulus - 1) % self.modulus]
        return 1 if a == 0 else -1

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def name(self) -> str:
        return f"{self.modulus}:{self.index}"

    def natural_ring(self) -> CycRing:
        return CycRing(math.lcm(self.modulus, self.order))

    def angle(self, n: int):
        return self.angles[n % self.modulus]

    def __repr__(self):
        return f"DirichletCharacter({self.name}, order={self.order}, parity={self.parity:+d})"


def _unit_group_generators(N: int) -> list[tuple[int, int]]:
    """(generator, order) pairs whose product is (Z/N)^x, lifted by CRT."""
    gens = []
    for q, e in sorted(sympy.factorint(N).items()):
        qe = q**e
        rest = N // qe
        local = []
        if q == 2:
            if e == 2:
                local = [(3, 2)]
            elif e >= 3:
                local = [(qe - 1, 2), (5, 2 ** (e - 2))]
        else:
            local = [(int(sympy.primitive_root(qe)), qe // q * (q - 1))]
        for g, order in local:
            lifted = int(sympy.ntheory.modular.crt([qe, rest], [g, 1])[0]) if rest > 1 else g
            gens.append((lifted % N, order))
    return gens


@lru_cache(maxsize=None)
def enumerate_characters(N: int) -> tuple[DirichletCharacter, ...]:
    """All phi(N) characters mod N, ordered by exponent vector on fixed generators."""
    if N < 1:
        raise ParameterError(f"modulus must be positive, got {N}")
    gens = _unit_group_generators(N)
    orders = [o for _, o in gens]
    dlog = {}
    for v in itertools.product(*(range(o) for o in orders)):
        n = 1
        for (g, _), e in zip(gens, v):
            n = n * pow(g, e, N) % N
        dlog[n % N] = v
    out = []
    for index, x in enumerate(itertools.product(*(range(o) for o in orders))):
        angles = []
        for n in range(N):
            if math.gcd(n, N) != 1:
                angles.append(None)
                continue
            v = dlog[n]
            a = sum((Fraction(xi * vi, o) for xi, vi, o in zip(x, v, orders)), Fraction(0))
            angles.append(a - math.floor(a))
        out.append(DirichletCharacter(N, index, tuple(angles)))
    return tuple(out)


def parse_character(cid: str) -> DirichletCharacter:
    """Look up "N:index" or "N:quad" (the unique quadratic character mod N)."""
    try:
        n_str, which = cid.split(":")
        N = int(n_str)
    except ValueError:
        raise ParameterError(f"character id must look like 'N:index' or 'N:quad', got {cid!r}")
    chars = enumerate_characters(N)
    if which == "quad":
        quads = [c for c in chars if c.order == 2]
        if len(quads) != 1:
            raise ParameterError(f"no unique quadratic character mod {N} ({len(quads)} found)")
        return quads[0]
    try:
        return chars[int(which)]
    except (ValueError, IndexError):
        raise ParameterError(f"no character {cid!r}; mod {N} has {len(chars)}")


def char_eval(chi: DirichletCharacter, n: int, ring: CycRing | None = None) -> CycScalar:
    ring = ring or chi.natural_ring()
    a = chi.angle(n)
    if a is None:
        return ring.zero()
    return ring.root_of_unity(a)


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with the convention B_1 = -1/2 (so B_n(x) = sum binom(n,j) B_j x^(n-j))."""
    if n == 1:
        return Fraction(-1, 2)
    b = sympy.bernoulli(n)
    return Fraction(int(b.p), int(b.q))


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    x = Fraction(x)
    return sum(
        (math.comb(n, j) * bernoulli_number(j) * x ** (n - j) for j in range(n + 1)),
        Fraction(0),
    )


def _combine(chi: DirichletCharacter, weights: dict, ring: CycRing) -> CycScalar:
    """sum over angles a of weights[a] * exp(2 pi i a), built in `ring`."""
    total = ring.zero()
    for a, w in weights.items():
        if w:
            total = total + ring.root_of_unity(a) * w
    return total


@lru_cache(maxsize=4096)
def _gen_bernoulli_cached(chi: DirichletCharacter, n: int, ring: CycRing) -> CycScalar:
    N = chi.modulus
    weights: dict = {}
    for r in range(1, N + 1):
        a = chi.angle(r)
        if a is None:
            continue
        weights[a] = weights.get(a, Fraction(0)) + bernoulli_poly(n, Fraction(r, N))
    scale = Fraction(N) ** (n - 1)
    return _combine(chi, {a: w * scale for a, w in weights.items()}, ring)


def gen_bernoulli(chi: DirichletCharacter, n: int, ring: CycRing | None = None) -> CycScalar:
    """B_n^chi = N^(n-1) sum_{r=1..N} chi(r) B_n(r/N), exactly (rational flavor)."""
    if n < 1:
        raise ParameterError(f"generalized Bernoulli numbers need n >= 1, got {n}")
    ring = (ring or chi.natural_ring()).rational()
    return _gen_bernoulli_cached(chi, n, ring)


def l_value(chi: DirichletCharacter, k: int, ring: CycRing | None = None) -> CycScalar:
    """L(1-k, chi) = -B_k^chi / k."""
    if k < 1:
        raise ParameterError(f"l_value needs k >= 1, got {k}")
    return gen_bernoulli(chi, k, ring) * Fraction(-1, k)


def _truncation_index(p: int, M: int) -> int:
    # term j of the expansion has valuation >= j - 2 - v_p(j) >= j - 2 - floor(log_p j),
    # which is nondecreasing in j
    def floor_log(j):
        e = 0
        while p ** (e + 1) <= j:
            e += 1
        return e

    j = 2
    while j - 2 - floor_log(j) < M:
        j += 1
    return j - 1


def _stabilized_sum(chi: DirichletCharacter, n: int, p: int, M: int, ring: CycRing) -> CycScalar:
    """A rational value congruent mod p^M to (1 - chi(p) p^(n-1)) B_n^chi / n.

    Uses the distribution relation with F = pN:

        (1 - chi(p) p^(n-1)) B_n^chi = sum_{0<a<=F, p !| a} chi(a) F^(n-1) B_n(a/F)

    expanded as sum_j binom(n,j) B_j F^(j-1) a^(n-j).  Dividing by n, term j has
    p-adic valuation at least j - 2 - v_p(j), so only j <= J matter mod p^M.
    """
    F = p * chi.modulus
    J = min(_truncation_index(p, M), n)
    weights: dict = {}
    for a in range(1, F + 1):
        if a % p == 0:
            continue
        ang = chi.angle(a)
        if ang is None:
            continue
        term = Fraction(0)
        for j in range(J + 1):
            term += math.comb(n, j) * bernoulli_number(j) * Fraction(F) ** (j - 1) * a ** (n - j)
        weights[ang] = weights.get(ang, Fraction(0)) + term
    return _combine(chi, {a: w / n for a, w in weights.items()}, ring.rational())


def stabilized_l_value(chi: DirichletCharacter, k: int, p: int, M: int | None = None,
                       ring: CycRing | None = None) -> CycScalar:
    """(1 - chi(p) p^(k-1)) L(1-k, chi).

    Exact when M is None or k is small; otherwise only correct mod p^M.  The
    result is a rational-flavor scalar; for the trivial character with
    (p-1) | k it has p in the denominator and must be multiplied by something
    divisible by p before reduction.
    """
    ring = (ring or chi.natural_ring()).rational()
    if M is None or k <= EXACT_WEIGHT_LIMIT:
        euler = ring.one() - char_eval(chi, p, ring) * p ** (k - 1)
        return euler * l_value(chi, k, ring)
    return -_stabilized_sum(chi, k, p, M, ring)


def l_value_mod(chi: DirichletCharacter, k: int, ring: CycRing) -> CycScalar:
    """L(1-k, chi) reduced into the residue ring `ring` (any weight k >= 1)."""
    if k <= EXACT_WEIGHT_LIMIT:
        return l_value(chi, k, ring).reduce(ring)
    p, M = ring.p, ring.M
    s = stabilized_l_value(chi, k, p, M, ring).reduce(ring)
    # 1 - chi(p) p^(k-1) is 1 mod p^M once k > M
    euler = ring.one() - char_eval(chi, p, ring) * pow(p, k - 1, ring.modulus)
    return s / euler


def bernoulli_valuation(chi: DirichletCharacter, n: int, p: int) -> float:
    """p-adic valuation of B_n^chi, minimum over power-basis coordinates."""
    return gen_bernoulli(chi, n).valuation(p)
