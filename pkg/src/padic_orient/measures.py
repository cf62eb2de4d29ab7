"""p-adic measures as finite moment sequences of q-expansions.

A measure is known here only through moments b_k = integral of x^k, k <= K, at
q-precision Q and p-adic precision M.  The Kummer checks are therefore
necessary conditions: they can refute that a sequence comes from a measure but
never prove it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

from .chars import EXACT_WEIGHT_LIMIT, DirichletCharacter, char_eval
from .cyclo import CycRing, pow_reduce, vp
from .eisenstein import (
    divisor_part,
    eisenstein_chi,
    stabilized_constant,
    trivial_character,
)
from .errors import InsufficientPrecision, ParameterError
from .operators import p_stabilize
from .qseries import QExpansion

__all__ = [
    "MomentSequence",
    "MahlerTable",
    "MeanLimit",
    "stirling_row",
    "mahler_from_moments",
    "kummer_check_zp",
    "kummer_check_units",
    "eisenstein_moments",
    "moments_j_tilde",
    "moments_nu_bar",
    "moments_mu",
    "mean_via_limit",
    "iwasawa_log",
    "mean_target",
    "run_ring",
    "working_precision",
]

ZP = "Zp"
UNITS = "ZpUnits"


@dataclass(frozen=True)
class MomentSequence:
    """Moments b_start..b_K of a measure on Z_p (start 0) or Z_p^x (start 1 or 0).

    `M` is the nominal precision of the checks; the series themselves may be
    carried at a higher working precision (see working_precision).
    """

    moments: tuple
    domain: str
    provenance: str
    p: int
    M: int
    Q: int
    K: int
    start: int = 0

    def __post_init__(self):
        if len(self.moments) != self.K - self.start + 1:
            raise ParameterError(f"expected {self.K - self.start + 1} moments, got {len(self.moments)}")
        rings = {m.ring for m in self.moments}
        if len(rings) > 1:
            raise ParameterError("moments must share one ring")

    @property
    def ring(self) -> CycRing:
        return self.moments[0].ring

    @property
    def indices(self) -> range:
        return range(self.start, self.K + 1)

    def moment(self, k: int) -> QExpansion:
        return self.moments[k - self.start]

    def perturbed(self, k: int, n: int = 0, delta: int = 1) -> "MomentSequence":
        """Copy with `delta` added to the first coordinate of the q^n coefficient of b_k."""
        if k not in self.indices:
            raise ParameterError(f"no moment k={k} (have {self.start}..{self.K})")
        f = self.moment(k)
        if not 0 <= n <= f.q_prec:
            raise ParameterError(f"q-index {n} out of range 0..{f.q_prec}")
        c = f.coeffs[n]
        bumped = c.ring._wrap((c.c[0] + delta,) + c.c[1:])
        f2 = replace(f, coeffs=f.coeffs[:n] + (bumped,) + f.coeffs[n + 1:])
        ms = list(self.moments)
        ms[k - self.start] = f2
        return replace(self, moments=tuple(ms), provenance=self.provenance + "+perturbed")

    def at_precision(self, M: int) -> "MomentSequence":
        ring = self.ring.with_precision(M)
        return replace(self, moments=tuple(m.reduce(ring) for m in self.moments))

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "provenance": self.provenance,
            "p": self.p,
            "M": self.M,
            "Q": self.Q,
            "K": self.K,
            "moments": {str(k): self.moment(k).to_json() for k in self.indices},
        }


@dataclass(frozen=True)
class MahlerTable:
    """Values of the measure on binom(x, m), m = 0..K, reduced mod p^M.

    `values[m]` is None where the divisibility by m! failed; `slack[m]` is the
    achieved valuation of sum_j s(m,j) b_j minus v_p(m!) (negative = failure).
    """

    values: tuple
    slack: tuple
    failures: tuple


@dataclass(frozen=True)
class MeanLimit:
    exponents: tuple
    approximations: tuple
    valuations: tuple
    difference_valuations: tuple


# ---------------------------------------------------------------------------
# precision bookkeeping


def working_precision(p: int, M: int, K: int) -> int:
    """M + v_p(K!): enough to divide the Mahler sums by m! for every m <= K."""
    return M + vp(math.factorial(K), p)


def run_ring(chi: DirichletCharacter, p: int, M: int) -> CycRing:
    """Residue ring housing chi and level-1 forms; rejects p | N*L."""
    if math.gcd(p, chi.modulus) != 1:
        raise ParameterError(f"p={p} divides the level {chi.modulus}")
    ring = chi.natural_ring()
    if ring.L % p == 0:
        raise ParameterError(f"p={p} divides the coefficient conductor {ring.L}")
    return ring.residue(p, M)


def _check_unit(c: int, p: int, what: str = "c"):
    if c % p == 0:
        raise ParameterError(f"{what}={c} is not a p-adic unit for p={p}")


# ---------------------------------------------------------------------------
# Mahler transform and Kummer checks


def stirling_row(m: int) -> list[int]:
    """Signed Stirling numbers s(m, 0..m) of the first kind."""
    row = [1]
    for i in range(m):
        nxt = [0] * (len(row) + 1)
        for j, s in enumerate(row):
            nxt[j + 1] += s
            nxt[j] -= i * s
        row = nxt
    return row


def mahler_from_moments(b: MomentSequence) -> MahlerTable:
    if b.domain != ZP:
        raise ParameterError("Mahler expansion needs a measure on Z_p")
    if b.start != 0:
        raise ParameterError("Mahler expansion needs the moment b_0")
    p, M = b.p, b.M
    work = b.ring.M
    need = working_precision(p, M, b.K)
    if work < need:
        raise InsufficientPrecision(f"moments carried mod p^{work}, need p^{need}")
    out_ring = b.ring.with_precision(M)
    values, slack, failures = [], [], []
    for m in range(b.K + 1):
        s = stirling_row(m)
        e = vp(math.factorial(m), p)
        unit_inv = pow(math.factorial(m) // p**e, -1, p**M)
        total = None
        for j in range(m + 1):
            if s[j]:
                term = b.moment(j).scale(s[j])
                total = term if total is None else total + term
        if total is None:
            total = QExpansion.zero(b.ring, b.Q)
        worst = work - e
        coeffs = []
        failed = None
        for n, c in enumerate(total.coeffs):
            for i, x in enumerate(c.c):
                v = work if x == 0 else vp(x, p)
                worst = min(worst, v - e)
                if v < e and failed is None:
                    failed = {"m": m, "q_index": n, "coordinate": i, "valuation": v, "required": e}
            if failed is None:
                coeffs.append(c.divide_by_p_power(e, out_ring) * unit_inv)
        slack.append(worst)
        if failed is None:
            values.append(QExpansion(out_ring, tuple(coeffs)))
        else:
            values.append(None)
            failures.append(failed)
    return MahlerTable(tuple(values), tuple(slack), tuple(failures))


def kummer_check_zp(b: MomentSequence) -> dict:
    """Generalized Kummer congruences on Z_p via integrality of the Mahler table."""
    table = mahler_from_moments(b)
    return {
        "name": "kummer_zp",
        "pass": not table.failures,
        "witness": table.failures[0] if table.failures else None,
        "slack": list(table.slack),
        "necessary_condition_only": True,
    }


def kummer_check_units(b: MomentSequence) -> dict:
    """b_k = b_k' mod p^(r+1) whenever k = k' mod (p-1)p^r, 1 <= k < k' <= K."""
    p = b.p
    M = min(b.M, b.ring.M)
    pairs = 0
    witness = None
    lo = max(b.start, 1)
    for k in range(lo, b.K + 1):
        for k2 in range(k + 1, b.K + 1):
            if (k2 - k) % (p - 1):
                continue
            r = vp((k2 - k) // (p - 1), p)
            need = min(r + 1, M)
            pairs += 1
            diff = b.moment(k) - b.moment(k2)
            for n, c in enumerate(diff.coeffs):
                if c.is_zero():
                    continue
                v = c.valuation()
                if v < need:
                    i = next(i for i, x in enumerate(c.c) if x % p**need)
                    witness = {"k": k, "k2": k2, "r": r, "q_index": n, "coordinate": i,
                               "valuation": v, "required": need}
                    break
            if witness:
                break
        if witness:
            break
    return {
        "name": "kummer_units",
        "pass": witness is None,
        "witness": witness,
        "pairs_checked": pairs,
        "necessary_condition_only": True,
    }


# ---------------------------------------------------------------------------
# single moments


def _stabilized_moment(chi: DirichletCharacter, w: int, factor: Fraction | object,
                       Q: int, ring: CycRing, p: int) -> QExpansion:
    """factor * (1 - p^(w-1) Frob) G_w^chi in the residue ring `ring`.

    `factor` is a rational-flavor scalar of the run ring.  Small weights go
    through the operator path over Q; large weights use the p-adic closed form
    (divisor sums prime to p and a truncated L-value), which agrees mod p^M.
    """
    rat = ring.rational()
    if w <= EXACT_WEIGHT_LIMIT:
        g = eisenstein_chi(w, chi, Q, rat)
        if g.is_zero():
            return QExpansion.zero(ring, Q, weight=w, level=chi.modulus, chi=chi)
        return p_stabilize(g, w, p).scale(factor).reduce(ring)
    const = (stabilized_constant(w, chi, p, ring.M, rat) * factor).reduce(ring)
    f_res = factor.reduce(ring)
    coeffs = [c * f_res for c in divisor_part(w, chi, Q, ring, skip_p=p)]
    return QExpansion(ring, (const, *coeffs), weight=w, level=chi.modulus, chi=chi)


def h_moment(chi, a: int, b: int, k: int, Q: int, ring: CycRing, cache=None) -> QExpansion:
    """(1 - a^(k+1) chi(b)) G_(k+1)^chi, the k-th moment of H on Z_p."""
    w = k + 1
    if w <= EXACT_WEIGHT_LIMIT:
        rat = ring.rational()
        factor = rat.one() - char_eval(chi, b, rat) * a**w
        return eisenstein_chi(w, chi, Q, rat, cache).scale(factor).reduce(ring)
    factor = ring.one() - char_eval(chi, b, ring) * pow_reduce(a, w, ring.p, ring.M)
    return eisenstein_chi(w, chi, Q, ring, cache).scale(factor)


def j_moment(chi, a: int, b: int, k: int, Q: int, ring: CycRing) -> QExpansion:
    """(1 - a^(k+1) chi(b)) (1 - p^k Frob) G_(k+1)^chi, the k-th moment of H restricted to Z_p^x."""
    rat = ring.rational()
    w = k + 1
    factor = rat.one() - char_eval(chi, b, rat) * Fraction(a) ** w
    return _stabilized_moment(chi, w, factor, Q, ring, ring.p)


def j_tilde_moment(chi, c: int, k: int, Q: int, ring: CycRing) -> QExpansion:
    """(1 - c^k)(1 - p^(k-1) Frob) G_k^chi."""
    if k < 1:
        raise ParameterError("moments of the twisted measure start at k = 1")
    rat = ring.rational()
    return _stabilized_moment(chi, k, rat(1 - Fraction(c) ** k), Q, ring, ring.p)


def nu_bar_moment(c: int, k: int, Q: int, ring: CycRing) -> QExpansion:
    """(1 - c^k)(1 - p^(k-1) Frob) G_k at level 1; zero for odd k."""
    if k < 1:
        raise ParameterError("moments of nu-bar start at k = 1")
    rat = ring.rational()
    return _stabilized_moment(trivial_character(), k, rat(1 - Fraction(c) ** k), Q, ring, ring.p)


def mu_moment(chi, c: int, k: int, Q: int, ring: CycRing) -> QExpansion:
    return nu_bar_moment(c, k, Q, ring) + j_tilde_moment(chi, c, k, Q, ring)


# ---------------------------------------------------------------------------
# moment sequences


def _validate(chi: DirichletCharacter, p: int, K: int, Q: int, M: int):
    if K < 1 or Q < 0 or M < 1:
        raise ParameterError(f"need K >= 1, Q >= 0, M >= 1 (got K={K}, Q={Q}, M={M})")
    return run_ring(chi, p, M)


def eisenstein_moments(chi: DirichletCharacter, a: int, b: int, K: int, Q: int, M: int,
                       p: int, restricted: bool = False, cache=None) -> MomentSequence:
    """Moments of H^{a,b}_chi on Z_p, or of its restriction J^{a,b}_chi to Z_p^x.

    Unrestricted moments are carried at the working precision M + v_p(K!) so
    the Mahler table can be formed.
    """
    _validate(chi, p, K, Q, M)
    _check_unit(a, p, "a")
    if math.gcd(b, chi.modulus) != 1:
        raise ParameterError(f"b={b} must be prime to {chi.modulus}")
    if restricted:
        ring = run_ring(chi, p, M)
        moments = tuple(j_moment(chi, a, b, k, Q, ring) for k in range(K + 1))
        return MomentSequence(moments, UNITS, f"J({chi.name},{a},{b})", p, M, Q, K, 0)
    ring = run_ring(chi, p, working_precision(p, M, K))
    moments = tuple(h_moment(chi, a, b, k, Q, ring, cache) for k in range(K + 1))
    return MomentSequence(moments, ZP, f"H({chi.name},{a},{b})", p, M, Q, K, 0)


def moments_j_tilde(chi: DirichletCharacter, c: int, K: int, Q: int, M: int, p: int) -> MomentSequence:
    ring = _validate(chi, p, K, Q, M)
    _check_unit(c, p)
    moments = tuple(j_tilde_moment(chi, c, k, Q, ring) for k in range(1, K + 1))
    return MomentSequence(moments, UNITS, f"Jtilde({chi.name},{c})", p, M, Q, K, 1)


def _require_odd(p: int):
    if p == 2:
        raise ParameterError("nu-bar and mu need p odd")


def moments_nu_bar(c: int, K: int, Q: int, M: int, p: int,
                   chi: DirichletCharacter | None = None) -> MomentSequence:
    """Moments of nu-bar_c; `chi` only selects the coefficient ring to share with J-tilde."""
    _require_odd(p)
    ring = _validate(chi or trivial_character(), p, K, Q, M)
    _check_unit(c, p)
    moments = tuple(nu_bar_moment(c, k, Q, ring) for k in range(1, K + 1))
    return MomentSequence(moments, UNITS, f"NuBar({c})", p, M, Q, K, 1)


def moments_mu(chi: DirichletCharacter, c: int, K: int, Q: int, M: int, p: int) -> MomentSequence:
    """mu_c^chi = nu-bar_c + J-tilde_chi^{c,1}, momentwise."""
    _require_odd(p)
    if chi.is_trivial or chi.parity != -1:
        raise ParameterError(f"mu needs a nontrivial odd character, got {chi}")
    nu = moments_nu_bar(c, K, Q, M, p, chi)
    jt = moments_j_tilde(chi, c, K, Q, M, p)
    moments = tuple(x + y for x, y in zip(nu.moments, jt.moments))
    return MomentSequence(moments, UNITS, f"Mu({chi.name},{c})", p, M, Q, K, 1)


# ---------------------------------------------------------------------------
# means


def mean_via_limit(generator: Callable[[int], QExpansion], p: int, M: int, Q: int,
                   r_max: int) -> MeanLimit:
    """Approximate the mean by the moments at k = (p-1)p^r, r = 0..r_max.

    Since x^((p-1)p^r) -> 1 uniformly on Z_p^x, these moments converge to the
    integral of 1.  Valuations are minima over all coefficients and coordinates,
    capped at M.
    """
    exps = tuple((p - 1) * p**r for r in range(r_max + 1))
    approx = tuple(generator(k) for k in exps)
    vals = tuple(f.valuation() for f in approx)
    diffs = tuple((approx[i + 1] - approx[i]).valuation() for i in range(len(approx) - 1))
    return MeanLimit(exps, approx, vals, diffs)


def iwasawa_log(c: int, p: int, M: int) -> int:
    """log_p(c^(p-1)) mod p^M, via sum (-1)^(n+1) x^n / n with x = c^(p-1) - 1."""
    _check_unit(c, p)
    x = c ** (p - 1) - 1
    if x == 0:
        return 0
    v = vp(x, p)
    total = Fraction(0)
    n = 1
    # term n has valuation n*v - v_p(n) >= n*v - log_p(n); stop once that passes M for good
    while True:
        total += Fraction((-1) ** (n + 1) * x**n, n)
        n += 1
        if n * v - math.log(n, p) >= M + 1 and (n - 1) * v - math.log(n - 1, p) >= M:
            if all(m * v - vp(m, p) >= M for m in range(n, n + 8)):
                break
    m = p**M
    return total.numerator * pow(total.denominator, -1, m) % m


def mean_target(c: int, p: int, M: int) -> int:
    """(1/p) log_p(c^(p-1)) mod p^M."""
    lg = iwasawa_log(c, p, M + 1)
    assert lg % p == 0
    return lg // p
