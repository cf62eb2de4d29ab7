"""Characteristic series, formal group exponentials, genera, and the four-condition verifier.

Power series in the formal variable u have q-expansion coefficients over the
rational flavor of the run ring; p-adic reduction only happens in reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .chars import DirichletCharacter, enumerate_characters
from .cyclo import CycRing, SingularSystem, gauss_solve
from .eisenstein import eisenstein_chi, eisenstein_level_one
from .errors import DegenerateBasis, ParameterError, RingMismatch
from .measures import (
    j_tilde_moment,
    kummer_check_units,
    mean_target,
    mean_via_limit,
    moments_mu,
    mu_moment,
    run_ring,
)
from .operators import frob, kernel_check_atkin, p_stabilize
from .qseries import QExpansion

__all__ = [
    "CharSeries",
    "ConditionReport",
    "characteristic_series",
    "fgl_exponential",
    "genus_cpn",
    "basis_membership",
    "default_weight_one_basis",
    "g_form",
    "verify_conditions",
    "mean_report",
    "saturating_increase",
]


@dataclass(frozen=True)
class CharSeries:
    """t_0 + t_1 u + ... + t_D u^D with QExpansion coefficients."""

    coeffs: tuple

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    @property
    def ring(self) -> CycRing:
        return self.coeffs[0].ring

    @property
    def Q(self) -> int:
        return min(c.q_prec for c in self.coeffs)

    def __getitem__(self, n: int) -> QExpansion:
        return self.coeffs[n]

    @classmethod
    def constant(cls, value: QExpansion, D: int) -> "CharSeries":
        z = QExpansion.zero(value.ring, value.q_prec)
        return cls((value,) + (z,) * D)

    @classmethod
    def variable(cls, ring: CycRing, Q: int, D: int) -> "CharSeries":
        """The series u."""
        z = QExpansion.zero(ring, Q)
        one = QExpansion.constant(ring, 1, Q)
        return cls((z, one) + (z,) * (D - 1))

    def _zero(self) -> QExpansion:
        return QExpansion.zero(self.ring, self.Q)

    def __add__(self, other: "CharSeries") -> "CharSeries":
        D = min(self.D, other.D)
        return CharSeries(tuple(self[i] + other[i] for i in range(D + 1)))

    def __sub__(self, other: "CharSeries") -> "CharSeries":
        D = min(self.D, other.D)
        return CharSeries(tuple(self[i] - other[i] for i in range(D + 1)))

    def scale(self, s) -> "CharSeries":
        return CharSeries(tuple(c.scale(s) for c in self.coeffs))

    def __mul__(self, other: "CharSeries") -> "CharSeries":
        D = min(self.D, other.D)
        out = []
        for n in range(D + 1):
            acc = self._zero()
            for i in range(n + 1):
                if self[i].is_zero() or other[n - i].is_zero():
                    continue
                acc = acc + self[i] * other[n - i]
            out.append(acc)
        return CharSeries(tuple(out))

    def __pow__(self, e: int) -> "CharSeries":
        if e < 0:
            return self.inverse() ** (-e)
        result = CharSeries.constant(QExpansion.constant(self.ring, 1, self.Q), self.D)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _require_unit_constant(self):
        if self[0] != QExpansion.constant(self.ring, 1, self.Q):
            raise ParameterError("series must have constant term 1")

    def inverse(self) -> "CharSeries":
        """1/S for S with constant term 1."""
        self._require_unit_constant()
        b = [QExpansion.constant(self.ring, 1, self.Q)]
        for n in range(1, self.D + 1):
            acc = self._zero()
            for k in range(1, n + 1):
                acc = acc + self[k] * b[n - k]
            b.append(-acc)
        return CharSeries(tuple(b))

    def exp(self) -> "CharSeries":
        """exp(A) for A with zero constant term, via n e_n = sum k a_k e_(n-k)."""
        if not self[0].is_zero():
            raise ParameterError("exp needs a series without constant term")
        e = [QExpansion.constant(self.ring, 1, self.Q)]
        for n in range(1, self.D + 1):
            acc = self._zero()
            for k in range(1, n + 1):
                if not self[k].is_zero():
                    acc = acc + (self[k] * e[n - k]).scale(k)
            e.append(acc.scale(Fraction(1, n)))
        return CharSeries(tuple(e))

    def log(self) -> "CharSeries":
        """log(S) for S with constant term 1, via L' = S'/S."""
        inv = self.inverse()
        deriv = CharSeries(tuple(self[i + 1].scale(i + 1) for i in range(self.D)) + (self._zero(),))
        q = deriv * inv
        return CharSeries((self._zero(),) + tuple(q[n - 1].scale(Fraction(1, n)) for n in range(1, self.D + 1)))

    def compose(self, g: "CharSeries") -> "CharSeries":
        """self(g(u)) for g without constant term (Horner)."""
        if not g[0].is_zero():
            raise ParameterError("inner series must have zero constant term")
        D = min(self.D, g.D)
        acc = CharSeries.constant(self[D], D)
        for i in range(D - 1, -1, -1):
            acc = acc * g + CharSeries.constant(self[i], D)
        return acc

    def shift_up(self) -> "CharSeries":
        """u * S, truncated at u^D."""
        return CharSeries((self._zero(),) + self.coeffs[:-1])

    def reversion(self) -> "CharSeries":
        """Compositional inverse of u + a_2 u^2 + ..."""
        one = QExpansion.constant(self.ring, 1, self.Q)
        if not self[0].is_zero() or self[1] != one:
            raise ParameterError("reversion needs a series u + O(u^2)")
        inv = CharSeries.variable(self.ring, self.Q, self.D)
        for n in range(2, self.D + 1):
            err = self.compose(inv)[n]
            coeffs = list(inv.coeffs)
            coeffs[n] = coeffs[n] - err
            inv = CharSeries(tuple(coeffs))
        return inv

    def __eq__(self, other):
        if not isinstance(other, CharSeries):
            return NotImplemented
        D = min(self.D, other.D)
        return all(self[i] == other[i] for i in range(D + 1))

    __hash__ = None

    def to_json(self) -> dict:
        return {"D": self.D, "coeffs": [c.to_json() for c in self.coeffs]}


def g_form(chi: DirichletCharacter, k: int, Q: int, ring: CycRing | None = None) -> QExpansion:
    """g_k = G_k + G_k^chi, returned as its single nonzero (tagged) component.

    For odd chi exactly one summand survives the parity convention, so the
    result keeps a nebentypus tag and operators can act on it.
    """
    ring = ring or chi.natural_ring()
    if chi.parity == (-1) ** k:
        return eisenstein_chi(k, chi, Q, ring)
    return eisenstein_level_one(k, Q, ring)


def characteristic_series(chi: DirichletCharacter, D: int, Q: int) -> CharSeries:
    """K(u) = exp(sum_{k=2..D} (G_k + G_k^chi) u^k / k!)."""
    if chi.parity != -1:
        raise ParameterError(f"characteristic series needs an odd character, got {chi}")
    if D < 2:
        raise ParameterError("D must be at least 2")
    ring = chi.natural_ring()
    z = QExpansion.zero(ring, Q)
    terms = [z, z]
    for k in range(2, D + 1):
        g = eisenstein_level_one(k, Q, ring) + eisenstein_chi(k, chi, Q, ring)
        terms.append(g.scale(Fraction(1, math.factorial(k))))
    return CharSeries(tuple(terms)).exp()


def fgl_exponential(K: CharSeries) -> tuple[CharSeries, CharSeries]:
    """(exp_F, log_F) with exp_F(u) = u / K(u) and log_F its compositional inverse."""
    exp_f = K.inverse().shift_up()
    return exp_f, exp_f.reversion()


def genus_cpn(K: CharSeries, n: int) -> QExpansion:
    """u^n coefficient of K(u)^(n+1): the genus of CP^n."""
    if not 0 <= n <= K.D:
        raise ParameterError(f"need 0 <= n <= D={K.D}, got {n}")
    return (K ** (n + 1))[n]


# ---------------------------------------------------------------------------
# classicality via finite-basis membership


def _mult_matrix(b, ring: CycRing) -> list[list]:
    """Columns: coordinates of zeta^j * b, so coords(x * b) = A @ coords(x)."""
    d = ring.degree
    cols = [(ring.zeta(j) * b).c for j in range(d)]
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def basis_membership(f: QExpansion, basis: list, Q_eff: int | None = None) -> dict:
    """Is f a combination of `basis` (with coefficients in the ring) through q^Q_eff?"""
    ring = f.ring
    for g in basis:
        if g.ring != ring:
            raise RingMismatch(f"basis element over {g.ring}, form over {ring}")
    top = min([f.q_prec] + [g.q_prec for g in basis])
    if Q_eff is not None:
        top = min(top, Q_eff)
    d = ring.degree
    if not basis:
        ok = all(f.coeffs[n].is_zero() for n in range(top + 1))
        return {"pass": ok, "coefficients": [], "Q_eff": top,
                "note": f"consistent with membership at precision Q_eff={top}" if ok else None}
    A, rhs = [], []
    for n in range(top + 1):
        blocks = [_mult_matrix(g.coeffs[n], ring) for g in basis]
        for i in range(d):
            A.append([x for blk in blocks for x in blk[i]])
            rhs.append(f.coeffs[n].c[i])
    kw = {"modulus": ring.modulus, "p": ring.p} if ring.is_residue else {}
    try:
        sol = gauss_solve(A, rhs, **kw)
    except SingularSystem as e:
        raise DegenerateBasis(f"basis is dependent through q^{top}: {e}") from None
    if sol is None:
        return {"pass": False, "coefficients": None, "Q_eff": top, "note": None}
    coeffs = [ring._wrap(sol[i * d:(i + 1) * d]) for i in range(len(basis))]
    return {
        "pass": True,
        "coefficients": [c.coords_str() for c in coeffs],
        "Q_eff": top,
        "note": f"consistent with membership at precision Q_eff={top}",
    }


def default_weight_one_basis(chi: DirichletCharacter, Q: int, p: int, ring: CycRing | None = None) -> list:
    """G_1^psi and Frob G_1^psi for every odd psi mod N with values in the ring.

    Spans the weight-1 Eisenstein forms of level Np reachable from level N,
    which is where the p-stabilized G_1^chi lives.
    """
    ring = ring or chi.natural_ring()
    out = []
    for psi in enumerate_characters(chi.modulus):
        if psi.parity != -1 or ring.L % psi.order:
            continue
        g = eisenstein_chi(1, psi, Q, ring)
        if g.is_zero():
            continue
        out.extend([g, frob(g, p)])
    return out


# ---------------------------------------------------------------------------
# the verifier


@dataclass
class ConditionReport:
    params: dict
    conditions: dict = field(default_factory=dict)
    precision: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        c = self.conditions
        return (
            c["c1"]["pass"]
            and all(x["pass"] for x in c["c2"])
            and all(x["pass"] for x in c["c3"])
            and c["c4"]["pass"]
        )

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "conditions": self.conditions,
            "precision": self.precision,
            "overall": self.overall,
        }


def saturating_increase(vals, M) -> bool:
    """Strictly increasing until reaching M, then staying at M."""
    capped = [min(v, M) for v in vals]
    for a, b in zip(capped, capped[1:]):
        if a >= M:
            if b < M:
                return False
        elif b <= a:
            return False
    return True


def mean_report(chi: DirichletCharacter, c: int, p: int, M: int, Q: int, r_max: int) -> dict:
    """Condition 2 for one c: mean of mu against (1/p) log(c^(p-1)); mean of J-tilde against 0."""
    ring = run_ring(chi, p, M)
    target = QExpansion.constant(ring, mean_target(c, p, M), Q)
    mu = mean_via_limit(lambda k: mu_moment(chi, c, k, Q, ring), p, M, Q, r_max)
    jt = mean_via_limit(lambda k: j_tilde_moment(chi, c, k, Q, ring), p, M, Q, r_max)
    const_vals = [(m - target).valuation() for m in mu.approximations]
    pos_vals = [m.valuation(start=1) for m in mu.approximations]
    jt_vals = list(jt.valuations)
    jt_ok = all(v >= min(r, M) for r, v in enumerate(jt_vals))
    pos_ok = all(v >= min(r, M) for r, v in enumerate(pos_vals))
    conv_ok = saturating_increase(const_vals, M)
    return {
        "c": c,
        "target": mean_target(c, p, M),
        "exponents": list(mu.exponents),
        "valuations": const_vals,
        "positive_coefficient_valuations": pos_vals,
        "j_tilde_valuations": jt_vals,
        "pass": conv_ok and pos_ok and jt_ok,
    }


def verify_conditions(chi: DirichletCharacter, c_set, K: int, Q: int, M: int, r_max: int, p: int,
                      basis: dict | None = None, classical_weights=(1,), inject: dict | None = None,
                      ) -> ConditionReport:
    """Check the four conditions on g_k = G_k + G_k^chi and the measures mu_c^chi.

    `basis` maps a weight to a list of QExpansions (rational flavor of the run
    ring); weight 1 defaults to default_weight_one_basis.  `inject` = {k, n,
    delta} perturbs one mu moment before the Kummer check (failure drills).
    """
    c_set = list(c_set)
    if not c_set:
        raise ParameterError("c_set must be nonempty")
    if p == 2:
        raise ParameterError("verification needs p odd")
    if chi.is_trivial or chi.parity != -1:
        raise ParameterError(f"need a nontrivial odd character, got {chi}")
    run_ring(chi, p, M)
    basis = dict(basis or {})
    rat = chi.natural_ring()

    report = ConditionReport(params={
        "p": p, "N": chi.modulus, "chi": chi.name, "c": c_set, "K": K, "Q": Q, "M": M, "r_max": r_max,
        "classical_weights": list(classical_weights),
    })
    report.precision = {
        "moments": f"mod p^{M}, through q^{Q}",
        "atkin_kernel": f"exact over Q(zeta_{rat.L}), checked through q^{Q // p}",
        "kummer": "necessary conditions only",
    }

    # (1) Kummer congruences on Z_p^x
    per_c = []
    for c in c_set:
        b = moments_mu(chi, c, K, Q, M, p)
        if inject:
            b = b.perturbed(inject["k"], inject.get("n", 0), inject.get("delta", 1))
        rep = kummer_check_units(b)
        rep["c"] = c
        per_c.append(rep)
    first_bad = next((r for r in per_c if not r["pass"]), None)
    report.conditions["c1"] = {
        "pass": first_bad is None,
        "per_c": per_c,
        "witness": None if first_bad is None else dict(first_bad["witness"], c=first_bad["c"]),
    }

    # (2) mean limits
    report.conditions["c2"] = [mean_report(chi, c, p, M, Q, r_max) for c in c_set]

    # (3) p-stabilized g_k in the kernel of 1 - <p>U
    c3 = []
    for k in range(1, K + 1):
        g = g_form(chi, k, Q, rat)
        rep = kernel_check_atkin(p_stabilize(g, k, p), p, M=M)
        c3.append({"k": k, "pass": rep["pass"], "first_failure": rep["first_failure"]})
    report.conditions["c3"] = c3

    # (4) classicality
    c4 = []
    for k in classical_weights:
        f = p_stabilize(g_form(chi, k, Q, rat), k, p)
        forms = basis.get(k)
        if forms is None and k == 1:
            forms = default_weight_one_basis(chi, Q, p, rat)
        if forms is None:
            c4.append({"k": k, "pass": None, "status": "informational: no basis supplied"})
            continue
        try:
            rep = basis_membership(f, forms, Q)
            c4.append({"k": k, "pass": rep["pass"], "status": rep["note"] or "not in span",
                       "coefficients": rep["coefficients"]})
        except DegenerateBasis as e:
            c4.append({"k": k, "pass": False, "status": f"inconclusive: {e}"})
    report.conditions["c4"] = {"pass": all(x["pass"] is not False for x in c4), "weights": c4}
    return report
