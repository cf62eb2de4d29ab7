"""Diamond, Frobenius, Atkin U and Hecke T_p on tagged q-expansions.

Precision contract: frob keeps the input precision Q (coefficients off the
multiples of p are known zeros); atkin_u and everything built from it return
precision floor(Q/p).
"""
from __future__ import annotations

import math
from fractions import Fraction

from .chars import char_eval
from .cyclo import CycScalar, cyc_invert, pow_reduce
from .errors import ParameterError, UntaggedForm
from .qseries import QExpansion

__all__ = [
    "diamond",
    "frob",
    "atkin_u",
    "hecke_tp",
    "p_stabilize",
    "ell2_apply",
    "kernel_check_atkin",
]


def _nebentypus(f: QExpansion, what: str):
    if f.chi is None:
        raise UntaggedForm(f"{what} needs a nebentypus-tagged form")
    return f.chi


def _check_prime(f: QExpansion, p: int):
    chi = _nebentypus(f, "the operator")
    if math.gcd(p, chi.modulus) != 1 or math.gcd(p, f.level) != 1:
        raise ParameterError(f"p={p} must not divide the level {f.level}")
    return chi


def _p_power(f: QExpansion, p: int, e: int):
    """p^e as a scalar of f's ring."""
    ring = f.ring
    if ring.is_residue:
        if e < 0:
            raise ParameterError(f"p^{e} is not integral in residue flavor")
        return pow_reduce(p, e, ring.p, ring.M)
    return Fraction(p) ** e


def diamond(f: QExpansion, n: int) -> QExpansion:
    """<n> f = chi(n) f on a nebentypus-chi form."""
    chi = _nebentypus(f, "diamond operator")
    if math.gcd(n, chi.modulus) != 1:
        raise ParameterError(f"<{n}> needs n prime to {chi.modulus}")
    return f.scale(char_eval(chi, n, f.ring))


def frob(f: QExpansion, p: int) -> QExpansion:
    """a_n q^n -> chi(p) a_n q^(np)."""
    chi = _check_prime(f, p)
    ring = f.ring
    cp = char_eval(chi, p, ring)
    out = [ring.zero()] * len(f)
    for n in range(0, f.q_prec // p + 1):
        out[n * p] = f.coeffs[n] * cp
    return QExpansion(ring, tuple(out), f.weight, f.level, f.chi)


def atkin_u(f: QExpansion, p: int) -> QExpansion:
    """a_n q^n -> chi(p)^(-1) a_(np) q^n, precision floor(Q/p)."""
    chi = _check_prime(f, p)
    inv = cyc_invert(char_eval(chi, p, f.ring))
    coeffs = tuple(f.coeffs[n * p] * inv for n in range(f.q_prec // p + 1))
    return QExpansion(f.ring, coeffs, f.weight, f.level, f.chi)


def _weight(f: QExpansion, k: int) -> int:
    if f.weight is not None and f.weight != k:
        raise ParameterError(f"weight {k} does not match the form's tag {f.weight}")
    return k


def hecke_tp(f: QExpansion, k: int, p: int) -> QExpansion:
    """T_p = p^(k-1) Frob + <p> U."""
    _weight(f, k)
    return frob(f, p).scale(_p_power(f, p, k - 1)) + diamond(atkin_u(f, p), p)


def p_stabilize(f: QExpansion, k: int, p: int) -> QExpansion:
    """(1 - p^(k-1) Frob) f."""
    _weight(f, k)
    if k < 1 and f.ring.is_residue:
        raise ParameterError("p-stabilization needs k >= 1 in residue flavor")
    return f - frob(f, p).scale(_p_power(f, p, k - 1))


def ell2_apply(f: QExpansion, k: int, p: int) -> QExpansion:
    """(1 - T_p + p^(k-1) <p>) f."""
    return f - hecke_tp(f, k, p) + diamond(f, p).scale(_p_power(f, p, k - 1))


def kernel_check_atkin(f: QExpansion, p: int, Q_eff: int | None = None, M: int | None = None) -> dict:
    """Does f - <p>U f vanish mod p^M through q^Q_eff?

    Rational-flavor inputs are checked through their p-adic valuations (exact
    zeros count as infinitely divisible), so M is required there.
    """
    g = f - diamond(atkin_u(f, p), p)
    if M is None:
        if not f.ring.is_residue:
            raise ParameterError("kernel check on a rational series needs M")
        M = f.ring.M
    top = g.q_prec if Q_eff is None else min(Q_eff, g.q_prec)
    first = None
    for n in range(top + 1):
        c: CycScalar = g.coeffs[n]
        if c.is_zero():
            continue
        if c.valuation(p) < M:
            first = n
            break
    return {
        "pass": first is None,
        "first_failure": first,
        "checked_through": top,
        "M": M,
    }
