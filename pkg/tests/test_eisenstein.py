from fractions import Fraction

import pytest
import sympy

from padic_orient.chars import char_eval, enumerate_characters, l_value, parse_character
from padic_orient.cyclo import CycRing
from padic_orient.eisenstein import (
    divisor_part,
    eisenstein_chi,
    eisenstein_level_one,
    stabilized_eisenstein,
)
from padic_orient.errors import DenominatorNotPrime, ParameterError
from padic_orient.operators import p_stabilize


def naive_coeffs(k, chi, Q, ring):
    """Divisor sums straight from the definition, one root of unity at a time."""
    out = [l_value(chi, k, ring)]
    for n in range(1, Q + 1):
        acc = ring.zero()
        for d in sympy.divisors(n):
            acc = acc + char_eval(chi, d, ring) * (2 * d ** (k - 1))
        out.append(acc)
    return out


def test_weight_one_mod_three():
    chi = parse_character("3:quad")
    f = eisenstein_chi(1, chi, 4)
    assert [c.c[0] for c in f.coeffs] == [Fraction(1, 3), 2, 0, 2, 2]
    assert all(c.c[1] == 0 for c in f.coeffs)
    assert (f.weight, f.level, f.chi) == (1, 3, chi)


def test_level_one_g4():
    f = eisenstein_level_one(4, 2)
    assert [c.c[0] for c in f.coeffs] == [Fraction(1, 120), 2, 18]


def test_level_one_matches_sigma():
    for k in (2, 4, 6, 8):
        f = eisenstein_level_one(k, 12)
        for n in range(1, 13):
            assert f[n].c[0] == 2 * sympy.divisor_sigma(n, k - 1)


def test_residue_constant():
    chi = parse_character("3:quad")
    f = eisenstein_chi(1, chi, 4, chi.natural_ring().residue(5, 2))
    assert f[0].c == (17, 0)


@pytest.mark.parametrize("N", [3, 4, 5, 7])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_against_naive_divisor_sums(N, k):
    for chi in enumerate_characters(N):
        ring = chi.natural_ring()
        f = eisenstein_chi(k, chi, 12, ring)
        if chi.parity != (-1) ** k:
            assert f.is_zero()
            continue
        assert list(f.coeffs) == naive_coeffs(k, chi, 12, ring)


@pytest.mark.parametrize("cid,p", [("3:1", 5), ("5:1", 7), ("4:1", 3)])
def test_residue_flavor_is_reduction(cid, p):
    chi = parse_character(cid)
    ring = chi.natural_ring()
    for k in (1, 3, 5, 83):
        f = eisenstein_chi(k, chi, 10, ring).reduce(ring.residue(p, 5))
        assert eisenstein_chi(k, chi, 10, ring.residue(p, 5)) == f


def test_level_one_residue_needs_integral_constant():
    with pytest.raises(DenominatorNotPrime):
        eisenstein_level_one(4, 5, CycRing(1, 5, 3))


def test_stabilized_matches_operator():
    chi = parse_character("3:quad")
    ring = chi.natural_ring()
    for k in (1, 3, 5):
        g = eisenstein_chi(k, chi, 30, ring)
        assert stabilized_eisenstein(k, chi, 30, 5, ring) == p_stabilize(g, k, 5)
    res = ring.residue(5, 4)
    for k in (3, 85):
        direct = stabilized_eisenstein(k, chi, 20, 5, res)
        exact = p_stabilize(eisenstein_chi(k, chi, 20, ring), k, 5).reduce(res)
        assert direct == exact


def test_divisor_part_skips_p():
    chi = parse_character("3:quad")
    ring = chi.natural_ring()
    a = divisor_part(1, chi, 10, ring, skip_p=5)
    assert a[4] == ring(2)  # divisors of 5 prime to 5: just 1


def test_weight_zero_rejected():
    with pytest.raises(ParameterError):
        eisenstein_chi(0, parse_character("3:quad"), 4)


def test_ring_must_hold_character():
    with pytest.raises(ParameterError):
        eisenstein_chi(1, parse_character("5:1"), 4, CycRing(3))
