import cmath
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padic_orient.cyclo import CycRing, cyc_invert, gauss_solve, pow_reduce, vp
from padic_orient.errors import DenominatorNotPrime, NonUnit, ParameterError, RingMismatch

CONDUCTORS = [1, 3, 4, 5, 6, 12, 20]


def embed(x, L):
    z = cmath.exp(2j * cmath.pi / L)
    return sum(complex(float(c)) * z**i for i, c in enumerate(x.c))


coords = st.integers(-30, 30)


@st.composite
def rational_elems(draw, L=None):
    L = L or draw(st.sampled_from(CONDUCTORS))
    ring = CycRing(L)
    return ring._wrap(Fraction(draw(coords), draw(st.integers(1, 5))) for _ in range(ring.degree))


def test_degrees():
    assert [CycRing(L).degree for L in CONDUCTORS] == [1, 2, 2, 4, 2, 4, 8]


def test_zeta_order():
    for L in CONDUCTORS:
        R = CycRing(L)
        assert R.zeta(L) == R.one()
        assert R.zeta(1) ** L == R.one()
        if L > 1:
            assert R.zeta(L // 2 if L % 2 == 0 else 1) != R.one()


@given(st.sampled_from(CONDUCTORS), st.data())
def test_multiplication_matches_complex_embedding(L, data):
    x = data.draw(rational_elems(L))
    y = data.draw(rational_elems(L))
    assert abs(embed(x * y, L) - embed(x, L) * embed(y, L)) < 1e-6 * (1 + abs(embed(x, L) * embed(y, L)))


@given(st.sampled_from(CONDUCTORS), st.data())
def test_ring_axioms(L, data):
    x, y, z = (data.draw(rational_elems(L)) for _ in range(3))
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x - x == CycRing(L).zero()


@given(st.sampled_from(CONDUCTORS), st.data())
def test_inverse(L, data):
    x = data.draw(rational_elems(L))
    if x.is_zero():
        with pytest.raises(NonUnit):
            cyc_invert(x)
    else:
        assert x * cyc_invert(x) == CycRing(L).one()


@given(st.sampled_from([3, 4, 12]), st.sampled_from([5, 7]), st.integers(1, 5), st.data())
def test_reduction_is_a_ring_map(L, p, M, data):
    R = CycRing(L)
    res = R.residue(p, M)
    x = R._wrap(data.draw(coords) for _ in range(R.degree))
    y = R._wrap(data.draw(coords) for _ in range(R.degree))
    assert (x * y).reduce(res) == x.reduce(res) * y.reduce(res)
    assert (x + y).reduce(res) == x.reduce(res) + y.reduce(res)


def test_residue_needs_p_prime_to_L():
    with pytest.raises(ParameterError):
        CycRing(6, 3, 2)
    with pytest.raises(ParameterError):
        CycRing(3, 4, 2)
    with pytest.raises(ParameterError):
        CycRing(3, 5, 0)


def test_denominator_divisible_by_p():
    R = CycRing(1, 5, 3)
    assert R(Fraction(1, 3)).c == (42,)  # 3 * 42 = 126 = 1 mod 125
    with pytest.raises(DenominatorNotPrime):
        R(Fraction(1, 5))


def test_ring_mismatch():
    with pytest.raises(RingMismatch):
        CycRing(3).one() + CycRing(4).one()


def test_residue_unit_inverse():
    R = CycRing(5, 3, 4)
    rng = random.Random(1)
    for _ in range(20):
        x = R.random(rng)
        if x.valuation() == 0:
            assert x * cyc_invert(x) == R.one()


def test_residue_valuation_caps_at_M():
    R = CycRing(1, 5, 3)
    assert R.zero().valuation() == 3
    assert R(25).valuation() == 2
    assert R(50 * 5).valuation() == 3


def test_vp():
    assert vp(0, 5) == float("inf")
    assert vp(250, 5) == 3
    assert vp(Fraction(3, 25), 5) == -2


@given(st.integers(-500, 500).filter(lambda d: d != 0), st.integers(0, 3000), st.sampled_from([3, 5, 7]),
       st.integers(1, 6))
def test_pow_reduce_matches_pow(d, e, p, M):
    assert pow_reduce(d, e, p, M) == pow(d, e, p**M)


def test_pow_reduce_huge_exponent():
    p, M = 5, 6
    e = 4 * 5**40 + 7
    assert pow_reduce(2, e, p, M) == pow(2, e, p**M)
    assert pow_reduce(10, e, p, M) == 0


def test_gauss_solve_rational_and_modular():
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)], [Fraction(3), Fraction(4)]]
    assert gauss_solve(A, [Fraction(3), Fraction(4), Fraction(7)]) == [1, 1]
    assert gauss_solve(A, [Fraction(3), Fraction(4), Fraction(8)]) is None
    A = [[2, 1], [1, 4]]
    x = gauss_solve(A, [3, 4], modulus=125, p=5)
    assert [(2 * x[0] + x[1]) % 125, (x[0] + 4 * x[1]) % 125] == [3, 4]
