import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padic_orient.chars import parse_character
from padic_orient.eisenstein import eisenstein_chi, eisenstein_level_one
from padic_orient.errors import DegenerateBasis, ParameterError
from padic_orient.operators import frob, p_stabilize
from padic_orient.orientation import (
    CharSeries,
    basis_membership,
    characteristic_series,
    default_weight_one_basis,
    fgl_exponential,
    genus_cpn,
    saturating_increase,
    verify_conditions,
)
from padic_orient.qseries import QExpansion

CHI3 = parse_character("3:quad")
R = CHI3.natural_ring()
D, Q = 8, 16


@pytest.fixture(scope="module")
def K():
    return characteristic_series(CHI3, D, Q)


def naive_power_coeff(K, e, n):
    """u^n coefficient of K^e by expanding the product term by term."""
    coeffs = [K[i] for i in range(n + 1)]
    cur = [QExpansion.constant(R, 1, Q)] + [QExpansion.zero(R, Q)] * n
    for _ in range(e):
        nxt = []
        for m in range(n + 1):
            acc = QExpansion.zero(R, Q)
            for i in range(m + 1):
                acc = acc + cur[i] * coeffs[m - i]
            nxt.append(acc)
        cur = nxt
    return cur[n]


def test_low_coefficients(K):
    assert K[0] == QExpansion.constant(R, 1, Q)
    assert K[1].is_zero()
    assert K[2] == eisenstein_level_one(2, Q, R).scale(Fraction(1, 2))
    assert K[3] == eisenstein_chi(3, CHI3, Q, R).scale(Fraction(1, 6))


def test_fourth_coefficient(K):
    g2 = eisenstein_level_one(2, Q, R)
    g4 = eisenstein_level_one(4, Q, R)
    assert K[4] == g4.scale(Fraction(1, 24)) + (g2 * g2).scale(Fraction(1, 8))


def test_fgl(K):
    exp_f, log_f = fgl_exponential(K)
    u = CharSeries.variable(R, Q, D)
    assert exp_f.compose(log_f) == u
    assert log_f.compose(exp_f) == u
    assert exp_f[2].is_zero()
    assert exp_f[3] == eisenstein_level_one(2, Q, R).scale(Fraction(-1, 2))
    # dividing u by exp_F gives K back
    back = CharSeries(tuple(exp_f.coeffs[1:])).inverse()
    assert CharSeries(K.coeffs[:D]) == back


def test_additive_law():
    one = CharSeries.constant(QExpansion.constant(R, 1, 4), 5)
    exp_f, log_f = fgl_exponential(one)
    assert exp_f == CharSeries.variable(R, 4, 5)
    assert log_f == CharSeries.variable(R, 4, 5)


def test_genus(K):
    assert genus_cpn(K, 0) == QExpansion.constant(R, 1, Q)
    assert genus_cpn(K, 1).is_zero()
    assert genus_cpn(K, 2) == eisenstein_level_one(2, Q, R).scale(Fraction(3, 2))
    for n in range(7):
        assert genus_cpn(K, n) == naive_power_coeff(K, n + 1, n)
    with pytest.raises(ParameterError):
        genus_cpn(K, D + 1)


def test_log_exp_inverse(K):
    assert K.log().exp() == K


def test_charseries_needs_odd_character():
    with pytest.raises(ParameterError):
        characteristic_series(parse_character("5:2"), 4, 4)
    with pytest.raises(ParameterError):
        characteristic_series(CHI3, 1, 4)


def test_membership_basics():
    basis = default_weight_one_basis(CHI3, Q, 5, R)
    assert len(basis) == 2
    rep = basis_membership(basis[0], basis, Q)
    assert rep["pass"] and rep["coefficients"] == [["1", "0"], ["0", "0"]]
    zero = QExpansion.zero(R, Q, weight=1)
    assert basis_membership(zero, basis, Q)["coefficients"] == [["0", "0"], ["0", "0"]]
    g1 = eisenstein_chi(1, CHI3, Q, R)
    assert basis_membership(g1, [eisenstein_chi(1, CHI3, Q, R)], Q)["pass"]
    assert basis_membership(p_stabilize(g1, 1, 5), basis, Q)["pass"]
    assert not basis_membership(eisenstein_chi(3, CHI3, Q, R), basis, Q)["pass"]


def test_membership_degenerate():
    g1 = eisenstein_chi(1, CHI3, Q, R)
    with pytest.raises(DegenerateBasis):
        basis_membership(g1, [g1, g1.scale(2)], Q)


@given(st.integers(0, 10**6))
def test_membership_invariant_under_unimodular_change(seed):
    rng = random.Random(seed)
    b0, b1 = default_weight_one_basis(CHI3, Q, 5, R)
    g3 = eisenstein_chi(3, CHI3, Q, R)
    a = rng.randint(-5, 5)
    new = [b0 + b1.scale(a), b1] if rng.random() < 0.5 else [b1, b0.scale(-1) + b1.scale(a)]
    for f in (p_stabilize(eisenstein_chi(1, CHI3, Q, R), 1, 5), g3, frob(b0, 5)):
        assert basis_membership(f, [b0, b1], Q)["pass"] == basis_membership(f, new, Q)["pass"]


def test_saturation_rule():
    assert saturating_increase([1, 2, 3, 6, 6], 6)
    assert saturating_increase([1, 2, 3, 4, 5], 6)
    assert not saturating_increase([1, 2, 2, 4], 6)
    assert not saturating_increase([1, 6, 5], 6)


def test_verify_conditions_pass():
    rep = verify_conditions(CHI3, [2, 3], 8, 16, 5, 3, 5)
    assert rep.overall
    out = rep.to_json()
    assert set(out["conditions"]) == {"c1", "c2", "c3", "c4"}
    assert [x["valuations"] for x in out["conditions"]["c2"]] == [[1, 2, 3, 4]] * 2


def test_verify_conditions_detects_perturbation():
    rep = verify_conditions(CHI3, [2], 8, 16, 5, 3, 5, inject={"k": 3})
    assert not rep.overall
    w = rep.conditions["c1"]["witness"]
    assert w["k"] == 3 and w["c"] == 2


def test_verify_conditions_preconditions():
    with pytest.raises(ParameterError):
        verify_conditions(CHI3, [], 8, 16, 5, 3, 5)
    with pytest.raises(ParameterError):
        verify_conditions(parse_character("5:2"), [3], 8, 16, 5, 3, 7)
    with pytest.raises(ParameterError):
        verify_conditions(CHI3, [2], 8, 16, 5, 3, 3)


def test_weight_two_is_informational():
    rep = verify_conditions(CHI3, [2], 4, 16, 4, 2, 5, classical_weights=(1, 2))
    c4 = rep.conditions["c4"]
    assert c4["pass"]
    assert c4["weights"][1]["pass"] is None
