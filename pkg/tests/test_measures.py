import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.functions.combinatorial.numbers import stirling

from padic_orient.chars import EXACT_WEIGHT_LIMIT, l_value, parse_character
from padic_orient.cyclo import CycRing
from padic_orient.eisenstein import eisenstein_chi, eisenstein_level_one
from padic_orient.errors import InsufficientPrecision, ParameterError
from padic_orient.measures import (
    MomentSequence,
    eisenstein_moments,
    h_moment,
    iwasawa_log,
    j_moment,
    j_tilde_moment,
    kummer_check_units,
    kummer_check_zp,
    mahler_from_moments,
    mean_target,
    mean_via_limit,
    moments_j_tilde,
    moments_mu,
    moments_nu_bar,
    nu_bar_moment,
    run_ring,
    stirling_row,
    working_precision,
)
from padic_orient.operators import frob, p_stabilize
from padic_orient.qseries import QExpansion

CHI3 = parse_character("3:quad")


def constant_moments(values, p, M, domain="Zp", start=0, Q=2):
    ring = CycRing(1, p, M)
    ms = tuple(QExpansion.constant(ring, v, Q) for v in values)
    return MomentSequence(ms, domain, "custom", p, M, Q, start + len(values) - 1, start)


def log_oracle(c, p, M):
    """log(x) = lim (x^(p^n) - 1) / p^n, evaluated with n large enough."""
    x = c ** (p - 1)
    n = M + 4
    big = p ** (M + 2 * n)
    y = (pow(x, p**n, big) - 1) % big
    assert y % p**n == 0
    return (y // p**n) % p**M


def test_stirling_rows():
    assert stirling_row(3)[1:] == [2, -3, 1]
    for m in range(9):
        assert stirling_row(m) == [stirling(m, j, kind=1, signed=True) for j in range(m + 1)]


def test_dirac_at_one():
    b = constant_moments([1] * 9, 5, 4 + working_precision(5, 0, 8))
    b = MomentSequence(b.moments, "Zp", "custom", 5, 4, 2, 8, 0)
    t = mahler_from_moments(b)
    assert [v[0].c[0] for v in t.values] == [1, 1] + [0] * 7
    assert kummer_check_zp(b)["pass"]


@pytest.mark.parametrize("c", [2, 3, 7, 12])
def test_dirac_at_c(c):
    p, M, K = 5, 4, 10
    work = working_precision(p, M, K)
    b = constant_moments([c**k for k in range(K + 1)], p, work)
    b = MomentSequence(b.moments, "Zp", "custom", p, M, 2, K, 0)
    t = mahler_from_moments(b)
    assert [v[0].c[0] for v in t.values] == [math.comb(c, m) % p**M for m in range(K + 1)]


def test_non_measure_detected_at_p2():
    b = constant_moments([0, 1, 0, 0, 0], 2, 3 + working_precision(2, 0, 4))
    b = MomentSequence(b.moments, "Zp", "custom", 2, 3, 2, 4, 0)
    rep = kummer_check_zp(b)
    assert not rep["pass"]
    assert rep["witness"]["m"] == 2 and rep["witness"]["q_index"] == 0


def test_insufficient_precision():
    b = constant_moments([1] * 11, 5, 3)
    with pytest.raises(InsufficientPrecision):
        mahler_from_moments(b)


def test_units_examples():
    assert kummer_check_units(constant_moments([7] * 12, 5, 4, "ZpUnits", 1))["pass"]
    rep = kummer_check_units(constant_moments(list(range(1, 13)), 5, 4, "ZpUnits", 1))
    assert not rep["pass"]
    assert (rep["witness"]["k"], rep["witness"]["k2"]) == (1, 5)


def test_stabilized_zeta_pair_is_congruent():
    vals = {}
    triv = parse_character("1:0")
    for k in (2, 6):
        z = l_value(triv, k, CycRing(1)).c[0]
        vals[k] = (1 - 2**k) * (1 - Fraction(5) ** (k - 1)) * z
    assert vals == {2: -1, 6: -781}
    b = constant_moments([0, vals[2], 0, 0, 0, vals[6]], 5, 1, "ZpUnits", 1)
    assert kummer_check_units(b)["pass"]


@pytest.mark.parametrize("cid,p,c", [("3:quad", 5, 2), ("3:quad", 5, 3), ("5:1", 7, 3)])
def test_eisenstein_measure_kummer(cid, p, c):
    chi = parse_character(cid)
    h = eisenstein_moments(chi, c, 1, 12, 16, 6, p)
    assert h.ring.M == working_precision(p, 6, 12)
    assert kummer_check_zp(h)["pass"]
    for b in (eisenstein_moments(chi, c, 1, 12, 16, 6, p, restricted=True),
              moments_j_tilde(chi, c, 12, 16, 6, p),
              moments_nu_bar(c, 12, 16, 6, p, chi),
              moments_mu(chi, c, 12, 16, 6, p)):
        rep = kummer_check_units(b)
        assert rep["pass"] and rep["pairs_checked"] > 0


def test_perturbation_breaks_kummer():
    b = moments_mu(CHI3, 2, 12, 16, 6, 5).perturbed(3)
    rep = kummer_check_units(b)
    assert not rep["pass"] and rep["witness"]["k"] == 3
    h = eisenstein_moments(CHI3, 2, 1, 12, 16, 6, 5).perturbed(3)
    assert not kummer_check_zp(h)["pass"]


def test_trivial_measures():
    z = eisenstein_moments(CHI3, 1, 1, 6, 10, 4, 5)
    assert all(m.is_zero() for m in z.moments)
    h = eisenstein_moments(CHI3, 2, 1, 6, 10, 4, 5)
    # moment k has weight k+1; odd chi forces even k+1 to vanish
    assert all(h.moment(k).is_zero() for k in (1, 3, 5))
    assert all(m.is_zero() for m in moments_j_tilde(CHI3, 1, 6, 10, 4, 5).moments)
    jt = moments_j_tilde(CHI3, 2, 6, 10, 4, 5)
    assert all(jt.moment(k).is_zero() for k in (2, 4, 6))
    nu = moments_nu_bar(2, 6, 10, 4, 5)
    assert all(nu.moment(k).is_zero() for k in (1, 3, 5))
    assert all(m.is_zero() for m in moments_nu_bar(1, 6, 10, 4, 5).moments)


def test_restriction_consistency():
    p, c = 5, 2
    for r in range(3):
        ring = run_ring(CHI3, p, r + 1)
        for k in range(4):
            lhs = h_moment(CHI3, c, 1, k + (p - 1) * p**r, 16, ring)
            assert lhs == j_moment(CHI3, c, 1, k, 16, ring)


def test_mu_additivity_and_first_moment():
    mu = moments_mu(CHI3, 2, 6, 16, 5, 5)
    nu = moments_nu_bar(2, 6, 16, 5, 5, CHI3)
    jt = moments_j_tilde(CHI3, 2, 6, 16, 5, 5)
    for k in mu.indices:
        assert mu.moment(k) == nu.moment(k) + jt.moment(k)
    rat = CHI3.natural_ring()
    g1 = eisenstein_chi(1, CHI3, 16, rat)
    expected = (g1 - frob(g1, 5)).scale(1 - 2).reduce(mu.ring)
    assert mu.moment(1) == expected


@pytest.mark.parametrize("k", [EXACT_WEIGHT_LIMIT + 3, EXACT_WEIGHT_LIMIT + 5])
def test_large_weight_route_matches_exact(k):
    p = 5
    ring = run_ring(CHI3, p, 5)
    rat = CHI3.natural_ring()
    exact = p_stabilize(eisenstein_chi(k, CHI3, 16, rat), k, p).scale(1 - Fraction(2) ** k).reduce(ring)
    assert j_tilde_moment(CHI3, 2, k, 16, ring) == exact


def test_large_weight_nu_bar_with_p_in_denominator():
    p, k = 5, EXACT_WEIGHT_LIMIT + 4  # (p-1) | k, so zeta(1-k) has 5 in its denominator
    ring = run_ring(CHI3, p, 5)
    rat = CHI3.natural_ring()
    exact = p_stabilize(eisenstein_level_one(k, 16, rat), k, p).scale(1 - Fraction(2) ** k).reduce(ring)
    assert nu_bar_moment(2, k, 16, ring) == exact


def test_iwasawa_log_examples():
    assert iwasawa_log(1, 5, 4) == 0
    assert iwasawa_log(2, 5, 2) == 15
    for p in (3, 5, 7):
        for c in range(1, 30):
            if c % p:
                assert iwasawa_log(c, p, 5) % p == 0
    with pytest.raises(ParameterError):
        iwasawa_log(10, 5, 3)


@given(st.sampled_from([3, 5, 7]), st.integers(1, 200), st.integers(1, 200), st.integers(1, 6))
def test_iwasawa_log_is_additive(p, a, b, M):
    if a % p == 0 or b % p == 0:
        return
    assert (iwasawa_log(a, p, M) + iwasawa_log(b, p, M)) % p**M == iwasawa_log(a * b, p, M)


@pytest.mark.parametrize("p,c", [(3, 2), (5, 2), (5, 3), (7, 3), (7, 10)])
def test_iwasawa_log_against_limit_oracle(p, c):
    assert iwasawa_log(c, p, 6) == log_oracle(c, p, 6)


def test_mean_targets_frozen():
    assert [mean_target(2, 5, 6), mean_target(3, 5, 6), mean_target(3, 7, 6)] == [11643, 2301, 53927]
    for c, p in [(2, 5), (3, 5), (3, 7)]:
        assert mean_target(c, p, 6) == log_oracle(c, p, 7) // p


def test_mean_of_dirac():
    ring = CycRing(1, 5, 4)
    one = QExpansion.constant(ring, 1, 4)
    ml = mean_via_limit(lambda k: one, 5, 4, 4, 3)
    assert all(a == one for a in ml.approximations)
    assert ml.exponents == (4, 20, 100, 500)


@pytest.mark.parametrize("cid,p,c,rmax", [("3:quad", 5, 2, 4), ("3:quad", 5, 3, 4), ("5:1", 7, 3, 3)])
def test_means(cid, p, c, rmax):
    chi = parse_character(cid)
    M, Q = 6, 16
    ring = run_ring(chi, p, M)
    jt = mean_via_limit(lambda k: j_tilde_moment(chi, c, k, Q, ring), p, M, Q, rmax)
    assert all(v >= r for r, v in enumerate(jt.valuations))
    target = QExpansion.constant(ring, mean_target(c, p, M), Q)
    mu = mean_via_limit(lambda k: j_tilde_moment(chi, c, k, Q, ring) + nu_bar_moment(c, k, Q, ring),
                        p, M, Q, rmax)
    assert [(m - target).valuation() for m in mu.approximations] == list(range(1, rmax + 2))
    nu = mean_via_limit(lambda k: nu_bar_moment(c, k, Q, ring), p, M, Q, rmax)
    assert [(m - target).valuation() for m in nu.approximations] == list(range(1, rmax + 2))


def test_preconditions():
    with pytest.raises(ParameterError):
        moments_nu_bar(3, 4, 8, 3, 2)
    with pytest.raises(ParameterError):
        moments_mu(parse_character("5:2"), 2, 4, 8, 3, 7)
    with pytest.raises(ParameterError):
        run_ring(CHI3, 3, 4)
    with pytest.raises(ParameterError):
        moments_j_tilde(CHI3, 5, 4, 8, 3, 5)
    with pytest.raises(ParameterError):
        eisenstein_moments(CHI3, 2, 3, 4, 8, 3, 5)
    b = moments_mu(CHI3, 2, 4, 8, 3, 5)
    with pytest.raises(ParameterError):
        b.perturbed(9)


def test_to_json_shape():
    b = moments_j_tilde(CHI3, 2, 3, 4, 3, 5)
    obj = b.to_json()
    assert obj["domain"] == "ZpUnits" and sorted(obj["moments"]) == ["1", "2", "3"]
