from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclift.errors import BadInput
from cyclift.fields import LaurentPoly
from cyclift.gsolve import GProblem, solve_g
from cyclift.lifting import (GFamilyPoint, KummerData, base_lift_zp, delta_profile, disk_condition, gamma,
                             herbrand_transfer, hp_step_count, improve_hp, improve_once, kink_basis,
                             kink_table_round_trip, lambda_of_G, m_tilde, matrix_A_gamma, matrix_C, minimal_setup,
                             mu_lambda, n2_setup, normalized_coefficients, partB_assemble, partB_solve,
                             restriction_identity, restriction_series)
from cyclift.lifting.family import VAR
from cyclift.lifting.kink import mu_from_table
from cyclift.padic import make_local_field
from cyclift.witt import BreakSequence

ECONDITIONAL_CBAR = [[4, 0, 0, 0, 1], [0, 1, 1, 1, 1], [0, 0, 4, 2, 3], [0, 0, 0, 1, 1], [0, 0, 0, 0, 4]]


def one_term(K, sigma, k):
    """1 + p^sigma T^-k."""
    return LaurentPoly(K, {0: K.one, -k: K.p_power(sigma)}, "T")


# base case and kink basis ------------------------------------------------------


def test_base_lift_polygon():
    kd = base_lift_zp(5, 1)
    assert kd.polygon().segments == ((Fraction(5, 4), 1),)
    assert kd.condition_a()
    with pytest.raises(BadInput):
        base_lift_zp(5, 5)


def test_kink_basis_trivial_cases():
    K = make_local_field(5, 1, 4, 48, -1)
    kr = kink_basis(KummerData(K, LaurentPoly.constant(K, K.one, "T"), Fraction(1)), Fraction(1, 2))
    assert kr.H == LaurentPoly.constant(K, K.one, "T") and all(c.is_zero() for c in kr.c.values())
    base = base_lift_zp(5, 1)
    kr = kink_basis(base, Fraction(1, 2))
    assert kr.b_valuations() == {}
    assert {k for k, c in kr.c.items() if not c.is_zero()} == {1}
    assert kink_table_round_trip(kr)


def test_kink_basis_peels_p_multiples():
    K = make_local_field(3, 1, 2, 40, -1)
    F = LaurentPoly(K, {0: K.one, -1: K.p_power(1), -3: K.p_power(Fraction(3, 2))}, "T")
    kr = kink_basis(KummerData(K, F, Fraction(1, 2)), Fraction(1, 4))
    assert kink_table_round_trip(kr)
    for k in range(1, kr.N + 1):
        c = kr.c.get(3 * k)
        assert c is None or c.is_zero() or c.val() - 3 * k * kr.s > Fraction(3, 2)


def test_delta_profile_base_case():
    kr = kink_basis(base_lift_zp(3, 1), Fraction(1, 2))
    d = delta_profile(kr)
    # delta(r) = m_1 r on (0, r0]
    assert d.slopes == (Fraction(1),) and d(0) == 0 and d(Fraction(1, 2)) == Fraction(1, 2)


@given(st.integers(1, 4), st.integers(1, 4))
def test_delta_profile_one_term(k, sig2):
    p = 5
    K = make_local_field(p, 1, 2, 60, -1)
    sigma = Fraction(sig2, 2) + k
    kr = kink_basis(KummerData(K, one_term(K, sigma, k), Fraction(1)), Fraction(1, 2))
    d = delta_profile(kr)
    for r in (Fraction(0), Fraction(1, 7), Fraction(1, 2)):
        assert d(r) == Fraction(p, p - 1) - sigma + k * r


def test_mu_lambda_examples():
    assert mu_from_table({1: Fraction(9, 10), 3: Fraction(1)}, 3) == Fraction(1, 20)
    assert mu_from_table({1: Fraction(1), 3: Fraction(1)}, 3) == 0
    assert mu_from_table({3: Fraction(1)}, 3) == 0
    # the same table realised as a Kummer datum; the kink sits at mu
    K = make_local_field(5, 1, 20, 240, -1)
    F = LaurentPoly(K, {0: K.one, -1: K.p_power(Fraction(9, 10)), -3: K.p_power(Fraction(1))}, "T")
    kr = kink_basis(KummerData(K, F, Fraction(1, 4)), Fraction(1, 5))
    assert mu_lambda(kr, 3, Fraction(1, 5)) == (Fraction(1, 20), Fraction(1, 20))
    d = delta_profile(kr)
    assert d.kinks() == [Fraction(1, 20)] and d.slopes[-1] == 3


@settings(max_examples=25)
@given(st.integers(1, 4), st.integers(2, 6), st.data())
def test_delta_profile_convex_and_mu_consistent(s1, s3, data):
    K = make_local_field(5, 1, 4, 80, -1)
    terms = {0: K.one, -1: K.p_power(Fraction(s1, 4) + Fraction(1, 4)),
             -2: K.p_power(Fraction(data.draw(st.integers(2, 8)), 4)), -3: K.p_power(Fraction(s3, 4) + 1)}
    kr = kink_basis(KummerData(K, LaurentPoly(K, terms, "T"), Fraction(1, 4)), Fraction(1, 5))
    d = delta_profile(kr)
    assert d.is_convex() and all(isinstance(x, Fraction) for x in d.kinks())
    mu, lam = mu_lambda(kr, 3)
    if lam is not None and d.slopes[-1] == 3:
        assert (d.kinks() or [Fraction(0)])[-1] == lam


@given(st.integers(2, 6), st.integers(2, 8))
def test_add_characters_max_rule(a, b):
    """One-term Kummer data with distinct delta: the product has delta = max."""
    p = 5
    K = make_local_field(p, 1, 4, 80, -1)
    s1, s2 = Fraction(a, 4), Fraction(b, 4) + Fraction(1, 4)
    F1, F2 = one_term(K, s1, 1), one_term(K, s2, 2)
    s = Fraction(1, 5)
    r0 = Fraction(1, 4)
    d1, d2, d3 = (delta_profile(kink_basis(KummerData(K, F, r0), s)) for F in (F1, F2, F1 * F2))
    for r in (Fraction(0), Fraction(1, 20), Fraction(1, 9), s):
        if d1(r) != d2(r):
            assert d3(r) == max(d1(r), d2(r))


# Herbrand transfer -------------------------------------------------------------


def test_m_tilde_examples():
    assert m_tilde(5, (1,)) == 21
    assert m_tilde(5, (1, 5)) == 521
    h = herbrand_transfer(BreakSequence(5, (1, 5)))
    assert (h.m_tilde, h.n) == (21, 2)
    assert herbrand_transfer(BreakSequence(5, (1, 5, 25))).m_tilde == 521


@given(st.fractions(0, 1), st.fractions(0, 2))
def test_herbrand_round_trip(r, d):
    h = herbrand_transfer(BreakSequence(5, (1, 5, 25)))
    rt = h.r_tilde(r)
    assert h.r_from_tilde(rt) == r
    assert h.delta_from_tilde(rt, h.delta_tilde(r, d)) == d
    assert h.lam(rt) == r


def test_restriction_n2_exact_parameter():
    setup, G = n2_setup(3, 1)
    Gs = setup.tower_in(G.field)
    res = restriction_series(Gs, G.G_in_T(), setup.herbrand.m_tilde, setup.r0_tilde)
    assert res.exact_parameter
    assert restriction_identity(res, Gs, G.G_in_T())


# family point improvement --------------------------------------------------------


@pytest.fixture(scope="module")
def desk_point():
    return GFamilyPoint.from_solution(solve_g(GProblem(3, 2, 0, 4)))


def test_improve_once_trivial(desk_point):
    G = desk_point
    K = G.field
    r = improve_once(G, LaurentPoly.constant(K, K.one, VAR))
    assert r.G_new.G() == G.G() and r.I == LaurentPoly.constant(K, K.one, VAR)


def test_improve_once_deterministic(desk_point):
    G = desk_point
    K = G.field
    rng = random.Random(3)
    J = LaurentPoly(K, {0: K.one, **{-l: K.random_element(rng, Fraction(1, 2)) for l in range(1, G.m_prime)}}, VAR)
    a, b = improve_once(G, J), improve_once(G, J)
    assert a.G_new.G() == b.G_new.G() and a.I == b.I
    assert a.residual_valuation >= K.cap and a.valuation_guarantee()


def test_hp_step_counts():
    assert gamma(5, 3) == 1 + Fraction(1, 5) + Fraction(1, 25)
    assert hp_step_count(5, Fraction(6, 5)) == 3
    assert hp_step_count(3, Fraction(1, 2)) == 1
    assert hp_step_count(3, Fraction(4, 3)) == 3  # gamma_2 = 4/3 is not enough


def test_improve_hp_trivial(desk_point):
    G = desk_point
    K = G.field
    r = improve_hp(G, LaurentPoly.constant(K, K.one, VAR), Fraction(1))
    assert r.G_new.G() == G.G() and r.H == LaurentPoly.constant(K, K.one, VAR)


# Part B -------------------------------------------------------------------------


def test_matrix_C_econditional():
    b = BreakSequence(5, (1, 5, 34))
    _, sol, G = minimal_setup(b, t_sign=-1)
    C = matrix_C(G, 5, 34, 5)
    assert C.alpha == 4 and C.residue() == ECONDITIONAL_CBAR and C.invertible
    # the inverse has a nonzero upper right entry
    from cyclift import linalg
    coeffs = normalized_coefficients(sol, -1)
    Cbar = matrix_C(coeffs, 5, 34, 5).matrix
    inv = linalg.inverse(Cbar, coeffs[0].field.one)
    assert not inv[0][-1].is_zero()


def test_matrix_A_gamma_trivial():
    b = BreakSequence(3, (1, 3))
    _, _, G = minimal_setup(b)
    A = matrix_A_gamma(G, 1, 3)
    assert A.residue() == [[1]] and A.invertible


def test_partB_zero_datum():
    b = BreakSequence(3, (1, 3, 9))
    K, _, G = minimal_setup(b, t_sign=-1)
    pb = partB_solve(G, LaurentPoly.zero(K, "T"), b.m_prev, 3 * b.m_prev)
    one = LaurentPoly.constant(K, K.one, VAR)
    assert pb.I == one and pb.G_prime == G
    pb = partB_assemble(pb)
    assert pb.H == one
    rep = disk_condition(pb)
    assert rep.predicate_holds and rep.ok


def test_partB_residual_p3():
    b = BreakSequence(3, (1, 3, 10))
    K, _, G = minimal_setup(b, t_sign=-1)
    pb = partB_assemble(partB_solve(G, LaurentPoly(K, {-10: K.one}, "T"), b.m_prev, 10))
    assert pb.residual_valuation >= K.cap - 4
    assert pb.certificate_margin >= pb.epsilon > 0
    assert disk_condition(pb).ok


def test_lambda_of_G_certificates():
    setup, G = n2_setup(3, 1)
    lv = lambda_of_G(setup, G)
    assert lv.ok
    assert lv.value >= 0
