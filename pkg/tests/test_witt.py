from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cyclift.errors import BadInput
from cyclift.fields import LaurentPoly, make_field
from cyclift.witt import (BreakSequence, WittVector, branch_multiset, breaks, check_conditions, frobenius,
                          is_normalized, no_essential_ramification, normalize, roort_equiv_form, tmain_condition,
                          tsetup_interval_a, witt_add, witt_neg, witt_sub, wp)


def W(p, *coords, d=1):
    F = make_field(p, d)
    return WittVector.from_terms(F, [dict(c) for c in coords])


def const_vec(p, digits):
    F = make_field(p, 1)
    return WittVector([LaurentPoly.constant(F, F(a)) for a in digits])


def to_int(p, digits):
    """Sum teich(a_i) p^i mod p^n: W_n(F_p) = Z/p^n."""
    n = len(digits)
    mod = p ** n
    return sum(pow(a, p ** n, mod) * p ** i for i, a in enumerate(digits)) % mod


def digits_of(w):
    return [c.coeff(0).to_int() if c.terms else 0 for c in w.coords]


# examples --------------------------------------------------------------------


def test_addition_examples():
    F = make_field(5, 1)
    f, g = LaurentPoly(F, {-1: F(1)}), LaurentPoly(F, {-2: F(3)})
    assert witt_add(WittVector([f]), WittVector([g])) == WittVector([f + g])
    z = LaurentPoly.zero(F)
    assert WittVector([f, z]) + WittVector([z, g]) == WittVector([f, g])
    assert const_vec(2, [1, 0]) + const_vec(2, [1, 0]) == const_vec(2, [0, 1])


def test_frobenius_and_wp_examples():
    p = 5
    assert frobenius(W(p, {-1: 1}, {})) == W(p, {-5: 1}, {})
    assert wp(const_vec(p, [3, 0])).coords[0].is_zero()
    assert wp(W(p, {-1: 1})) == W(p, {-5: 1, -1: -1})


def test_normalize_examples():
    assert normalize(W(3, {-3: 1})) == W(3, {-1: 1})
    w = W(5, {-1: 1}, {-7: 1, -2: 3})
    assert normalize(w) == w
    out = normalize(W(5, {-1: 1}, {-10: 1, -7: 1}))
    assert is_normalized(out)
    assert all(e % 5 for e in out.coords[1].terms)
    assert breaks(out).m == (1, 7)


def test_breaks_examples():
    assert breaks(W(5, {-1: 1}, {-34: 1})).m == (1, 34)
    assert breaks(W(5, {-1: 1}, {-7: 1}, {-34: 1})).m == (1, 7, 35)
    assert breaks(W(3, {-1: 1})).m == (1,)
    with pytest.raises(BadInput):
        breaks(W(5, {}, {-3: 1}))


def test_breaksequence_invariants():
    b = BreakSequence(5, (1, 5, 34))
    assert b.check()[0]
    for bad in ((5,), (1, 4), (1, 10)):
        with pytest.raises(BadInput):
            BreakSequence(5, bad)
    assert (b.m_base, b.nu, b.m_prev, b.N) == (1, 1, 5, 29)


def test_tmain_examples():
    assert tmain_condition(BreakSequence(5, (1, 5, 34))) == (True, None)
    assert tmain_condition(BreakSequence(5, (1, 5, 34, 170))) == (False, (3, 2))


def test_interval_examples():
    assert tsetup_interval_a(5, 34, 5) == 2
    assert tsetup_interval_a(4, 12, 3) is None
    assert tsetup_interval_a(1, 7, 5) is None


def test_roort_examples():
    assert roort_equiv_form(5, 34, 5) == (2, 1, False)
    assert roort_equiv_form(3, 9, 3) == (0, 0, True)


def test_branch_multiset_examples():
    assert branch_multiset(BreakSequence(5, (1, 5, 34))) == [(125, 2), (25, 4), (5, 29)]
    assert branch_multiset(BreakSequence(3, (1,))) == [(3, 2)]
    assert branch_multiset(BreakSequence(5, (1, 5))) == [(25, 2), (5, 4)]


def test_check_conditions_report():
    rep = check_conditions(BreakSequence(5, (1, 5, 34)))
    assert rep["tmain"] and not rep["ner"]
    assert rep["roort"][-1] == {"i": 3, "r": 2, "eta": 1, "holds": False}


# properties --------------------------------------------------------------------

PRIMES = st.sampled_from([2, 3, 5])


@given(PRIMES, st.integers(1, 3), st.data())
def test_constant_addition_matches_integers(p, n, data):
    a = data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
    s = witt_add(const_vec(p, a), const_vec(p, b))
    assert to_int(p, digits_of(s)) == (to_int(p, a) + to_int(p, b)) % p ** n


@st.composite
def witt_vectors(draw, p, n, deg=3):
    F = make_field(p, 1)
    return WittVector([LaurentPoly(F, {-k: F(draw(st.integers(0, p - 1))) for k in range(deg + 1)})
                       for _ in range(n)])


@given(st.data())
def test_addition_commutative_associative(data):
    p = data.draw(PRIMES)
    n = data.draw(st.integers(1, 3 if p < 5 else 2))
    a, b, c = (data.draw(witt_vectors(p, n)) for _ in range(3))
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert witt_sub(a + b, b) == a
    assert (a + witt_neg(a)) == WittVector([LaurentPoly.zero(a.field)] * n)


@given(st.data())
def test_breaks_class_invariance(data):
    p = data.draw(PRIMES)
    n = data.draw(st.integers(1, 2))
    w = data.draw(witt_vectors(p, n, 4))
    if normalize(w).coords[0].is_zero():
        return
    y = data.draw(witt_vectors(p, n, 2))
    b = breaks(w)
    assert b.check()[0]
    assert breaks(w + wp(y)) == b


@given(st.data())
def test_same_prefix_subtraction(data):
    p = data.draw(PRIMES)
    n = data.draw(st.integers(1, 3 if p < 5 else 2))
    a = data.draw(witt_vectors(p, n))
    last = data.draw(witt_vectors(p, 1)).coords[0]
    b = WittVector(list(a.coords[:-1]) + [last])
    zero = [LaurentPoly.zero(a.field)] * (n - 1)
    assert witt_sub(a, b) == WittVector(zero + [a.coords[-1] - last])


@given(PRIMES, st.integers(1, 30), st.data())
def test_no_essential_ramification_implies_tmain(p, m1, data):
    if m1 % p == 0:
        return
    m = [m1]
    for _ in range(data.draw(st.integers(1, 3))):
        step = data.draw(st.integers(0, p - 1))
        nxt = p * m[-1] + step
        if step and nxt % p == 0:
            nxt += 1
        m.append(nxt)
    try:
        b = BreakSequence(p, tuple(m))
    except BadInput:
        return
    if no_essential_ramification(b):
        assert tmain_condition(b)[0]


@given(PRIMES, st.integers(1, 30), st.integers(0, 200))
def test_interval_test_exact_criterion(p, m_prev, extra):
    """Writing m_next = p m_prev + p r - eta, the interval holds no integer
    exactly when p r m_prev < m_next eta (eta > 0), resp. m_next > m_prev (r + 1)
    (eta = 0); the decomposition 0 <= r <= eta is sufficient for that."""
    m_next = p * m_prev + extra
    empty = tsetup_interval_a(m_prev, m_next, p) is None
    r, eta, holds = roort_equiv_form(m_prev, m_next, p)
    exact = (m_next > m_prev * (r + 1)) if eta == 0 else (p * r * m_prev < m_next * eta)
    assert empty == exact
    if holds:
        assert empty
