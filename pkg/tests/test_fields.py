from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cyclift.errors import BadInput
from cyclift.fields import (DiffForm, FiniteField, LaurentPoly, cartier, derivative, embed, log_derivative,
                            make_field, poly_arith, poly_from_json, poly_to_json, roots_in_extension,
                            squarefree_check)

FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3), (5, 2)]


def elem(F: FiniteField):
    return st.tuples(*[st.integers(0, F.p - 1)] * F.d).map(F)


@st.composite
def field_and_elems(draw, k=3):
    p, d = draw(st.sampled_from(FIELDS))
    F = make_field(p, d)
    return (F,) + tuple(draw(elem(F)) for _ in range(k))


@st.composite
def laurent(draw, F=None, lo=-6, hi=2, var="t"):
    if F is None:
        F = make_field(*draw(st.sampled_from(FIELDS)))
    exps = draw(st.lists(st.integers(lo, hi), max_size=5, unique=True))
    return LaurentPoly(F, {e: draw(elem(F)) for e in exps}, var)


def t(F, terms):
    return LaurentPoly(F, {e: F(c) for e, c in terms.items()})


# examples --------------------------------------------------------------------


def test_make_field_moduli():
    assert make_field(5, 1).modulus == (0, 1)
    assert make_field(2, 2).modulus == (1, 1, 1)
    assert make_field(3, 2).modulus == (1, 0, 1)
    assert make_field(3, 2) is make_field(3, 2)


def test_make_field_rejects_composite():
    with pytest.raises(BadInput):
        make_field(4, 1)


def test_poly_arith_examples():
    F = make_field(5, 1)
    assert poly_arith(t(F, {0: 1, -1: 1}), t(F, {0: 1, -1: -1}), "mul") == t(F, {0: 1, -2: -1})
    a = t(F, {0: 1, -1: 2})
    assert poly_arith(a, t(F, {0: 1}), "mul") == a
    s = poly_arith(t(F, {0: 1, -1: 2}), t(F, {0: 4, -1: 3}), "add")
    assert s.is_zero() and s.terms == {}


def test_poly_arith_mismatch():
    with pytest.raises(BadInput):
        poly_arith(t(make_field(5, 1), {0: 1}), t(make_field(3, 1), {0: 1}), "add")


def test_derivative_examples():
    F = make_field(5, 1)
    assert derivative(t(F, {5: 1})).is_zero()
    assert derivative(t(F, {-1: 1})).mantissa == t(F, {-2: -1})
    assert derivative(t(F, {0: 1, -3: 2})).mantissa == t(F, {-4: 4})


def test_log_derivative_examples():
    F = make_field(5, 1)
    assert log_derivative(t(F, {0: 1}), 10).is_zero()
    x = F(3)
    series = log_derivative(LaurentPoly(F, {0: F.one, -1: -x}), 8)
    # x t^-2 / (1 - x t^-1) = sum x^k t^{-k-1}
    assert series == DiffForm(LaurentPoly(F, {-k - 1: x ** k for k in range(1, 8)}), -8)
    assert log_derivative(t(F, {-3: 1}), 5) == DiffForm(t(F, {-1: -3}), -5)


def test_cartier_examples():
    F = make_field(5, 1)
    assert cartier(DiffForm(t(F, {0: 1}))).is_zero()
    assert cartier(DiffForm(t(F, {5 * 2 - 1: 1}))) == DiffForm(t(F, {1: 1}))
    eta = DiffForm(t(F, {-2: -1, -6: -1}))
    omega = DiffForm(t(F, {-6: 1}))
    assert cartier(eta) == DiffForm(t(F, {-2: -1})) == eta + omega


def test_squarefree_examples():
    F = make_field(5, 1)
    assert not squarefree_check(t(F, {0: 1, -1: -2, -2: 1}))
    assert squarefree_check(t(F, {0: 1, -2: -1}))
    assert not squarefree_check(t(F, {0: 1, -5: -1}))


def test_roots_in_extension_grows_field():
    F = make_field(3, 1)
    big, roots = roots_in_extension(t(F, {0: 1, -2: 1}))  # 1 + t^-2: roots are +-i
    assert big.d == 2 and len(roots) == 2 and all(m == 1 for _, m in roots)


def test_poly_json_round_trip():
    F = make_field(3, 2)
    f = LaurentPoly(F, {-3: F((1, 2)), 0: F.one})
    assert poly_from_json(poly_to_json(f), F) == f


# properties --------------------------------------------------------------------


@given(field_and_elems())
def test_ring_axioms(data):
    F, a, b, c = data
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    if not a.is_zero():
        assert a * a.inverse() == F.one


@given(field_and_elems(2))
def test_frobenius_additive(data):
    F, a, b = data
    assert (a + b).frobenius() == a.frobenius() + b.frobenius()
    assert a.pth_root().frobenius() == a


@given(laurent(), st.data())
def test_cartier_additive_and_semilinear(f, data):
    F = f.ring
    g = data.draw(laurent(F))
    w1, w2 = DiffForm(f), DiffForm(g)
    assert cartier(w1 + w2) == cartier(w1) + cartier(w2)
    h = data.draw(laurent(F, lo=-2, hi=1))
    assert cartier(DiffForm(h ** F.p * f)) == DiffForm(h * cartier(w1).mantissa)


@given(laurent())
def test_cartier_kills_exact_forms(g):
    assert cartier(derivative(g)).is_zero()


@given(laurent(lo=-4, hi=0), st.data())
def test_log_derivative_multiplicative(g1, data):
    F = g1.ring
    g2 = data.draw(laurent(F, lo=-4, hi=0))
    if g1.is_zero() or g2.is_zero():
        return
    depth = 12
    lhs = log_derivative(g1 * g2, depth)
    assert lhs == log_derivative(g1, depth) + log_derivative(g2, depth)


@given(laurent(lo=-5, hi=0))
def test_roots_count_with_multiplicity(g):
    if len(g.terms) < 2:
        return
    lo, hi = g.min_exp(), g.max_exp()
    big, roots = roots_in_extension(g)
    # the cleared polynomial g t^{-lo} has degree hi - lo and splits over big
    assert sum(m for _, m in roots) == hi - lo
    for r, _ in roots:
        assert not r.is_zero()
        assert sum((embed(c, big) * r ** (e - lo) for e, c in g.terms.items()), big.zero).is_zero()
