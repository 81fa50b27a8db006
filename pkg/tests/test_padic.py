from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cyclift.errors import BadInput, NeedsExtension
from cyclift.fields import LaurentPoly, make_field
from cyclift.padic import (binomial_pth_root_series, gauss_valuation, hensel_root, local_from_json,
                           make_local_field, newton_polygon, pth_root, residue, upper_envelope, zeta_p)


def vp(q: Fraction, p: int) -> int:
    n, d, v = q.numerator, q.denominator, 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


# examples --------------------------------------------------------------------


def test_basic_valuations():
    K = make_local_field(5, 1, 4, 40, -1)
    assert K.from_int(5).val() == 1
    assert K.pi().val() == Fraction(1, 4)
    assert K.p_power(Fraction(3, 4)) == K.pi_power(3)
    with pytest.raises(NeedsExtension):
        K.p_power(Fraction(1, 3))
    # pi^e = -p in a field with sign -1
    assert K.pi_power(4) == -K.from_int(5)


def test_zeta_p():
    for p in (3, 5):
        K = make_local_field(p, 1, p - 1, 40, -1)
        lam = zeta_p(K)
        assert lam.val() == Fraction(1, p - 1)
        assert (lam ** p).val() == Fraction(p, p - 1)
        assert (K.one + lam) ** p == K.one
    with pytest.raises(NeedsExtension):
        zeta_p(make_local_field(5, 1, 1, 40, -1))


def test_gauss_valuation_and_residue():
    K = make_local_field(5, 1, 6, 40)
    F = LaurentPoly(K, {0: K.from_int(5), -3: K.one}, "T")
    assert gauss_valuation(F, Fraction(1, 2)) == Fraction(-3, 2)
    assert gauss_valuation(F, Fraction(-1, 3)) == 1
    # at the radius where both terms tie the residue sees both
    res = residue(F, Fraction(-1, 3), "t")
    assert set(res.terms) == {0, -3}
    assert residue(F, 0, "t").terms.keys() == {-3}
    with pytest.raises(NeedsExtension):
        residue(F, Fraction(1, 4))


def test_newton_polygon_example():
    K = make_local_field(3, 1, 1, 40)
    poly = newton_polygon(LaurentPoly(K, {0: K.one, -1: K.from_int(3)}, "T"))
    assert poly.segments == ((Fraction(1), 1),)
    poly = newton_polygon(LaurentPoly(K, {0: K.from_int(9), -1: K.one, -3: K.from_int(3)}, "T"))
    assert poly.segments == ((Fraction(-2), 1), (Fraction(1, 2), 2))


def test_hensel_square_root():
    K = make_local_field(5, 1, 1, 30)
    x = hensel_root([-(K.one + K.from_int(5)), K.zero, K.one], K.one)
    assert x * x == K.one + K.from_int(5)
    with pytest.raises(BadInput):
        hensel_root([-K.from_int(2), K.zero, K.one], K.one)


def test_pth_root_examples():
    K = make_local_field(3, 1, 1, 30)
    y = pth_root(K.from_int(1 + 27))
    assert y ** 3 == K.from_int(28)
    with pytest.raises(NeedsExtension):
        pth_root(K.from_int(3))


def test_binomial_example():
    K = make_local_field(3, 1, 1, 30)
    G = LaurentPoly(K, {0: K.one, -1: K.from_int(9)}, "T")
    root = binomial_pth_root_series(G, 1, 0, 12)
    assert root.coeff(-1).val() == 1
    # the cube of the truncated series agrees with G through T^-12
    assert (root ** 3).mul_trunc(LaurentPoly.constant(K, K.one, "T"), -12) == G
    with pytest.raises(BadInput):
        binomial_pth_root_series(LaurentPoly(K, {0: K.one, -1: K.from_int(3)}, "T"), 1, 0, 5)


def test_upper_envelope_example():
    f = upper_envelope([(0, 0), (1, -1), (-1, 0)], -2, 3)
    assert f.kinks() == [Fraction(0), Fraction(1)]
    assert f(3) == 2 and f(-2) == 2 and f(Fraction(1, 2)) == 0
    assert f.to_csv().splitlines()[0] == "r,value"


def test_json_round_trip():
    K = make_local_field(5, 2, 3, 20, -1)
    x = K.random_element(random.Random(1), Fraction(1, 3))
    assert local_from_json(x.to_json()) == x


# properties --------------------------------------------------------------------

FIELDS = st.sampled_from([(2, 1, 1), (3, 1, 2), (5, 1, 4), (3, 2, 1), (5, 2, 2)])
RATS = st.fractions().filter(lambda q: q != 0)


@given(FIELDS, RATS, RATS)
def test_rational_arithmetic_is_exact_to_precision(fd, a, b):
    p, d, e = fd
    K = make_local_field(p, d, e, 30, -1)
    x, y = K.from_rational(a), K.from_rational(b)
    assert x.val() == vp(a, p)
    assert x * y == K.from_rational(a * b)
    assert x + y == K.from_rational(a + b)
    assert x / y == K.from_rational(a / b)


@given(FIELDS, st.integers(0, 10 ** 6), st.integers(-3, 3))
def test_precision_soundness(fd, seed, k):
    """Lowering the precision then computing agrees with computing then lowering."""
    p, d, e = fd
    K = make_local_field(p, d, e, 30)
    rng = random.Random(seed)
    x, y = K.random_element(rng, k), K.random_element(rng, 0)
    lo = Fraction(10)
    a = (x.with_prec(lo + x.val()) * y).with_prec(lo + x.val())
    assert a == (x * y).with_prec(lo + x.val())
    assert ((x * y) / y) == x


@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.data())
def test_gauss_valuation_multiplicative(p, ks, data):
    K = make_local_field(p, 1, 2, 40)
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    F = LaurentPoly(K, {-i: K.random_element(rng, k) for i, k in enumerate(ks)}, "T")
    G = LaurentPoly(K, {0: K.one, -2: K.random_element(rng, 0)}, "T")
    r = Fraction(data.draw(st.integers(-6, 6)), 2)
    assert gauss_valuation(F * G, r) == gauss_valuation(F, r) + gauss_valuation(G, r)


@given(st.lists(st.tuples(st.fractions(-5, 5), st.fractions(-5, 5)), min_size=1, max_size=6))
def test_upper_envelope_convex_rational(lines):
    f = upper_envelope(lines, -3, 3)
    assert f.is_convex()
    for x in (Fraction(-3), Fraction(-1, 7), Fraction(2, 3), Fraction(3)):
        assert f(x) == max(a * x + b for a, b in lines)
    assert all(isinstance(k, Fraction) for k in f.kinks())


@given(st.sampled_from([2, 3, 5]), st.integers(0, 10 ** 6))
def test_pth_root_round_trip(p, seed):
    K = make_local_field(p, 1, 1, 30)
    x = K.random_element(random.Random(seed), 0)
    if x.val() != 0:
        return
    x = x ** p  # certainly a p-th power
    y = pth_root(x)
    assert y ** p == x
    assert y.residue() == x.residue().pth_root()


@given(st.integers(0, 10 ** 6))
def test_newton_polygon_counts_roots(seed):
    """A product of linear factors has slopes at the valuations of the roots."""
    p = 3
    K = make_local_field(p, 1, 1, 40)
    rng = random.Random(seed)
    vals = sorted(rng.randint(0, 3) for _ in range(3))
    F = LaurentPoly.constant(K, K.one, "T")
    for v in vals:
        # 1 - a T^-1 has its zero at T = a
        a = K.pi_power(v) * K.teichmuller(make_field(p, 1)(rng.randint(1, p - 1)))
        F = F * LaurentPoly(K, {0: K.one, -1: -a}, "T")
    poly = newton_polygon(F)
    got = sorted(v for s, n in poly.segments for v in [s] * n)
    assert got == sorted(Fraction(v) for v in vals)
