"""Truncated Witt vectors over F_{p^d}[t^{-1}], Artin-Schreier-Witt
normalisation, upper ramification breaks and the break-sequence condition
checkers.

Addition uses the universal polynomials S_0, ..., S_{n-1}, obtained once per
(p, n) from the ghost-component recursion over Z and reduced mod p.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import ZZ
from sympy.polys.rings import ring

from .errors import BadInput, CertificateError
from .fields import FFElem, FiniteField, LaurentPoly, embed, make_field

Monomial = Tuple[int, ...]

_UNIVERSAL: Dict[Tuple[int, int], List[List[Tuple[Monomial, int]]]] = {}
_UNIVERSAL_LOCK = threading.Lock()


def universal_addition(p: int, n: int) -> List[List[Tuple[Monomial, int]]]:
    """S_0..S_{n-1} reduced mod p, as lists of (exponent vector, coeff).

    Exponent vectors index (X_0..X_{n-1}, Y_0..Y_{n-1}).
    """
    key = (p, n)
    with _UNIVERSAL_LOCK:
        cached = _UNIVERSAL.get(key)
        if cached is not None:
            return cached
        names = [f"X{i}" for i in range(n)] + [f"Y{i}" for i in range(n)]
        R, *gens = ring(",".join(names), ZZ)
        X, Y = gens[:n], gens[n:]
        S = []
        for k in range(n):
            acc = R(0)
            for i in range(k + 1):
                acc += p ** i * (X[i] ** (p ** (k - i)) + Y[i] ** (p ** (k - i)))
            for i in range(k):
                acc -= p ** i * S[i] ** (p ** (k - i))
            S.append(acc.quo_ground(p ** k))
        out = []
        for s in S:
            terms = [(tuple(mon), int(c) % p) for mon, c in s.terms() if int(c) % p]
            out.append(terms)
        _UNIVERSAL[key] = out
        return out


def _eval_universal(terms: List[Tuple[Monomial, int]], vals: Sequence[LaurentPoly],
                    skip: Sequence[int] = ()) -> LaurentPoly:
    """Evaluate sum c * prod vals[i]^e_i, skipping monomials that use a zero
    value or an index in ``skip``."""
    ring_ = vals[0].ring
    zero_idx = {i for i, v in enumerate(vals) if v.is_zero()}
    powers: Dict[Tuple[int, int], LaurentPoly] = {}

    def pw(i: int, e: int) -> LaurentPoly:
        key = (i, e)
        got = powers.get(key)
        if got is None:
            got = vals[i] ** e
            powers[key] = got
        return got

    acc = LaurentPoly.zero(ring_, vals[0].var)
    for mon, c in terms:
        if any(e and (i in zero_idx or i in skip) for i, e in enumerate(mon)):
            continue
        term: Optional[LaurentPoly] = None
        for i, e in enumerate(mon):
            if e:
                term = pw(i, e) if term is None else term * pw(i, e)
        if term is None:
            term = LaurentPoly.constant(ring_, ring_.one, vals[0].var)
        acc = acc + term * c
    return acc


class WittVector:
    """Element of W_n(F_{p^d}[t, t^{-1}])."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[LaurentPoly]):
        coords = tuple(coords)
        if not coords:
            raise BadInput("Witt vector needs at least one coordinate")
        F = coords[0].ring
        if any(c.ring != F for c in coords):
            raise BadInput("all coordinates must share the same field")
        self.coords = coords

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def field(self) -> FiniteField:
        return self.coords[0].ring

    @property
    def p(self) -> int:
        return self.field.p

    @classmethod
    def from_terms(cls, field: FiniteField, coords: Sequence[Dict[int, int]], var: str = "t") -> "WittVector":
        return cls([LaurentPoly(field, {e: field(c) for e, c in d.items()}, var) for d in coords])

    def _check(self, other: "WittVector") -> None:
        if self.n != other.n:
            raise BadInput("length mismatch")
        if self.field != other.field:
            raise BadInput("field mismatch")

    def __add__(self, other: "WittVector") -> "WittVector":
        return witt_add(self, other)

    def __neg__(self) -> "WittVector":
        return witt_neg(self)

    def __sub__(self, other: "WittVector") -> "WittVector":
        return witt_add(self, witt_neg(other))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.n == other.n and all(a == b for a, b in zip(self.coords, other.coords))

    def __hash__(self) -> int:  # pragma: no cover
        return hash(self.n)

    def embed(self, target: FiniteField) -> "WittVector":
        return WittVector([c.embed(target) for c in self.coords])

    def __repr__(self) -> str:
        return "W(" + ", ".join(repr(c) for c in self.coords) + ")"


def witt_add(a: WittVector, b: WittVector) -> WittVector:
    a._check(b)
    n = a.n
    S = universal_addition(a.p, n)
    vals = list(a.coords) + list(b.coords)
    return WittVector([_eval_universal(S[k], vals) for k in range(n)])


def witt_neg(a: WittVector) -> WittVector:
    """Additive inverse, solved coordinate by coordinate from
    S_k(x, y) = x_k + y_k + R_k(x_<k, y_<k) = 0."""
    n, F = a.n, a.field
    S = universal_addition(a.p, n)
    var = a.coords[0].var
    ys: List[LaurentPoly] = []
    for k in range(n):
        # R_k excludes the linear terms X_k and Y_k
        rest = [(mon, c) for mon, c in S[k]
                if not (sum(mon) == 1 and (mon[k] == 1 or mon[n + k] == 1))]
        padded = list(ys) + [LaurentPoly.zero(F, var)] * (n - k)
        vals = list(a.coords) + padded
        r = _eval_universal(rest, vals) if rest else LaurentPoly.zero(F, var)
        ys.append(-a.coords[k] - r)
    return WittVector(ys)


def witt_sub(a: WittVector, b: WittVector) -> WittVector:
    return witt_add(a, witt_neg(b))


def frobenius(a: WittVector) -> WittVector:
    return WittVector([c.frobenius() for c in a.coords])


def wp(a: WittVector) -> WittVector:
    return witt_add(frobenius(a), witt_neg(a))


def artin_schreier_root(a: FFElem) -> Optional[FFElem]:
    """Some y in the field of a with y^p - y = a, or None."""
    F = a.field
    p, d = F.p, F.d
    # matrix of y -> y^p - y over F_p, columns are images of basis vectors
    cols = []
    for i in range(d):
        e = F(tuple(1 if j == i else 0 for j in range(d)))
        cols.append(list((e.frobenius() - e).c))
    # solve sum x_i cols[i] = a over F_p by Gaussian elimination
    rows = [[cols[i][r] for i in range(d)] + [a.c[r]] for r in range(d)]
    piv_cols = []
    rk = 0
    for c in range(d):
        pr = next((r for r in range(rk, d) if rows[r][c] % p), None)
        if pr is None:
            continue
        rows[rk], rows[pr] = rows[pr], rows[rk]
        inv = pow(rows[rk][c], p - 2, p)
        rows[rk] = [v * inv % p for v in rows[rk]]
        for r in range(d):
            if r != rk and rows[r][c] % p:
                f = rows[r][c]
                rows[r] = [(v - f * w) % p for v, w in zip(rows[r], rows[rk])]
        piv_cols.append(c)
        rk += 1
    if any(rows[r][d] % p for r in range(rk, d)):
        return None
    x = [0] * d
    for r, c in enumerate(piv_cols):
        x[c] = rows[r][d]
    return F(x)


def _top_bad_exponent(f: LaurentPoly, p: int) -> Optional[int]:
    bad = [e for e in f.terms if e % p == 0]
    return min(bad) if bad else None


def normalize(w: WittVector, max_steps: int = 100000) -> WittVector:
    """A representative of w + wp(y) whose coordinates are polynomials in t^{-1}
    with no constant term and no term of degree divisible by p.

    The field is enlarged (degree times p) when a constant term needs an
    Artin-Schreier root that is not yet available.
    """
    for c in w.coords:
        if not c.is_poly_in_inverse():
            raise BadInput("normalize expects polynomials in t^-1")
    p, n = w.p, w.n
    var = w.coords[0].var
    steps = 0
    for i in range(n):
        while True:
            f = w.coords[i]
            e = _top_bad_exponent(f, p)
            if e is None:
                break
            steps += 1
            if steps > max_steps:
                raise CertificateError("normalization did not terminate")  # pragma: no cover
            a = f.coeff(e)
            F = w.field
            if e < 0:
                b = (-a).pth_root()
                slot = LaurentPoly.monomial(F, e // p, b, var)
            else:
                b = artin_schreier_root(-a)
                if b is None:
                    big = make_field(p, F.d * p)
                    w = w.embed(big)
                    continue
                slot = LaurentPoly.constant(F, b, var)
            ycoords = [LaurentPoly.zero(F, var)] * n
            ycoords[i] = slot
            w = witt_add(w, wp(WittVector(ycoords)))
    return w


def is_normalized(w: WittVector) -> bool:
    return all(c.is_poly_in_inverse() and _top_bad_exponent(c, w.p) is None for c in w.coords)


# ---------------------------------------------------------------------------
# break sequences


@dataclass(frozen=True)
class BreakSequence:
    p: int
    m: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        ok, why = self.check()
        if not ok:
            raise BadInput(f"invalid break sequence {self.m}: {why}")

    def check(self) -> Tuple[bool, Optional[str]]:
        p, m = self.p, self.m
        if not m:
            return False, "empty"
        if any(x < 1 for x in m):
            return False, "breaks must be positive"
        if m[0] % p == 0:
            return False, "p divides m_1"
        for i in range(1, len(m)):
            if m[i] < p * m[i - 1]:
                return False, f"m_{i + 1} < p m_{i}"
            if m[i] % p == 0 and m[i] != p * m[i - 1]:
                return False, f"p | m_{i + 1} but m_{i + 1} != p m_{i}"
        return True, None

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def r(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(1, x * (self.p - 1)) for x in self.m)

    def r_i(self, i: int) -> Fraction:
        """r_i for 1-based i."""
        return Fraction(1, self.m[i - 1] * (self.p - 1))

    def m_i(self, i: int) -> int:
        """m_i for 1-based i, with m_0 = -1."""
        return -1 if i == 0 else self.m[i - 1]

    @property
    def m_prev(self) -> int:
        """m_{n-1}."""
        if self.n < 2:
            raise BadInput("m_{n-1} needs n >= 2")
        return self.m[-2]

    @property
    def m_base(self) -> int:
        """The prime-to-p part m of m_{n-1}."""
        x = self.m_prev
        while x % self.p == 0:
            x //= self.p
        return x

    @property
    def nu(self) -> int:
        x, k = self.m_prev, 0
        while x % self.p == 0:
            x //= self.p
            k += 1
        return k

    @property
    def N(self) -> int:
        return self.m[-1] - self.m_prev

    def to_json(self) -> Dict[str, object]:
        return {"p": self.p, "m": list(self.m)}


def breaks(w: WittVector) -> BreakSequence:
    if not is_normalized(w):
        w = normalize(w)
    p = w.p
    if w.coords[0].is_zero():
        raise BadInput("first coordinate is zero: the extension has order < p^n")
    degs = [c.deg_inv() if not c.is_zero() else None for c in w.coords]
    m = []
    for i in range(w.n):
        cands = [p ** (i - j) * degs[j] for j in range(i + 1) if degs[j] is not None]
        m.append(max(cands))
    bs = BreakSequence.__new__(BreakSequence)
    object.__setattr__(bs, "p", p)
    object.__setattr__(bs, "m", tuple(m))
    ok, why = bs.check()
    if not ok:
        raise CertificateError(f"break invariants violated: {why}")
    return bs


def tsetup_interval_a(m_prev: int, m_next: int, p: int) -> Optional[int]:
    """Smallest integer a with m_next/p - m_prev < a <= m_next/(m_next - m_prev) * (m_next/p - m_prev)."""
    if m_next < p * m_prev:
        raise BadInput("need m_next >= p * m_prev")
    lo = Fraction(m_next, p) - m_prev
    hi = Fraction(m_next, m_next - m_prev) * lo
    a = floor(lo) + 1
    return a if a <= hi else None


def roort_equiv_form(m_prev: int, m_next: int, p: int) -> Tuple[int, int, bool]:
    """(r, eta, holds) with m_next = p m_prev + p r - eta, 0 <= eta < p."""
    eta = (p * m_prev - m_next) % p
    r = (m_next - p * m_prev + eta) // p
    return r, eta, 0 <= r <= eta


def tmain_condition(b: BreakSequence) -> Tuple[bool, Optional[Tuple[int, int]]]:
    for i in range(3, b.n):
        a = tsetup_interval_a(b.m_i(i - 1), b.m_i(i), b.p)
        if a is not None:
            return False, (i, a)
    return True, None


def no_essential_ramification(b: BreakSequence) -> bool:
    return all(b.m_i(i) < b.p * b.m_i(i - 1) + b.p for i in range(2, b.n + 1))


def branch_multiset(b: BreakSequence) -> List[Tuple[int, int]]:
    n, p = b.n, b.p
    return [(p ** (n - i + 1), b.m_i(i) - b.m_i(i - 1)) for i in range(1, n + 1)]


def check_conditions(b: BreakSequence) -> Dict[str, object]:
    ok, witness = tmain_condition(b)
    roort = []
    for i in range(2, b.n + 1):
        r, eta, holds = roort_equiv_form(b.m_i(i - 1), b.m_i(i), b.p)
        roort.append({"i": i, "r": r, "eta": eta, "holds": holds})
    return {
        "tmain": ok,
        "witness": list(witness) if witness else None,
        "ner": no_essential_ramification(b),
        "roort": roort,
    }
