"""The characteristic-p differential equation for the branch-locus
polynomial g.

For m | N the solution of

    dg/g - m * sum_{j<=nu} t^{-m p^j - 1} dt = c dt / (t^{N + m p^nu + 1} g)

is g(t) = h(t^m), where h solves the m = 1 problem with N' = N/m and
c' = c/m.  Writing h = sum alpha_k t^k and comparing coefficients of
t^{k - p^nu - 1} dt gives the ascending recursion

    alpha_k = (k - p^nu) alpha_{k - p^nu} - sum_{j<nu} alpha_{k - p^nu + p^j} - c' [k = -N']

with alpha_k = 0 below -N'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import linalg
from .errors import BadInput, CertificateError
from .fields import (FFElem, FiniteField, LaurentPoly, derivative, embed, make_field,
                     roots_in_extension, squarefree_check)


@dataclass(frozen=True)
class GProblem:
    p: int
    m: int
    nu: int
    N: int
    c: Optional[FFElem] = None

    def __post_init__(self) -> None:
        if self.m < 1 or self.m % self.p == 0:
            raise BadInput("m must be positive and prime to p")
        if self.nu < 0 or self.N < 1:
            raise BadInput("need nu >= 0 and N >= 1")
        if self.c is not None and self.c.is_zero():
            raise BadInput("c must be nonzero")

    @property
    def field(self) -> FiniteField:
        return self.c.field if self.c is not None else make_field(self.p, 1)

    @property
    def const(self) -> FFElem:
        """c, defaulting to m mod p."""
        return self.c if self.c is not None else self.field(self.m)

    @property
    def m_prev(self) -> int:
        """m_{n-1} = m p^nu."""
        return self.m * self.p ** self.nu


@dataclass
class GSolution:
    problem: GProblem
    g: LaurentPoly
    N1: int
    N2: int
    _roots: Optional[Tuple[FiniteField, List[FFElem]]] = field(default=None, repr=False)

    def roots(self) -> Tuple[FiniteField, List[FFElem]]:
        """The distinct zeros x_i of g (outside 0), in the splitting field."""
        if self._roots is None:
            big, rts = roots_in_extension(self.g)
            if any(mult != 1 for _, mult in rts):
                raise CertificateError("g has a multiple root")
            self._roots = (big, [r for r, _ in rts])
        return self._roots

    def coefficient_table(self) -> Dict[int, FFElem]:
        """i -> coefficient of t^{-i}."""
        return {-e: c for e, c in self.g.terms.items()}


def _solve_m1(p: int, nu: int, N: int, c: FFElem, horizon: Optional[int] = None) -> Dict[int, FFElem]:
    P = p ** nu
    F = c.field
    zero = F.zero
    alpha: Dict[int, FFElem] = {}
    top = horizon if horizon is not None else p ** (nu + 1) + N
    top += P  # one extra full period for the tail check
    for k in range(-N, top + 1):
        v = alpha.get(k - P, zero) * (k - P)
        for j in range(nu):
            v = v - alpha.get(k - P + p ** j, zero)
        if k == -N:
            v = v - c
        alpha[k] = v
    tail = [alpha[k] for k in range(top - P + 1, top + 1)]
    if any(not x.is_zero() for x in tail):
        raise CertificateError("recursion tail does not vanish; parameters inconsistent")
    return {k: a for k, a in alpha.items() if not a.is_zero()}


def solve_g(prob: GProblem, horizon: Optional[int] = None) -> GSolution:
    p, m, nu, N = prob.p, prob.m, prob.nu, prob.N
    if N % m:
        raise BadInput(f"m = {m} does not divide N = {N}")
    Np = N // m
    c = prob.const
    cp = c / c.field(m)
    alpha = _solve_m1(p, nu, Np, cp, horizon)
    if any(k > 0 for k in alpha):
        raise CertificateError("solution is not a polynomial in t^-1")
    h = LaurentPoly(c.field, alpha, "t")
    g = h.subs_power(m)
    N2 = -g.max_exp()
    sol = GSolution(prob, g, N - N2, N2)
    if g.min_exp() != -N:
        raise CertificateError("ord_0(g) != -N")
    if not squarefree_check(g):
        raise CertificateError("g is not squarefree")
    ok, where = verify_g(sol, prob)
    if not ok:
        raise CertificateError(f"differential identity fails at {where}")
    return sol


def eta_form_sum(prob: GProblem, F: FiniteField) -> LaurentPoly:
    """m * sum_{j<=nu} t^{-m p^j - 1} (mantissa of -eta)."""
    return LaurentPoly(F, {-prob.m * prob.p ** j - 1: F(prob.m) for j in range(prob.nu + 1)}, "t")


def verify_g(sol: GSolution, prob: GProblem) -> Tuple[bool, Optional[str]]:
    """Check t^{N + m p^nu + 1} (g' - g m sum t^{-m p^j - 1}) = c and the
    order of omega at infinity."""
    g = sol.g
    F = g.ring
    c = prob.const if prob.const.field == F else embed(prob.const, F)
    lhs = (derivative(g).mantissa - g * eta_form_sum(prob, F)).shift(prob.N + prob.m_prev + 1)
    diff = lhs - LaurentPoly.constant(F, c, "t")
    if not diff.is_zero():
        bad = min(diff.terms)
        return False, f"coefficient of t^{bad}"
    if g.is_zero():
        return False, "g = 0"
    # omega = c dt / (t^{N + m p^nu + 1} g);  ord_inf(g) = -max_exp(g)
    ord_g = -g.max_exp()
    ord_omega = -2 + (prob.N + prob.m_prev + 1) - ord_g
    if ord_omega != sol.N1 + prob.m_prev - 1:
        return False, "ord_inf(omega)"
    return True, None


def recursion_coeffs(prob: GProblem, upto: int, normalize: bool = False) -> List[FFElem]:
    """[c_0, ..., c_upto] with c_i the coefficient of t^{-i} in g; with
    ``normalize`` the solution is rescaled so that c_0 = 1."""
    sol = solve_g(prob)
    table = sol.coefficient_table()
    F = sol.g.ring
    vals = [table.get(i, F.zero) for i in range(upto + 1)]
    if normalize:
        c0 = table.get(0, F.zero)
        if c0.is_zero():
            raise BadInput("c_0 = 0 (N_2 > 0): cannot normalize")
        inv = c0.inverse()
        vals = [v * inv for v in vals]
    return vals


def eqrec_residual(prob: GProblem, coeffs: List[FFElem], c: FFElem) -> List[int]:
    """Indices i where i c_i + m (c_{i-m} + ... + c_{i-p^nu m}) differs from
    -c [i = N + m p^nu]."""
    bad = []
    F = coeffs[0].field
    get = lambda i: coeffs[i] if 0 <= i < len(coeffs) else F.zero
    for i in range(len(coeffs)):
        v = get(i) * i
        for j in range(prob.nu + 1):
            v = v + get(i - prob.p ** j * prob.m) * prob.m
        target = -c if i == prob.N + prob.m_prev else F.zero
        if v != target:
            bad.append(i)
    return bad


@dataclass
class Assumption2:
    matrix: List[List[FFElem]]
    rows: List[int]
    square: bool
    invertible: bool
    determinant: Optional[FFElem]


def assumption2_rows(N1: int, m_prev: int, p: int) -> List[int]:
    return [l for l in range(N1 + m_prev - 1) if (l + 1) % p]


def assumption2_matrix(sol: GSolution, m_prev: int) -> Assumption2:
    big, roots = sol.roots()
    p = sol.problem.p
    rows = assumption2_rows(sol.N1, m_prev, p)
    A = [[x ** l for x in roots] for l in rows]
    square = len(rows) == len(roots)
    if square:
        d = linalg.det(A, big.one) if rows else big.one
        return Assumption2(A, rows, True, not d.is_zero(), d)
    rk = linalg.rank(A) if A else 0
    return Assumption2(A, rows, False, False, None)
