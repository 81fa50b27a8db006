"""The family G_n of lifts of the branch-locus polynomial and the
improvement solvers.

A point of the family is G = prod (1 - u_i Tt^{-1}) where Tt = p^{-r_{n-1}} T
and the u_i are units reducing to the zeros of the characteristic-p
solution g.  All series are polynomials in the variable ``Tt`` with
non-positive exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .. import linalg
from ..errors import BadInput, CertificateError, NeedsExtension, PrecisionError
from ..fields import LaurentPoly, series_inverse_inv
from ..gsolve import GSolution, assumption2_matrix
from ..padic import (EXACT, LocalElement, LocalField, embed_element, embed_poly, gauss_valuation,
                     make_local_field, pth_root_approx, rat_to_str, residue)

VAR = "Tt"


def _one(K: LocalField, var: str = VAR) -> LaurentPoly:
    return LaurentPoly.constant(K, K.one, var)


def min_valuation(P: LaurentPoly, skip_constant: bool = False) -> Fraction:
    """min_k v(coefficient), i.e. the Gauss valuation at radius 0; EXACT for
    the zero polynomial."""
    best = EXACT
    for e, c in P.terms.items():
        if skip_constant and e == 0:
            continue
        best = min(best, c.val_lower())
    return best


def series_quotient(A: LaurentPoly, B: LaurentPoly, depth: int) -> LaurentPoly:
    """A / B as a series in var^{-1} to exponent -depth; B must have
    constant term 1."""
    K = B.ring
    c0 = B.coeff(0)
    if not (c0 - K.one).is_zero():
        raise BadInput("denominator must have constant term 1")
    inv = series_inverse_inv(B - _one(K, B.var), depth)
    return A.mul_trunc(inv, -depth)


# ---------------------------------------------------------------------------
# family points


@dataclass
class GFamilyPoint:
    """G = prod (1 - u_i Tt^{-1}) with x_i = p^{r_{n-1}} u_i."""

    solution: GSolution
    field: LocalField
    units: List[LocalElement]
    r_prev: Fraction
    t_sign: int = 1

    @classmethod
    def from_solution(cls, sol: GSolution, e: Optional[int] = None, prec: Optional[int] = None,
                      sign: int = 1, t_sign: int = 1) -> "GFamilyPoint":
        """The Teichmuller point: u_i the Teichmuller lifts of the zeros.

        t_sign = -1 uses the zeros of g(-t), i.e. the reduction convention
        t -> -t."""
        big, roots = sol.roots()
        prob = sol.problem
        r_prev = Fraction(1, prob.m_prev * (prob.p - 1))
        if e is None:
            e = r_prev.denominator
        if (r_prev * e).denominator != 1:
            raise BadInput(f"e = {e} cannot express r_(n-1) = {r_prev}")
        if prec is None:
            prec = 8 * e
        K = make_local_field(prob.p, big.d, e, prec, sign)
        if t_sign not in (1, -1):
            raise BadInput("t_sign must be +1 or -1")
        return cls(sol, K, [K.teichmuller(x) * t_sign for x in roots], r_prev, t_sign)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def N1(self) -> int:
        return len(self.units)

    @property
    def m_prev(self) -> int:
        return self.solution.problem.m_prev

    @property
    def m_prime(self) -> int:
        return self.N1 + self.m_prev

    def G(self) -> LaurentPoly:
        K = self.field
        out = _one(K)
        for u in self.units:
            out = out * LaurentPoly(K, {0: K.one, -1: -u}, VAR)
        return out

    def G_in_T(self) -> LaurentPoly:
        """G as a polynomial in T^{-1} (Tt^{-k} = p^{k r_{n-1}} T^{-k})."""
        return to_T(self.G(), self.r_prev)

    def x(self, i: int) -> LocalElement:
        return self.units[i] * self.field.p_power(self.r_prev)

    def embed(self, K: LocalField) -> "GFamilyPoint":
        if K == self.field:
            return self
        return GFamilyPoint(self.solution, K, [embed_element(u, K) for u in self.units], self.r_prev, self.t_sign)

    def perturbed(self, zs: Sequence[LocalElement]) -> "GFamilyPoint":
        return GFamilyPoint(self.solution, self.field,
                            [(u + z).as_exact() for u, z in zip(self.units, zs)], self.r_prev, self.t_sign)

    def residue_check(self) -> bool:
        """[G]_{r_{n-1}} equals g normalized to the form prod (1 - x_i t^{-1})."""
        if any(u.valuation_or_none() != 0 for u in self.units):
            return False
        red = residue(self.G(), 0, "t")
        g = self.solution.g
        F = self.field.residue_field
        lead = g.coeff(-self.solution.N2)
        target = (g * lead.inverse()).shift(self.solution.N2)
        if self.t_sign == -1:
            target = LaurentPoly(target.ring, {e: (-c if e % 2 else c) for e, c in target.terms.items()}, target.var)
        target = target.embed(F) if target.ring != F else target
        return red == target

    def to_json(self) -> Dict[str, object]:
        return {"field": self.field.to_json(), "r_prev": rat_to_str(self.r_prev), "t_sign": self.t_sign,
                "units": [u.to_json() for u in self.units]}


def to_T(P: LaurentPoly, r: Fraction) -> LaurentPoly:
    """Rewrite sum a_k Tt^{-k} with Tt = p^{-r} T as a polynomial in T."""
    K = P.ring
    return LaurentPoly(K, {e: c * K.p_power(-e * r) for e, c in P.terms.items()}, "T")


def from_T(P: LaurentPoly, r: Fraction) -> LaurentPoly:
    K = P.ring
    return LaurentPoly(K, {e: c * K.p_power(e * r) for e, c in P.terms.items()}, VAR)


# ---------------------------------------------------------------------------
# improve_once


@dataclass
class ImproveResult:
    G_new: GFamilyPoint
    I: LaurentPoly
    z: List[LocalElement]
    b: List[LocalElement]
    sigma: Fraction
    residual_valuation: Fraction
    iterations: int

    def valuation_guarantee(self) -> bool:
        """v(z_i), v(b_j) >= v(J - 1), decided exactly."""
        return all(x.val_lower() >= self.sigma for x in list(self.z) + list(self.b))

    def to_json(self) -> Dict[str, object]:
        return {"sigma": rat_to_str(self.sigma),
                "residual_valuation": rat_to_str(self.residual_valuation),
                "iterations": self.iterations,
                "z_valuations": [str(z.valuation()) if z.valuation_or_none() is None
                                 else rat_to_str(z.valuation_or_none()) for z in self.z],
                "b_valuations": [str(b.valuation()) if b.valuation_or_none() is None
                                 else rat_to_str(b.valuation_or_none()) for b in self.b],
                "valuation_guarantee": self.valuation_guarantee()}


def _ratio_series(G: GFamilyPoint, units_new: Sequence[LocalElement], depth: int) -> LaurentPoly:
    """G'/G = prod (1 - u_i' U)/(1 - u_i U) as a series in U = Tt^{-1}."""
    K = G.field
    num = _one(K)
    den = _one(K)
    for u, w in zip(G.units, units_new):
        num = num.mul_trunc(LaurentPoly(K, {0: K.one, -1: -w}, VAR), -depth)
        den = den.mul_trunc(LaurentPoly(K, {0: K.one, -1: -u}, VAR), -depth)
    return series_quotient(num, den, depth)


def _geometric(K: LocalField, u: LocalElement, depth: int) -> LaurentPoly:
    """1/(1 - u U) to U^depth."""
    terms = {}
    acc = K.one
    for k in range(depth + 1):
        terms[-k] = acc
        acc = (acc * u).as_exact()
    return LaurentPoly(K, terms, VAR)


def improve_once(G: GFamilyPoint, J: LaurentPoly, max_iter: int = 60) -> ImproveResult:
    """The unique (G', I) with (G'/G) I = J mod Tt^{-m'} and
    I = 1 + sum_{pj < m'} b_j Tt^{-pj}."""
    K = G.field
    p = K.p
    if J.ring != K:
        J = embed_poly(J, K)
    if J.var != VAR:
        raise BadInput(f"J must be a polynomial in {VAR}")
    if any(e > 0 for e in J.terms) or not (J.coeff(0) - K.one).is_zero():
        raise BadInput("J must lie in 1 + Tt^{-1} K[Tt^{-1}]")
    A2 = assumption2_matrix(G.solution, G.m_prev)
    if not A2.invertible:
        raise CertificateError("Assumption ass2 fails: the Jacobi matrix is singular")
    mp = G.m_prime
    top = mp - 1
    nb = top // p
    nz = G.N1
    if nz + nb != top:
        raise BadInput(f"system is not square: {nz} + {nb} unknowns for {top} equations")
    Jt = J.truncate_below(-top)
    sigma = min_valuation(Jt, skip_constant=True)
    if sigma <= 0 and sigma != EXACT:
        raise BadInput("J must be congruent to 1 modulo the maximal ideal")
    z = [K.zero] * nz
    b = [K.zero] * nb
    target = K.cap
    resid_val = EXACT
    it = 0
    for it in range(1, max_iter + 1):
        units_new = [(u + dz).as_exact() for u, dz in zip(G.units, z)]
        Q = _ratio_series(G, units_new, top)
        I = LaurentPoly(K, {0: K.one, **{-p * (j + 1): b[j] for j in range(nb)}}, VAR)
        QI = Q.mul_trunc(I, -top)
        R = QI - Jt
        resid = [R.coeff(-l) for l in range(1, top + 1)]
        resid_val = min((c.val_lower() for c in resid), default=EXACT)
        if resid_val >= target:
            break
        # Jacobian of the coefficients l = 1..top at the current point
        cols = []
        for i, w in enumerate(units_new):
            # d/dz_i of (G'/G) I = -U/(1 - w U) * (G'/G) I
            col = (_geometric(K, w, top).shift(-1)).mul_trunc(QI, -top)
            cols.append([-col.coeff(-l) for l in range(1, top + 1)])
        for j in range(nb):
            col = Q.shift(-p * (j + 1)).truncate_below(-top)
            cols.append([col.coeff(-l) for l in range(1, top + 1)])
        M = [[cols[c][r] for c in range(top)] for r in range(top)]
        try:
            delta = linalg.solve(M, [-x for x in resid])
        except ZeroDivisionError as exc:
            raise CertificateError("Jacobi matrix singular at the current point") from exc
        z = [(a + d).as_exact() for a, d in zip(z, delta[:nz])]
        b = [(a + d).as_exact() for a, d in zip(b, delta[nz:])]
    else:
        raise PrecisionError("Newton iteration for improve_once did not converge", "improve_once")
    G_new = G.perturbed(z)
    I = LaurentPoly(K, {0: K.one, **{-p * (j + 1): b[j] for j in range(nb)}}, VAR)
    return ImproveResult(G_new, I, z, b, sigma, resid_val, it)


# ---------------------------------------------------------------------------
# improve_hp


def gamma(p: int, i: int) -> Fraction:
    """gamma_i = sum_{j<i} p^{-j}."""
    return sum((Fraction(1, p ** j) for j in range(i)), Fraction(0))


def hp_step_count(p: int, s: Fraction) -> int:
    i = 1
    while gamma(p, i) <= s:
        i += 1
    return i


@dataclass
class HPResult:
    G_new: GFamilyPoint
    H: LaurentPoly
    steps: List[ImproveResult]
    s: Fraction
    residual_valuation: Fraction
    extensions: int

    @property
    def field(self) -> LocalField:
        return self.G_new.field

    def to_json(self) -> Dict[str, object]:
        return {"s": rat_to_str(self.s), "steps": len(self.steps),
                "residual_valuation": rat_to_str(self.residual_valuation),
                "field": self.field.to_json(), "extensions": self.extensions,
                "congruence_holds": self.residual_valuation >= self.s}


def _roots_poly(I: LaurentPoly, p: int, need: Fraction) -> LaurentPoly:
    """H = 1 + sum beta_j Tt^{-j} with beta_j^p = b_j (1 + O(p^need / b_j))."""
    K = I.ring
    terms = {0: K.one}
    for e, c in I.terms.items():
        if e == 0 or c.is_zero():
            continue
        vb = c.val()
        beta, rho = pth_root_approx(c, need - vb)
        if vb + rho < need:
            raise NeedsExtension("p-th root not accurate enough in this field", p)
        terms[e // p] = beta
    return LaurentPoly(K, terms, VAR)


def improve_hp(G: GFamilyPoint, J: LaurentPoly, s: Fraction, max_extensions: int = 8) -> HPResult:
    """G' and H with (G'/G) H^p = J mod (p^s, Tt^{-m'}).

    Successive approximation: step i solves improve_once against J/J_{i-1}
    and takes p-th roots of the b_j.  When a root needs it, the field is
    enlarged (e -> p e) and the running data are embedded; the b_j computed
    in the smaller field then have p-th roots to the required accuracy.
    """
    s = Fraction(s)
    p = G.p
    if not 0 < s < Fraction(p, p - 1):
        raise BadInput("need 0 < s < p/(p-1)")
    count = hp_step_count(p, s)
    K = G.field
    if J.ring != K:
        J = embed_poly(J, K)
    top = G.m_prime - 1
    Jt = J.truncate_below(-top)
    cur = G
    Hprod = _one(K)
    steps: List[ImproveResult] = []
    target = Jt
    extensions = 0
    for i in range(1, count + 1):
        res = improve_once(cur, target)
        steps.append(res)
        I = res.I
        while True:
            try:
                Hi = _roots_poly(I, p, gamma(p, i + 1))
                break
            except NeedsExtension:
                extensions += 1
                if extensions > max_extensions:
                    raise
                K = make_local_field(p, K.d, K.e * p, K.prec * p, K.sign)
                I = embed_poly(I, K)
                G, Jt, Hprod = G.embed(K), embed_poly(Jt, K), embed_poly(Hprod, K)
                res.G_new = res.G_new.embed(K)
        cur = res.G_new
        Hprod = Hprod.mul_trunc(Hi, -top)
        Ji = _ratio_series(G, cur.units, top).mul_trunc(_pow_trunc(Hprod, p, top), -top)
        target = series_quotient(Jt, Ji, top)
    final = _ratio_series(G, cur.units, top).mul_trunc(_pow_trunc(Hprod, p, top), -top) - Jt
    rv = min_valuation(final)
    if rv < s:
        raise CertificateError(f"improve_hp residual has valuation {rv} < s = {s}")
    return HPResult(cur, Hprod, steps, s, rv, extensions)


def _pow_trunc(P: LaurentPoly, k: int, depth: int) -> LaurentPoly:
    out = _one(P.ring, P.var)
    for _ in range(k):
        out = out.mul_trunc(P, -depth)
    return out


# ---------------------------------------------------------------------------
# approx_residue


@dataclass
class ApproxResult:
    G_new: GFamilyPoint
    H: LaurentPoly
    F_series: LaurentPoly
    F_lift: LaurentPoly
    r: Fraction
    s: Fraction
    residue: LaurentPoly
    vr_F: Fraction
    vr_diff: Fraction
    depth: int

    def certificate(self) -> bool:
        return self.vr_F == 0 and self.vr_diff > 0

    def to_json(self) -> Dict[str, object]:
        return {"r": rat_to_str(self.r), "s": rat_to_str(self.s), "depth": self.depth,
                "v_r(F)": rat_to_str(self.vr_F), "v_r(F - F')": rat_to_str(self.vr_diff),
                "certificate": self.certificate()}


def approx_residue(G: GFamilyPoint, r: Fraction, f: LaurentPoly, s: Fraction) -> ApproxResult:
    """(G', H, F) with (G'/G) H^p = 1 - p^s F, v_r(F) = 0 and [F]_r = f."""
    r, s = Fraction(r), Fraction(s)
    p = G.p
    rp = G.r_prev
    mp = G.m_prime
    if not 0 < r < rp:
        raise BadInput("need 0 < r < r_(n-1)")
    if f.is_zero():
        raise BadInput("f = 0: nothing to approximate")
    if any(e >= 0 for e in f.terms):
        raise BadInput("f must lie in t^{-1} k[t^{-1}]")
    deg = f.deg_inv()
    if deg >= mp:
        raise BadInput(f"deg f = {deg} must be < m' = {mp}")
    if not mp * (rp - r) <= s <= Fraction(p, p - 1):
        raise BadInput("need m'(r_(n-1) - r) <= s <= p/(p-1)")
    K = G.field
    need = lcm(K.e, (r - rp).denominator, s.denominator)
    if need != K.e:
        Kb = make_local_field(p, K.d, need, K.prec * need // K.e, K.sign)
        G = G.embed(Kb)
        K = Kb
    # F' in Tt: coefficient Teich(f_k) p^{k (r - r_prev)}
    Fl = LaurentPoly(K, {e: K.teichmuller(c) * K.p_power(-e * (r - rp)) for e, c in f.terms.items()}, VAR)
    J = _one(K) - Fl * K.p_power(s)
    lower = s - (rp - r)
    sigma = (max(lower, Fraction(0)) + Fraction(p, p - 1)) / 2
    hp = improve_hp(G, J, sigma)
    K = hp.field
    G = G.embed(K)
    Fl = embed_poly(Fl, K)
    Gn = hp.G_new
    # certified lower bound for the valuation of every tail coefficient
    zmin = min((( u1 - u0).val_lower() for u0, u1 in zip(G.units, Gn.units)), default=EXACT)
    Hp = _pow_trunc(hp.H, p, p * hp.H.deg_inv())
    tau = min(zmin, min_valuation(Hp - _one(K), skip_constant=False))
    depth = mp - 1
    if tau < s:
        depth = max(depth, int((s - tau) / (rp - r)) + 1)
    Q = _ratio_series(G, Gn.units, depth).mul_trunc(Hp, -depth)
    Fs = (_one(K) - Q) * K.p_power(-s)
    rt = r - rp
    vr_F = gauss_valuation(Fs, rt)
    red = residue(Fs, rt, "t")
    vr_diff = gauss_valuation(Fs - Fl, rt) if not (Fs - Fl).is_zero() else EXACT
    fK = f.embed(K.residue_field) if f.ring != K.residue_field else f
    if vr_F != 0 or red != fK or vr_diff <= 0:
        raise CertificateError("approx_residue certificate failed")
    return ApproxResult(Gn, hp.H, Fs, Fl, r, s, red, vr_F, vr_diff, depth)
