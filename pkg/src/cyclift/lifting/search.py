"""The objective lambda(G) on the family G_n and a heuristic minimizer.

lambda(G) is evaluated through the restriction to the covering disk:
restriction_series -> kink_basis -> mu_lambda with m = m~, rescaled by
p^{n-1}.  search_gmin is a coordinate descent over the pi-adic digits of
the units u_i (each kept in its residue class); it is a heuristic stand-in
for the nonconstructive minimum and carries no optimality claim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import BadInput, CertificateError
from ..fields import LaurentPoly
from ..gsolve import GProblem, solve_g
from ..padic import LocalField, embed_poly, rat_to_str
from ..witt import BreakSequence
from .family import GFamilyPoint
from .kink import (HerbrandMap, KinkResult, base_lift_zp, delta_profile, herbrand_transfer, kink_basis,
                   kink_table_round_trip, mu_lambda, restriction_series)


@dataclass
class LambdaSetup:
    """Fixed tower data for evaluating lambda on G_n."""

    breaks: BreakSequence
    Gs: List[LaurentPoly]        # G_1, ..., G_{n-1} in T
    herbrand: HerbrandMap
    s_tilde: Fraction
    N: Optional[int] = None
    _cache: Dict[Tuple[int, ...], List[LaurentPoly]] = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.breaks.p

    @property
    def r0_tilde(self) -> Fraction:
        return self.herbrand.r_tilde(self.breaks.r_i(self.breaks.n - 1))

    def tower_in(self, K: LocalField) -> List[LaurentPoly]:
        key = K.key
        if key not in self._cache:
            self._cache[key] = [g if g.ring == K else embed_poly(g, K) for g in self.Gs]
        return self._cache[key]

    def to_json(self) -> Dict[str, object]:
        return {"breaks": list(self.breaks.m), "p": self.p, "herbrand": self.herbrand.to_json(),
                "s_tilde": rat_to_str(self.s_tilde), "r0_tilde": rat_to_str(self.r0_tilde)}


def n2_setup(p: int, m1: int = 1, e: Optional[int] = None, cap: int = 6,
             s_frac: Fraction = Fraction(1, 2), t_sign: int = -1) -> Tuple[LambdaSetup, GFamilyPoint]:
    """Tower of height 1 (the base-case lift) and the Teichmuller point of G_2
    for breaks (m_1, p m_1).  e defaults to p m_1 (p-1): the search needs
    p-th roots of elements of valuation r_1."""
    b = BreakSequence(p, (m1, p * m1))
    sol = solve_g(GProblem(p, b.m_base, b.nu, b.m_prev * (p - 1)))
    e = e if e is not None else p * m1 * (p - 1)
    G = GFamilyPoint.from_solution(sol, e=e, prec=cap * e, sign=-1 if p != 2 else 1, t_sign=t_sign)
    G1 = base_lift_zp(p, m1, G.field).F
    h = herbrand_transfer(b)
    setup = LambdaSetup(b, [G1], h, Fraction(0))
    setup.s_tilde = setup.r0_tilde * s_frac
    return setup, G


@dataclass
class LambdaValue:
    value: Fraction          # p^{n-1} mu~, equal to lambda(G) when certified
    certified: bool          # mu~ < s~, so lambda = p^{n-1} mu~ exactly
    mu_tilde: Fraction
    kink: KinkResult
    certificates: Dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.certificates.values())

    def to_json(self) -> Dict[str, object]:
        return {"lambda": rat_to_str(self.value) if self.certified else ">= " + rat_to_str(self.value),
                "value": rat_to_str(self.value), "certified": self.certified,
                "mu_tilde": rat_to_str(self.mu_tilde), "certificates": self.certificates,
                "kink": self.kink.to_json()}


def lambda_of_G(setup: LambdaSetup, G: GFamilyPoint) -> LambdaValue:
    h = setup.herbrand
    if G.m_prev != setup.breaks.m_prev:
        raise BadInput("G does not belong to this tower")
    Gs = setup.tower_in(G.field)
    res = restriction_series(Gs, G.G_in_T(), h.m_tilde, setup.r0_tilde)
    kr = kink_basis(res.kd, setup.s_tilde, setup.N)
    mu, lam = mu_lambda(kr, h.m_tilde)
    d = delta_profile(kr)
    certs = {"residue": G.residue_check(), "condition_a": res.kd.condition_a(),
             "round_trip": kink_table_round_trip(kr), "delta_convex": d.is_convex()}
    if lam is not None:
        # lambda~ is the last kink of delta, after which the slope is m~
        ks = d.kinks()
        certs["last_kink"] = d.slopes[-1] == h.m_tilde and (ks[-1] == lam if lam > 0 else not ks)
    return LambdaValue(h.lam(mu), lam is not None, mu, kr, certs)


@dataclass
class SearchResult:
    point: GFamilyPoint
    best: LambdaValue
    history: List[Fraction]
    evaluations: int
    certificates_ok: bool
    fields: List[int]

    @property
    def value(self) -> Fraction:
        return self.best.value

    def to_json(self) -> Dict[str, object]:
        return {"lambda": self.best.to_json()["lambda"], "history": [rat_to_str(x) for x in self.history],
                "evaluations": self.evaluations, "certificates_ok": self.certificates_ok,
                "search_fields_e": self.fields, "point": self.point.to_json(), "heuristic": True}


def _digit_key(G: GFamilyPoint) -> Tuple:
    return tuple((u.shift, u.mant) for u in G.units)


def _candidate_levels(lv: LambdaValue, G: GFamilyPoint, m: int) -> List[int]:
    """pi-adic levels of u_i whose change moves the coefficients that
    currently dominate mu: x_i = p^{r_{n-1}} u_i moves c_k at valuation
    r_{n-1} + v(z)."""
    e = G.field.e
    vis = lv.kink.visible()
    vm = vis.get(m)
    out = set()
    for k, v in vis.items():
        if k < m and (vm is None or v <= vm):
            base = ceil((v - G.r_prev) * e)
            out.update(x for x in (base - 1, base, base + 1) if x >= 1)
    return sorted(out)


def search_gmin(setup: LambdaSetup, G0: GFamilyPoint, budget: int = 600, target: Fraction = Fraction(1, 100),
                max_extensions: int = 2) -> SearchResult:
    """Coordinate descent on the digits of the u_i.

    At each candidate level every residue digit is tried for each u_i in
    turn and the best point is kept (ties broken by lexicographic digits),
    so the recorded lambda values never increase.  When no level helps the
    search field is enlarged by e -> e p.  Stops once the value drops below
    ``target``, reaches 0, or the evaluation budget is spent.
    """
    m = setup.herbrand.m_tilde
    G = G0
    cur = lambda_of_G(setup, G)
    history = [cur.value]
    evals = 1
    certs_ok = cur.ok
    fields = [G.field.e]
    ext = 0
    tried: Dict[Tuple[int, ...], set] = {}

    def done() -> bool:
        return cur.value == 0 or cur.value < target or evals >= budget

    while not done():
        K = G.field
        seen = tried.setdefault(K.key, set())
        levels = [l for l in _candidate_levels(cur, G, m) if l not in seen]
        if not levels:
            if ext >= max_extensions:
                break
            ext += 1
            G = G.embed(K.extend(e_factor=K.p))
            fields.append(G.field.e)
            cur = lambda_of_G(setup, G)
            evals += 1
            certs_ok = certs_ok and cur.ok
            continue
        improved = False
        for lev in levels:
            seen.add(lev)
            for i in range(len(G.units)):
                best = (cur.value, _digit_key(G), G, cur)
                for a in K.residue_field.elements():
                    if a.is_zero():
                        continue
                    z = [K.zero] * len(G.units)
                    z[i] = K.pi_power(lev) * K.teichmuller(a)
                    Gp = G.perturbed(z)
                    lv = lambda_of_G(setup, Gp)
                    evals += 1
                    certs_ok = certs_ok and lv.ok
                    key = (lv.value, _digit_key(Gp))
                    if key < best[:2]:
                        best = (lv.value, key[1], Gp, lv)
                    if evals >= budget:
                        break
                if best[0] < cur.value:
                    G, cur = best[2], best[3]
                    improved = True
                    history.append(cur.value)
                if done():
                    break
            if improved or done():
                break
        if improved:
            # new dominating coefficients: their levels are fresh candidates
            tried[K.key] = set()
    return SearchResult(G, cur, history, evals, certs_ok, fields)
