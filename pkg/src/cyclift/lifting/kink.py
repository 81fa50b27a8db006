"""Order-p Kummer data on a disk: the base-case lift, the kink basis
H with c_{pk} removed, delta profiles, the kink position lambda_m, the
Herbrand transfer to the covering disk and the restricted series."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..errors import BadInput, CertificateError, NeedsExtension, PrecisionError
from ..fields import LaurentPoly
from ..padic import (LocalElement, LocalField, NewtonPolygon, PiecewiseLinear, embed_element, embed_poly, make_local_field, newton_polygon, pth_root_approx,
                     rat_to_str, upper_envelope, zeta_p)
from ..witt import BreakSequence

TVAR = "T"
TTVAR = "Tc"  # parameter of the covering disk


def _thresh(p: int) -> Fraction:
    return Fraction(p, p - 1)


@dataclass
class KummerData:
    """F = 1 + sum a_i T^{-i} representing an order-p character whose
    branch locus lies in v(T) >= r0."""

    field: LocalField
    F: LaurentPoly
    r0: Fraction

    def __post_init__(self) -> None:
        if any(e > 0 for e in self.F.terms) or not (self.F.coeff(0) - self.field.one).is_zero():
            raise BadInput("F must be 1 + terms in T^-1")

    @property
    def p(self) -> int:
        return self.field.p

    def condition_a(self) -> bool:
        """v(a_i) >= r0 i for every nonzero coefficient."""
        for e, c in self.F.terms.items():
            if e < 0 and not c.is_zero() and c.val() < self.r0 * (-e):
                return False
        return True

    def polygon(self) -> NewtonPolygon:
        return newton_polygon(self.F.with_var(TVAR))

    def embed(self, K: LocalField) -> "KummerData":
        return KummerData(K, embed_poly(self.F, K), self.r0)

    def to_json(self) -> Dict[str, object]:
        return {"field": self.field.to_json(), "r0": rat_to_str(self.r0),
                "a_valuations": {str(-e): rat_to_str(c.val()) for e, c in sorted(self.F.terms.items(), reverse=True)
                                 if e < 0 and not c.is_zero()}}


def base_field(p: int, m1: int, d: int = 1, prec: Optional[int] = None) -> LocalField:
    """Q_p(zeta_p)-type field, e = m_1 (p-1), containing lambda and p^{r_1}."""
    e = m1 * (p - 1)
    return make_local_field(p, d, e, prec if prec is not None else 12 * e, -1 if p != 2 else 1)


def base_lift_zp(p: int, m1: int, K: Optional[LocalField] = None) -> KummerData:
    """F = 1 + lambda^p T^{-m_1}, lambda = zeta_p - 1; every zero of F lies
    at valuation p/(m_1(p-1))."""
    if m1 < 1 or m1 % p == 0:
        raise BadInput("need p not dividing m_1")
    K = K or base_field(p, m1)
    lam = zeta_p(K)
    F = LaurentPoly(K, {0: K.one, -m1: lam ** p}, TVAR)
    r0 = Fraction(p, m1 * (p - 1))
    kd = KummerData(K, F, r0)
    poly = kd.polygon()
    if poly.segments != ((r0, m1),):
        raise CertificateError(f"base-case polygon {poly.segments} is not one segment of slope {r0}")
    return kd


# ---------------------------------------------------------------------------
# kink basis


@dataclass
class KinkResult:
    kd: KummerData
    s: Fraction
    N: int
    H: LaurentPoly
    c: Dict[int, LocalElement]
    extensions: int = 0
    delta: Optional[PiecewiseLinear] = None
    mu_m: Optional[Fraction] = None
    lambda_m: Optional[Fraction] = None   # None means ">= s"
    m: Optional[int] = None

    @property
    def p(self) -> int:
        return self.H.ring.p

    def is_residual(self, k: int) -> bool:
        """c_{pk}, k <= N, vanish in the exact solution."""
        return k % self.p == 0 and k <= self.p * self.N

    def visible(self) -> Dict[int, Fraction]:
        """k -> v(c_k) for the coefficients that can reach v_r < p/(p-1) on (0, s]."""
        t = _thresh(self.p)
        out = {}
        for k, c in self.c.items():
            if self.is_residual(k) or c.is_zero():
                continue
            v = c.val()
            if v < t + k * self.s:
                out[k] = v
        return out

    def b_valuations(self) -> Dict[int, Fraction]:
        return {-e: c.val() for e, c in self.H.terms.items() if e < 0 and not c.is_zero()}

    def sw_infty(self) -> List[Tuple[Fraction, Fraction, int]]:
        """(r_from, r_to, sw(r, infinity)) on the pieces of delta."""
        if self.delta is None:
            return []
        b, sl = self.delta.breakpoints, self.delta.slopes
        return [(b[i], b[i + 1], -int(sl[i])) for i in range(len(sl))]

    def to_json(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "s": rat_to_str(self.s), "N": self.N, "extensions": self.extensions,
            "field": self.H.ring.to_json(),
            "b_valuations": {str(k): rat_to_str(v) for k, v in sorted(self.b_valuations().items())},
            "c_valuations": {str(k): rat_to_str(c.val()) for k, c in sorted(self.c.items()) if not c.is_zero()},
            "visible": sorted(self.visible()),
        }
        if self.delta is not None:
            out["delta"] = self.delta.to_json()
            out["sw_infty"] = [[rat_to_str(a), rat_to_str(b), k] for a, b, k in self.sw_infty()]
        if self.m is not None:
            out["m"] = self.m
            out["mu_m"] = rat_to_str(self.mu_m)
            out["lambda_m"] = rat_to_str(self.lambda_m) if self.lambda_m is not None else ">= " + rat_to_str(self.s)
        return out


def min_N(p: int, r0: Fraction, s: Fraction) -> int:
    """Smallest N with p N >= p/((p-1)(r0 - s))."""
    return max(1, ceil(Fraction(1) / ((p - 1) * (r0 - s))))


def _table(F: LaurentPoly, H: LaurentPoly) -> Dict[int, LocalElement]:
    D = F - H ** H.ring.p
    return {-e: c for e, c in D.terms.items() if e < 0}


def kink_basis(kd: KummerData, s: Fraction, N: Optional[int] = None, max_rounds: int = 400,
               max_extensions: int = 3) -> KinkResult:
    """H = 1 + sum_{j <= N} b_j T^{-j} with c_{pk} removed for k <= N.

    The p-multiples are peeled by repeated approximate p-th roots until each
    residual c_{pk} satisfies v(c_{pk}) - pk s > p/(p-1), so it never meets
    the polygon on (0, s].  The field is enlarged by e -> e p when a root
    needs it.
    """
    p = kd.p
    s = Fraction(s)
    if not 0 < s < kd.r0:
        raise BadInput("need 0 < s < r0")
    if N is None:
        N = min_N(p, kd.r0, s)
    if p * N * (p - 1) * (kd.r0 - s) < p:
        raise BadInput("N violates p N >= p/((p-1)(r0 - s))")
    if not kd.condition_a():
        raise BadInput("F violates v(a_i) >= r0 i")
    t = _thresh(p)
    K = kd.field
    F = kd.F
    b: Dict[int, LocalElement] = {}
    ext = 0
    for _ in range(max_rounds):
        H = LaurentPoly(K, {0: K.one, **{-j: x for j, x in b.items()}}, F.var)
        c = _table(F, H)
        worst = None
        for k in range(1, N + 1):
            x = c.get(p * k)
            if x is None or x.is_zero():
                continue
            gap = x.val() - p * k * s - t
            if gap <= 0 and (worst is None or gap < worst[0]):
                worst = (gap, k, x)
        if worst is None:
            kr = KinkResult(kd if K == kd.field else kd.embed(K), s, N, H, c, ext)
            for j, v in kr.b_valuations().items():
                if v < j * kd.r0:
                    raise CertificateError(f"v(b_{j}) = {v} below {j} r0")
            return kr
        gap, k, x = worst
        try:
            # relative accuracy needed to push c_{pk} past the line
            delta, rho = pth_root_approx(x, 1 - gap)
            if rho <= 0:
                raise NeedsExtension("no progress", p)
        except NeedsExtension:
            ext += 1
            if ext > max_extensions:
                raise
            K = K.extend(e_factor=p)
            F = embed_poly(F, K)
            b = {j: embed_element(y, K) for j, y in b.items()}
            continue
        b[k] = (b.get(k, K.zero) + delta).as_exact()
    raise PrecisionError("kink basis peeling did not converge")


def kink_table_round_trip(kr: KinkResult) -> bool:
    """H^p + sum c_k T^{-k} reproduces F."""
    K = kr.H.ring
    F = kr.kd.F if kr.kd.field == K else embed_poly(kr.kd.F, K)
    rebuilt = kr.H ** kr.p + LaurentPoly(K, {-k: c for k, c in kr.c.items()}, F.var)
    return _vanishes(rebuilt - F)


def delta_profile(kr: KinkResult, lo: Fraction = Fraction(0), hi: Optional[Fraction] = None) -> PiecewiseLinear:
    """delta(r) = p/(p-1) - min_k (v(c_k) - k r) on [lo, hi], hi <= s."""
    hi = kr.s if hi is None else Fraction(hi)
    if hi > kr.s:
        raise BadInput("delta profile is only validated on (0, s]")
    t = _thresh(kr.p)
    lines = [(k, t - c.val()) for k, c in kr.c.items() if not kr.is_residual(k) and not c.is_zero()]
    if not lines:
        raise BadInput("F - H^p vanishes: the character is trivial")
    d = upper_envelope(lines, lo, hi)
    if not d.is_convex():
        raise CertificateError("delta profile is not convex")  # pragma: no cover
    kr.delta = d
    return d


def mu_from_table(vals: Dict[int, Fraction], m: int) -> Fraction:
    """max over k < m of (v(c_m) - v(c_k))/(m - k), floored at 0."""
    if m not in vals:
        raise BadInput(f"c_{m} missing")
    best = Fraction(0)
    for k, v in vals.items():
        if k < m:
            best = max(best, (vals[m] - v) / (m - k))
    return best


def mu_lambda(kr: KinkResult, m: int, s: Optional[Fraction] = None) -> Tuple[Fraction, Optional[Fraction]]:
    """(mu_m, lambda_m), lambda_m = None meaning lambda_m >= s.

    Only coefficients visible on (0, s] enter; when c_m is not visible
    the slope -m never occurs there and lambda_m >= s.
    """
    s = kr.s if s is None else Fraction(s)
    if s > kr.s:
        raise BadInput("s exceeds the validated interval")
    c = kr.c.get(m)
    if c is None or c.is_zero():
        raise PrecisionError(f"c_{m} vanishes to working precision", m)
    vis = kr.visible()
    vm = c.val()
    if m not in vis:
        mu = Fraction(0)
        for k, v in vis.items():
            if k < m:
                mu = max(mu, (vm - v) / (m - k))
        kr.m, kr.mu_m, kr.lambda_m = m, mu, None
        return mu, None
    mu = mu_from_table(vis, m)
    lam = mu if mu < s else None
    kr.m, kr.mu_m, kr.lambda_m = m, mu, lam
    return mu, lam


# ---------------------------------------------------------------------------
# Herbrand transfer


@dataclass(frozen=True)
class HerbrandMap:
    p: int
    n: int
    m_tilde: int
    m_prev: int

    @property
    def scale(self) -> int:
        return self.p ** (self.n - 1)

    def r_tilde(self, r: Fraction) -> Fraction:
        return Fraction(r) / self.scale

    def r_from_tilde(self, rt: Fraction) -> Fraction:
        return Fraction(rt) * self.scale

    def delta_tilde(self, r: Fraction, delta_r: Fraction) -> Fraction:
        """delta~(r~) = delta(r) + (m~/p^{n-1} - p m_{n-1}) r."""
        return Fraction(delta_r) + (Fraction(self.m_tilde, self.scale) - self.p * self.m_prev) * Fraction(r)

    def delta_from_tilde(self, rt: Fraction, dt: Fraction) -> Fraction:
        r = self.r_from_tilde(rt)
        return Fraction(dt) - (Fraction(self.m_tilde, self.scale) - self.p * self.m_prev) * r

    def transfer_profile(self, d: PiecewiseLinear) -> PiecewiseLinear:
        """delta (in r) -> delta~ (in r~)."""
        return d.map(self.r_tilde, self.delta_tilde)

    def untransfer_profile(self, dt: PiecewiseLinear) -> PiecewiseLinear:
        return dt.map(self.r_from_tilde, self.delta_from_tilde)

    def lam(self, lam_tilde: Fraction) -> Fraction:
        """lambda(chi) = p^{n-1} lambda(chi~)."""
        return Fraction(lam_tilde) * self.scale

    def to_json(self) -> Dict[str, object]:
        return {"p": self.p, "n": self.n, "m_tilde": self.m_tilde, "scale": self.scale}


def m_tilde(p: int, ms: Sequence[int]) -> int:
    """p^n m_{n-1} - sum_{i<n} m_i (p-1) p^{i-1} for ms = (m_1, ..., m_{n-1})."""
    n = len(ms) + 1
    return p ** n * ms[-1] - sum(m * (p - 1) * p ** i for i, m in enumerate(ms))


def herbrand_transfer(b: BreakSequence) -> HerbrandMap:
    """For breaks (m_1, ..., m_{n-1}[, m_n]) returns the transfer data of the
    order-p restriction to the (n-1)-st cover."""
    ms = b.m[:-1] if b.n >= 2 and b.m[-1] == b.p * b.m[-2] else b.m
    mt = m_tilde(b.p, ms)
    if mt % b.p == 0:
        raise BadInput(f"p divides m~ = {mt}")
    return HerbrandMap(b.p, len(ms) + 1, mt, ms[-1])


# ---------------------------------------------------------------------------
# restriction to the covering disk


@dataclass
class Restriction:
    """F = G_1^{1/p^{n-1}} ... G_{n-1}^{1/p} G on the disk above D."""

    kd: KummerData                    # in the parameter Tc of the covering disk
    F_base: Optional[LaurentPoly]     # formal series in T^-1 (u = 1 model only)
    exact_parameter: bool
    trunc: int

    def to_json(self) -> Dict[str, object]:
        return {"exact_parameter": self.exact_parameter, "trunc": self.trunc, "kummer": self.kd.to_json()}


def is_base_lift(G1: LaurentPoly, lam: LocalElement) -> bool:
    p = G1.ring.p
    return set(G1.terms) == {0, -1} and (G1.coeff(-1) - lam ** p).is_zero()


def _tinv_in_tilde(K: LocalField, lam: LocalElement) -> LaurentPoly:
    """T^{-1} = lambda^{-p}((1 + lambda Tc^{-1})^p - 1) on the cover y^p = 1 + lambda^p T^{-1}."""
    p = K.p
    terms = {-p: K.one}
    for i in range(1, p):
        terms[-i] = K(comb(p, i)) * lam ** (i - p)
    return LaurentPoly(K, terms, TTVAR)


def _compose(G: LaurentPoly, S: LaurentPoly) -> LaurentPoly:
    """G(T^{-1} := S) for G a polynomial in T^{-1}."""
    K = G.ring
    out = LaurentPoly(K, {0: G.coeff(0)}, S.var)
    power = LaurentPoly.constant(K, K.one, S.var)
    for k in range(1, G.deg_inv() + 1):
        power = power * S
        c = G.coeff(-k)
        if not c.is_zero():
            out = out + power * c
    return out


def formal_root(G: LaurentPoly, k: int, trunc: int) -> LaurentPoly:
    """G^{1/p^k} as a formal series in T^{-1} (no convergence claimed)."""
    K = G.ring
    one = LaurentPoly.constant(K, K.one, G.var)
    h = G - one
    a = Fraction(1, K.p ** k)
    acc, hp, c = one, one, Fraction(1)
    for j in range(1, trunc + 1):
        hp = hp.mul_trunc(h, -trunc)
        if hp.is_zero():
            break
        c = c * (a - (j - 1)) / j
        acc = acc + hp * K(c)
    return acc


def restriction_series(Gs: Sequence[LaurentPoly], G: LaurentPoly, trunc: int,
                       r0: Optional[Fraction] = None) -> Restriction:
    """The Kummer element of the restricted character as a series in the
    parameter Tc of the covering disk; r0 is the radius r~_{n-1}.

    For n = 2 with G_1 = 1 + lambda^p T^{-1} the parameter is exact:
    y = 1 + lambda Tc^{-1} and F = y G(T(Tc)) is a polynomial.  Otherwise
    T = Tc^{p^{n-1}} u with u taken as 1 on the formal product.
    """
    K: LocalField = G.ring
    p = K.p
    n = len(Gs) + 1
    G = G.with_var(TVAR)
    rt0 = Fraction(r0) if r0 is not None else Fraction(0)
    if n == 1:
        return Restriction(KummerData(K, G, rt0), G, True, G.deg_inv())
    Gs = [(embed_poly(g, K) if g.ring != K else g).with_var(TVAR) for g in Gs]
    lam = zeta_p(K) if (K.sign == -1 or p == 2) and K.e % (p - 1) == 0 else None
    if n == 2 and lam is not None and is_base_lift(Gs[0], lam):
        S = _tinv_in_tilde(K, lam)
        Ft = LaurentPoly(K, {0: K.one, -1: lam}, TTVAR) * _compose(G, S)
        return Restriction(KummerData(K, Ft, rt0), None, True, Ft.deg_inv())
    base = LaurentPoly.constant(K, K.one, TVAR)
    for i, Gi in enumerate(Gs):
        base = base.mul_trunc(formal_root(Gi, n - 1 - i, trunc), -trunc)
    F_base = base.mul_trunc(G, -trunc)
    scale = p ** (n - 1)
    Ft = LaurentPoly(K, {e * scale: c for e, c in F_base.terms.items()}, TTVAR)
    return Restriction(KummerData(K, Ft, rt0), F_base, False, trunc * scale)


def restriction_identity(res: Restriction, Gs: Sequence[LaurentPoly], G: LaurentPoly) -> bool:
    """F^{p^{n-1}} = G_1 G_2^p ... G^{p^{n-1}} to the working truncation
    (in the base coordinate for the u = 1 model, in Tc for the exact one)."""
    K = res.kd.field
    p = K.p
    n = len(Gs) + 1
    emb = lambda P: (embed_poly(P, K) if P.ring != K else P)
    if res.exact_parameter and n == 2:
        S = _tinv_in_tilde(K, zeta_p(K))
        lhs = res.kd.F ** p
        rhs = _compose(emb(Gs[0]).with_var(TVAR), S) * _compose(emb(G).with_var(TVAR), S) ** p
        return _vanishes(lhs - rhs)
    F = res.F_base if res.F_base is not None else res.kd.F
    t = res.trunc if res.F_base is None else res.trunc // p ** (n - 1)
    lhs = LaurentPoly.constant(K, K.one, F.var)
    for _ in range(p ** (n - 1)):
        lhs = lhs.mul_trunc(F, -t)
    rhs = LaurentPoly.constant(K, K.one, F.var)
    for i, Gi in enumerate(list(Gs) + [G]):
        Gi = emb(Gi).with_var(F.var)
        for _ in range(p ** i):
            rhs = rhs.mul_trunc(Gi, -t)
    return _vanishes((lhs - rhs).truncate_below(-t))


def _vanishes(D: LaurentPoly, margin: int = 4) -> bool:
    """Every coefficient is zero to within ``margin`` of the precision cap."""
    K = D.ring
    return all(c.is_zero() or c.val() >= K.cap - margin for c in D.terms.values())
