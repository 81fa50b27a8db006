"""Lifts beyond the minimal break: the block linear system for (I, G_n'),
its invertible matrices, the assembled (H, G_n) and the disk condition.

Notation: G_min = sum_{i <= m_{n-1}(p-1)} c_i Tt^{-i} with Tt = p^{-r_{n-1}} T,
m' is the target break and alpha = m' - p [m'/p].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .. import linalg
from ..errors import BadInput, CertificateError, NeedsExtension
from ..fields import FFElem, LaurentPoly
from ..gsolve import GProblem, GSolution, solve_g
from ..padic import (EXACT, LocalElement, LocalField, NewtonPolygon, embed_poly, gauss_valuation,
                     embed_element, make_local_field, newton_polygon, pth_root_approx, rat_to_str)
from ..witt import BreakSequence, tsetup_interval_a
from .family import VAR, from_T, min_valuation, to_T


def _val(x: Any) -> Optional[Fraction]:
    if isinstance(x, FFElem):
        return None if x.is_zero() else Fraction(0)
    return x.valuation_or_none()


def _rs(v: Optional[Fraction]) -> str:
    return "inf" if v is None else rat_to_str(v)


# ---------------------------------------------------------------------------
# coefficients of G_min


def normalized_coefficients(sol: GSolution, t_sign: int = 1) -> List[FFElem]:
    """c_0, ..., c_N of g normalized to c_0 = 1; t_sign = -1 applies t -> -t."""
    if sol.N2 != 0:
        raise BadInput("G_min needs a solution with N_2 = 0")
    if t_sign not in (1, -1):
        raise BadInput("t_sign must be +1 or -1")
    table = sol.coefficient_table()
    F = sol.g.ring
    c0 = table.get(0, F.zero)
    inv = c0.inverse()
    N = sol.problem.N
    out = []
    for i in range(N + 1):
        c = table.get(i, F.zero) * inv
        out.append(-c if (t_sign == -1 and i % 2) else c)
    return out


def gmin_lift(coeffs: Sequence[FFElem], K: LocalField) -> LaurentPoly:
    """The polynomial sum [c_i] Tt^{-i} with canonical digit lifts of c_i."""
    return LaurentPoly(K, {-i: K.naive_lift(c) for i, c in enumerate(coeffs)}, VAR)


def minimal_setup(b: BreakSequence, t_sign: int = 1, prec_factor: int = 4) -> Tuple[LocalField, GSolution, LaurentPoly]:
    """(K, g, G_min) for the minimal lift with breaks (m_1, ..., m_{n-1}, p m_{n-1}).

    K = Q_p(p^{1/e}) with e = m_{n-1}(p-1), the smallest field in which
    Tt = p^{-r_{n-1}} T is defined.
    """
    p = b.p
    mp = b.m_prev
    prob = GProblem(p, b.m_base, b.nu, mp * (p - 1))
    sol = solve_g(prob)
    e = mp * (p - 1)
    K = make_local_field(p, 1, e, prec_factor * e, 1)
    return K, sol, gmin_lift(normalized_coefficients(sol, t_sign), K)


# ---------------------------------------------------------------------------
# matrices


@dataclass
class BlockMatrix:
    matrix: List[List[Any]]
    alpha: int
    determinant: Any
    det_valuation: Optional[Fraction]

    @property
    def invertible(self) -> bool:
        """Invertible over the valuation ring: det is a unit."""
        return self.det_valuation == 0

    def residue(self) -> List[List[int]]:
        """Entries reduced to the residue field (as canonical integers)."""
        out = []
        for row in self.matrix:
            out.append([(x if isinstance(x, FFElem) else x.residue()).to_int() for x in row])
        return out

    def to_json(self) -> Dict[str, object]:
        return {"alpha": self.alpha, "residue": self.residue(),
                "det_valuation": _rs(self.det_valuation), "invertible": self.invertible}


def _coeff_getter(gcoeffs: Any) -> Tuple[Any, Any]:
    if isinstance(gcoeffs, LaurentPoly):
        ring = gcoeffs.ring
        return (lambda i: gcoeffs.coeff(-i) if i >= 0 else ring.zero), ring.one
    seq = list(gcoeffs)
    zero = seq[0] - seq[0]
    one = seq[0].field.one
    return (lambda i: seq[i] if 0 <= i < len(seq) else zero), one


def matrix_C(gcoeffs: Any, m_prev: int, m_next: int, p: int) -> BlockMatrix:
    """C_ij = c_{m_{n-1}(p-1) - p j + i + alpha}, i, j = 1..m_{n-1}."""
    if m_next < p * m_prev:
        raise BadInput("need m_n' >= p m_{n-1}")
    alpha = m_next - p * (m_next // p)
    get, one = _coeff_getter(gcoeffs)
    C = [[get(m_prev * (p - 1) - p * j + i + alpha) for j in range(1, m_prev + 1)]
         for i in range(1, m_prev + 1)]
    d = linalg.det(C, one)
    return BlockMatrix(C, alpha, d, _val(d))


def matrix_A_gamma(gamma: Any, m_prev: int, p: int) -> BlockMatrix:
    """A_Gamma_ij = c_{m_{n-1}(p-1) - p j + i}; must lie in GL(R)."""
    if hasattr(gamma, "G") and callable(gamma.G):
        gamma = gamma.G()
    return matrix_C(gamma, m_prev, p * m_prev, p)


# ---------------------------------------------------------------------------
# the block system


@dataclass
class PartBResult:
    p: int
    m_prev: int
    m_next: int
    r_prev: Fraction
    G_min: LaurentPoly
    F: LaurentPoly            # the datum, in T
    F_tilde: LaurentPoly      # the datum, in Tt
    I: LaurentPoly
    b: Dict[int, LocalElement]
    G_prime: LaurentPoly
    C: BlockMatrix
    E: List[List[Any]]
    b_bound: Fraction
    residual_valuation: Fraction
    H: Optional[LaurentPoly] = None
    G_n: Optional[LaurentPoly] = None
    epsilon: Optional[Fraction] = None
    certificate_margin: Optional[Fraction] = None
    root_accuracy: Dict[int, Fraction] = field(default_factory=dict)

    @property
    def alpha(self) -> int:
        return self.C.alpha

    @property
    def field(self) -> LocalField:
        return self.I.ring

    @property
    def j_range(self) -> range:
        top = self.m_next // self.p
        return range(top - self.m_prev + 1, top + 1)

    def b_valuations(self) -> Dict[int, Optional[Fraction]]:
        return {j: self.b[j].valuation_or_none() for j in self.j_range}

    def to_json(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "p": self.p, "m_prev": self.m_prev, "m_next": self.m_next, "alpha": self.alpha,
            "C": self.C.to_json(),
            "b_valuations": {str(j): _rs(v) for j, v in self.b_valuations().items()},
            "b_bound": rat_to_str(self.b_bound),
            "residual_valuation": _rs(None if self.residual_valuation >= EXACT else self.residual_valuation),
        }
        if self.G_n is not None:
            out["epsilon"] = rat_to_str(self.epsilon)
            out["certificate_margin"] = rat_to_str(self.certificate_margin)
            out["root_accuracy"] = {str(j): rat_to_str(v) for j, v in self.root_accuracy.items()}
            out["field"] = self.G_n.ring.to_json()
        return out


def partB_solve(G_min: LaurentPoly, F: LaurentPoly, m_prev: int, m_next: int) -> PartBResult:
    """Solve G_min (I - 1) - G_n' = -p^{p/(p-1)} F - G_min mod Tt^{-m'-1}
    with b_0 = 1 and b_i = 0 for i <= m'/p - m_{n-1}."""
    K: LocalField = G_min.ring
    p = K.p
    if m_next < p * m_prev or (m_next % p == 0 and m_next != p * m_prev):
        raise BadInput("need m_n' >= p m_{n-1}, prime to p unless equal")
    if G_min.deg_inv() != m_prev * (p - 1):
        raise BadInput("G_min must have degree m_{n-1}(p-1) in Tt^{-1}")
    if F.ring != K:
        F = embed_poly(F, K)
    if any(e > 0 for e in F.terms) or F.deg_inv() > m_next:
        raise BadInput("F must be a polynomial in T^{-1} of degree <= m_n'")
    r_prev = Fraction(1, m_prev * (p - 1))
    Ft = from_T(F, r_prev)
    c = lambda i: G_min.coeff(-i) if i >= 0 else K.zero
    rhs_poly = -(Ft * K.p_power(Fraction(p, p - 1))) - G_min
    rhs = lambda i: rhs_poly.coeff(-i)
    top = m_next // p
    js = list(range(top - m_prev + 1, top + 1))
    ng = m_next - m_prev + 1
    C = matrix_C(G_min, m_prev, m_next, p)
    if not C.invertible:
        raise CertificateError("matrix C is not invertible over R")
    bottom = [rhs(i) for i in range(ng, m_next + 1)]
    Cmat = [[c(i - p * j) for j in js] for i in range(ng, m_next + 1)]
    sol = linalg.solve(Cmat, bottom)
    b = {j: x.as_exact() for j, x in zip(js, sol)}
    Gp = {}
    for k in range(ng):
        acc = -rhs(k)
        for j in js:
            acc = acc + c(k - p * j) * b[j]
        Gp[-k] = acc.as_exact()
    G_prime = LaurentPoly(K, Gp, VAR)
    I = LaurentPoly(K, {0: K.one, **{-p * j: b[j] for j in js}}, VAR)
    # block matrix E: columns G'_0..G'_{ng-1}, then b_j; rows degrees 0..m'
    E = []
    for i in range(m_next + 1):
        row = [(-K.one if i == k else K.zero) for k in range(ng)] + [c(i - p * j) for j in js]
        E.append(row)
    resid = (G_min * I - G_prime + Ft * K.p_power(Fraction(p, p - 1))).truncate_below(-m_next)
    rv = min_valuation(resid)
    bound = Fraction(p, p - 1) - Fraction(m_next, m_prev * (p - 1))
    for j in js:
        if b[j].val_lower() < bound:
            raise CertificateError(f"v(b_{j}) below the guaranteed bound {bound}")
    if rv < K.cap:
        raise CertificateError(f"block system residual {rv} below precision")
    return PartBResult(p, m_prev, m_next, r_prev, G_min, F, Ft, I, b, G_prime, C, E, bound, rv)


def _extend(K: LocalField) -> LocalField:
    return K.extend(e_factor=K.p)


def partB_assemble(pb: PartBResult, max_extensions: int = 3) -> PartBResult:
    """H = sum b_i^{1/p} Tt^{-i}, G_n = G_n' + sum e_i Tt^{-i}, with the
    congruence G_min H^p - G_n = -p^{p/(p-1)} F mod p^{p/(p-1) + eps}
    verified in T-coordinates."""
    p, mp, mn, rp = pb.p, pb.m_prev, pb.m_next, pb.r_prev
    K = pb.field
    thresh = Fraction(p, p - 1)
    vmin = min((v for v in pb.b_valuations().values() if v is not None), default=thresh)
    lo_deg = mn - mp + 1
    # root error must keep the coefficients of degree >= lo_deg above p/(p-1)
    rho_need = thresh - vmin - lo_deg * rp
    extensions = 0
    while True:
        try:
            betas, accs = {}, {}
            for j in pb.j_range:
                bj = pb.b[j] if pb.b[j].field == K else embed_element(pb.b[j], K)
                if bj.is_zero():
                    continue
                beta, rho = pth_root_approx(bj, max(rho_need, Fraction(0)) + 1)
                if rho <= rho_need:
                    raise NeedsExtension("p-th root not accurate enough", p)
                betas[j], accs[j] = beta, rho
            break
        except NeedsExtension:
            extensions += 1
            if extensions > max_extensions:
                raise
            K = _extend(K)
    G_min, Gp, I, Ft = (embed_poly(x, K) for x in (pb.G_min, pb.G_prime, pb.I, pb.F_tilde))
    one = LaurentPoly.constant(K, K.one, VAR)
    H = LaurentPoly(K, {0: K.one, **{-j: b for j, b in betas.items()}}, VAR)
    Hp = H ** p
    GD = G_min * (Hp - I)
    corr = LaurentPoly(K, {-i: GD.coeff(-i) for i in range(1, mn - mp + 1)}, VAR)
    G_n = Gp + corr
    pF = Ft * K.p_power(thresh)
    R = to_T(G_min * Hp - G_n + pF, rp)
    margin = min_valuation(R) - thresh
    # case bounds: exact for degree <= m'-m_{n-1}; e_i-terms; tail beyond m'
    case2 = 1 + Fraction(1 - mp, mp * (p - 1))
    case3 = Fraction(1, mp * (p - 1))
    root_term = min((vmin + rho + lo_deg * rp - thresh for rho in accs.values()), default=case2)
    eps = min(case2, case3, root_term)
    if eps <= 0 or margin < eps:
        raise CertificateError(f"Part-B congruence fails: margin {margin}, eps {eps}")
    for P, name in ((H, "H"), (G_n, "G_n")):
        PT = to_T(P, rp)
        if not (PT.coeff(0) - K.one).is_zero() or min_valuation(PT - one.with_var("T"), True) <= 0:
            raise CertificateError(f"{name} is not in 1 + T^-1 m[T^-1]")
    pb.H, pb.G_n, pb.epsilon, pb.certificate_margin, pb.root_accuracy = H, G_n, eps, margin, accs
    return pb


# ---------------------------------------------------------------------------
# disk condition


@dataclass
class DiskReport:
    predicate_holds: bool
    witness_a: Optional[int]
    r_next: Fraction
    gamma_valuations: Dict[int, Fraction]
    v_H: Fraction
    v_G: Fraction
    polygon: NewtonPolygon
    outside: int
    coefficient_valuations_Tprime: Dict[int, Fraction]

    @property
    def ok(self) -> bool:
        """When the predicate holds every zero must lie in D(r_n')."""
        if self.predicate_holds:
            return self.v_H > 0 and self.v_G > 0 and self.outside == 0
        return True

    def to_json(self) -> Dict[str, object]:
        return {"predicate_holds": self.predicate_holds, "witness_a": self.witness_a,
                "r_next": rat_to_str(self.r_next),
                "gamma_valuations": {str(i): rat_to_str(v) for i, v in self.gamma_valuations.items()},
                "v_H": rat_to_str(self.v_H), "v_G": rat_to_str(self.v_G),
                "polygon": self.polygon.to_json(), "zeroes_outside": self.outside, "ok": self.ok}


def disk_condition(pb: PartBResult) -> DiskReport:
    if pb.G_n is None or pb.H is None:
        raise BadInput("run partB_assemble first")
    p, mp, mn, rp = pb.p, pb.m_prev, pb.m_next, pb.r_prev
    a = tsetup_interval_a(mp, mn, p)
    rn = Fraction(1, mn * (p - 1))
    shift = rp - rn  # Tt^{-i} = p^{i (r_{n-1} - r_n')} T'^{-i}
    gam = {}
    for e, c in pb.H.terms.items():
        if e < 0 and not c.is_zero():
            gam[-e] = c.val() + (-e) * shift
    one = LaurentPoly.constant(pb.H.ring, pb.H.ring.one, VAR)
    vH = gauss_valuation(pb.H - one, rn - rp) if not (pb.H - one).is_zero() else EXACT
    vG = gauss_valuation(pb.G_n - one, rn - rp)
    coeffs = {}
    for e, c in pb.G_n.terms.items():
        v = c.valuation_or_none()
        if v is not None and e < 0:
            coeffs[-e] = v + (-e) * shift
    poly = newton_polygon(to_T(pb.G_n, rp))
    if sum(l for _, l in poly.segments) != pb.G_n.deg_inv():
        raise CertificateError("Newton polygon does not account for every zero of G_n")
    outside = sum(l for s, l in poly.segments if s <= rn)
    return DiskReport(a is None, a, rn, gam, vH, vG, poly, outside, coeffs)
