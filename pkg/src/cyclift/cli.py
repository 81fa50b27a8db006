"""Command-line front end.

Every command builds a JSON report (schema_version, command, inputs,
results, certificates).  The exit code is 0 when every certificate holds,
2 on a failed certificate, 3 when precision is insufficient and 4 on bad
input.  Human-readable tables are printed unless --json is given.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .errors import BadInput, CertificateError, CycliftError
from .fields import LaurentPoly, make_field, poly_to_json
from .gsolve import GProblem, assumption2_matrix, solve_g, verify_g
from .lifting.kink import (KummerData, base_lift_zp, delta_profile, herbrand_transfer, kink_basis,
                           kink_table_round_trip, mu_lambda)
from .lifting.partb import disk_condition, matrix_A_gamma, matrix_C, minimal_setup, partB_assemble, partB_solve
from .lifting.search import lambda_of_G, n2_setup, search_gmin
from .padic import LocalField, local_from_json, make_local_field, parse_rational, rat_to_str, zeta_p
from .witt import BreakSequence, WittVector, breaks, check_conditions, normalize

SCHEMA_VERSION = 1

Report = Dict[str, Any]


# ---------------------------------------------------------------------------
# parsing helpers


def parse_breaks(s: str, p: int) -> BreakSequence:
    try:
        ms = tuple(int(x) for x in s.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise BadInput(f"malformed break list {s!r}") from exc
    return BreakSequence(p, ms)


def parse_field(s: str) -> Tuple[int, int, int, int]:
    """"p,d,e[,sign]" with sign + or -."""
    parts = [x.strip() for x in s.split(",")]
    if len(parts) not in (3, 4):
        raise BadInput("--field expects p,d,e[,sign]")
    try:
        p, d, e = (int(x) for x in parts[:3])
    except ValueError as exc:
        raise BadInput(f"malformed --field {s!r}") from exc
    sign = -1 if len(parts) == 4 and parts[3] == "-" else 1
    return p, d, e, sign


def _witt_coord(obj: Any, F: Any) -> LaurentPoly:
    """A coordinate: [var, exp, coeff], a list of such triples, or a list
    of [exp, coeff] pairs."""
    if isinstance(obj, list) and len(obj) == 3 and isinstance(obj[0], str):
        obj = [obj]
    terms: Dict[int, Any] = {}
    var = "t"
    for term in obj:
        if len(term) == 3:
            var, e, c = term
        elif len(term) == 2:
            e, c = term
        else:
            raise BadInput(f"malformed Witt term {term!r}")
        terms[int(e)] = terms.get(int(e), F.zero) + F(c if not isinstance(c, list) else list(c))
    return LaurentPoly(F, terms, var)


def parse_witt(text: str, p: int, d: int = 1) -> WittVector:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, list) or not obj:
        raise BadInput("--witt expects a non-empty JSON list of coordinates")
    F = make_field(p, d)
    return WittVector([_witt_coord(c, F) for c in obj])


_TERM = re.compile(r"^\s*([+-]?)\s*(?:([0-9/]+)\s*\*?\s*)?(?:T\^?\(?(-?\d+)\)?|T)?\s*$")


def parse_T_poly(text: str, K: LocalField) -> LaurentPoly:
    """Rational-coefficient polynomial in T^{-1}, e.g. "T^-34 + 2*T^-3"."""
    terms: Dict[int, Any] = {}
    for raw in re.split(r"(?<![\^(])(?=[+-])", text.replace(" ", "")):
        if not raw:
            continue
        m = _TERM.match(raw)
        if not m or (m.group(2) is None and m.group(3) is None and "T" not in raw):
            raise BadInput(f"cannot parse term {raw!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        e = int(m.group(3)) if m.group(3) is not None else (1 if "T" in raw else 0)
        if e > 0:
            raise BadInput("F must be a polynomial in T^-1")
        terms[e] = terms.get(e, K.zero) + K(sign * c)
    return LaurentPoly(K, terms, "T")


def _coeff(obj: Any, K: LocalField) -> Any:
    if isinstance(obj, (int, str)):
        return K(parse_rational(obj))
    if isinstance(obj, dict):
        if "digits" in obj:
            x = local_from_json({**obj, "field": obj.get("field", K.to_json())})
            return x if x.field == K else K(x)
        unit = K(parse_rational(obj.get("unit", 1)))
        if "lambda" in obj:
            return unit * zeta_p(K) ** int(obj["lambda"])
        if "p_power" in obj:
            return unit * K.p_power(parse_rational(obj["p_power"]))
        return unit
    raise BadInput(f"malformed coefficient {obj!r}")


def load_kummer(path: str, prec_cap: Optional[int] = None) -> KummerData:
    """{"field": {...}, "r0": "a/b", "terms": [[k, coeff], ...]} for
    F = 1 + sum coeff T^{-k}; coeff is an integer, "a/b",
    {"lambda": k, "unit": q}, {"p_power": "q", "unit": u} or element JSON."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadInput(f"cannot read {path}: {exc}") from exc
    try:
        fj = dict(obj["field"])
        if prec_cap is not None:
            fj["prec"] = prec_cap * int(fj.get("e", 1))
        K = LocalField.from_json(fj)
        terms = {0: K.one}
        for k, c in obj["terms"]:
            k = int(k)
            if k <= 0:
                raise BadInput("terms are indexed by k >= 1 for T^{-k}")
            terms[-k] = terms.get(-k, K.zero) + _coeff(c, K)
        r0 = parse_rational(obj["r0"])
    except (KeyError, TypeError) as exc:
        raise BadInput(f"malformed Kummer JSON: {exc}") from exc
    return KummerData(K, LaurentPoly(K, terms, "T"), r0)


# ---------------------------------------------------------------------------
# reports


def _report(command: str, inputs: Dict[str, Any], results: Dict[str, Any], certs: Dict[str, bool],
            table: Optional[List[Tuple[str, Any]]] = None) -> Report:
    rep = {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
           "results": results, "certificates": certs}
    if table is not None:
        rep["_table"] = table
    return rep


def _ff_list(cs: Sequence[Any]) -> List[int]:
    return [c.to_int() for c in cs]


def cmd_breaks(a: argparse.Namespace) -> Report:
    w = parse_witt(a.witt, a.p, a.d)
    b = breaks(w)
    return _report("breaks", {"p": a.p, "witt": json.loads(a.witt)}, {"breaks": list(b.m)},
                   {"valid_breaks": b.check()[0]}, [("breaks", ",".join(map(str, b.m)))])


def cmd_normalize(a: argparse.Namespace) -> Report:
    w = parse_witt(a.witt, a.p, a.d)
    nw = normalize(w)
    b = breaks(nw)
    coords = [poly_to_json(c) for c in nw.coords]
    return _report("normalize", {"p": a.p, "witt": json.loads(a.witt)},
                   {"normalized": coords, "breaks": list(b.m)}, {"valid_breaks": b.check()[0]},
                   [(f"coordinate {i + 1}", repr(c)) for i, c in enumerate(nw.coords)] + [("breaks", list(b.m))])


def cmd_check_conditions(a: argparse.Namespace) -> Report:
    b = parse_breaks(a.breaks, a.p)
    res = check_conditions(b)
    certs = {"roort_i_implication": (not res["ner"]) or res["tmain"]}
    table = [("main condition", res["tmain"]), ("witness (i, a)", res["witness"]),
             ("no essential ramification", res["ner"])]
    return _report("check-conditions", {"p": a.p, "breaks": list(b.m)}, res, certs, table)


def _gsolve_results(p: int, m: int, nu: int, N: int) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    prob = GProblem(p, m, nu, N)
    sol = solve_g(prob)
    ok, why = verify_g(sol, prob)
    mp = prob.m_prev
    res = {"N1": sol.N1, "N2": sol.N2, "g": poly_to_json(sol.g), "m_prev": mp,
           "r_prev": rat_to_str(Fraction(1, mp * (p - 1)))}
    certs = {"differential_identity": ok,
             "N1_bounds": mp * (p - 1) - m * p < sol.N1 <= mp * (p - 1),
             "N1_congruent_N": (sol.N1 - N) % p == 0, "N2_divisible": sol.N2 % p == 0}
    if why:
        res["failure"] = why
    return res, certs


def cmd_solve_g(a: argparse.Namespace) -> Report:
    res, certs = _gsolve_results(a.p, a.m, a.nu, a.N)
    return _report("solve-g", {"p": a.p, "m": a.m, "nu": a.nu, "N": a.N}, res, certs,
                   [("N1", res["N1"]), ("N2", res["N2"]), ("r_(n-1)", res["r_prev"])])


def cmd_matrices(a: argparse.Namespace) -> Report:
    b = parse_breaks(a.breaks, a.p)
    K, sol, G = minimal_setup(b, a.t_sign)
    mp, mn = b.m_prev, b.m[-1]
    C = matrix_C(G, mp, mn, b.p)
    A = matrix_A_gamma(G, mp, b.p)
    res: Dict[str, Any] = {"C": C.to_json(), "A_gamma": A.to_json(), "t_sign": a.t_sign}
    certs = {"C_invertible": C.invertible, "A_gamma_invertible": A.invertible}
    try:
        a2 = assumption2_matrix(sol, mp)
        res["assumption2"] = {"square": a2.square, "invertible": a2.invertible}
    except CycliftError as exc:
        res["assumption2"] = {"error": str(exc)}
    table = [("C residue", C.residue()), ("det C valuation", rat_to_str(C.det_valuation)),
             ("A_Gamma residue", A.residue())]
    return _report("matrices", {"p": b.p, "breaks": list(b.m)}, res, certs, table)


def _kink_common(a: argparse.Namespace) -> Tuple[KummerData, Any]:
    kd = load_kummer(a.input, a.prec)
    s = parse_rational(a.s)
    kr = kink_basis(kd, s, a.N)
    return kd, kr


def cmd_delta_profile(a: argparse.Namespace) -> Report:
    kd, kr = _kink_common(a)
    d = delta_profile(kr)
    res = {"delta": d.to_json(), "csv": d.to_csv(), "kinks": [rat_to_str(x) for x in d.kinks()]}
    certs = {"convex": d.is_convex(), "round_trip": kink_table_round_trip(kr)}
    return _report("delta-profile", {"input": a.input, "s": a.s}, res, certs,
                   [("breakpoints", [rat_to_str(x) for x in d.breakpoints]),
                    ("values", [rat_to_str(x) for x in d.values]), ("slopes", [rat_to_str(x) for x in d.slopes])])


def cmd_kink(a: argparse.Namespace) -> Report:
    kd, kr = _kink_common(a)
    delta_profile(kr)
    mu, lam = mu_lambda(kr, a.m)
    res = kr.to_json()
    certs = {"round_trip": kink_table_round_trip(kr), "condition_a": kd.condition_a(),
             "delta_convex": kr.delta.is_convex()}
    return _report("kink", {"input": a.input, "s": a.s, "m": a.m}, res, certs,
                   [("mu_m", rat_to_str(mu)), ("lambda_m", res["lambda_m"])])


def _base_zp(p: int, m1: int, field: Optional[str], prec: Optional[int]) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    K = None
    if field:
        fp, d, e, sign = parse_field(field)
        if fp != p:
            raise BadInput("--field prime differs from --p")
        K = make_local_field(p, d, e, (prec or 12) * e, sign)
    elif prec:
        e = m1 * (p - 1)
        K = make_local_field(p, 1, e, prec * e, -1 if p != 2 else 1)
    kd = base_lift_zp(p, m1, K)
    poly = kd.polygon()
    slope = Fraction(p, m1 * (p - 1))
    res = {"polygon": poly.to_json(), "r0": rat_to_str(kd.r0), "r1": rat_to_str(Fraction(1, m1 * (p - 1))),
           "field": kd.field.to_json()}
    certs = {"single_segment": poly.segments == ((slope, m1),), "slope_exceeds_r1": slope > Fraction(1, m1 * (p - 1))}
    return res, certs


def cmd_lift_base(a: argparse.Namespace) -> Report:
    res, certs = _base_zp(a.p, a.m1, a.field, a.prec)
    segs = res["polygon"]["segments"]
    return _report("lift-base", {"p": a.p, "m1": a.m1}, res, certs,
                   [("segments", [(s["slope"], s["length"]) for s in segs])])


def _partb(p: int, ms: str, Ftext: str, t_sign: int, prec: Optional[int]) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    b = parse_breaks(ms, p)
    K, sol, G = minimal_setup(b, t_sign, prec or 4)
    F = parse_T_poly(Ftext, K)
    pb = partB_assemble(partB_solve(G, F, b.m_prev, b.m[-1]))
    dr = disk_condition(pb)
    res = {"partb": pb.to_json(), "disk": dr.to_json(),
           "G_n_T_prime_valuations": {str(k): rat_to_str(v) for k, v in sorted(dr.coefficient_valuations_Tprime.items())}}
    certs = {"C_invertible": pb.C.invertible, "congruence": pb.certificate_margin >= pb.epsilon > 0,
             "disk_condition_consistent": dr.ok,
             "zero_count": sum(l for _, l in dr.polygon.segments) == pb.G_n.deg_inv()}
    return res, certs


def cmd_partb(a: argparse.Namespace) -> Report:
    res, certs = _partb(a.p, a.breaks, a.F, a.t_sign, a.prec)
    pbj = res["partb"]
    return _report("partb", {"p": a.p, "breaks": a.breaks, "F": a.F, "t_sign": a.t_sign}, res, certs,
                   [("C residue", pbj["C"]["residue"]), ("v(b_j)", pbj["b_valuations"]),
                    ("epsilon", pbj["epsilon"]), ("disk predicate", res["disk"]["predicate_holds"]),
                    ("G_n segments", [(s["slope"], s["length"]) for s in res["disk"]["polygon"]["segments"]])])


def cmd_search_gmin(a: argparse.Namespace) -> Report:
    setup, G = n2_setup(a.p, a.m1, cap=a.prec or 6)
    r = search_gmin(setup, G, budget=a.budget, target=parse_rational(a.target))
    res = r.to_json()
    res["setup"] = setup.to_json()
    hist = r.history
    certs = {"non_increasing": all(x >= y for x, y in zip(hist, hist[1:])),
             "evaluation_certificates": r.certificates_ok}
    return _report("search-gmin", {"p": a.p, "m1": a.m1, "budget": a.budget, "target": a.target}, res, certs,
                   [("lambda", res["lambda"]), ("history", res["history"]), ("evaluations", r.evaluations)])


# ---------------------------------------------------------------------------
# reproductions


def repro_exa2(prec: Optional[int]) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    b = BreakSequence(5, (1, 5, 34))
    res, certs = _gsolve_results(b.p, b.m_base, b.nu, b.N)
    delta_at_rprev = b.p * b.m_prev * b.r_i(b.n - 1)
    res.update({"N": b.N, "r_2": rat_to_str(b.r_i(2)), "delta_3(r_2)": rat_to_str(delta_at_rprev)})
    certs.update({"N": b.N == 29, "N1": res["N1"] == 19, "N2": res["N2"] == 10,
                  "r_2": b.r_i(2) == Fraction(1, 20), "delta_3": delta_at_rprev == Fraction(5, 4)})
    return res, certs


ECONDITIONAL_CBAR = [[4, 0, 0, 0, 1], [0, 1, 1, 1, 1], [0, 0, 4, 2, 3], [0, 0, 0, 1, 1], [0, 0, 0, 0, 4]]


def repro_econditional(prec: Optional[int]) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    res, certs = _partb(5, "1,5,34", "T^-34", -1, prec)
    pbj, disk = res["partb"], res["disk"]
    segs = [(parse_rational(s["slope"]), s["length"]) for s in disk["polygon"]["segments"]]
    c10 = res["G_n_T_prime_valuations"].get("10")
    certs.update({
        "C_bar": pbj["C"]["residue"] == ECONDITIONAL_CBAR,
        "v(b_2)": pbj["b_valuations"]["2"] == rat_to_str(Fraction(-9, 20)),
        "T'^-10 coefficient": c10 == rat_to_str(Fraction(1, 20) - Fraction(10, 136)),
        "segment 1/200 x 10": (Fraction(1, 200), 10) in segs,
        "predicate fails with a = 2": (not disk["predicate_holds"]) and disk["witness_a"] == 2,
    })
    return res, certs


def repro_base_zp(prec: Optional[int]) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    out: Dict[str, Any] = {}
    certs: Dict[str, bool] = {}
    for p in (3, 5):
        for m1 in (1, 2, 4):
            if m1 % p == 0:
                continue
            r, c = _base_zp(p, m1, None, prec)
            out[f"p={p},m1={m1}"] = r["polygon"]["segments"]
            for k, v in c.items():
                certs[f"p={p},m1={m1}:{k}"] = v
    return out, certs


def thm2_sweep(ps: Sequence[int] = (2, 3, 5), nus: Sequence[int] = (0, 1, 2), ms: Sequence[int] = (1, 2, 3),
               Nmax: int = 200) -> Tuple[Dict[str, Any], Dict[str, bool]]:
    count = 0
    fails: List[Dict[str, Any]] = []
    for p in ps:
        for nu in nus:
            for m in ms:
                if m % p == 0:
                    continue
                # break data force N = m_n - m_{n-1} >= m_{n-1}(p-1)
                lo = m * p ** nu * (p - 1)
                for N in range(lo, Nmax + 1, m):
                    try:
                        r, c = _gsolve_results(p, m, nu, N)
                    except CycliftError as exc:
                        fails.append({"p": p, "m": m, "nu": nu, "N": N, "error": str(exc)})
                        continue
                    count += 1
                    if not all(c.values()):
                        fails.append({"p": p, "m": m, "nu": nu, "N": N,
                                      "failed": [k for k, v in c.items() if not v]})
    return {"instances": count, "failures": fails}, {"all_instances_verified": not fails}


def cmd_repro(a: argparse.Namespace) -> Report:
    fn: Dict[str, Callable[[Optional[int]], Tuple[Dict[str, Any], Dict[str, bool]]]] = {
        "exa2": repro_exa2, "econditional": repro_econditional, "base-zp": repro_base_zp,
        "thm2-sweep": lambda prec: thm2_sweep(),
    }
    res, certs = fn[a.name](a.prec)
    return _report("repro", {"name": a.name}, res, certs, [])


# ---------------------------------------------------------------------------
# driver


class _Parser(argparse.ArgumentParser):
    """Usage errors are bad input (exit 4), not certificate failures."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(BadInput.exit_code, f"{self.prog}: error: {message}\n")


def _global_flags(ap: argparse.ArgumentParser, suppress: bool) -> None:
    # subcommands repeat the global flags so they may follow the command name
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    ap.add_argument("--prec", type=int, default=dflt(None), help="precision cap as a p-adic valuation")
    ap.add_argument("--field", default=dflt(None), help="local field p,d,e[,sign] where a command accepts one")
    ap.add_argument("--json", action="store_true", default=dflt(False),
                    help="print the JSON report instead of a table")
    ap.add_argument("--out", default=dflt(None), help="write the JSON report (or CSV for .csv paths) here")
    ap.add_argument("--timing", action="store_true", default=dflt(False), help="add wall-clock timing to the report")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cyclift", description=__doc__.splitlines()[0])
    _global_flags(ap, False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, True)
    subs = ap.add_subparsers(dest="command", required=True)

    class _Sub:
        @staticmethod
        def add_parser(name: str, **kw: Any) -> argparse.ArgumentParser:
            return subs.add_parser(name, parents=[common], **kw)

    sub = _Sub()

    def witt_args(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--d", type=int, default=1)
        sp.add_argument("--witt", required=True, help='JSON list of coordinates, e.g. [["t",-1,1],["t",-34,1]]')

    sp = sub.add_parser("breaks", help="upper ramification breaks of a Witt vector")
    witt_args(sp)
    sp.set_defaults(fn=cmd_breaks)
    sp = sub.add_parser("normalize", help="reduced (normalized) form of a Witt vector")
    witt_args(sp)
    sp.set_defaults(fn=cmd_normalize)
    sp = sub.add_parser("check-conditions", help="main condition, essential ramification, equivalent form")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--breaks", required=True)
    sp.set_defaults(fn=cmd_check_conditions)
    sp = sub.add_parser("solve-g", help="solve the characteristic-p equation for g")
    for name in ("p", "m", "nu", "N"):
        sp.add_argument(f"--{name}", type=int, required=True)
    sp.set_defaults(fn=cmd_solve_g)
    sp = sub.add_parser("matrices", help="matrices C and A_Gamma for breaks (..., m_(n-1), m_n')")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--breaks", required=True)
    sp.add_argument("--t-sign", type=int, default=-1, choices=(1, -1))
    sp.set_defaults(fn=cmd_matrices)
    for name, fn, hlp in (("delta-profile", cmd_delta_profile, "delta profile of a Kummer element"),
                          ("kink", cmd_kink, "kink basis, mu_m and lambda_m")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--input", required=True, help="Kummer data JSON")
        sp.add_argument("--s", required=True)
        sp.add_argument("--N", type=int, default=None)
        if name == "kink":
            sp.add_argument("--m", type=int, required=True)
        sp.set_defaults(fn=fn)
    sp = sub.add_parser("lift-base", help="order-p base-case lift 1 + lambda^p T^-m1")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--m1", type=int, required=True)
    sp.set_defaults(fn=cmd_lift_base)
    sp = sub.add_parser("partb", help="lift with a larger last break (block system, disk condition)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--breaks", required=True, help="m_1,...,m_(n-1),m_n'")
    sp.add_argument("--F", required=True, help='polynomial in T^-1, e.g. "T^-34"')
    sp.add_argument("--t-sign", type=int, default=-1, choices=(1, -1))
    sp.set_defaults(fn=cmd_partb)
    sp = sub.add_parser("search-gmin", help="heuristic minimization of lambda on G_2 (n = 2)")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--m1", type=int, default=1)
    sp.add_argument("--budget", type=int, default=600)
    sp.add_argument("--target", default="1/100")
    sp.set_defaults(fn=cmd_search_gmin)
    sp = sub.add_parser("repro", help="reproduce a worked example")
    sp.add_argument("name", choices=("exa2", "econditional", "thm2-sweep", "base-zp"))
    sp.set_defaults(fn=cmd_repro)
    return ap


def _print_table(rep: Report, out: Any) -> None:
    print(f"{rep['command']}", file=out)
    for k, v in rep.get("_table", []):
        print(f"  {k:<28} {v}", file=out)
    for k, v in rep["certificates"].items():
        print(f"  [{'pass' if v else 'FAIL'}] {k}", file=out)


def run(argv: Optional[Sequence[str]] = None, out: Any = None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    a = ap.parse_args(argv)
    t0 = time.perf_counter()
    try:
        rep = a.fn(a)
    except CycliftError as exc:
        err = {"schema_version": SCHEMA_VERSION, "command": a.command, "error": type(exc).__name__,
               "message": str(exc)}
        if exc.exit_code == 3:
            err["hint"] = "retry with a larger --prec"
        print(json.dumps(err, indent=2) if a.json else f"error: {exc}", file=out if a.json else sys.stderr)
        return exc.exit_code
    if a.timing:
        rep["timing_seconds"] = round(time.perf_counter() - t0, 3)
    table = rep.pop("_table", None)
    if a.out:
        with open(a.out, "w") as fh:
            if a.out.endswith(".csv") and "csv" in rep["results"]:
                fh.write(rep["results"]["csv"])
            else:
                json.dump(rep, fh, indent=2, sort_keys=True)
                fh.write("\n")
    if a.json:
        print(json.dumps(rep, indent=2, sort_keys=True), file=out)
    else:
        rep["_table"] = table or []
        _print_table(rep, out)
    return 0 if all(rep["certificates"].values()) else 2


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
