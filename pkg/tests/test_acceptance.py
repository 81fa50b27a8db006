"""The ten acceptance criteria, one test each.  Every test prints a single
PASS/FAIL line (also collected in the terminal summary) with its timing."""

from __future__ import annotations

import random
from fractions import Fraction
from time import perf_counter

from cyclift.fields import DiffForm, LaurentPoly, cartier, make_field, squarefree_check
from cyclift.gsolve import GProblem, eta_form_sum, solve_g, verify_g
from cyclift.lifting import (base_lift_zp, disk_condition, improve_hp, improve_once, matrix_A_gamma,
                             matrix_C, minimal_setup, n2_setup, partB_assemble, partB_solve, search_gmin)
from cyclift.lifting.family import VAR, GFamilyPoint
from cyclift.witt import (BreakSequence, WittVector, breaks, no_essential_ramification, normalize,
                          roort_equiv_form, tsetup_interval_a, witt_sub, wp)

ECONDITIONAL_CBAR = [[4, 0, 0, 0, 1], [0, 1, 1, 1, 1], [0, 0, 4, 2, 3], [0, 0, 0, 1, 1], [0, 0, 0, 0, 4]]


def test_criterion_01_exa2(accept):
    t0 = perf_counter()
    b = BreakSequence(5, (1, 5, 34))
    sol = solve_g(GProblem(5, b.m_base, b.nu, b.N))
    checks = {"N = 29": b.N == 29, "N1 = 19": sol.N1 == 19, "N2 = 10": sol.N2 == 10,
              "r_2 = 1/20": b.r_i(2) == Fraction(1, 20)}
    accept(1, "exa2: N=29, N1=19, N2=10, r_2=1/20", checks, perf_counter() - t0, 1.0)


def test_criterion_02_econditional(accept):
    t0 = perf_counter()
    b = BreakSequence(5, (1, 5, 34))
    K, _, G = minimal_setup(b, t_sign=-1)
    pb = partB_assemble(partB_solve(G, LaurentPoly(K, {-34: K.one}, "T"), b.m_prev, b.m[-1]))
    disk = disk_condition(pb)
    checks = {
        "prec >= 40/e": K.prec >= 40,
        "C residue": pb.C.residue() == ECONDITIONAL_CBAR,
        "v(b_2) = -9/20": pb.b_valuations()[2] == Fraction(-9, 20),
        "v(T'^-10 coeff) = 1/20 - 10/136":
            disk.coefficient_valuations_Tprime.get(10) == Fraction(1, 20) - Fraction(10, 136),
        "segment slope 1/200 length 10": (Fraction(1, 200), 10) in disk.polygon.segments,
        "congruence certificate": pb.certificate_margin >= pb.epsilon > 0,
    }
    accept(2, "Econditionaldisk: C, v(b_2), T'^-10 coefficient, 1/200 segment", checks, perf_counter() - t0, 30.0)


def test_criterion_03_base_case(accept):
    checks = {}
    worst = 0.0
    for p in (3, 5):
        for m1 in (1, 2, 4):
            t0 = perf_counter()
            poly = base_lift_zp(p, m1).polygon()
            dt = perf_counter() - t0
            worst = max(worst, dt)
            checks[f"p={p} m1={m1}"] = poly.segments == ((Fraction(p, m1 * (p - 1)), m1),) and dt < 1.0
    accept(3, "base case 1 + lambda^p T^-m1: one segment, each < 1 s", checks, worst, 1.0)


def test_criterion_04_thm2_sweep(accept):
    t0 = perf_counter()
    count = 0
    checks = {}
    for p in (2, 3, 5):
        for nu in (0, 1, 2):
            for m in (1, 2, 3):
                if m % p == 0:
                    continue
                mp = m * p ** nu
                ok = True
                # N = m_n - m_{n-1} >= m_{n-1}(p-1) for every break sequence
                for N in range(mp * (p - 1), 201, m):
                    prob = GProblem(p, m, nu, N)
                    sol = solve_g(prob)
                    count += 1
                    ok &= verify_g(sol, prob)[0] and squarefree_check(sol.g)
                    # simple type: t^{-N_2} times a squarefree polynomial in t^{-1} of degree N_1
                    ok &= sol.g.min_exp() == -N and sol.g.max_exp() == -sol.N2
                    ok &= mp * (p - 1) - m * p < sol.N1 <= mp * (p - 1)
                    ok &= (sol.N1 - N) % p == 0 and sol.N2 % p == 0
                checks[f"p={p} nu={nu} m={m}"] = ok
    checks["instances > 0"] = count > 0
    accept(4, f"thm2 / 1tom sweep over {count} instances", checks, perf_counter() - t0, 120.0)


def test_criterion_05_cartier(accept):
    t0 = perf_counter()
    checks = {}
    for p in (2, 3, 5):
        F = make_field(p, 1)
        for nu in (0, 1, 2):
            for m in (1, 2, 3):
                if m % p == 0:
                    continue
                prob = GProblem(p, m, nu, m * p ** nu * (p - 1))
                eta = DiffForm(-eta_form_sum(prob, F))
                omega = [DiffForm(LaurentPoly(F, {-m * p ** i - 1: F(m)})) for i in range(nu + 1)]
                ok = cartier(eta) == eta + omega[nu]
                # omega_i belongs to m_i = m p^i = p m_{i-1}
                ok &= all(cartier(omega[i]) == omega[i - 1] for i in range(1, nu + 1))
                checks[f"p={p} nu={nu} m={m}"] = ok
    accept(5, "Cartier: C(eta) = eta + omega_(n-1), C(omega_i) = omega_(i-1)", checks, perf_counter() - t0, 10.0)


def _rpoly(F, rng, deg, lo=1):
    return LaurentPoly(F, {-k: F(rng.randrange(F.p)) for k in range(lo, deg + 1)})


def test_criterion_06_witt(accept):
    t0 = perf_counter()
    checks = {}
    for p in (2, 3, 5):
        F = make_field(p, 1)
        for n in (1, 2, 3):
            rng = random.Random(100 * p + n)
            inv = sub = True
            for _ in range(100):
                while True:
                    w = WittVector([_rpoly(F, rng, 4)] + [_rpoly(F, rng, 3) for _ in range(n - 1)])
                    if not normalize(w).coords[0].is_zero():
                        break
                y = WittVector([_rpoly(F, rng, 2, lo=0) for _ in range(n)])
                inv &= breaks(w) == breaks(w + wp(y))
                a = WittVector(list(w.coords[:-1]) + [_rpoly(F, rng, 3)])
                zero = [LaurentPoly.zero(F)] * (n - 1)
                sub &= witt_sub(w, a) == WittVector(zero + [w.coords[-1] - a.coords[-1]])
            checks[f"p={p} n={n} class invariance"] = inv
            checks[f"p={p} n={n} same-prefix subtraction"] = sub
    accept(6, "Witt: breaks invariant under wp(y), same-prefix subtraction", checks, perf_counter() - t0, 60.0)


def test_criterion_07_conditions(accept):
    t0 = perf_counter()
    total = mismatch = ner_bad = 0
    for p in (2, 3, 5):
        for mp in range(1, 31):
            for mn in range(p * mp, 40 * p + 1):
                total += 1
                a = tsetup_interval_a(mp, mn, p)
                if roort_equiv_form(mp, mn, p)[2] != (a is None):
                    mismatch += 1
                b = BreakSequence.__new__(BreakSequence)
                object.__setattr__(b, "p", p)
                object.__setattr__(b, "m", (mp, mn))
                if no_essential_ramification(b) and a is not None:
                    ner_bad += 1
    checks = {f"(iii) decomposition agrees with interval test ({mismatch}/{total} disagree)": mismatch == 0,
              "(i) no essential ramification implies the interval is empty": ner_bad == 0}
    accept(7, "condition checkers on the exhaustive sweep", checks, perf_counter() - t0, 10.0)


def test_criterion_08_matrices(accept):
    t0 = perf_counter()
    rng = random.Random(8)
    checks = {}
    for p in (3, 5):
        for prefix in ((1, p), (2, 2 * p)):
            for t_sign in (1, -1):
                b = BreakSequence(p, prefix + (p * prefix[-1],))
                K, _, G = minimal_setup(b, t_sign)
                mp = b.m_prev
                ok = True
                for mn in range(p * mp, p * mp + 3 * p + 1):
                    if mn % p == 0 and mn != p * mp:
                        continue
                    ok &= matrix_C(G, mp, mn, p).det_valuation == 0
                # A_Gamma at G_min and at points of the family near it
                ok &= matrix_A_gamma(G, mp, p).det_valuation == 0
                for _ in range(3):
                    gam = LaurentPoly(K, {e: c + K.random_element(rng, Fraction(1, K.e)) for e, c in G.terms.items()},
                                      G.var)
                    ok &= matrix_A_gamma(gam, mp, p).det_valuation == 0
                checks[f"p={p} m_prev={mp} t_sign={t_sign}"] = ok
    accept(8, "lem2/lem3 matrices have unit determinant", checks, perf_counter() - t0, 60.0)


def test_criterion_09_improve(accept):
    t0 = perf_counter()
    pts = []
    for N in range(2, 41, 2):
        sol = solve_g(GProblem(3, 2, 0, N))
        if sol.N1:
            pts.append(GFamilyPoint.from_solution(sol))
    rng = random.Random(9)
    once_res = once_val = hp_res = True
    for _ in range(50):
        G = rng.choice(pts)
        K = G.field
        sigma = Fraction(rng.randint(1, 6), 4)
        J = LaurentPoly(K, {0: K.one, **{-l: K.random_element(rng, sigma) for l in range(1, G.m_prime)}}, VAR)
        r = improve_once(G, J)
        once_res &= r.residual_valuation >= K.cap
        once_val &= r.sigma >= sigma and r.valuation_guarantee()
        s = Fraction(rng.randint(1, 14), 10)
        hp_res &= improve_hp(G, J, s).residual_valuation >= s
    checks = {"improve_once residual to tracked precision": once_res,
              "v(z_i), v(b_j) >= v(J - 1)": once_val,
              "improve_hp congruence mod p^s": hp_res}
    accept(9, "improve_once / improve_hp on 50 random p=3, m_prev=2 instances", checks, perf_counter() - t0, 120.0)


def test_criterion_10_search(accept):
    t0 = perf_counter()
    setup, G = n2_setup(3, 1)
    res = search_gmin(setup, G)
    hist = res.history
    checks = {"non-increasing": all(x >= y for x, y in zip(hist, hist[1:])),
              "final lambda < 1/100": res.value < Fraction(1, 100),
              "final value certified": res.best.certified,
              "every evaluation certified": res.certificates_ok}
    lam = " -> ".join(str(x) for x in hist)
    accept(10, f"search_gmin n=2 p=3 m1=1: lambda {lam}", checks, perf_counter() - t0)
