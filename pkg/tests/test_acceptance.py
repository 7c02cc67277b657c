"""Acceptance gate.  Run with ``pytest tests/test_acceptance.py -v -s`` to see
one PASS/FAIL line per criterion.  Every comparison is exact rational equality."""
from fractions import Fraction as F
from itertools import combinations
from math import factorial

import pytest

from quantmod import counterexample as ce, data, lie, linalg, obstruction as ob
from quantmod.lie import LieAlgebra
from quantmod.poly import MultiVector, Polynomial, poisson_bracket, schouten
from quantmod.sampling import random_lie_algebra, random_multivector, random_polynomial
from quantmod.star import (
    GuttStar,
    KontsevichStar,
    WeightTable,
    bernoulli,
    duflo_apply,
    duflo_apply_series,
    rho_linear,
    rho_series,
    series_product_scalar,
    star_series,
    wheel_weight,
)

N = 100


def report(num, title, checks: dict):
    failed = [k for k, v in checks.items() if not v]
    status = "FAIL" if failed else "PASS"
    extra = f"  (failed: {', '.join(failed)})" if failed else ""
    print(f"\n{status} criterion {num}: {title}{extra}")
    assert not failed, failed


def all_zero(mv: MultiVector) -> bool:
    return all(p.is_zero() for p in mv.components.values())


def dims(g, module):
    return lie.cohomology(lie.ce_complex(g, module)).dims


def test_criterion_1_jacobi(so3_r2, so3_kk):
    report(1, "[pi,pi] = 0 exactly for so3-r2 and so3-kk", {
        name: all_zero(schouten(b.pi, b.pi)) and b.pi.degree == 2
        for name, b in (("so3-r2", so3_r2), ("so3-kk", so3_kk))
    })


def test_criterion_2_graded_pieces(so3_r2, so3_kk):
    checks = {}
    for name, b in (("so3-r2", so3_r2), ("so3-kk", so3_kk)):
        br = ce.jacobi_lemma_breakdown(b)
        checks[f"{name} linear"] = all_zero(br.linear) and br.lie_jacobi
        checks[f"{name} quadratic"] = all_zero(br.quadratic) and br.casimir_central
        checks[f"{name} cubic"] = all_zero(br.cubic) and br.cocycle and br.y_independent
        checks[f"{name} sum"] = br.linear + br.quadratic + br.cubic == schouten(b.pi, b.pi)
    report(2, "linear, quadratic and cubic parts of [pi,pi] vanish separately", checks)


def test_criterion_3_cohomology_table(so3, k_alg, kk):
    cx = lie.ce_complex(kk, lie.trivial_module(kk))
    omega = lie.trivial_cochain_vector(cx, 2, {(0, 2): 1})
    kun = lie.kunneth_check(lie.trivial_module(so3), lie.adjoint_module(kk), 2)
    report(3, "cohomology table of k, k+k and the Kunneth cross-check", {
        "H(k,R) = 1,1,0": dims(k_alg, lie.trivial_module(k_alg)) == [1, 1, 0],
        "H(k,k) = 0,0,0": dims(k_alg, lie.adjoint_module(k_alg)) == [0, 0, 0],
        "H2(k+k,R) = 1": dims(kk, lie.trivial_module(kk))[2] == 1,
        "omega cocycle": lie.is_cocycle(cx, omega, 2),
        "omega not exact": not lie.is_coboundary(cx, omega, 2).is_coboundary,
        "H2(k+k,k+k) = 0": dims(kk, lie.adjoint_module(kk))[2] == 0,
        "H2(so3+(k+k), h) = 0": kun.direct == 0 and kun.holds,
    })


def test_criterion_4_obstruction_so3_r2(so3_r2):
    A3 = ob.anomaly_a3(so3_r2)
    system = ob.build_system(so3_r2.pi, None, A3)
    checks = {"A3 = lambda * 2 dim g * C": A3.unit == {(3, 4): 2 * 3 * 1}}
    for label, lam in (("symbolic", None), ("+1/48", F(1, 48)), ("-1/48", F(-1, 48))):
        cert = ob.decide(system, lam)
        checks[f"{label} infeasible"] = cert.kind == "infeasible"
        checks[f"{label} certificate verifies"] = cert.verify(system)
        # independent back-substitution of the dual certificate
        y = cert.functional
        checks[f"{label} yM = 0"] = not any(linalg.vec_mat(y, system.linear_rows(), 2 * system.n))
        c = sum((a * b for a, b in zip(y, system.rhs())), F(0))
        checks[f"{label} y.r != 0"] = c != 0 and c == cert.constant
    report(4, "so3-r2 with pi1 = 0 is infeasible (symbolic and |lambda| = 1/48)", checks)


def test_criterion_5_all_admissible_pi1(so3_kk):
    rep = ob.specialized_verdict(so3_kk)
    checks = {s.name: s.passed for s in rep.steps}
    checks["verdict infeasible"] = rep.verdict == "infeasible"
    checks["certificate phi(C) != 0"] = bool(rep.certificate) and rep.certificate["phi(C)"] != "0/1"
    report(5, "so3-kk is infeasible for every admissible pi1", checks)


def test_criterion_6_negative_controls(so3):
    pure = ob.build_system(so3.linear_poisson())
    c1 = ob.decide(pure)
    quad = data.load("quadratic-2").pi
    qsys = ob.build_system(quad, None, ob.AnomalyTerm.zero(quad.n_vars))
    c2 = ob.decide(qsys)
    report(6, "pure so(3) and a purely quadratic structure are feasible", {
        "so3 feasible": c1.kind == "feasible" and c1.verify(pure),
        "so3 D1 = D2 = 0": c1.D1 == [0] * 3 and c1.D2 == [0] * 3,
        "quadratic feasible": c2.kind == "feasible" and c2.verify(qsys),
        "quadratic has no linear part": not quad.polynomial_degree_part(1),
    })


def test_criterion_7_star_oracles(so3, rng):
    pi = so3.linear_poisson()
    K = KontsevichStar(pi)
    G = GuttStar(so3, 2)
    one, zero = Polynomial.one(3), Polynomial.zero(3)
    ok = dict.fromkeys(["unit", "eps1 = {f,g}", "associativity", "character", "intertwining"], True)
    for _ in range(N):
        f, g, h = (random_polynomial(rng, 3, max_degree=3) for _ in range(3))
        ok["unit"] &= K(one, f) == [f, zero, zero] == K(f, one)
        fg, gf = K(f, g), K(g, f)
        ok["eps1 = {f,g}"] &= fg[1] - gf[1] == poisson_bracket(pi, f, g)
        ok["associativity"] &= star_series(K, fg, [h], 2) == star_series(K, [f], K(g, h), 2)
        ok["character"] &= rho_series(so3, fg, 2) == series_product_scalar(
            rho_linear(so3, f, 2), rho_linear(so3, g, 2), 2)
        ok["intertwining"] &= duflo_apply_series(so3, G(f, g, 2), 2) == star_series(
            K, duflo_apply(so3, f, 2), duflo_apply(so3, g, 2), 2)
    report(7, f"star-product oracles over so(3) mod eps^3 on {N} seeded instances", ok)


def test_criterion_8_wheel_weights():
    checks = {"B2 = 1/6": bernoulli(2) == F(1, 6), "B4 = -1/30": bernoulli(4) == F(-1, 30)}
    for n in range(1, 6):
        w = wheel_weight(n)
        checks[f"n={n}"] = w != 0 and abs(w) == abs(bernoulli(2 * n)) / (4 * n * factorial(2 * n))
    report(8, "wheel weights |B_2n| / (4n (2n)!) for n = 1..5", checks)


def test_criterion_9_property_suites(rng, so3_r2):
    ok = dict.fromkeys(["bracket axioms", "d^2 = 0", "rank-nullity",
                        "certificate back-substitution", "round trips"], True)
    pi = so3_r2.pi
    br = lambda u, v: poisson_bracket(pi, u, v)
    for _ in range(N):
        # Poisson bracket and Schouten bracket axioms
        f, g, h = (random_polynomial(rng, 5, 2, 3) for _ in range(3))
        ok["bracket axioms"] &= br(f, g) == -br(g, f)
        ok["bracket axioms"] &= br(f, g * h) == br(f, g) * h + g * br(f, h)
        ok["bracket axioms"] &= not (br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g)))
        P, Qm = random_multivector(rng, 3, 2, 2), random_multivector(rng, 3, 2, 2)
        ok["bracket axioms"] &= schouten(P, Qm) == schouten(Qm, P)

        # Chevalley-Eilenberg complex
        alg = random_lie_algebra(rng, max_dim=4)
        V = rng.choice([lie.trivial_module, lie.adjoint_module, lie.coadjoint_module])(alg)
        ok["d^2 = 0"] &= lie.ce_complex(alg, V).check_d_squared()

        # exact linear algebra
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = [[F(rng.randint(-3, 3), rng.randint(1, 2)) if rng.random() < 0.6 else F(0)
              for _ in range(n)] for _ in range(m)]
        ker = linalg.nullspace(A, n)
        ok["rank-nullity"] &= len(ker) + linalg.rank(A, n) == n
        ok["rank-nullity"] &= all(not any(linalg.mat_vec(A, v)) for v in ker)
        b = [F(rng.randint(-3, 3)) for _ in range(m)]
        sol = linalg.solve(A, b, n)
        if sol.feasible:
            ok["certificate back-substitution"] &= linalg.mat_vec(A, sol.solution) == b
        else:
            y = sol.certificate
            ok["certificate back-substitution"] &= not any(linalg.vec_mat(y, A, n))
            ok["certificate back-substitution"] &= sum((u * v for u, v in zip(y, b)), F(0)) != 0

        # obstruction certificates on random Lie-Poisson systems with random anomaly
        unit = {(i, j): F(rng.randint(-2, 2)) for i, j in combinations(range(alg.dim), 2)}
        sysm = ob.build_system(alg.linear_poisson(), None,
                               ob.AnomalyTerm(alg.dim, {k: v for k, v in unit.items() if v}))
        cert = ob.decide(sysm, F(rng.choice([-1, 1]), 48))
        ok["certificate back-substitution"] &= cert.verify(sysm)

        # serialization
        p = random_polynomial(rng, 4, den=5)
        mv = random_multivector(rng, 4, rng.randint(0, 3))
        ok["round trips"] &= Polynomial.from_dict(p.to_dict()) == p
        ok["round trips"] &= MultiVector.from_dict(mv.to_dict()) == mv
        ok["round trips"] &= LieAlgebra.from_dict(alg.to_dict()) == alg
    d = data.counterexample_from_raw(data.load_counterexample("so3-kk").to_dict())
    ok["round trips"] &= ce.build(d).pi == ce.build(data.load_counterexample("so3-kk")).pi
    w = WeightTable(F(1, 8), F(1, 12), F(-1, 12), F(-1, 24))
    ok["round trips"] &= WeightTable.from_dict(w.to_dict()) == w
    report(9, f"module property suites on {N} seeded instances each", ok)
