from fractions import Fraction as F
from itertools import combinations

import pytest

from quantmod import lie, linalg, obstruction as ob
from quantmod.poly import MultiVector, Polynomial
from quantmod.sampling import random_lie_algebra

N = 100


def span_equal(a, b, n):
    return linalg.rank(a, n) == linalg.rank(b, n) == linalg.rank(list(a) + list(b), n)


def e(n, k):
    return [F(int(i == k)) for i in range(n)]


def test_d1con_solution_spaces(so3, so3_r2):
    d1 = ob.assemble_d1con(so3_r2.pi)
    assert span_equal(d1.d1_kernel, [e(5, 3), e(5, 4)], 5)
    assert ob.assemble_d1con(so3.linear_poisson()).d1_kernel == []
    zero = MultiVector.zero(4, 2)
    assert span_equal(ob.assemble_d1con(zero).d1_kernel, linalg.identity(4), 4)
    assert [r.pair for r in d1.rows] == list(combinations(range(5), 2))


def test_d1con_rejects_pi_nonzero_at_origin():
    pi = MultiVector(2, 2, {(0, 1): Polynomial.one(2)})
    with pytest.raises(ob.NotCoisotropic):
        ob.assemble_d1con(pi)


def test_anomaly(so3_r2, so3_kk):
    A = ob.anomaly_a3(so3_r2)
    assert A.unit == {(3, 4): 6}
    assert A[4, 3] == -6 and A[0, 1] == 0
    assert A.concrete_lambda == F(1, 48)
    assert A.components() == {(3, 4): F(1, 8)}
    assert ob.anomaly_a3(so3_r2, -1).components() == {(3, 4): F(-1, 8)}
    assert ob.anomaly_a3(so3_kk).unit == {(3, 5): 6}
    with pytest.raises(ValueError):
        ob.anomaly_a3(so3_r2, 0)


def test_con3_rows_for_so3_r2(so3_r2):
    pi = so3_r2.pi
    A = ob.anomaly_a3(so3_r2)
    sysm = ob.assemble_con3(pi, None, A, ob.assemble_d1con(pi))
    assert not sysm.surviving_quadratic
    con3 = sysm.by_tag("con3")
    assert len(con3) == 10 and len(sysm.by_tag("d1con")) == 10
    for r in con3:
        i, j = r.pair
        if j < 3:
            # D2^k d_k pi^{ij}(0) = 0
            assert all(c >= 5 for c in r.linear) and r.rhs == 0
        if (i, j) == (3, 4):
            # h abelian: no unknown survives, 0 = -2 A3
            assert not r.linear and r.rhs == -12
            assert r.quadratic == {(0, 0): -F(1, 2), (1, 1): -F(1, 2), (2, 2): -F(1, 2)}
    assert any("anomaly" in r.to_dict()["provenance"] for r in con3)


def test_so3_r2_is_infeasible(so3_r2):
    sysm = ob.build_system(so3_r2.pi, None, ob.anomaly_a3(so3_r2))
    for lam in (None, F(1, 48), F(-1, 48)):
        cert = ob.decide(sysm, lam)
        assert cert.kind == "infeasible"
        assert cert.verify(sysm)
        assert cert.constant != 0
    # tampering is caught
    cert = ob.decide(sysm)
    cert.functional = [v + 1 for v in cert.functional]
    assert not cert.verify(sysm)


def test_negative_controls(so3):
    cert = ob.decide(ob.build_system(so3.linear_poisson()))
    assert cert.kind == "feasible"
    assert cert.D1 == [0, 0, 0] and cert.D2 == [0, 0, 0]
    x0, x1 = Polynomial.var(2, 0), Polynomial.var(2, 1)
    quad = MultiVector(2, 2, {(0, 1): x0 * x1})
    sysm = ob.build_system(quad)
    assert sysm.surviving_quadratic  # D1^0 D1^1 survives on the free D1 space
    cert = ob.decide(sysm, F(1, 48))
    assert cert.kind == "feasible" and cert.verify(sysm)


def test_undecided_when_quadratic_survives_and_slice_fails():
    # pi = x0 x1 d0^d1 with a constant anomaly: D1 = 0 cannot absorb it
    x0, x1 = Polynomial.var(2, 0), Polynomial.var(2, 1)
    pi = MultiVector(2, 2, {(0, 1): x0 * x1})
    A = ob.AnomalyTerm(2, {(0, 1): F(1)})
    cert = ob.decide(ob.build_system(pi, None, A))
    assert cert.kind == "undecided" and cert.surviving_quadratic


def test_trivial_character_survives_without_anomaly(rng):
    for _ in range(N):
        g = random_lie_algebra(rng, max_dim=5)
        sysm = ob.build_system(g.linear_poisson())
        assert sysm.satisfied_by([0] * g.dim, [0] * g.dim, 1)
        cert = ob.decide(sysm)
        assert cert.kind == "feasible" and cert.verify(sysm)


def test_certificates_check_out_on_random_systems(rng):
    kinds = set()
    for _ in range(N):
        g = random_lie_algebra(rng, max_dim=5)
        n = g.dim
        unit = {(i, j): F(rng.randint(-2, 2)) for i, j in combinations(range(n), 2) if rng.random() < 0.3}
        A = ob.AnomalyTerm(n, {k: v for k, v in unit.items() if v})
        sysm = ob.build_system(g.linear_poisson(), None, A)
        cert = ob.decide(sysm)
        kinds.add(cert.kind)
        assert cert.verify(sysm)
        if cert.feasible:
            for lam in (F(1), F(-5, 3)):
                assert sysm.satisfied_by(*cert.witness(lam), lam)
        else:
            y = cert.functional
            assert not any(linalg.vec_mat(y, sysm.linear_rows(), 2 * n))
            assert sum(a * b for a, b in zip(y, sysm.rhs())) == cert.constant != 0
    assert kinds == {"feasible", "infeasible"}


def test_verdict_invariant_under_permutation_and_rescaling(rng, so3_r2, so3_kk):
    space = ob.pi1_cocycle_space(so3_kk)
    for t in range(N):
        b = so3_r2 if t % 2 else so3_kk
        pi1 = None
        if b is so3_kk:
            vec = [sum((F(rng.randint(-2, 2)) * v[k] for v in space.basis[:6]), F(0))
                   for k in range(len(space.basis[0]))]
            pi1 = space.bivector(vec)
        sysm = ob.build_system(b.pi, pi1, ob.anomaly_a3(b))
        base = ob.decide(sysm).kind
        perm = list(range(len(sysm.rows)))
        rng.shuffle(perm)
        p = sysm.permuted(perm)
        cert = ob.decide(p)
        assert cert.kind == base and cert.verify(p)
        s = F(rng.choice([-3, -2, -1, 1, 2, 5]), rng.randint(1, 4))
        scaled = ob.build_system(b.pi.scale(s), None if pi1 is None else pi1.scale(s), ob.anomaly_a3(b))
        assert ob.decide(scaled, s * F(1, 48)).kind == ob.decide(sysm, F(1, 48)).kind


def test_pi1_cocycle_space(so3_kk, so3_r2):
    for b in (so3_r2, so3_kk):
        space = ob.pi1_cocycle_space(b)
        cx = space.complex
        N2 = cx.dim(2)
        assert space.matches_lie
        assert span_equal(space.basis, lie.cocycles(cx, 2), N2)
        lin = ob.bivector_to_cochain(cx, b.linear_part())
        assert linalg.in_span(space.basis, lin)
        for v in lie.coboundaries(cx, 2):
            assert linalg.in_span(space.basis, v)
        assert len(space.g_part) + len(space.h_part) == space.dim


def test_specialized_verdict(so3_kk, so3_r2):
    rep = ob.specialized_verdict(so3_kk)
    assert rep.verdict == "infeasible" and rep.ok
    assert rep.steps[0].detail["dims_H(h,h)"][2] == 0
    assert rep.certificate["phi(C)"] != "0/1"
    # for abelian h, H^2(h,h) != 0 and the argument does not apply
    rep2 = ob.specialized_verdict(so3_r2)
    assert not rep2.steps[0].passed and rep2.verdict == "undecided"


def test_ansatz_reduction_probes(so3_r2):
    rep = ob.order12_ansatz_report(pi=so3_r2.pi)
    assert rep.ok
    by = {(p.equation, p.operator, p.probe): p for p in rep.probes}
    assert not by[("o1", "D1.d + const", "f=g=1")].passed
    assert not by[("o1", "D1.d + d0^2", "f=x0,g=x0")].passed
    assert not by[("o2sym", "D1D1.dd + D2.d", "f=x0,g=x0")].passed
    assert all(p.passed for p in rep.probes if p.operator in ("D1.d", "1/2 D1D1.dd + D2.d"))
    assert rep.derived["phi1_is_first_order"]
    assert rep.derived["phi2_second_order_part_is_half_D1D1"]
    assert rep.derived["d1precon_on_linear_is_d1con"]


def test_system_serializes_rationals_as_strings(so3_r2):
    d = ob.build_system(so3_r2.pi, None, ob.anomaly_a3(so3_r2)).to_dict()
    assert all("/" in r["rhs_per_lambda"] for r in d["rows"])
    assert {r["tag"] for r in d["rows"]} == {"d1con", "con3"}
