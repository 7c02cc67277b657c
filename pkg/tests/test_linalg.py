from fractions import Fraction as F

import sympy

from quantmod import linalg

N = 100


def rand_matrix(rng, m, n, bound=3, zero_bias=0.4):
    return [[F(0) if rng.random() < zero_bias else F(rng.randint(-bound, bound), rng.randint(1, 2))
             for _ in range(n)] for _ in range(m)]


def sym(A):
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in A])


def test_rank_matches_sympy(rng):
    for _ in range(N):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = rand_matrix(rng, m, n)
        assert linalg.rank(A, n) == sym(A).rank()


def test_rank_nullity(rng):
    for _ in range(N):
        m, n = rng.randint(1, 6), rng.randint(1, 7)
        A = rand_matrix(rng, m, n)
        ker = linalg.nullspace(A, n)
        assert len(ker) + linalg.rank(A, n) == n
        for v in ker:
            assert not any(linalg.mat_vec(A, v))
        if ker:
            assert linalg.rank(ker, n) == len(ker)


def test_solve_returns_checkable_answers(rng):
    feasible = infeasible = 0
    for _ in range(N):
        m, n = rng.randint(1, 6), rng.randint(1, 5)
        A = rand_matrix(rng, m, n, zero_bias=0.6)
        b = [F(rng.randint(-3, 3)) for _ in range(m)]
        sol = linalg.solve(A, b, n)
        if sol.feasible:
            feasible += 1
            assert linalg.mat_vec(A, sol.solution) == b
        else:
            infeasible += 1
            y = sol.certificate
            assert not any(linalg.vec_mat(y, A, n))
            assert sum(yi * bi for yi, bi in zip(y, b)) != 0
            # independent oracle: rank jumps when b is appended
            assert sym([r + [bi] for r, bi in zip(A, b)]).rank() > sym(A).rank()
    assert feasible and infeasible


def test_sparse_rows_are_accepted():
    rows = [{0: 1, 2: 2}, {1: F(1, 2)}]
    sol = linalg.solve(rows, [3, 1], 3)
    assert linalg.mat_vec(rows, sol.solution) == [3, 1]


def test_det_and_inverse(rng):
    for _ in range(N):
        n = rng.randint(1, 5)
        A = rand_matrix(rng, n, n, zero_bias=0.2)
        d = linalg.det(A)
        assert d == F(str(sym(A).det()))
        inv = linalg.inverse(A)
        if d:
            prod = [[sum(A[i][k] * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
            assert prod == linalg.identity(n)
        else:
            assert inv is None


def test_rref_is_reduced():
    pc, rows = linalg.rref([[2, 4, 2], [1, 2, 3]], 3)
    assert pc == [0, 2]
    assert rows[0] == {0: 1, 1: 2}
    assert rows[1] == {2: 1}


def test_in_span():
    assert linalg.in_span([[1, 0, 1], [0, 1, 1]], [2, 3, 5])
    assert not linalg.in_span([[1, 0, 1]], [0, 1, 0])
    assert linalg.in_span([], [0, 0])
