"""Seeded random instances for property probes."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from . import lie, linalg
from .lie import LieAlgebra
from .poly import MultiVector, Polynomial


def rng_for(seed) -> random.Random:
    return random.Random(seed)


def random_rational(rng: random.Random, bound: int = 5, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, den))


def random_polynomial(rng: random.Random, n: int, max_degree: int = 3, terms: int = 3,
                      bound: int = 3, den: int = 1) -> Polynomial:
    out = {}
    for _ in range(terms):
        e = [0] * n
        for _ in range(rng.randint(0, max_degree)):
            e[rng.randrange(n)] += 1
        e = tuple(e)
        out[e] = out.get(e, 0) + random_rational(rng, bound, den)
    return Polynomial(n, out)


def random_multivector(rng: random.Random, n: int, degree: int, max_degree: int = 2,
                       density: float = 0.5) -> MultiVector:
    comps = {}
    for I in combinations(range(n), degree):
        if rng.random() < density:
            comps[I] = random_polynomial(rng, n, max_degree, terms=2)
    return MultiVector(n, degree, comps)


def random_invertible(rng: random.Random, n: int, bound: int = 2):
    while True:
        m = [[Fraction(rng.randint(-bound, bound)) for _ in range(n)] for _ in range(n)]
        if linalg.det(m):
            return m


def change_basis(g: LieAlgebra, P) -> LieAlgebra:
    """Structure constants in the basis f_i = sum_a P[a][i] e_a."""
    n = g.dim
    Pinv = linalg.inverse(P)
    sc = {}
    for i in range(n):
        for j in range(i + 1, n):
            v = [Fraction(0)] * n
            for a in range(n):
                if not P[a][i]:
                    continue
                for b in range(n):
                    if not P[b][j]:
                        continue
                    for c, val in g.bracket_basis(a, b).items():
                        v[c] += P[a][i] * P[b][j] * val
            for k in range(n):
                coef = sum((Pinv[k][c] * v[c] for c in range(n)), Fraction(0))
                if coef:
                    sc[(i, j, k)] = coef
    return LieAlgebra(n, sc, name=f"{g.name}'" if g.name else None, validate=False)


def _heisenberg():
    return LieAlgebra(3, {(0, 1, 2): Fraction(1)}, name="heisenberg")


def _k():
    return LieAlgebra(2, {(0, 1, 1): Fraction(1)}, name="k")


def _so3():
    return LieAlgebra(3, {(0, 1, 2): Fraction(1), (0, 2, 1): Fraction(-1), (1, 2, 0): Fraction(1)},
                      name="so3")


def random_lie_algebra(rng: random.Random, max_dim: int = 5) -> LieAlgebra:
    """A random basis change of a small direct sum of so3, k, heisenberg and abelian pieces."""
    pieces = [_so3, _k, _heisenberg, lambda: lie.abelian(1)]
    g = rng.choice(pieces)()
    while g.dim < max_dim and rng.random() < 0.5:
        h = rng.choice(pieces)()
        if g.dim + h.dim > max_dim:
            break
        g = lie.direct_sum(g, h)
    return change_basis(g, random_invertible(rng, g.dim))
