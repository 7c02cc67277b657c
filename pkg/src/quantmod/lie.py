"""Finite-dimensional Lie algebras over Q and Chevalley-Eilenberg cohomology.

Basis conventions (fixed everywhere):

* Lie algebra basis ``e_0 .. e_{d-1}``; ``[e_i, e_j] = sum_k c^k_{ij} e_k``.
* p-cochains ``Lambda^p g* (x) V`` are indexed by pairs ``(I, v)`` with ``I`` a
  strictly increasing p-tuple (lexicographic order) and ``v`` a basis index of
  ``V``; the cochain ``(I, v)`` sends ``e_I`` to ``v_v`` and every other
  increasing tuple to 0.
* The differential on 1-cochains is

      (d l)(x, y) = l([x, y]) - x.l(y) + y.l(x),

  i.e. the negative of the textbook alternating sum.  We apply the same
  global sign in every degree, so

      d c (x_0..x_p) = - sum_i (-1)^i x_i . c(.. ^x_i ..)
                       - sum_{i<j} (-1)^{i+j} c([x_i, x_j], .. ^x_i .. ^x_j ..).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from . import linalg
from .poly import MultiVector, Polynomial, as_rational, poisson_bracket, rational_to_str


class JacobiViolation(ValueError):
    def __init__(self, triple, residual):
        super().__init__(f"Jacobi identity fails on basis triple {triple}: {residual}")
        self.triple = triple
        self.residual = residual


class ModuleError(ValueError):
    pass


class LieAlgebra:
    """Lie algebra given by structure constants, validated on construction."""

    def __init__(self, dim: int, structure_constants=None, name: str | None = None, validate: bool = True):
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        self.dim = dim
        self.name = name
        table: dict = {}
        for (i, j, k), c in (structure_constants or {}).items():
            c = as_rational(c)
            if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                raise ValueError(f"structure constant index ({i},{j},{k}) out of range")
            if i == j:
                if c:
                    raise ValueError("[e_i, e_i] must vanish")
                continue
            if i > j:
                i, j, c = j, i, -c
            table[(i, j, k)] = table.get((i, j, k), 0) + c
        self.structure_constants = {k: v for k, v in table.items() if v}
        # full antisymmetric table c[i][j] -> {k: c}
        self._br = [[{} for _ in range(dim)] for _ in range(dim)]
        for (i, j, k), c in self.structure_constants.items():
            self._br[i][j][k] = c
            self._br[j][i][k] = -c
        if validate:
            self._check_jacobi()

    def __repr__(self):
        return f"LieAlgebra({self.name or self.dim})"

    def bracket_basis(self, i: int, j: int) -> dict:
        """[e_i, e_j] as {k: coefficient}."""
        return self._br[i][j]

    def c(self, i, j, k) -> Fraction:
        return self._br[i][j].get(k, Fraction(0))

    def bracket(self, u, v) -> list:
        out = [Fraction(0)] * self.dim
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                for k, c in self._br[i][j].items():
                    out[k] += ui * vj * c
        return out

    def _check_jacobi(self):
        d = self.dim
        for i, j, k in combinations(range(d), 3):
            res = [Fraction(0)] * d
            for a, b, cc in ((i, j, k), (j, k, i), (k, i, j)):
                inner = self._br[b][cc]
                for m, x in inner.items():
                    for n, y in self._br[a][m].items():
                        res[n] += x * y
            if any(res):
                raise JacobiViolation((i, j, k), res)

    def ad(self, i: int):
        """Matrix of ad(e_i): column l holds [e_i, e_l]."""
        m = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for l in range(self.dim):
            for k, c in self._br[i][l].items():
                m[k][l] = c
        return m

    @cached_property
    def ad_matrices(self):
        return [self.ad(i) for i in range(self.dim)]

    def is_abelian(self):
        return not self.structure_constants

    def linear_poisson(self, n_vars: int | None = None, offset: int = 0) -> MultiVector:
        """The Kirillov-Kostant structure pi^{ij} = c^{ij}_k x^k on g*."""
        n = self.dim if n_vars is None else n_vars
        comps = {}
        for (i, j, k), c in self.structure_constants.items():
            key = (i + offset, j + offset)
            comps[key] = comps.get(key, Polynomial.zero(n)) + Polynomial.var(n, k + offset, c)
        return MultiVector(n, 2, comps)

    def to_dict(self):
        return {
            "dim": self.dim,
            "brackets": [
                [i, j, k, rational_to_str(c)]
                for (i, j, k), c in sorted(self.structure_constants.items())
            ],
        }

    @classmethod
    def from_dict(cls, data, name=None):
        sc = {}
        for i, j, k, c in data.get("brackets", []):
            key = (int(i), int(j), int(k))
            c = as_rational(c)
            if int(i) > int(j):
                key, c = (int(j), int(i), int(k)), -c
            sc[key] = sc.get(key, 0) + c
        return cls(int(data["dim"]), sc, name=name or data.get("name"))

    def __eq__(self, other):
        return (
            isinstance(other, LieAlgebra)
            and self.dim == other.dim
            and self.structure_constants == other.structure_constants
        )

    def __hash__(self):
        return hash((self.dim, frozenset(self.structure_constants.items())))


def validate_lie_algebra(structure_constants, dim: int | None = None) -> LieAlgebra:
    """Return the algebra if the Jacobi identity holds, else raise JacobiViolation."""
    if dim is None:
        dim = 1 + max((max(k) for k in structure_constants), default=-1)
    return LieAlgebra(dim, structure_constants)


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(n, {}, name=f"abelian-{n}")


def direct_sum(g: LieAlgebra, h: LieAlgebra) -> LieAlgebra:
    sc = dict(g.structure_constants)
    o = g.dim
    for (i, j, k), c in h.structure_constants.items():
        sc[(i + o, j + o, k + o)] = c
    name = f"{g.name}+{h.name}" if g.name and h.name else None
    return LieAlgebra(g.dim + h.dim, sc, name=name, validate=False)


# -- Killing form, semisimplicity, Casimir ----------------------------------

def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = [[Fraction(0)] * p for _ in range(n)]
    for i in range(n):
        ai = a[i]
        for k in range(m):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(p):
                    if bk[j]:
                        out[i][j] += x * bk[j]
    return out


def _trace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


@dataclass
class KillingForm:
    matrix: list
    inverse: list | None

    @property
    def nondegenerate(self):
        return self.inverse is not None


def killing_form(g: LieAlgebra) -> KillingForm:
    """K(e_i, e_j) = tr(ad e_i ad e_j), with the exact inverse when it exists."""
    ads = g.ad_matrices
    K = [[_trace(_matmul(ads[i], ads[j])) for j in range(g.dim)] for i in range(g.dim)]
    inv = linalg.inverse(K) if g.dim else []
    return KillingForm(K, inv)


def is_semisimple(g: LieAlgebra) -> bool:
    """Cartan's criterion: the Killing form is nondegenerate."""
    if g.dim == 0:
        return True
    return linalg.det(killing_form(g).matrix) != 0


class UnsupportedAlgebra(ValueError):
    pass


def casimir(g: LieAlgebra, n_vars: int | None = None, offset: int = 0) -> Polynomial:
    """Psi(x) = K_{ij} x^i x^j with K_{ij} the inverse Killing form.

    Raises UnsupportedAlgebra for a degenerate Killing form.  Centrality
    ``{x^i, Psi} = 0`` for the linear Poisson structure is checked here.
    """
    kf = killing_form(g)
    if not kf.nondegenerate:
        raise UnsupportedAlgebra(f"{g!r} has a degenerate Killing form; no quadratic Casimir")
    n = g.dim if n_vars is None else n_vars
    psi = Polynomial.zero(n)
    for i in range(g.dim):
        for j in range(g.dim):
            c = kf.inverse[i][j]
            if c:
                psi = psi + Polynomial.var(n, i + offset) * Polynomial.var(n, j + offset, c)
    pi = g.linear_poisson(n, offset)
    for i in range(g.dim):
        if poisson_bracket(pi, Polynomial.var(n, i + offset), psi):
            raise AssertionError("Casimir is not Poisson central; structure constants are inconsistent")
    return psi


# -- modules -----------------------------------------------------------------

class LieModule:
    """Finite-dimensional representation rho: g -> gl(V)."""

    def __init__(self, algebra: LieAlgebra, action, name: str | None = None, validate: bool = True):
        self.algebra = algebra
        self.action = [[[Fraction(v) for v in row] for row in m] for m in action]
        if len(self.action) != algebra.dim:
            raise ModuleError("need one action matrix per basis element")
        self.dim = len(self.action[0]) if self.action else 0
        self.name = name
        if validate:
            self._check()

    def __repr__(self):
        return f"LieModule({self.name or self.dim}, over {self.algebra!r})"

    def _check(self):
        g, rho = self.algebra, self.action
        for m in rho:
            if len(m) != self.dim or any(len(r) != self.dim for r in m):
                raise ModuleError("action matrices must be square of size dim V")
        for i, j in combinations(range(g.dim), 2):
            lhs = [[Fraction(0)] * self.dim for _ in range(self.dim)]
            for k, c in g.bracket_basis(i, j).items():
                for a in range(self.dim):
                    for b in range(self.dim):
                        lhs[a][b] += c * rho[k][a][b]
            ab, ba = _matmul(rho[i], rho[j]), _matmul(rho[j], rho[i])
            rhs = [[ab[a][b] - ba[a][b] for b in range(self.dim)] for a in range(self.dim)]
            if lhs != rhs:
                raise ModuleError(f"action is not a homomorphism on the pair ({i}, {j})")

    def invariants(self):
        """Basis of {v : rho(x) v = 0 for all x}."""
        rows = [r for m in self.action for r in m]
        return linalg.nullspace(rows, self.dim) if rows else linalg.identity(self.dim)


def trivial_module(g: LieAlgebra, dim: int = 1) -> LieModule:
    zero = [[Fraction(0)] * dim for _ in range(dim)]
    return LieModule(g, [zero] * g.dim, name="trivial", validate=False)


def adjoint_module(g: LieAlgebra) -> LieModule:
    return LieModule(g, g.ad_matrices, name="adjoint", validate=False)


def dual_module(V: LieModule) -> LieModule:
    """V* with (x.alpha)(v) = -alpha(x.v); the basis is dual to V's."""
    act = [[[-m[b][a] for b in range(V.dim)] for a in range(V.dim)] for m in V.action]
    return LieModule(V.algebra, act, name=f"{V.name}*" if V.name else None, validate=False)


def coadjoint_module(g: LieAlgebra) -> LieModule:
    M = dual_module(adjoint_module(g))
    M.name = "coadjoint"
    return M


def outer_module(Vg: LieModule, Vh: LieModule) -> LieModule:
    """Vg (x) Vh as a module over g (+) h, each factor acting on its own slot.

    Basis index of e_a (x) f_b is ``a * dim Vh + b``.
    """
    g, h = Vg.algebra, Vh.algebra
    s = direct_sum(g, h)
    dg, dh = Vg.dim, Vh.dim
    n = dg * dh
    act = []
    for m in Vg.action:
        A = [[Fraction(0)] * n for _ in range(n)]
        for a in range(dg):
            for a2 in range(dg):
                if m[a][a2]:
                    for b in range(dh):
                        A[a * dh + b][a2 * dh + b] = m[a][a2]
        act.append(A)
    for m in Vh.action:
        A = [[Fraction(0)] * n for _ in range(n)]
        for a in range(dg):
            for b in range(dh):
                for b2 in range(dh):
                    if m[b][b2]:
                        A[a * dh + b][a * dh + b2] = m[b][b2]
        act.append(A)
    name = f"{Vg.name}(x){Vh.name}" if Vg.name and Vh.name else None
    return LieModule(s, act, name=name, validate=False)


def module_from_dict(g: LieAlgebra, data) -> LieModule:
    mats = [[[as_rational(v) for v in row] for row in m] for m in data]
    return LieModule(g, mats)


# -- Chevalley-Eilenberg complex ---------------------------------------------

def _sort_sign(seq):
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv & 1 else 1


class CochainComplex:
    """C^p = Lambda^p g* (x) V with the differentials d_p : C^p -> C^{p+1}."""

    def __init__(self, algebra: LieAlgebra, module: LieModule):
        if module.algebra.dim != algebra.dim:
            raise ModuleError("module is over a different algebra")
        self.algebra = algebra
        self.module = module
        d = algebra.dim
        self.wedges = [list(combinations(range(d), p)) for p in range(d + 1)]
        self.index = [{I: k for k, I in enumerate(ws)} for ws in self.wedges]
        self.differentials = [self._build(p) for p in range(d)]

    def dim(self, p: int) -> int:
        if p < 0 or p > self.algebra.dim:
            return 0
        return len(self.wedges[p]) * self.module.dim

    def basis(self, p: int):
        V = self.module.dim
        return [(I, v) for I in self.wedges[p] for v in range(V)]

    def position(self, I, v) -> int:
        return self.index[len(I)][tuple(I)] * self.module.dim + v

    def d(self, p: int):
        """Sparse rows of d_p (rows index C^{p+1}); empty outside range."""
        if 0 <= p < len(self.differentials):
            return self.differentials[p]
        return [{} for _ in range(self.dim(p + 1))]

    def _build(self, p):
        g, V = self.algebra, self.module
        nV = V.dim
        rho = V.action
        rows = []
        for J in self.wedges[p + 1]:
            # contributions to (dc)(e_J) from each basis cochain (I, v)
            entries: dict = {}  # (I, v_in, w_out) -> coef
            for i, ji in enumerate(J):
                I = J[:i] + J[i + 1:]
                sgn = -1 if i & 1 else 1
                m = rho[ji]
                for w in range(nV):
                    for v in range(nV):
                        if m[w][v]:
                            key = (I, v, w)
                            entries[key] = entries.get(key, 0) - sgn * m[w][v]
            for a, b in combinations(range(len(J)), 2):
                rest = tuple(J[t] for t in range(len(J)) if t != a and t != b)
                sgn = -1 if (a + b) & 1 else 1
                for k, c in g.bracket_basis(J[a], J[b]).items():
                    if k in rest:
                        continue
                    seq = (k,) + rest
                    s2 = _sort_sign(seq)
                    I = tuple(sorted(seq))
                    for v in range(nV):
                        key = (I, v, v)
                        entries[key] = entries.get(key, 0) - sgn * s2 * c
            per_w = [dict() for _ in range(nV)]
            for (I, v, w), c in entries.items():
                if c:
                    per_w[w][self.position(I, v)] = Fraction(c)
            rows.extend(per_w)
        return rows

    def apply_d(self, p: int, c) -> list:
        return linalg.mat_vec(self.d(p), c) if self.dim(p + 1) else []

    def cochain(self, p: int, values) -> list:
        """Vector for a p-cochain from {(I, v): value}; unordered I are sorted with sign."""
        vec = [Fraction(0)] * self.dim(p)
        for (I, v), val in values.items():
            I = tuple(I)
            if len(set(I)) != len(I):
                continue
            s = _sort_sign(I)
            vec[self.position(tuple(sorted(I)), v)] += s * as_rational(val)
        return vec

    def evaluate(self, p: int, c, I) -> list:
        """The value c(e_I) in V (I any ordering of distinct indices)."""
        I = tuple(I)
        if len(set(I)) != len(I):
            return [Fraction(0)] * self.module.dim
        s = _sort_sign(I)
        base = self.position(tuple(sorted(I)), 0)
        return [s * c[base + v] for v in range(self.module.dim)]

    def rank(self, p: int) -> int:
        if not (0 <= p < len(self.differentials)) or not self.dim(p) or not self.dim(p + 1):
            return 0
        return linalg.rank(self.differentials[p], self.dim(p))

    def check_d_squared(self) -> bool:
        for p in range(len(self.differentials) - 1):
            d0, d1 = self.differentials[p], self.differentials[p + 1]
            n = self.dim(p)
            for j in range(n):
                col = [r.get(j, 0) for r in d0]
                if any(linalg.mat_vec(d1, col)):
                    return False
        return True


def ce_complex(g: LieAlgebra, V: LieModule) -> CochainComplex:
    return CochainComplex(g, V)


@dataclass
class CohomologyReport:
    dims: list
    kernel_dims: list = field(default_factory=list)
    ranks: list = field(default_factory=list)
    representatives: list | None = None

    def __getitem__(self, p):
        return self.dims[p]


def cocycles(cx: CochainComplex, p: int) -> list:
    n = cx.dim(p)
    if not n:
        return []
    if p >= cx.algebra.dim:
        return linalg.identity(n)
    return linalg.nullspace(cx.d(p), n)


def coboundaries(cx: CochainComplex, p: int) -> list:
    """Spanning set (image columns of d_{p-1})."""
    if p <= 0:
        return []
    n_prev = cx.dim(p - 1)
    cols = linalg.transpose(cx.d(p - 1), n_prev)
    return [[c.get(i, Fraction(0)) for i in range(cx.dim(p))] for c in cols if c]


def cohomology(cx: CochainComplex, representatives: bool = False) -> CohomologyReport:
    d = cx.algebra.dim
    ranks = [cx.rank(p) for p in range(d + 1)]
    dims, kers = [], []
    for p in range(d + 1):
        ker = cx.dim(p) - ranks[p]
        im = ranks[p - 1] if p > 0 else 0
        kers.append(ker)
        dims.append(ker - im)
    reps = None
    if representatives:
        reps = []
        for p in range(d + 1):
            chosen = []
            span = coboundaries(cx, p)
            base = linalg.rank(span, cx.dim(p)) if span else 0
            for z in cocycles(cx, p):
                trial = span + chosen + [z]
                if linalg.rank(trial, cx.dim(p)) > base + len(chosen):
                    chosen.append(z)
                if len(chosen) == dims[p]:
                    break
            reps.append(chosen)
    return CohomologyReport(dims, kers, ranks, reps)


def is_cocycle(cx: CochainComplex, c, p: int) -> bool:
    if len(c) != cx.dim(p):
        raise ValueError(f"cochain has length {len(c)}, expected {cx.dim(p)}")
    return not any(cx.apply_d(p, c))


@dataclass
class CoboundaryTest:
    is_coboundary: bool
    primitive: list | None


def is_coboundary(cx: CochainComplex, c, p: int) -> CoboundaryTest:
    """Decide c in im d_{p-1}; returns a primitive b with d b = c when it is."""
    if len(c) != cx.dim(p):
        raise ValueError(f"cochain has length {len(c)}, expected {cx.dim(p)}")
    if p == 0:
        return CoboundaryTest(not any(c), [] if not any(c) else None)
    sol = linalg.solve(cx.d(p - 1), c, cx.dim(p - 1))
    return CoboundaryTest(sol.feasible, sol.solution)


# -- Kunneth and cup products --------------------------------------------------

@dataclass
class KunnethReport:
    degree: int
    direct: int
    kunneth: int
    factor_dims: tuple

    @property
    def holds(self):
        return self.direct == self.kunneth


def kunneth_check(Vg: LieModule, Vh: LieModule, p: int) -> KunnethReport:
    """Compare dim H^p(g+h, Vg(x)Vh) with sum_{a+b=p} dim H^a(g,Vg) dim H^b(h,Vh)."""
    g, h = Vg.algebra, Vh.algebra
    V = outer_module(Vg, Vh)
    direct = cohomology(ce_complex(V.algebra, V)).dims
    hg = cohomology(ce_complex(g, Vg)).dims
    hh = cohomology(ce_complex(h, Vh)).dims
    k = sum(
        hg[a] * hh[p - a] for a in range(p + 1) if a < len(hg) and p - a < len(hh)
    )
    lhs = direct[p] if p < len(direct) else 0
    return KunnethReport(p, lhs, k, (hg, hh))


class NotACocycle(ValueError):
    pass


def cup_product(cx_dual: CochainComplex, alpha, a: int, cx: CochainComplex, beta, b: int,
                check: bool = True):
    """(alpha cup beta) paired through V* (x) V -> Q, landing in C^{a+b}(g, Q).

    ``cx_dual`` must carry the dual module of ``cx``'s module (same basis order).
    Returns the cochain as {I: value} over increasing (a+b)-tuples.
    """
    if cx_dual.module.dim != cx.module.dim:
        raise ModuleError("cup product needs dual modules of equal dimension")
    if check:
        if not is_cocycle(cx_dual, alpha, a):
            raise NotACocycle("first argument is not a cocycle")
        if not is_cocycle(cx, beta, b):
            raise NotACocycle("second argument is not a cocycle")
    d = cx.algebra.dim
    out = {}
    for K in combinations(range(d), a + b):
        tot = Fraction(0)
        for A in combinations(K, a):
            B = tuple(k for k in K if k not in A)
            s = _sort_sign(A + B)
            u = cx_dual.evaluate(a, alpha, A)
            w = cx.evaluate(b, beta, B)
            tot += s * sum((x * y for x, y in zip(u, w)), Fraction(0))
        if tot:
            out[K] = tot
    return out


def trivial_cochain_vector(cx: CochainComplex, p: int, values: dict) -> list:
    """Vector for a Q-valued cochain given as {I: value}."""
    return cx.cochain(p, {(I, 0): v for I, v in values.items()})
