"""Truncated star products on polynomial functions.

* ``kontsevich_star2``: the order-eps^2 star product of a polynomial Poisson
  bivector with configurable graph weights (``WeightTable``).
* ``cbh_star``: the Gutt / CBH product on S(g) for a linear Poisson structure,
  obtained from  exp(a) * exp(b) = exp(BCH_eps(a, b))  on exponential
  generating functions.
* ``duflo_apply``: the operator exp(sum_n d_2n eps^2n tr(ad_d^2n)) with
  d_2n = DUFLO_SIGN * B_2n / (4n (2n)!), and its inverse.
* ``rho_linear``: ev_0 o D^{-1}, the character of the linear-Poisson star
  product.

Everywhere the first-order term is (eps/2){f, g}.  A truncated eps-series is a
list of polynomials ``[c_0, c_1, ..., c_N]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .lie import LieAlgebra
from .poly import DimensionError, MultiVector, Polynomial, as_rational, jacobi_check, rational_to_str


# -- Bernoulli numbers and wheel weights --------------------------------------

@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m with B_1 = -1/2, from sum_{j<=m} C(m+1, j) B_j = 0."""
    if m < 0:
        raise ValueError("Bernoulli index must be non-negative")
    if m == 0:
        return Fraction(1)
    s = sum((comb(m + 1, j) * bernoulli(j) for j in range(m)), Fraction(0))
    return -s / (m + 1)


# Global sign of the wheel series in D.  With the genuine Kontsevich weights
# (KONTSEVICH_WEIGHTS below) the operator intertwining CBH -> Kontsevich,
#   D(f *_CBH g) = D f *_K D g,
# is exp(-sum B_2n/(4n(2n)!) tr(ad^2n)), i.e. the inverse of j^{1/2}(d).
# Flipping this constant requires flipping w_cycle as well.
DUFLO_SIGN = -1


def duflo_coefficient(n: int) -> Fraction:
    """d_2n = DUFLO_SIGN * B_2n / (4n (2n)!), the coefficient of tr(ad^2n) in log D."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return DUFLO_SIGN * bernoulli(2 * n) / (4 * n * factorial(2 * n))


def wheel_weight(n: int) -> Fraction:
    """Weight c_2n of the 2n-wheel in rho = ev_0 o exp(sum c_2n tr(ad^2n)).

    rho = ev_0 o D^{-1} gives c_2n = -d_2n, of magnitude |B_2n| / (4n (2n)!).
    The anomaly wheel graphs carry the same magnitude up to a sign that is
    kept as a separate flag (``WeightTable.wheel_sign``).
    """
    return -duflo_coefficient(n)


# -- weight table ---------------------------------------------------------------

@dataclass(frozen=True)
class WeightTable:
    """Order-eps^2 graph weights (with the eps/2 normalisation of the first order).

    With P = pi (full antisymmetric matrix) and f_i = d_i f etc., the eps^2
    coefficient is

        w_parallel  P^{ij} P^{kl}   f_{ik} g_{jl}
      + w_left      P^{ij} d_j P^{kl} f_{ik} g_l
      + w_right     P^{ij} d_j P^{kl} f_k  g_{il}
      + w_cycle     d_k P^{ij} d_i P^{kl} f_j g_l

    summed over all indices.
    """

    w_parallel: Fraction
    w_left: Fraction
    w_right: Fraction
    w_cycle: Fraction
    wheel_sign: int = 1

    def to_dict(self):
        return {
            "w_parallel": rational_to_str(self.w_parallel),
            "w_left": rational_to_str(self.w_left),
            "w_right": rational_to_str(self.w_right),
            "w_cycle": rational_to_str(self.w_cycle),
            "wheel_sign": self.wheel_sign,
        }

    @classmethod
    def from_dict(cls, data):
        sign = int(data.get("wheel_sign", 1))
        if sign not in (1, -1):
            raise ValueError("wheel_sign must be +1 or -1")
        return cls(
            as_rational(data["w_parallel"]),
            as_rational(data["w_left"]),
            as_rational(data["w_right"]),
            as_rational(data["w_cycle"]),
            sign,
        )

    def with_wheel_sign(self, sign: int) -> "WeightTable":
        return WeightTable(self.w_parallel, self.w_left, self.w_right, self.w_cycle, sign)


# Associativity mod eps^3 on the so3 and so3-r2 structures fixes the first
# three uniquely; w_cycle multiplies a symmetric Hochschild coboundary and is
# fixed by the character identity over so(3) given c_2 = wheel_weight(1).
# Re-derived in tests/test_star.py::test_weight_table_is_pinned_by_oracles.
# These are Kontsevich's 1/2, 1/3, -1/3, -1/6 rescaled by (1/2)^2 (hbar = eps/2).
KONTSEVICH_WEIGHTS = WeightTable(
    w_parallel=Fraction(1, 8),
    w_left=Fraction(1, 12),
    w_right=Fraction(-1, 12),
    w_cycle=Fraction(-1, 24),
)


# -- eps-series helpers ---------------------------------------------------------

def series_zero(n_vars, order):
    return [Polynomial.zero(n_vars) for _ in range(order + 1)]


def series_add(a, b):
    return [x + y for x, y in zip(a, b)]


def series_sub(a, b):
    return [x - y for x, y in zip(a, b)]


def series_is_zero(a) -> bool:
    return all(not x for x in a)


def star_series(star, A, B, order: int):
    """Bilinear extension of a star product to truncated eps-series."""
    n = A[0].n_vars
    out = series_zero(n, order)
    for a, fa in enumerate(A[: order + 1]):
        if not fa:
            continue
        for b, gb in enumerate(B[: order + 1 - a]):
            if not gb:
                continue
            prod_ = star(fa, gb, order - a - b)
            for k, c in enumerate(prod_):
                out[a + b + k] = out[a + b + k] + c
    return out


# -- Kontsevich product to order eps^2 --------------------------------------------

class NotPoisson(ValueError):
    pass


class KontsevichStar:
    """f * g = fg + eps/2 {f,g} + eps^2 B_2(f,g) for a polynomial Poisson bivector."""

    def __init__(self, pi: MultiVector, weights: WeightTable = KONTSEVICH_WEIGHTS, check: bool = True):
        if pi.degree != 2:
            raise DimensionError("star product needs a bivector")
        if check and not jacobi_check(pi).holds:
            raise NotPoisson("bivector fails the Jacobi identity")
        self.pi = pi
        self.weights = weights
        n = self.n = pi.n_vars
        self.P = [[pi[i, j] for j in range(n)] for i in range(n)]
        # dP[m][i][j] = d_m P^{ij}
        self.dP = [[[self.P[i][j].diff(m) for j in range(n)] for i in range(n)] for m in range(n)]
        self.maxorder = 2

    def __call__(self, f: Polynomial, g: Polynomial, order: int = 2):
        return self.terms(f, g, order)

    def terms(self, f, g, order=2, weights=None):
        n = self.n
        if f.n_vars != n or g.n_vars != n:
            raise DimensionError("function lives in the wrong ring")
        w = weights or self.weights
        out = [f * g]
        if order < 1:
            return out
        zero = Polynomial.zero(n)
        df = [f.diff(i) for i in range(n)]
        dg = [g.diff(i) for i in range(n)]
        P = self.P
        b1 = zero
        for i in range(n):
            if not df[i]:
                continue
            for j in range(n):
                if P[i][j] and dg[j]:
                    b1 = b1 + P[i][j] * df[i] * dg[j]
        out.append(b1.scale(Fraction(1, 2)))
        if order < 2:
            return out
        out.append(self._b2(df, dg, w))
        return out[: order + 1]

    def _b2(self, df, dg, w):
        n, P, dP = self.n, self.P, self.dP
        zero = Polynomial.zero(n)
        ddf = [[df[i].diff(k) if df[i] else zero for k in range(n)] for i in range(n)]
        ddg = [[dg[j].diff(l) if dg[j] else zero for l in range(n)] for j in range(n)]
        total = zero
        if w.w_parallel:
            acc = zero
            # M[k][j] = sum_l P^{kl} g_{jl}
            M = [[_dot(P[k], ddg[j]) for j in range(n)] for k in range(n)]
            for i in range(n):
                for k in range(n):
                    if ddf[i][k]:
                        s = zero
                        for j in range(n):
                            if P[i][j] and M[k][j]:
                                s = s + P[i][j] * M[k][j]
                        if s:
                            acc = acc + ddf[i][k] * s
            total = total + acc.scale(w.w_parallel)
        if w.w_left or w.w_right:
            # Q[i][k][l] = sum_j P^{ij} d_j P^{kl}
            Q = self._Q()
            if w.w_left:
                acc = zero
                for i in range(n):
                    for k in range(n):
                        if not ddf[i][k]:
                            continue
                        s = zero
                        for l in range(n):
                            if Q[i][k][l] and dg[l]:
                                s = s + Q[i][k][l] * dg[l]
                        if s:
                            acc = acc + ddf[i][k] * s
                total = total + acc.scale(w.w_left)
            if w.w_right:
                acc = zero
                for i in range(n):
                    for l in range(n):
                        if not ddg[i][l]:
                            continue
                        s = zero
                        for k in range(n):
                            if Q[i][k][l] and df[k]:
                                s = s + Q[i][k][l] * df[k]
                        if s:
                            acc = acc + ddg[i][l] * s
                total = total + acc.scale(w.w_right)
        if w.w_cycle:
            R = self._R()
            acc = zero
            for j in range(n):
                if not df[j]:
                    continue
                for l in range(n):
                    if R[j][l] and dg[l]:
                        acc = acc + R[j][l] * df[j] * dg[l]
            total = total + acc.scale(w.w_cycle)
        return total

    def _Q(self):
        if not hasattr(self, "_q"):
            n, P, dP = self.n, self.P, self.dP
            zero = Polynomial.zero(n)
            Q = [[[zero] * n for _ in range(n)] for _ in range(n)]
            for i in range(n):
                for k in range(n):
                    for l in range(n):
                        s = zero
                        for j in range(n):
                            if P[i][j] and dP[j][k][l]:
                                s = s + P[i][j] * dP[j][k][l]
                        Q[i][k][l] = s
            self._q = Q
        return self._q

    def _R(self):
        # R[j][l] = sum_{i,k} d_k P^{ij} d_i P^{kl}
        if not hasattr(self, "_r"):
            n, dP = self.n, self.dP
            zero = Polynomial.zero(n)
            R = [[zero] * n for _ in range(n)]
            for j in range(n):
                for l in range(n):
                    s = zero
                    for i in range(n):
                        for k in range(n):
                            a, b = dP[k][i][j], dP[i][k][l]
                            if a and b:
                                s = s + a * b
                    R[j][l] = s
            self._r = R
        return self._r

    def b2_components(self, f, g):
        """The four eps^2 graph contributions with unit weights (parallel, left, right, cycle)."""
        n = self.n
        df = [f.diff(i) for i in range(n)]
        dg = [g.diff(i) for i in range(n)]
        out = []
        for unit in range(4):
            ws = [Fraction(0)] * 4
            ws[unit] = Fraction(1)
            out.append(self._b2(df, dg, WeightTable(*ws)))
        return out


def _dot(row, col):
    n = len(row)
    s = Polynomial.zero(row[0].n_vars) if n else None
    for a, b in zip(row, col):
        if a and b:
            s = s + a * b
    return s


def kontsevich_star2(pi: MultiVector, f: Polynomial, g: Polynomial,
                     wt: WeightTable = KONTSEVICH_WEIGHTS) -> list:
    """[eps^0, eps^1, eps^2] coefficients of f * g."""
    return KontsevichStar(pi, wt)(f, g, 2)


# -- BCH / Gutt product -------------------------------------------------------

@lru_cache(maxsize=None)
def bch_word_coefficients(max_len: int) -> dict:
    """Dynkin's formula: log(e^X e^Y) = sum_w coef(w) [w], w a word in 'XY'.

    ``[w]`` is the right-nested bracket [w_1, [w_2, ... [w_{m-1}, w_m]]] and
    the coefficients already include the 1/m normalisation.
    """
    coefs: dict = {}

    def blocks(remaining):
        # ordered sequences of (r, s) with r + s > 0 summing to ``remaining``
        if remaining == 0:
            yield ()
            return
        for tot in range(1, remaining + 1):
            for r in range(tot + 1):
                s = tot - r
                for rest in blocks(remaining - tot):
                    yield ((r, s),) + rest

    for m in range(1, max_len + 1):
        for seq in blocks(m):
            k = len(seq)
            denom = m
            word = ""
            for r, s in seq:
                denom *= factorial(r) * factorial(s)
                word += "X" * r + "Y" * s
            c = Fraction((-1) ** (k - 1), k * denom)
            coefs[word] = coefs.get(word, 0) + c
    return {w: c for w, c in coefs.items() if c and (len(w) == 1 or w[-1] != w[-2])}


class GuttStar:
    """CBH star product on S(g) = Pol(g*), truncated at eps^order."""

    def __init__(self, g: LieAlgebra, order: int = 3):
        self.g = g
        self.order = order
        self.n = g.dim
        self._W = self._generating_terms()
        self._cache: dict = {}

    def _generating_terms(self):
        """W_k = <BCH_k(s.e, t.e), xi> as polynomials in (s, t, xi), k = 0..order."""
        d = self.n
        nv = 3 * d
        X = [Polynomial.var(nv, i) for i in range(d)]
        Y = [Polynomial.var(nv, d + i) for i in range(d)]
        g = self.g

        def br(u, v):
            out = [Polynomial.zero(nv) for _ in range(d)]
            for i in range(d):
                if not u[i]:
                    continue
                for j in range(d):
                    if not v[j]:
                        continue
                    uv = u[i] * v[j]
                    for k, c in g.bracket_basis(i, j).items():
                        out[k] = out[k] + uv.scale(c)
            return out

        Z = [[Polynomial.zero(nv) for _ in range(d)] for _ in range(self.order + 1)]
        for word, c in bch_word_coefficients(self.order + 1).items():
            letters = [X if ch == "X" else Y for ch in word]
            val = letters[-1]
            for L in reversed(letters[:-1]):
                val = br(L, val)
            depth = len(word) - 1
            Z[depth] = [z + v.scale(c) for z, v in zip(Z[depth], val)]
        W = []
        for k in range(self.order + 1):
            w = Polynomial.zero(nv)
            for m in range(d):
                if Z[k][m]:
                    w = w + Z[k][m] * Polynomial.var(nv, 2 * d + m)
            W.append(w)
        return W

    def monomial_product(self, alpha, beta):
        """x^alpha * x^beta as [eps^0..eps^order] coefficients."""
        key = (tuple(alpha), tuple(beta))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        d = self.n
        cap = tuple(alpha) + tuple(beta)
        total = sum(alpha) + sum(beta)
        W = [_prune(w, cap, d) for w in self._W]
        res = [Polynomial.zero(d) for _ in range(self.order + 1)]
        # power[e] = eps^e part of W^j (pruned)
        power = [Polynomial.one(3 * d)] + [Polynomial.zero(3 * d)] * self.order
        target = cap
        for j in range(0, total + 1):
            if j > 0:
                new = [Polynomial.zero(3 * d) for _ in range(self.order + 1)]
                for e1, a in enumerate(power):
                    if not a:
                        continue
                    for e2, w in enumerate(W):
                        if e1 + e2 > self.order or not w:
                            continue
                        new[e1 + e2] = new[e1 + e2] + _mul_pruned(a, w, cap, d)
                power = new
            e = total - j
            if 0 <= e <= self.order and power[e]:
                coef = Polynomial._raw(d, {
                    ex[2 * d:]: c for ex, c in power[e].terms.items() if ex[: 2 * d] == target
                })
                if coef:
                    scale = Fraction(_multifact(alpha) * _multifact(beta), factorial(j))
                    res[e] = res[e] + coef.scale(scale)
        self._cache[key] = res
        return res

    def __call__(self, f: Polynomial, h: Polynomial, order: int | None = None):
        order = self.order if order is None else min(order, self.order)
        n = self.n
        out = series_zero(n, order)
        for a, ca in f.terms.items():
            for b, cb in h.terms.items():
                mp = self.monomial_product(a, b)
                c = ca * cb
                for k in range(order + 1):
                    if mp[k]:
                        out[k] = out[k] + mp[k].scale(c)
        return out


def _multifact(alpha):
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def _prune(p: Polynomial, cap, d):
    k = 2 * d
    return Polynomial._raw(p.n_vars, {
        e: c for e, c in p.terms.items() if all(e[i] <= cap[i] for i in range(k))
    })


def _mul_pruned(a: Polynomial, b: Polynomial, cap, d):
    k = 2 * d
    terms: dict = {}
    bt = list(b.terms.items())
    for e1, c1 in a.terms.items():
        for e2, c2 in bt:
            ok = True
            for i in range(k):
                if e1[i] + e2[i] > cap[i]:
                    ok = False
                    break
            if not ok:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            s = terms.get(e, 0) + c1 * c2
            if s:
                terms[e] = s
            else:
                del terms[e]
    return Polynomial._raw(a.n_vars, terms)


_gutt_cache: dict = {}


def cbh_star(g: LieAlgebra, f: Polynomial, g2: Polynomial, order: int = 3) -> list:
    """Gutt/CBH product f * g2 on S(g), eps^0..eps^order."""
    key = (g, order)
    star = _gutt_cache.get(key)
    if star is None:
        star = _gutt_cache[key] = GuttStar(g, order)
    return star(f, g2, order)


# -- Duflo-type operator ------------------------------------------------------

def trace_ad_power(g: LieAlgebra, m: int) -> Polynomial:
    """Symbol of tr(ad_d^m): a homogeneous degree-m polynomial in the d_i."""
    d = g.dim
    A = [[Polynomial.zero(d) for _ in range(d)] for _ in range(d)]
    for i in range(d):
        ad = g.ad_matrices[i]
        for r in range(d):
            for c in range(d):
                if ad[r][c]:
                    A[r][c] = A[r][c] + Polynomial.var(d, i, ad[r][c])
    M = A
    for _ in range(m - 1):
        M = [[_dot(M[r], [A[k][c] for k in range(d)]) for c in range(d)] for r in range(d)]
    tr = Polynomial.zero(d)
    for r in range(d):
        tr = tr + M[r][r]
    return tr


def apply_symbol(symbol: Polynomial, f: Polynomial) -> Polynomial:
    """Apply the constant-coefficient operator sum_a s_a d^a to f."""
    out = Polynomial.zero(f.n_vars)
    for a, c in symbol.terms.items():
        t = f.diff_multi(a)
        if t:
            out = out + t.scale(c)
    return out


@dataclass(frozen=True)
class DufloOperator:
    """exp(sign * sum_{2n <= N} d_2n eps^2n tr(ad_d^2n)) as eps-graded symbols."""

    algebra: LieAlgebra
    truncation_order: int
    symbols: tuple  # symbols[k] is the eps^k part

    @property
    def coefficients(self):
        return {2 * n: duflo_coefficient(n) for n in range(1, self.truncation_order // 2 + 1)}

    def __call__(self, f: Polynomial) -> list:
        return [apply_symbol(s, f) for s in self.symbols]


@lru_cache(maxsize=None)
def duflo_operator(g: LieAlgebra, order: int, invert: bool = False) -> DufloOperator:
    d = g.dim
    sign = -1 if invert else 1
    X = [Polynomial.zero(d) for _ in range(order + 1)]
    for n in range(1, order // 2 + 1):
        X[2 * n] = trace_ad_power(g, 2 * n).scale(sign * duflo_coefficient(n))
    # exp of an eps-graded series with zero constant part
    result = [Polynomial.one(d)] + [Polynomial.zero(d) for _ in range(order)]
    power = list(result)
    for j in range(1, order + 1):
        new = [Polynomial.zero(d) for _ in range(order + 1)]
        for a, pa in enumerate(power):
            if not pa:
                continue
            for b, xb in enumerate(X):
                if xb and a + b <= order:
                    new[a + b] = new[a + b] + pa * xb
        power = new
        if all(not p for p in power):
            break
        result = [r + p.scale(Fraction(1, factorial(j))) for r, p in zip(result, power)]
    return DufloOperator(g, order, tuple(result))


def duflo_apply(g: LieAlgebra, f: Polynomial, order: int = 3, invert: bool = False) -> list:
    return duflo_operator(g, order, invert)(f)


def duflo_apply_series(g: LieAlgebra, F, order: int, invert: bool = False) -> list:
    op = duflo_operator(g, order, invert)
    out = series_zero(F[0].n_vars, order)
    for a, fa in enumerate(F[: order + 1]):
        if not fa:
            continue
        for k, s in enumerate(op.symbols[: order + 1 - a]):
            if s:
                out[a + k] = out[a + k] + apply_symbol(s, fa)
    return out


def rho_linear(g: LieAlgebra, f: Polynomial, order: int = 3) -> list:
    """eps-coefficients of ev_0(D^{-1} f)."""
    return [c.evaluate_at_zero() for c in duflo_apply(g, f, order, invert=True)]


def rho_series(g: LieAlgebra, F, order: int) -> list:
    out = [Fraction(0)] * (order + 1)
    for a, fa in enumerate(F[: order + 1]):
        if not fa:
            continue
        for k, v in enumerate(rho_linear(g, fa, order - a)):
            out[a + k] += v
    return out


def series_product_scalar(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out
