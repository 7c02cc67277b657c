"""Sparse polynomials and polynomial multivector fields on R^n over Q.

Coordinates are 0-based: ``x0, ..., x{n-1}``.  Multivector fields are stored
as maps from strictly increasing index tuples to polynomial coefficients,

    P = sum_{i1<...<ip} P^{i1...ip} d_i1 ^ ... ^ d_ip ,

and are manipulated with the usual odd-variable calculus (d_i <-> theta_i).

Schouten bracket convention
---------------------------
For P of degree p and Q of degree q

    [P, Q] = sum_l (P <-d/dtheta_l)(d_l Q)
             - (-1)^{(p-1)(q-1)} sum_l (Q <-d/dtheta_l)(d_l P)

where ``<-d/dtheta_l`` is the right derivative.  For a bivector this gives

    [pi, pi]^{ijk} = 2 * sum_cyclic(i,j,k) sum_l pi^{il} d_l pi^{jk},

and for vector fields it is the ordinary Lie bracket.  Every sign in this
module follows from this one formula.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def rational_to_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class DimensionError(ValueError):
    pass


class Polynomial:
    """Sparse multivariate polynomial with Fraction coefficients.

    Immutable by convention: no method mutates ``terms`` after construction.
    """

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms: Mapping | None = None):
        if n_vars < 0:
            raise DimensionError("n_vars must be non-negative")
        self.n_vars = n_vars
        clean = {}
        if terms:
            for exps, coef in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != n_vars or any(e < 0 for e in exps):
                    raise DimensionError(f"bad exponent {exps} for {n_vars} variables")
                coef = as_rational(coef)
                if coef:
                    clean[exps] = clean.get(exps, 0) + coef
                    if not clean[exps]:
                        del clean[exps]
        self.terms = clean

    @classmethod
    def _raw(cls, n_vars, terms):
        # trusted constructor: terms already canonical (no zeros, right lengths)
        p = object.__new__(cls)
        p.n_vars = n_vars
        p.terms = terms
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n_vars):
        return cls._raw(n_vars, {})

    @classmethod
    def constant(cls, n_vars, c):
        c = as_rational(c)
        return cls._raw(n_vars, {(0,) * n_vars: c} if c else {})

    @classmethod
    def one(cls, n_vars):
        return cls.constant(n_vars, 1)

    @classmethod
    def var(cls, n_vars, i, coef=1):
        if not 0 <= i < n_vars:
            raise DimensionError(f"variable index {i} out of range for {n_vars} variables")
        exps = [0] * n_vars
        exps[i] = 1
        return cls.constant(n_vars, 0) if not coef else cls._raw(n_vars, {tuple(exps): as_rational(coef)})

    @classmethod
    def monomial(cls, exps, coef=1):
        return cls(len(exps), {tuple(exps): coef})

    # -- basic protocol -----------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n_vars == other.n_vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.n_vars: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Polynomial({self.n_vars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for exps in sorted(self.terms, reverse=True):
            coef = self.terms[exps]
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exps) if e
            )
            if not mono:
                out.append(str(coef))
            elif coef == 1:
                out.append(mono)
            elif coef == -1:
                out.append("-" + mono)
            else:
                out.append(f"{coef}*{mono}")
        return " + ".join(out).replace("+ -", "- ")

    def _check(self, other):
        if self.n_vars != other.n_vars:
            raise DimensionError(f"n_vars mismatch: {self.n_vars} vs {other.n_vars}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.n_vars, other)
        return None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            s = terms.get(exps, 0) + c
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return Polynomial._raw(self.n_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = as_rational(c)
        if not c:
            return Polynomial.zero(self.n_vars)
        return Polynomial._raw(self.n_vars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        if not self.terms or not other.terms:
            return Polynomial.zero(self.n_vars)
        terms: dict = {}
        items = list(other.terms.items())
        for e1, c1 in self.terms.items():
            for e2, c2 in items:
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial._raw(self.n_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.one(self.n_vars)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus & queries -------------------------------------------------

    def diff(self, i: int, times: int = 1) -> "Polynomial":
        """Formal partial derivative in the 0-based variable ``i``."""
        if not 0 <= i < self.n_vars:
            raise DimensionError(f"derivative index {i} out of range for {self.n_vars} variables")
        p = self
        for _ in range(times):
            terms = {}
            for exps, c in p.terms.items():
                e = exps[i]
                if e:
                    new = exps[:i] + (e - 1,) + exps[i + 1:]
                    terms[new] = c * e
            p = Polynomial._raw(self.n_vars, terms)
        return p

    def diff_multi(self, exps) -> "Polynomial":
        """Apply d^exps (a multi-index of derivative counts)."""
        p = self
        for i, k in enumerate(exps):
            if k:
                p = p.diff(i, k)
        return p

    def evaluate_at_zero(self) -> Fraction:
        return self.terms.get((0,) * self.n_vars, Fraction(0))

    def coefficient(self, exps) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial._raw(
            self.n_vars, {e: c for e, c in self.terms.items() if sum(e) == d}
        )

    def truncate(self, max_degree: int) -> "Polynomial":
        return Polynomial._raw(
            self.n_vars, {e: c for e, c in self.terms.items() if sum(e) <= max_degree}
        )

    def embed(self, n_vars: int, offset: int = 0) -> "Polynomial":
        """Re-home this polynomial into ``n_vars`` variables, shifted by ``offset``."""
        if offset + self.n_vars > n_vars:
            raise DimensionError("embedding does not fit")
        pad_l, pad_r = (0,) * offset, (0,) * (n_vars - offset - self.n_vars)
        return Polynomial._raw(n_vars, {pad_l + e + pad_r: c for e, c in self.terms.items()})

    def substitute_linear(self, images) -> "Polynomial":
        """Substitute x_i -> images[i] (polynomials sharing one ring)."""
        if len(images) != self.n_vars:
            raise DimensionError("need one image per variable")
        n = images[0].n_vars
        out = Polynomial.zero(n)
        for exps, c in self.terms.items():
            term = Polynomial.constant(n, c)
            for i, e in enumerate(exps):
                if e:
                    term = term * images[i] ** e
            out = out + term
        return out

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        return {
            "n_vars": self.n_vars,
            "terms": [
                {"exps": list(e), "coef": rational_to_str(self.terms[e])}
                for e in sorted(self.terms)
            ],
        }

    @classmethod
    def from_dict(cls, data):
        n = int(data["n_vars"])
        terms = {}
        for t in data["terms"]:
            e = tuple(t["exps"])
            if e in terms:
                raise ValueError(f"duplicate exponent {e}")
            terms[e] = as_rational(t["coef"])
        return cls(n, terms)


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    return p.diff(i)


def evaluate_at_zero(p: Polynomial) -> Fraction:
    return p.evaluate_at_zero()


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# -- odd-variable sign bookkeeping -------------------------------------------

def merge_indices(left, right):
    """Sign and sorted tuple for theta_left ^ theta_right; (0, None) if they overlap."""
    if not left:
        return 1, tuple(right)
    if not right:
        return 1, tuple(left)
    if set(left) & set(right):
        return 0, None
    inversions = 0
    for a in left:
        for b in right:
            if a > b:
                inversions += 1
    return (-1 if inversions & 1 else 1), tuple(sorted(left + right))


def _right_derivative(indices, l):
    """theta_I <-d/dtheta_l  as (sign, I without l); (0, None) if l not in I."""
    try:
        k = indices.index(l)
    except ValueError:
        return 0, None
    sign = -1 if (len(indices) - 1 - k) & 1 else 1
    return sign, indices[:k] + indices[k + 1:]


class MultiVector:
    """Polynomial multivector field of fixed degree on R^n."""

    __slots__ = ("n_vars", "degree", "components")

    def __init__(self, n_vars: int, degree: int, components: Mapping | None = None):
        # degree > n_vars is legal; such a field is identically zero
        if degree < 0:
            raise DimensionError("multivector degree must be >= 0")
        self.n_vars = n_vars
        self.degree = degree
        comps = {}
        for idx, p in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DimensionError(f"index tuple {idx} has wrong length for degree {degree}")
            if any(not 0 <= i < n_vars for i in idx):
                raise DimensionError(f"index tuple {idx} out of range")
            if not isinstance(p, Polynomial):
                p = Polynomial.constant(n_vars, p)
            if p.n_vars != n_vars:
                raise DimensionError("component polynomial lives in the wrong ring")
            if len(set(idx)) != len(idx):
                if p:
                    raise ValueError(f"repeated index in {idx} with nonzero coefficient")
                continue
            key = tuple(sorted(idx))
            if _perm_sign(idx) < 0:
                p = -p
            if key in comps:
                p = comps[key] + p
            if p:
                comps[key] = p
            else:
                comps.pop(key, None)
        self.components = comps

    @classmethod
    def _raw(cls, n_vars, degree, components):
        mv = object.__new__(cls)
        mv.n_vars, mv.degree, mv.components = n_vars, degree, components
        return mv

    @classmethod
    def zero(cls, n_vars, degree):
        return cls._raw(n_vars, degree, {})

    @classmethod
    def function(cls, p: Polynomial):
        return cls._raw(p.n_vars, 0, {(): p} if p else {})

    @classmethod
    def bivector(cls, n_vars, entries: Mapping):
        """Build a bivector from {(i, j): poly} with i != j (antisymmetry applied)."""
        return cls(n_vars, 2, entries)

    def __eq__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        return (
            self.n_vars == other.n_vars
            and self.degree == other.degree
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.n_vars, self.degree, frozenset(self.components.items())))

    def __bool__(self):
        return bool(self.components)

    def is_zero(self):
        return not self.components

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.components.items()))
        return f"MultiVector(n={self.n_vars}, p={self.degree}, {{{body}}})"

    def _check(self, other):
        if self.n_vars != other.n_vars:
            raise DimensionError(f"n_vars mismatch: {self.n_vars} vs {other.n_vars}")

    def __getitem__(self, idx):
        """Antisymmetric component access, e.g. ``pi[2, 1] == -pi[1, 2]``."""
        idx = tuple(idx) if isinstance(idx, tuple) else (idx,)
        if len(idx) != self.degree:
            raise DimensionError("wrong number of indices")
        if len(set(idx)) != len(idx):
            return Polynomial.zero(self.n_vars)
        p = self.components.get(tuple(sorted(idx)))
        if p is None:
            return Polynomial.zero(self.n_vars)
        return -p if _perm_sign(idx) < 0 else p

    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree:
            raise DimensionError("cannot add multivectors of different degree")
        comps = dict(self.components)
        for k, p in other.components.items():
            s = comps[k] + p if k in comps else p
            if s:
                comps[k] = s
            else:
                comps.pop(k, None)
        return MultiVector._raw(self.n_vars, self.degree, comps)

    def __neg__(self):
        return MultiVector._raw(self.n_vars, self.degree, {k: -p for k, p in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if isinstance(c, Polynomial):
            comps = {k: p * c for k, p in self.components.items()}
            return MultiVector._raw(self.n_vars, self.degree, {k: p for k, p in comps.items() if p})
        c = as_rational(c)
        if not c:
            return MultiVector.zero(self.n_vars, self.degree)
        return MultiVector._raw(self.n_vars, self.degree, {k: p.scale(c) for k, p in self.components.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def wedge(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        out: dict = {}
        for i1, p1 in self.components.items():
            for i2, p2 in other.components.items():
                sign, key = merge_indices(i1, i2)
                if not sign:
                    continue
                t = p1 * p2
                if sign < 0:
                    t = -t
                s = out[key] + t if key in out else t
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return MultiVector._raw(self.n_vars, self.degree + other.degree, out)

    def evaluate_at_zero(self):
        """Constant multivector at the origin as {indices: Fraction}, zeros dropped."""
        out = {}
        for k, p in self.components.items():
            v = p.evaluate_at_zero()
            if v:
                out[k] = v
        return out

    def polynomial_degree_part(self, d: int) -> "MultiVector":
        """Keep only the coefficient monomials of total degree ``d``."""
        comps = {}
        for k, p in self.components.items():
            h = p.homogeneous_part(d)
            if h:
                comps[k] = h
        return MultiVector._raw(self.n_vars, self.degree, comps)

    def map_polys(self, fn) -> "MultiVector":
        comps = {}
        for k, p in self.components.items():
            q = fn(p)
            if q:
                comps[k] = q
        return MultiVector._raw(self.n_vars, self.degree, comps)

    def to_dict(self):
        return {
            "n_vars": self.n_vars,
            "degree": self.degree,
            "components": [
                {"indices": list(k), "terms": self.components[k].to_dict()["terms"]}
                for k in sorted(self.components)
            ],
        }

    @classmethod
    def from_dict(cls, data):
        n, deg = int(data["n_vars"]), int(data["degree"])
        comps = {}
        for c in data["components"]:
            key = tuple(c["indices"])
            if list(key) != sorted(set(key)):
                raise ValueError(f"component indices {key} are not strictly increasing")
            comps[key] = Polynomial.from_dict({"n_vars": n, "terms": c["terms"]})
        return cls(n, deg, comps)


def _perm_sign(seq) -> int:
    inv = 0
    seq = list(seq)
    for a, b in combinations(range(len(seq)), 2):
        if seq[a] > seq[b]:
            inv += 1
    return -1 if inv & 1 else 1


def schouten(a: MultiVector, b: MultiVector) -> MultiVector:
    """Schouten-Nijenhuis bracket (convention in the module docstring)."""
    a._check(b)
    p, q = a.degree, b.degree
    deg = p + q - 1
    if deg < 0:
        raise DimensionError("bracket of two functions is undefined")
    n = a.n_vars
    out: dict = {}

    def acc(key, t):
        s = out[key] + t if key in out else t
        if s:
            out[key] = s
        else:
            out.pop(key, None)

    def half(P, Q, outer_sign):
        for I, f in P.components.items():
            for l in I:
                s1, rest = _right_derivative(I, l)
                for J, g in Q.components.items():
                    dg = g.diff(l)
                    if not dg:
                        continue
                    s2, key = merge_indices(rest, J)
                    if not s2:
                        continue
                    t = f * dg
                    if s1 * s2 * outer_sign < 0:
                        t = -t
                    acc(key, t)

    half(a, b, 1)
    half(b, a, 1 if ((p - 1) * (q - 1)) & 1 else -1)
    return MultiVector._raw(n, deg, out)


def poisson_bracket(pi: MultiVector, f: Polynomial, g: Polynomial) -> Polynomial:
    """{f, g} = sum_{i<j} pi^{ij} (d_i f d_j g - d_j f d_i g)."""
    if pi.degree != 2:
        raise DimensionError("poisson_bracket needs a bivector")
    pi._check(f)
    pi._check(g)
    n = pi.n_vars
    df = [f.diff(i) if f.terms else f for i in range(n)]
    dg = [g.diff(i) if g.terms else g for i in range(n)]
    out = Polynomial.zero(n)
    for (i, j), p in pi.components.items():
        t = df[i] * dg[j] - df[j] * dg[i]
        if t:
            out = out + p * t
    return out


def hamiltonian_vector_field(pi: MultiVector, f: Polynomial) -> MultiVector:
    """X_f = {f, .} as a degree-1 multivector."""
    n = pi.n_vars
    comps = {}
    for k in range(n):
        c = poisson_bracket(pi, f, Polynomial.var(n, k))
        if c:
            comps[(k,)] = c
    return MultiVector._raw(n, 1, comps)


@dataclass(frozen=True)
class FormalMultiVector:
    """Truncated eps-series  pi_0 + eps pi_1 + ... + eps^N pi_N."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        if not coeffs:
            raise ValueError("a formal multivector needs at least the eps^0 term")
        n, d = coeffs[0].n_vars, coeffs[0].degree
        for c in coeffs:
            if c.n_vars != n or c.degree != d:
                raise DimensionError("all eps-coefficients must share n_vars and degree")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_terms(cls, *terms):
        return cls(tuple(terms))

    @property
    def truncation_order(self):
        return len(self.coefficients) - 1

    @property
    def n_vars(self):
        return self.coefficients[0].n_vars

    @property
    def degree(self):
        return self.coefficients[0].degree

    def __getitem__(self, k):
        if k < len(self.coefficients):
            return self.coefficients[k]
        return MultiVector.zero(self.n_vars, self.degree)


@dataclass
class JacobiReport:
    holds: bool
    first_failing_order: int | None
    residual: list  # eps-coefficients of [pi_eps, pi_eps], one trivector per order


def jacobi_check(pi_eps, order: int | None = None) -> JacobiReport:
    """[pi_eps, pi_eps] mod eps^(order+1); holds iff every coefficient vanishes."""
    if isinstance(pi_eps, MultiVector):
        pi_eps = FormalMultiVector((pi_eps,))
    if pi_eps.degree != 2:
        raise DimensionError("jacobi_check expects a (formal) bivector")
    if order is None:
        order = pi_eps.truncation_order
    if order > pi_eps.truncation_order:
        raise ValueError("order exceeds the truncation order of the series")
    residual = []
    first = None
    for k in range(order + 1):
        acc = MultiVector.zero(pi_eps.n_vars, 3)
        for a in range(k + 1):
            acc = acc + schouten(pi_eps[a], pi_eps[k - a])
        residual.append(acc)
        if acc and first is None:
            first = k
    return JacobiReport(first is None, first, residual)


def coisotropy_check(pi_eps) -> bool:
    """True iff every eps-coefficient vanishes at the origin."""
    if isinstance(pi_eps, MultiVector):
        pi_eps = FormalMultiVector((pi_eps,))
    return all(not c.evaluate_at_zero() for c in pi_eps.coefficients)


def linear_poisson_structure(n_vars: int, brackets, offset: int = 0) -> MultiVector:
    """pi^{ij} = sum_k c^{ij}_k x^k from {(i, j): {k: c}} with i < j."""
    comps = {}
    for (i, j), row in brackets.items():
        p = Polynomial.zero(n_vars)
        for k, c in row.items():
            p = p + Polynomial.var(n_vars, k + offset, c)
        if p:
            comps[(i + offset, j + offset)] = p
    return MultiVector(n_vars, 2, comps)


def polys_equal(a: Iterable[Polynomial], b: Iterable[Polynomial]) -> bool:
    return list(a) == list(b)
