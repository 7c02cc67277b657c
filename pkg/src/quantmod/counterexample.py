"""The Poisson structure on (g + h)^* built from (g, h, C).

Coordinates x^0..x^{dim g - 1} (g-block) come first, then y^0..y^{dim h - 1}
(h-block).  The structure is

    pi^{ij} = c^{ij}_k x^k                 (linear Poisson structure of g)
    pi^{ai} = 0
    pi^{ab} = c^{ab}_c y^c + Psi(x) C^{ab}

with Psi the quadratic Casimir built from the inverse Killing form of g.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lie
from .lie import LieAlgebra
from .poly import (
    FormalMultiVector,
    MultiVector,
    Polynomial,
    as_rational,
    coisotropy_check,
    jacobi_check,
    poisson_bracket,
    rational_to_str,
    schouten,
)


@dataclass
class CounterexampleData:
    g: LieAlgebra
    h: LieAlgebra
    C: dict  # {(a, b): Fraction}, a < b, h-block indices
    name: str | None = None
    expected_verdict: str | None = None

    def __post_init__(self):
        clean = {}
        for (a, b), v in self.C.items():
            v = as_rational(v)
            if a == b:
                if v:
                    raise ValueError("C must be antisymmetric")
                continue
            if a > b:
                a, b, v = b, a, -v
            if not (0 <= a < self.h.dim and 0 <= b < self.h.dim):
                raise ValueError(f"C index ({a},{b}) out of range for dim h = {self.h.dim}")
            clean[(a, b)] = clean.get((a, b), 0) + v
        self.C = {k: v for k, v in clean.items() if v}

    def scaled(self, s) -> "CounterexampleData":
        s = as_rational(s)
        return CounterexampleData(self.g, self.h, {k: v * s for k, v in self.C.items()}, self.name)

    def C_cochain(self, cx: lie.CochainComplex) -> list:
        """C as a vector in C^2(h, Q) for the given complex over h."""
        return lie.trivial_cochain_vector(cx, 2, self.C)

    def to_dict(self):
        d = {
            "g": self.g.to_dict(),
            "h": self.h.to_dict(),
            "C": [[a, b, rational_to_str(v)] for (a, b), v in sorted(self.C.items())],
        }
        if self.name:
            d["name"] = self.name
        if self.expected_verdict:
            d["expected_verdict"] = self.expected_verdict
        return d


@dataclass
class ValidationReport:
    ok: bool
    failures: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)


class InvalidData(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(report.failures))
        self.report = report


def validate_data(d: CounterexampleData) -> ValidationReport:
    """Check every hypothesis of the construction and name each one that fails."""
    failures = []
    checks = {}
    checks["g_semisimple"] = lie.is_semisimple(d.g)
    if not checks["g_semisimple"]:
        failures.append("g is not semisimple (degenerate Killing form)")
    cx = lie.ce_complex(d.h, lie.trivial_module(d.h))
    c = d.C_cochain(cx)
    checks["C_cocycle"] = lie.is_cocycle(cx, c, 2)
    if not checks["C_cocycle"]:
        failures.append("C is not a 2-cocycle of (h, trivial)")
    checks["C_nonzero_class"] = not lie.is_coboundary(cx, c, 2).is_coboundary
    if not checks["C_nonzero_class"]:
        failures.append("C is a coboundary; its class in H^2(h) vanishes")
    return ValidationReport(not failures, failures, checks)


@dataclass
class BuiltCounterexample:
    data: CounterexampleData
    n: int
    pi: MultiVector
    casimir: Polynomial

    @property
    def g_dim(self):
        return self.data.g.dim

    @property
    def h_dim(self):
        return self.data.h.dim

    @property
    def x_block(self):
        return range(self.g_dim)

    @property
    def y_block(self):
        return range(self.g_dim, self.n)

    @property
    def algebra(self) -> LieAlgebra:
        """g (+) h, whose Kirillov-Kostant structure is the linear part of pi."""
        return lie.direct_sum(self.data.g, self.data.h)

    def linear_part(self) -> MultiVector:
        return self.pi.polynomial_degree_part(1)

    def quadratic_part(self) -> MultiVector:
        return self.pi.polynomial_degree_part(2)


class ConstructionDefect(AssertionError):
    pass


def build(d: CounterexampleData, validate: bool = True) -> BuiltCounterexample:
    if validate:
        rep = validate_data(d)
        if not rep.ok:
            raise InvalidData(rep)
    g, h = d.g, d.h
    n = g.dim + h.dim
    psi = lie.casimir(g, n_vars=n, offset=0)
    pi = g.linear_poisson(n, 0) + h.linear_poisson(n, g.dim)
    extra = {(a + g.dim, b + g.dim): psi.scale(c) for (a, b), c in d.C.items()}
    pi = pi + MultiVector(n, 2, extra)
    if not jacobi_check(pi).holds:
        raise ConstructionDefect("constructed bivector violates the Jacobi identity")
    if not coisotropy_check(pi):
        raise ConstructionDefect("constructed bivector does not vanish at the origin")
    return BuiltCounterexample(d, n, pi, psi)


@dataclass
class JacobiBreakdown:
    """The three graded pieces of [pi, pi] = [p1,p1] + 2[p1,p2] + [p2,p2]."""

    linear: MultiVector
    quadratic: MultiVector
    cubic: MultiVector
    # the sub-arguments used for each piece
    lie_jacobi: bool
    cocycle: bool
    casimir_central: bool
    y_independent: bool

    @property
    def holds(self):
        return not (self.linear or self.quadratic or self.cubic)

    def as_dict(self):
        return {
            "linear_vanishes": not self.linear,
            "quadratic_vanishes": not self.quadratic,
            "cubic_vanishes": not self.cubic,
            "lie_jacobi": self.lie_jacobi,
            "cocycle": self.cocycle,
            "casimir_central": self.casimir_central,
            "quadratic_part_y_independent": self.y_independent,
        }


def jacobi_lemma_breakdown(b: BuiltCounterexample) -> JacobiBreakdown:
    p1, p2 = b.linear_part(), b.quadratic_part()
    if p1 + p2 != b.pi:
        raise ConstructionDefect("pi has parts beyond linear + quadratic")
    lin = schouten(p1, p1)
    quad = schouten(p1, p2).scale(2)
    cub = schouten(p2, p2)
    try:
        lie.LieAlgebra(b.n, b.algebra.structure_constants)
        lie_ok = True
    except lie.JacobiViolation:
        lie_ok = False
    cx = lie.ce_complex(b.data.h, lie.trivial_module(b.data.h))
    cocycle_ok = lie.is_cocycle(cx, b.data.C_cochain(cx), 2)
    glin = b.data.g.linear_poisson(b.n, 0)
    central = all(not poisson_bracket(glin, Polynomial.var(b.n, i), b.casimir) for i in b.x_block)
    y_free = all(
        p.diff(a).is_zero() for p in p2.components.values() for a in b.y_block
    )
    return JacobiBreakdown(lin, quad, cub, lie_ok, cocycle_ok, central, y_free)


def formal(pi: MultiVector, *higher: MultiVector) -> FormalMultiVector:
    return FormalMultiVector((pi,) + tuple(higher))
