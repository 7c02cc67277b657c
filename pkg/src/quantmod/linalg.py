"""Exact linear algebra over Q.

Elimination is fraction-free: rows are scaled to primitive integer vectors and
combined as ``r <- p*r - a*pivot`` followed by division by the row content, so
no rational blow-up happens during the sweep.  Fractions only appear in the
final back-substitution (kernel bases, particular solutions).

Matrices are passed as sequences of rows; each row is either a dense sequence
or a sparse ``{column: value}`` dict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm


def _sparse_row(row) -> dict:
    if isinstance(row, dict):
        return {c: Fraction(v) for c, v in row.items() if v}
    return {c: Fraction(v) for c, v in enumerate(row) if v}


def _integerize(row: dict):
    """Scale a rational sparse row to a primitive integer row; returns (row, scale)."""
    if not row:
        return {}, Fraction(1)
    den = 1
    for v in row.values():
        den = lcm(den, v.denominator)
    ints = {c: int(v * den) for c, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    return {c: v // g for c, v in ints.items()}, Fraction(den, g)


def _content(*rows) -> int:
    g = 0
    for r in rows:
        for v in r.values():
            g = gcd(g, v)
            if g == 1:
                return 1
    return g


def _axpy(p, r: dict, a, s: dict) -> dict:
    # p*r - a*s on sparse integer rows
    out = {c: p * v for c, v in r.items()} if p != 1 else dict(r)
    for c, v in s.items():
        w = out.get(c, 0) - a * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return out


@dataclass
class Echelon:
    """Result of fraction-free elimination.

    ``pivots`` holds (column, integer row) in pivot order.  When tracking is on,
    ``transforms[k]`` is the rational combination of the *input* rows that
    produces the k-th pivot row, and ``null_combos`` are combinations of input
    rows that vanish on the eliminated columns (left-kernel witnesses) together
    with the residual on the non-eliminated columns.
    """

    ncols: int
    pivots: list = field(default_factory=list)
    transforms: list = field(default_factory=list)
    null_combos: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def pivot_columns(self):
        return [c for c, _ in self.pivots]


def echelon(rows, ncols: int, track: bool = False, eliminate_cols: int | None = None) -> Echelon:
    """Row-reduce with integer-preserving steps.

    Only columns ``< eliminate_cols`` (default: all) are used as pivots, which
    lets callers append right-hand-side columns that ride along.
    """
    if eliminate_cols is None:
        eliminate_cols = ncols
    work = []
    for i, row in enumerate(rows):
        r, scale = _integerize(_sparse_row(row))
        if any(c >= ncols or c < 0 for c in r):
            raise ValueError("row has entries outside the declared column range")
        t = {i: scale} if track else None
        work.append((r, t))

    out = Echelon(ncols)
    remaining = work
    for col in range(eliminate_cols):
        cands = [k for k, (r, _) in enumerate(remaining) if col in r]
        if not cands:
            continue
        # sparsest row, then smallest pivot: keeps the integers small
        k = min(cands, key=lambda k: (len(remaining[k][0]), abs(remaining[k][0][col])))
        prow, ptr = remaining[k]
        p = prow[col]
        nxt = []
        for j, (r, t) in enumerate(remaining):
            if j == k:
                continue
            a = r.get(col)
            if a:
                g = gcd(p, a)
                pp, aa = p // g, a // g
                r = _axpy(pp, r, aa, prow)
                if track:
                    t = _axpy_frac(pp, t, aa, ptr)
                c = _content(r)
                if c > 1:
                    r = {cc: v // c for cc, v in r.items()}
                    if track:
                        t = {cc: v / c for cc, v in t.items()}
            nxt.append((r, t))
        out.pivots.append((col, prow))
        if track:
            out.transforms.append(ptr)
        remaining = nxt
    if track:
        out.null_combos = [(t, r) for r, t in remaining]
    return out


def _axpy_frac(p, r: dict, a, s: dict) -> dict:
    out = {c: p * v for c, v in r.items()}
    for c, v in s.items():
        w = out.get(c, 0) - a * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return out


def rank(rows, ncols: int) -> int:
    return echelon(rows, ncols).rank


def rref(rows, ncols: int):
    """Reduced row echelon form as (pivot_columns, rows as {col: Fraction})."""
    ech = echelon(rows, ncols)
    piv = [(c, {cc: Fraction(v, r[c]) for cc, v in r.items()}) for c, r in ech.pivots]
    # Gauss-Jordan upward sweep, last pivot first
    for k in range(len(piv) - 1, -1, -1):
        c, r = piv[k]
        for j in range(k):
            cj, rj = piv[j]
            a = rj.get(c)
            if a:
                for cc, v in r.items():
                    w = rj.get(cc, 0) - a * v
                    if w:
                        rj[cc] = w
                    else:
                        rj.pop(cc, None)
    piv.sort(key=lambda t: t[0])
    return [c for c, _ in piv], [r for _, r in piv]


def nullspace(rows, ncols: int) -> list:
    """Basis of {v : A v = 0}, one vector per free column (reduced-echelon order)."""
    pcols, prow = rref(rows, ncols)
    pivset = set(pcols)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, r in zip(pcols, prow):
            a = r.get(f)
            if a:
                v[c] = -a
        basis.append(v)
    return basis


def mat_vec(rows, v) -> list:
    out = []
    for row in rows:
        r = _sparse_row(row)
        out.append(sum((val * v[c] for c, val in r.items()), Fraction(0)))
    return out


def vec_mat(y, rows, ncols: int) -> list:
    out = [Fraction(0)] * ncols
    for yi, row in zip(y, rows):
        if not yi:
            continue
        for c, val in _sparse_row(row).items():
            out[c] += yi * val
    return out


def transpose(rows, ncols: int) -> list:
    cols = [dict() for _ in range(ncols)]
    for i, row in enumerate(rows):
        for c, v in _sparse_row(row).items():
            cols[c][i] = v
    return cols


@dataclass
class LinearSolution:
    """Outcome of :func:`solve`.

    Exactly one of ``solution`` / ``certificate`` is set.  A certificate ``y``
    satisfies ``y A = 0`` and ``y b != 0``.
    """

    solution: list | None
    certificate: list | None
    kernel: list

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def solve(rows, b, ncols: int, with_kernel: bool = False) -> LinearSolution:
    """Solve A x = b exactly or return a left-kernel infeasibility certificate."""
    m = len(rows)
    if len(b) != m:
        raise ValueError("rhs length does not match the number of rows")
    aug = []
    for row, bi in zip(rows, b):
        r = _sparse_row(row)
        bi = Fraction(bi)
        if bi:
            r[ncols] = bi
        aug.append(r)
    ech = echelon(aug, ncols + 1, track=True, eliminate_cols=ncols)
    for t, r in ech.null_combos:
        if r.get(ncols):
            y = [Fraction(0)] * m
            for i, v in t.items():
                y[i] = Fraction(v)
            return LinearSolution(None, y, [])
    # back-substitute on the integer pivot rows
    x = [Fraction(0)] * ncols
    for col, r in reversed(ech.pivots):
        s = Fraction(r.get(ncols, 0))
        for c, v in r.items():
            if c != col and c < ncols:
                s -= v * x[c]
        x[col] = s / r[col]
    kernel = nullspace(rows, ncols) if with_kernel else []
    return LinearSolution(x, None, kernel)


def in_span(vectors, v) -> bool:
    """Is ``v`` in the row span of ``vectors``?"""
    n = len(v)
    if not vectors:
        return not any(v)
    return rank(list(vectors) + [v], n) == rank(vectors, n)


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def det(matrix) -> Fraction:
    """Exact determinant via Bareiss on the integerized matrix."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    den = 1
    for row in matrix:
        for v in row:
            den = lcm(den, Fraction(v).denominator)
    a = [[int(Fraction(v) * den) for v in row] for row in matrix]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], den ** n)


def inverse(matrix):
    """Exact inverse, or None when singular."""
    n = len(matrix)
    rows = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(matrix)]
    pcols, prow = rref(rows, 2 * n)
    if pcols[:n] != list(range(n)) or len(pcols) < n:
        return None
    return [[prow[i].get(n + j, Fraction(0)) for j in range(n)] for i in range(n)]
