"""Exact linear algebra over K = F_p(x_1..x_N).

Rows are cleared of denominators and eliminated fraction-free over
F_p[x] (each new row is combined with a pivot row, then divided by its
content), and only the final back-substitution divides in K.  The reduced
row echelon form is unique, so pivot order does not affect results.
"""

from __future__ import annotations

from typing import Sequence

from .arith import FieldSpec, RatFunc
from .errors import TowerlabError


def _lcm(a, b):
    if a.is_one():
        return b
    if b.is_one():
        return a
    return (a * b) / a.gcd(b)


def _clear(spec, vec):
    """RatFunc vector -> polynomial vector spanning the same K-line."""
    l = spec.ctx.constant(1)
    for v in vec:
        if not v.num.is_zero() and not v.den.is_one():
            l = _lcm(l, v.den)
    if l.is_one():
        return [v.num for v in vec]
    return [v.num * (l / v.den) if not v.num.is_zero() else v.num for v in vec]


def _primitive(row):
    g = None
    for e in row:
        if e.is_zero():
            continue
        g = e if g is None else g.gcd(e)
        if g.is_constant():
            break
    if g is None:
        return row
    if not g.is_constant():
        row = [e / g if not e.is_zero() else e for e in row]
    # normalize the leading entry to leading coefficient 1
    lead = next(e for e in row if not e.is_zero())
    lc = int(lead.leading_coefficient())
    if lc != 1:
        inv = pow(lc, -1, _modulus(lead))
        row = [e * inv for e in row]
    return row


def _modulus(poly):
    return poly.context().modulus()


def _first_nonzero(row):
    for i, e in enumerate(row):
        if not e.is_zero():
            return i
    return -1


class EchelonBuilder:
    """Incremental fraction-free echelon form of a growing set of vectors."""

    def __init__(self, spec: FieldSpec, ncols: int):
        self.spec = spec
        self.ncols = ncols
        self.rows = []  # (pivot, polynomial row), sorted by pivot

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, row):
        for piv, r in self.rows:
            c = row[piv]
            if c.is_zero():
                continue
            a = r[piv]
            g = a.gcd(c)
            if not g.is_one():
                a, c = a / g, c / g
            row = [x * a - y * c if not y.is_zero() else x * a for x, y in zip(row, r)]
            row = _primitive(row)
        return row

    def reduce_poly(self, row):
        return self._reduce(row)

    def add(self, vec: Sequence[RatFunc]) -> bool:
        """Insert vec; return True when the span grew."""
        if len(vec) != self.ncols:
            raise TowerlabError(f"vector of length {len(vec)} in ambient dimension {self.ncols}")
        row = self._reduce(_primitive(_clear(self.spec, vec)))
        piv = _first_nonzero(row)
        if piv < 0:
            return False
        idx = 0
        while idx < len(self.rows) and self.rows[idx][0] < piv:
            idx += 1
        self.rows.insert(idx, (piv, row))
        return True

    def contains(self, vec: Sequence[RatFunc]) -> bool:
        row = self._reduce(_clear(self.spec, vec))
        return _first_nonzero(row) < 0

    def rref(self):
        """Back-substitute into reduced row echelon form over K."""
        spec = self.spec
        ctx = spec.ctx
        out = []
        pivots = []
        for piv, r in reversed(self.rows):
            lead = r[piv]
            row = [RatFunc(spec, e, lead) if not e.is_zero() else spec.zero() for e in r]
            for piv2, r2 in zip(pivots, out):
                c = row[piv2]
                if c.is_zero():
                    continue
                row = [x - c * y if not y.is_zero() else x for x, y in zip(row, r2)]
            out.append(row)
            pivots.append(piv)
        out.reverse()
        pivots.reverse()
        _ = ctx
        return out, pivots


class Subspace:
    """K-subspace of K^n stored as its reduced row echelon basis.

    The basis is canonical, so equality of subspaces is equality of rows.
    """

    __slots__ = ("spec", "ambient_dim", "rows", "pivots", "_builder")

    def __init__(self, spec, ambient_dim, rows, pivots, builder=None):
        self.spec = spec
        self.ambient_dim = ambient_dim
        self.rows = rows
        self.pivots = pivots
        self._builder = builder

    @classmethod
    def span(cls, spec: FieldSpec, ambient_dim: int, vectors) -> "Subspace":
        b = EchelonBuilder(spec, ambient_dim)
        for v in vectors:
            if b.rank == ambient_dim:
                break
            b.add(v)
        return cls.from_builder(b)

    @classmethod
    def from_builder(cls, b: EchelonBuilder) -> "Subspace":
        rows, pivots = b.rref()
        return cls(b.spec, b.ncols, rows, pivots, b)

    @classmethod
    def zero(cls, spec, ambient_dim):
        return cls(spec, ambient_dim, [], [])

    @classmethod
    def full(cls, spec, ambient_dim):
        return cls.span(spec, ambient_dim, unit_vectors(spec, ambient_dim))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _echelon(self):
        if self._builder is None:
            b = EchelonBuilder(self.spec, self.ambient_dim)
            for r in self.rows:
                b.add(r)
            self._builder = b
        return self._builder

    def residual(self, vec):
        """vec minus its projection along the pivot coordinates."""
        out = list(vec)
        for piv, r in zip(self.pivots, self.rows):
            c = out[piv]
            if c.is_zero():
                continue
            out = [x - c * y if not y.is_zero() else x for x, y in zip(out, r)]
        return out

    def contains(self, vec) -> bool:
        if len(vec) != self.ambient_dim:
            raise TowerlabError("dimension mismatch")
        return self._echelon().contains(vec)

    def coords(self, vec):
        """Coefficients of vec in the RREF basis (vec must lie in the space)."""
        return [vec[c] for c in self.pivots]

    def combine(self, coeffs):
        out = [self.spec.zero()] * self.ambient_dim
        for c, r in zip(coeffs, self.rows):
            if c.is_zero():
                continue
            out = [x + c * y if not y.is_zero() else x for x, y in zip(out, r)]
        return out

    def _same(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise TowerlabError(
                f"dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def __add__(self, other):
        return self.sum(other)

    def sum(self, other: "Subspace") -> "Subspace":
        self._same(other)
        return Subspace.span(self.spec, self.ambient_dim, list(self.rows) + list(other.rows))

    def intersect(self, other: "Subspace") -> "Subspace":
        """Solve sum a_i u_i in other via the left kernel of the residuals."""
        self._same(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.spec, self.ambient_dim)
        res = [other.residual(r) for r in self.rows]
        alphas = left_kernel(self.spec, res, self.ambient_dim)
        return Subspace.span(self.spec, self.ambient_dim, [self.combine(a) for a in alphas])

    def contains_space(self, other: "Subspace") -> bool:
        self._same(other)
        return all(self.contains(r) for r in other.rows)

    def equals(self, other: "Subspace") -> bool:
        self._same(other)
        return self.pivots == other.pivots and self.rows == other.rows

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim and self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def unit_vectors(spec, n):
    out = []
    for i in range(n):
        v = [spec.zero()] * n
        v[i] = spec.one()
        out.append(v)
    return out


def rref(spec: FieldSpec, rows, ncols: int | None = None):
    """Reduced row echelon form and pivot list of a matrix over K."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    s = Subspace.span(spec, ncols, rows)
    return s.rows, s.pivots


def rank(spec, rows, ncols=None) -> int:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    b = EchelonBuilder(spec, ncols)
    for r in rows:
        b.add(r)
    return b.rank


def kernel(spec: FieldSpec, rows, ncols: int) -> Subspace:
    """Right null space {v : M v = 0} of the matrix with the given rows."""
    R, pivots = rref(spec, rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [spec.zero()] * ncols
        v[f] = spec.one()
        for piv, r in zip(pivots, R):
            if not r[f].is_zero():
                v[piv] = -r[f]
        basis.append(v)
    return Subspace.span(spec, ncols, basis)


def left_kernel(spec, rows, ncols):
    """Basis of {a : sum_i a_i rows[i] = 0}."""
    m = len(rows)
    cols = [[rows[i][j] for i in range(m)] for j in range(ncols)]
    return kernel(spec, cols, m).rows


def solve(spec, rows, rhs):
    """Some a with sum_i a_i rows[i] = rhs, or None when inconsistent."""
    m = len(rows)
    n = len(rhs)
    cols = [[rows[i][j] for i in range(m)] + [-rhs[j]] for j in range(n)]
    ker = kernel(spec, cols, m + 1)
    for v in ker.rows:
        if not v[m].is_zero():
            scale = v[m].inverse()
            return [x * scale for x in v[:m]]
    return None


def inverse(spec, rows):
    """Inverse of a square invertible matrix via RREF of [M | I]."""
    n = len(rows)
    aug = [list(r) + [spec.one() if i == j else spec.zero() for j in range(n)] for i, r in enumerate(rows)]
    R, piv = rref(spec, aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) != n:
        raise TowerlabError("matrix is singular")
    return [r[n:] for r in R]


def mat_vec_left(spec, coeffs, rows):
    """sum_i coeffs[i] * rows[i]."""
    n = len(rows[0]) if rows else 0
    out = [spec.zero()] * n
    for c, r in zip(coeffs, rows):
        if c.is_zero():
            continue
        out = [x + c * y if not y.is_zero() else x for x, y in zip(out, r)]
    return out
