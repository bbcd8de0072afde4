"""Divided-power differential operators on K = F_p(x_1..x_N).

An operator is a finite sum D = sum_e A_e * prod_i (1/e_i!) d^{e_i}/dx_i^{e_i}
with coefficients A_e in K.  It acts on monomials by
D(x^b) = sum_e A_e * prod_i C(b_i, e_i) * x^(b - e), with binomials mod p,
and is K^(p^h)-linear when every e_i < p^h.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

from . import config, linalg
from .arith import FieldSpec, RatFunc, binom_mod_p, divided_derivative_poly, rat_sum
from .errors import TowerlabError
from .frobenius import _mbasis, root_coords
from .subfields import LeveledSubfield, realize, SubfieldPresentation


def _grlex(e):
    return (sum(e), e)


def _height_of(exps, p):
    h = 0
    for e in exps:
        for ei in e:
            while ei >= p**h:
                h += 1
    return h


def _lucas(b, e, p):
    out = 1
    for bi, ei in zip(b, e):
        if ei > bi:
            return 0
        out = out * binom_mod_p(bi, ei, p) % p
        if not out:
            return 0
    return out


class DiffOperator:
    """Coefficient table {e: A_e} in the divided-power symbol basis."""

    __slots__ = ("spec", "coeffs", "height", "_values")

    def __init__(self, spec: FieldSpec, coeffs=None):
        self.spec = spec
        clean = {}
        for e, c in (coeffs or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != spec.num_vars or min(e) < 0:
                raise TowerlabError(f"bad symbol exponent {e}")
            if isinstance(c, int):
                c = spec.const(c)
            if not c.is_zero():
                clean[e] = c
        self.coeffs = dict(sorted(clean.items(), key=lambda kv: _grlex(kv[0])))
        self.height = _height_of(self.coeffs, spec.p)
        self._values = {}

    @classmethod
    def identity(cls, spec):
        return cls(spec, {(0,) * spec.num_vars: spec.one()})

    @classmethod
    def zero(cls, spec):
        return cls(spec, {})

    @classmethod
    def multiplication(cls, f: RatFunc):
        return cls(f.spec, {(0,) * f.spec.num_vars: f})

    @property
    def order(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, e) -> RatFunc:
        return self.coeffs.get(tuple(e), self.spec.zero())

    def __eq__(self, other):
        return isinstance(other, DiffOperator) and self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, self.spec.zero()) + c
        return DiffOperator(self.spec, out)

    def __neg__(self):
        return DiffOperator(self.spec, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f: RatFunc) -> "DiffOperator":
        """Left multiplication f * D."""
        return DiffOperator(self.spec, {e: f * c for e, c in self.coeffs.items()})

    def value_on_monomial(self, b) -> RatFunc:
        b = tuple(b)
        if b in self._values:
            return self._values[b]
        spec = self.spec
        p = spec.p
        out = spec.zero()
        for e, c in self.coeffs.items():
            k = _lucas(b, e, p)
            if k:
                out = out + c * (spec.monomial([bi - ei for bi, ei in zip(b, e)]) * k)
        self._values[b] = out
        return out

    def vector(self, h: int) -> list:
        """Coefficients as a dense vector indexed by MonomialBasis(h)."""
        if h < self.height:
            raise TowerlabError(f"operator of height {self.height} does not fit level {h}")
        mb = _mbasis(self.spec, h)
        out = [self.spec.zero()] * mb.size
        for e, c in self.coeffs.items():
            out[mb.index(e)] = c
        return out

    @classmethod
    def from_vector(cls, spec, h, vec) -> "DiffOperator":
        mb = _mbasis(spec, h)
        return cls(spec, {mb.exponents(i): c for i, c in enumerate(vec) if not c.is_zero()})

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"DiffOperator({render(self)})"


def symbol(spec: FieldSpec, i: int, a: int) -> DiffOperator:
    """(1/a!) d^a/dx_i^a for the 1-based variable index i."""
    if not 1 <= i <= spec.num_vars:
        raise TowerlabError(f"variable index {i} out of range 1..{spec.num_vars}")
    if a < 0:
        raise TowerlabError("symbol order must be nonnegative")
    e = [0] * spec.num_vars
    e[i - 1] = a
    return DiffOperator(spec, {tuple(e): spec.one()})


@functools.lru_cache(maxsize=50_000)
def _over_power(f: RatFunc, h: int):
    """f = P / Q with Q = den^(p^h) a p^h-th power (None when f is a polynomial)."""
    if f.den.is_one():
        return f.num, None
    q = f.spec.p**h
    return f.num * f.den ** (q - 1), f.den.inflate([q] * f.spec.num_vars)


def apply(D: DiffOperator, f: RatFunc) -> RatFunc:
    """D(f), using K^(p^h)-linearity at the operator's height h.

    Writing f = P / Q with Q a p^h-th power, each symbol of height <= h
    passes through 1/Q, so only divided derivatives of P are needed.
    """
    spec = D.spec
    if D.is_zero() or f.is_zero():
        return spec.zero()
    h = D.height
    if h == 0:
        return D.coefficient((0,) * spec.num_vars) * f
    P, Q = _over_power(f, h)
    terms = []
    for e, A in D.coeffs.items():
        dP = divided_derivative_poly(P, e, spec.p)
        if dP.is_zero():
            continue
        inner = RatFunc.from_poly(spec, dP) if Q is None else RatFunc(spec, dP, Q)
        terms.append(A * inner)
    return rat_sum(spec, terms)


def from_values(spec: FieldSpec, h: int, values) -> DiffOperator:
    """The operator of height <= h with the given values on x^b, b < p^h.

    Reads A_e off the values: A_e = sum_{e' <= e} C(e, e') (-x)^(e - e') D(x^e'),
    which inverts the triangular relation D(x^b) = sum_e A_e C(b, e) x^(b - e).
    """
    mb = _mbasis(spec, h)
    p = spec.p
    neg_x = [-g for g in spec.gens()]
    powers = [[(g**k) for k in range(mb.q)] for g in neg_x]
    if isinstance(values, dict):
        vals = values
    else:
        vals = {mb.exponents(i): v for i, v in enumerate(values)}
    nonzero = [(b, v) for b, v in vals.items() if not v.is_zero()]
    coeffs = {}
    for e in mb:
        acc = spec.zero()
        for b, v in nonzero:
            k = _lucas(e, b, p)
            if not k:
                continue
            mono = spec.one()
            for i, (ei, bi) in enumerate(zip(e, b)):
                if ei > bi:
                    mono = mono * powers[i][ei - bi]
            acc = acc + v * mono * k
        if not acc.is_zero():
            coeffs[e] = acc
    return DiffOperator(spec, coeffs)


def compose(D1: DiffOperator, D2: DiffOperator) -> DiffOperator:
    """D1 o D2, of height <= max of the two heights.

    Operators of height <= h are exactly the K^(p^h)-linear endomorphisms,
    which form an algebra, so the composite is determined by its values on
    the monomials of MonomialBasis(max height).
    """
    spec = D1.spec
    h = max(D1.height, D2.height)
    config.check_budget(_mbasis(spec, h).size)
    if h == 0:
        return DiffOperator.multiplication(D1.coefficient((0,) * spec.num_vars) * D2.coefficient((0,) * spec.num_vars))
    vals = {b: apply(D1, D2.value_on_monomial(b)) for b in _mbasis(spec, h)}
    return from_values(spec, h, vals)


def power(D: DiffOperator, k: int) -> DiffOperator:
    out = DiffOperator.identity(D.spec)
    for _ in range(k):
        out = compose(D, out)
    return out


def commutator(D1: DiffOperator, D2: DiffOperator) -> DiffOperator:
    return compose(D1, D2) - compose(D2, D1)


def order(D: DiffOperator) -> int:
    return D.order


def is_augmented(D: DiffOperator) -> bool:
    return D.coefficient((0,) * D.spec.num_vars).is_zero()


# ------------------------------------------------------------- rendering

def _symbol_text(name, a):
    if a == 1:
        return f"d/d{name}"
    return f"(1/{a}!)d^{a}/d{name}^{a}"


def _coeff_text(c):
    s = str(c)
    if any(ch in s for ch in "+-/") or (" " in s):
        return f"({s})"
    return s


def render(D: DiffOperator) -> str:
    """Canonical text: terms ``A_e * d[x^a,y^b]`` in graded-lex order of e."""
    if D.is_zero():
        return "0"
    names = D.spec.var_names
    parts = []
    for e, c in D.coeffs.items():
        sym = "d[" + ",".join(f"{n}^{a}" for n, a in zip(names, e) if a) + "]" if any(e) else "id"
        parts.append(sym if c.is_one() else f"{_coeff_text(c)} * {sym}")
    return " + ".join(parts)


def render_symbols(D: DiffOperator) -> str:
    """Human form with symbols (1/a!)d^a/dx^a."""
    if D.is_zero():
        return "0"
    names = D.spec.var_names
    parts = []
    for e, c in D.coeffs.items():
        syms = "*".join(_symbol_text(n, a) for n, a in zip(names, e) if a) or "id"
        parts.append(syms if c.is_one() else f"{_coeff_text(c)} * {syms}")
    return " + ".join(parts)


# ------------------------------------------------------------- restriction

@dataclass
class RestrictedMap:
    """A K^(p^h)-linear map W -> K given by its values on a basis of W.

    ``basis`` is a K^(p^level)-basis of the source field; ``values`` are the
    images.  K-linear combinations of maps act on value vectors.
    """

    source: LeveledSubfield
    level: int
    basis: list
    values: list
    label: str = field(default="")

    def __call__(self, w: RatFunc) -> RatFunc:
        frame_basis = self.basis
        spec = self.source.spec
        vecs = [root_coords(b, self.level) for b in frame_basis]
        sol = linalg.solve(spec, vecs, list(root_coords(w, self.level)))
        if sol is None:
            raise TowerlabError("element outside the source field")
        out = spec.zero()
        for c, v in zip(sol, self.values):
            if not c.is_zero():
                out = out + c.frob(self.level) * v
        return out

    def matrix(self) -> list:
        """Rows: root coordinates (level h) of the image of each basis element."""
        return [list(root_coords(v, self.level)) for v in self.values]

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)


def restrict(D: DiffOperator, W: LeveledSubfield, basis=None, level=None) -> RestrictedMap:
    """D restricted to W, on a K^(p^level)-basis of W (level >= height(D))."""
    if basis is None:
        lev = max(W.level, D.height)
        Wl = W.relevel(lev)
        basis = Wl.basis_elements()
        level = lev
    elif level is None:
        raise TowerlabError("an explicit basis needs its level")
    if D.height > level:
        raise TowerlabError("operator height exceeds the basis level")
    return RestrictedMap(W, level, list(basis), [apply(D, b) for b in basis], render(D))


# ------------------------------------------------------------- algebras

def relative_diff_algebra(W: LeveledSubfield):
    """K-basis (RREF in coefficient coordinates) of Diff_W(K) at W's level n.

    Operators of height <= n are the K^(p^n)-linear maps K -> K, and such a
    map is W-linear iff it commutes with multiplication by each generator g
    of W over K^(p^n).  By the Leibniz rule for divided powers,
    D o g = sum_e A_e sum_{e' <= e} D^(e-e')(g) D^(e'), so the commutator
    vanishes iff sum_{e > e'} A_e D^(e-e')(g) = 0 for every e'.  These are
    linear equations in the A_e with low-degree coefficients.
    """
    spec = W.spec
    n = W.level
    mb = _mbasis(spec, n)
    size = mb.size
    config.check_budget(size)
    if n == 0:
        return [DiffOperator.identity(spec)], linalg.Subspace.full(spec, 1)
    exps = list(mb)
    rows = []
    for g in W.algebra_generators():
        der = {a: apply(DiffOperator(spec, {a: spec.one()}), g) for a in exps}
        for lower in exps:
            row = [spec.zero()] * size
            for j, e in enumerate(exps):
                if e != lower and all(a >= b for a, b in zip(e, lower)):
                    row[j] = der[tuple(a - b for a, b in zip(e, lower))]
            if any(not c.is_zero() for c in row):
                rows.append(row)
    space = linalg.kernel(spec, rows, size)
    basis = [DiffOperator.from_vector(spec, n, r) for r in space.rows]
    return basis, space


def _identity_space(spec, n):
    return linalg.Subspace.span(spec, _mbasis(spec, n).size, [DiffOperator.identity(spec).vector(n)])


def lift_vector(spec, vec, src_level, dst_level):
    """Re-index a coefficient vector from level src to a higher level dst."""
    return DiffOperator.from_vector(spec, src_level, vec).vector(dst_level)


@dataclass
class OperatorAlgebra:
    tower: object
    per_level_basis: list
    spaces: list
    dims: list

    def level_space(self, n):
        return self.spaces[n]

    def contains(self, D: DiffOperator, n: int) -> bool:
        if D.height > n:
            return False
        return self.spaces[n].contains(D.vector(n)) if n > 0 else (D.height == 0)

    def to_dict(self):
        return {
            "dims": list(self.dims),
            "levels": [[render(D) for D in basis] for basis in self.per_level_basis],
        }


def algebra_of_tower(t) -> OperatorAlgebra:
    spec = t.spec
    bases = []
    spaces = []
    dims = []
    for n, W in enumerate(t.levels):
        basis, space = relative_diff_algebra(W)
        if space.dim != W.degree_in_K:
            raise TowerlabError(f"dim D_{n} = {space.dim} but [K : W_{n}] = {W.degree_in_K}")
        bases.append(basis)
        spaces.append(space)
        dims.append(space.dim)
    for n in range(len(spaces) - 1):
        big = spaces[n + 1]
        for r in spaces[n].rows:
            if not big.contains(lift_vector(spec, r, n, n + 1)):
                raise TowerlabError(f"D_{n} is not contained in D_{n + 1}")
    return OperatorAlgebra(t, bases, spaces, dims)


def restriction_surjectivity_check(n: int, W: LeveledSubfield) -> bool:
    """Diff_{p^n}(K) -> Hom_{K^(p^n)}(W, K) is onto (rank = dim of the Hom space)."""
    spec = W.spec
    if W.level > n:
        raise TowerlabError("W must be stored at a level <= n")
    Wn = W.relevel(n)
    basis = Wn.basis_elements()
    mb = _mbasis(spec, n)
    config.check_budget(mb.size)
    rows = []
    for e in mb:
        D = DiffOperator(spec, {e: spec.one()})
        rows.append([apply(D, b) for b in basis])
    return linalg.rank(spec, rows, len(basis)) == len(basis)


def frobenius_power_field(spec: FieldSpec, m: int) -> LeveledSubfield:
    """K^(p^m) as a leveled subfield."""
    return realize(SubfieldPresentation(spec, ()), m)
