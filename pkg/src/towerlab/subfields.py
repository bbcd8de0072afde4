"""Subfields of K containing some K^(p^h), realized as K^(p^h)-subspaces.

A subfield W with K^(p^h) inside it is stored at level h as the subspace of
root vectors (see frobenius) of its elements.  Power towers are sequences
of such subfields, W_n stored at level n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import flint

from . import config, linalg
from .arith import FieldSpec, MultiPoly, RatFunc
from .errors import NotAPowerTower, TowerlabError
from .frobenius import _mbasis, recompose_dense, root_coords


@dataclass(frozen=True)
class SubfieldPresentation:
    """The subfield F_p(generators) of K."""

    spec: FieldSpec
    generators: tuple = ()

    def __post_init__(self):
        gens = []
        for g in self.generators:
            if g.spec != self.spec:
                raise TowerlabError("generator from a different field")
            if g.is_constant() or g in gens:
                continue
            gens.append(g)
        object.__setattr__(self, "generators", tuple(gens))

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.generators) + ">"


class LeveledSubfield:
    """W = F_p(presentation) * K^(p^base_level), stored over K^(p^level).

    ``space`` is the canonical (RREF) basis of the root vectors of W inside
    the level-``level`` monomial coordinates; ``level >= base_level``.
    """

    def __init__(self, spec, level, presentation, space, base_level=None):
        self.spec = spec
        self.level = level
        self.presentation = presentation
        self.space = space
        self.base_level = level if base_level is None else base_level
        self._basis = None
        self._frame = None

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def ambient_dim(self) -> int:
        return self.space.ambient_dim

    @property
    def degree_in_K(self) -> int:
        """[K : W]."""
        return self.ambient_dim // self.dim

    def check_budget(self, dimension):
        config.check_budget(dimension)

    def contains(self, f: RatFunc) -> bool:
        return self.space.contains(root_coords(f, self.level))

    def basis_elements(self) -> list:
        """The K^(p^level)-basis of W given by the RREF rows."""
        if self._basis is None:
            self._basis = [recompose_dense(self.spec, self.level, r) for r in self.space.rows]
        return self._basis

    def algebra_generators(self) -> list:
        """Generators of W as a K^(p^level)-algebra."""
        out = list(self.presentation.generators)
        if self.level > self.base_level:
            out += [x.frob(self.base_level) for x in self.spec.gens()]
        return out

    def p_basis_pool(self) -> list:
        coords = [x.frob(self.base_level) for x in self.spec.gens()]
        if self.base_level == 0:
            return coords
        return list(self.presentation.generators) + coords

    def frame(self):
        """Cached p-basis frame of W (see frobenius.PBasisFrame)."""
        if self._frame is None:
            from .frobenius import PBasisFrame

            self._frame = PBasisFrame(self)
        return self._frame

    def relevel(self, h: int) -> "LeveledSubfield":
        """The same field stored over K^(p^h), h >= level."""
        if h == self.level:
            return self
        if h < self.level:
            raise TowerlabError("can only re-level upward; use composite() to enlarge")
        spec = self.spec
        config.check_budget(_mbasis(spec, h).size)
        shift = spec.p**self.level
        box = itertools.product(range(spec.p ** (h - self.level)), repeat=spec.num_vars)
        monos = [spec.monomial([shift * c for c in cs]) for cs in box]
        vecs = [root_coords(w * m, h) for m in monos for w in self.basis_elements()]
        space = linalg.Subspace.span(spec, _mbasis(spec, h).size, vecs)
        return LeveledSubfield(spec, h, self.presentation, space, self.base_level)

    def composite(self, j: int) -> "LeveledSubfield":
        """W * K^(p^j) stored at level j (j <= level)."""
        if j > self.level:
            raise TowerlabError("composite level must not exceed the storage level")
        if j == self.level:
            return self
        spec = self.spec
        vecs = [root_coords(w, j) for w in self.basis_elements()]
        space = linalg.Subspace.span(spec, _mbasis(spec, j).size, vecs)
        return LeveledSubfield(spec, j, self.presentation, space, min(j, self.base_level))

    def same_field(self, other: "LeveledSubfield") -> bool:
        h = max(self.level, other.level)
        return self.relevel(h).space == other.relevel(h).space

    def __repr__(self):
        return f"LeveledSubfield({self.presentation}, level={self.level}, dim={self.dim})"


def full_field(spec: FieldSpec) -> LeveledSubfield:
    return realize(SubfieldPresentation(spec, tuple(spec.gens())), 0)


def realize(pres: SubfieldPresentation, h: int) -> LeveledSubfield:
    """W * K^(p^h) as the K^(p^h)-span of products of generators.

    Breadth-first closure: every basis element found is multiplied by every
    generator, and only products that enlarge the span are kept, so the
    final span is closed under multiplication by the generators.
    """
    if h < 0:
        raise TowerlabError("level must be nonnegative")
    spec = pres.spec
    D = _mbasis(spec, h).size
    config.check_budget(D)
    builder = linalg.EchelonBuilder(spec, D)
    one = spec.one()
    builder.add(root_coords(one, h))
    gens = [g for g in pres.generators if not _in_base(g, h)]
    queue = [one]
    while queue and builder.rank < D:
        e = queue.pop(0)
        for g in gens:
            v = e * g
            if builder.add(root_coords(v, h)):
                queue.append(v)
    space = linalg.Subspace.from_builder(builder)
    dim = space.dim
    if D % dim:
        raise TowerlabError(f"realized dimension {dim} does not divide {D}")
    return LeveledSubfield(spec, h, pres, space, h)


def _in_base(g, h):
    if h == 0:
        return True
    v = root_coords(g, h)
    return all(c.is_zero() for c in v[1:])


def contains(W: LeveledSubfield, f: RatFunc) -> bool:
    return W.contains(f)


def _log_p(n, p):
    k = 0
    while n > 1:
        if n % p:
            return None
        n //= p
        k += 1
    return k


@dataclass
class PowerTower:
    spec: FieldSpec
    depth: int
    levels: list
    degrees: list
    presentations: list = field(default_factory=list)
    explicit: bool = False

    def level(self, n) -> LeveledSubfield:
        return self.levels[n]

    def to_dict(self) -> dict:
        return {
            "field": str(self.spec),
            "depth": self.depth,
            "explicit": self.explicit,
            "levels": [
                {
                    "index": n,
                    "generators": [str(g) for g in W.presentation.generators],
                    "base_level": W.base_level,
                    "dim_over_base": W.dim,
                    "index_in_K": W.degree_in_K,
                }
                for n, W in enumerate(self.levels)
            ],
            "degrees": list(self.degrees),
        }

    def same_as(self, other: "PowerTower") -> bool:
        if self.depth != other.depth:
            return False
        return all(a.space == b.space and a.level == b.level for a, b in zip(self.levels, other.levels))


def _degrees(spec, levels):
    out = []
    pN = spec.p**spec.num_vars
    for n in range(1, len(levels)):
        big, small = levels[n - 1], levels[n]
        num = big.dim * pN * spec.p ** (spec.num_vars * (small.level - big.level - 1))
        if num % small.dim:
            raise TowerlabError("degree quotient is not an integer")
        out.append(num // small.dim)
    return out


def build_tower(pres: SubfieldPresentation, depth: int) -> PowerTower:
    if depth < 1:
        raise TowerlabError("depth must be at least 1")
    spec = pres.spec
    config.check_budget(_mbasis(spec, depth).size)
    levels = [full_field(spec)] + [realize(pres, n) for n in range(1, depth + 1)]
    return PowerTower(spec, depth, levels, _degrees(spec, levels), [pres] * depth, False)


def build_tower_explicit(per_level) -> PowerTower:
    """Tower with W_n = per_level[n-1] * K^(p^n); the composite law is validated."""
    per_level = list(per_level)
    if not per_level:
        raise TowerlabError("an explicit tower needs at least one level")
    spec = per_level[0].spec
    depth = len(per_level)
    config.check_budget(_mbasis(spec, depth).size)
    levels = [full_field(spec)] + [realize(pr, n) for n, pr in enumerate(per_level, start=1)]
    for i in range(1, depth + 1):
        for j in range(i):
            if levels[i].composite(j).space != levels[j].space:
                raise NotAPowerTower(i, j)
    return PowerTower(spec, depth, levels, _degrees(spec, levels), per_level, True)


def tower_from_levels(spec, levels, presentations=None) -> PowerTower:
    """Assemble already realized levels (W_0 = K first) after validating the composite law."""
    levels = list(levels)
    for n, W in enumerate(levels):
        if W.level != n:
            raise TowerlabError(f"level {n} is stored at level {W.level}")
    for i in range(1, len(levels)):
        for j in range(i):
            if levels[i].composite(j).space != levels[j].space:
                raise NotAPowerTower(i, j)
    depth = len(levels) - 1
    pres = presentations or [W.presentation for W in levels[1:]]
    return PowerTower(spec, depth, levels, _degrees(spec, levels), pres, True)


def exponent_step_check(t: PowerTower) -> bool:
    for i in range(t.depth):
        nxt = t.levels[i + 1]
        for w in t.levels[i].basis_elements():
            if not nxt.contains(w.frob(1)):
                return False
    return True


def foliation_profile(t: PowerTower) -> dict:
    """Length probe, constant-degree flag and rank.

    The length probe is the least n < depth after which every degree is 1;
    when the last step still has degree > 1 the tower has not stabilized
    within the computed depth and the probe reports "exceeds_depth".
    """
    degs = t.degrees
    n = t.depth
    while n > 0 and degs[n - 1] == 1:
        n -= 1
    length = n if n < t.depth else "exceeds_depth"
    constant = len(set(degs)) <= 1
    rank = _log_p(degs[0], t.spec.p) if constant and degs else None
    return {"length_probe": length, "constant_degree": constant, "rank": rank}


def _monomials_up_to(n_vars, bound):
    out = []
    for d in range(bound + 1):
        for e in itertools.product(range(d + 1), repeat=n_vars):
            if sum(e) == d:
                out.append(e)
    out.sort(key=lambda e: (sum(e), e))
    return out


def first_integrals_probe(t: PowerTower, degree_bound: int) -> list:
    """F_p-basis of polynomials of degree <= bound lying in every level.

    The residual of a polynomial against the RREF basis of W_depth is
    F_p-linear in its coefficients, so membership becomes a linear system
    over F_p after clearing denominators and comparing coefficients.
    """
    spec = t.spec
    monos = _monomials_up_to(spec.num_vars, degree_bound)
    config.check_budget(len(monos))
    top = t.levels[-1]
    h = top.level
    residuals = [top.space.residual(list(root_coords(spec.monomial(e), h))) for e in monos]
    den = spec.ctx.constant(1)
    for res in residuals:
        for c in res:
            if not c.is_zero() and not c.den.is_one():
                den = linalg._lcm(den, c.den)
    keys = {}
    rows = []
    for res in residuals:
        row = {}
        for k, c in enumerate(res):
            if c.is_zero():
                continue
            poly = c.num * (den / c.den)
            for exp, coeff in poly.to_dict().items():
                key = (k, exp)
                if key not in keys:
                    keys[key] = len(keys)
                row[keys[key]] = int(coeff)
        rows.append(row)
    p = spec.p
    ncols = max(len(keys), 1)
    # columns of the system are monomials, rows are coefficient equations
    M = flint.nmod_mat(ncols, len(monos), p)
    for j, row in enumerate(rows):
        for i, c in row.items():
            M[i, j] = c
    null, nullity = M.nullspace()
    basis = []
    for c in range(nullity):
        terms = {}
        for j, e in enumerate(monos):
            v = int(null[j, c])
            if v:
                terms[e] = v
        basis.append(MultiPoly.from_terms(spec, terms))
    return _echelon_polys(spec, basis)


def _echelon_polys(spec, polys):
    """Reduced echelon basis of an F_p-span of polynomials, leading terms by grlex."""
    p = spec.p
    monos = sorted({e for f in polys for e in f.terms()}, key=lambda e: (sum(e), e), reverse=True)
    if not monos:
        return []
    M = flint.nmod_mat(len(polys), len(monos), p)
    for i, f in enumerate(polys):
        for e, c in f.terms().items():
            M[i, monos.index(e)] = int(c)
    R, rank = M.rref()
    out = []
    for i in range(rank):
        terms = {e: int(R[i, j]) for j, e in enumerate(monos) if int(R[i, j])}
        out.append(MultiPoly.from_terms(spec, terms))
    out.sort(key=lambda f: min((sum(e), e) for e in f.terms()))
    return out
