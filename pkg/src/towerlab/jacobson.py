"""Tangent spaces, p-Lie algebras, annihilators and Jacobson sequences.

Derivations of a subfield W (containing some K^(p^h)) are handled through a
p-basis a_1..a_N of W: every derivation is sum_i c_i d/da_i with c_i in W,
so a W-subspace of derivations is stored as the K-span of its coordinate
vectors c in K^N (its RREF has entries in W).  Maps are compared through
their values on the frame basis w_j^p a^e of W over K^(p^(h+1)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import linalg
from .arith import FieldSpec, RatFunc
from .diffops import (
    DiffOperator,
    OperatorAlgebra,
    RestrictedMap,
    apply,
    render,
    symbol,
)
from .errors import (
    DimensionLawViolation,
    MismatchAtLevel,
    NotExponentOne,
    NotInSubfield,
    PreconditionError,
    SearchExhausted,
    TowerlabError,
)
from .frobenius import _mbasis, p_basis, root_coords
from .subfields import (
    LeveledSubfield,
    PowerTower,
    SubfieldPresentation,
    _log_p,
    full_field,
    realize,
    tower_from_levels,
)


def _dim_at(W: LeveledSubfield, h: int) -> int:
    """dim of W over K^(p^h) for h >= W.level."""
    return W.dim * W.spec.p ** (W.spec.num_vars * (h - W.level))


def field_degree(big: LeveledSubfield, small: LeveledSubfield) -> int:
    h = max(big.level, small.level)
    a, b = _dim_at(big, h), _dim_at(small, h)
    if a % b:
        raise TowerlabError("field degree is not an integer; the fields are not nested")
    return a // b


def coordinate_power_field(spec: FieldSpec, m: int) -> LeveledSubfield:
    """K^(p^m)."""
    return realize(SubfieldPresentation(spec, ()), m)


@dataclass
class PLieAlgebra:
    """A W-subspace of derivations of the carrier W, in p-basis coordinates."""

    carrier: LeveledSubfield
    coords: linalg.Subspace

    @property
    def spec(self):
        return self.carrier.spec

    @property
    def frame(self):
        return self.carrier.frame()

    @property
    def rank(self) -> int:
        return self.coords.dim

    @property
    def generators(self) -> list:
        fr = self.frame
        return [
            RestrictedMap(self.carrier, fr.level, fr.elements, fr.derivation_values(c), self.describe(c))
            for c in self.coords.rows
        ]

    def describe(self, c) -> str:
        fr = self.frame
        parts = []
        for ci, a in zip(c, fr.a):
            if ci.is_zero():
                continue
            sym = f"d/d({a})"
            parts.append(sym if ci.is_one() else f"({ci}) * {sym}")
        return " + ".join(parts) or "0"

    def value_vectors(self, frame=None) -> list:
        """Values of the generators on a frame basis of the carrier."""
        fr = self.frame
        if frame is None or frame is fr:
            return [fr.derivation_values(c) for c in self.coords.rows]
        return [[fr.apply_derivation(c, b) for b in frame.elements] for c in self.coords.rows]

    def value_space(self, frame=None) -> linalg.Subspace:
        fr = frame or self.frame
        return linalg.Subspace.span(self.spec, fr.size, self.value_vectors(fr))

    def same_as(self, other: "PLieAlgebra") -> bool:
        if not self.carrier.same_field(other.carrier):
            return False
        if self.rank != other.rank:
            return False
        fr = self.frame
        return self.value_space(fr) == other.value_space(fr)

    def bracket_coords(self, c, d) -> list:
        fr = self.frame
        return [fr.apply_derivation(c, di) - fr.apply_derivation(d, ci) for ci, di in zip(c, d)]

    def pth_power_coords(self, c) -> list:
        """Coordinates of the derivation delta^p: (delta^p)(a_i) = delta^(p-1)(c_i)."""
        fr = self.frame
        out = []
        for ci in c:
            v = ci
            for _ in range(self.spec.p - 1):
                v = fr.apply_derivation(c, v)
            out.append(v)
        return out

    def certify(self) -> bool:
        """Closure under brackets and p-th powers of the generators."""
        rows = self.coords.rows
        for c, d in itertools.combinations(rows, 2):
            if not self.coords.contains(self.bracket_coords(c, d)):
                return False
        return all(self.coords.contains(self.pth_power_coords(c)) for c in rows)

    def to_dict(self) -> dict:
        return {
            "carrier": [str(g) for g in self.carrier.presentation.generators],
            "carrier_level": self.carrier.level,
            "p_basis": [str(a) for a in self.frame.a],
            "rank": self.rank,
            "generators": [self.describe(c) for c in self.coords.rows],
        }


def derivations(W: LeveledSubfield) -> list:
    """W-basis d/da_1..d/da_N of Der(W), a = a p-basis of W."""
    fr = W.frame()
    out = []
    N = W.spec.num_vars
    for i in range(N):
        c = [W.spec.zero()] * N
        c[i] = W.spec.one()
        out.append(RestrictedMap(W, fr.level, fr.elements, fr.derivation_values(c), f"d/d({fr.a[i]})"))
    return out


def full_tangent(W: LeveledSubfield) -> PLieAlgebra:
    spec = W.spec
    return PLieAlgebra(W, linalg.Subspace.full(spec, spec.num_vars))


def _small_generators(small: LeveledSubfield) -> list:
    gens = list(small.presentation.generators)
    gens += [x.frob(small.base_level) for x in small.spec.gens()]
    return gens


def relative_tangent(big: LeveledSubfield, small: LeveledSubfield, check_exponent=True) -> PLieAlgebra:
    """Derivations of ``big`` vanishing on ``small``."""
    spec = big.spec
    fr = big.frame()
    gens = _small_generators(small)
    for g in gens:
        if not big.contains(g):
            raise NotInSubfield(f"{g} is not in the larger field")
    if check_exponent:
        for w in big.basis_elements():
            if not small.contains(w.frob(1)):
                raise NotExponentOne(f"({w})^p is not in the smaller field")
    rows = [fr.partials(g) for g in gens]
    rows = [r for r in rows if any(not c.is_zero() for c in r)]
    N = spec.num_vars
    ker = linalg.kernel(spec, rows, N) if rows else linalg.Subspace.full(spec, N)
    F = PLieAlgebra(big, ker)
    if check_exponent:
        deg = field_degree(big, small)
        if spec.p**F.rank != deg:
            raise NotExponentOne(f"p^rank = {spec.p ** F.rank} but the degree is {deg}")
    return F


def annihilator(F: PLieAlgebra, presentation=None) -> LeveledSubfield:
    """Common kernel of F in the carrier, realized one level up."""
    W = F.carrier
    spec = W.spec
    fr = F.frame
    L = fr.level
    D = _mbasis(spec, L).size
    if F.rank == 0:
        out = W.relevel(L)
        return LeveledSubfield(spec, L, presentation or W.presentation, out.space, W.base_level)
    values = F.value_vectors()
    rows = []
    for f in range(fr.size):
        row = []
        for vals in values:
            row.extend(root_coords(vals[f], L))
        rows.append(row)
    lams = linalg.left_kernel(spec, rows, len(rows[0]))
    frame_vecs = [root_coords(b, L) for b in fr.elements]
    vecs = [linalg.mat_vec_left(spec, lam, frame_vecs) for lam in lams]
    space = linalg.Subspace.span(spec, D, vecs)
    if space.dim * spec.p**F.rank != fr.size:
        raise DimensionLawViolation(
            f"[W : Ann] = {fr.size}/{space.dim} but p^rank = {spec.p ** F.rank}"
        )
    if presentation is None:
        presentation = _minimal_presentation(spec, L, space)
    return LeveledSubfield(spec, L, presentation, space, L)


def _minimal_presentation(spec, L, space) -> SubfieldPresentation:
    """Greedy generator choice among basis elements, simplest first."""
    from .frobenius import recompose_dense

    elems = [recompose_dense(spec, L, r) for r in space.rows]
    elems.sort(key=lambda f: (f.degree(), len(str(f))))
    gens = []
    current = realize(SubfieldPresentation(spec, ()), L)
    for e in elems:
        if current.dim == space.dim:
            break
        if current.contains(e):
            continue
        gens.append(e)
        current = realize(SubfieldPresentation(spec, tuple(gens)), L)
    if current.space != space:
        raise TowerlabError("generator search did not reproduce the annihilator")
    return SubfieldPresentation(spec, tuple(gens))


@dataclass
class JacobsonSequence:
    algebras: list
    lifts: list = field(default_factory=list)

    @property
    def ranks(self) -> list:
        return [F.rank for F in self.algebras]

    def same_as(self, other: "JacobsonSequence") -> bool:
        if len(self.algebras) != len(other.algebras):
            return False
        return all(a.same_as(b) for a, b in zip(self.algebras, other.algebras))

    def mismatch_level(self, other) -> int | None:
        for i, (a, b) in enumerate(zip(self.algebras, other.algebras), start=1):
            if not a.same_as(b):
                return i
        if len(self.algebras) != len(other.algebras):
            return min(len(self.algebras), len(other.algebras)) + 1
        return None

    def to_dict(self) -> dict:
        out = []
        for i, F in enumerate(self.algebras, start=1):
            d = F.to_dict()
            d["level"] = i
            if self.lifts and self.lifts[i - 1] is not None:
                d["operator_generators"] = [render(D) for D in self.lifts[i - 1]]
            out.append(d)
        return {"ranks": self.ranks, "levels": out}


def transversality(F: PLieAlgebra, i: int) -> bool:
    """F meets T_{W/K^(p^i)} trivially, W the carrier of F."""
    if i == 0:
        return True
    T = relative_tangent(F.carrier, coordinate_power_field(F.spec, i), check_exponent=False)
    return F.coords.intersect(T.coords).dim == 0


def tower_to_sequence(t: PowerTower, certify=True) -> JacobsonSequence:
    algebras = []
    for i in range(1, t.depth + 1):
        F = relative_tangent(t.levels[i - 1], t.levels[i])
        if certify:
            if not F.certify():
                raise TowerlabError(f"tangent space at level {i} is not closed")
            if not transversality(F, i - 1):
                raise TowerlabError(f"transversality fails at level {i}")
        algebras.append(F)
    ranks = [F.rank for F in algebras]
    if any(a < b for a, b in zip(ranks, ranks[1:])):
        raise TowerlabError(f"ranks increase: {ranks}")
    return JacobsonSequence(algebras)


def sequence_to_tower(s: JacobsonSequence) -> PowerTower:
    if not s.algebras:
        raise TowerlabError("empty sequence")
    spec = s.algebras[0].spec
    levels = [full_field(spec)]
    for i, F in enumerate(s.algebras, start=1):
        if not F.carrier.same_field(levels[-1]):
            raise TowerlabError(f"carrier of algebra {i} is not the previous annihilator")
        levels.append(annihilator(F))
    return tower_from_levels(spec, levels)


def _symbol_lifts(alg: OperatorAlgebra, i: int, F: PLieAlgebra):
    """Operators sum_{j, m < i} c_jm (1/p^m!)d^(p^m)/dx_j^(p^m) whose
    restrictions to W_{i-1} lie in F and generate it.

    Symbols are ordered by height, highest first, so the RREF of the
    admissible combinations has pivots on the new top-height symbols; those
    rows are the lifts.  Returns None when symbols alone do not reach F.
    """
    spec = alg.tower.spec
    p = spec.p
    N = spec.num_vars
    fr = F.frame
    syms = [symbol(spec, j, p**m) for m in reversed(range(i)) for j in range(1, N + 1)]
    target = F.value_space()
    res = [target.residual([apply(S, b) for b in fr.elements]) for S in syms]
    combos = linalg.left_kernel(spec, res, fr.size)
    sub = linalg.Subspace.span(spec, len(syms), combos)
    out = []
    for row, piv in zip(sub.rows, sub.pivots):
        if piv >= N:
            continue
        D = DiffOperator.zero(spec)
        for c, S in zip(row, syms):
            if not c.is_zero():
                D = D + S.scale(c)
        out.append(D)
    vals = [[apply(D, b) for b in fr.elements] for D in out]
    if linalg.Subspace.span(spec, fr.size, vals) != target:
        return None
    return out


def unpack(alg: OperatorAlgebra, expected: JacobsonSequence | None = None) -> JacobsonSequence:
    """Recover the Jacobson sequence from the operator algebra.

    Level 1: the order <= 1 augmented part of D_1, as derivations of K.
    Level i > 1: restrictions of D_i to W_{i-1}, intersected with Der(W_{i-1}).
    """
    t = alg.tower
    spec = t.spec
    N = spec.num_vars
    algebras = []
    lifts = []
    for i in range(1, t.depth + 1):
        W = t.levels[i - 1]
        fr = W.frame()
        if i == 1:
            if [str(a) for a in fr.a] != [str(x) for x in spec.gens()]:
                raise TowerlabError("the p-basis of K must be the coordinates")
            derivs = [symbol(spec, j, 1).vector(1) for j in range(1, N + 1)]
            res = [alg.spaces[1].residual(v) for v in derivs]
            combos = linalg.left_kernel(spec, res, len(res[0]))
            coords = linalg.Subspace.span(spec, N, combos)
        else:
            vals = [[apply(D, b) for b in fr.elements] for D in alg.per_level_basis[i]]
            V = linalg.Subspace.span(spec, fr.size, vals)
            T = [fr.derivation_values(u) for u in linalg.unit_vectors(spec, N)]
            res = [V.residual(v) for v in T]
            combos = linalg.left_kernel(spec, res, fr.size)
            coords = linalg.Subspace.span(spec, N, combos)
        F = PLieAlgebra(W, coords)
        algebras.append(F)
        lifts.append(_symbol_lifts(alg, i, F))
    seq = JacobsonSequence(algebras, lifts)
    if expected is None:
        expected = tower_to_sequence(t, certify=False)
    for i, (a, b) in enumerate(zip(seq.algebras, expected.algebras), start=1):
        if not a.same_as(b):
            raise MismatchAtLevel(i)
    return seq


# ---------------------------------------------------------------- extension

def _t_candidates(spec, pres):
    gens = spec.gens()
    out = list(gens)
    for d in range(2, 4):
        for e in itertools.product(range(d + 1), repeat=spec.num_vars):
            if sum(e) == d:
                out.append(spec.monomial(e))
    for g in pres.generators:
        out.append(g)
        for x in gens:
            out.append(g + x)
            out.append(g * x)
    return out


def splitting_check(W1: LeveledSubfield, W2: LeveledSubfield) -> bool:
    """T_{W1/K^p} and T_{W1/W2} are complementary inside Der(W1)."""
    spec = W1.spec
    if W2.level < 1 or W1.level > W2.level:
        return False
    if W2.composite(W1.level).space != W1.space:
        return False
    try:
        T12 = relative_tangent(W1, W2)
    except (NotExponentOne, NotInSubfield):
        return False
    Tp = relative_tangent(W1, coordinate_power_field(spec, 1), check_exponent=False)
    if T12.coords.intersect(Tp.coords).dim:
        return False
    return (T12.coords + Tp.coords).dim == spec.num_vars


def extend_one_foliation(W1: SubfieldPresentation, pool=None):
    """A W2 with W2 * K^p = W1 and [W1 : W2] = [K : W1].

    t's with W1(t) = K come from the candidate pool; t_1^p..t_r^p is
    completed to a p-basis a, t^p of W1 by greedy exchange, and
    W2 = <a, t^(p^2)>.  Returns (presentation, realized W1, realized W2).
    """
    spec = W1.spec
    p = spec.p
    F1 = realize(W1, 1)
    r = _log_p(F1.degree_in_K, p)
    if r is None or r < 1:
        raise PreconditionError("W1 must be a proper subfield containing K^p")
    ts = []
    current = F1
    for c in pool if pool is not None else _t_candidates(spec, W1):
        if len(ts) == r:
            break
        if current.contains(c):
            continue
        trial = realize(SubfieldPresentation(spec, W1.generators + tuple(ts) + (c,)), 1)
        if trial.dim == current.dim * p:
            ts.append(c)
            current = trial
    if len(ts) < r or current.dim != _mbasis(spec, 1).size:
        raise SearchExhausted("no t-set in the candidate pool completes W1 to K")
    tp = [t.frob(1) for t in ts]
    pool_a = tp + list(W1.generators) + [x.frob(1) for x in spec.gens()]
    basis = p_basis(F1, pool_a)
    if basis[: len(tp)] != tp:
        raise SearchExhausted("t^p is not part of a p-basis of W1")
    a = basis[len(tp):]
    W2 = SubfieldPresentation(spec, tuple(a) + tuple(t.frob(2) for t in ts))
    F2 = realize(W2, 2)
    if F2.composite(1).space != F1.space:
        raise TowerlabError("W2 * K^p != W1")
    if field_degree(F1, F2) != p**r:
        raise TowerlabError("[W1 : W2] is not p^r")
    return W2, F1, F2
