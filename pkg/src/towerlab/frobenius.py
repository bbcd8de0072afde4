"""Monomial bases of K over K^(p^h) and p-basis machinery.

An element f of K has a unique expansion f = sum_b c_b^(p^h) x^b over the
monomials x^b with 0 <= b_i < p^h.  The coefficients c_b are stored as
p^h-th roots so that every stored scalar is an honest element of K with
small degree; a K^(p^h)-linear computation becomes a K-linear computation
on these root vectors.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

from .arith import FieldSpec, RatFunc, binom_mod_p
from .errors import NotInSubfield, PoolInsufficient, TowerlabError
from . import linalg


@dataclass(frozen=True)
class MonomialBasis:
    """Monomials x^b, 0 <= b_i < p^h, indexed in lexicographic order of b."""

    spec: FieldSpec
    level: int

    @property
    def q(self) -> int:
        return self.spec.p**self.level

    @property
    def size(self) -> int:
        return self.q**self.spec.num_vars

    def index(self, exps) -> int:
        q = self.q
        idx = 0
        for e in exps:
            if not 0 <= e < q:
                raise TowerlabError(f"exponent {e} outside [0, {q})")
            idx = idx * q + e
        return idx

    def exponents(self, idx: int) -> tuple:
        q = self.q
        out = []
        for _ in range(self.spec.num_vars):
            idx, r = divmod(idx, q)
            out.append(r)
        return tuple(reversed(out))

    def __iter__(self):
        return iter(itertools.product(range(self.q), repeat=self.spec.num_vars))

    def __len__(self):
        return self.size


@functools.lru_cache(maxsize=None)
def _mbasis(spec, level):
    return MonomialBasis(spec, level)


@dataclass
class VecOverBase:
    """f = sum_b coords[b]^(p^h) * x^b, coordinates stored as roots."""

    spec: FieldSpec
    level: int
    coords: dict = field(default_factory=dict)

    def dense(self) -> list:
        n = _mbasis(self.spec, self.level).size
        out = [self.spec.zero()] * n
        for b, c in self.coords.items():
            out[b] = c
        return out

    @classmethod
    def from_dense(cls, spec, level, vec):
        return cls(spec, level, {i: c for i, c in enumerate(vec) if not c.is_zero()})


@functools.lru_cache(maxsize=200_000)
def root_coords(f: RatFunc, h: int) -> tuple:
    """Dense tuple of root coordinates of f at level h."""
    spec = f.spec
    if h == 0:
        return (f,)
    q = spec.p**h
    n = spec.num_vars
    size = q**n
    ctx = spec.ctx
    if f.num.is_zero():
        return (spec.zero(),) * size
    if f.den.is_one():
        top, den = f.num, None
    else:
        # f = num * den^(q-1) / den^q and den^q has root den
        top, den = f.num * f.den ** (q - 1), f.den
    groups: dict = {}
    for e, c in top.to_dict().items():
        c = int(c)
        if not c:
            continue
        idx = 0
        root = []
        for ei in e:
            d, r = divmod(ei, q)
            idx = idx * q + r
            root.append(d)
        groups.setdefault(idx, {})[tuple(root)] = c
    zero = spec.zero()
    out = [zero] * size
    for idx, terms in groups.items():
        poly = ctx.from_dict(terms)
        out[idx] = RatFunc(spec, poly, den) if den is not None else RatFunc.from_poly(spec, poly)
    return tuple(out)


def decompose(f: RatFunc, h: int) -> VecOverBase:
    if h < 0:
        raise TowerlabError("level must be nonnegative")
    return VecOverBase.from_dense(f.spec, h, root_coords(f, h))


def recompose_dense(spec: FieldSpec, h: int, vec) -> RatFunc:
    mb = _mbasis(spec, h)
    out = spec.zero()
    for idx, c in enumerate(vec):
        if c.is_zero():
            continue
        out = out + c.frob(h) * spec.monomial(mb.exponents(idx))
    return out


def recompose(v: VecOverBase) -> RatFunc:
    mb = _mbasis(v.spec, v.level)
    out = v.spec.zero()
    for idx, c in v.coords.items():
        out = out + c.frob(v.level) * v.spec.monomial(mb.exponents(idx))
    return out


def shift_by_monomial(spec: FieldSpec, h: int, vec, exps) -> list:
    """Root vector of x^exps * f from the root vector of f (exps_i < p^h)."""
    mb = _mbasis(spec, h)
    q = mb.q
    out = [spec.zero()] * mb.size
    gens = spec.gens()
    for idx, c in enumerate(vec):
        if c.is_zero():
            continue
        b = mb.exponents(idx)
        carry = []
        tgt = []
        for bi, ei in zip(b, exps):
            d, r = divmod(bi + ei, q)
            carry.append(d)
            tgt.append(r)
        for g, k in zip(gens, carry):
            if k:
                c = c * g**k
        out[mb.index(tgt)] = c
    return out


def frobenius_vector(spec: FieldSpec, h: int, vec) -> list:
    """Root vector at level h+1 of f^p, given the level-h root vector of f."""
    p = spec.p
    src = _mbasis(spec, h)
    dst = _mbasis(spec, h + 1)
    out = [spec.zero()] * dst.size
    for idx, c in enumerate(vec):
        if c.is_zero():
            continue
        out[dst.index(tuple(p * b for b in src.exponents(idx)))] = c
    return out


# ---------------------------------------------------------- p-independence

def _exponent_box(k, bound):
    return itertools.product(range(bound), repeat=k)


def monomial_products(elems, bound):
    """{e: prod elems^e} for 0 <= e_i < bound."""
    spec_one = None
    out = {}
    for e in _exponent_box(len(elems), bound):
        val = None
        for g, ei in zip(elems, e):
            if ei:
                t = g**ei
                val = t if val is None else val * t
        if val is None:
            if spec_one is None:
                spec_one = (elems[0].spec.one() if elems else None)
            val = spec_one
        out[e] = val
    return out


def p_independent(elems, W) -> bool:
    """Monomials in elems with exponents < p are independent over W^p.

    W is a leveled subfield at level h; W^p is realized at level h+1 as the
    Frobenius image of W's basis.
    """
    elems = list(elems)
    spec = W.spec
    if not elems:
        return True
    for g in elems:
        if not W.contains(g):
            raise NotInSubfield(f"{g} is not in the subfield")
    h = W.level
    L = h + 1
    D = _mbasis(spec, L).size
    W.check_budget(D)
    wp = [frobenius_vector(spec, h, r) for r in W.space.rows]
    b = linalg.EchelonBuilder(spec, D)
    target = len(wp) * spec.p ** len(elems)
    if target > D:
        return False
    for mono in monomial_products(elems, spec.p).values():
        for v in wp:
            vec = _mul_root_vector(spec, L, v, mono)
            if not b.add(vec):
                return False
    return b.rank == target


def _mul_root_vector(spec, L, vec, f):
    """Root vector (level L) of g * f where vec is the root vector of g."""
    g = recompose_dense(spec, L, vec)
    return list(root_coords(g * f, L))


def p_basis(W, candidate_pool) -> list:
    """Greedy maximal p-independent subset of the pool, in pool order."""
    spec = W.spec
    chosen = []
    for g in candidate_pool:
        if len(chosen) == spec.num_vars:
            break
        if g.is_constant():
            continue
        if p_independent(chosen + [g], W):
            chosen.append(g)
    if len(chosen) < spec.num_vars:
        raise PoolInsufficient(
            f"found only {len(chosen)} p-independent elements, need {spec.num_vars}"
        )
    return chosen


class PBasisFrame:
    """A p-basis a of W together with the K^(p^(h+1))-basis w_j^p a^e of W.

    Derivations of W kill W^p, so on this basis they act by the exponent
    rule: d/da_i (w_j^p a^e) = e_i w_j^p a^(e - u_i).  Arbitrary elements of
    W are expanded in the basis through one matrix inversion.
    """

    def __init__(self, W, a=None):
        spec = W.spec
        self.W = W
        self.spec = spec
        self.level = W.level + 1
        L = self.level
        if a is None:
            a = p_basis(W, W.p_basis_pool())
        self.a = list(a)
        N = spec.num_vars
        p = spec.p
        W.check_budget(_mbasis(spec, L).size)
        self.exps = list(itertools.product(range(p), repeat=N))
        monos = monomial_products(self.a, p)
        self.wp = [w.frob(1) for w in W.basis_elements()]
        self.index = []  # (j, e)
        self.elements = []
        vectors = []
        for e in self.exps:
            for j, w in enumerate(self.wp):
                el = w * monos[e]
                self.index.append((j, e))
                self.elements.append(el)
                vectors.append(root_coords(el, L))
        self.space = linalg.Subspace.span(spec, len(vectors[0]), vectors)
        if self.space.dim != len(vectors):
            raise TowerlabError("p-basis frame is not a basis; the p-basis is wrong")
        C = [self.space.coords(v) for v in vectors]
        self._cinv = linalg.inverse(spec, C)
        self._monos = monos
        self._partials = {}

    @property
    def size(self) -> int:
        return len(self.elements)

    def expand(self, w: RatFunc) -> list:
        """Root coefficients lam with w = sum lam_f^(p^L) * element_f."""
        v = root_coords(w, self.level)
        if not self.space.contains(v):
            raise NotInSubfield(f"{w} is not in the carrier field")
        rho = self.space.coords(v)
        return linalg.mat_vec_left(self.spec, rho, self._cinv)

    def partials(self, w: RatFunc) -> list:
        """[dw/da_1, ..., dw/da_N] for w in W."""
        if w in self._partials:
            return self._partials[w]
        spec = self.spec
        N = spec.num_vars
        lam = self.expand(w)
        out = [spec.zero()] * N
        for (j, e), c in zip(self.index, lam):
            if c.is_zero():
                continue
            coef = c.frob(self.level) * self.wp[j]
            for i in range(N):
                if e[i]:
                    lower = list(e)
                    lower[i] -= 1
                    out[i] = out[i] + coef * e[i] * self._monos[tuple(lower)]
        self._partials[w] = out
        return out

    def derivation_values(self, coords) -> list:
        """Values of sum_i coords_i d/da_i on the frame basis."""
        spec = self.spec
        out = []
        for (j, e) in self.index:
            val = spec.zero()
            for i, c in enumerate(coords):
                if e[i] and not c.is_zero():
                    lower = list(e)
                    lower[i] -= 1
                    val = val + c * e[i] * self._monos[tuple(lower)]
            out.append(val * self.wp[j] if not val.is_zero() else val)
        return out

    def apply_derivation(self, coords, w: RatFunc) -> RatFunc:
        parts = self.partials(w)
        out = self.spec.zero()
        for c, d in zip(coords, parts):
            if not c.is_zero() and not d.is_zero():
                out = out + c * d
        return out


def lucas_product(b, e, p) -> int:
    out = 1
    for bi, ei in zip(b, e):
        out = out * binom_mod_p(bi, ei, p) % p
        if not out:
            return 0
    return out
