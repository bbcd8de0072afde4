"""Exact arithmetic in F_p, F_p[x_1..x_N] and K = F_p(x_1..x_N).

Polynomials are stored as python-flint ``nmod_mpoly`` objects under the
graded lexicographic order; this module adds the field of fractions with a
canonical normal form, Frobenius powers and roots, and Lucas binomials.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import flint

from .errors import NotAPower, SpecMismatch, TowerlabError

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_RESERVED = {"frob", "GF"}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


@functools.lru_cache(maxsize=None)
def _context(p, names):
    return flint.nmod_mpoly_ctx.get(names, modulus=p, ordering="deglex")


@dataclass(frozen=True)
class FieldSpec:
    """The function field F_p(var_names)."""

    p: int
    var_names: tuple

    def __post_init__(self):
        object.__setattr__(self, "var_names", tuple(self.var_names))
        if not is_prime(self.p) or not 2 <= self.p <= 17:
            raise TowerlabError(f"p must be a prime in [2, 17], got {self.p}")
        if len(self.var_names) < 1:
            raise TowerlabError("need at least one variable")
        if len(set(self.var_names)) != len(self.var_names):
            raise TowerlabError(f"variable names must be distinct: {self.var_names}")
        for name in self.var_names:
            if not _IDENT.match(name) or name in _RESERVED:
                raise TowerlabError(f"invalid variable name {name!r}")

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def ctx(self):
        return _context(self.p, self.var_names)

    def var(self, i: int) -> "RatFunc":
        """The i-th coordinate, 0-based."""
        return RatFunc.from_poly(self, self.ctx.gens()[i])

    def gens(self) -> list:
        return [self.var(i) for i in range(self.num_vars)]

    def const(self, c: int) -> "RatFunc":
        return RatFunc.from_poly(self, self.ctx.constant(c % self.p))

    def zero(self) -> "RatFunc":
        return self.const(0)

    def one(self) -> "RatFunc":
        return self.const(1)

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> "RatFunc":
        return RatFunc.from_poly(self, self.ctx.from_dict({tuple(exps): coeff % self.p}))

    def __str__(self):
        return f"GF({self.p})({', '.join(self.var_names)})"


@functools.lru_cache(maxsize=None)
def binom_mod_p(b: int, a: int, p: int) -> int:
    """C(b, a) mod p by Lucas' theorem (digit-wise in base p)."""
    b, a = int(b), int(a)
    if a < 0 or b < 0 or a > b:
        return 0
    result = 1
    while a or b:
        bd, ad = b % p, a % p
        if ad > bd:
            return 0
        # small digits: direct product is exact
        num = den = 1
        for t in range(ad):
            num *= bd - t
            den *= t + 1
        result = result * (num // den) % p
        a //= p
        b //= p
    return result


# ---------------------------------------------------------------- polynomials

def _grlex_key(exps):
    return (sum(exps), tuple(exps))


def poly_terms(poly) -> list:
    """(exponent tuple, coefficient) pairs in descending graded-lex order."""
    items = [(tuple(e), int(c)) for e, c in poly.to_dict().items() if int(c)]
    items.sort(key=lambda t: _grlex_key(t[0]), reverse=True)
    return items


def format_poly(poly, names) -> str:
    terms = poly_terms(poly)
    if not terms:
        return "0"
    out = []
    for exps, c in terms:
        factors = []
        for name, e in zip(names, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if c != 1 or not factors:
            factors.insert(0, str(c))
        out.append("*".join(factors))
    return " + ".join(out)


class MultiPoly:
    """Sparse polynomial over F_p attached to a FieldSpec."""

    __slots__ = ("spec", "poly")

    def __init__(self, spec: FieldSpec, poly):
        self.spec = spec
        self.poly = poly

    @classmethod
    def from_terms(cls, spec: FieldSpec, terms: dict) -> "MultiPoly":
        for e in terms:
            if len(e) != spec.num_vars or min(e, default=0) < 0:
                raise TowerlabError(f"bad exponent vector {e}")
        return cls(spec, spec.ctx.from_dict({tuple(e): c % spec.p for e, c in terms.items()}))

    def _check(self, other):
        if not isinstance(other, MultiPoly) or other.spec != self.spec:
            raise SpecMismatch("polynomials over different fields")

    def __add__(self, other):
        self._check(other)
        return MultiPoly(self.spec, self.poly + other.poly)

    def __sub__(self, other):
        self._check(other)
        return MultiPoly(self.spec, self.poly - other.poly)

    def __mul__(self, other):
        self._check(other)
        return MultiPoly(self.spec, self.poly * other.poly)

    def __neg__(self):
        return MultiPoly(self.spec, -self.poly)

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.spec == other.spec and self.poly == other.poly

    def __hash__(self):
        return hash((self.spec, _poly_key(self.poly)))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def terms(self) -> dict:
        return dict(poly_terms(self.poly))

    def total_degree(self) -> int:
        return -1 if self.is_zero() else max(sum(e) for e in self.terms())

    def is_constant(self) -> bool:
        return self.total_degree() <= 0

    def __str__(self):
        return format_poly(self.poly, self.spec.var_names)

    __repr__ = __str__


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    ops = {"add": MultiPoly.__add__, "sub": MultiPoly.__sub__, "mul": MultiPoly.__mul__}
    return ops[op](a, b)


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic gcd; raises when both inputs are zero."""
    a._check(b)
    if a.is_zero() and b.is_zero():
        raise TowerlabError("gcd(0, 0) is undefined")
    g = a.poly.gcd(b.poly)
    return MultiPoly(a.spec, g * _inverse(g.leading_coefficient(), a.spec.p))


def _inverse(c, p):
    return pow(int(c), -1, p)


# ------------------------------------------------------------- rational funcs

class RatFunc:
    """Reduced fraction num/den with den monic under graded-lex order.

    Instances are immutable; equality is structural on the normal form.
    """

    __slots__ = ("spec", "num", "den", "_hash")

    def __init__(self, spec: FieldSpec, num, den=None, *, reduced=False):
        ctx = spec.ctx
        if den is None:
            den = ctx.constant(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not reduced:
            if num.is_zero():
                den = ctx.constant(1)
            elif not den.is_constant():
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
            lc = int(den.leading_coefficient())
            if lc != 1:
                inv = pow(lc, -1, spec.p)
                num = num * inv
                den = den * inv
        self.spec = spec
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_poly(cls, spec, poly):
        return cls(spec, poly, None, reduced=True)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.spec != self.spec:
                raise SpecMismatch("elements of different fields")
            return other
        if isinstance(other, int):
            return self.spec.const(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFunc(self.spec, self.num + other.num, self.den)
        if self.den.is_one():
            return RatFunc(self.spec, self.num * other.den + other.num, other.den, reduced=True)
        if other.den.is_one():
            return RatFunc(self.spec, self.num + other.num * self.den, self.den, reduced=True)
        return RatFunc(self.spec, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.spec, -self.num, self.den, reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return self.spec.zero()
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.spec, self.num * other.num, self.den, reduced=True)
        # cross-cancel keeps intermediate sizes small
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        num = (self.num / g1) * (other.num / g2)
        den = (self.den / g2) * (other.den / g1)
        lc = int(den.leading_coefficient())
        if lc != 1:
            inv = pow(lc, -1, self.spec.p)
            num, den = num * inv, den * inv
        return RatFunc(self.spec, num, den, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero in K")
        return RatFunc(self.spec, self.den, self.num, reduced=False)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.spec, self.num**n, self.den**n, reduced=True)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.spec.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.spec == other.spec and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec.p, self.spec.var_names, _poly_key(self.num), _poly_key(self.den)))
        return self._hash

    def frob(self, m: int = 1) -> "RatFunc":
        return pth_power(self, m)

    def root(self, m: int = 1) -> "RatFunc":
        return pth_root(self, m)

    def derivative(self, i: int) -> "RatFunc":
        return partial_derivative(self, i)

    def numerator(self) -> MultiPoly:
        return MultiPoly(self.spec, self.num)

    def denominator(self) -> MultiPoly:
        return MultiPoly(self.spec, self.den)

    def degree(self) -> int:
        """max(total degree of num, total degree of den)."""
        return max(self.num.total_degree(), self.den.total_degree(), 0)

    def __str__(self):
        return print_canonical(self)

    def __repr__(self):
        return f"RatFunc({print_canonical(self)})"


def _poly_key(poly):
    return tuple(sorted((e, int(c)) for e, c in poly.to_dict().items()))


def _wrap(text, single_factor_ok):
    return text if single_factor_ok else f"({text})"


def print_canonical(f: RatFunc) -> str:
    """Canonical text; ``parse_expr(print_canonical(f))`` evaluates back to f."""
    names = f.spec.var_names
    num = format_poly(f.num, names)
    if f.den.is_one():
        return num
    den = format_poly(f.den, names)
    num_terms = len(f.num)
    den_terms = poly_terms(f.den)
    den_simple = len(den_terms) == 1 and "*" not in den
    return f"{_wrap(num, num_terms == 1)}/{_wrap(den, den_simple)}"


def rat_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(op)


def _frob_poly(poly, q, n):
    return poly.inflate([q] * n) if q > 1 else poly


def pth_power(f: RatFunc, m: int) -> RatFunc:
    """f^(p^m): coefficients are fixed by Frobenius on F_p, exponents scale."""
    if m == 0:
        return f
    q = f.spec.p**m
    n = f.spec.num_vars
    # inflation preserves coprimality and the leading coefficient
    return RatFunc(f.spec, _frob_poly(f.num, q, n), _frob_poly(f.den, q, n), reduced=True)


def _poly_root(poly, q, spec):
    d = poly.to_dict()
    out = {}
    for e, c in d.items():
        if any(ei % q for ei in e):
            return None
        out[tuple(ei // q for ei in e)] = int(c)
    return spec.ctx.from_dict(out)


def pth_root(f: RatFunc, m: int) -> RatFunc:
    """g with g^(p^m) = f, or NotAPower when f is not in K^(p^m)."""
    if m == 0:
        return f
    q = f.spec.p**m
    num = _poly_root(f.num, q, f.spec)
    den = _poly_root(f.den, q, f.spec)
    if num is None or den is None:
        raise NotAPower(f"{f} is not a p^{m}-th power")
    return RatFunc(f.spec, num, den, reduced=True)


def is_pth_power(f: RatFunc, m: int) -> bool:
    try:
        pth_root(f, m)
    except NotAPower:
        return False
    return True


def partial_derivative(f: RatFunc, i: int) -> RatFunc:
    """d f / d x_i (1-based index, as for symbols) by the quotient rule."""
    if not 1 <= i <= f.spec.num_vars:
        raise TowerlabError(f"variable index {i} out of range 1..{f.spec.num_vars}")
    i -= 1
    dn = f.num.derivative(i)
    if f.den.is_one():
        return RatFunc(f.spec, dn, f.den, reduced=True)
    dd = f.den.derivative(i)
    return RatFunc(f.spec, dn * f.den - f.num * dd, f.den * f.den)


def product(items: Iterable[RatFunc], spec: FieldSpec) -> RatFunc:
    out = spec.one()
    for it in items:
        out = out * it
    return out


def rat_sum(spec: FieldSpec, items: Iterable[RatFunc]) -> RatFunc:
    """Sum over the lcm of the denominators, reduced once at the end."""
    items = [f for f in items if not f.num.is_zero()]
    if not items:
        return spec.zero()
    if len(items) == 1:
        return items[0]
    den = spec.ctx.constant(1)
    for f in items:
        if f.den.is_one() or f.den == den:
            continue
        g = den.gcd(f.den)
        den = den * (f.den / g) if not g.is_one() else den * f.den
    num = spec.ctx.constant(0)
    for f in items:
        num = num + (f.num * (den / f.den) if f.den != den else f.num)
    return RatFunc(spec, num, den)


def divided_derivative_poly(poly, e, p):
    """prod_i (1/e_i!) d^{e_i}/dx_i^{e_i} applied to a polynomial (Lucas binomials)."""
    out = {}
    for b, c in poly.to_dict().items():
        k = int(c)
        for bi, ei in zip(b, e):
            if ei > bi:
                k = 0
                break
            k = k * binom_mod_p(bi, ei, p) % p
            if not k:
                break
        if k:
            key = tuple(bi - ei for bi, ei in zip(b, e))
            out[key] = (out.get(key, 0) + k) % p
    return poly.context().from_dict({k: v for k, v in out.items() if v})
