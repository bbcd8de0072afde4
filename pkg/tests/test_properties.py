"""Algebraic invariants checked on generated inputs."""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from towerlab.arith import FieldSpec, binom_mod_p, print_canonical, pth_power, pth_root
from towerlab.diffops import DiffOperator, apply, compose
from towerlab.dsl import ParseError, eval_expr, parse_expr, print_expr
from towerlab.frobenius import decompose, recompose
from towerlab import linalg

SPECS = {p: FieldSpec(p, ("x", "y")) for p in (2, 3, 5)}
primes = st.sampled_from(sorted(SPECS))
FAST = settings(max_examples=60, deadline=None)


def polys(spec, max_deg=4, max_terms=4):
    term = st.tuples(st.tuples(*[st.integers(0, max_deg)] * spec.num_vars), st.integers(1, spec.p - 1))

    def build(terms):
        f = spec.zero()
        for e, c in terms:
            f = f + spec.const(c) * spec.monomial(e)
        return f

    return st.lists(term, max_size=max_terms).map(build)


@st.composite
def elements(draw, spec, nonzero=False):
    num = draw(polys(spec))
    den = draw(polys(spec, max_deg=2, max_terms=2))
    if den.is_zero():
        den = spec.one()
    f = num / den
    if nonzero and f.is_zero():
        f = spec.one()
    return f


@st.composite
def field_and(draw, n=1, nonzero=False):
    spec = SPECS[draw(primes)]
    return (spec, *[draw(elements(spec, nonzero)) for _ in range(n)])


@st.composite
def operators(draw, spec, height=1):
    q = spec.p**height
    coeffs = {}
    for _ in range(draw(st.integers(0, 3))):
        e = draw(st.tuples(*[st.integers(0, q - 1)] * spec.num_vars))
        coeffs[e] = draw(elements(spec))
    return DiffOperator(spec, {e: c for e, c in coeffs.items() if not c.is_zero()})


@FAST
@given(field_and(2))
def test_frobenius_is_additive_and_multiplicative(args):
    spec, f, g = args
    assert pth_power(f + g, 1) == pth_power(f, 1) + pth_power(g, 1)
    assert pth_power(f * g, 1) == pth_power(f, 1) * pth_power(g, 1)


@FAST
@given(field_and(1), st.integers(0, 2))
def test_pth_root_inverts_power(args, m):
    spec, f = args
    assert pth_root(pth_power(f, m), m) == f


@FAST
@given(field_and(1), st.integers(1, 2))
def test_decompose_round_trip(args, h):
    spec, f = args
    assert recompose(decompose(f, h)) == f


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 400), st.integers(0, 400), primes)
def test_lucas_matches_factorial_binomials(b, a, p):
    assert binom_mod_p(b, a, p) == math.comb(b, a) % p


@FAST
@given(st.data())
def test_apply_compose_associative(data):
    spec = SPECS[data.draw(st.sampled_from([2, 3]))]
    D1 = data.draw(operators(spec))
    D2 = data.draw(operators(spec))
    D3 = data.draw(operators(spec))
    f = data.draw(elements(spec))
    assert apply(compose(D1, D2), f) == apply(D1, apply(D2, f))
    assert compose(compose(D1, D2), D3) == compose(D1, compose(D2, D3))


@FAST
@given(st.data())
def test_operators_are_linear_over_p_powers(data):
    spec = SPECS[data.draw(st.sampled_from([2, 3]))]
    D = data.draw(operators(spec))
    u, f, g = (data.draw(elements(spec)) for _ in range(3))
    up = pth_power(u, 1)
    assert apply(D, up * f + g) == up * apply(D, f) + apply(D, g)


@st.composite
def matrices(draw, ncols=4):
    spec = SPECS[draw(primes)]
    rows = draw(st.lists(st.lists(polys(spec, max_deg=2, max_terms=2), min_size=ncols, max_size=ncols),
                         max_size=5))
    return spec, rows


@FAST
@given(matrices())
def test_rank_nullity(args):
    spec, rows = args
    r = linalg.rank(spec, rows, 4)
    assert r + linalg.kernel(spec, rows, 4).dim == 4


@FAST
@given(matrices(), matrices())
def test_modular_law(a, b):
    spec, rows = a
    _, other = b
    other = [[_rebase(spec, c) for c in r] for r in other]
    U = linalg.Subspace.span(spec, 4, rows)
    V = linalg.Subspace.span(spec, 4, other)
    assert (U + V).dim + U.intersect(V).dim == U.dim + V.dim


def _rebase(spec, c):
    # the second matrix may come from another prime; reread it over spec
    return eval_expr(parse_expr(print_canonical(c), spec), spec)


NAMES = ("x", "y")


@st.composite
def expr_text(draw, depth=3):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.sampled_from(["x", "y", "1", "2", "0"]))
    kind = draw(st.sampled_from(["bin", "neg", "pow", "frob", "paren"]))
    if kind == "bin":
        op = draw(st.sampled_from(["+", "-", "*", "/"]))
        return f"{draw(expr_text(depth - 1))} {op} {draw(expr_text(depth - 1))}"
    if kind == "neg":
        return f"-{draw(expr_text(depth - 1))}"
    if kind == "pow":
        return f"({draw(expr_text(depth - 1))})^{draw(st.integers(0, 4))}"
    if kind == "frob":
        return f"frob({draw(expr_text(depth - 1))}, {draw(st.integers(0, 2))})"
    return f"({draw(expr_text(depth - 1))})"


@settings(max_examples=200, deadline=None)
@given(expr_text(), primes)
def test_print_parse_round_trip(src, p):
    spec = SPECS[p]
    e = parse_expr(src, spec)
    printed = print_expr(e)
    assert parse_expr(printed, spec) == e
    assert print_expr(parse_expr(printed, spec)) == printed


@FAST
@given(field_and(1))
def test_canonical_print_round_trip(args):
    spec, f = args
    text = print_canonical(f)
    assert eval_expr(parse_expr(text, spec), spec) == f


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="xyz0123456789+-*/^()<>[],. d", max_size=20))
def test_parser_never_crashes(src):
    spec = SPECS[3]
    try:
        parse_expr(src, spec)
    except ParseError as exc:
        assert exc.line == 1 and 1 <= exc.column <= len(src) + 1
