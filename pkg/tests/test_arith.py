import math

import pytest

from towerlab.arith import (
    FieldSpec,
    MultiPoly,
    binom_mod_p,
    partial_derivative,
    poly_arith,
    poly_gcd,
    print_canonical,
    pth_power,
    pth_root,
    rat_arith,
)
from towerlab.errors import NotAPower, SpecMismatch, TowerlabError

from conftest import E


def P(spec, text):
    f = E(spec, text)
    assert f.den.is_one()
    return MultiPoly(spec, f.num)


def test_fieldspec_validation():
    with pytest.raises(TowerlabError):
        FieldSpec(4, ("x",))
    with pytest.raises(TowerlabError):
        FieldSpec(19, ("x",))
    with pytest.raises(TowerlabError):
        FieldSpec(2, ("x", "x"))
    with pytest.raises(TowerlabError):
        FieldSpec(2, ())


def test_poly_arith_examples(F2, F3):
    assert poly_arith(P(F2, "x + y"), P(F2, "x + y"), "add").is_zero()
    assert poly_arith(P(F2, "x"), P(F2, "x"), "mul") == P(F2, "x^2")
    assert poly_arith(P(F3, "x + 1"), P(F3, "x + 2"), "mul") == P(F3, "x^2 + 2")


def test_spec_mismatch(F2, F3):
    with pytest.raises(SpecMismatch):
        poly_arith(P(F2, "x"), P(F3, "x"), "add")
    with pytest.raises(SpecMismatch):
        E(F2, "x") + E(F3, "x")


def test_poly_gcd_examples(F2, F3):
    assert poly_gcd(P(F2, "x^2"), P(F2, "x")) == P(F2, "x")
    assert poly_gcd(P(F3, "x + 1"), P(F3, "x + 2")) == P(F3, "1")
    assert poly_gcd(P(F3, "(x + y)^2"), P(F3, "(x + y)*x")) == P(F3, "x + y")
    with pytest.raises(TowerlabError):
        poly_gcd(P(F2, "0"), P(F2, "0"))


def test_rat_arith_examples(F2, F3):
    assert rat_arith(E(F3, "x/y"), E(F3, "y/x"), "mul") == E(F3, "1")
    for spec in (F2, F3):
        assert rat_arith(E(spec, "1/(x + 1)"), E(spec, "x/(x + 1)"), "add") == E(spec, "1")
    assert E(F2, "x/(x + 1)") == E(F2, "(x^2 + x)/(x + 1)^2")
    with pytest.raises(ZeroDivisionError):
        rat_arith(E(F2, "x"), E(F2, "0"), "div")


def test_denominator_normalized(F3):
    f = E(F3, "x/(2*y + 2)")
    assert print_canonical(f) == "2*x/(y + 1)"


def test_binom_examples():
    assert binom_mod_p(3, 3, 3) == 1
    assert binom_mod_p(4, 2, 3) == 0
    assert binom_mod_p(7, 0, 5) == 1
    assert binom_mod_p(2, 5, 3) == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17])
def test_binom_matches_factorial_oracle(p):
    for b in range(51):
        for a in range(b + 1):
            assert binom_mod_p(b, a, p) == math.comb(b, a) % p


def test_partial_derivative_examples(F2, F3):
    assert partial_derivative(E(F2, "y^2"), 2).is_zero()
    assert partial_derivative(E(F3, "y^3 + x*y^3"), 2).is_zero()
    assert partial_derivative(E(F3, "x^2"), 1) == E(F3, "2*x")
    d = partial_derivative(E(F3, "1/x"), 1)
    assert d == E(F3, "-1/x^2")
    assert d * E(F3, "x^2") == E(F3, "-1")


def test_pth_power_examples(F2, F3):
    assert pth_power(E(F2, "x + y"), 1) == E(F2, "x^2 + y^2")
    f = E(F3, "(x + 2)/(y^2 + x)")
    assert pth_power(f, 0) == f
    assert pth_power(E(F2, "x/(x + 1)"), 1) == E(F2, "x^2/(x^2 + 1)")


def test_pth_root_examples(F2, F3):
    assert pth_root(E(F2, "x^2"), 1) == E(F2, "x")
    with pytest.raises(NotAPower):
        pth_root(E(F2, "x"), 1)
    f = E(F3, "(x*y + 2)/(y + 1)")
    assert pth_root(pth_power(f, 2), 2) == f


def test_print_canonical_examples(F3):
    assert print_canonical(E(F3, "1")) == "1"
    assert print_canonical(E(F3, "x^2 + y")) == "x^2 + y"
    assert print_canonical(E(F3, "0")) == "0"
