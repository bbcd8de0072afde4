import pytest

from towerlab.arith import FieldSpec
from towerlab.dsl import (
    Bin,
    Call,
    DSym,
    EvalError,
    Name,
    Num,
    ParseError,
    Pow,
    eval_expr,
    parse_expr,
    parse_script,
    print_expr,
    print_script,
)
from towerlab.diffops import DiffOperator, symbol

from conftest import E

TUTORIAL = """\
field K = GF(2)(x, y)
subfield W = <x + y^2>
tower T = tower(W, depth = 3)
print degrees(T)
seq S = jacobson(T)
alg A = diffalg(T)
assert unpack(A) == S
"""


def test_frob_expression(F3):
    e = parse_expr("frob(x + y, 2)", F3)
    assert e == Call("frob", (Bin("+", Name("x"), Name("y")), Num(2)), ())
    assert eval_expr(e, F3) == E(F3, "x^9 + y^9")


def test_incomplete_expression_position(F3):
    with pytest.raises(ParseError) as exc:
        parse_expr("1/(x+", F3)
    assert (exc.value.line, exc.value.column) == (1, 5)
    assert str(exc.value).startswith("line 1, column 5:")


@pytest.mark.parametrize("src,col", [("x^-1", 3), ("z + 1", 1), ("x y", 3), ("", 1), ("(x", 2)])
def test_parse_errors_carry_positions(F3, src, col):
    with pytest.raises(ParseError) as exc:
        parse_expr(src, F3)
    assert exc.value.line == 1 and exc.value.column == col


def test_unknown_identifier_message(F3):
    with pytest.raises(ParseError, match="unknown identifier 'z'"):
        parse_expr("z", F3)


def test_evaluation_examples(F2, F3):
    assert eval_expr(parse_expr("x/x", F3), F3) == F3.one()
    assert eval_expr(parse_expr("(x+y)^2", F2), F2) == E(F2, "x^2 + y^2")
    with pytest.raises(EvalError, match="division by zero"):
        eval_expr(parse_expr("1/0", F3), F3)
    with pytest.raises(EvalError):
        eval_expr(parse_expr("1/(x - x)", F3), F3)


def test_operator_expressions(F3):
    e = parse_expr("d[x^2] * x", F3)
    assert isinstance(e.left, DSym)
    D = eval_expr(e, F3)
    assert D == symbol(F3, 1, 1) + symbol(F3, 1, 2).scale(E(F3, "x"))
    sq = eval_expr(parse_expr("d[y^3]^2", F3), F3)
    assert sq == eval_expr(parse_expr("d[y^3] * d[y^3]", F3), F3)
    # (1/3!)^2 d^6 = binom(6, 3) (1/6!) d^6 = 20 d[y^6] = 2 d[y^6] over F_3
    assert sq == symbol(F3, 2, 6).scale(F3.const(2))


def test_print_expr_minimal_parens(F3):
    for src, out in [("(x + y)^2", "(x + y)^2"), ("x + (y * x)", "x + y * x"),
                     ("x - (y - 1)", "x - (y - 1)"), ("-(x^2)", "-x^2"), ("(-x)^2", "(-x)^2")]:
        assert print_expr(parse_expr(src, F3)) == out
        assert parse_expr(out, F3) == parse_expr(src, F3)


def test_power_is_right_associative(F3):
    assert parse_expr("x^2^2", F3) == Pow(Name("x"), Pow(Num(2), Num(2)))


def test_tutorial_script():
    s = parse_script(TUTORIAL)
    assert s.spec == FieldSpec(2, ("x", "y"))
    assert [st.kind for st in s.statements] == ["field", "subfield", "tower", "print", "seq", "alg", "assert"]
    tower = s.statements[2]
    assert tower.value == Call("tower", (Name("W"),), (("depth", Num(3)),))
    assert print_script(s) == TUTORIAL
    assert parse_script(print_script(s)).statements == s.statements


def test_levels_tower():
    s = parse_script("field K = GF(2)(x, y)\ntower T = levels(<x, y^2>, <x, y^4>)\n")
    assert s.statements[1].value.func == "levels"


@pytest.mark.parametrize("src,line,msg", [
    ("field K = GF(2)(x, y)\nfield K = GF(3)(x)\n", 2, "already declared"),
    ("field K = GF(2)(x, y)\nsubfield W = <x>\nsubfield W = <y>\n", 3, "already bound"),
    ("field K = GF(2)(x, y)\ntower T = <x>\n", 2, "tower needs"),
    ("field K = GF(4)(x)\n", 1, "not prime"),
])
def test_script_errors(src, line, msg):
    with pytest.raises(ParseError, match=msg) as exc:
        parse_script(src)
    assert exc.value.line == line


def test_comments_and_blank_lines():
    s = parse_script("# header\n\nfield K = GF(3)(x)  # the field\nelem f = x^2 # square\n")
    assert [st.line for st in s.statements] == [3, 4]
    assert s.statements[1].name == "f"
