"""Expressions and the .twr script language.

Expression grammar (one precedence level per rule, loosest first)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' exponent)?
    exponent:= INT ('^' exponent)?          # right-associative, literal only
    atom    := INT | NAME | NAME '(' args ')' | '(' sum ')'
             | '<' [sum (',' sum)*] '>' | '[' [sum (',' sum)*] ']'
             | 'd[' NAME '^' INT (',' NAME '^' INT)* ']'
    args    := [arg (',' arg)*],  arg := sum | NAME '=' sum

Values are field elements, differential operators (``d[x^1,y^2]``, ``id``;
``*`` between operators composes them), subfield literals ``<g1, g2>``,
lists and results of the script functions.

Script statements, one per line, ``#`` starts a comment::

    field K = GF(2)(x, y)
    subfield W = <x + y^2>
    elem f = x/(x + 1)
    op D = d[y^2] + x * d[x^1]
    tower T = tower(W, depth = 3)          # or levels(<...>, <...>, ...)
    seq S = jacobson(T)                    # or unpack(A)
    alg A = diffalg(T)
    print degrees(T)
    assert unpack(A) == S
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .arith import FieldSpec, MultiPoly, RatFunc, is_prime, print_canonical
from .errors import TowerlabError

# ------------------------------------------------------------------ errors


class ParseError(TowerlabError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class EvalError(TowerlabError):
    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


# ------------------------------------------------------------------ AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: object  # Num or Pow of Nums


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    kwargs: tuple = ()  # ((name, expr), ...)


@dataclass(frozen=True)
class SubLit:
    items: tuple


@dataclass(frozen=True)
class ListLit:
    items: tuple


@dataclass(frozen=True)
class DSym:
    exps: tuple  # ((var, a), ...)


Expr = object

# ------------------------------------------------------------------ lexer

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>==|!=|[-+*/^(),<>\[\]=]))"
)


@dataclass
class Tok:
    kind: str  # int, name, op, end
    text: str
    column: int  # 1-based


def tokenize(src: str, line=1) -> list:
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ParseError(f"unexpected character {src[col - 1]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(Tok(kind, m.group(kind), start + 1))
        pos = m.end()
    toks.append(Tok("end", "", len(src) + 1))
    return toks


# ------------------------------------------------------------------ parser


class _Parser:
    def __init__(self, src, line, variables, names, functions):
        self.toks = tokenize(src, line)
        self.i = 0
        self.line = line
        self.variables = set(variables)
        self.names = names  # bound script names (set) or None
        self.functions = functions

    # helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        if tok.kind == "end" and self.i > 0:
            prev = self.toks[self.i - 1]
            raise ParseError(f"{msg} after {prev.text!r}", self.line, prev.column)
        raise ParseError(msg, self.line, tok.column)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            self.error(f"expected {text!r}, found {found}")

    def expect_name(self):
        if self.tok.kind != "name":
            self.error("expected a name")
        t = self.tok.text
        self.i += 1
        return t

    def expect_int(self):
        if self.tok.kind != "int":
            if self.tok.kind == "op" and self.tok.text == "-":
                self.error("negative exponent")
            self.error("expected an integer")
        v = int(self.tok.text)
        self.i += 1
        return v

    def at_end(self):
        return self.tok.kind == "end"

    def finish(self):
        if not self.at_end():
            self.error(f"unexpected {self.tok.text!r}")

    # grammar
    def sum(self):
        left = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-" and self.tok.text:
            op = self.tok.text
            self.i += 1
            left = Bin(op, left, self.product())
        return left

    def product(self):
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            left = Bin(op, left, self.unary())
        return left

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        v = Num(self.expect_int())
        if self.accept("^"):
            return Pow(v, self.exponent())
        return v

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Num(int(tok.text))
        if tok.kind == "name":
            name = tok.text
            nxt = self.toks[self.i + 1]
            if name == "d" and nxt.kind == "op" and nxt.text == "[" and nxt.column == tok.column + 1 and "d" not in self.variables:
                self.i += 2
                return self.dsym()
            self.i += 1
            if self.accept("("):
                if name not in self.functions:
                    self.error(f"unknown function {name!r}", tok)
                return self.call(name)
            if name in self.variables or name == "id" or (self.names is not None and name in self.names):
                return Name(name)
            self.error(f"unknown identifier {name!r}", tok)
        if tok.kind == "op":
            if tok.text == "(":
                self.i += 1
                e = self.sum()
                self.expect(")")
                return e
            if tok.text == "<":
                self.i += 1
                return SubLit(self.items(">"))
            if tok.text == "[":
                self.i += 1
                return ListLit(self.items("]"))
        if tok.kind == "end":
            self.error("expected an operand")
        self.error(f"unexpected {tok.text!r}")

    def items(self, close):
        out = []
        if self.accept(close):
            return tuple(out)
        while True:
            out.append(self.sum())
            if self.accept(close):
                return tuple(out)
            self.expect(",")

    def dsym(self):
        exps = []
        while True:
            tok = self.tok
            var = self.expect_name()
            if var not in self.variables:
                self.error(f"unknown variable {var!r} in symbol", tok)
            self.expect("^")
            exps.append((var, self.expect_int()))
            if self.accept("]"):
                return DSym(tuple(exps))
            self.expect(",")

    def call(self, name):
        args, kwargs = [], []
        if self.accept(")"):
            return Call(name, (), ())
        while True:
            nxt = self.toks[self.i + 1]
            if self.tok.kind == "name" and nxt.kind == "op" and nxt.text == "=":
                key = self.expect_name()
                self.expect("=")
                kwargs.append((key, self.sum()))
            else:
                if kwargs:
                    self.error("positional argument after keyword argument")
                args.append(self.sum())
            if self.accept(")"):
                return Call(name, tuple(args), tuple(kwargs))
            self.expect(",")


EXPR_FUNCTIONS = {"frob"}


def parse_expr(src: str, spec: FieldSpec, line: int = 1) -> Expr:
    """Parse a field-element expression over the variables of spec."""
    p = _Parser(src, line, spec.var_names, None, EXPR_FUNCTIONS)
    e = p.sum()
    p.finish()
    _check_frob(e, line)
    return e


def _check_frob(e, line):
    for node in _walk(e):
        if isinstance(node, Call) and node.func == "frob":
            if len(node.args) != 2 or node.kwargs or not isinstance(node.args[1], Num):
                raise ParseError("frob takes (expression, integer literal)", line, 1)


def _walk(e):
    yield e
    if isinstance(e, Neg):
        yield from _walk(e.operand)
    elif isinstance(e, (Bin,)):
        yield from _walk(e.left)
        yield from _walk(e.right)
    elif isinstance(e, Pow):
        yield from _walk(e.base)
    elif isinstance(e, Call):
        for a in e.args:
            yield from _walk(a)
        for _, a in e.kwargs:
            yield from _walk(a)
    elif isinstance(e, (SubLit, ListLit)):
        for a in e.items:
            yield from _walk(a)


# ------------------------------------------------------------------ printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e):
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def print_expr(e) -> str:
    """Text that parses back to the same tree (minimal parentheses)."""

    def wrap(x, level):
        s = print_expr(x)
        return f"({s})" if _prec(x) < level else s

    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Neg):
        return "-" + wrap(e.operand, 3)
    if isinstance(e, Bin):
        lvl = _PREC[e.op]
        return f"{wrap(e.left, lvl)} {e.op} {wrap(e.right, lvl + 1)}"
    if isinstance(e, Pow):
        return f"{wrap(e.base, 5)}^{print_expr(e.exponent)}"
    if isinstance(e, Call):
        parts = [print_expr(a) for a in e.args] + [f"{k} = {print_expr(v)}" for k, v in e.kwargs]
        return f"{e.func}({', '.join(parts)})"
    if isinstance(e, SubLit):
        return "<" + ", ".join(print_expr(a) for a in e.items) + ">"
    if isinstance(e, ListLit):
        return "[" + ", ".join(print_expr(a) for a in e.items) + "]"
    if isinstance(e, DSym):
        return "d[" + ",".join(f"{v}^{a}" for v, a in e.exps) + "]"
    raise TypeError(f"not an expression node: {e!r}")


# ------------------------------------------------------------------ evaluation


def _int_value(e, line=None) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Pow):
        return _int_value(e.base, line) ** _int_value(e.exponent, line)
    raise EvalError("expected an integer literal", line)


def eval_expr(e, spec: FieldSpec, env=None, line=None, call=None):
    """Evaluate to a RatFunc (or an operator, for operator expressions).

    ``call`` evaluates function calls other than frob (script functions).
    """
    from .arith import pth_power
    from .diffops import DiffOperator, compose, power

    env = env or {}

    def ev(x):
        return eval_expr(x, spec, env, line, call)

    def as_op(v):
        return v if isinstance(v, DiffOperator) else DiffOperator.multiplication(v)

    if isinstance(e, Num):
        return spec.const(e.value)
    if isinstance(e, Name):
        if e.name in spec.var_names:
            return spec.var(spec.var_names.index(e.name))
        if e.name in env:
            return env[e.name]
        if e.name == "id":
            return DiffOperator.identity(spec)
        raise EvalError(f"unbound name {e.name!r}", line)
    if isinstance(e, DSym):
        exps = [0] * spec.num_vars
        for v, a in e.exps:
            exps[spec.var_names.index(v)] += a
        return DiffOperator(spec, {tuple(exps): spec.one()})
    if isinstance(e, Neg):
        v = ev(e.operand)
        return -v
    if isinstance(e, Bin):
        a, b = ev(e.left), ev(e.right)
        ops = isinstance(a, DiffOperator) or isinstance(b, DiffOperator)
        if not ops:
            _need_elements(a, b, line)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            try:
                return a / b
            except ZeroDivisionError:
                raise EvalError("division by zero in K", line) from None
        if e.op == "+":
            return as_op(a) + as_op(b)
        if e.op == "-":
            return as_op(a) - as_op(b)
        if e.op == "*":
            if isinstance(a, RatFunc):
                return b.scale(a)
            return compose(as_op(a), as_op(b))
        raise EvalError("operators cannot be divided", line)
    if isinstance(e, Pow):
        base = ev(e.base)
        k = _int_value(e.exponent, line)
        if isinstance(base, DiffOperator):
            return power(base, k)
        _need_elements(base, base, line)
        return base**k
    if isinstance(e, Call) and e.func == "frob":
        return pth_power(ev(e.args[0]), _int_value(e.args[1], line))
    if isinstance(e, Call) and call is not None:
        v = call(e)
        if isinstance(v, int) and not isinstance(v, bool):
            return spec.const(v)
        return v
    raise EvalError(f"cannot evaluate {print_expr(e)} as an element", line)


def _need_elements(a, b, line):
    if not (isinstance(a, RatFunc) and isinstance(b, RatFunc)):
        raise EvalError("arithmetic needs field elements or operators", line)


# ------------------------------------------------------------------ scripts

STATEMENT_KINDS = ("field", "subfield", "elem", "op", "tower", "seq", "alg", "print", "assert")

SCRIPT_FUNCTIONS = {
    "frob", "tower", "levels", "jacobson", "sequence", "diffalg", "unpack", "annihilators",
    "degrees", "dims", "ranks", "profile", "probe", "extend", "splits", "valid",
    "apply", "compose", "order", "augmented", "symbol", "member",
}


@dataclass(frozen=True)
class Statement:
    kind: str
    name: str | None
    value: object  # AST, or FieldSpec for 'field'; for assert: (op, lhs, rhs) or (None, expr, None)
    line: int = field(default=0, compare=False)


@dataclass
class Script:
    statements: list
    spec: FieldSpec | None = None

    def __len__(self):
        return len(self.statements)


_FIELD_RE = re.compile(
    r"^\s*field\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*GF\(\s*(\d+)\s*\)\s*\(\s*([^)]*)\)\s*$"
)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_script(src: str) -> Script:
    """Parse and statically check a script (names bound before use)."""
    spec = None
    bound = set()
    out = []
    for lineno, raw in enumerate(src.splitlines(), start=1):
        text = _strip_comment(raw)
        if not text.strip():
            continue
        head = text.lstrip()
        indent = len(text) - len(head)
        kw = head.split(None, 1)[0] if head.split() else ""
        if kw not in STATEMENT_KINDS:
            raise ParseError(f"unknown statement {kw!r}", lineno, indent + 1)
        if kw == "field":
            if spec is not None:
                raise ParseError("the field is already declared", lineno, indent + 1)
            m = _FIELD_RE.match(text)
            if not m:
                raise ParseError("expected: field NAME = GF(p)(x, y, ...)", lineno, indent + 1)
            p = int(m.group(2))
            names = tuple(v.strip() for v in m.group(3).split(",") if v.strip())
            if not is_prime(p):
                raise ParseError(f"{p} is not prime", lineno, m.start(2) + 1)
            try:
                spec = FieldSpec(p, names)
            except TowerlabError as exc:
                raise ParseError(str(exc), lineno, indent + 1) from None
            bound.add(m.group(1))
            out.append(Statement("field", m.group(1), spec, lineno))
            continue
        if spec is None:
            raise ParseError("declare the field first", lineno, indent + 1)
        rest = text[indent + len(kw):]
        offset = indent + len(kw)
        if kw in ("print", "assert"):
            value = _parse_value_line(rest, offset, lineno, spec, bound, allow_compare=(kw == "assert"))
            out.append(Statement(kw, None, value, lineno))
            continue
        m = re.match(r"^(\s*)([A-Za-z_][A-Za-z0-9_]*)(\s*)=", rest)
        if not m:
            raise ParseError(f"expected: {kw} NAME = ...", lineno, offset + 1)
        name = m.group(2)
        if name in spec.var_names or name in SCRIPT_FUNCTIONS or name in ("d", "id"):
            raise ParseError(f"{name!r} is reserved", lineno, offset + m.start(2) + 1)
        if name in bound:
            raise ParseError(f"{name!r} is already bound", lineno, offset + m.start(2) + 1)
        value = _parse_value_line(rest[m.end():], offset + m.end(), lineno, spec, bound, False)
        _check_binding_shape(kw, value, lineno, offset + m.end() + 1)
        bound.add(name)
        out.append(Statement(kw, name, value, lineno))
    return Script(out, spec)


_SHAPES = {
    "subfield": (SubLit,),
    "tower": ("tower", "levels", "annihilators"),
    "seq": ("jacobson", "sequence", "unpack"),
    "alg": ("diffalg",),
}


def _check_binding_shape(kw, value, line, col):
    if kw == "subfield":
        if not isinstance(value, SubLit) and not (isinstance(value, Call) and value.func == "extend"):
            raise ParseError("subfield needs <...> or extend(...)", line, col)
    elif kw in ("tower", "seq", "alg"):
        if not (isinstance(value, Call) and value.func in _SHAPES[kw]):
            raise ParseError(f"{kw} needs one of {', '.join(_SHAPES[kw])}(...)", line, col)


def _parse_value_line(text, offset, line, spec, bound, allow_compare):
    pad = " " * offset
    parser = _Parser(pad + text, line, spec.var_names, bound, SCRIPT_FUNCTIONS)
    if parser.at_end():
        parser.error("expected a value")
    lhs = parser.sum()
    if allow_compare:
        for op in ("==", "!="):
            if parser.accept(op):
                rhs = parser.sum()
                parser.finish()
                return (op, lhs, rhs)
        parser.finish()
        return (None, lhs, None)
    parser.finish()
    return lhs


def print_script(script: Script) -> str:
    lines = []
    for st in script.statements:
        if st.kind == "field":
            spec = st.value
            lines.append(f"field {st.name} = GF({spec.p})({', '.join(spec.var_names)})")
        elif st.kind in ("print",):
            lines.append(f"print {print_expr(st.value)}")
        elif st.kind == "assert":
            op, lhs, rhs = st.value
            if op is None:
                lines.append(f"assert {print_expr(lhs)}")
            else:
                lines.append(f"assert {print_expr(lhs)} {op} {print_expr(rhs)}")
        else:
            lines.append(f"{st.kind} {st.name} = {print_expr(st.value)}")
    return "\n".join(lines) + "\n"


__all__ = [
    "ParseError", "EvalError", "Num", "Name", "Neg", "Bin", "Pow", "Call", "SubLit",
    "ListLit", "DSym", "tokenize", "parse_expr", "print_expr", "eval_expr",
    "print_canonical", "parse_script", "print_script", "Script", "Statement",
    "MultiPoly",
]
