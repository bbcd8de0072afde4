"""Execution of parsed scripts and the report format shared with the CLI."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import diffops, jacobson, subfields
from .arith import RatFunc, print_canonical
from .diffops import DiffOperator, OperatorAlgebra, render
from .dsl import Call, EvalError, ListLit, Name, Num, Script, SubLit, eval_expr, print_expr
from .errors import BudgetExceeded, TowerlabError
from .jacobson import JacobsonSequence
from .subfields import PowerTower, SubfieldPresentation

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

# Subfield bindings are compared through their realizations at this level.
SUBFIELD_COMPARE_LEVEL = 2


@dataclass
class Check:
    name: str
    status: str
    witness: object = None
    seconds: float = 0.0

    def to_dict(self):
        return {"name": self.name, "status": self.status, "witness": self.witness,
                "seconds": round(self.seconds, 3)}


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    output: list = field(default_factory=list)  # printed values (json-able)
    error: str | None = None

    @property
    def failed(self) -> bool:
        return any(c.status == FAIL for c in self.checks)

    @property
    def skipped(self) -> bool:
        return any(c.status == SKIP for c in self.checks)

    def exit_code(self) -> int:
        if self.failed:
            return 1
        if self.skipped:
            return 3
        return 0

    def to_dict(self):
        return {
            "title": self.title,
            "output": self.output,
            "checks": [c.to_dict() for c in self.checks],
            "error": self.error,
            "exit_code": self.exit_code(),
        }

    def human(self) -> str:
        lines = [f"== {self.title}"]
        for item in self.output:
            lines.append(f"{item['expr']} = {_human(item['value'])}")
        for c in self.checks:
            line = f"[{c.status}] {c.name}"
            if c.witness is not None and c.status != PASS:
                line += f"  ({_human(c.witness)})"
            lines.append(line)
        if self.error:
            lines.append(f"error: {self.error}")
        return "\n".join(lines)


def _human(v):
    if isinstance(v, list):
        return "[" + ", ".join(_human(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_human(x)}" for k, x in v.items()) + "}"
    return str(v)


# ----------------------------------------------------------------- values


def to_json(v):
    """JSON-able rendering of a script value."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, RatFunc):
        return print_canonical(v)
    if isinstance(v, DiffOperator):
        return render(v)
    if isinstance(v, SubfieldPresentation):
        return str(v)
    if isinstance(v, (PowerTower, JacobsonSequence, OperatorAlgebra)):
        return v.to_dict()
    if isinstance(v, (list, tuple)):
        return [to_json(x) for x in v]
    if isinstance(v, dict):
        return {str(k): to_json(x) for k, x in v.items()}
    return str(v)


def values_equal(a, b):
    """Equality of script values; returns (equal, witness)."""
    if isinstance(a, PowerTower) and isinstance(b, PowerTower):
        if a.depth != b.depth:
            return False, f"depths {a.depth} and {b.depth}"
        for n, (x, y) in enumerate(zip(a.levels, b.levels)):
            if x.space != y.space:
                return False, f"levels differ at W_{n}"
        return True, None
    if isinstance(a, JacobsonSequence) and isinstance(b, JacobsonSequence):
        lvl = a.mismatch_level(b)
        return (lvl is None), (None if lvl is None else f"algebras differ at level {lvl}")
    if isinstance(a, OperatorAlgebra) and isinstance(b, OperatorAlgebra):
        if a.dims != b.dims:
            return False, f"dims {a.dims} and {b.dims}"
        for n, (x, y) in enumerate(zip(a.spaces, b.spaces)):
            if x != y:
                return False, f"D_{n} differ"
        return True, None
    if isinstance(a, SubfieldPresentation) and isinstance(b, SubfieldPresentation):
        x = subfields.realize(a, SUBFIELD_COMPARE_LEVEL)
        y = subfields.realize(b, SUBFIELD_COMPARE_LEVEL)
        return x.space == y.space, None if x.space == y.space else f"{a} != {b}"
    if isinstance(a, RatFunc) and isinstance(b, int) and not isinstance(b, bool):
        b = a.spec.const(b)
    if isinstance(b, RatFunc) and isinstance(a, int) and not isinstance(a, bool):
        a = b.spec.const(a)
    if isinstance(a, DiffOperator) and isinstance(b, (RatFunc, int)) and not isinstance(b, bool):
        b = DiffOperator.multiplication(b if isinstance(b, RatFunc) else a.spec.const(b))
    if isinstance(b, DiffOperator) and isinstance(a, (RatFunc, int)) and not isinstance(a, bool):
        a = DiffOperator.multiplication(a if isinstance(a, RatFunc) else b.spec.const(a))
    if type(a) is not type(b) and not (isinstance(a, int) and isinstance(b, int)):
        return False, f"{type(a).__name__} vs {type(b).__name__}"
    eq = a == b
    return eq, None if eq else f"{to_json(a)} != {to_json(b)}"


# ----------------------------------------------------------------- executor


class Executor:
    def __init__(self, script: Script):
        self.script = script
        self.spec = script.spec
        self.env = {}

    def value(self, e, line):
        if isinstance(e, Call):
            return self.call(e, line)
        if isinstance(e, SubLit):
            return SubfieldPresentation(self.spec, tuple(self.element(x, line) for x in e.items))
        if isinstance(e, ListLit):
            return [self.value(x, line) for x in e.items]
        if isinstance(e, Name) and e.name in self.env:
            return self.env[e.name]
        if isinstance(e, Num):
            return e.value
        return eval_expr(e, self.spec, self._numeric_env(), line, lambda c: self.call(c, line))

    def _numeric_env(self):
        return {k: v for k, v in self.env.items() if isinstance(v, (RatFunc, DiffOperator))}

    def element(self, e, line):
        v = self.value(e, line)
        if isinstance(v, RatFunc):
            return v
        if isinstance(v, int) and not isinstance(v, bool):
            return self.spec.const(v)
        raise EvalError(f"{print_expr(e)} is not a field element", line)

    def typed(self, e, line, cls, what):
        v = self.value(e, line)
        if not isinstance(v, cls):
            raise EvalError(f"{print_expr(e)} is not a {what}", line)
        return v

    def integer(self, e, line):
        v = self.value(e, line)
        if isinstance(v, int) and not isinstance(v, bool):
            return v
        raise EvalError(f"{print_expr(e)} is not an integer", line)

    def variable_index(self, e, line):
        if isinstance(e, Name) and e.name in self.spec.var_names:
            return self.spec.var_names.index(e.name) + 1
        raise EvalError("expected a variable name", line)

    def call(self, c: Call, line):
        f = c.func
        a = c.args
        kw = dict(c.kwargs)

        def arity(n):
            if len(a) != n:
                raise EvalError(f"{f} takes {n} argument(s)", line)

        if f == "frob":
            return eval_expr(c, self.spec, self._numeric_env(), line)
        if f == "tower":
            arity(1)
            pres = self.typed(a[0], line, SubfieldPresentation, "subfield")
            if "depth" not in kw:
                raise EvalError("tower needs depth = n", line)
            return subfields.build_tower(pres, self.integer(kw["depth"], line))
        if f == "levels":
            pres = [self.typed(x, line, SubfieldPresentation, "subfield") for x in a]
            return subfields.build_tower_explicit(pres)
        if f in ("jacobson", "sequence"):
            arity(1)
            return jacobson.tower_to_sequence(self.typed(a[0], line, PowerTower, "tower"))
        if f == "diffalg":
            arity(1)
            return diffops.algebra_of_tower(self.typed(a[0], line, PowerTower, "tower"))
        if f == "unpack":
            arity(1)
            return jacobson.unpack(self.typed(a[0], line, OperatorAlgebra, "operator algebra"))
        if f == "annihilators":
            arity(1)
            return jacobson.sequence_to_tower(self.typed(a[0], line, JacobsonSequence, "sequence"))
        if f == "degrees":
            arity(1)
            return list(self.typed(a[0], line, PowerTower, "tower").degrees)
        if f == "dims":
            arity(1)
            return list(self.typed(a[0], line, OperatorAlgebra, "operator algebra").dims)
        if f == "ranks":
            arity(1)
            return self.typed(a[0], line, JacobsonSequence, "sequence").ranks
        if f == "profile":
            arity(1)
            return subfields.foliation_profile(self.typed(a[0], line, PowerTower, "tower"))
        if f == "probe":
            arity(2)
            t = self.typed(a[0], line, PowerTower, "tower")
            return subfields.first_integrals_probe(t, self.integer(a[1], line))
        if f == "valid":
            arity(1)
            t = self.typed(a[0], line, PowerTower, "tower")
            degs = t.degrees
            return subfields.exponent_step_check(t) and all(x >= y for x, y in zip(degs, degs[1:]))
        if f == "extend":
            arity(1)
            return jacobson.extend_one_foliation(self.typed(a[0], line, SubfieldPresentation, "subfield"))[0]
        if f == "splits":
            arity(2)
            w1 = self.typed(a[0], line, SubfieldPresentation, "subfield")
            w2 = self.typed(a[1], line, SubfieldPresentation, "subfield")
            return jacobson.splitting_check(subfields.realize(w1, 1), subfields.realize(w2, 2))
        if f == "member":
            arity(3)
            g = self.element(a[0], line)
            t = self.typed(a[1], line, PowerTower, "tower")
            n = self.integer(a[2], line)
            if not 0 <= n <= t.depth:
                raise EvalError(f"level {n} outside the tower", line)
            return t.levels[n].contains(g)
        if f == "apply":
            arity(2)
            D = self.typed(a[0], line, DiffOperator, "operator")
            return diffops.apply(D, self.element(a[1], line))
        if f == "compose":
            arity(2)
            return diffops.compose(self.typed(a[0], line, DiffOperator, "operator"),
                                   self.typed(a[1], line, DiffOperator, "operator"))
        if f == "order":
            arity(1)
            return diffops.order(self.typed(a[0], line, DiffOperator, "operator"))
        if f == "augmented":
            arity(1)
            return diffops.is_augmented(self.typed(a[0], line, DiffOperator, "operator"))
        if f == "symbol":
            arity(2)
            return diffops.symbol(self.spec, self.variable_index(a[0], line), self.integer(a[1], line))
        raise EvalError(f"unknown function {f!r}", line)

    def run(self, title="script") -> Report:
        rep = Report(title)
        for st in self.script.statements:
            t0 = time.perf_counter()
            label = f"line {st.line}"
            try:
                if st.kind == "field":
                    continue
                if st.kind == "print":
                    v = self.value(st.value, st.line)
                    rep.output.append({"line": st.line, "expr": print_expr(st.value), "value": to_json(v)})
                elif st.kind == "assert":
                    op, lhs, rhs = st.value
                    text = print_expr(lhs) + ("" if op is None else f" {op} {print_expr(rhs)}")
                    label = f"line {st.line}: assert {text}"
                    if op is None:
                        v = self.value(lhs, st.line)
                        if not isinstance(v, bool):
                            raise EvalError("assert needs a comparison or a boolean", st.line)
                        ok, wit = v, None if v else f"{print_expr(lhs)} is false"
                    else:
                        ok, wit = values_equal(self.value(lhs, st.line), self.value(rhs, st.line))
                        if op == "!=":
                            ok, wit = (not ok), (None if ok else "values are equal")
                    rep.checks.append(Check(label, PASS if ok else FAIL, wit, time.perf_counter() - t0))
                else:
                    v = self.value(st.value, st.line)
                    expected = {"subfield": SubfieldPresentation, "elem": RatFunc, "op": (DiffOperator, RatFunc),
                                "tower": PowerTower, "seq": JacobsonSequence, "alg": OperatorAlgebra}[st.kind]
                    if not isinstance(v, expected):
                        raise EvalError(f"{st.kind} binding got a {type(v).__name__}", st.line)
                    if st.kind == "op" and isinstance(v, RatFunc):
                        v = DiffOperator.multiplication(v)
                    self.env[st.name] = v
            except BudgetExceeded as exc:
                rep.checks.append(Check(label, SKIP, {"dimension": exc.dimension, "cap": exc.cap},
                                        time.perf_counter() - t0))
                rep.error = str(exc)
                break
            except TowerlabError as exc:
                rep.checks.append(Check(label, FAIL, str(exc), time.perf_counter() - t0))
                rep.error = str(exc)
                break
        return rep


def run_script(script: Script, title="script") -> Report:
    return Executor(script).run(title)
