"""Example tower families with closed-form expected generators.

Each family builds its tower, the operator algebra and the unpacked
sequence, then compares the computed level generators with the closed form.
Operators are compared as canonical strings after scaling each one so that
its highest symbol has coefficient 1; when the strings differ, the expected
operators are restricted to the level's carrier and their value space is
compared with the unpacked algebra (generators are only canonical up to
units of the carrier).
"""

from __future__ import annotations

import time

from . import linalg
from .arith import FieldSpec
from .diffops import DiffOperator, algebra_of_tower, apply, render, symbol
from .errors import BudgetExceeded, TowerlabError
from .jacobson import sequence_to_tower, tower_to_sequence, unpack
from .runner import FAIL, PASS, SKIP, Check, Report
from .subfields import (
    SubfieldPresentation,
    build_tower,
    build_tower_explicit,
    exponent_step_check,
    first_integrals_probe,
    foliation_profile,
)

FAMILIES = ("ekedahl", "nonintegrable", "transcendental", "ppower")

PROBE_DEGREE = 8


def _xy(p):
    spec = FieldSpec(p, ("x", "y"))
    x, y = spec.gens()
    return spec, x, y


def ekedahl_presentations(p: int, A, depth: int) -> list:
    """W_n = <x + A_1 y^p + ... + A_(n-1) y^(p^(n-1)), y^(p^n)>."""
    spec, x, y = _xy(p)
    out = []
    for n in range(1, depth + 1):
        g = x
        for k in range(1, n):
            g = g + spec.const(A[k - 1]) * y.frob(k)
        out.append(SubfieldPresentation(spec, (g, y.frob(n))))
    return out


def ekedahl_expected(p: int, A, depth: int) -> list:
    """Level n: (1/p^(n-1)!)d/dy - sum_k A_k^(p^(n-1-k)) (1/p^(n-1-k)!)d/dx."""
    spec, _, _ = _xy(p)
    out = []
    for n in range(1, depth + 1):
        G = symbol(spec, 2, p ** (n - 1))
        for k in range(1, n):
            c = spec.const(pow(A[k - 1], p ** (n - 1 - k), p))
            G = G - symbol(spec, 1, p ** (n - 1 - k)).scale(c)
        out.append([G])
    return out


def nonintegrable_presentations(p: int, depth: int) -> list:
    """W_n = <x + y^p + ... + y^(p^(n-1)), y^(p^n)>."""
    return ekedahl_presentations(p, [1] * max(depth - 1, 0), depth)


def normalize(D: DiffOperator) -> DiffOperator:
    """Scale so that the highest symbol (graded lex) has coefficient 1."""
    if D.is_zero():
        return D
    lead = list(D.coeffs.values())[-1]
    return D.scale(lead.spec.one() / lead)


def compare_generators(F, computed, expected):
    """(status, method) for one level; computed may be None (no symbol lift)."""
    if computed is not None:
        a = sorted(render(normalize(D)) for D in computed)
        b = sorted(render(normalize(D)) for D in expected)
        if a == b:
            return PASS, "canonical"
    fr = F.frame
    vals = [[apply(D, b) for b in fr.elements] for D in expected]
    if linalg.Subspace.span(F.spec, fr.size, vals) == F.value_space():
        return PASS, "restriction"
    return FAIL, "mismatch"


def _level_checks(rep, t, expected):
    """Shared pipeline: sequence, algebra, unpack, round trips, generators."""
    t0 = time.perf_counter()
    seq = tower_to_sequence(t)
    alg = algebra_of_tower(t)
    un = unpack(alg, seq)
    back = sequence_to_tower(seq)
    rt = all(a.space == b.space for a, b in zip(back.levels, t.levels))
    rep.output.append({"expr": "degrees", "value": list(t.degrees)})
    rep.output.append({"expr": "dims", "value": list(alg.dims)})
    rep.output.append({"expr": "ranks", "value": un.ranks})
    rep.checks.append(Check("sequence_to_tower(tower_to_sequence(T)) == T", PASS if rt else FAIL,
                            None if rt else "round trip differs", time.perf_counter() - t0))
    dims_ok = all(d == W.degree_in_K for d, W in zip(alg.dims, t.levels))
    rep.checks.append(Check("dim D_n == [K : W_n]", PASS if dims_ok else FAIL,
                            None if dims_ok else list(alg.dims)))
    for i, F in enumerate(un.algebras, start=1):
        comp = un.lifts[i - 1]
        exp = expected[i - 1]
        status, method = compare_generators(F, comp, exp)
        wit = {
            "computed": [render(normalize(D)) for D in comp] if comp is not None else None,
            "expected": [render(normalize(D)) for D in exp],
            "method": method,
        }
        rep.output.append({"expr": f"level {i} generators", "value": wit["computed"]})
        rep.output.append({"expr": f"level {i} expected", "value": wit["expected"]})
        rep.checks.append(Check(f"level {i} generators match the closed form", status, wit))
    return un


def _run(title, body):
    rep = Report(title)
    try:
        body(rep)
    except BudgetExceeded as exc:
        rep.checks.append(Check("budget", SKIP, {"dimension": exc.dimension, "cap": exc.cap}))
        rep.error = str(exc)
    except TowerlabError as exc:
        rep.checks.append(Check("pipeline", FAIL, str(exc)))
        rep.error = str(exc)
    return rep


def example_ekedahl(p=2, depth=3, A=None) -> Report:
    if A is None:
        A = [1] * (depth - 1)
    A = [a % p for a in A]
    if len(A) < depth - 1:
        raise ValueError(f"ekedahl at depth {depth} needs {depth - 1} coefficients")
    if any(a == 0 for a in A):
        raise ValueError("coefficients must be nonzero mod p")

    def body(rep):
        t = build_tower_explicit(ekedahl_presentations(p, A, depth))
        _level_checks(rep, t, ekedahl_expected(p, A, depth))

    return _run(f"ekedahl p={p} A={tuple(A)} depth={depth}", body)


def example_nonintegrable(p=2, depth=3, probe_degree=PROBE_DEGREE) -> Report:
    def body(rep):
        t = build_tower_explicit(nonintegrable_presentations(p, depth))
        valid = exponent_step_check(t) and all(a >= b for a, b in zip(t.degrees, t.degrees[1:]))
        rep.checks.append(Check("valid power tower", PASS if valid else FAIL))
        ok = list(t.degrees) == [p] * depth
        rep.checks.append(Check(f"degrees == {[p] * depth}", PASS if ok else FAIL, list(t.degrees)))
        _level_checks(rep, t, ekedahl_expected(p, [1] * (depth - 1), depth))
        probe = first_integrals_probe(t, probe_degree)
        rendered = [str(f) for f in probe]
        rep.output.append({"expr": f"probe(T, {probe_degree})", "value": rendered})
        consts = all(f.is_constant() for f in probe)
        rep.checks.append(Check(f"first-integral probe (degree <= {probe_degree}) lists only constants",
                                PASS if consts else FAIL, None if consts else rendered))

    return _run(f"nonintegrable p={p} depth={depth}", body)


def example_transcendental(p=2, depth=3) -> Report:
    """W = F_p(x) inside F_p(x, y): W_n = F_p(x, y^(p^n)), constant degree p, rank 1."""
    spec, x, _ = _xy(p)

    def body(rep):
        t = build_tower(SubfieldPresentation(spec, (x,)), depth)
        prof = foliation_profile(t)
        rep.output.append({"expr": "profile", "value": prof})
        ok = list(t.degrees) == [p] * depth and prof["constant_degree"] and prof["rank"] == 1
        rep.checks.append(Check("constant degree p, rank 1", PASS if ok else FAIL, prof))
        expected = [[symbol(spec, 2, p**m)] for m in range(depth)]
        _level_checks(rep, t, expected)

    return _run(f"transcendental p={p} depth={depth}", body)


def example_ppower(p=2, depth=2) -> Report:
    """W_n = K^(p^n): the sequence is the full tangent spaces of K, K^p, ..."""
    spec, _, _ = _xy(p)

    def body(rep):
        t = build_tower(SubfieldPresentation(spec, ()), depth)
        expected = [[symbol(spec, 1, p**m), symbol(spec, 2, p**m)] for m in range(depth)]
        un = _level_checks(rep, t, expected)
        full = all(F.rank == spec.num_vars for F in un.algebras)
        rep.checks.append(Check("F_n is the full tangent space of K^(p^(n-1))", PASS if full else FAIL,
                                None if full else un.ranks))

    return _run(f"ppower p={p} depth={depth}", body)


def run_example(name, p=None, depth=None, A=None) -> Report:
    if name == "ekedahl":
        return example_ekedahl(p or 2, depth or 3, A)
    if name == "nonintegrable":
        return example_nonintegrable(p or 2, depth or 3)
    if name == "transcendental":
        return example_transcendental(p or 2, depth or 3)
    if name == "ppower":
        return example_ppower(p or 2, depth or 2)
    raise ValueError(f"unknown example {name!r}; choose from {', '.join(FAMILIES)}")
