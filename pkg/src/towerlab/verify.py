"""The verification corpus: acceptance criteria 1-9 as report checks.

Every randomized ingredient draws from ``random.Random(seed)``; the verdicts
do not depend on the seed.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from importlib import resources

from . import diffops, dsl, linalg
from .arith import FieldSpec, RatFunc, binom_mod_p, print_canonical
from .diffops import DiffOperator, algebra_of_tower, apply, compose, symbol
from .errors import BudgetExceeded, TowerlabError
from .families import (
    ekedahl_presentations,
    example_ekedahl,
    example_nonintegrable,
    nonintegrable_presentations,
)
from .frobenius import PBasisFrame, decompose, recompose
from .jacobson import (
    coordinate_power_field,
    extend_one_foliation,
    sequence_to_tower,
    splitting_check,
    tower_to_sequence,
    unpack,
)
from .runner import FAIL, PASS, SKIP, Check, Report
from .subfields import (
    SubfieldPresentation,
    build_tower,
    build_tower_explicit,
    exponent_step_check,
    realize,
)

DEFAULT_SEED = 20240601
RANDOM_TOWERS = 24
FUZZ_EXPRESSIONS = 500
ORACLE_SAMPLES = 200


# ------------------------------------------------------------ random objects


def random_poly(spec: FieldSpec, rng: random.Random, max_terms=3, max_deg=3) -> RatFunc:
    out = spec.zero()
    for _ in range(rng.randint(1, max_terms)):
        e = [0] * spec.num_vars
        for _ in range(rng.randint(0, max_deg)):
            e[rng.randrange(spec.num_vars)] += 1
        out = out + spec.monomial(e, rng.randint(1, spec.p - 1))
    return out


def random_element(spec: FieldSpec, rng: random.Random, max_terms=3, max_deg=3) -> RatFunc:
    num = random_poly(spec, rng, max_terms, max_deg)
    if rng.random() < 0.5:
        return num
    den = random_poly(spec, rng, 2, 2)
    return num if den.is_zero() else num / den


def random_operator(spec: FieldSpec, rng: random.Random, height: int, terms=3) -> DiffOperator:
    q = spec.p**height
    coeffs = {}
    for _ in range(rng.randint(1, terms)):
        e = tuple(rng.randrange(q) for _ in range(spec.num_vars))
        coeffs[e] = random_poly(spec, rng, 2, 2)
    return DiffOperator(spec, coeffs)


def random_expr(rng: random.Random, names, depth=4):
    """Random expression tree over the grammar (no division by literal zero)."""
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.3:
            return dsl.Num(rng.randint(1, 12))
        return dsl.Name(rng.choice(names))
    r = rng.random()
    if r < 0.45:
        op = rng.choice("+-*/")
        return dsl.Bin(op, random_expr(rng, names, depth - 1), random_expr(rng, names, depth - 1))
    if r < 0.6:
        return dsl.Neg(random_expr(rng, names, depth - 1))
    if r < 0.8:
        exp = dsl.Num(rng.randint(0, 4))
        if rng.random() < 0.2:
            exp = dsl.Pow(dsl.Num(rng.randint(1, 3)), dsl.Num(rng.randint(0, 2)))
        return dsl.Pow(random_expr(rng, names, depth - 1), exp)
    return dsl.Call("frob", (random_expr(rng, names, depth - 1), dsl.Num(rng.randint(0, 2))))


# ------------------------------------------------------------ corpus


@dataclass
class CorpusEntry:
    label: str
    spec: FieldSpec
    per_level: list  # presentations W_1..W_depth (equal for tower(W, depth))
    explicit: bool
    tower: object = None
    results: dict = field(default_factory=dict)

    def build(self):
        if self.tower is None:
            if self.explicit:
                self.tower = build_tower_explicit(self.per_level)
            else:
                self.tower = build_tower(self.per_level[0], len(self.per_level))
        return self.tower


def _depth(p):
    return 3 if p == 2 else 2


def build_corpus(seed=DEFAULT_SEED, n_random=RANDOM_TOWERS) -> list:
    rng = random.Random(seed)
    out = []
    # worked examples
    for p, A, d in ((2, [1, 1], 3), (3, [1, 2], 2)):
        pres = ekedahl_presentations(p, A, d)
        out.append(CorpusEntry(f"ekedahl p={p} A={tuple(A)}", pres[0].spec, pres, True))
    pres = nonintegrable_presentations(2, 3)
    out.append(CorpusEntry("nonintegrable p=2", pres[0].spec, pres, True))
    for p in (2, 3):
        for names in (("x",), ("x", "y")):
            spec = FieldSpec(p, names)
            out.append(CorpusEntry(f"ppower p={p} N={len(names)}", spec,
                                   [SubfieldPresentation(spec, ())] * _depth(p), False))
        spec = FieldSpec(p, ("x", "y"))
        x, y = spec.gens()
        out.append(CorpusEntry(f"transcendental <x> p={p}", spec,
                               [SubfieldPresentation(spec, (x,))] * _depth(p), False))
        out.append(CorpusEntry(f"<x, y^{p * p}> p={p}", spec,
                               [SubfieldPresentation(spec, (x, y.frob(2)))] * _depth(p), False))
    # random presentations
    configs = [(2, ("x", "y")), (3, ("x", "y")), (2, ("x",)), (3, ("x",))]
    weights = [0.5, 0.3, 0.1, 0.1]
    seen = set()
    tries = 0
    while len(out) < 10 + n_random and tries < 50 * n_random:
        tries += 1
        p, names = rng.choices(configs, weights)[0]
        spec = FieldSpec(p, names)
        gens = []
        for _ in range(rng.randint(1, spec.num_vars)):
            g = random_poly(spec, rng, max_terms=3, max_deg=3 if p == 2 else 2)
            if not g.is_constant():
                gens.append(g)
        pres = SubfieldPresentation(spec, tuple(gens))
        key = (p, names, str(pres))
        if not pres.generators or key in seen:
            continue
        seen.add(key)
        out.append(CorpusEntry(f"random {pres} p={p} N={spec.num_vars}", spec,
                               [pres] * _depth(p), False))
    return out


def analyse(entry: CorpusEntry) -> dict:
    """Run the full pipeline on one tower; results are cached on the entry."""
    if entry.results:
        return entry.results
    r = entry.results
    t0 = time.perf_counter()
    try:
        t = entry.build()
        seq = tower_to_sequence(t)
        back = sequence_to_tower(seq)
        alg = algebra_of_tower(t)
        un = unpack(alg, seq)
        r["tower"] = t
        r["roundtrip"] = all(a.space == b.space for a, b in zip(back.levels, t.levels)) and back.depth == t.depth
        r["unpack"] = un.same_as(seq)
        r["dims"] = [(d, W.degree_in_K) for d, W in zip(alg.dims, t.levels)]
        p = t.spec.p
        r["ranks"] = [(p**F.rank, deg) for F, deg in zip(seq.algebras, t.degrees)]
        r["nonincreasing"] = all(a >= b for a, b in zip(t.degrees, t.degrees[1:]))
        r["exponent1"] = exponent_step_check(t)
        r["status"] = PASS
    except BudgetExceeded as exc:
        r["status"] = SKIP
        r["error"] = {"dimension": exc.dimension, "cap": exc.cap}
    except TowerlabError as exc:
        r["status"] = FAIL
        r["error"] = f"{type(exc).__name__}: {exc}"
    r["seconds"] = time.perf_counter() - t0
    return r


# ------------------------------------------------------------ criteria


def _corpus_check(name, corpus, predicate):
    t0 = time.perf_counter()
    failures, skips = [], []
    for entry in corpus:
        r = analyse(entry)
        if r["status"] == SKIP:
            skips.append(entry.label)
        elif r["status"] == FAIL:
            failures.append({"tower": entry.label, "error": r["error"]})
        else:
            ok, wit = predicate(r)
            if not ok:
                failures.append({"tower": entry.label, "witness": wit})
    if failures:
        return Check(name, FAIL, {"minimal_failing": failures[0], "failures": len(failures)},
                     time.perf_counter() - t0)
    if skips:
        return Check(name, SKIP, {"skipped": skips}, time.perf_counter() - t0)
    return Check(name, PASS, {"towers": len(corpus)}, time.perf_counter() - t0)


def criterion_1() -> Check:
    t0 = time.perf_counter()
    runs = [example_ekedahl(2, 3, [1, 1]), example_ekedahl(3, 2, [1, 2])]
    bad = [c.to_dict() | {"family": r.title} for r in runs for c in r.checks if c.status != PASS]
    slow = [r.title for r in runs if sum(c.seconds for c in r.checks) > 30]
    gens = {r.title: [o["value"] for o in r.output if o["expr"].endswith("generators")] for r in runs}
    ok = not bad and not slow
    return Check("1 ekedahl generators", PASS if ok else FAIL,
                 gens if ok else {"failed": bad, "slow": slow}, time.perf_counter() - t0)


def criterion_2() -> list:
    """Tower validity and degrees, then the probe, as separate checks."""
    t0 = time.perf_counter()
    rep = example_nonintegrable(2, 3)
    by = {c.name: c for c in rep.checks}
    probe = [c for c in rep.checks if c.name.startswith("first-integral probe")][0]
    shape_ok = by["valid power tower"].status == PASS and by["degrees == [2, 2, 2]"].status == PASS
    dt = time.perf_counter() - t0
    return [
        Check("2a nonintegrable tower valid with degrees [2,2,2]", PASS if shape_ok else FAIL,
              None, dt),
        Check("2b nonintegrable first-integral probe lists only constants", probe.status,
              probe.witness, dt),
    ]


def criterion_3(corpus) -> Check:
    return _corpus_check("3 round trips", corpus,
                         lambda r: (r["roundtrip"] and r["unpack"],
                                    {"roundtrip": r["roundtrip"], "unpack": r["unpack"]}))


def criterion_4(corpus) -> Check:
    def pred(r):
        ok = all(a == b for a, b in r["dims"]) and all(a == b for a, b in r["ranks"])
        return ok, {"dims": r["dims"], "ranks": r["ranks"]}

    return _corpus_check("4 dimension laws", corpus, pred)


def criterion_5(corpus) -> Check:
    return _corpus_check("5 nonincreasing degrees and exponent-1 steps", corpus,
                         lambda r: (r["nonincreasing"] and r["exponent1"],
                                    {"degrees": r["tower"].degrees}))


def symbol_identity(p: int, N: int, i: int, m: int) -> bool:
    """(1/p^m!) d^(p^m)/dx_i^(p^m) restricted to K^(p^m) is d/d(x_i^(p^m))."""
    spec = FieldSpec(p, ("x", "y", "z")[:N])
    W = coordinate_power_field(spec, m)
    fr = PBasisFrame(W, [x.frob(m) for x in spec.gens()])
    S = symbol(spec, i, p**m)
    unit = [spec.one() if j == i - 1 else spec.zero() for j in range(N)]
    return [apply(S, b) for b in fr.elements] == fr.derivation_values(unit)


def criterion_6() -> Check:
    t0 = time.perf_counter()
    bad = []
    for p in (2, 3):
        for N in (1, 2):
            for m in (1, 2):
                for i in range(1, N + 1):
                    if not symbol_identity(p, N, i, m):
                        bad.append({"p": p, "N": N, "i": i, "m": m})
    return Check("6 symbol-differential identities", FAIL if bad else PASS,
                 bad[0] if bad else None, time.perf_counter() - t0)


def _oracle_configs():
    return [FieldSpec(2, ("x",)), FieldSpec(2, ("x", "y")), FieldSpec(3, ("x",)), FieldSpec(3, ("x", "y"))]


def check_associativity(rng, samples=ORACLE_SAMPLES) -> list:
    bad = []
    configs = _oracle_configs()
    for k in range(samples):
        spec = configs[k % len(configs)]
        hmax = 2 if spec.p == 2 else 1
        D1, D2, D3 = (random_operator(spec, rng, rng.randint(0, hmax)) for _ in range(3))
        f = random_element(spec, rng)
        left = compose(compose(D1, D2), D3)
        right = compose(D1, compose(D2, D3))
        if left != right or apply(left, f) != apply(D1, apply(D2, apply(D3, f))):
            bad.append({"D1": diffops.render(D1), "D2": diffops.render(D2), "D3": diffops.render(D3),
                        "f": print_canonical(f)})
    return bad


def check_decompose(rng, samples=ORACLE_SAMPLES) -> list:
    bad = []
    for spec in _oracle_configs():
        for h in (1, 2):
            for _ in range(samples):
                f = random_element(spec, rng)
                if recompose(decompose(f, h)) != f:
                    bad.append({"p": spec.p, "N": spec.num_vars, "h": h, "f": print_canonical(f)})
    return bad


def check_binomials(limit=50) -> list:
    bad = []
    for p in (2, 3, 5, 7, 11, 13, 17):
        for b in range(limit + 1):
            for a in range(b + 1):
                if binom_mod_p(b, a, p) != math.comb(b, a) % p:
                    bad.append({"p": p, "b": b, "a": a})
    return bad


def check_linalg_laws(rng, samples=40) -> list:
    bad = []
    configs = _oracle_configs()
    for k in range(samples):
        spec = configs[k % len(configs)]
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)

        def entry():
            return spec.zero() if rng.random() < 0.4 else random_element(spec, rng, 2, 2)

        M = [[entry() for _ in range(cols)] for _ in range(rows)]
        if rng.random() < 0.3 and rows > 1:
            M[-1] = [a + b for a, b in zip(M[0], M[-1 if rows == 1 else 1])]
        r = linalg.rank(spec, M, cols)
        ker = linalg.kernel(spec, M, cols)
        if r + ker.dim != cols:
            bad.append({"law": "rank-nullity", "rank": r, "nullity": ker.dim, "cols": cols})
            continue
        for v in ker.rows:
            if any(not sum((a * b for a, b in zip(row, v)), spec.zero()).is_zero() for row in M):
                bad.append({"law": "kernel vectors"})
                break
        U = linalg.Subspace.span(spec, cols, M)
        V = linalg.Subspace.span(spec, cols, [[entry() for _ in range(cols)] for _ in range(rng.randint(1, 3))])
        if (U + V).dim + U.intersect(V).dim != U.dim + V.dim:
            bad.append({"law": "modular", "U": U.dim, "V": V.dim})
    return bad


def criterion_7(seed) -> Check:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    parts = {
        "associativity": check_associativity(rng),
        "decompose": check_decompose(rng),
        "binomials": check_binomials(),
        "linalg": check_linalg_laws(rng),
    }
    bad = {k: v[0] for k, v in parts.items() if v}
    return Check("7 oracle equivalences", FAIL if bad else PASS, bad or None, time.perf_counter() - t0)


def extension_subfields(corpus) -> list:
    """Distinct proper W_1's (exponent one, rank >= 1) among the corpus presentations."""
    out, seen = [], set()
    for entry in corpus:
        pres = entry.per_level[0]
        W1 = realize(pres, 1)
        if W1.degree_in_K == 1:
            continue
        key = (entry.spec, str(pres))
        if key in seen:
            continue
        seen.add(key)
        out.append((entry.label, pres, W1))
    return out


def criterion_8(corpus) -> Check:
    t0 = time.perf_counter()
    cases = extension_subfields(corpus)
    bad = []
    for label, pres, W1 in cases:
        try:
            W2, F1, F2 = extend_one_foliation(pres)
            ok = splitting_check(F1, F2) and F2.composite(1).space == W1.space
            if not ok:
                bad.append({"subfield": str(pres), "W2": str(W2)})
        except TowerlabError as exc:
            bad.append({"subfield": str(pres), "error": f"{type(exc).__name__}: {exc}"})
    return Check("8 constructive extension", FAIL if bad else PASS,
                 {"minimal_failing": bad[0], "failures": len(bad)} if bad else {"subfields": len(cases)},
                 time.perf_counter() - t0)


def golden_scripts() -> dict:
    """{name: text} for the scripts shipped with the package."""
    root = resources.files("towerlab") / "golden"
    return {p.name: p.read_text(encoding="utf-8") for p in sorted(root.iterdir(), key=lambda q: q.name)
            if p.name.endswith(".twr")}


def check_expression_fuzz(rng, samples=FUZZ_EXPRESSIONS) -> list:
    bad = []
    specs = [FieldSpec(2, ("x", "y")), FieldSpec(3, ("x", "y", "z")), FieldSpec(5, ("t",))]
    for k in range(samples):
        spec = specs[k % len(specs)]
        e = random_expr(rng, spec.var_names)
        text = dsl.print_expr(e)
        try:
            back = dsl.parse_expr(text, spec)
        except dsl.ParseError as exc:
            bad.append({"expr": text, "error": str(exc)})
            continue
        if back != e or dsl.print_expr(back) != text:
            bad.append({"expr": text, "reparsed": dsl.print_expr(back)})
            continue
        f = random_element(spec, rng)
        g = dsl.eval_expr(dsl.parse_expr(print_canonical(f), spec), spec)
        if g != f:
            bad.append({"element": print_canonical(f)})
    return bad


def check_golden() -> list:
    bad = []
    for name, text in golden_scripts().items():
        try:
            s1 = dsl.parse_script(text)
            s2 = dsl.parse_script(dsl.print_script(s1))
        except dsl.ParseError as exc:
            bad.append({"script": name, "error": str(exc)})
            continue
        if s1.statements != s2.statements:
            bad.append({"script": name})
    return bad


def criterion_9(seed) -> Check:
    t0 = time.perf_counter()
    rng = random.Random(seed + 9)
    bad = check_expression_fuzz(rng) + check_golden()
    return Check("9 parser round trip", FAIL if bad else PASS, bad[0] if bad else None,
                 time.perf_counter() - t0)


def run_verify(seed=DEFAULT_SEED, corpus=None) -> Report:
    rep = Report(f"verify seed={seed}")
    if corpus is None:
        corpus = build_corpus(seed)
    rep.output.append({"expr": "corpus size", "value": len(corpus)})
    checks = [criterion_1()]
    checks += criterion_2()
    checks += [criterion_3(corpus), criterion_4(corpus), criterion_5(corpus), criterion_6(),
               criterion_7(seed), criterion_8(corpus), criterion_9(seed)]
    rep.checks = sorted(checks, key=lambda c: c.name)
    return rep
