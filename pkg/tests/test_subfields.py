import pytest

from towerlab.arith import FieldSpec, MultiPoly
from towerlab.errors import BudgetExceeded, NotAPowerTower
from towerlab import config
from towerlab.subfields import (
    SubfieldPresentation,
    build_tower,
    build_tower_explicit,
    exponent_step_check,
    first_integrals_probe,
    foliation_profile,
    realize,
)

from conftest import E


def S(spec, *gens):
    return SubfieldPresentation(spec, tuple(E(spec, g) for g in gens))


def test_realize_examples(F2):
    W = realize(S(F2, "x"), 1)
    assert W.dim == 2
    assert W.contains(E(F2, "1")) and W.contains(E(F2, "x"))
    assert not W.contains(E(F2, "y"))
    for h in (1, 2):
        assert realize(S(F2), h).dim == 1
        assert realize(S(F2, "x", "y"), h).dim == 2 ** (2 * h)


def test_contains_examples(F2):
    W = realize(S(F2, "x + y^2"), 1)
    assert W.contains(E(F2, "x + y^2"))
    # y^2 lies in K^2, so x = (x + y^2) - y^2 is in W * K^2 as well
    assert W.contains(E(F2, "x"))
    assert not W.contains(E(F2, "y"))
    W2 = realize(S(F2, "x + y^2"), 2)
    assert W2.contains(E(F2, "x + y^2")) and not W2.contains(E(F2, "x"))


def test_presentation_drops_constants(F3):
    assert S(F3, "2", "x", "x").generators == (E(F3, "x"),)
    assert str(S(F3, "x", "y^3")) == "<x, y^3>"


@pytest.mark.parametrize("p", [2, 3])
def test_build_tower_examples(p):
    K = FieldSpec(p, ("x", "y"))
    depth = 3 if p == 2 else 2
    assert build_tower(S(K, "x"), depth).degrees == [p] * depth
    assert build_tower(S(K, "x", "y"), depth).degrees == [1] * depth
    assert build_tower(S(K), depth).degrees == [p * p] * depth


def test_build_tower_explicit_examples(F2):
    t = build_tower_explicit([S(F2, "x", "y^2"), S(F2, "x + y^2", "y^4"), S(F2, "x + y^2 + y^4", "y^8")])
    assert t.degrees == [2, 2, 2]
    with pytest.raises(NotAPowerTower) as exc:
        build_tower_explicit([S(F2, "x"), S(F2, "y")])
    assert (exc.value.i, exc.value.j) == (2, 1)
    assert build_tower_explicit([S(F2, "x", "y")] * 3).degrees == [1, 1, 1]


def test_tower_agrees_with_explicit_levels(F3):
    pres = S(F3, "x*y + y")
    a = build_tower(pres, 2)
    b = build_tower_explicit([pres, pres])
    assert a.same_as(b)


def test_exponent_step_check(F2):
    for pres in (S(F2, "x"), S(F2, "x", "y"), S(F2, "x*y + y^3")):
        assert exponent_step_check(build_tower(pres, 3))


def test_foliation_profile_examples(F2, F3):
    prof = foliation_profile(build_tower(S(F3, "x"), 2))
    assert prof["constant_degree"] and prof["rank"] == 1
    assert foliation_profile(build_tower(S(F2, "x", "y^4"), 3))["length_probe"] == 2
    prof = foliation_profile(build_tower(S(F2, "x", "y"), 3))
    assert prof["length_probe"] == 0 and prof["rank"] == 0
    assert foliation_profile(build_tower(S(F2, "x"), 3))["length_probe"] == "exceeds_depth"


def _polys_in_x(spec, bound):
    return {MultiPoly.from_terms(spec, {(k, 0): 1}) for k in range(bound + 1)}


def test_probe_tower_of_x(F2):
    # below y^(p^depth) every surviving polynomial is a polynomial in x
    probe = first_integrals_probe(build_tower(S(F2, "x"), 3), 7)
    assert len(probe) == 8
    assert all(all(e[1] == 0 for e in f.terms()) for f in probe)


def test_probe_constant_tower(F3):
    probe = first_integrals_probe(build_tower(S(F3, "x", "y"), 2), 2)
    assert len(probe) == 6  # every monomial of degree <= 2


def test_probe_nonintegrable_at_depth_three(F2):
    # x + y^2 + y^4 lies in W_1, W_2 and W_3, so the truncated probe is not only constants
    t = build_tower_explicit([S(F2, "x", "y^2"), S(F2, "x + y^2", "y^4"), S(F2, "x + y^2 + y^4", "y^8")])
    g = E(F2, "x + y^2 + y^4")
    assert all(W.contains(g) for W in t.levels)
    probe = first_integrals_probe(t, 8)
    assert any(not f.is_constant() for f in probe)


def test_budget_guard(F2):
    with config.budget(16):
        with pytest.raises(BudgetExceeded) as exc:
            build_tower(S(F2, "x"), 3)
    assert exc.value.dimension == 64 and exc.value.cap == 16


def test_tower_to_dict(F2):
    d = build_tower(S(F2, "x"), 2).to_dict()
    assert d["degrees"] == [2, 2]
    assert [lvl["index_in_K"] for lvl in d["levels"]] == [1, 2, 4]
