import pytest

from towerlab.diffops import algebra_of_tower, apply, symbol
from towerlab.errors import NotExponentOne, NotInSubfield, PreconditionError
from towerlab.families import ekedahl_presentations
from towerlab.jacobson import (
    annihilator,
    coordinate_power_field,
    derivations,
    extend_one_foliation,
    relative_tangent,
    sequence_to_tower,
    splitting_check,
    tower_to_sequence,
    unpack,
)
from towerlab.linalg import Subspace
from towerlab.subfields import (
    SubfieldPresentation,
    build_tower,
    build_tower_explicit,
    full_field,
    realize,
)

from conftest import E


def S(spec, *gens):
    return SubfieldPresentation(spec, tuple(E(spec, g) for g in gens))


def test_derivations_of_K(F3):
    dx, dy = derivations(full_field(F3))
    x, y = F3.gens()
    assert dx(x) == F3.one() and dx(y).is_zero()
    assert dy(y) == F3.one() and dy(x).is_zero()


def test_derivations_of_K_p(F2):
    Kp = coordinate_power_field(F2, 1)
    ds = derivations(Kp)
    assert len(ds) == 2
    # d/d(x^2) sends x^2 to 1 and y^2 to 0
    assert ds[0](E(F2, "x^2")) == F2.one()
    assert ds[0](E(F2, "y^2")).is_zero()


def test_relative_tangent_examples(F2, F3):
    K = full_field(F3)
    assert relative_tangent(K, realize(S(F3, "x", "y^3"), 1)).rank == 1
    assert relative_tangent(K, K, check_exponent=False).rank == 0
    assert relative_tangent(full_field(F2), coordinate_power_field(F2, 1)).rank == 2


def test_relative_tangent_direction(F3):
    F = relative_tangent(full_field(F3), realize(S(F3, "x"), 1))
    (g,) = F.coords.rows
    # the kernel of d/dx on coordinates is the y direction
    assert g[0].is_zero() and not g[1].is_zero()
    (D,) = F.generators
    assert D(E(F3, "x")).is_zero() and not D(E(F3, "y")).is_zero()


def test_relative_tangent_preconditions(F2):
    K = full_field(F2)
    with pytest.raises(NotInSubfield):
        relative_tangent(realize(S(F2, "x"), 1), realize(S(F2, "y"), 1))
    with pytest.raises(NotExponentOne):
        relative_tangent(K, coordinate_power_field(F2, 2))


def test_annihilator_recovers_subfield(F3):
    W = realize(S(F3, "x + y^3"), 1)
    F = relative_tangent(full_field(F3), W)
    A = annihilator(F)
    assert A.space == W.space
    assert A.contains(E(F3, "x"))
    assert not A.contains(E(F3, "y"))


def test_annihilator_of_zero_is_carrier(F2):
    K = full_field(F2)
    F = relative_tangent(K, K, check_exponent=False)
    assert annihilator(F).same_field(K)


@pytest.mark.parametrize("gens,ranks", [(("x",), [1, 1, 1]), ((), [2, 2, 2]), (("x", "y"), [0, 0, 0])])
def test_tower_to_sequence_ranks(F2, gens, ranks):
    t = build_tower(S(F2, *gens), 3)
    assert tower_to_sequence(t).ranks == ranks


def test_sequence_round_trip(F3):
    t = build_tower_explicit(ekedahl_presentations(3, [1, 2], 3))
    seq = tower_to_sequence(t)
    assert seq.ranks == [1, 1, 1]
    back = sequence_to_tower(seq)
    assert back.same_as(t)
    assert tower_to_sequence(back).same_as(seq)


def test_unpack_matches_tangents(F2):
    t = build_tower(S(F2, "x"), 2)
    seq = unpack(algebra_of_tower(t))
    assert seq.same_as(tower_to_sequence(t))
    assert seq.lifts[0] == [symbol(F2, 2, 1)]
    assert seq.lifts[1][0] == symbol(F2, 2, 2)


def test_unpack_ekedahl_level_two(F2):
    t = build_tower_explicit(ekedahl_presentations(2, [1], 2))
    seq = unpack(algebra_of_tower(t))
    assert seq.ranks == [1, 1]
    # level 2: d[y^2] - d[x] restricted to W_1 spans the tangent space
    G = symbol(F2, 2, 2) - symbol(F2, 1, 1)
    F = seq.algebras[1]
    vals = [[apply(G, b) for b in F.frame.elements]]
    assert Subspace.span(F2, F.frame.size, vals) == F.value_space()


def test_extend_one_foliation_examples(F2):
    W2, F1, F2_ = extend_one_foliation(S(F2, "x", "y^2"))
    assert F2_.same_field(realize(S(F2, "x", "y^4"), 2))
    assert splitting_check(F1, F2_)
    W2, F1, F2_ = extend_one_foliation(S(F2, "x + y^2"))
    assert F2_.composite(1).space == F1.space
    assert splitting_check(F1, F2_)


def test_extend_one_foliation_rejects_K(F2):
    with pytest.raises(PreconditionError):
        extend_one_foliation(S(F2, "x", "y"))


def test_splitting_check_cases(F2):
    W1 = realize(S(F2, "x"), 1)
    assert splitting_check(W1, realize(S(F2, "x"), 2))
    # <x^2, y^4> * K^2 = K^2, not W1
    assert not splitting_check(W1, realize(S(F2, "x^2"), 2))
    # [W1 : W2] = 4 for W2 = K^4 so the tangent is not of exponent one
    assert not splitting_check(W1, coordinate_power_field(F2, 2))
