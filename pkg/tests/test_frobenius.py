import pytest

from towerlab.arith import FieldSpec
from towerlab.errors import NotInSubfield, PoolInsufficient
from towerlab.frobenius import MonomialBasis, PBasisFrame, decompose, p_basis, p_independent, recompose
from towerlab.subfields import SubfieldPresentation, full_field, realize

from conftest import E


def test_monomial_basis_indexing(F3):
    mb = MonomialBasis(F3, 2)
    assert mb.size == 81
    for i in range(mb.size):
        assert mb.index(mb.exponents(i)) == i


def test_decompose_examples():
    K = FieldSpec(2, ("x",))
    v = decompose(E(K, "x/(x + 1)"), 1)
    assert v.coords[0] == E(K, "x/(x + 1)")
    assert v.coords[1] == E(K, "1/(x + 1)")
    assert recompose(v) == E(K, "x/(x + 1)")
    assert decompose(E(K, "x^2"), 1).coords == {0: E(K, "x")}
    assert decompose(E(K, "x"), 1).coords == {1: E(K, "1")}


def test_recompose_zero_and_single(F3):
    from towerlab.frobenius import VecOverBase

    assert recompose(VecOverBase(F3, 1, {})).is_zero()
    # index of (1, 2) at level 1 is 1*3 + 2
    assert recompose(VecOverBase(F3, 1, {5: E(F3, "x + y")})) == E(F3, "(x + y)^3 * x * y^2")


def test_p_power_supported_at_zero(F3):
    f = E(F3, "(x*y + 1)^9/(x^9 + y^18)")
    assert set(decompose(f, 2).coords) == {0}


def test_p_independent_examples(F2):
    K = full_field(F2)
    assert p_independent([E(F2, "x"), E(F2, "y")], K)
    assert not p_independent([E(F2, "x"), E(F2, "x")], K)
    assert p_independent([E(F2, "x + y^2")], K)
    assert not p_independent([E(F2, "x^2")], K)


def test_p_independent_membership(F2):
    W = realize(SubfieldPresentation(F2, (E(F2, "x"),)), 1)
    with pytest.raises(NotInSubfield):
        p_independent([E(F2, "y")], W)


def test_p_basis_examples(F2, F3):
    K = full_field(F3)
    assert p_basis(K, [E(F3, "x"), E(F3, "y")]) == [E(F3, "x"), E(F3, "y")]
    W1 = realize(SubfieldPresentation(F3, (E(F3, "x"), E(F3, "y^3"))), 1)
    assert p_basis(W1, [E(F3, "x"), E(F3, "y^3")]) == [E(F3, "x"), E(F3, "y^3")]
    assert p_basis(full_field(F2), [E(F2, "x^2"), E(F2, "x"), E(F2, "y")]) == [E(F2, "x"), E(F2, "y")]
    with pytest.raises(PoolInsufficient):
        p_basis(full_field(F2), [E(F2, "x"), E(F2, "x^2")])


def test_frame_partials(F3):
    W = realize(SubfieldPresentation(F3, (E(F3, "x + y^3"), E(F3, "y^9"))), 2)
    fr = PBasisFrame(W)
    a1, a2 = fr.a
    # the partials of a p-basis element are the unit vectors
    assert fr.partials(a1) == [F3.one(), F3.zero()]
    assert fr.partials(a2) == [F3.zero(), F3.one()]
    with pytest.raises(NotInSubfield):
        fr.partials(E(F3, "y"))
