import pytest

from towerlab import linalg
from towerlab.linalg import Subspace

from conftest import E


def M(spec, rows):
    return [[E(spec, t) for t in r] for r in rows]


def test_rref_identity(F2):
    rows = M(F2, [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
    R, piv = linalg.rref(F2, rows)
    assert R == rows and list(piv) == [0, 1, 2]


def test_rref_rank_one(F3):
    R, piv = linalg.rref(F3, M(F3, [["x", "x^2"], ["1", "x"]]))
    assert list(piv) == [0]
    assert R == M(F3, [["1", "x"]])


def test_rref_zero(F2):
    R, piv = linalg.rref(F2, M(F2, [["0", "0"], ["0", "0"]]))
    assert R == [] and list(piv) == []


def test_rref_idempotent_and_same_rowspace(F3):
    rows = M(F3, [["x", "y", "1"], ["x^2", "x*y", "x"], ["1", "0", "y/(x + 1)"]])
    R, _ = linalg.rref(F3, rows)
    R2, _ = linalg.rref(F3, R)
    assert R2 == R
    assert Subspace.span(F3, 3, rows) == Subspace.span(F3, 3, R)


def test_kernel_examples(F2, F3):
    ident = M(F2, [["1", "0"], ["0", "1"]])
    assert linalg.kernel(F2, ident, 2).dim == 0
    ker = linalg.kernel(F3, M(F3, [["1", "x"]]), 2)
    assert ker.dim == 1
    assert ker == Subspace.span(F3, 2, M(F3, [["x", "-1"]]))


def test_subspace_ops(F3):
    e1 = Subspace.span(F3, 2, M(F3, [["1", "0"]]))
    e2 = Subspace.span(F3, 2, M(F3, [["0", "1"]]))
    assert e1.intersect(e2).dim == 0
    assert e1.intersect(e1) == e1
    assert (e1 + e2) == Subspace.full(F3, 2)
    assert e1.contains(M(F3, [["x", "0"]])[0])
    assert not e1.contains(M(F3, [["x", "1"]])[0])
    with pytest.raises(Exception):
        e1 + Subspace.full(F3, 3)


def test_solve_and_inverse(F3):
    rows = M(F3, [["x", "1"], ["1", "y"]])
    inv = linalg.inverse(F3, rows)
    prod = [[sum((rows[i][k] * inv[k][j] for k in range(2)), F3.zero()) for j in range(2)] for i in range(2)]
    assert prod == M(F3, [["1", "0"], ["0", "1"]])
    rhs = M(F3, [["x + 1", "y + 1"]])[0]
    a = linalg.solve(F3, rows, rhs)
    assert [a[0] * rows[0][j] + a[1] * rows[1][j] for j in range(2)] == rhs
