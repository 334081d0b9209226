import numpy as np
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import F7, F101, matrices
from oracles import rank as oracle_rank
from wildmf import linalg
from wildmf.fields import QQ


@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_rank_matches_schoolbook(r, c, data):
    for f in (F7, QQ):
        M = data.draw(matrices(f, r, c))
        assert linalg.rank(f, M) == oracle_rank(f, M.tolist())


@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_nullspace_vectors_are_kernel(r, c, data):
    M = data.draw(matrices(F7, r, c))
    ns = linalg.nullspace(F7, M)
    assert len(ns) == c - oracle_rank(F7, M.tolist())
    for v in ns:
        assert F7.is_zero_array(F7.matmul(M, v.reshape(-1, 1)))


@given(st.integers(1, 6), st.integers(1, 8), st.data())
def test_sparse_nullspace_matches_dense(r, c, data):
    M = data.draw(matrices(F7, r, c))
    rows = [{j: int(x) for j, x in enumerate(row) if x} for row in M]
    sparse = linalg.sparse_nullspace(F7, rows, c)
    assert len(sparse) == len(linalg.nullspace(F7, M))
    for vec in sparse:
        v = linalg.sparse_to_dense(F7, vec, c)
        assert F7.is_zero_array(F7.matmul(M, v.reshape(-1, 1)))


@given(st.integers(1, 4), st.data())
def test_det_matches_sympy(n, data):
    M = data.draw(matrices(QQ, n, n))
    assert linalg.det(QQ, M) == sympy.Matrix(M.tolist()).det()


@given(st.integers(1, 4), st.data())
def test_inverse(n, data):
    M = data.draw(matrices(F101, n, n))
    if linalg.is_invertible(F101, M):
        assert F101.equal(F101.matmul(M, linalg.inverse(F101, M)), F101.eye(n))
    else:
        assert linalg.det(F101, M) == 0


def test_nilpotent():
    J = F7.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert linalg.is_nilpotent(F7, J)
    assert not linalg.is_nilpotent(F7, F7.eye(2))


def test_row_basis_spans():
    vecs = [F7.array([1, 2, 3]), F7.array([2, 4, 6]), F7.array([0, 1, 1])]
    B = linalg.row_basis(F7, vecs, 3)
    assert B.shape[0] == 2
    assert linalg.rank(F7, np.concatenate([B, np.stack(vecs)])) == 2
