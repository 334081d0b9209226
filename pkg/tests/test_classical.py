import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F7, F101
from oracles import intertwiner_dim, jordan
from wildmf import fixtures as fx
from wildmf import linalg
from wildmf.classical import (drozd_certify, drozd_embed, gp_certify, gp_embed, module_hom_basis,
                              module_isomorphism_verdict)
from wildmf.errors import ConfigurationError, DistinctnessError, FieldTooSmallError
from wildmf.fields import PrimeField
from wildmf.homs import HomBasis


def identity_basis(M):
    d = M.dim
    return HomBasis(M.field, [{i * d + i: M.field.one for i in range(d)}], d * d,
                    lambda v: v.reshape(d, d), "module")


def brute_module_dim(M, M2):
    return intertwiner_dim(M.field, [(M.A, M2.A), (M.B, M2.B)], M.dim, M2.dim)


# Gelfand-Ponomarev style embedding ----------------------------------------------------

def test_gp_matrices_m2_n1():
    M = gp_embed(F101, [[[0]], [[0]]], cs=(0, 1))
    assert F101.equal(M.A, F101.array([[0, 0], [0, 1]]))
    assert F101.equal(M.B, F101.array([[0, 0], [1, 0]]))


def test_gp_zero_operators_hom_is_scalar():
    M = gp_embed(F101, [[[0]], [[0]]])
    basis = module_hom_basis(M, M)
    assert basis.dim == 1 == brute_module_dim(M, M)
    S = basis[0]
    assert S[0, 1] == 0 and S[1, 0] == 0 and S[0, 0] == S[1, 1] != 0


def test_gp_shapes_m3():
    rng = np.random.default_rng(0)
    Xs = fx.random_operators(F101, 3, 4, rng)
    M = gp_embed(F101, Xs, cs=(1, 2, 3))
    assert M.A.shape == M.B.shape == (12, 12)
    assert M.relations() == {}


def test_gp_jordan_example():
    J = jordan(F101, 2)
    M = gp_embed(F101, [J, F101.zeros((2, 2))])
    rep = gp_certify(M, M)
    assert rep.ok
    assert rep.dim_hom == rep.dim_operator_hom == 2
    assert rep.dim_hom == brute_module_dim(M, M)
    assert intertwiner_dim(F101, [(J, J), (F101.zeros((2, 2)),) * 2], 2, 2) == 2


def test_gp_zero_against_identity():
    M = gp_embed(F101, [[[0]], [[0]]])
    M2 = gp_embed(F101, [[[1]], [[0]]])
    rep = gp_certify(M, M2)
    assert rep.ok and rep.dim_hom == rep.dim_operator_hom == 0


def test_gp_identity_certifies():
    rng = np.random.default_rng(1)
    M = gp_embed(F101, fx.random_operators(F101, 2, 3, rng))
    rep = gp_certify(M, M, identity_basis(M))
    assert not rep.failures
    assert F101.equal(rep.sigmas[0], F101.eye(3))


@settings(max_examples=30)
@given(st.integers(0, 2 ** 16), st.integers(1, 3), st.integers(1, 3))
def test_gp_dimension_equality(seed, m, n):
    rng = np.random.default_rng(seed)
    Xs = fx.random_tuple(F7, m, n, rng).matrices if seed % 2 else fx.random_operators(F7, m, n, rng)
    P = fx.random_invertible(F7, n, rng)
    Pinv = linalg.inverse(F7, P)
    Ys = [F7.matmul(F7.matmul(P, X), Pinv) for X in Xs] if seed % 3 else fx.random_operators(F7, m, n, rng)
    M, M2 = gp_embed(F7, Xs), gp_embed(F7, Ys)
    rep = gp_certify(M, M2)
    assert rep.ok, rep.failures
    want = intertwiner_dim(F7, list(zip(Xs, Ys)), n, n)
    assert rep.dim_hom == rep.dim_operator_hom == want == brute_module_dim(M, M2)


def test_gp_errors():
    with pytest.raises(DistinctnessError):
        gp_embed(F101, [[[0]], [[0]]], cs=(3, 3))
    with pytest.raises(FieldTooSmallError):
        gp_embed(PrimeField(3), [[[0]]] * 4)
    with pytest.raises(ConfigurationError):
        gp_embed(F101, [[[0]], [[0, 0], [0, 0]]])


# Drozd style embedding ---------------------------------------------------------------

def test_drozd_n1_relations():
    M = drozd_embed(F101, [[0]], [[0]], cs=(1, 2, 3, 4, 5))
    assert M.dim == 32
    assert all(M.relations().values())


def test_drozd_a_has_single_corner_block():
    for n in (1, 2):
        M = drozd_embed(F101, F101.zeros((n, n)), F101.eye(n))
        A = M.A.copy()
        assert F101.equal(A[:15 * n, -15 * n:], F101.eye(15 * n))
        A[:15 * n, -15 * n:] = 0
        assert F101.is_zero_array(A)


def test_drozd_n2_jordan():
    M = drozd_embed(F101, jordan(F101, 2), F101.zeros((2, 2)))
    assert M.dim == 64
    assert all(M.relations().values())


@settings(max_examples=20)
@given(st.integers(0, 2 ** 16), st.integers(1, 3))
def test_drozd_relations_random(seed, n):
    rng = np.random.default_rng(seed)
    X, Y = fx.random_operators(F7, 2, n, rng)
    assert all(drozd_embed(F7, X, Y).relations().values())


def test_drozd_scalar_example():
    M = drozd_embed(F101, [[0]], [[0]])
    rep = drozd_certify(M, M)
    assert rep.ok and rep.surjective and rep.section_ok
    assert rep.dim_operator_hom == 1
    assert rep.dim_hom == brute_module_dim(M, M)
    assert rep.dim_hom > rep.dim_operator_hom


def test_drozd_zero_against_one():
    M = drozd_embed(F101, [[0]], [[0]])
    M2 = drozd_embed(F101, [[1]], [[0]])
    rep = drozd_certify(M, M2)
    assert rep.ok
    assert all(F101.is_zero_array(s) for s in rep.sigmas)
    assert module_isomorphism_verdict(M, M2, rep).answer == "no"
    # no invertible hom: the diagonal of every S vanishes
    rng = np.random.default_rng(0)
    basis = module_hom_basis(M, M2)
    for _ in range(5):
        assert not linalg.is_invertible(F101, basis.random_element(rng))


def test_drozd_identity_certifies():
    M = drozd_embed(F101, [[2]], [[3]])
    rep = drozd_certify(M, M, identity_basis(M))
    assert not rep.failures
    assert F101.equal(rep.sigmas[0], F101.eye(1))


def test_drozd_field_too_small():
    with pytest.raises(FieldTooSmallError):
        drozd_embed(PrimeField(3), [[0]], [[0]])


def test_certifier_rejects_a_tampered_basis():
    M = drozd_embed(F101, [[0]], [[0]])
    S = F101.eye(M.dim)
    S[5, 0] = 1  # below the diagonal
    bad = HomBasis(F101, [{k: int(x) for k, x in enumerate(S.reshape(-1)) if x}], M.dim ** 2,
                   lambda v: v.reshape(M.dim, M.dim), "module")
    rep = drozd_certify(M, M, bad)
    assert not rep.ok
    assert rep.failures[0]["check"] == "block upper triangular"


@pytest.mark.parametrize("embed", ["gp", "drozd"])
def test_isomorphism_preserved_and_reflected(embed):
    rng = np.random.default_rng(4)
    X, Y = fx.random_tuple(F101, 2, 2, rng, "jordan").matrices
    P = fx.random_invertible(F101, 2, rng)
    Pinv = linalg.inverse(F101, P)
    conj = [F101.matmul(F101.matmul(P, Z), Pinv) for Z in (X, Y)]
    other = [jordan(F101, 2), F101.zeros((2, 2))]
    base = [F101.zeros((2, 2)), F101.zeros((2, 2))]
    build = (lambda ops: gp_embed(F101, ops)) if embed == "gp" else (lambda ops: drozd_embed(F101, *ops))
    certify = gp_certify if embed == "gp" else drozd_certify
    M, M2 = build([X, Y]), build(conj)
    rep = certify(M, M2)
    v = module_isomorphism_verdict(M, M2, rep)
    assert v.answer == "yes" and linalg.is_invertible(F101, v.witness)
    assert F101.equal(F101.matmul(v.witness, M.A), F101.matmul(M2.A, v.witness))
    assert F101.equal(F101.matmul(v.witness, M.B), F101.matmul(M2.B, v.witness))
    N, N2 = build(base), build(other)
    assert module_isomorphism_verdict(N, N2, certify(N, N2)).answer == "no"
