import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F7, F101, series_in
from oracles import jordan
from wildmf import fixtures as fx
from wildmf import linalg
from wildmf.decomp import decompose
from wildmf.errors import ArityMismatchError, ConfigurationError, InvalidHomError
from wildmf.fields import QQ
from wildmf.homs import tuple_hom_basis
from wildmf.inflation import (CommutingTuple, EmbeddingFunctor, TupleHom, check_functoriality,
                              functor_morphism, functor_object, inflate_matrix)
from wildmf.matfac import verify_factorization
from wildmf.series import SeriesRing
from wildmf.smatrix import SeriesMatrix

P1 = SeriesRing.standard(1, F101)
R1 = SeriesRing.standard(1, F101, with_params=False)


def test_inflate_scalar_specialization():
    P = SeriesMatrix.from_entries(P1, [[P1.gen("a1")]])
    out = inflate_matrix(P, CommutingTuple(F101, [[[5]]]))
    assert out == SeriesMatrix.from_entries(R1, [[R1.const(5)]])


def test_inflate_linear_form_by_lower_shift():
    # with the lower shift as the nilpotent 2-block: x1 I - z N
    N = F101.array([[0, 0], [1, 0]])
    P = SeriesMatrix.from_entries(P1, [[P1.parse("x1 - a1*z")]])
    out = inflate_matrix(P, CommutingTuple(F101, [N]))
    x1, z = R1.gen("x1"), R1.gen("z")
    assert out == SeriesMatrix.from_entries(R1, [[x1, R1.zero()], [-z, x1]])
    # the upper shift gives the transpose
    out = inflate_matrix(P, CommutingTuple(F101, [jordan(F101, 2)]))
    assert out == SeriesMatrix.from_entries(R1, [[x1, -z], [R1.zero(), x1]])


P2 = SeriesRing.standard(2, F7)


@st.composite
def param_matrix(draw, rows, cols):
    return SeriesMatrix.from_entries(
        P2, [[draw(series_in(P2, max_deg=1, max_terms=3)) for _ in range(cols)] for _ in range(rows)])


@given(param_matrix(2, 2), param_matrix(2, 2), st.integers(0, 2 ** 16))
def test_inflation_is_multiplicative(P, Q, seed):
    A = fx.random_tuple(F7, 2, 3, np.random.default_rng(seed))
    assert inflate_matrix(P @ Q, A) == inflate_matrix(P, A) @ inflate_matrix(Q, A)
    assert inflate_matrix(P + Q, A) == inflate_matrix(P, A) + inflate_matrix(Q, A)


def test_functor_object_scalar_tuple():
    lam = 3
    mf = functor_object(decompose(R1.parse("x1^4")), CommutingTuple(F101, [[[lam]]]))
    x1, z = R1.gen("x1"), R1.gen("z")
    g1 = x1 ** 3 + lam * x1 * x1 * z
    h = lam * lam * x1 * x1
    assert mf.phi == SeriesMatrix.from_entries(R1, [[z * z, -g1], [x1 - lam * z, h]])
    assert mf.psi == SeriesMatrix.from_entries(R1, [[h, g1], [-(x1 - lam * z), z * z]])
    assert verify_factorization(mf).ok


def test_functor_object_pure_z():
    R = SeriesRing.standard(1, F101, with_params=False)
    dec = decompose(R.parse("z^4"))
    A = fx.random_tuple(F101, 1, 3, np.random.default_rng(1))
    mf = functor_object(dec, A)
    assert verify_factorization(mf).ok
    # phi = [[z^2 I, 0], [(x1 I - A z), z^2 I]] since h = z^2 and g = 0
    assert mf.phi.submatrix(slice(0, 3), slice(3, 6)).is_zero()


@given(st.integers(0, 2 ** 16), st.sampled_from(fx.TUPLE_KINDS), st.sampled_from([F101, QQ]))
def test_size_law_and_identity(seed, kind, field):
    rng = np.random.default_rng(seed)
    n, m = 1 + seed % 2, 1 + seed % 3
    ring = SeriesRing.standard(n, field, with_params=False)
    f = fx.random_order4_poly(ring, rng, max_terms=4)
    A = fx.random_tuple(field, n, m, rng, kind)
    mf = functor_object(decompose(f), A)
    assert mf.size == m * 2 ** n
    assert verify_factorization(mf).ok


def test_functor_object_pair_8x8():
    rng = np.random.default_rng(7)
    ring = SeriesRing.standard(2, F101, with_params=False)
    f = fx.random_order4_poly(ring, rng)
    A = fx.random_tuple(F101, 2, 2, rng, "jordan")
    mf = functor_object(decompose(f), A)
    assert mf.size == 8 and verify_factorization(mf).ok


def test_errors():
    dec = decompose(R1.parse("x1^4"))
    with pytest.raises(ArityMismatchError):
        functor_object(dec, CommutingTuple(F101, [[[1]], [[2]]]))
    with pytest.raises(ConfigurationError):
        functor_object(dec, CommutingTuple(F7, [[[1]]]))
    A = CommutingTuple(F101, [jordan(F101, 2)])
    with pytest.raises(InvalidHomError):
        TupleHom(A, A, F101.array([[1, 0], [0, 0]]))


def test_functor_morphism_examples():
    dec = decompose(R1.parse("x1^4"))
    A = CommutingTuple(F101, [jordan(F101, 2)])
    ident = functor_morphism(dec, TupleHom.identity(A))
    assert ident.S == SeriesMatrix.identity(R1, 4)
    zero = functor_morphism(dec, TupleHom.zero(A, A))
    assert zero.S.is_zero() and zero.T.is_zero()
    # the square-zero generator of the commutant of J2(0)
    hom = functor_morphism(dec, TupleHom(A, A, jordan(F101, 2)))
    assert hom.is_valid()
    assert hom.S == hom.T


def test_short_exact_sequence_ranks():
    dec = decompose(R1.parse("x1^4 + z^5"))
    F = EmbeddingFunctor(dec)
    J1 = CommutingTuple(F101, [[[0]]])
    J2 = CommutingTuple(F101, [jordan(F101, 2)])
    inc = TupleHom(J1, J2, F101.array([[1], [0]]))
    proj = TupleHom(J2, J1, F101.array([[0, 1]]))
    rep = check_functoriality(F, inc, proj)
    assert rep.ok
    assert rep.ranks[0] == (1, 2) and rep.ranks[1] == (1, 2) and rep.ranks[2] == (0, 0)


@given(st.integers(0, 2 ** 16))
def test_functoriality_random_over_f7(seed):
    rng = np.random.default_rng(seed)
    ring = SeriesRing.standard(2, F7, with_params=False)
    F = EmbeddingFunctor(decompose(fx.random_order4_poly(ring, rng, max_terms=3)))
    A = fx.random_tuple(F7, 2, 2, rng)
    B = A.conjugate(fx.random_invertible(F7, 2, rng))
    C = B.direct_sum(fx.random_tuple(F7, 2, 1, rng))
    U = TupleHom(A, B, tuple_hom_basis(A, B).random_element(rng))
    V = TupleHom(B, C, tuple_hom_basis(B, C).random_element(rng))
    rep = check_functoriality(F, U, V)
    assert rep.ok
    for r, R in rep.ranks:
        assert R == 4 * r


def test_identity_composite():
    F = EmbeddingFunctor(decompose(R1.parse("x1^4")))
    A = CommutingTuple(F101, [jordan(F101, 2, 4)])
    I = TupleHom.identity(A)
    rep = check_functoriality(F, I, I)
    assert rep.ok
    assert linalg.rank(F101, F.lift_matrix(I.U).scalar_strand((0, 0))) == 4
