from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F7, F101, matrices, scalars, series_in
from oracles import coeff_dict, jordan, schoolbook_matmul, to_sympy
from wildmf import fixtures as fx
from wildmf.errors import ConfigurationError, NonCommutingError, ParseError, TruncationError
from wildmf.fields import QQ, PrimeField, parse_field
from wildmf.inflation import CommutingTuple, eval_params
from wildmf.series import ParamPoly, Series, SeriesRing
from wildmf.smatrix import SeriesMatrix

R1 = SeriesRing.standard(1, F101)
R2 = SeriesRing.standard(2, F101)
R2Q = SeriesRing.standard(2, QQ)


# fields --------------------------------------------------------------------

def test_field_descriptors():
    assert parse_field("Fp:101") == F101
    assert parse_field("Q") is QQ
    assert str(PrimeField(7)) == "Fp:7"
    with pytest.raises(ParseError):
        parse_field("R")


@pytest.mark.parametrize("p", [2, 9, 1])
def test_prime_field_rejects_even_or_composite(p):
    with pytest.raises(ConfigurationError):
        PrimeField(p)


@given(st.integers(0, 100), st.integers(0, 100), st.integers(0, 100))
def test_prime_field_axioms(a, b, c):
    f = F101
    a, b, c = f(a), f(b), f(c)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.mul(a, b) == f.mul(b, a)
    if a:
        assert f.mul(a, f.inv(a)) == 1


@given(scalars(QQ))
def test_rational_inverse(a):
    if a:
        assert QQ.mul(QQ(a), QQ.inv(QQ(a))) == 1


@given(matrices(F7, 3, 2), matrices(F7, 2, 4))
def test_prime_matmul_matches_schoolbook(A, B):
    assert F7.matmul(A, B).tolist() == schoolbook_matmul(F7, A, B)


@given(matrices(QQ, 2, 3), matrices(QQ, 3, 2))
def test_rational_matmul_matches_schoolbook(A, B):
    assert QQ.matmul(A, B).tolist() == schoolbook_matmul(QQ, A, B)


# series: examples ------------------------------------------------------------

def test_monomial_product():
    x1, z = R1.gen("x1"), R1.gen("z")
    assert x1 * z == R1.parse("x1*z")


def test_difference_of_squares():
    x1, z, a1 = R1.gen("x1"), R1.gen("z"), R1.gen("a1")
    assert (x1 - a1 * z) * (x1 + a1 * z) == R1.parse("x1^2 - a1^2*z^2")


def test_truncation_kills_degree_two():
    p = R1.parse("x1 + z", trunc=2)
    assert (p * p).is_zero()


def test_strand_examples():
    E = SeriesMatrix.from_entries(R1, [[R1.parse("x1^2 + 3*z^2")]])
    assert E.strand((0, 2))[0][0] == ParamPoly(F101, R1.params, {(0,): 3})
    L = SeriesMatrix.from_entries(R1, [[R1.parse("x1 - a1*z")]])
    assert L.strand((0, 1))[0][0] == ParamPoly(F101, R1.params, {(1,): F101(-1)})


def test_strand_beyond_truncation_is_an_error():
    E = SeriesMatrix.from_entries(R1, [[R1.parse("x1", trunc=2)]])
    with pytest.raises(TruncationError):
        E.strand((1, 1))
    with pytest.raises(TruncationError):
        R1.parse("x1", trunc=2).coeff((2, 0))


def test_reduce_mod_msq():
    R = SeriesRing.standard(1, F101, with_params=False)
    E = SeriesMatrix.from_entries(R, [[R.parse("z^2 + x1")]])
    red = E.reduce_mod_msq()
    assert red == SeriesMatrix.from_entries(R, [[R.parse("x1")]], trunc=2)
    assert red.trunc == 2
    Z = SeriesMatrix.zeros(R, 2, 2)
    assert Z.reduce_mod_msq().is_zero()


def test_mismatched_rings_raise():
    with pytest.raises(ConfigurationError):
        R1.gen("x1") * R2.gen("x1")


def test_order_of_zero_is_infinite():
    import math
    assert R1.zero().order == math.inf


# series: properties ----------------------------------------------------------

@given(series_in(R2), series_in(R2), series_in(R2))
def test_series_ring_laws(p, q, r):
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == R2.zero()


@given(series_in(R2Q, params=False), series_in(R2Q, params=False))
def test_order_is_additive_over_q(p, q):
    # over Q the leading forms of nonzero polynomials multiply to a nonzero form
    if p and q:
        assert (p * q).order == p.order + q.order


@given(series_in(R2), series_in(R2))
def test_order_superadditive(p, q):
    assert (p * q).order >= p.order + q.order


@given(series_in(R2), series_in(R2))
def test_product_matches_symbolic_expansion(p, q):
    expected = coeff_dict(to_sympy(p) * to_sympy(q), R2.names, F101)
    assert (p * q).terms == expected


@given(series_in(R2, max_deg=2, max_terms=3), series_in(R2, max_deg=2, max_terms=3))
def test_parse_roundtrip(p, q):
    s = p * q - q
    assert R2.parse(str(s)) == s


@st.composite
def small_matrix(draw, ring, rows, cols):
    return SeriesMatrix.from_entries(
        ring, [[draw(series_in(ring, max_deg=2, max_terms=2)) for _ in range(cols)] for _ in range(rows)])


@given(small_matrix(R1, 2, 3), small_matrix(R1, 3, 2))
def test_strand_convolution(E, F):
    # (E F){w} = sum over u + v = w of E{u} F{v}, parameters included
    prod = E @ F
    for w in [(0, 0), (1, 0), (1, 1), (2, 1), (0, 3)]:
        lhs = prod.strand(w)
        rhs = [[ParamPoly(F101, R1.params) for _ in range(2)] for _ in range(2)]
        for u0 in range(w[0] + 1):
            for u1 in range(w[1] + 1):
                u, v = (u0, u1), (w[0] - u0, w[1] - u1)
                Eu, Fv = E.strand(u), F.strand(v)
                for i in range(2):
                    for j in range(2):
                        for k in range(3):
                            rhs[i][j] = rhs[i][j] + Eu[i][k] * Fv[k][j]
        assert lhs == rhs


# parameter evaluation -----------------------------------------------------------

R2P = SeriesRing.standard(2, F7)


@st.composite
def param_polys(draw, field=F7, nparams=2):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        terms[tuple(draw(st.integers(0, 2)) for _ in range(nparams))] = draw(scalars(field))
    return ParamPoly(field, ("a1", "a2"), terms)


@st.composite
def commuting_pairs(draw, field=F7, m=3):
    seed = draw(st.integers(0, 2 ** 16))
    rng = np.random.default_rng(seed)
    return fx.random_tuple(field, 2, m, rng, kind=draw(st.sampled_from(fx.TUPLE_KINDS)))


@given(param_polys(), param_polys(), commuting_pairs())
def test_eval_is_ring_homomorphism(p, q, A):
    f = F7
    assert f.equal(eval_params(p + q, A), f.reduce_array(eval_params(p, A) + eval_params(q, A)))
    assert f.equal(eval_params(p * q, A), f.matmul(eval_params(p, A), eval_params(q, A)))


def test_eval_examples():
    f = F7
    comm = ParamPoly(f, ("a1", "a2"), {(1, 1): 1}) - ParamPoly(f, ("a1", "a2"), {(1, 1): 1})
    A = fx.random_tuple(f, 2, 3, np.random.default_rng(0), "jordan")
    assert f.is_zero_array(eval_params(comm, A))
    J = jordan(f, 2, 3)
    sq = ParamPoly(f, ("a1",), {(2,): 1})
    assert f.equal(eval_params(sq, CommutingTuple(f, [J])), f.matmul(J, J))
    # a1 a2 on a pair of polynomials in one matrix equals both orders of the product
    prod = ParamPoly(f, ("a1", "a2"), {(1, 1): 1})
    got = eval_params(prod, A)
    assert f.equal(got, f.matmul(A[0], A[1])) and f.equal(got, f.matmul(A[1], A[0]))
    assert f.equal(eval_params(ParamPoly(f, ("a1",), {(0,): 4}), CommutingTuple(f, [J])), f.scalar_matrix(4, 2))


def test_noncommuting_tuple_is_rejected():
    f = F7
    A = f.array([[0, 1], [0, 0]])
    B = f.array([[0, 0], [1, 0]])
    with pytest.raises(NonCommutingError) as exc:
        CommutingTuple(f, [A, B])
    assert exc.value.witness["i"] == 1 and exc.value.witness["j"] == 2
    assert not f.is_zero_array(exc.value.witness["commutator"])


def test_fraction_parse():
    assert QQ("3/2") == Fraction(3, 2)
    assert F101("1/2") == 51
