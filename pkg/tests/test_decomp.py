import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F7, F101
from oracles import coeff_dict, to_sympy
from wildmf import fixtures as fx
from wildmf.decomp import decompose, quadratic_tail, rewrite_quadratic
from wildmf.errors import EmptyInputError, OrderTooLowError, PreconditionError
from wildmf.fields import QQ
from wildmf.series import SeriesRing, monomials_of_degree

P1 = SeriesRing.standard(1, F101)
P2 = SeriesRing.standard(2, F101)


def test_rewrite_z_squared():
    rw = rewrite_quadratic(P1, (0, 2))
    assert rw.h == P1.one()
    assert all(g.is_zero() for g in rw.g)


def test_rewrite_xz():
    rw = rewrite_quadratic(P1, (1, 1))
    assert rw.g[0] == P1.gen("z")
    assert rw.h == P1.gen("a1")
    assert rw.expand() == P1.parse("x1*z")


def test_rewrite_mixed_pair():
    rw = rewrite_quadratic(P2, (1, 1, 0))
    assert rw.g[0] == P2.gen("x2")
    assert rw.g[1] == P2.parse("a1*z")
    assert rw.h == P2.parse("a1*a2")
    assert rw.expand() == P2.parse("x1*x2")


def test_rewrite_needs_degree_two():
    with pytest.raises(PreconditionError):
        rewrite_quadratic(P1, (1, 2))


def test_quadratic_tail_takes_largest_variables():
    # x1 < x2 < z: z's go first, then the largest x's
    assert quadratic_tail((1, 1, 2)) == (0, 0, 2)
    assert quadratic_tail((2, 1, 1)) == (0, 1, 1)
    assert quadratic_tail((3, 0, 0)) == (2, 0, 0)


def test_z4():
    R = SeriesRing(F101, ("z",))
    dec = decompose(R.parse("z^4"))
    assert dec.n == 0
    assert dec.h == dec.ring.parse("z^2")


def test_z4_with_x_variables():
    R = SeriesRing.standard(2, F101, with_params=False)
    dec = decompose(R.parse("z^4"))
    assert dec.h == dec.ring.parse("z^2")
    assert all(g.is_zero() for g in dec.g)


def test_x1_fourth():
    R = SeriesRing.standard(1, F101, with_params=False)
    dec = decompose(R.parse("x1^4"))
    ring = dec.ring
    assert dec.h == ring.parse("a1^2*x1^2")
    assert dec.g[0] == ring.parse("x1^3 + a1*x1^2*z")
    # independent expansion of z^2 h + (x1 - a1 z) g1
    expr = to_sympy(ring.parse("z^2")) * to_sympy(dec.h) + to_sympy(ring.parse("x1 - a1*z")) * to_sympy(dec.g[0])
    assert coeff_dict(expr, ring.names, F101) == dec.f.to_ring(ring).terms


def test_x1x2z2():
    R = SeriesRing.standard(2, F101, with_params=False)
    dec = decompose(R.parse("x1*x2*z^2"))
    assert dec.is_valid()
    assert dec.h.order >= 2 and all(g.order >= 3 for g in dec.g)


def test_errors():
    R = SeriesRing.standard(1, F101, with_params=False)
    with pytest.raises(OrderTooLowError):
        decompose(R.parse("x1^3 + z^5"))
    with pytest.raises(EmptyInputError):
        decompose(R.zero())
    with pytest.raises(PreconditionError):
        decompose(R.parse("x1^4", trunc=6))


def test_deterministic():
    R = SeriesRing.standard(2, F101, with_params=False)
    f = R.parse("x1^4 + 3*x1*x2*z^3 - x2^5")
    a, b = decompose(f), decompose(f)
    assert a.h == b.h and a.g == b.g


@st.composite
def order4(draw):
    n = draw(st.integers(1, 3))
    field = draw(st.sampled_from([F101, QQ, F7]))
    seed = draw(st.integers(0, 2 ** 20))
    ring = SeriesRing.standard(n, field, with_params=False)
    return fx.random_order4_poly(ring, np.random.default_rng(seed))


@given(order4())
def test_recomposition_and_order_bounds(f):
    dec = decompose(f)
    expr = to_sympy(dec.ring.gen("z")) ** 2 * to_sympy(dec.h)
    for i, g in enumerate(dec.g):
        expr += to_sympy(dec.linear_forms()[i]) * to_sympy(g)
    assert coeff_dict(expr, dec.ring.names, f.field) == f.to_ring(dec.ring).terms
    assert dec.h.order >= 2
    assert all(g.order >= 3 for g in dec.g)


@given(st.integers(1, 3), st.integers(4, 8), st.integers(0, 2 ** 16))
def test_degree_and_parameter_bookkeeping(n, d, seed):
    # a single monomial of degree d feeds degree d-1 into every g_i and d-2 into h,
    # with parameter degree at most 1 in g_i and at most 2 in h
    rng = np.random.default_rng(seed)
    ring = SeriesRing.standard(n, F101, with_params=False)
    monos = monomials_of_degree(n + 1, d)
    w = monos[int(rng.integers(len(monos)))]
    dec = decompose(ring.monomial(w))
    nv = dec.ring.nvars
    for key in dec.h.terms:
        assert sum(key[:nv]) == d - 2 and sum(key[nv:]) <= 2
    for g in dec.g:
        for key in g.terms:
            assert sum(key[:nv]) == d - 1 and sum(key[nv:]) <= 1
