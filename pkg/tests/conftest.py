import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from wildmf.fields import QQ, PrimeField  # noqa: E402
from wildmf.series import Series, SeriesRing  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F7 = PrimeField(7)
F101 = PrimeField(101)


@pytest.fixture(params=[F101, QQ], ids=["F101", "Q"])
def field(request):
    return request.param


def scalars(field):
    if field is QQ:
        return st.fractions(min_value=-6, max_value=6, max_denominator=4)
    return st.integers(0, field.p - 1)


@st.composite
def series_in(draw, ring: SeriesRing, max_deg: int = 3, max_terms: int = 5, params: bool = True):
    nv, npar = ring.nvars, ring.nparams
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        geo = tuple(draw(st.integers(0, max_deg)) for _ in range(nv))
        par = tuple(draw(st.integers(0, 2)) if params else 0 for _ in range(npar))
        terms[geo + par] = draw(scalars(ring.field))
    return Series(ring, terms)


@st.composite
def matrices(draw, field, rows, cols):
    vals = draw(st.lists(scalars(field), min_size=rows * cols, max_size=rows * cols))
    return field.array(np.array(vals, dtype=object).reshape(rows, cols))


def as_fraction(x):
    return Fraction(x)
