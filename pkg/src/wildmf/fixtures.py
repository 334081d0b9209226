"""Seeded generators for polynomials, commuting tuples and operator data."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import linalg
from .fields import Field
from .inflation import CommutingTuple
from .series import Series, SeriesRing, monomials_of_degree


def random_order4_poly(ring: SeriesRing, rng: np.random.Generator, max_degree: int = 8,
                       max_terms: int = 8) -> Series:
    """Nonzero polynomial of order >= 4 and degree <= ``max_degree``, parameter-free."""
    field = ring.field
    nv = ring.nvars
    pad = (0,) * ring.nparams
    while True:
        terms = {}
        for _ in range(int(rng.integers(1, max_terms + 1))):
            d = int(rng.integers(4, max_degree + 1))
            monos = monomials_of_degree(nv, d)
            w = monos[int(rng.integers(len(monos)))]
            terms[w + pad] = field.random(rng, nonzero=True)
        f = Series(ring, terms)
        if f:
            return f


def jordan_block(field: Field, size: int, lam=0) -> np.ndarray:
    J = field.scalar_matrix(lam, size)
    for i in range(size - 1):
        J[i, i + 1] = field.one
    return J


def jordan_matrix(field: Field, blocks: Sequence[tuple[int, object]]) -> np.ndarray:
    """Block diagonal of Jordan blocks ``(size, eigenvalue)``."""
    m = sum(s for s, _ in blocks)
    out = field.zeros((m, m))
    pos = 0
    for size, lam in blocks:
        out[pos:pos + size, pos:pos + size] = jordan_block(field, size, lam)
        pos += size
    return out


def random_invertible(field: Field, m: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        P = field.random_array(rng, (m, m))
        if linalg.is_invertible(field, P):
            return P


def _poly_in(field: Field, M: np.ndarray, coeffs) -> np.ndarray:
    out = field.zeros(M.shape)
    power = field.eye(M.shape[0])
    for c in coeffs:
        out = field.reduce_array(out + field(c) * power)
        power = field.matmul(power, M)
    return out


def partitions(m: int, largest: int | None = None) -> list[tuple[int, ...]]:
    largest = m if largest is None else largest
    if m == 0:
        return [()]
    out = []
    for k in range(min(m, largest), 0, -1):
        out.extend((k,) + rest for rest in partitions(m - k, k))
    return out


TUPLE_KINDS = ("jordan", "nilpotent", "square_zero", "diagonal", "scalar")


def random_tuple(field: Field, n: int, m: int, rng: np.random.Generator, kind: str | None = None,
                 conjugate: bool = True) -> CommutingTuple:
    """Random commuting ``n``-tuple of ``m x m`` matrices.

    ``jordan``: polynomials in one random Jordan matrix; ``nilpotent``:
    polynomials without constant term in a nilpotent Jordan matrix;
    ``square_zero``: matrices mapping onto a subspace they all kill;
    ``diagonal``: diagonal matrices; ``scalar``: multiples of the identity.
    """
    kind = kind or TUPLE_KINDS[int(rng.integers(len(TUPLE_KINDS)))]
    if kind in ("jordan", "nilpotent"):
        parts = partitions(m)
        part = parts[int(rng.integers(len(parts)))]
        lams = [0] * len(part) if kind == "nilpotent" else [int(rng.integers(0, 5)) for _ in part]
        M = jordan_matrix(field, list(zip(part, lams)))
        mats = []
        for _ in range(n):
            coeffs = [field.random(rng) for _ in range(m)]
            if kind == "nilpotent":
                coeffs[0] = 0
            mats.append(_poly_in(field, M, coeffs))
    elif kind == "square_zero":
        k = max(1, m // 2)
        mats = []
        for _ in range(n):
            X = field.zeros((m, m))
            X[:k, k:] = field.random_array(rng, (k, m - k))
            mats.append(X)
    elif kind == "diagonal":
        mats = [field.zeros((m, m)) for _ in range(n)]
        for X in mats:
            for i in range(m):
                X[i, i] = field.random(rng)
    elif kind == "scalar":
        mats = [field.scalar_matrix(field.random(rng), m) for _ in range(n)]
    else:
        raise ValueError(f"unknown tuple kind {kind!r}")
    A = CommutingTuple(field, mats, m)
    if conjugate and m > 1:
        A = A.conjugate(random_invertible(field, m, rng))
    return A


def jordan_type_tuple(field: Field, n: int, partition: Sequence[int], rng: np.random.Generator,
                      conjugate: bool = True) -> CommutingTuple:
    """First matrix nilpotent of the given Jordan type, the rest polynomials in it."""
    m = sum(partition)
    M = jordan_matrix(field, [(s, 0) for s in partition])
    mats = [M]
    for _ in range(n - 1):
        coeffs = [field.random(rng) for _ in range(m)]
        mats.append(_poly_in(field, M, coeffs))
    A = CommutingTuple(field, mats, m)
    if conjugate and m > 1:
        A = A.conjugate(random_invertible(field, m, rng))
    return A


def random_operators(field: Field, count: int, size: int, rng: np.random.Generator,
                     density: float = 0.5) -> list[np.ndarray]:
    """Arbitrary (not necessarily commuting) sparse-ish operators."""
    out = []
    for _ in range(count):
        X = field.random_array(rng, (size, size))
        keep = rng.random((size, size)) < density
        Y = field.zeros((size, size))
        Y[keep] = X[keep]
        out.append(Y)
    return out
