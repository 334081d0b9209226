"""Rewriting an order >= 4 polynomial as ``z^2 h + sum (x_i - a_i z) g_i``.

Every quadratic monomial lies in ``(z^2) + I*m`` with ``I = (x_i - a_i z)``:

    z^2     = z^2 * 1
    x_i z   = (x_i - a_i z) z + a_i z^2
    x_i x_j = (x_i - a_i z) x_j + a_i (x_j z)       (then the x_j z rule)

A monomial ``w`` of degree ``d >= 4`` is split as ``w = w' q`` with ``q``
quadratic, and ``q``'s rewrite is multiplied by ``w'``.  Hence ``g_i``
collects terms of degree ``d - 1 >= 3`` and ``h`` terms of degree
``d - 2 >= 2``.  The last ring variable plays the role of ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError, EmptyInputError, OrderTooLowError, PreconditionError
from .series import Series, SeriesRing


def _param_ring(ring: SeriesRing) -> SeriesRing:
    n = ring.nvars - 1
    if n < 0:
        raise ConfigurationError("need at least the variable z")
    if ring.nparams == n:
        return ring
    if ring.nparams == 0:
        return ring.with_params(f"a{i}" for i in range(1, n + 1))
    raise ConfigurationError(f"ring {ring} should carry {n} parameters (or none)")


def quadratic_tail(w: tuple) -> tuple:
    """The two occurrences of the largest variables in ``w`` (``x1 < ... < xn < z``)."""
    q = [0] * len(w)
    need = 2
    for idx in range(len(w) - 1, -1, -1):
        take = min(need, w[idx])
        q[idx] = take
        need -= take
        if not need:
            break
    if need:
        raise PreconditionError(f"monomial {w} has degree below 2")
    return tuple(q)


@dataclass(frozen=True)
class QuadraticRewrite:
    """``q = z^2 * h + sum_i (x_i - a_i z) * g[i]`` with ``h`` constant and ``g[i]`` linear."""

    q: tuple
    h: Series
    g: tuple

    def expand(self) -> Series:
        ring = self.h.ring
        return ring.gen(ring.variables[-1]) ** 2 * self.h + sum(
            (linear_form(ring, i) * gi for i, gi in enumerate(self.g)), ring.zero())


def linear_form(ring: SeriesRing, i: int) -> Series:
    """``x_{i+1} - a_{i+1} z`` (0-based ``i``)."""
    z = ring.gen(ring.variables[-1])
    return ring.gen(ring.variables[i]) - ring.gen(ring.params[i]) * z


def rewrite_quadratic(ring: SeriesRing, q: tuple) -> QuadraticRewrite:
    q = tuple(q)
    ring = _param_ring(ring)
    n = ring.nvars - 1
    if len(q) != ring.nvars:
        raise ConfigurationError(f"monomial {q} does not match {ring.variables}")
    if sum(q) != 2:
        raise PreconditionError(f"expected a quadratic monomial, got degree {sum(q)}")
    width = ring.width
    zero_key = (0,) * width

    def key(geo=(), par=()):
        k = list(zero_key)
        for idx in geo:
            k[idx] += 1
        for idx in par:
            k[ring.nvars + idx] += 1
        return tuple(k)

    h: dict = {}
    g: list[dict] = [{} for _ in range(n)]

    def bump(d, k, c=1):
        d[k] = d.get(k, 0) + c

    zi = n
    if q[zi] == 2:
        bump(h, key())
    elif q[zi] == 1:
        i = next(idx for idx in range(n) if q[idx])
        bump(g[i], key(geo=(zi,)))
        bump(h, key(par=(i,)))
    else:
        idxs = [idx for idx in range(n) for _ in range(q[idx])]
        i, j = idxs
        # x_i x_j = (x_i - a_i z) x_j + a_i (x_j z)
        bump(g[i], key(geo=(j,)))
        # a_i x_j z = a_i [(x_j - a_j z) z + a_j z^2]
        bump(g[j], key(geo=(zi,), par=(i,)))
        bump(h, key(par=(i, j)))
    return QuadraticRewrite(q, Series(ring, h), tuple(Series(ring, gi) for gi in g))


@dataclass(frozen=True)
class A1Decomposition:
    f: Series
    h: Series
    g: tuple

    @property
    def ring(self) -> SeriesRing:
        return self.h.ring

    @property
    def n(self) -> int:
        return len(self.g)

    def linear_forms(self) -> list[Series]:
        return [linear_form(self.ring, i) for i in range(self.n)]

    def recompose(self, level: int | None = None) -> Series:
        """``z^2 h + sum_{i <= level} (x_i - a_i z) g_i``."""
        ring = self.ring
        level = self.n if level is None else level
        z = ring.gen(ring.variables[-1])
        out = z * z * self.h
        for i in range(level):
            out = out + linear_form(ring, i) * self.g[i]
        return out

    def check(self) -> None:
        """Raise unless the identity and the order bounds hold."""
        if not self.recompose().same_terms(self.f.to_ring(self.ring)):
            raise PreconditionError("decomposition does not recompose to f")
        if self.h.order < 2:
            raise PreconditionError(f"h has order {self.h.order} < 2")
        for i, gi in enumerate(self.g, start=1):
            if gi.order < 3:
                raise PreconditionError(f"g{i} has order {gi.order} < 3")

    def is_valid(self) -> bool:
        try:
            self.check()
        except PreconditionError:
            return False
        return True


def decompose(f: Series) -> A1Decomposition:
    """Deterministic decomposition of a parameter-free ``f`` of order at least 4."""
    if f.trunc is not None:
        raise PreconditionError("f must be a polynomial, not a truncated series")
    if f.is_zero():
        raise EmptyInputError("cannot decompose the zero series")
    if not f.param_free:
        raise PreconditionError("f must not involve the parameters")
    if f.order < 4:
        raise OrderTooLowError(f"f has order {f.order}; the construction needs order at least 4")
    ring = _param_ring(f.ring)
    f = f.to_ring(ring)
    nv = ring.nvars
    field = ring.field
    n = nv - 1
    cache: dict = {}
    h: dict = {}
    g: list[dict] = [{} for _ in range(n)]

    def accumulate(target: dict, part: Series, shift: tuple, c) -> None:
        for key, v in part.terms.items():
            k = tuple(a + b for a, b in zip(key, shift))
            val = field.reduce(target.get(k, 0) + v * c)
            if val:
                target[k] = val
            else:
                target.pop(k, None)

    for key, c in f.items():
        w = key[:nv]
        q = quadratic_tail(w)
        if q not in cache:
            cache[q] = rewrite_quadratic(ring, q)
        rw = cache[q]
        shift = tuple(a - b for a, b in zip(w, q)) + (0,) * ring.nparams
        accumulate(h, rw.h, shift, c)
        for i in range(n):
            accumulate(g[i], rw.g[i], shift, c)
    return A1Decomposition(f, Series(ring, h), tuple(Series(ring, gi) for gi in g))
