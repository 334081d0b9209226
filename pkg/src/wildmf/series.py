"""Sparse polynomials in geometric variables with parameter coefficients.

A :class:`Series` lives in a :class:`SeriesRing`: geometric variables
(``x1..xn, z`` in the main construction) that carry the grading, and
commuting parameters (``a1..an``) that only ever appear inside
coefficients.  Terms are stored flat, keyed by the concatenated exponent
vector ``(geometric..., parameters...)``; the coefficient of a geometric
monomial ``w`` is then a :class:`ParamPoly` assembled on demand.

An optional truncation degree ``N`` makes a series an element of the ring
modulo ``m^N``; coefficients at geometric degree ``>= N`` are unknown and
asking for them raises :class:`TruncationError`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .errors import ConfigurationError, ParseError, TruncationError
from .fields import Field

Monomial = tuple  # exponent vector over the geometric variables


def monomials_of_degree(nvars: int, d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree ``d``, in a fixed order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def monomials_below(nvars: int, bound: int) -> list[tuple[int, ...]]:
    return [m for d in range(bound) for m in monomials_of_degree(nvars, d)]


def _add_keys(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _fmt_monomial(names: tuple[str, ...], exps: tuple[int, ...]) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _fmt_terms(field: Field, names, items) -> str:
    if not items:
        return "0"
    pieces = []
    for key, c in items:
        mono = _fmt_monomial(names, key)
        cs = field.fmt(c)
        if not mono:
            pieces.append(cs)
        elif cs == "1":
            pieces.append(mono)
        elif cs == "-1":
            pieces.append("-" + mono)
        else:
            pieces.append(f"{cs}*{mono}")
    return " + ".join(pieces).replace("+ -", "- ")


@dataclass(frozen=True)
class SeriesRing:
    """Coefficient field, geometric variable names and parameter names."""

    field: Field
    variables: tuple[str, ...]
    params: tuple[str, ...] = ()

    def __post_init__(self):
        names = self.variables + self.params
        if len(set(names)) != len(names):
            raise ConfigurationError(f"repeated variable names in {names}")

    @classmethod
    def standard(cls, n: int, field: Field, *, with_params: bool = True) -> "SeriesRing":
        """``k[x1..xn, z]`` with parameters ``a1..an``."""
        variables = tuple(f"x{i}" for i in range(1, n + 1)) + ("z",)
        params = tuple(f"a{i}" for i in range(1, n + 1)) if with_params else ()
        return cls(field, variables, params)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def nparams(self) -> int:
        return len(self.params)

    @property
    def width(self) -> int:
        return len(self.variables) + len(self.params)

    @property
    def names(self) -> tuple[str, ...]:
        return self.variables + self.params

    def without_params(self) -> "SeriesRing":
        return SeriesRing(self.field, self.variables, ())

    def with_params(self, params: Iterable[str]) -> "SeriesRing":
        return SeriesRing(self.field, self.variables, tuple(params))

    def extend(self, variables: Iterable[str] = ()) -> "SeriesRing":
        new = tuple(v for v in variables if v not in self.variables)
        return SeriesRing(self.field, self.variables + new, self.params)

    def geo_degree(self, key: tuple) -> int:
        return sum(key[: self.nvars])

    def key(self, geo: tuple, par: tuple = ()) -> tuple:
        geo = tuple(geo)
        if len(geo) != self.nvars:
            raise ConfigurationError(f"monomial {geo} does not match variables {self.variables}")
        par = tuple(par) + (0,) * (self.nparams - len(par))
        return geo + par

    # element constructors ---------------------------------------------------

    def zero(self, trunc: int | None = None) -> "Series":
        return Series(self, {}, trunc)

    def const(self, c, trunc: int | None = None) -> "Series":
        return Series(self, {(0,) * self.width: self.field(c)}, trunc)

    def one(self) -> "Series":
        return self.const(1)

    def gen(self, name: str) -> "Series":
        """The variable or parameter called ``name``."""
        try:
            idx = self.names.index(name)
        except ValueError:
            raise ConfigurationError(f"{name!r} is not a variable of {self.names}") from None
        key = [0] * self.width
        key[idx] = 1
        return Series(self, {tuple(key): self.field.one})

    def monomial(self, geo: tuple, coeff=1, par: tuple = ()) -> "Series":
        return Series(self, {self.key(geo, par): self.field(coeff)})

    def from_terms(self, terms: dict, trunc: int | None = None) -> "Series":
        return Series(self, terms, trunc)

    def parse(self, text: str, trunc: int | None = None) -> "Series":
        """Parse ``"x1^4 + 3*a1*x1^2*z - z^4/2"`` (sympy syntax, ``^`` allowed)."""
        import sympy

        symbols = {name: sympy.Symbol(name) for name in self.names}
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals=symbols)
            gens = [symbols[n] for n in self.names]
            poly = sympy.Poly(expr, *gens, domain="QQ") if gens else None
        except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as exc:
            raise ParseError(f"cannot parse {text!r} over variables {self.names}") from exc
        if poly is None:
            value = sympy.Rational(expr)
            return self.const(Fraction(int(value.p), int(value.q)), trunc)
        terms = {}
        for monom, c in poly.terms():
            c = sympy.Rational(c)
            terms[tuple(int(e) for e in monom)] = self.field(Fraction(int(c.p), int(c.q)))
        return Series(self, terms, trunc)

    def embed_key(self, key: tuple, target: "SeriesRing") -> tuple:
        """Re-index an exponent vector of this ring into ``target`` by name."""
        out = [0] * target.width
        for name, e in zip(self.names, key):
            if e:
                try:
                    out[target.names.index(name)] = e
                except ValueError:
                    raise ConfigurationError(f"{name!r} does not exist in target ring") from None
        return tuple(out)

    def __str__(self) -> str:
        ps = f"; params {','.join(self.params)}" if self.params else ""
        return f"{self.field}[{','.join(self.variables)}{ps}]"


class _SparsePoly:
    """Dictionary arithmetic shared by :class:`ParamPoly` and :class:`Series`."""

    __slots__ = ("terms",)

    terms: dict

    @property
    def field(self) -> Field:
        raise NotImplementedError

    def _like(self, terms: dict, other=None):
        raise NotImplementedError

    def _coerce(self, other):
        if isinstance(other, type(self)):
            self._check_compatible(other)
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            c = self.field(other)
            return self._like({(0,) * self._width(): c} if c else {})
        return NotImplemented

    def _width(self) -> int:
        raise NotImplementedError

    def _check_compatible(self, other) -> None:
        pass

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.field
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = f.reduce(out.get(k, 0) + c)
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._like(out, other)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return self._like({k: f.reduce(-c) for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        f = self.field
        c = f(c)
        if not c:
            return self._like({})
        return self._like({k: f.reduce(v * c) for k, v in self.terms.items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0])))


class ParamPoly(_SparsePoly):
    """Polynomial in the commuting parameters ``a1..ar`` with field coefficients."""

    __slots__ = ("_field", "params")

    def __init__(self, field: Field, params: tuple[str, ...], terms: dict | None = None):
        self._field = field
        self.params = tuple(params)
        clean = {}
        for k, c in (terms or {}).items():
            c = field(c) if not isinstance(c, (int, Fraction)) else field.reduce(c)
            if c:
                clean[tuple(k)] = c
        self.terms = clean

    @property
    def field(self) -> Field:
        return self._field

    def _width(self) -> int:
        return len(self.params)

    def _like(self, terms, other=None):
        p = ParamPoly.__new__(ParamPoly)
        p._field = self._field
        p.params = self.params
        p.terms = terms
        return p

    def _check_compatible(self, other) -> None:
        if other.params != self.params or other._field != self._field:
            raise ConfigurationError("parameter polynomials over different parameter sets")

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self._field
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = _add_keys(ka, kb)
                v = f.reduce(out.get(k, 0) + ca * cb)
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return self._like(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.params == other.params and self.terms == other.terms

    def __hash__(self):
        return hash((self.params, frozenset(self.terms.items())))

    def constant(self):
        return self.terms.get((0,) * len(self.params), self._field.zero)

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def eval(self, matrices) -> np.ndarray:
        """Substitute square commuting matrices for ``a1, a2, ...`` in order.

        Constants map to scalar multiples of the identity.  Accepts either a
        sequence of arrays or a :class:`~wildmf.inflation.CommutingTuple`.
        """
        mats = list(getattr(matrices, "matrices", matrices))
        f = self._field
        if not mats:
            if any(any(k) for k in self.terms):
                raise ConfigurationError("no matrices given for a parameter-dependent polynomial")
            return f.scalar_matrix(self.constant(), 1)
        m = mats[0].shape[0]
        used = max((i + 1 for k in self.terms for i, e in enumerate(k) if e), default=0)
        if used > len(mats):
            raise ConfigurationError(f"{used} parameters but only {len(mats)} matrices")
        powers = _PowerCache(f, mats)
        out = f.zeros((m, m))
        for k, c in self.terms.items():
            out = out + c * powers.monomial(k)
        return f.reduce_array(out)

    def __str__(self) -> str:
        return _fmt_terms(self._field, self.params, self.items())

    def __repr__(self) -> str:
        return f"ParamPoly({self})"


class _PowerCache:
    """Memoised monomials ``A1^e1 ... Ar^er`` in commuting matrices."""

    def __init__(self, field: Field, mats):
        self.field = field
        self.mats = list(mats)
        self.m = self.mats[0].shape[0] if self.mats else 1
        self._pow: dict = {}
        self._mono: dict = {}

    def power(self, i: int, e: int) -> np.ndarray:
        key = (i, e)
        if key not in self._pow:
            if e == 0:
                self._pow[key] = self.field.eye(self.m)
            else:
                self._pow[key] = self.field.matmul(self.power(i, e - 1), self.mats[i])
        return self._pow[key]

    def monomial(self, exps: tuple) -> np.ndarray:
        exps = tuple(exps)
        if exps not in self._mono:
            out = self.field.eye(self.m)
            for i, e in enumerate(exps):
                if e:
                    out = self.field.matmul(out, self.power(i, e))
            self._mono[exps] = out
        return self._mono[exps]


class Series(_SparsePoly):
    """Finitely supported series in ``ring``, optionally truncated at degree ``trunc``."""

    __slots__ = ("ring", "trunc")

    def __init__(self, ring: SeriesRing, terms: dict | None = None, trunc: int | None = None):
        self.ring = ring
        self.trunc = trunc
        f = ring.field
        nv = ring.nvars
        width = ring.width
        clean = {}
        for k, c in (terms or {}).items():
            k = tuple(int(e) for e in k)
            if len(k) != width:
                raise ConfigurationError(f"exponent vector {k} has wrong length for {ring}")
            if trunc is not None and sum(k[:nv]) >= trunc:
                continue
            c = f.reduce(c) if isinstance(c, (int, Fraction)) else f(c)
            if c:
                clean[k] = c
        self.terms = clean

    @property
    def field(self) -> Field:
        return self.ring.field

    def _width(self) -> int:
        return self.ring.width

    def _like(self, terms, other=None):
        trunc = self.trunc
        if other is not None and other.trunc is not None:
            trunc = other.trunc if trunc is None else min(trunc, other.trunc)
        s = Series.__new__(Series)
        s.ring = self.ring
        s.trunc = trunc
        if trunc is not None:
            nv = self.ring.nvars
            terms = {k: c for k, c in terms.items() if sum(k[:nv]) < trunc}
        s.terms = terms
        return s

    def _check_compatible(self, other) -> None:
        if other.ring != self.ring:
            raise ConfigurationError(f"series over different rings: {self.ring} vs {other.ring}")

    def _coerce(self, other):
        if isinstance(other, ParamPoly):
            if other.params != self.ring.params:
                raise ConfigurationError("parameter polynomial over the wrong parameters")
            zero = (0,) * self.ring.nvars
            return self._like({zero + k: c for k, c in other.terms.items()})
        return super()._coerce(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.ring.field
        nv = self.ring.nvars
        trunc = self.trunc
        if other.trunc is not None:
            trunc = other.trunc if trunc is None else min(trunc, other.trunc)
        out: dict = {}
        b_items = [(kb, cb, sum(kb[:nv])) for kb, cb in other.terms.items()]
        for ka, ca in self.terms.items():
            da = sum(ka[:nv])
            for kb, cb, db in b_items:
                if trunc is not None and da + db >= trunc:
                    continue
                k = _add_keys(ka, kb)
                v = f.reduce(out.get(k, 0) + ca * cb)
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        s = self._like(out)
        s.trunc = trunc
        return s

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only non-negative integer powers")
        result = self.ring.const(1, self.trunc)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, Series):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms and self.trunc == other.trunc

    def __hash__(self):
        return hash((self.ring, self.trunc, frozenset(self.terms.items())))

    def same_terms(self, other: "Series") -> bool:
        """Equality of stored terms, ignoring the truncation degree."""
        return self.ring == other.ring and self.terms == other.terms

    # grading ---------------------------------------------------------------

    @property
    def order(self):
        """Lowest geometric degree present; ``math.inf`` for zero."""
        nv = self.ring.nvars
        return min((sum(k[:nv]) for k in self.terms), default=math.inf)

    @property
    def degree(self) -> int:
        nv = self.ring.nvars
        return max((sum(k[:nv]) for k in self.terms), default=-1)

    def truncate(self, N: int | None) -> "Series":
        if N is None:
            return self
        if self.trunc is not None:
            N = min(N, self.trunc)
        return Series(self.ring, self.terms, N)

    def homogeneous(self, d: int) -> "Series":
        nv = self.ring.nvars
        return Series(self.ring, {k: c for k, c in self.terms.items() if sum(k[:nv]) == d})

    def coeff(self, w: tuple) -> ParamPoly:
        """Coefficient of the geometric monomial ``w`` (a parameter polynomial)."""
        w = tuple(w)
        nv = self.ring.nvars
        if len(w) != nv:
            raise ConfigurationError(f"monomial {w} does not match variables {self.ring.variables}")
        if self.trunc is not None and sum(w) >= self.trunc:
            raise TruncationError(f"coefficient of degree {sum(w)} unknown modulo m^{self.trunc}")
        terms = {k[nv:]: c for k, c in self.terms.items() if k[:nv] == w}
        return ParamPoly(self.ring.field, self.ring.params, terms)

    strand = coeff

    def geometric_support(self) -> list[tuple]:
        nv = self.ring.nvars
        return sorted({k[:nv] for k in self.terms})

    def variables_used(self) -> set[str]:
        used = set()
        for k in self.terms:
            used.update(name for name, e in zip(self.ring.names, k) if e)
        return used

    @property
    def param_free(self) -> bool:
        nv = self.ring.nvars
        return all(not any(k[nv:]) for k in self.terms)

    def to_ring(self, ring: SeriesRing) -> "Series":
        if ring == self.ring:
            return self
        if ring.field != self.ring.field:
            raise ConfigurationError("cannot move a series to a ring over another field")
        return Series(ring, {self.ring.embed_key(k, ring): c for k, c in self.terms.items()}, self.trunc)

    def __iter__(self) -> Iterator[tuple[tuple, object]]:
        return iter(self.items())

    def __str__(self) -> str:
        body = _fmt_terms(self.ring.field, self.ring.names, self.items())
        if self.trunc is not None:
            body += f" + O({self.trunc})"
        return body

    def __repr__(self) -> str:
        return f"Series({self})"
