"""Exact ground fields.

Scalars are plain Python numbers: canonical residues ``0 <= x < p`` (``int``)
for a prime field, :class:`fractions.Fraction` for the rationals.  A field
object knows how to normalise them, and how to build and multiply numpy
arrays of them exactly (``int64`` residues, resp. ``object`` arrays of
fractions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import isprime

from .errors import ConfigurationError, ParseError

# float64 represents every integer below this bound exactly
_FLOAT_EXACT = 2**53
_INT64_SAFE = 2**62

DEFAULT_PRIME = 101


class Field:
    """Common interface of :class:`PrimeField` and :class:`Rationals`."""

    descriptor: str
    characteristic: int
    dtype: object

    @property
    def order(self) -> int | None:
        return None

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def sub(self, a, b):
        return self.reduce(a - b)

    def mul(self, a, b):
        return self.reduce(a * b)

    def div(self, a, b):
        return self.reduce(a * self.inv(b))

    # arrays ----------------------------------------------------------------

    def array(self, data) -> np.ndarray:
        arr = np.array(data, dtype=object)
        if arr.ndim == 0:
            raise ConfigurationError("expected a matrix, got a scalar")
        out = np.empty(arr.shape, dtype=self.dtype)
        flat_in = arr.reshape(-1)
        flat_out = out.reshape(-1)
        for k, x in enumerate(flat_in):
            flat_out[k] = self(x)
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape, dtype=self.dtype)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def scalar_matrix(self, c, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self(c)
        return out

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce_array(np.kron(a, b))

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and not np.any(a != b)

    def is_zero_array(self, a: np.ndarray) -> bool:
        return not np.any(a)

    def matpow(self, a: np.ndarray, e: int) -> np.ndarray:
        result = self.eye(a.shape[0])
        base = a
        while e:
            if e & 1:
                result = self.matmul(result, base)
            e >>= 1
            if e:
                base = self.matmul(base, base)
        return result

    def random_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        out = self.zeros(shape)
        flat = out.reshape(-1)
        for k in range(flat.size):
            flat[k] = self.random(rng)
        return out

    def fmt_array(self, a: np.ndarray) -> list:
        return [[self.fmt(x) for x in row] for row in a]

    def __str__(self) -> str:
        return self.descriptor


@dataclass(frozen=True)
class PrimeField(Field):
    """The prime field F_p, p an odd prime."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not (isinstance(self.p, int) and self.p > 2 and isprime(self.p)):
            raise ConfigurationError(f"F_p needs an odd prime p, got {self.p!r}")
        if self.p >= 2**31:
            raise ConfigurationError("primes >= 2**31 are not supported")

    @property
    def descriptor(self) -> str:
        return f"Fp:{self.p}"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def dtype(self):
        return np.int64

    @property
    def order(self) -> int:
        return self.p

    def __call__(self, value):
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Fraction):
            return self.div(value.numerator, value.denominator)
        if isinstance(value, (int, np.integer)):
            return int(value) % self.p
        raise ParseError(f"cannot interpret {value!r} as an element of {self.descriptor}")

    def reduce(self, x):
        return int(x) % self.p

    def reduce_array(self, a: np.ndarray) -> np.ndarray:
        return np.mod(a, self.p).astype(np.int64, copy=False)

    def inv(self, x):
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def neg(self, x):
        return (-x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def parse(self, text: str):
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return self.div(int(num), int(den))
            return int(text) % self.p
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad scalar {text!r} for {self.descriptor}") from exc

    def fmt(self, x) -> str:
        return str(int(x))

    def random(self, rng: np.random.Generator, nonzero: bool = False):
        lo = 1 if nonzero else 0
        return int(rng.integers(lo, self.p))

    def elements(self):
        return range(self.p)

    def random_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.p, size=shape).astype(np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        inner = a.shape[-1]
        bound = (self.p - 1) ** 2 * max(inner, 1)
        if bound < _FLOAT_EXACT:
            prod = np.matmul(a.astype(np.float64), b.astype(np.float64))
            return np.mod(prod.astype(np.int64), self.p)
        if bound < _INT64_SAFE:
            return np.mod(np.matmul(a, b), self.p)
        prod = np.matmul(a.astype(object), b.astype(object))
        return np.mod(prod, self.p).astype(np.int64)


@dataclass(frozen=True)
class Rationals(Field):
    """The field Q, elements stored as :class:`~fractions.Fraction`."""

    @property
    def descriptor(self) -> str:
        return "Q"

    @property
    def characteristic(self) -> int:
        return 0

    @property
    def dtype(self):
        return object

    def __call__(self, value):
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (int, np.integer, Fraction)):
            return Fraction(value)
        raise ParseError(f"cannot interpret {value!r} as a rational number")

    def reduce(self, x):
        return x if isinstance(x, Fraction) else Fraction(x)

    def reduce_array(self, a: np.ndarray) -> np.ndarray:
        if a.dtype != object:
            a = a.astype(object)
        flat = a.reshape(-1)
        for k, x in enumerate(flat):
            if not isinstance(x, Fraction):
                flat[k] = Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)
        return a

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def neg(self, x):
        return -x

    def add(self, a, b):
        return a + b

    def parse(self, text: str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {text!r}") from exc

    def fmt(self, x) -> str:
        return str(Fraction(x))

    def random(self, rng: np.random.Generator, nonzero: bool = False):
        while True:
            num = int(rng.integers(-5, 6))
            den = int(rng.choice([1, 1, 1, 2, 3]))
            x = Fraction(num, den)
            if x or not nonzero:
                return x

    def elements(self):
        raise ConfigurationError("Q is infinite")

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        da, ai = _scaled_integers(a)
        db, bi = _scaled_integers(b)
        prod = _int_matmul(ai, bi)
        scale = da * db
        out = np.empty(prod.shape, dtype=object)
        flat_out = out.reshape(-1)
        for k, x in enumerate(prod.reshape(-1)):
            flat_out[k] = Fraction(int(x), scale)
        return out


def _scaled_integers(a: np.ndarray) -> tuple[int, np.ndarray]:
    """Write ``a`` as ``ints / d`` with a common denominator ``d``."""
    flat = a.reshape(-1)
    d = math.lcm(*{Fraction(x).denominator for x in flat}) if flat.size else 1
    ints = np.empty(a.shape, dtype=object)
    flat_ints = ints.reshape(-1)
    for k, x in enumerate(flat):
        x = Fraction(x)
        flat_ints[k] = x.numerator * (d // x.denominator)
    return d, ints


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    inner = a.shape[-1]
    ma = max((abs(int(x)) for x in a.reshape(-1)), default=0)
    mb = max((abs(int(x)) for x in b.reshape(-1)), default=0)
    bound = ma * mb * max(inner, 1)
    if bound < _FLOAT_EXACT:
        prod = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return prod.astype(np.int64)
    if bound < _INT64_SAFE:
        return np.matmul(a.astype(np.int64), b.astype(np.int64))
    return np.matmul(a, b)


QQ = Rationals()


def parse_field(text: str | Field) -> Field:
    """``"Fp:101"`` / ``"F101"`` / ``"Q"`` -> field object."""
    if isinstance(text, Field):
        return text
    t = text.strip()
    if t.upper() in ("Q", "QQ"):
        return QQ
    for prefix in ("Fp:", "FP:", "F", "GF"):
        if t.startswith(prefix):
            try:
                return PrimeField(int(t[len(prefix):]))
            except ValueError:
                break
    raise ParseError(f"unknown field descriptor {text!r} (use 'Fp:<p>' or 'Q')")
