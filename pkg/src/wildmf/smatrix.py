"""Matrices over a :class:`~wildmf.series.SeriesRing`.

A :class:`SeriesMatrix` is stored by strands: a dictionary from full
exponent vectors (geometric + parameter) to scalar coefficient arrays, so
``E = sum_w E{w} * w``.  Products are convolutions of strands and are
computed as one stacked exact matmul per chunk of strands, which is what
keeps the inflated factorizations (size ``m * 2^n``) cheap to verify.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, TruncationError
from .series import ParamPoly, Series, SeriesRing, _PowerCache

# stacked product buffers are split to stay below this many entries
_CHUNK_ENTRIES = 4_000_000


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class SeriesMatrix:
    __slots__ = ("ring", "shape", "strands", "trunc")

    def __init__(self, ring: SeriesRing, shape: tuple[int, int], strands: dict | None = None,
                 trunc: int | None = None):
        self.ring = ring
        self.shape = (int(shape[0]), int(shape[1]))
        self.trunc = trunc
        f = ring.field
        nv = ring.nvars
        clean = {}
        for key, arr in (strands or {}).items():
            key = tuple(key)
            if len(key) != ring.width:
                raise ConfigurationError(f"strand key {key} has wrong length for {ring}")
            if trunc is not None and sum(key[:nv]) >= trunc:
                continue
            if arr.shape != self.shape:
                raise ConfigurationError(f"strand of shape {arr.shape}, expected {self.shape}")
            if arr.dtype != f.dtype:
                arr = f.array(arr)
            if not f.is_zero_array(arr):
                clean[key] = arr
        self.strands = clean

    # constructors ----------------------------------------------------------

    @classmethod
    def _raw(cls, ring, shape, strands, trunc):
        m = cls.__new__(cls)
        m.ring = ring
        m.shape = shape
        m.strands = strands
        m.trunc = trunc
        return m

    @classmethod
    def zeros(cls, ring: SeriesRing, rows: int, cols: int, trunc: int | None = None):
        return cls._raw(ring, (rows, cols), {}, trunc)

    @classmethod
    def identity(cls, ring: SeriesRing, n: int, trunc: int | None = None):
        return cls(ring, (n, n), {(0,) * ring.width: ring.field.eye(n)}, trunc)

    @classmethod
    def constant(cls, ring: SeriesRing, arr: np.ndarray, trunc: int | None = None):
        arr = ring.field.array(arr) if arr.dtype != ring.field.dtype else arr
        return cls(ring, arr.shape, {(0,) * ring.width: arr}, trunc)

    @classmethod
    def scalar(cls, s: Series, n: int):
        """``s * I_n``."""
        f = s.ring.field
        return cls(s.ring, (n, n), {k: f.scalar_matrix(c, n) for k, c in s.terms.items()}, s.trunc)

    @classmethod
    def from_entries(cls, ring: SeriesRing, entries: Sequence[Sequence], trunc: int | None = None):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        f = ring.field
        strands: dict = {}
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise ConfigurationError("ragged matrix")
            for j, e in enumerate(row):
                if not isinstance(e, Series):
                    e = ring.const(e)
                if e.ring != ring:
                    raise ConfigurationError(f"entry over {e.ring}, expected {ring}")
                trunc = _min_trunc(trunc, e.trunc)
                for key, c in e.terms.items():
                    if key not in strands:
                        strands[key] = f.zeros((rows, cols))
                    strands[key][i, j] = c
        return cls(ring, (rows, cols), strands, trunc)

    @classmethod
    def block(cls, ring: SeriesRing, blocks: Sequence[Sequence]):
        """Assemble from a grid of :class:`SeriesMatrix` (``None`` = zero block).

        Every block row needs one non-``None`` block to fix its height, and
        likewise for columns.
        """
        heights = []
        for brow in blocks:
            h = next((b.shape[0] for b in brow if b is not None), None)
            if h is None:
                raise ConfigurationError("block row with no sized block")
            heights.append(h)
        widths = []
        for j in range(len(blocks[0])):
            w = next((brow[j].shape[1] for brow in blocks if brow[j] is not None), None)
            if w is None:
                raise ConfigurationError("block column with no sized block")
            widths.append(w)
        r_off = np.concatenate([[0], np.cumsum(heights)]).astype(int)
        c_off = np.concatenate([[0], np.cumsum(widths)]).astype(int)
        shape = (int(r_off[-1]), int(c_off[-1]))
        f = ring.field
        strands: dict = {}
        trunc = None
        for bi, brow in enumerate(blocks):
            for bj, b in enumerate(brow):
                if b is None:
                    continue
                if b.ring != ring:
                    raise ConfigurationError("block over a different ring")
                if b.shape != (heights[bi], widths[bj]):
                    raise ConfigurationError(f"block ({bi},{bj}) has shape {b.shape}")
                trunc = _min_trunc(trunc, b.trunc)
                for key, arr in b.strands.items():
                    if key not in strands:
                        strands[key] = f.zeros(shape)
                    strands[key][r_off[bi]:r_off[bi + 1], c_off[bj]:c_off[bj + 1]] = arr
        return cls(ring, shape, strands, trunc)

    # access ------------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def field(self):
        return self.ring.field

    def entry(self, i: int, j: int) -> Series:
        return Series(self.ring, {k: a[i, j] for k, a in self.strands.items() if a[i, j]}, self.trunc)

    def entries(self) -> list[list[Series]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def _check_monomial(self, w: tuple) -> tuple:
        w = tuple(w)
        if len(w) != self.ring.nvars:
            raise ConfigurationError(f"monomial {w} does not match variables {self.ring.variables}")
        if self.trunc is not None and sum(w) >= self.trunc:
            raise TruncationError(f"strand of degree {sum(w)} unknown modulo m^{self.trunc}")
        return w

    def strand(self, w: tuple) -> list[list[ParamPoly]]:
        """The ``w``-strand: entrywise coefficient of ``w``, as parameter polynomials."""
        w = self._check_monomial(w)
        nv = self.ring.nvars
        f = self.field
        parts = [(k[nv:], a) for k, a in self.strands.items() if k[:nv] == w]
        out = []
        for i in range(self.rows):
            row = []
            for j in range(self.cols):
                row.append(ParamPoly(f, self.ring.params, {p: a[i, j] for p, a in parts if a[i, j]}))
            out.append(row)
        return out

    def scalar_strand(self, w: tuple) -> np.ndarray:
        """``E{w}`` as a scalar array; the matrix must not involve parameters."""
        w = self._check_monomial(w)
        key = w + (0,) * self.ring.nparams
        nv = self.ring.nvars
        if any(any(k[nv:]) for k in self.strands if k[:nv] == w):
            raise ConfigurationError("strand involves parameters; inflate first")
        arr = self.strands.get(key)
        return arr.copy() if arr is not None else self.field.zeros(self.shape)

    def geometric_strands(self) -> dict:
        """Strands keyed by geometric monomial (parameter-free matrices only)."""
        if self.ring.nparams and not self.param_free:
            raise ConfigurationError("matrix involves parameters; inflate first")
        nv = self.ring.nvars
        return {k[:nv]: a for k, a in self.strands.items()}

    @property
    def param_free(self) -> bool:
        nv = self.ring.nvars
        return all(not any(k[nv:]) for k in self.strands)

    @property
    def order(self):
        nv = self.ring.nvars
        return min((sum(k[:nv]) for k in self.strands), default=float("inf"))

    def variables_used(self) -> set[str]:
        used = set()
        for k in self.strands:
            used.update(n for n, e in zip(self.ring.names, k) if e)
        return used

    def is_zero(self) -> bool:
        return not self.strands

    def first_nonzero_entry(self) -> tuple[int, int] | None:
        """Row-major first position with a nonzero entry."""
        if not self.strands:
            return None
        mask = np.zeros(self.shape, dtype=bool)
        for a in self.strands.values():
            mask |= a != 0
        i, j = np.argwhere(mask)[0]
        return int(i), int(j)

    def __eq__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        if (self.ring, self.shape, self.trunc) != (other.ring, other.shape, other.trunc):
            return False
        if self.strands.keys() != other.strands.keys():
            return False
        return all(self.field.equal(a, other.strands[k]) for k, a in self.strands.items())

    __hash__ = None

    # arithmetic --------------------------------------------------------------

    def _check_same(self, other: "SeriesMatrix") -> None:
        if not isinstance(other, SeriesMatrix):
            raise TypeError(f"expected SeriesMatrix, got {type(other).__name__}")
        if other.ring != self.ring:
            raise ConfigurationError(f"matrices over different rings: {self.ring} vs {other.ring}")

    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_same(other)
        if other.shape != self.shape:
            raise ConfigurationError(f"shape mismatch {self.shape} + {other.shape}")
        f = self.field
        strands = dict(self.strands)
        for k, a in other.strands.items():
            strands[k] = f.reduce_array(strands[k] + a) if k in strands else a
        return SeriesMatrix(self.ring, self.shape, strands, _min_trunc(self.trunc, other.trunc))

    def __neg__(self) -> "SeriesMatrix":
        f = self.field
        return SeriesMatrix._raw(self.ring, self.shape,
                                 {k: f.reduce_array(-a) for k, a in self.strands.items()}, self.trunc)

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return self + (-other)

    def scale(self, c) -> "SeriesMatrix":
        """Multiply by a scalar or by a :class:`Series` (entrywise)."""
        if isinstance(c, Series):
            return SeriesMatrix.scalar(c, self.rows) @ self
        f = self.field
        c = f(c)
        return SeriesMatrix(self.ring, self.shape,
                            {k: f.reduce_array(a * c) for k, a in self.strands.items()}, self.trunc)

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_same(other)
        if self.cols != other.rows:
            raise ConfigurationError(f"cannot multiply {self.shape} by {other.shape}")
        ring = self.ring
        f = ring.field
        nv = ring.nvars
        trunc = _min_trunc(self.trunc, other.trunc)
        r, c, k = self.rows, self.cols, other.cols
        out_shape = (r, k)
        if not self.strands or not other.strands or r == 0 or k == 0:
            return SeriesMatrix._raw(ring, out_shape, {}, trunc)
        left = list(self.strands.items())
        right = list(other.strands.items())
        rdeg = np.array([sum(key[:nv]) for key, _ in right])
        right_stack = np.concatenate([a for _, a in right], axis=1)  # (c, V*k)
        V = len(right)
        acc: dict = {}
        chunk = max(1, _CHUNK_ENTRIES // max(1, r * V * k))
        for start in range(0, len(left), chunk):
            part = left[start:start + chunk]
            U = len(part)
            left_stack = np.concatenate([a for _, a in part], axis=0)  # (U*r, c)
            prod = f.matmul(left_stack, right_stack).reshape(U, r, V, k)
            for iu, (ku, _) in enumerate(part):
                du = sum(ku[:nv])
                for iv in range(V):
                    if trunc is not None and du + rdeg[iv] >= trunc:
                        continue
                    key = tuple(x + y for x, y in zip(ku, right[iv][0]))
                    block = prod[iu, :, iv, :]
                    if key in acc:
                        acc[key] = acc[key] + block
                    else:
                        acc[key] = block.copy()
        strands = {key: f.reduce_array(a) for key, a in acc.items()}
        return SeriesMatrix(ring, out_shape, strands, trunc)

    # structure ---------------------------------------------------------------

    def truncate(self, N: int | None) -> "SeriesMatrix":
        if N is None:
            return self
        return SeriesMatrix(self.ring, self.shape, self.strands, _min_trunc(self.trunc, N))

    def reduce_mod_msq(self) -> "SeriesMatrix":
        """Image modulo the square of the maximal ideal (keeps degrees 0 and 1)."""
        return self.truncate(2)

    def to_ring(self, ring: SeriesRing) -> "SeriesMatrix":
        if ring == self.ring:
            return self
        strands = {self.ring.embed_key(k, ring): a for k, a in self.strands.items()}
        return SeriesMatrix(ring, self.shape, strands, self.trunc)

    def submatrix(self, rows: slice, cols: slice) -> "SeriesMatrix":
        strands = {k: a[rows, cols].copy() for k, a in self.strands.items()}
        probe = np.empty(self.shape, dtype=bool)[rows, cols]
        return SeriesMatrix(self.ring, probe.shape, strands, self.trunc)

    def transpose(self) -> "SeriesMatrix":
        return SeriesMatrix._raw(self.ring, (self.cols, self.rows),
                                 {k: a.T.copy() for k, a in self.strands.items()}, self.trunc)

    def inflate(self, matrices) -> "SeriesMatrix":
        """Substitute commuting ``m x m`` matrices for the parameters.

        Scalars become scalar multiples of ``I_m`` and each entry becomes an
        ``m x m`` block; the result lives in the parameter-free ring.
        """
        mats = list(getattr(matrices, "matrices", matrices))
        ring = self.ring
        f = ring.field
        nv = ring.nvars
        used = max((i + 1 for key in self.strands for i, e in enumerate(key[nv:]) if e), default=0)
        if used > len(mats):
            raise ConfigurationError(f"matrix uses {used} parameters, only {len(mats)} matrices given")
        m = mats[0].shape[0] if mats else getattr(matrices, "dim", 1)
        powers = _PowerCache(f, mats) if mats else None
        target = ring.without_params()
        strands: dict = {}
        for key, arr in self.strands.items():
            geo, par = key[:nv], key[nv:]
            block = powers.monomial(par[: len(mats)]) if powers else f.eye(m)
            piece = f.kron(arr, block)
            strands[geo] = f.reduce_array(strands[geo] + piece) if geo in strands else piece
        return SeriesMatrix(target, (self.rows * m, self.cols * m), strands, self.trunc)

    def __str__(self) -> str:
        rows = [", ".join(str(e) for e in row) for row in self.entries()]
        return "[" + ";\n ".join(f"[{r}]" for r in rows) + "]"

    def __repr__(self) -> str:
        return f"SeriesMatrix({self.rows}x{self.cols} over {self.ring}, {len(self.strands)} strands)"


def block_diagonal(ring: SeriesRing, blocks: Iterable[SeriesMatrix]) -> SeriesMatrix:
    blocks = list(blocks)
    grid = [[b if i == j else None for j, b in enumerate(blocks)] for i in range(len(blocks))]
    # zero blocks still need sizes: fill with explicit zeros
    for i, b in enumerate(blocks):
        for j, c in enumerate(blocks):
            if i != j:
                grid[i][j] = SeriesMatrix.zeros(ring, b.rows, c.cols)
    return SeriesMatrix.block(ring, grid)
