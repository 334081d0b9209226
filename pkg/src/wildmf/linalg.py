"""Exact linear algebra over a :class:`~wildmf.fields.Field`.

Dense routines work on numpy arrays (``int64`` residues or ``object``
fractions) and are meant for matrices of a few hundred rows.  The hom
systems are much larger but extremely sparse, so they go through
:class:`SparseEchelon`, an incremental row-echelon form over dictionary
rows with the pivot at the smallest column.
"""

from __future__ import annotations

import heapq
from typing import Iterable

import numpy as np

from .fields import Field, PrimeField

# ---------------------------------------------------------------------------
# dense


def rref(field: Field, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = M.copy()
    if A.dtype != field.dtype:
        A = field.array(A)
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        A[r] = field.reduce_array(A[r] * field.inv(A[r, c]))
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            A[others] = field.reduce_array(A[others] - np.outer(A[others, c], A[r]))
        pivots.append(c)
        r += 1
    return A, pivots


def rank(field: Field, M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    return len(rref(field, M)[1])


def nullspace(field: Field, M: np.ndarray) -> list[np.ndarray]:
    """Basis of ``{v : M v = 0}``."""
    cols = M.shape[1]
    R, pivots = rref(field, M) if M.shape[0] else (M, [])
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = field.zeros(cols)
        v[fc] = field.one
        for i, pc in enumerate(pivots):
            v[pc] = field.reduce(-R[i, fc])
        basis.append(v)
    return basis


def row_basis(field: Field, vectors: Iterable[np.ndarray], length: int) -> np.ndarray:
    """Nonzero rows of the RREF of the stacked vectors (a canonical basis of their span)."""
    vectors = [np.asarray(v).reshape(-1) for v in vectors]
    if not vectors:
        return field.zeros((0, length))
    R, pivots = rref(field, np.stack(vectors).astype(field.dtype))
    return R[: len(pivots)]


def inverse(field: Field, M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    R, pivots = rref(field, np.concatenate([M, field.eye(n)], axis=1))
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:]


def det(field: Field, M: np.ndarray):
    A = M.copy()
    n = A.shape[0]
    d = field.one
    for c in range(n):
        nz = np.nonzero(A[c:, c])[0]
        if nz.size == 0:
            return field.zero
        p = c + int(nz[0])
        if p != c:
            A[[c, p]] = A[[p, c]]
            d = field.reduce(-d)
        piv = A[c, c]
        d = field.reduce(d * piv)
        inv = field.inv(piv)
        below = np.arange(c + 1, n)
        if below.size:
            factors = field.reduce_array(A[below, c] * inv)
            A[below] = field.reduce_array(A[below] - np.outer(factors, A[c]))
    return d


def is_invertible(field: Field, M: np.ndarray) -> bool:
    return M.shape[0] == M.shape[1] and rank(field, M) == M.shape[0]


def is_nilpotent(field: Field, M: np.ndarray) -> bool:
    n = M.shape[0]
    return field.is_zero_array(field.matpow(M, n)) if n else True


# ---------------------------------------------------------------------------
# sparse


class SparseEchelon:
    """Incremental echelon form of sparse rows ``{column: nonzero scalar}``.

    Each stored pivot row is normalised to leading coefficient one at its
    smallest column, so reducing a new row walks its columns in increasing
    order and never revisits a column.
    """

    def __init__(self, field: Field, ncols: int):
        self.field = field
        self.ncols = ncols
        self.pivots: dict[int, dict] = {}
        self._p = field.p if isinstance(field, PrimeField) else None

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        row = dict(row)
        pivots = self.pivots
        p = self._p
        f = self.field
        heap = list(row)
        heapq.heapify(heap)
        last = -1
        while heap:
            c = heapq.heappop(heap)
            if c == last:
                continue
            last = c
            coef = row.get(c)
            if coef is None:
                continue
            prow = pivots.get(c)
            if prow is None:
                continue
            for d, val in prow.items():
                old = row.get(d)
                if p is not None:
                    new = ((old or 0) - coef * val) % p
                else:
                    new = (old or 0) - coef * val
                if new:
                    if old is None:
                        heapq.heappush(heap, d)
                    row[d] = new
                elif old is not None:
                    del row[d]
        return row

    def add(self, row: dict) -> bool:
        """Insert a row; returns whether the rank grew."""
        row = self.reduce(row)
        if not row:
            return False
        c = min(row)
        inv = self.field.inv(row[c])
        f = self.field
        self.pivots[c] = {d: f.reduce(v * inv) for d, v in row.items()}
        return True

    def extend(self, rows: Iterable[dict]) -> None:
        for row in rows:
            self.add(row)

    def _fully_reduced(self) -> dict[int, dict]:
        """Back-substitute so that pivot rows contain no other pivot column."""
        p = self._p
        done: dict[int, dict] = {}
        for c in sorted(self.pivots, reverse=True):
            row = dict(self.pivots[c])
            targets = sorted(d for d in row if d != c and d in done)
            for d in targets:
                coef = row.get(d)
                if not coef:
                    continue
                for e, val in done[d].items():
                    old = row.get(e, 0)
                    new = (old - coef * val) % p if p is not None else old - coef * val
                    if new:
                        row[e] = new
                    else:
                        row.pop(e, None)
            done[c] = row
        return done

    def nullspace(self) -> list[dict]:
        """Sparse basis of the solution space, one vector per free column (ascending)."""
        f = self.field
        reduced = self._fully_reduced()
        free_entries: dict[int, dict] = {}
        for c, row in reduced.items():
            for d, val in row.items():
                if d != c:
                    free_entries.setdefault(d, {})[c] = f.reduce(-val)
        basis = []
        for col in range(self.ncols):
            if col in self.pivots:
                continue
            v = {col: f.one}
            v.update(free_entries.get(col, {}))
            basis.append(v)
        return basis


def sparse_nullspace(field: Field, rows: Iterable[dict], ncols: int) -> list[dict]:
    ech = SparseEchelon(field, ncols)
    ech.extend(rows)
    return ech.nullspace()


def coo_rows(field: Field, r: np.ndarray, c: np.ndarray, v: np.ndarray) -> list[dict]:
    """Sum duplicate ``(row, col)`` triplets and split into sparse row dictionaries."""
    if r.size == 0:
        return []
    if isinstance(field, PrimeField):
        order = np.lexsort((c, r))
        r, c, v = r[order], c[order], v[order].astype(np.int64)
        change = np.ones(r.size, dtype=bool)
        change[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
        starts = np.flatnonzero(change)
        sums = np.add.reduceat(v, starts) % field.p
        keep = sums != 0
        rr, cc, vv = r[starts][keep], c[starts][keep], sums[keep]
        out: dict[int, dict] = {}
        for a, b, x in zip(rr.tolist(), cc.tolist(), vv.tolist()):
            out.setdefault(a, {})[b] = x
        return [out[k] for k in sorted(out)]
    acc: dict[int, dict] = {}
    for a, b, x in zip(r.tolist(), c.tolist(), v.tolist()):
        row = acc.setdefault(a, {})
        row[b] = row.get(b, 0) + x
    out_rows = []
    for k in sorted(acc):
        row = {b: field.reduce(x) for b, x in acc[k].items() if x}
        if row:
            out_rows.append(row)
    return out_rows


def sparse_to_dense(field: Field, vec: dict, length: int) -> np.ndarray:
    out = field.zeros(length)
    for k, x in vec.items():
        out[k] = x
    return out
