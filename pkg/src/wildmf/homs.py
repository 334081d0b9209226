"""Hom spaces, structure certificates, isomorphism and indecomposability.

All hom spaces are nullspaces of sparse linear systems assembled directly
in coordinate form: an unknown block ``X`` (``t x s``) appears through
products ``X @ M`` and ``M' @ X`` with known scalar matrices, and each
such product contributes one shifted copy of the nonzeros of ``M``.

Block structure of hom constant strands is certified in two ways that
share no code beyond array slicing:

* by inspection: the blocks of ``S{1}`` and ``T{1}`` are read off and
  compared directly;
* by the strand equations: the quadratic strand identities of the first
  block row, the reduced equations ``C Phibar = Phibar' D`` and
  ``D Psibar = Psibar' C`` for an explicitly built reduced tower, and the
  three block statements those equations imply.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import ArityMismatchError, CertificationError, ConfigurationError, PreconditionError
from .fields import Field, PrimeField
from .inflation import CommutingTuple, InflatedFactorization, TupleHom
from .matfac import MatrixFactorization, MFHom, param_factorization
from .series import SeriesRing, monomials_below
from .smatrix import SeriesMatrix


@dataclass(frozen=True)
class Policy:
    """Knobs of the randomized and exhaustive searches."""

    samples: int = 64
    seed: int = 0
    exhaustive_dim: int = 12
    exhaustive_limit: int = 3 ** 12
    generic_det_max: int = 5

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


# ---------------------------------------------------------------------------
# sparse assembly


class _Assembler:
    """Coordinate triplets for equations linear in unknown ``t x s`` blocks."""

    def __init__(self, field: Field, t: int, s: int):
        self.field = field
        self.t, self.s = t, s
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []

    def _neg(self, v: np.ndarray) -> np.ndarray:
        return self.field.reduce_array(-v)

    def right(self, base: int, off: int, M: np.ndarray, negate: bool = False) -> None:
        """Add ``X @ M`` (``M`` is ``s x s``) to the equation block at ``base``."""
        L, J = np.nonzero(M)
        if not L.size:
            return
        v = M[L, J]
        if negate:
            v = self._neg(v)
        I = np.arange(self.t)[:, None]
        s = self.s
        self.rows.append((base + I * s + J[None, :]).ravel())
        self.cols.append((off + I * s + L[None, :]).ravel())
        self.vals.append(np.broadcast_to(v[None, :], (self.t, v.size)).ravel())

    def left(self, base: int, off: int, M: np.ndarray, negate: bool = False) -> None:
        """Add ``M @ X`` (``M`` is ``t x t``) to the equation block at ``base``."""
        I, L = np.nonzero(M)
        if not I.size:
            return
        v = M[I, L]
        if negate:
            v = self._neg(v)
        s = self.s
        J = np.arange(s)[:, None]
        self.rows.append((base + I[None, :] * s + J).ravel())
        self.cols.append((off + L[None, :] * s + J).ravel())
        self.vals.append(np.broadcast_to(v[None, :], (s, v.size)).ravel())

    def rows_dicts(self) -> list[dict]:
        if not self.rows:
            return []
        dtype = object if self.field.dtype is object else np.int64
        return linalg.coo_rows(self.field, np.concatenate(self.rows), np.concatenate(self.cols),
                               np.concatenate(self.vals).astype(dtype))


# ---------------------------------------------------------------------------
# bases


class HomBasis:
    """Basis of a solution space, stored as sparse coordinate vectors.

    ``decode`` turns a coordinate vector into the user-facing element
    (a matrix ``U``, an :class:`MFHom`, or a pair ``(C, D)``).
    """

    def __init__(self, field: Field, vectors: list[dict], length: int,
                 decode: Callable[[np.ndarray], object], kind: str, meta: dict | None = None):
        self.field = field
        self.vectors = vectors
        self.length = length
        self._decode = decode
        self.kind = kind
        self.meta = meta or {}

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def dense(self, k: int) -> np.ndarray:
        return linalg.sparse_to_dense(self.field, self.vectors[k], self.length)

    def __getitem__(self, k: int):
        return self._decode(self.dense(k))

    def __iter__(self):
        for k in range(len(self.vectors)):
            yield self[k]

    def matrix(self, columns: slice | None = None) -> np.ndarray:
        """All basis vectors as rows (optionally only some coordinates)."""
        cols = range(self.length)[columns] if columns is not None else range(self.length)
        lo, hi = (cols.start, cols.stop) if len(cols) else (0, 0)
        out = self.field.zeros((self.dim, hi - lo))
        for k, vec in enumerate(self.vectors):
            for c, x in vec.items():
                if lo <= c < hi:
                    out[k, c - lo] = x
        return out

    def combine(self, coeffs: Sequence) -> np.ndarray:
        f = self.field
        out = f.zeros(self.length)
        for c, vec in zip(coeffs, self.vectors):
            c = f(c)
            if not c:
                continue
            for k, x in vec.items():
                out[k] = f.reduce(out[k] + c * x)
        return out

    def contains(self, vec: np.ndarray) -> bool:
        """Is the dense coordinate vector ``vec`` in the span of the basis?"""
        vec = self.field.array(vec) if vec.dtype != self.field.dtype else vec
        stacked = np.concatenate([self.matrix(), vec.reshape(1, -1)])
        return linalg.rank(self.field, stacked) == self.dim

    def combination(self, coeffs: Sequence):
        return self._decode(self.combine(coeffs))

    def random_coeffs(self, rng: np.random.Generator) -> list:
        return [self.field.random(rng) for _ in range(self.dim)]

    def random_element(self, rng: np.random.Generator):
        return self.combination(self.random_coeffs(rng))

    def __repr__(self) -> str:
        return f"HomBasis(kind={self.kind!r}, dim={self.dim})"


def intertwiner_basis(field: Field, pairs: Sequence[tuple[np.ndarray, np.ndarray]],
                      s: int | None = None, t: int | None = None) -> HomBasis:
    """Basis of ``{U : U A = B U for every (A, B) in pairs}`` (``U`` is ``t x s``)."""
    if pairs:
        s = pairs[0][0].shape[0] if s is None else s
        t = pairs[0][1].shape[0] if t is None else t
    if s is None or t is None:
        raise ConfigurationError("sizes are needed when there are no operators")
    asm = _Assembler(field, t, s)
    for k, (A, B) in enumerate(pairs):
        if A.shape != (s, s) or B.shape != (t, t):
            raise ConfigurationError(f"operator pair {k} has shapes {A.shape}, {B.shape}")
        base = k * t * s
        asm.right(base, 0, A)
        asm.left(base, 0, B, negate=True)
    vectors = linalg.sparse_nullspace(field, asm.rows_dicts(), t * s)
    return HomBasis(field, vectors, t * s, lambda v: v.reshape(t, s).copy(), "intertwiner",
                    {"shape": (t, s)})


def tuple_hom_basis(A: CommutingTuple, B: CommutingTuple) -> HomBasis:
    """Basis of ``Hom(A, B) = {U : U A_i = B_i U}``."""
    if A.arity != B.arity:
        raise ArityMismatchError(f"arities {A.arity} and {B.arity}")
    if A.field != B.field:
        raise ConfigurationError("tuples over different fields")
    basis = intertwiner_basis(A.field, list(zip(A.matrices, B.matrices)), A.dim, B.dim)
    basis.kind = "tuple"
    basis.meta.update(source=A, target=B)
    return basis


# ---------------------------------------------------------------------------
# homs of matrix factorizations modulo m^N


def _strands_below(M: SeriesMatrix, N: int) -> dict:
    return {w: a for w, a in M.geometric_strands().items() if sum(w) < N}


def _solve_hom_equations(field: Field, src: tuple[dict, dict], tgt: tuple[dict, dict],
                         t: int, s: int, unknowns: list[tuple], N: int, nvars: int):
    """Nullspace of ``S Phi = Phi' T``, ``T Psi = Psi' S`` on strands of degree ``< N``.

    ``unknowns`` lists the monomials ``u`` carrying blocks ``S{u}``,
    ``T{u}``; the unknown vector is ``[S{u0}, T{u0}, S{u1}, T{u1}, ...]``.
    """
    phi, psi = src
    phi2, psi2 = tgt
    ts = t * s
    offset = {u: 2 * k * ts for k, u in enumerate(unknowns)}
    asm = _Assembler(field, t, s)
    eq_base: dict = {}

    def base(e, which):
        key = (e, which)
        if key not in eq_base:
            eq_base[key] = len(eq_base) * ts
        return eq_base[key]

    for u in unknowns:
        du = sum(u)
        oS, oT = offset[u], offset[u] + ts
        for (M, M2, oX, oY, which) in ((phi, phi2, oS, oT, 0), (psi, psi2, oT, oS, 1)):
            # X{u} M{v} - M'{v} Y{u}, with (X, Y) = (S, T) or (T, S)
            for v, a in M.items():
                if du + sum(v) < N:
                    e = tuple(x + y for x, y in zip(u, v))
                    asm.right(base(e, which), oX, a)
            for v, a in M2.items():
                if du + sum(v) < N:
                    e = tuple(x + y for x, y in zip(u, v))
                    asm.left(base(e, which), oY, a, negate=True)
    length = 2 * ts * len(unknowns)
    return linalg.sparse_nullspace(field, asm.rows_dicts(), length), offset, length


def _check_pair(mf: MatrixFactorization, mf2: MatrixFactorization) -> None:
    if mf.ring != mf2.ring:
        raise ConfigurationError(f"factorizations over different rings: {mf.ring} vs {mf2.ring}")
    if not mf.f.same_terms(mf2.f):
        raise ConfigurationError("factorizations of different series")
    if not (mf.phi.param_free and mf2.phi.param_free and mf.psi.param_free and mf2.psi.param_free):
        raise ConfigurationError("factorizations involve parameters; inflate first")


def mf_hom_basis_mod(mf: MatrixFactorization, mf2: MatrixFactorization, N: int = 3) -> HomBasis:
    """Basis of homs ``(S, T): mf -> mf2`` with entries of degree ``< N``, modulo ``m^N``."""
    if not isinstance(N, int) or N < 1:
        raise PreconditionError(f"truncation degree must be >= 1, got {N!r}")
    _check_pair(mf, mf2)
    ring = mf.ring
    field = ring.field
    s, t = mf.size, mf2.size
    src = (_strands_below(mf.phi, N), _strands_below(mf.psi, N))
    tgt = (_strands_below(mf2.phi, N), _strands_below(mf2.psi, N))
    unknowns = monomials_below(ring.nvars, N)
    vectors, offset, length = _solve_hom_equations(field, src, tgt, t, s, unknowns, N, ring.nvars)
    ts = t * s
    width_pad = (0,) * ring.nparams

    def decode(vec: np.ndarray) -> MFHom:
        S_str, T_str = {}, {}
        for u, off in offset.items():
            S_str[u + width_pad] = vec[off:off + ts].reshape(t, s)
            T_str[u + width_pad] = vec[off + ts:off + 2 * ts].reshape(t, s)
        return MFHom(mf, mf2, SeriesMatrix(ring, (t, s), S_str, N), SeriesMatrix(ring, (t, s), T_str, N), N)

    return HomBasis(field, vectors, length, decode, "mf",
                    {"N": N, "offset": offset, "shape": (t, s), "source": mf, "target": mf2,
                     "unknowns": unknowns})


def mf_hom_vector(basis: HomBasis, S: SeriesMatrix, T: SeriesMatrix) -> np.ndarray:
    """Coordinates of ``(S, T)`` (strands of degree ``< N`` only) in the layout of ``basis``."""
    t, s = basis.meta["shape"]
    ts = t * s
    N = basis.meta["N"]
    out = basis.field.zeros(basis.length)
    for X, shift in ((S, 0), (T, ts)):
        if X.shape != (t, s):
            raise ConfigurationError(f"expected {(t, s)} matrices, got {X.shape}")
        for w, a in X.geometric_strands().items():
            if sum(w) < N:
                off = basis.meta["offset"][w] + shift
                out[off:off + ts] = a.reshape(-1)
    return out


def low_strands(basis: HomBasis) -> tuple[np.ndarray, np.ndarray, dict, dict]:
    """``S{1}``, ``T{1}`` and the linear strands of every basis element, batched.

    Returns arrays of shape ``(dim, t, s)``: ``S0, T0`` and dictionaries
    variable-index -> array for the degree-one strands.
    """
    if basis.kind != "mf":
        raise ConfigurationError("low_strands needs a hom basis of matrix factorizations")
    t, s = basis.meta["shape"]
    ts = t * s
    offset = basis.meta["offset"]
    nvars = basis.meta["source"].ring.nvars
    zero = (0,) * nvars
    # unknowns are ordered by degree, so degrees 0 and 1 come first
    hi = max(offset[u] for u in offset if sum(u) <= 1) + 2 * ts
    M = basis.matrix(slice(0, hi))
    d = basis.dim

    def grab(off):
        return M[:, off:off + ts].reshape(d, t, s)

    S0, T0 = grab(offset[zero]), grab(offset[zero] + ts)
    S1, T1 = {}, {}
    for u, off in offset.items():
        if sum(u) == 1:
            k = u.index(1)
            S1[k], T1[k] = grab(off), grab(off + ts)
    return S0, T0, S1, T1


def project_to_lower_truncation(basis: HomBasis, N: int) -> list[MFHom]:
    """Drop strands of degree ``>= N`` from every element (``N`` below the basis truncation)."""
    out = []
    for hom in basis:
        out.append(MFHom(hom.source, hom.target, hom.S.truncate(N), hom.T.truncate(N), N))
    return out


# ---------------------------------------------------------------------------
# reduced towers and the block lemma


def reduced_tower(A: CommutingTuple, level: int, nvars: int) -> tuple[dict, dict]:
    """Strands of the inflated tower at ``level`` modulo ``m^2``, built from the bit pattern.

    Block ``(r, c)`` is nonzero exactly when ``r = c + 2^b`` with bit ``b``
    clear in ``c``; it equals ``+-(x_{b+1} I - A_{b+1} z)`` with sign
    ``(-1)^(number of bits of r above b)`` in the first factor and the
    opposite sign in the second.
    """
    f = A.field
    m = A.dim
    K = 2 ** level
    size = m * K
    zi = nvars - 1
    phi: dict = {}
    psi: dict = {}

    def unit(idx):
        e = [0] * nvars
        e[idx] = 1
        return tuple(e)

    eye = f.eye(m)
    for b in range(level):
        xs_phi, xs_psi = f.zeros((size, size)), f.zeros((size, size))
        for c in range(K):
            if c >> b & 1:
                continue
            r = c + (1 << b)
            sign = -1 if bin(r >> (b + 1)).count("1") % 2 else 1
            rs, cs = slice(r * m, (r + 1) * m), slice(c * m, (c + 1) * m)
            xs_phi[rs, cs] = f.reduce_array(eye * sign)
            xs_psi[rs, cs] = f.reduce_array(eye * -sign)
            for store, sg in ((phi, sign), (psi, -sign)):
                zkey = unit(zi)
                if zkey not in store:
                    store[zkey] = f.zeros((size, size))
                store[zkey][rs, cs] = f.reduce_array(store[zkey][rs, cs] - sg * A.matrices[b])
        phi[unit(b)] = xs_phi
        psi[unit(b)] = xs_psi
    return phi, psi


def _blocks(X: np.ndarray, K: int, mt: int, ms: int) -> np.ndarray:
    """``(batch, t, s)`` -> ``(batch, K, K, mt, ms)`` block view."""
    b = X.shape[0]
    return X.reshape(b, K, mt, K, ms).transpose(0, 1, 3, 2, 4)


def _nonzero_per(X: np.ndarray) -> np.ndarray:
    return np.any(X != 0, axis=tuple(range(1, X.ndim)))


def _bmm(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return field.matmul(a, b)


@dataclass
class BatchReport:
    """Per-element verdicts of a batched certification."""

    ok: np.ndarray
    failures: dict = dc_field(default_factory=dict)  # element -> (check, detail)
    disagreements: list = dc_field(default_factory=list)  # elements where the two routes differ

    def fail(self, mask: np.ndarray, check: str, detail=None) -> None:
        for k in np.flatnonzero(mask):
            k = int(k)
            if self.ok[k]:
                self.ok[k] = False
                self.failures[k] = (check, detail)

    @property
    def all_ok(self) -> bool:
        return bool(np.all(self.ok))


def _lemma_checks(field: Field, C: np.ndarray, D: np.ndarray, level: int,
                  A: CommutingTuple, B: CommutingTuple, rep: BatchReport,
                  check_reduced: bool = True) -> None:
    """Block lemma items on batched ``(C, D)`` of size ``mB 2^level x mA 2^level``."""
    K = 2 ** level
    ms, mt = A.dim, B.dim
    nvars = A.arity + 1
    if check_reduced:
        phi, psi = reduced_tower(A, level, nvars)
        phi2, psi2 = reduced_tower(B, level, nvars)
        for e in sorted(set(phi) | set(phi2)):
            z_s = field.zeros((ms * K, ms * K))
            z_t = field.zeros((mt * K, mt * K))
            r1 = field.reduce_array(_bmm(field, C, phi.get(e, z_s)) - _bmm(field, phi2.get(e, z_t), D))
            r2 = field.reduce_array(_bmm(field, D, psi.get(e, z_s)) - _bmm(field, psi2.get(e, z_t), C))
            rep.fail(_nonzero_per(r1) | _nonzero_per(r2), "reduced equations", {"strand": e})
    Cb, Db = _blocks(C, K, mt, ms), _blocks(D, K, mt, ms)
    ri, ci = np.triu_indices(K, 1)
    if ri.size:
        rep.fail(_nonzero_per(Cb[:, ri, ci]) | _nonzero_per(Db[:, ri, ci]), "lower triangular")
    diag = np.arange(K)
    Cd, Dd = Cb[:, diag, diag], Db[:, diag, diag]
    c11, d11 = Cd[:, :1], Dd[:, :1]
    for X in (Cd, Dd):
        as_c = np.all(X == c11, axis=(2, 3))
        as_d = np.all(X == d11, axis=(2, 3))
        rep.fail(~np.all(as_c | as_d, axis=1), "diagonal blocks in {C11, D11}")
    last = K - 1
    for j in range(level):
        c = last - (1 << j)
        r = field.reduce_array(_bmm(field, Cb[:, last, last], A.matrices[j])
                               - _bmm(field, B.matrices[j], Db[:, c, c]))
        rep.fail(_nonzero_per(r), "last block intertwines", {"j": j + 1})


def dagger_basis(dec, A: CommutingTuple, B: CommutingTuple, level: int) -> HomBasis:
    """Scalar pairs ``(C, D)`` solving the reduced equations of the level-``level`` tower.

    Solved generically: the tower is built with :func:`param_factorization`,
    inflated, reduced mod ``m^2`` and fed to the hom solver with constant
    unknowns only.
    """
    tower = param_factorization(dec, level)
    # the partial sum factored at this level involves the parameters, so only
    # the two factors are inflated
    src = (tower.phi.inflate(A), tower.psi.inflate(A))
    tgt = (tower.phi.inflate(B), tower.psi.inflate(B))
    ring = src[0].ring
    field = ring.field
    zero = (0,) * ring.nvars
    red = lambda M: {w: a for w, a in M.geometric_strands().items() if sum(w) == 1}
    s, t = src[0].rows, tgt[0].rows
    vectors, offset, length = _solve_hom_equations(
        field, (red(src[0]), red(src[1])), (red(tgt[0]), red(tgt[1])), t, s, [zero], 2, ring.nvars)
    ts = t * s
    decode = lambda v: (v[:ts].reshape(t, s).copy(), v[ts:].reshape(t, s).copy())
    return HomBasis(field, vectors, length, decode, "dagger", {"level": level, "source": A, "target": B})


@dataclass(frozen=True)
class LemmaReport:
    ok: bool
    failure: str | None = None
    detail: object = None


def certify_lower_triangular(C: np.ndarray, D: np.ndarray, level: int,
                             A: CommutingTuple, B: CommutingTuple) -> LemmaReport:
    """Check that ``(C, D)`` solves the reduced equations and has the lemma's block form."""
    field = A.field
    shape = (B.dim * 2 ** level, A.dim * 2 ** level)
    if C.shape != shape or D.shape != shape:
        raise ConfigurationError(f"expected {shape} matrices, got {C.shape} and {D.shape}")
    rep = BatchReport(np.ones(1, dtype=bool))
    _lemma_checks(field, C[None], D[None], level, A, B, rep)
    if rep.all_ok:
        return LemmaReport(True)
    check, detail = rep.failures[0]
    return LemmaReport(False, check, detail)


def certify_dagger_basis(basis: HomBasis) -> BatchReport:
    A, B, level = basis.meta["source"], basis.meta["target"], basis.meta["level"]
    field = basis.field
    t = B.dim * 2 ** level
    s = A.dim * 2 ** level
    M = basis.matrix()
    d = basis.dim
    C = M[:, : t * s].reshape(d, t, s)
    D = M[:, t * s:].reshape(d, t, s)
    rep = BatchReport(np.ones(d, dtype=bool))
    _lemma_checks(field, C, D, level, A, B, rep)
    return rep


# ---------------------------------------------------------------------------
# constant-diagonal certification


def _route_inspection(field, S0, T0, A, B, n, rep: BatchReport) -> None:
    K = 2 ** n
    ms, mt = A.dim, B.dim
    Sb, Tb = _blocks(S0, K, mt, ms), _blocks(T0, K, mt, ms)
    ri, ci = np.triu_indices(K, 1)
    if ri.size:
        rep.fail(_nonzero_per(Sb[:, ri, ci]), "inspection: S{1} block lower triangular")
        rep.fail(_nonzero_per(Tb[:, ri, ci]), "inspection: T{1} block lower triangular")
    U = Sb[:, 0, 0]
    for k in range(K):
        rep.fail(_nonzero_per(Sb[:, k, k] != U), "inspection: S{1} diagonal constant", {"block": k})
        rep.fail(_nonzero_per(Tb[:, k, k] != U), "inspection: T{1} diagonal equals U", {"block": k})
    for i in range(n):
        r = field.reduce_array(_bmm(field, U, A.matrices[i]) - _bmm(field, B.matrices[i], U))
        rep.fail(_nonzero_per(r), "inspection: U intertwines", {"i": i + 1})


def _route_strand_equations(field, S0, T0, S1, T1, A, B, n, rep: BatchReport) -> None:
    K = 2 ** n
    ms, mt = A.dim, B.dim
    zi = n
    d = S0.shape[0]
    zero = field.zeros((d, mt, ms))

    def first_row(X, col):
        return _blocks(X, K, mt, ms)[:, 0, col] if X is not None else zero

    head = [1 << i for i in range(n)]  # column of the block S_{1, 2^i + 1}
    Sz = {i: first_row(S1.get(zi), head[i]) for i in range(n)}
    Sx = {(j, i): first_row(S1.get(j), head[i]) for i in range(n) for j in range(n)}
    S11 = first_row(S0, 0)
    T11 = first_row(T0, 0)
    # {z^2}: S11{1} - sum_i S_{1,2^(i-1)+1}{z} A_i = T11{1}
    acc = S11 - T11
    for i in range(n):
        acc = acc - _bmm(field, Sz[i], A.matrices[i])
    rep.fail(_nonzero_per(field.reduce_array(acc)), "strand z^2")
    for i in range(n):
        # {x_i^2}
        rep.fail(_nonzero_per(Sx[(i, i)]), "strand x_i^2", {"i": i + 1})
        # {x_i z}
        acc = Sz[i]
        for j in range(n):
            acc = acc - _bmm(field, Sx[(i, j)], A.matrices[j])
        rep.fail(_nonzero_per(field.reduce_array(acc)), "strand x_i z", {"i": i + 1})
        # {x_i x_j}
        for j in range(i + 1, n):
            rep.fail(_nonzero_per(field.reduce_array(Sx[(i, j)] + Sx[(j, i)])), "strand x_i x_j",
                     {"i": i + 1, "j": j + 1})
    # consequence: S11{1} - T11{1} = sum_{i,j} S_{1,2^(j-1)+1}{x_i} A_j A_i = 0
    acc = field.reduce_array(S11 - T11)
    rep.fail(_nonzero_per(acc), "S11{1} = T11{1}")
    _lemma_checks(field, S0, T0, n, A, B, rep)


def _certify_batch(field, S0, T0, S1, T1, A, B) -> tuple[BatchReport, np.ndarray]:
    n = A.arity
    d = S0.shape[0]
    insp = BatchReport(np.ones(d, dtype=bool))
    strands = BatchReport(np.ones(d, dtype=bool))
    _route_inspection(field, S0, T0, A, B, n, insp)
    _route_strand_equations(field, S0, T0, S1, T1, A, B, n, strands)
    rep = BatchReport(insp.ok & strands.ok)
    for k in range(d):
        if not insp.ok[k]:
            rep.failures[k] = insp.failures[k]
        elif not strands.ok[k]:
            rep.failures[k] = strands.failures[k]
    rep.disagreements = [int(k) for k in np.flatnonzero(insp.ok != strands.ok)]
    U = _blocks(S0, 2 ** n, B.dim, A.dim)[:, 0, 0]
    return rep, U


def _tuples_of(hom: MFHom) -> tuple[CommutingTuple, CommutingTuple]:
    src, tgt = hom.source, hom.target
    if not (isinstance(src, InflatedFactorization) and isinstance(tgt, InflatedFactorization)):
        raise ConfigurationError("certification needs homs between inflated factorizations")
    return src.tuple, tgt.tuple


def certify_constant_diagonal(hom: MFHom) -> TupleHom:
    """Certify the block form of ``S{1}``, ``T{1}`` and return the diagonal block ``U``."""
    if hom.trunc is not None and hom.trunc < 3:
        raise PreconditionError("the strand equations need the hom equations modulo m^3 or finer")
    A, B = _tuples_of(hom)
    field = A.field
    nv = hom.S.ring.nvars
    zero = (0,) * nv

    def unit(k):
        e = [0] * nv
        e[k] = 1
        return tuple(e)

    S0 = hom.S.scalar_strand(zero)[None]
    T0 = hom.T.scalar_strand(zero)[None]
    S1 = {k: hom.S.scalar_strand(unit(k))[None] for k in range(nv)}
    T1 = {k: hom.T.scalar_strand(unit(k))[None] for k in range(nv)}
    rep, U = _certify_batch(field, S0, T0, S1, T1, A, B)
    if not rep.all_ok:
        check, detail = rep.failures[0]
        raise CertificationError(f"constant-diagonal certification failed: {check}",
                                 witness={"check": check, "detail": detail})
    return TupleHom(A, B, U[0].copy())


@dataclass
class BasisCertificate:
    ok: bool
    dim: int
    failures: dict
    disagreements: list
    extracted: np.ndarray  # (dim, m', m)


def certify_hom_basis(basis: HomBasis) -> BasisCertificate:
    """Run both certification routes on every element of an mf hom basis."""
    if basis.meta.get("N", 0) < 3:
        raise PreconditionError("certification needs a basis computed modulo m^3 or finer")
    src, tgt = basis.meta["source"], basis.meta["target"]
    if not (isinstance(src, InflatedFactorization) and isinstance(tgt, InflatedFactorization)):
        raise ConfigurationError("certification needs inflated factorizations")
    S0, T0, S1, T1 = low_strands(basis)
    rep, U = _certify_batch(basis.field, S0, T0, S1, T1, src.tuple, tgt.tuple)
    return BasisCertificate(rep.all_ok, basis.dim, rep.failures, rep.disagreements, U)


# ---------------------------------------------------------------------------
# generic determinants and nilpotency


def generic_determinant(field: Field, mats: Sequence[np.ndarray]):
    """``det(t_1 M_1 + ... + t_k M_k)`` as a polynomial in ``t_1..t_k``."""
    if not mats:
        raise ConfigurationError("need at least one matrix")
    m = mats[0].shape[0]
    k = len(mats)
    ring = SeriesRing(field, tuple(f"t{i}" for i in range(1, k + 1)))
    ts = [ring.gen(f"t{i}") for i in range(1, k + 1)]
    entries = [[sum((ts[q].scale(mats[q][i, j]) for q in range(k)), ring.zero())
                for j in range(m)] for i in range(m)]
    memo: dict = {}

    def minor(row: int, cols: int):
        # determinant of rows row.. and the columns in bitmask ``cols``
        if row == m:
            return ring.one()
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = ring.zero()
        sign = 1
        for j in range(m):
            if cols >> j & 1:
                e = entries[row][j]
                if e:
                    term = e * minor(row + 1, cols & ~(1 << j))
                    total = total + (term if sign > 0 else -term)
                sign = -sign
        memo[key] = total
        return total

    return minor(0, (1 << m) - 1)


def generic_nilpotent(field: Field, mats: Sequence[np.ndarray]) -> bool:
    """Is every element of ``span(mats)`` nilpotent?  (``M(t)^m == 0`` identically.)"""
    mats = [M for M in mats if not field.is_zero_array(M)]
    if not mats:
        return True
    m = mats[0].shape[0]
    ring = SeriesRing(field, tuple(f"t{i}" for i in range(1, len(mats) + 1)))
    strands = {}
    for q, M in enumerate(mats):
        key = [0] * len(mats)
        key[q] = 1
        strands[tuple(key)] = M
    X = SeriesMatrix(ring, (m, m), strands)
    P = X
    for _ in range(m - 1):
        P = P @ X
        if P.is_zero():
            return True
    return P.is_zero()


# ---------------------------------------------------------------------------
# isomorphism and indecomposability


@dataclass(frozen=True)
class Verdict:
    answer: str  # "yes" | "no" | "unknown"
    reason: str
    witness: object = None

    def __str__(self) -> str:
        return f"{self.answer} ({self.reason})"


def _exhaustive_coeffs(field: Field, k: int, policy: Policy):
    order = field.order
    if order is None or k > policy.exhaustive_dim or order ** k > policy.exhaustive_limit:
        return None
    return itertools.product(range(order), repeat=k)


def _matrices(basis: HomBasis) -> list[np.ndarray]:
    return list(basis)


def span_has_invertible(field: Field, mats: Sequence[np.ndarray], policy: Policy, salt: int = 0) -> Verdict:
    """Decide whether ``span(mats)`` (square matrices) contains an invertible matrix."""
    if not mats:
        return Verdict("no", "the space is zero")
    m = mats[0].shape[0]
    rng = policy.rng(salt)
    for _ in range(policy.samples):
        c = [field.random(rng) for _ in mats]
        X = _lin_comb(field, c, mats)
        if linalg.is_invertible(field, X):
            return Verdict("yes", "invertible element found by sampling", X)
    if m <= policy.generic_det_max:
        small = linalg.row_basis(field, [M.reshape(-1) for M in mats], m * m)
        small = [r.reshape(m, m) for r in small]
        if not small or generic_determinant(field, small).is_zero():
            return Verdict("no", "generic determinant of the space vanishes identically")
    coeffs = _exhaustive_coeffs(field, len(mats), policy)
    if coeffs is not None:
        for c in coeffs:
            X = _lin_comb(field, c, mats)
            if linalg.is_invertible(field, X):
                return Verdict("yes", "invertible element found by exhaustive search", X)
        return Verdict("no", "exhaustive search found no invertible element")
    return Verdict("unknown", "no invertible element sampled")


def _lin_comb(field: Field, coeffs, mats) -> np.ndarray:
    out = field.zeros(mats[0].shape)
    for c, M in zip(coeffs, mats):
        if c:
            out = out + field(c) * M
    return field.reduce_array(out)


def is_isomorphic_tuples(A: CommutingTuple, B: CommutingTuple, policy: Policy | None = None) -> Verdict:
    policy = policy or Policy()
    if A.arity != B.arity:
        raise ArityMismatchError(f"arities {A.arity} and {B.arity}")
    if A.dim != B.dim:
        return Verdict("no", f"dimensions differ ({A.dim} vs {B.dim})")
    field = A.field
    H = tuple_hom_basis(A, B)
    E = tuple_hom_basis(A, A)
    if H.dim != E.dim:
        return Verdict("no", f"dim Hom(A, B) = {H.dim} but dim End(A) = {E.dim}")
    H2 = tuple_hom_basis(B, A)
    E2 = tuple_hom_basis(B, B)
    if H2.dim != E2.dim or H2.dim != H.dim:
        return Verdict("no", f"dim Hom(B, A) = {H2.dim} but dim End(B) = {E2.dim}")
    v = span_has_invertible(field, _matrices(H), policy)
    if v.answer == "yes":
        TupleHom(A, B, v.witness)
    return v


def _fitting_idempotent(field: Field, X: np.ndarray) -> np.ndarray | None:
    """Projection onto ``im X^m`` along ``ker X^m``; ``None`` if trivial."""
    m = X.shape[0]
    P = field.matpow(X, m)
    r = linalg.rank(field, P)
    if r in (0, m):
        return None
    img = linalg.row_basis(field, list(P.T), m)  # rows span the column space
    ker = linalg.nullspace(field, P)
    Q = np.concatenate([img.T, np.stack(ker, axis=1)], axis=1)
    Qinv = linalg.inverse(field, Q)
    Dg = field.zeros((m, m))
    for i in range(r):
        Dg[i, i] = field.one
    return field.matmul(field.matmul(Q, Dg), Qinv)


def _single_eigenvalue(field: Field, M: np.ndarray):
    """``lam`` with ``M - lam I`` nilpotent, or ``None``."""
    m = M.shape[0]
    candidates = []
    if field.characteristic == 0 or m % field.characteristic:
        tr = field.reduce(sum(M[i, i] for i in range(m)))
        candidates.append(field.div(tr, m))
    elif field.order is not None:
        candidates.extend(field.elements())
    for lam in candidates:
        if linalg.is_nilpotent(field, field.reduce_array(M - field.scalar_matrix(lam, m))):
            return lam
    return None


def is_indecomposable(A: CommutingTuple, policy: Policy | None = None) -> Verdict:
    policy = policy or Policy()
    field = A.field
    m = A.dim
    E = tuple_hom_basis(A, A)
    mats = _matrices(E)
    if E.dim <= 1:
        return Verdict("yes", "the endomorphism algebra is the ground field")
    # idempotent from an element that is neither nilpotent nor invertible
    rng = policy.rng(1)
    candidates = list(mats) + [_lin_comb(field, [field.random(rng) for _ in mats], mats)
                               for _ in range(policy.samples)]
    for X in candidates:
        e = _fitting_idempotent(field, X)
        if e is not None:
            TupleHom(A, A, e)
            return Verdict("no", "Fitting idempotent of an endomorphism", e)
    # local algebra certificate: k I + a nilpotent subspace
    lams = [_single_eigenvalue(field, M) for M in mats]
    if all(l is not None for l in lams):
        shifted = [field.reduce_array(M - field.scalar_matrix(l, m)) for M, l in zip(mats, lams)]
        if generic_nilpotent(field, shifted):
            return Verdict("yes", "every endomorphism is scalar plus nilpotent")
    coeffs = _exhaustive_coeffs(field, len(mats), policy)
    if coeffs is not None:
        I = field.eye(m)
        for c in coeffs:
            X = _lin_comb(field, c, mats)
            if field.equal(field.matmul(X, X), X) and not field.is_zero_array(X) and not field.equal(X, I):
                return Verdict("no", "idempotent found by exhaustive search", X)
        return Verdict("yes", "exhaustive search found no nontrivial idempotent")
    return Verdict("unknown", "no idempotent found and no local certificate")


# ---------------------------------------------------------------------------
# isomorphism of inflated factorizations


def mf_isomorphism_verdict(basis: HomBasis, policy: Policy | None = None) -> Verdict:
    """Does the solved hom space contain an element with invertible constant strand?

    A "yes" carries an :class:`MFHom` whose ``S{1}`` and ``T{1}`` are
    invertible (so ``S`` and ``T`` are invertible over the power series
    ring).  A "no" requires every basis element to pass the
    constant-diagonal certification, after which ``det S{1} = det(U)^(2^n)``
    and the generic determinant of the extracted ``U``'s decides.
    """
    policy = policy or Policy()
    field = basis.field
    cert = certify_hom_basis(basis)
    if not cert.ok:
        raise CertificationError("hom basis failed certification", witness=cert.failures)
    S0, T0, _, _ = low_strands(basis)
    rng = policy.rng(2)
    for _ in range(policy.samples):
        c = [field.random(rng) for _ in range(basis.dim)]
        S1 = _lin_comb(field, c, list(S0))
        T1 = _lin_comb(field, c, list(T0))
        if S1.shape[0] == S1.shape[1] and linalg.is_invertible(field, S1) and linalg.is_invertible(field, T1):
            return Verdict("yes", "hom with invertible constant strand found", basis.combination(c))
    Us = [U for U in cert.extracted if not field.is_zero_array(U)]
    if not Us or Us[0].shape[0] != Us[0].shape[1]:
        return Verdict("no", "no nonzero square diagonal block in the hom space")
    m = Us[0].shape[0]
    if m <= policy.generic_det_max:
        small = [r.reshape(m, m) for r in linalg.row_basis(field, [U.reshape(-1) for U in Us], m * m)]
        if generic_determinant(field, small).is_zero():
            return Verdict("no", "generic determinant of the diagonal blocks vanishes identically")
    return Verdict("unknown", "no invertible hom sampled")
