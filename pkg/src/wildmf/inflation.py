"""Commuting tuples and the functor they induce on matrix factorizations.

A tuple ``(A_1, ..., A_n)`` of commuting ``m x m`` matrices is substituted
for the parameters of the tower from :func:`~wildmf.matfac.param_factorization`;
a morphism ``U`` (``U A_i = A'_i U``) goes to ``I_{2^n} (x) U``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .decomp import A1Decomposition
from .errors import ArityMismatchError, ConfigurationError, InvalidHomError, NonCommutingError
from .fields import Field
from .matfac import MatrixFactorization, MFHom, param_factorization
from .series import ParamPoly
from .smatrix import SeriesMatrix


class CommutingTuple:
    """``n`` pairwise commuting square matrices of one size ``m``."""

    __slots__ = ("field", "matrices", "dim")

    def __init__(self, field: Field, matrices: Sequence, dim: int | None = None):
        mats = [m if isinstance(m, np.ndarray) and m.dtype == field.dtype else field.array(m)
                for m in matrices]
        if not mats and dim is None:
            raise ConfigurationError("an empty tuple needs an explicit dimension")
        m = mats[0].shape[0] if mats else int(dim)
        for k, a in enumerate(mats):
            if a.shape != (m, m):
                raise ConfigurationError(f"matrix {k + 1} has shape {a.shape}, expected {(m, m)}")
        if dim is not None and int(dim) != m:
            raise ConfigurationError(f"dimension {dim} does not match matrices of size {m}")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                comm = field.reduce_array(field.matmul(mats[i], mats[j]) - field.matmul(mats[j], mats[i]))
                if not field.is_zero_array(comm):
                    raise NonCommutingError(f"A{i + 1} and A{j + 1} do not commute",
                                            witness={"i": i + 1, "j": j + 1, "commutator": comm})
        self.field = field
        self.matrices = tuple(mats)
        self.dim = m

    @property
    def arity(self) -> int:
        return len(self.matrices)

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.matrices[i]

    def __eq__(self, other):
        if not isinstance(other, CommutingTuple):
            return NotImplemented
        return (self.field == other.field and self.dim == other.dim and self.arity == other.arity
                and all(self.field.equal(a, b) for a, b in zip(self.matrices, other.matrices)))

    __hash__ = None

    def conjugate(self, P: np.ndarray) -> "CommutingTuple":
        """``(P A_i P^-1)``, an isomorphic tuple."""
        f = self.field
        Pinv = linalg.inverse(f, P)
        return CommutingTuple(f, [f.matmul(f.matmul(P, a), Pinv) for a in self.matrices], self.dim)

    def direct_sum(self, other: "CommutingTuple") -> "CommutingTuple":
        if other.arity != self.arity:
            raise ArityMismatchError(f"arities {self.arity} and {other.arity}")
        f = self.field
        out = []
        for a, b in zip(self.matrices, other.matrices):
            blk = f.zeros((self.dim + other.dim,) * 2)
            blk[: self.dim, : self.dim] = a
            blk[self.dim:, self.dim:] = b
            out.append(blk)
        return CommutingTuple(f, out, self.dim + other.dim)

    def __repr__(self) -> str:
        return f"CommutingTuple(arity={self.arity}, dim={self.dim}, field={self.field})"


@dataclass(frozen=True)
class TupleHom:
    """``U`` (``m' x m``) with ``U A_i = A'_i U`` for every ``i``."""

    source: CommutingTuple
    target: CommutingTuple
    U: np.ndarray

    def __post_init__(self):
        if self.source.arity != self.target.arity:
            raise ArityMismatchError(f"arities {self.source.arity} and {self.target.arity}")
        f = self.source.field
        if self.U.shape != (self.target.dim, self.source.dim):
            raise ConfigurationError(f"U has shape {self.U.shape}, expected {(self.target.dim, self.source.dim)}")
        for i, (a, b) in enumerate(zip(self.source.matrices, self.target.matrices), start=1):
            r = f.reduce_array(f.matmul(self.U, a) - f.matmul(b, self.U))
            if not f.is_zero_array(r):
                raise InvalidHomError(f"U A{i} != A'{i} U", witness={"index": i, "residual": r})

    @classmethod
    def identity(cls, A: CommutingTuple) -> "TupleHom":
        return cls(A, A, A.field.eye(A.dim))

    @classmethod
    def zero(cls, A: CommutingTuple, B: CommutingTuple) -> "TupleHom":
        return cls(A, B, A.field.zeros((B.dim, A.dim)))

    def then(self, other: "TupleHom") -> "TupleHom":
        """``other o self``."""
        if other.source != self.target:
            raise ConfigurationError("homs are not composable")
        return TupleHom(self.source, other.target, self.source.field.matmul(other.U, self.U))

    def __add__(self, other: "TupleHom") -> "TupleHom":
        f = self.source.field
        return TupleHom(self.source, self.target, f.reduce_array(self.U + other.U))


def _as_tuple(A, field: Field | None = None) -> CommutingTuple:
    if isinstance(A, CommutingTuple):
        return A
    if field is None:
        raise ConfigurationError("raw matrices need a field")
    return CommutingTuple(field, A)


def eval_params(p: ParamPoly, A) -> np.ndarray:
    """Substitute the tuple for ``a1, a2, ...``; constants become multiples of ``I_m``."""
    A = _as_tuple(A, p.field)
    if not A.arity:
        if p.degree() > 0:
            raise ConfigurationError("no matrices given for a parameter-dependent polynomial")
        return p.field.scalar_matrix(p.constant(), A.dim)
    return p.eval(A)


def inflate_matrix(P: SeriesMatrix, A) -> SeriesMatrix:
    """Blow every entry up to an ``m x m`` block by substituting the tuple."""
    A = _as_tuple(A, P.field)
    return P.inflate(A)


@dataclass(frozen=True)
class InflatedFactorization(MatrixFactorization):
    decomposition: A1Decomposition | None = None
    tuple: CommutingTuple | None = None

    @property
    def m(self) -> int:
        return self.tuple.dim

    @property
    def n(self) -> int:
        return self.decomposition.n


class EmbeddingFunctor:
    """Functor from commuting ``n``-tuples to factorizations of one fixed ``f``."""

    def __init__(self, dec: A1Decomposition):
        self.decomposition = dec
        self.tower = param_factorization(dec)

    @property
    def n(self) -> int:
        return self.decomposition.n

    def obj(self, A: CommutingTuple) -> InflatedFactorization:
        if A.arity != self.n:
            raise ArityMismatchError(f"tuple of arity {A.arity}, decomposition has n = {self.n}")
        if A.field != self.tower.ring.field:
            raise ConfigurationError(f"tuple over {A.field}, factorization over {self.tower.ring.field}")
        base = self.tower.inflate(A)
        return InflatedFactorization(base.phi, base.psi, base.f, self.decomposition, A)

    def lift_matrix(self, U: np.ndarray) -> SeriesMatrix:
        """``I_{2^n} (x) U`` as a constant matrix over the inflated ring."""
        f = self.tower.ring.field
        ring = self.tower.ring.without_params()
        return SeriesMatrix.constant(ring, f.kron(f.eye(2 ** self.n), U))

    def mor(self, U: TupleHom, source: InflatedFactorization | None = None,
            target: InflatedFactorization | None = None) -> MFHom:
        source = source or self.obj(U.source)
        target = target or self.obj(U.target)
        lifted = self.lift_matrix(U.U)
        return MFHom(source, target, lifted, lifted)


def functor_object(dec: A1Decomposition, A: CommutingTuple) -> InflatedFactorization:
    return EmbeddingFunctor(dec).obj(A)


def functor_morphism(dec: A1Decomposition, U: TupleHom) -> MFHom:
    hom = EmbeddingFunctor(dec).mor(U)
    if not hom.is_valid():
        raise InvalidHomError("lifted matrix is not a hom of factorizations")
    return hom


@dataclass(frozen=True)
class FunctorialityReport:
    composition: bool
    identity: bool
    additive: bool
    homs_valid: bool
    rank_law: bool
    injective_match: bool
    surjective_match: bool
    ranks: tuple

    @property
    def ok(self) -> bool:
        return all((self.composition, self.identity, self.additive, self.homs_valid,
                    self.rank_law, self.injective_match, self.surjective_match))


def check_functoriality(functor: EmbeddingFunctor, U: TupleHom, V: TupleHom) -> FunctorialityReport:
    """Compare ``F(V o U)`` with ``F(V) F(U)`` and the other functor laws for ``A -U-> B -V-> C``."""
    f = U.source.field
    A, B, C = U.source, U.target, V.target
    FA, FB, FC = functor.obj(A), functor.obj(B), functor.obj(C)
    FU = functor.mor(U, FA, FB)
    FV = functor.mor(V, FB, FC)
    FVU = functor.mor(U.then(V), FA, FC)
    composition = FVU.S == FV.S @ FU.S
    ident = functor.mor(TupleHom.identity(A), FA, FA).S == SeriesMatrix.identity(FA.ring, FA.size)
    twice = functor.mor(U + U, FA, FB).S
    additive = twice == FU.S + FU.S
    homs_valid = FU.is_valid() and FV.is_valid() and FVU.is_valid()
    scale = 2 ** functor.n
    ranks = []
    rank_law = injective = surjective = True
    for hom, lifted in ((U, FU), (V, FV), (U.then(V), FVU)):
        r = linalg.rank(f, hom.U)
        big = lifted.S.scalar_strand((0,) * lifted.S.ring.nvars)
        R = linalg.rank(f, big)
        ranks.append((r, R))
        rank_law &= R == scale * r
        rows, cols = hom.U.shape
        injective &= (r == cols) == (R == big.shape[1])
        surjective &= (r == rows) == (R == big.shape[0])
    return FunctorialityReport(composition, ident, additive, homs_valid, rank_law,
                               injective, surjective, tuple(ranks))
