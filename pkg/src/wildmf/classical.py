"""Two classical representation embeddings, as explicit operator pairs.

``gp_embed`` sends operators ``X_1..X_m`` on ``V`` to a pair ``(A, B)`` on
``V^m`` (scalars ``c_i`` on the diagonal of ``A``, ``X_i`` on the diagonal
and identities below it in ``B``).  ``drozd_embed`` sends a pair ``(X, Y)``
to a ``32n``-dimensional module over ``k[a, b]/(a^2, ab^2, b^3)``.

The certifiers solve ``S A = A' S``, ``S B = B' S`` and check the block
form of every basis element of the solution space.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import ConfigurationError, DistinctnessError, FieldTooSmallError
from .fields import Field
from .homs import HomBasis, Policy, Verdict, generic_determinant, intertwiner_basis

FREE = "free pair"
DROZD = "drozd"

# block partition of a Drozd module in units of n: corners 15, centre 2
DROZD_PARTITION = (15, 2, 15)


@dataclass(frozen=True)
class BimatrixModule:
    """A module over ``k<a, b>`` (or a quotient), given by the actions ``A`` and ``B``."""

    field: Field
    A: np.ndarray
    B: np.ndarray
    profile: str
    operators: tuple
    scalars: tuple
    unit: int  # size n of the smallest blocks
    blocks: tuple = ()  # coarse block partition (in units of ``unit``)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def relations(self) -> dict:
        """Defining relations of the profile and whether they hold."""
        if self.profile != DROZD:
            return {}
        f = self.field
        A, B = self.A, self.B
        mm = f.matmul
        AB, BA = mm(A, B), mm(B, A)
        return {
            "AB = BA": f.equal(AB, BA),
            "A^2 = 0": f.is_zero_array(mm(A, A)),
            "AB^2 = 0": f.is_zero_array(mm(AB, B)),
            "B^3 = 0": f.is_zero_array(mm(mm(B, B), B)),
        }


def _scalars(field: Field, cs, count: int, what: str) -> tuple:
    if field.order is not None and field.order < count:
        raise FieldTooSmallError(f"{what} needs {count} distinct scalars but {field} has {field.order} elements")
    cs = tuple(range(1, count + 1)) if cs is None else tuple(cs)
    if len(cs) != count:
        raise ConfigurationError(f"{what} needs exactly {count} scalars, got {len(cs)}")
    vals = [field(c) for c in cs]
    if len(set(vals)) != len(vals):
        raise DistinctnessError(f"{what} needs pairwise distinct scalars, got {cs}",
                                witness={"scalars": [field.fmt(v) for v in vals]})
    return tuple(vals)


def _ops(field: Field, ops) -> list[np.ndarray]:
    out = [o if isinstance(o, np.ndarray) and o.dtype == field.dtype else field.array(o) for o in ops]
    if not out:
        raise ConfigurationError("need at least one operator")
    n = out[0].shape[0]
    for k, o in enumerate(out):
        if o.shape != (n, n):
            raise ConfigurationError(f"operator {k + 1} has shape {o.shape}, expected {(n, n)}")
    return out


def gp_embed(field: Field, Xs: Sequence, cs: Sequence | None = None) -> BimatrixModule:
    Xs = _ops(field, Xs)
    m, n = len(Xs), Xs[0].shape[0]
    cs = _scalars(field, cs, m, "the diagonal of A")
    A = field.zeros((m * n, m * n))
    B = field.zeros((m * n, m * n))
    eye = field.eye(n)
    for i in range(m):
        blk = slice(i * n, (i + 1) * n)
        A[blk, blk] = field.reduce_array(eye * cs[i])
        B[blk, blk] = Xs[i]
        if i:
            B[blk, (i - 1) * n:i * n] = eye
    return BimatrixModule(field, A, B, FREE, tuple(Xs), cs, n, (1,) * m)


def drozd_embed(field: Field, X, Y, cs: Sequence | None = None) -> BimatrixModule:
    X, Y = _ops(field, [X, Y])
    n = X.shape[0]
    cs = _scalars(field, cs, 5, "the matrix C")
    N5, N15 = 5 * n, 15 * n
    I = field.eye(n)
    C = field.zeros((N5, N5))
    for i, c in enumerate(cs):
        C[i * n:(i + 1) * n, i * n:(i + 1) * n] = field.reduce_array(I * c)
    D = field.zeros((2 * n, N5))
    for col in (0, 2, 3, 4):
        D[:n, col * n:(col + 1) * n] = I
    D[n:, n:2 * n] = I
    D[n:, 2 * n:3 * n] = I
    D[n:, 3 * n:4 * n] = X
    D[n:, 4 * n:5 * n] = Y
    B1 = field.zeros((N15, N15))
    B1[:N5, 2 * N5:] = field.eye(N5)
    B2 = field.zeros((N15, N15))
    B2[N5:2 * N5, :N5] = field.eye(N5)
    B2[2 * N5:, N5:2 * N5] = C
    B3 = field.zeros((2 * n, N15))
    B3[:, N5:2 * N5] = D
    size = 32 * n
    o1, o2 = N15, N15 + 2 * n  # offsets of the centre and last corner
    A = field.zeros((size, size))
    A[:N15, o2:] = field.eye(N15)
    B = field.zeros((size, size))
    B[:N15, :N15] = B1
    B[:N15, o2:] = B2
    B[o1:o2, o2:] = B3
    B[o2:, o2:] = B1
    return BimatrixModule(field, A, B, DROZD, (X, Y), cs, n, DROZD_PARTITION)


def module_hom_basis(M: BimatrixModule, M2: BimatrixModule) -> HomBasis:
    """``{S : S A = A' S, S B = B' S}``."""
    if M.field != M2.field:
        raise ConfigurationError("modules over different fields")
    return intertwiner_basis(M.field, [(M.A, M2.A), (M.B, M2.B)], M.dim, M2.dim)


@dataclass
class ClassicalReport:
    ok: bool
    dim_hom: int
    dim_operator_hom: int
    failures: list = dc_field(default_factory=list)
    sigmas: list = dc_field(default_factory=list)
    section_ok: bool = True
    surjective: bool = True
    invertibility_matches: bool = True

    def as_dict(self) -> dict:
        return {"ok": self.ok, "dim_hom": self.dim_hom, "dim_operator_hom": self.dim_operator_hom,
                "failures": self.failures, "section_ok": self.section_ok, "surjective": self.surjective,
                "invertibility_matches": self.invertibility_matches}


def _any_nonzero(X: np.ndarray) -> np.ndarray:
    """Per leading-index flag: does the slice contain a nonzero entry?"""
    return np.any(X != 0, axis=tuple(range(1, X.ndim)))


def _grid(S: np.ndarray, n: int) -> np.ndarray:
    """``(batch, r*n, c*n)`` -> ``(batch, r, c, n, n)``."""
    b, R, C = S.shape
    return S.reshape(b, R // n, n, C // n, n).transpose(0, 1, 3, 2, 4)


def _check_compatible(M: BimatrixModule, M2: BimatrixModule, profile: str) -> None:
    if M.profile != profile or M2.profile != profile:
        raise ConfigurationError(f"expected two {profile} modules")
    if M.unit != M2.unit or len(M.operators) != len(M2.operators):
        raise ConfigurationError("modules built from operator data of different shapes")
    if M.scalars != M2.scalars:
        raise ConfigurationError("modules built with different scalars")


def _certify(M: BimatrixModule, M2: BimatrixModule, basis: HomBasis | None, shape_check,
             equal_dims: bool, samples: int = 3) -> ClassicalReport:
    f = M.field
    n = M.unit
    basis = basis if basis is not None else module_hom_basis(M, M2)
    op_basis = intertwiner_basis(f, list(zip(M.operators, M2.operators)), n, n)
    d = basis.dim
    S = basis.matrix().reshape(d, M2.dim, M.dim) if d else f.zeros((0, M2.dim, M.dim))
    G = _grid(S, n)
    K = G.shape[1]
    failures = []
    diag = np.arange(K)
    sig = G[:, 0, 0]
    for name, mask in shape_check(G):
        for k in np.flatnonzero(mask):
            failures.append({"element": int(k), "check": name})
    const = _any_nonzero(G[:, diag, diag] != sig[:, None])
    for k in np.flatnonzero(const):
        failures.append({"element": int(k), "check": "constant diagonal block"})
    for i, (X, X2) in enumerate(zip(M.operators, M2.operators), start=1):
        r = f.reduce_array(f.matmul(sig, X) - f.matmul(X2, sig))
        for k in np.flatnonzero(_any_nonzero(r)):
            failures.append({"element": int(k), "check": f"sigma intertwines operator {i}"})
    # the block-diagonal section sigma -> I (x) sigma lands in the hom space
    section_ok = True
    K_total = M.dim // n
    for s in op_basis:
        lifted = f.kron(f.eye(K_total), s)
        if not (f.equal(f.matmul(lifted, M.A), f.matmul(M2.A, lifted))
                and f.equal(f.matmul(lifted, M.B), f.matmul(M2.B, lifted))):
            section_ok = False
    rank_sig = linalg.rank(f, sig.reshape(d, -1)) if d else 0
    surjective = rank_sig == op_basis.dim
    # S invertible iff sigma invertible, on a few random homs
    invertibility = True
    if d and M.dim == M2.dim:
        rng = np.random.default_rng(len(failures) + d)
        for _ in range(samples):
            c = basis.random_coeffs(rng)
            Smat = basis.combination(c)
            sigma = _grid(Smat[None], n)[0, 0, 0]
            invertibility &= linalg.is_invertible(f, Smat) == linalg.is_invertible(f, sigma)
    ok = (not failures and section_ok and surjective and invertibility
          and (d == op_basis.dim or not equal_dims))
    return ClassicalReport(ok, d, op_basis.dim, failures, list(sig), section_ok, surjective, invertibility)


def gp_certify(M: BimatrixModule, M2: BimatrixModule, basis: HomBasis | None = None) -> ClassicalReport:
    """Every hom is ``diag(sigma, ..., sigma)`` with ``sigma X_i = X'_i sigma``."""
    _check_compatible(M, M2, FREE)

    def shape(G):
        K = G.shape[1]
        off = ~np.eye(K, dtype=bool)
        ri, ci = np.nonzero(off)
        yield "block diagonal", _any_nonzero(G[:, ri, ci])

    return _certify(M, M2, basis, shape, equal_dims=True)


def drozd_certify(M: BimatrixModule, M2: BimatrixModule, basis: HomBasis | None = None) -> ClassicalReport:
    """Every hom is ``n``-block upper triangular with constant diagonal ``sigma``,
    where ``sigma X = X' sigma`` and ``sigma Y = Y' sigma``."""
    _check_compatible(M, M2, DROZD)

    def shape(G):
        K = G.shape[1]
        ri, ci = np.tril_indices(K, -1)
        yield "block upper triangular", _any_nonzero(G[:, ri, ci])

    return _certify(M, M2, basis, shape, equal_dims=False)


def module_isomorphism_verdict(M: BimatrixModule, M2: BimatrixModule, report: ClassicalReport,
                               policy: Policy | None = None) -> Verdict:
    """Isomorphism of embedded modules, read off the certified diagonal blocks.

    After certification ``det S = det(sigma)^(dim / n)``, so the question
    reduces to whether the span of the ``sigma``'s contains an invertible
    matrix; a "yes" is witnessed by the section ``I (x) sigma``.
    """
    policy = policy or Policy()
    if not report.ok:
        raise ConfigurationError("isomorphism is only read off certified hom spaces")
    f = M.field
    n = M.unit
    sigmas = [s for s in report.sigmas if not f.is_zero_array(s)]
    if not sigmas:
        return Verdict("no", "every hom has zero diagonal")
    rng = policy.rng(3)
    for _ in range(policy.samples):
        X = f.zeros((n, n))
        for s in sigmas:
            X = f.reduce_array(X + f.random(rng) * s)
        if linalg.is_invertible(f, X):
            return Verdict("yes", "invertible diagonal block found", f.kron(f.eye(M.dim // n), X))
    if n <= policy.generic_det_max:
        small = [r.reshape(n, n) for r in linalg.row_basis(f, [s.reshape(-1) for s in sigmas], n * n)]
        if generic_determinant(f, small).is_zero():
            return Verdict("no", "generic determinant of the diagonal blocks vanishes identically")
    return Verdict("unknown", "no invertible diagonal block sampled")
