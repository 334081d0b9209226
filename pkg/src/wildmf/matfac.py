"""Matrix factorizations, Knörrer doubling and the parameterized tower."""

from __future__ import annotations

from dataclasses import dataclass

from .decomp import A1Decomposition, linear_form
from .errors import ConfigurationError, PreconditionError, VariableClashError
from .fields import DEFAULT_PRIME, Field, PrimeField
from .series import Series, SeriesRing
from .smatrix import SeriesMatrix


@dataclass(frozen=True)
class MatrixFactorization:
    """``phi @ psi == psi @ phi == f * I``; check with :func:`verify_factorization`."""

    phi: SeriesMatrix
    psi: SeriesMatrix
    f: Series

    def __post_init__(self):
        s = self.phi.rows
        if self.phi.shape != (s, s) or self.psi.shape != (s, s):
            raise ConfigurationError(f"factors must be square of equal size, got {self.phi.shape}, {self.psi.shape}")
        if not (self.phi.ring == self.psi.ring == self.f.ring):
            raise ConfigurationError("phi, psi and f must share one ring")

    @property
    def size(self) -> int:
        return self.phi.rows

    @property
    def ring(self) -> SeriesRing:
        return self.phi.ring

    def inflate(self, matrices) -> "MatrixFactorization":
        target = self.ring.without_params()
        return MatrixFactorization(self.phi.inflate(matrices), self.psi.inflate(matrices),
                                   self.f.to_ring(target))


@dataclass(frozen=True)
class FactorizationReport:
    ok: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_factorization(mf: MatrixFactorization) -> FactorizationReport:
    """Exact check of both products; on failure report the first bad entry."""
    target = SeriesMatrix.scalar(mf.f, mf.size)
    for name, a, b in (("phi*psi", mf.phi, mf.psi), ("psi*phi", mf.psi, mf.phi)):
        residual = a @ b - target
        pos = residual.first_nonzero_entry()
        if pos is not None:
            return FactorizationReport(False, {"product": name, "position": pos,
                                               "residual": residual.entry(*pos)})
    return FactorizationReport(True)


@dataclass(frozen=True)
class MFHom:
    """``(S, T)`` with ``S phi = phi' T`` and ``T psi = psi' S``, modulo degree ``trunc``."""

    source: MatrixFactorization
    target: MatrixFactorization
    S: SeriesMatrix
    T: SeriesMatrix
    trunc: int | None = None

    def residuals(self) -> tuple[SeriesMatrix, SeriesMatrix]:
        N = self.trunc
        S, T = self.S.truncate(N), self.T.truncate(N)
        r1 = S @ self.source.phi.truncate(N) - self.target.phi.truncate(N) @ T
        r2 = T @ self.source.psi.truncate(N) - self.target.psi.truncate(N) @ S
        return r1, r2

    def is_valid(self) -> bool:
        return all(r.is_zero() for r in self.residuals())

    def constant_strands(self):
        w = (0,) * self.S.ring.nvars
        return self.S.scalar_strand(w), self.T.scalar_strand(w)


def _double_with(mf: MatrixFactorization, u: Series, v: Series) -> MatrixFactorization:
    """``([[phi, -v],[u, psi]], [[psi, v],[-u, phi]])``, a factorization of ``f + uv``."""
    s = mf.size
    U = SeriesMatrix.scalar(u, s)
    V = SeriesMatrix.scalar(v, s)
    phi = SeriesMatrix.block(mf.ring, [[mf.phi, -V], [U, mf.psi]])
    psi = SeriesMatrix.block(mf.ring, [[mf.psi, V], [-U, mf.phi]])
    return MatrixFactorization(phi, psi, mf.f + u * v)


def knorrer_double(mf: MatrixFactorization, u: str, v: str) -> MatrixFactorization:
    """Double ``mf`` along two fresh variables, returning a factorization of ``f + uv``."""
    if u == v:
        raise VariableClashError(f"the two doubling variables must differ (both {u!r})")
    ring = mf.ring
    if u in ring.params or v in ring.params:
        raise VariableClashError(f"{u!r}/{v!r} collide with a parameter name")
    used = mf.f.variables_used() | mf.phi.variables_used() | mf.psi.variables_used()
    for name in (u, v):
        if name in used:
            raise VariableClashError(f"variable {name!r} already occurs in the factorization",
                                     witness={"variable": name})
    big = ring.extend([u, v])
    lifted = MatrixFactorization(mf.phi.to_ring(big), mf.psi.to_ring(big), mf.f.to_ring(big))
    return _double_with(lifted, big.gen(u), big.gen(v))


def knorrer_double_hom(S: SeriesMatrix, T: SeriesMatrix) -> tuple[SeriesMatrix, SeriesMatrix]:
    """Image of a hom ``(S, T)`` under doubling: ``(S + T, T + S)`` block-diagonally."""
    ring = S.ring
    zs = SeriesMatrix.zeros(ring, S.rows, T.cols)
    zt = SeriesMatrix.zeros(ring, T.rows, S.cols)
    return (SeriesMatrix.block(ring, [[S, zs], [zt, T]]),
            SeriesMatrix.block(ring, [[T, zt], [zs, S]]))


def a1_chain(n: int, field: Field | None = None) -> MatrixFactorization:
    """The ``2^(n-1)``-square factorization of ``x1*y1 + ... + xn*yn``."""
    if not isinstance(n, int) or n < 1:
        raise PreconditionError(f"a1_chain needs n >= 1, got {n!r}")
    field = field or PrimeField(DEFAULT_PRIME)
    xs = [f"x{i}" for i in range(1, n + 1)]
    ys = [f"y{i}" for i in range(1, n + 1)]
    ring = SeriesRing(field, tuple(xs + ys))
    x1, y1 = ring.gen("x1"), ring.gen("y1")
    mf = MatrixFactorization(SeriesMatrix.scalar(x1, 1), SeriesMatrix.scalar(y1, 1), x1 * y1)
    for i in range(1, n):
        mf = knorrer_double(mf, xs[i], ys[i])
    return mf


def param_factorization(dec: A1Decomposition, level: int | None = None) -> MatrixFactorization:
    """Tower ``(phi_0, psi_0) = ([z^2], [h])`` doubled along ``(x_i - a_i z, g_i)``.

    Level ``i`` factors ``z^2 h + sum_{j <= i} (x_j - a_j z) g_j``, so the
    full tower (size ``2^n``) factors ``f`` with ``a1..an`` formal.
    """
    dec.check()
    ring = dec.ring
    level = dec.n if level is None else level
    if not 0 <= level <= dec.n:
        raise PreconditionError(f"level {level} outside 0..{dec.n}")
    z = ring.gen(ring.variables[-1])
    mf = MatrixFactorization(SeriesMatrix.scalar(z * z, 1), SeriesMatrix.scalar(dec.h, 1), z * z * dec.h)
    for i in range(level):
        mf = _double_with(mf, linear_form(ring, i), dec.g[i])
    return mf
