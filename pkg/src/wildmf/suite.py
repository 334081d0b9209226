"""The acceptance battery as a library call.

``run_suite(seed)`` returns a JSON-ready report.  Everything except the
``timing`` entry is a deterministic function of the seed; digests of the
built factorizations make the comparison between two runs meaningful.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from . import fixtures as fx
from . import linalg
from .classical import drozd_certify, drozd_embed, gp_certify, gp_embed
from .decomp import decompose
from .fields import QQ, PrimeField
from .homs import (Policy, certify_constant_diagonal, certify_dagger_basis, certify_hom_basis,
                   dagger_basis, is_isomorphic_tuples, mf_hom_basis_mod, mf_isomorphism_verdict,
                   tuple_hom_basis)
from .inflation import CommutingTuple, EmbeddingFunctor, TupleHom, check_functoriality
from .matfac import a1_chain, knorrer_double, verify_factorization
from .series import SeriesRing
from .smatrix import SeriesMatrix

F101 = PrimeField(101)


@dataclass
class Sizes:
    """Case counts per criterion; the defaults are the acceptance thresholds."""

    factorizations: int = 200
    knorrer_doublings: int = 40
    structure_pairs: int = 50
    conjugate_pairs: int = 20
    nonisomorphic_pairs: int = 20
    functoriality_pairs: int = 100
    gp_fixtures: int = 30
    drozd_fixtures: int = 10


@dataclass
class CriterionResult:
    name: str
    cases: int = 0
    failures: list = dc_field(default_factory=list)
    details: dict = dc_field(default_factory=dict)
    digest: "hashlib._Hash" = dc_field(default_factory=hashlib.sha256)

    @property
    def ok(self) -> bool:
        return self.cases > 0 and not self.failures

    def record(self, ok: bool, label: str, *parts) -> None:
        self.cases += 1
        self.digest.update(repr((label, ok) + parts).encode())
        if not ok:
            self.failures.append(label)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "cases": self.cases, "failures": self.failures[:20],
                "failure_count": len(self.failures), "details": self.details,
                "digest": self.digest.hexdigest()}


def matrix_digest(M: SeriesMatrix) -> str:
    h = hashlib.sha256(repr(M.shape).encode())
    for key in sorted(M.strands):
        h.update(repr(key).encode())
        h.update(",".join(str(x) for x in M.strands[key].ravel()).encode())
    return h.hexdigest()[:16]


# corpus ------------------------------------------------------------------

@dataclass
class Case:
    label: str
    field: object
    f: object
    tuple: CommutingTuple


def factorization_corpus(seed: int, count: int) -> list[Case]:
    """Order >= 4 polynomials in ``n = 1, 2, 3`` and commuting tuples of size ``<= 4``.

    Fields alternate between F_101 and Q; tuple kinds cycle so that Jordan
    and nilpotent (non-diagonalizable) tuples appear throughout.
    """
    rng = np.random.default_rng([seed, 1])
    kinds = ("jordan", "nilpotent", "square_zero", "jordan", "nilpotent", "diagonal", "scalar")
    out = []
    for k in range(count):
        field = F101 if k % 2 == 0 else QQ
        n = 1 + k % 3
        m = 1 + int(rng.integers(4))
        ring = SeriesRing.standard(n, field, with_params=False)
        f = fx.random_order4_poly(ring, rng)
        A = fx.random_tuple(field, n, m, rng, kinds[k % len(kinds)])
        out.append(Case(f"case{k}:{field}:n={n}:m={m}:{kinds[k % len(kinds)]}", field, f, A))
    return out


# criteria ------------------------------------------------------------------

def criterion_factorization(corpus: list[Case]) -> CriterionResult:
    res = CriterionResult("factorization identity")
    for case in corpus:
        dec = decompose(case.f)
        mf = EmbeddingFunctor(dec).obj(case.tuple)
        rep = verify_factorization(mf)
        ok = bool(rep) and mf.size == case.tuple.dim * 2 ** dec.n
        res.record(ok, case.label, mf.size, matrix_digest(mf.phi), matrix_digest(mf.psi))
    res.details = {"fields": sorted({str(c.field) for c in corpus}),
                   "max_size": max((c.tuple.dim * 2 ** c.tuple.arity for c in corpus), default=0)}
    return res


def criterion_decomposition(corpus: list[Case]) -> CriterionResult:
    res = CriterionResult("decomposition")
    for case in corpus:
        dec = decompose(case.f)
        same = dec.recompose().same_terms(case.f.to_ring(dec.ring))
        h_ord, g_ord = dec.h.order, [g.order for g in dec.g]
        ok = same and h_ord >= 2 and all(o >= 3 for o in g_ord) and dec.n == case.tuple.arity
        res.record(ok, case.label, str(h_ord), tuple(str(o) for o in g_ord), len(dec.h), tuple(len(g) for g in dec.g))
    return res


def criterion_knorrer(corpus: list[Case], doublings: int) -> CriterionResult:
    res = CriterionResult("knorrer chain")
    sizes = {}
    for n in range(1, 6):
        for field in (F101, QQ):
            mf = a1_chain(n, field)
            ok = bool(verify_factorization(mf)) and mf.size == 2 ** (n - 1)
            res.record(ok, f"a1_chain({n}) over {field}", mf.size, matrix_digest(mf.phi))
            sizes[str(n)] = mf.size
    small = [c for c in corpus if c.tuple.dim * 2 ** c.tuple.arity <= 16][:doublings]
    for case in small:
        mf = EmbeddingFunctor(decompose(case.f)).obj(case.tuple)
        doubled = knorrer_double(mf, "u", "v")
        ring = doubled.ring
        expected = mf.f.to_ring(ring) + ring.gen("u") * ring.gen("v")
        ok = bool(verify_factorization(doubled)) and doubled.f == expected and doubled.size == 2 * mf.size
        res.record(ok, f"double {case.label}", doubled.size)
    res.details = {"a1_chain_sizes": sizes, "doublings": len(small)}
    return res


def structure_pairs(seed: int, count: int) -> list[tuple]:
    """``(label, f, A, B)`` with ``n = 2`` and tuples of size ``<= 3``."""
    rng = np.random.default_rng([seed, 4])
    ring = SeriesRing.standard(2, F101, with_params=False)
    out = []
    for k in range(count):
        f = fx.random_order4_poly(ring, rng, max_terms=5)
        m = 1 + k % 3
        A = fx.random_tuple(F101, 2, m, rng)
        mode = k % 3
        if mode == 0:
            B = A.conjugate(fx.random_invertible(F101, m, rng))
        elif mode == 1:
            B = fx.random_tuple(F101, 2, m, rng)
        else:
            B = fx.random_tuple(F101, 2, 1 + int(rng.integers(3)), rng)
        out.append((f"pair{k}:m={A.dim}->{B.dim}", f, A, B))
    return out


def criterion_structure(seed: int, count: int, spot_checks: int = 2) -> CriterionResult:
    """Certify every basis element of the solved hom spaces, plus the reduced systems."""
    res = CriterionResult("structure certification")
    rng = np.random.default_rng([seed, 5])
    dims, dagger_dims = [], []
    for label, f, A, B in structure_pairs(seed, count):
        dec = decompose(f)
        F = EmbeddingFunctor(dec)
        basis = mf_hom_basis_mod(F.obj(A), F.obj(B), 3)
        cert = certify_hom_basis(basis)
        ok = cert.ok and not cert.disagreements
        # the single-hom entry point on a few random elements (same checks)
        for _ in range(spot_checks if basis.dim else 0):
            k = int(rng.integers(basis.dim))
            U = certify_constant_diagonal(basis[k])
            ok &= A.field.equal(U.U, cert.extracted[k])
        dims.append(basis.dim)
        res.record(ok, label, basis.dim)
        for level in range(dec.n + 1):
            db = dagger_basis(dec, A, B, level)
            rep = certify_dagger_basis(db)
            dagger_dims.append(db.dim)
            res.record(rep.all_ok, f"{label}:reduced level {level}", db.dim)
    res.details = {"hom_dims": dims, "reduced_dims": dagger_dims}
    return res


def _witness_ok(hom) -> bool:
    S0, T0 = hom.constant_strands()
    field = hom.S.field
    return hom.is_valid() and linalg.is_invertible(field, S0) and linalg.is_invertible(field, T0)


def criterion_faithfulness(seed: int, conj: int, noniso: int, policy: Policy) -> CriterionResult:
    res = CriterionResult("embedding faithfulness")
    rng = np.random.default_rng([seed, 6])
    ring = SeriesRing.standard(2, F101, with_params=False)
    verdicts = {"conjugate": [], "nonisomorphic": []}
    for k in range(conj):
        f = fx.random_order4_poly(ring, rng, max_terms=5)
        F = EmbeddingFunctor(decompose(f))
        A = fx.random_tuple(F101, 2, 1 + k % 3, rng)
        B = A.conjugate(fx.random_invertible(F101, A.dim, rng))
        v = mf_isomorphism_verdict(mf_hom_basis_mod(F.obj(A), F.obj(B), 3), policy)
        ok = v.answer == "yes" and _witness_ok(v.witness)
        verdicts["conjugate"].append(v.answer)
        res.record(ok, f"conjugate{k}:m={A.dim}", v.answer, v.reason)
    shapes = [p for m in (2, 3) for p in fx.partitions(m)]
    pairs = [(p, q) for p in shapes for q in shapes if p != q and sum(p) == sum(q)]
    for k in range(noniso):
        f = fx.random_order4_poly(ring, rng, max_terms=5)
        F = EmbeddingFunctor(decompose(f))
        p, q = pairs[k % len(pairs)]
        A = fx.jordan_type_tuple(F101, 2, p, rng)
        B = fx.jordan_type_tuple(F101, 2, q, rng)
        v = mf_isomorphism_verdict(mf_hom_basis_mod(F.obj(A), F.obj(B), 3), policy)
        tv = is_isomorphic_tuples(A, B, policy)
        ok = v.answer == "no" and tv.answer == "no"
        verdicts["nonisomorphic"].append(v.answer)
        res.record(ok, f"jordan{k}:{p}vs{q}", v.answer, v.reason)
    res.details = {k: {a: v.count(a) for a in sorted(set(v))} for k, v in verdicts.items()}
    return res


def _composable_chain(rng, n: int, m: int):
    A = fx.random_tuple(F101, n, m, rng)

    def successor(X):
        mode = int(rng.integers(3))
        if mode == 0:
            return X.conjugate(fx.random_invertible(F101, X.dim, rng))
        if mode == 1 and X.dim < 4:
            return X.direct_sum(fx.random_tuple(F101, n, 1, rng))
        return X

    B = successor(A)
    C = successor(B)
    return A, B, C


def _random_hom(A, B, rng) -> TupleHom:
    basis = tuple_hom_basis(A, B)
    if not basis.dim:
        return TupleHom.zero(A, B)
    return TupleHom(A, B, basis.random_element(rng))


def criterion_functoriality(seed: int, count: int) -> CriterionResult:
    res = CriterionResult("functoriality")
    rng = np.random.default_rng([seed, 7])
    functors = {}
    for n in (1, 2, 3):
        ring = SeriesRing.standard(n, F101, with_params=False)
        functors[n] = EmbeddingFunctor(decompose(fx.random_order4_poly(ring, rng, max_terms=4)))
    nonzero = 0
    for k in range(count):
        n = 1 + k % 3
        A, B, C = _composable_chain(rng, n, 1 + int(rng.integers(3)))
        U, V = _random_hom(A, B, rng), _random_hom(B, C, rng)
        rep = check_functoriality(functors[n], U, V)
        nonzero += any(r for r, _ in rep.ranks)
        res.record(rep.ok, f"chain{k}:n={n}:{A.dim}->{B.dim}->{C.dim}", rep.ranks)
    res.details = {"pairs_with_nonzero_hom": nonzero}
    return res


def criterion_classical(seed: int, gp_count: int, drozd_count: int) -> CriterionResult:
    res = CriterionResult("classical fixtures")
    rng = np.random.default_rng([seed, 8])
    sizes = []
    for n in (1, 2, 3):
        X, Y = fx.random_operators(F101, 2, n, rng)
        M = drozd_embed(F101, X, Y)
        rel = M.relations()
        sizes.append(M.dim)
        res.record(all(rel.values()) and M.dim == 32 * n, f"drozd relations n={n}", tuple(sorted(rel.items())))
    gp_dims = []
    for k in range(gp_count):
        count = 1 + k % 3
        size = 1 + int(rng.integers(3))
        Xs = fx.random_operators(F101, count, size, rng)
        if k % 2 == 0:
            P = fx.random_invertible(F101, size, rng)
            Pinv = linalg.inverse(F101, P)
            Xs2 = [F101.matmul(F101.matmul(P, X), Pinv) for X in Xs]
        else:
            Xs2 = fx.random_operators(F101, count, size, rng)
        rep = gp_certify(gp_embed(F101, Xs), gp_embed(F101, Xs2))
        ok = rep.ok and rep.dim_hom == rep.dim_operator_hom
        gp_dims.append((rep.dim_hom, rep.dim_operator_hom))
        res.record(ok, f"gp{k}:ops={count}:size={size}", rep.dim_hom, rep.dim_operator_hom)
    drozd_dims = []
    for k in range(drozd_count):
        n = 1 + k % 2
        X, Y = fx.random_operators(F101, 2, n, rng)
        if k % 3 == 0:
            X2, Y2 = X, Y
        elif k % 3 == 1:
            P = fx.random_invertible(F101, n, rng)
            Pinv = linalg.inverse(F101, P)
            X2, Y2 = (F101.matmul(F101.matmul(P, Z), Pinv) for Z in (X, Y))
        else:
            X2, Y2 = fx.random_operators(F101, 2, n, rng)
        rep = drozd_certify(drozd_embed(F101, X, Y), drozd_embed(F101, X2, Y2))
        drozd_dims.append((rep.dim_hom, rep.dim_operator_hom))
        res.record(rep.ok, f"drozd{k}:n={n}", rep.dim_hom, rep.dim_operator_hom)
    res.details = {"drozd_sizes": sizes, "gp_dims": gp_dims, "drozd_dims": drozd_dims}
    return res


# driver ------------------------------------------------------------------

CRITERIA = ("1-factorization", "2-decomposition", "3-knorrer", "4-structure",
            "5-faithfulness", "6-functoriality", "7-classical")


def run_suite(seed: int = 0, sizes: Sizes | None = None, policy: Policy | None = None,
              only: tuple[str, ...] | None = None) -> dict:
    """Run the battery; ``report["timing"]`` is the only non-deterministic entry."""
    sizes = sizes or Sizes()
    policy = policy or Policy(seed=seed)
    corpus: list[Case] | None = None

    def get_corpus():
        nonlocal corpus
        if corpus is None:
            corpus = factorization_corpus(seed, sizes.factorizations)
        return corpus

    jobs: dict[str, Callable[[], CriterionResult]] = {
        "1-factorization": lambda: criterion_factorization(get_corpus()),
        "2-decomposition": lambda: criterion_decomposition(get_corpus()),
        "3-knorrer": lambda: criterion_knorrer(get_corpus(), sizes.knorrer_doublings),
        "4-structure": lambda: criterion_structure(seed, sizes.structure_pairs),
        "5-faithfulness": lambda: criterion_faithfulness(seed, sizes.conjugate_pairs,
                                                         sizes.nonisomorphic_pairs, policy),
        "6-functoriality": lambda: criterion_functoriality(seed, sizes.functoriality_pairs),
        "7-classical": lambda: criterion_classical(seed, sizes.gp_fixtures, sizes.drozd_fixtures),
    }
    results, timing = {}, {}
    for name in CRITERIA:
        if only is not None and name not in only:
            continue
        t0 = time.perf_counter()
        results[name] = jobs[name]().as_dict()
        timing[name] = round(time.perf_counter() - t0, 3)
    return {"command": "suite", "seed": seed, "criteria": results,
            "ok": all(r["ok"] for r in results.values()), "timing": timing}


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}
