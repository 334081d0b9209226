"""``wildmf`` command line: JSON in (file or stdin), JSON report out.

Exit status: 0 ok, 2 verification failure, 3 precondition, 4 input parse.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
import time
from pathlib import Path

from . import wire
from .classical import drozd_certify, drozd_embed, gp_certify, gp_embed, module_isomorphism_verdict
from .decomp import decompose
from .errors import ParseError, WildMFError
from .fields import parse_field
from .homs import (Policy, certify_hom_basis, is_indecomposable, is_isomorphic_tuples,
                   mf_hom_basis_mod, mf_isomorphism_verdict, tuple_hom_basis)
from .inflation import EmbeddingFunctor
from .matfac import MFHom, a1_chain, knorrer_double, verify_factorization
from .series import SeriesRing
from .suite import Sizes, run_suite

OK, VERIFY_FAILED, PRECONDITION, PARSE = 0, 2, 3, 4
OUT_DIR_ENV = "WILDMF_OUT_DIR"


class Job:
    """Parsed payload plus command-line overrides."""

    def __init__(self, args: argparse.Namespace, payload: dict):
        self.args = args
        self.payload = payload
        self.field = parse_field(args.field or payload.get("field", "Fp:101"))
        self.trunc = args.trunc if args.trunc is not None else int(payload.get("trunc", 3))
        seed = args.seed if args.seed is not None else int(payload.get("seed", 0))
        samples = args.samples if args.samples is not None else int(payload.get("samples", 64))
        self.policy = Policy(samples=samples, seed=seed)

    def get(self, key, default=None, required=False):
        if key not in self.payload:
            if required:
                raise ParseError(f"payload is missing {key!r}")
            return default
        return self.payload[key]

    def n(self, *hints) -> int:
        n = self.args.n if self.args.n is not None else self.payload.get("n")
        if n is not None:
            return int(n)
        for h in hints:
            if h is not None:
                return h
        text = self.payload.get("f")
        if isinstance(text, str):
            idx = [int(k) for k in re.findall(r"x(\d+)", text)]
            return max(idx, default=0)
        raise ParseError("cannot infer n; pass 'n' in the payload or --n")

    def ring(self, n: int) -> SeriesRing:
        variables = self.payload.get("variables")
        if variables is not None:
            return SeriesRing(self.field, tuple(variables))
        return SeriesRing.standard(n, self.field, with_params=False)

    def poly(self, n: int):
        return wire.series_from_json(self.ring(n), self.get("f", required=True))

    def tuple(self, key):
        return wire.tuple_from_json(self.field, self.get(key, required=True))


def _order(x):
    return None if x == math.inf else int(x)


def _decomposition_json(dec) -> dict:
    return {"ring": wire.ring_to_json(dec.ring), "h": wire.series_to_json(dec.h),
            "g": [wire.series_to_json(g) for g in dec.g],
            "orders": {"h": _order(dec.h.order), "g": [_order(g.order) for g in dec.g]}}


def _mf_report(mf, report: dict) -> tuple[dict, int]:
    rep = verify_factorization(mf)
    report.update({"size": mf.size, "verified": rep.ok, "factorization": wire.mf_to_json(mf)})
    if not rep.ok:
        report["witness"] = wire.jsonable(rep.witness)
    return report, OK if rep.ok else VERIFY_FAILED


# commands ------------------------------------------------------------------

def cmd_decompose(job: Job):
    n = job.n()
    f = job.poly(n)
    dec = decompose(f)
    ok = dec.is_valid()
    report = {"n": dec.n, "f": wire.series_to_json(f), "decomposition": _decomposition_json(dec),
              "recomposes": ok, "verdict": "ok" if ok else "failed"}
    return report, OK if ok else VERIFY_FAILED


def cmd_embed(job: Job):
    A = job.tuple("tuple")
    n = job.n(A.arity)
    dec = decompose(job.poly(n))
    mf = EmbeddingFunctor(dec).obj(A)
    report = {"n": dec.n, "m": A.dim, "decomposition": _decomposition_json(dec)}
    return _mf_report(mf, report)


def _factorization_payload(payload: dict, key: str = "factorization") -> dict:
    return payload[key] if key in payload else payload


def cmd_verify_mf(job: Job):
    p = job.payload
    if "hom" in p:
        h = p["hom"]
        src = wire.mf_from_json(h["source"], job.field if job.args.field else None)
        tgt = wire.mf_from_json(h["target"], job.field if job.args.field else None)
        S = wire.smatrix_from_json(src.ring, h["S"])
        T = wire.smatrix_from_json(src.ring, h["T"])
        hom = MFHom(src, tgt, S, T, h.get("trunc"))
        ok = hom.is_valid()
        return {"kind": "hom", "trunc": hom.trunc, "verified": ok}, OK if ok else VERIFY_FAILED
    mf = wire.mf_from_json(_factorization_payload(p), job.field if job.args.field else None)
    rep = verify_factorization(mf)
    report = {"kind": "factorization", "size": mf.size, "verified": rep.ok}
    if not rep.ok:
        report["witness"] = wire.jsonable(rep.witness)
    return report, OK if rep.ok else VERIFY_FAILED


def cmd_knorrer(job: Job):
    mf = wire.mf_from_json(_factorization_payload(job.payload), job.field if job.args.field else None)
    u, v = job.get("u", "u"), job.get("v", "v")
    return _mf_report(knorrer_double(mf, u, v), {"u": u, "v": v, "source_size": mf.size})


def cmd_a1_chain(job: Job):
    n = job.n()
    return _mf_report(a1_chain(n, job.field), {"n": n})


def _module(job: Job, obj: dict, mode: str):
    cs = obj.get("scalars")
    if mode == "gp":
        return gp_embed(job.field, [wire.matrix_from_json(job.field, X) for X in obj["operators"]], cs)
    return drozd_embed(job.field, wire.matrix_from_json(job.field, obj["X"]),
                       wire.matrix_from_json(job.field, obj["Y"]), cs)


def _hom_mf(job: Job):
    A, B = job.tuple("source"), job.tuple("target")
    n = job.n(A.arity)
    F = EmbeddingFunctor(decompose(job.poly(n)))
    FA, FB = F.obj(A), F.obj(B)
    basis = mf_hom_basis_mod(FA, FB, job.trunc)
    return A, B, FA, FB, basis


def cmd_hom(job: Job):
    mode = job.args.mode or job.get("mode", "tuple")
    fld = job.field
    if mode == "tuple":
        basis = tuple_hom_basis(job.tuple("source"), job.tuple("target"))
        return {"mode": mode, "dim": basis.dim,
                "basis": [wire.matrix_to_json(fld, U) for U in basis]}, OK
    if mode == "mf":
        A, B, FA, FB, basis = _hom_mf(job)
        report = {"mode": mode, "trunc": job.trunc, "dim": basis.dim,
                  "sizes": [FA.size, FB.size]}
        if job.trunc < 3:
            report["certified"] = None
            return report, OK
        cert = certify_hom_basis(basis)
        diagonals = [wire.matrix_to_json(fld, U) for U in cert.extracted]
        report.update({"certified": cert.ok, "route_disagreements": len(cert.disagreements),
                       "failures": wire.jsonable(cert.failures),
                       "diagonals_all_zero": all(fld.is_zero_array(U) for U in cert.extracted),
                       "diagonals": diagonals})
        return report, OK if cert.ok and not cert.disagreements else VERIFY_FAILED
    if mode in ("gp", "drozd"):
        M = _module(job, job.get("source", required=True), mode)
        M2 = _module(job, job.get("target", required=True), mode)
        rep = (gp_certify if mode == "gp" else drozd_certify)(M, M2)
        report = {"mode": mode, **rep.as_dict(),
                  "sigmas": [wire.matrix_to_json(fld, s) for s in rep.sigmas]}
        return report, OK if rep.ok else VERIFY_FAILED
    raise ParseError(f"unknown hom mode {mode!r} (tuple, mf, gp, drozd)")


def _verdict_json(v, fld, witness=None) -> dict:
    out = {"answer": v.answer, "reason": v.reason}
    if witness is not None:
        out["witness"] = witness
    elif v.witness is not None:
        out["witness"] = wire.jsonable(v.witness, fld)
    return out


def cmd_iso(job: Job):
    mode = job.args.mode or job.get("mode", "tuple")
    fld = job.field
    if mode == "tuple":
        v = is_isomorphic_tuples(job.tuple("source"), job.tuple("target"), job.policy)
        return {"mode": mode, "verdict": _verdict_json(v, fld)}, OK
    if mode == "mf":
        A, B, FA, FB, basis = _hom_mf(job)
        v = mf_isomorphism_verdict(basis, job.policy)
        witness = None
        if v.answer == "yes":
            h = v.witness
            witness = {"hom": {"source": wire.mf_to_json(FA), "target": wire.mf_to_json(FB),
                               "S": wire.smatrix_to_json(h.S), "T": wire.smatrix_to_json(h.T),
                               "trunc": h.trunc}}
        return {"mode": mode, "trunc": job.trunc, "dim": basis.dim,
                "verdict": _verdict_json(v, fld, witness)}, OK
    if mode in ("gp", "drozd"):
        M = _module(job, job.get("source", required=True), mode)
        M2 = _module(job, job.get("target", required=True), mode)
        rep = (gp_certify if mode == "gp" else drozd_certify)(M, M2)
        if not rep.ok:
            return {"mode": mode, "certified": False, "failures": rep.failures}, VERIFY_FAILED
        v = module_isomorphism_verdict(M, M2, rep, job.policy)
        return {"mode": mode, "certified": True, "verdict": _verdict_json(v, fld)}, OK
    raise ParseError(f"unknown iso mode {mode!r} (tuple, mf, gp, drozd)")


def cmd_indec(job: Job):
    v = is_indecomposable(job.tuple("tuple"), job.policy)
    return {"verdict": _verdict_json(v, job.field)}, OK


def cmd_gp(job: Job):
    M = _module(job, job.payload, "gp")
    return {"dim": M.dim, "A": wire.matrix_to_json(job.field, M.A),
            "B": wire.matrix_to_json(job.field, M.B), "scalars": [job.field.fmt(c) for c in M.scalars]}, OK


def cmd_drozd(job: Job):
    M = _module(job, job.payload, "drozd")
    rel = M.relations()
    ok = all(rel.values())
    return {"dim": M.dim, "relations": rel, "A": wire.matrix_to_json(job.field, M.A),
            "B": wire.matrix_to_json(job.field, M.B),
            "scalars": [job.field.fmt(c) for c in M.scalars]}, OK if ok else VERIFY_FAILED


def cmd_suite(job: Job):
    sizes = Sizes(**job.get("sizes", {}))
    report = run_suite(job.policy.seed, sizes)
    report.pop("command")
    return report, OK if report["ok"] else VERIFY_FAILED


COMMANDS = {
    "decompose": cmd_decompose, "embed": cmd_embed, "verify-mf": cmd_verify_mf,
    "knorrer": cmd_knorrer, "a1-chain": cmd_a1_chain, "hom": cmd_hom, "iso": cmd_iso,
    "indec": cmd_indec, "gp": cmd_gp, "drozd": cmd_drozd, "suite": cmd_suite,
}

# commands that need no input payload
_NO_INPUT = {"a1-chain", "suite"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wildmf", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("input", nargs="?", help="JSON payload file ('-' or omitted: stdin)")
    p.add_argument("--field", help="'Fp:<p>' (odd prime) or 'Q'; default Fp:101")
    p.add_argument("--trunc", type=int, help="solve hom equations modulo m^N (default 3)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="random samples for the searches")
    p.add_argument("--mode", choices=("tuple", "mf", "gp", "drozd"), help="for hom and iso")
    p.add_argument("--n", type=int, help="number of x-variables (overrides the payload)")
    p.add_argument("--out", help=f"write the report here (relative paths go under ${OUT_DIR_ENV})")
    return p


def _read_payload(args) -> dict:
    if args.input is None and args.command in _NO_INPUT:
        return {}
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.input).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {args.input}: {exc}") from exc
    if not text.strip():
        if args.command in _NO_INPUT:
            return {}
        raise ParseError("empty input")
    payload = wire.loads(text)
    if not isinstance(payload, dict):
        raise ParseError("the payload must be a JSON object")
    return payload


def _out_path(out: str) -> Path:
    path = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        job = Job(args, _read_payload(args))
        report, code = COMMANDS[args.command](job)
        report = {"command": args.command, "field": job.field.descriptor, **report}
    except WildMFError as exc:
        code = exc.exit_code if exc.exit_code in (VERIFY_FAILED, PRECONDITION, PARSE) else PRECONDITION
        report = {"command": args.command, "error": exc.code, "message": str(exc)}
        if exc.witness is not None:
            report["witness"] = wire.jsonable(exc.witness)
        print(f"wildmf {args.command}: {exc.code}: {exc}", file=sys.stderr)
    except (KeyError, TypeError, ValueError) as exc:
        code = PARSE
        report = {"command": args.command, "error": "PARSE_ERROR", "message": f"malformed payload: {exc}"}
        print(f"wildmf {args.command}: malformed payload: {exc}", file=sys.stderr)
    report["exit_code"] = code
    report.setdefault("timing", {})["total_seconds"] = round(time.perf_counter() - t0, 3)
    text = wire.dumps(report)
    if args.out:
        _out_path(args.out).write_text(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
