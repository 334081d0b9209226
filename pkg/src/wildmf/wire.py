"""JSON wire format.

A series is a list of terms ``{"exponents": [e_1, ..., e_z], "coeff":
{"params": [p_1, ...], "value": "3/2"}}``; a series matrix is a nested array
of such lists; scalar matrices are nested arrays of strings; fields are
``"Fp:101"`` or ``"Q"``.  On input a series may also be given as a plain
string (``"x1^4 + z^4"``) or a number.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import ConfigurationError, ParseError
from .fields import Field, parse_field
from .inflation import CommutingTuple
from .matfac import MatrixFactorization
from .series import Series, SeriesRing
from .smatrix import SeriesMatrix


def dumps(obj: Any) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


# rings and series ----------------------------------------------------------

def ring_to_json(ring: SeriesRing) -> dict:
    return {"field": ring.field.descriptor, "variables": list(ring.variables),
            "params": list(ring.params)}


def ring_from_json(obj: dict, field: Field | None = None) -> SeriesRing:
    try:
        field = field or parse_field(obj["field"])
        return SeriesRing(field, tuple(obj["variables"]), tuple(obj.get("params", ())))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad ring description: {exc}") from exc


def series_to_json(s: Series) -> list:
    nv = s.ring.nvars
    f = s.field
    return [{"exponents": list(k[:nv]), "coeff": {"params": list(k[nv:]), "value": f.fmt(c)}}
            for k, c in sorted(s.items())]


def series_from_json(ring: SeriesRing, obj) -> Series:
    if isinstance(obj, str):
        return ring.parse(obj)
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        if isinstance(obj, float) and not obj.is_integer():
            raise ParseError(f"non-integer float {obj!r}; use a string such as '3/2'")
        return ring.const(int(obj))
    if not isinstance(obj, list):
        raise ParseError(f"cannot read a series from {type(obj).__name__}")
    f = ring.field
    terms: dict = {}
    for t in obj:
        try:
            geo = tuple(int(e) for e in t["exponents"])
            coeff = t["coeff"]
            par = tuple(int(e) for e in coeff.get("params", [0] * ring.nparams))
            value = f(str(coeff["value"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad series term {t!r}") from exc
        if len(geo) != ring.nvars or len(par) != ring.nparams:
            raise ParseError(f"term {t!r} does not fit variables {ring.variables} / params {ring.params}")
        key = geo + par
        terms[key] = f.reduce(terms.get(key, f.zero) + value)
    return Series(ring, terms)


def smatrix_to_json(M: SeriesMatrix) -> list:
    return [[series_to_json(e) for e in row] for row in M.entries()]


def smatrix_from_json(ring: SeriesRing, obj) -> SeriesMatrix:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError("a matrix must be a non-empty nested array")
    entries = [[series_from_json(ring, e) for e in row] for row in obj]
    try:
        return SeriesMatrix.from_entries(ring, entries)
    except ConfigurationError as exc:
        raise ParseError(str(exc)) from exc


# scalar matrices and tuples ------------------------------------------------

def matrix_to_json(field: Field, a: np.ndarray) -> list:
    return field.fmt_array(a) if a.ndim == 2 else [field.fmt(x) for x in a]


def matrix_from_json(field: Field, obj) -> np.ndarray:
    try:
        arr = field.array([[str(x) if not isinstance(x, str) else x for x in row] for row in obj])
    except (TypeError, ConfigurationError) as exc:
        raise ParseError(f"bad matrix {obj!r}") from exc
    if arr.ndim != 2:
        raise ParseError("expected a 2-dimensional matrix")
    return arr


def tuple_to_json(A: CommutingTuple) -> dict:
    return {"dim": A.dim, "matrices": [matrix_to_json(A.field, a) for a in A.matrices]}


def tuple_from_json(field: Field, obj) -> CommutingTuple:
    """Accepts ``{"matrices": [...], "dim": m}`` or a bare list of matrices."""
    if isinstance(obj, dict):
        mats, dim = obj.get("matrices", []), obj.get("dim")
    elif isinstance(obj, list):
        mats, dim = obj, None
    else:
        raise ParseError("a tuple is a list of matrices or {'matrices': ..., 'dim': ...}")
    return CommutingTuple(field, [matrix_from_json(field, a) for a in mats], dim)


# factorizations ------------------------------------------------------------

def mf_to_json(mf: MatrixFactorization) -> dict:
    return {"ring": ring_to_json(mf.ring), "f": series_to_json(mf.f),
            "phi": smatrix_to_json(mf.phi), "psi": smatrix_to_json(mf.psi)}


def mf_from_json(obj: dict, field: Field | None = None) -> MatrixFactorization:
    try:
        ring = ring_from_json(obj["ring"], field)
        return MatrixFactorization(smatrix_from_json(ring, obj["phi"]),
                                   smatrix_from_json(ring, obj["psi"]),
                                   series_from_json(ring, obj["f"]))
    except KeyError as exc:
        raise ParseError(f"factorization is missing {exc}") from exc
    except ConfigurationError as exc:
        raise ParseError(str(exc)) from exc


def jsonable(x, field: Field | None = None):
    """Best-effort conversion of witnesses (arrays, series, tuples) to JSON."""
    if isinstance(x, Series):
        return series_to_json(x)
    if isinstance(x, SeriesMatrix):
        return smatrix_to_json(x)
    if isinstance(x, np.ndarray):
        if field is not None:
            return matrix_to_json(field, x)
        return x.tolist() if x.dtype != object else [jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): jsonable(v, field) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v, field) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)
