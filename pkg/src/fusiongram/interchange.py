"""Text interchange format for matrices, families and reports.

Documents are UTF-8 JSON objects with a top-level ``"format": 1`` and a
``"type"`` tag. A complex scalar is ``[re, im]``; a matrix is
``{"rows": r, "cols": c, "data": [...]}`` with entries row-major; a family is
``{"ambient": n, "weights": [...], "subspaces": [matrix, ...]}``. Doubles are
written with 17 significant digits, so parsing restores them bit for bit.
The writer is canonical: fixed key order, no whitespace, trailing newline.
"""

import json
import math

import numpy as np

from .errors import ParseError
from .frames import WeightedFamily
from .spaces import Subspace

FORMAT_VERSION = 1


def format_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def dumps(obj):
    """Canonical JSON text (no trailing newline) for plain Python/numpy values."""
    parts = []
    _emit(obj, parts)
    return "".join(parts)


def _emit(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, (complex, np.complexfloating)):
        out.append(f"[{format_float(obj.real)},{format_float(obj.imag)}]")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for k, (key, val) in enumerate(obj.items()):
            if k:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _emit(val, out)
        out.append("}")
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out)
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for k, val in enumerate(obj):
            if k:
                out.append(",")
            _emit(val, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_body(m):
    m = np.asarray(m, dtype=np.complex128)
    return {"rows": m.shape[0], "cols": m.shape[1], "data": [complex(z) for z in m.reshape(-1)]}


def family_body(fam):
    return {
        "ambient": fam.ambient_dim,
        "weights": [float(w) for w in fam.weights],
        "subspaces": [matrix_body(s.basis) for s in fam.subspaces],
    }


def serialize(x):
    """Interchange document for a matrix, a family, a pair of families or a report dict."""
    if isinstance(x, WeightedFamily):
        doc = {"format": FORMAT_VERSION, "type": "family", **family_body(x)}
    elif isinstance(x, tuple) and len(x) == 2 and all(isinstance(f, WeightedFamily) for f in x):
        doc = {"format": FORMAT_VERSION, "type": "pair",
               "first": family_body(x[0]), "second": family_body(x[1])}
    elif isinstance(x, dict):
        doc = {"format": FORMAT_VERSION, "type": "report", "report": x}
    else:
        doc = {"format": FORMAT_VERSION, "type": "matrix", **matrix_body(x)}
    return dumps(doc) + "\n"


def _int(value, what):
    if isinstance(value, float) and value.is_integer() and value >= 0:
        return int(value)
    raise ParseError(f"{what} must be a nonnegative integer")


def _scalar(z):
    if not (isinstance(z, list) and len(z) == 2 and all(isinstance(p, float) for p in z)):
        raise ParseError("complex scalar must be a [re, im] pair of numbers")
    if not all(math.isfinite(p) for p in z):
        raise ParseError("non-finite scalar")
    return complex(z[0], z[1])


def _matrix(body):
    if not isinstance(body, dict):
        raise ParseError("matrix must be an object")
    try:
        rows, cols, data = body["rows"], body["cols"], body["data"]
    except KeyError as exc:
        raise ParseError(f"matrix is missing key {exc.args[0]!r}") from None
    rows, cols = _int(rows, "rows"), _int(cols, "cols")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"matrix data must hold rows*cols = {rows * cols} entries")
    return np.array([_scalar(z) for z in data], dtype=np.complex128).reshape(rows, cols)


def _family(body):
    if not isinstance(body, dict):
        raise ParseError("family must be an object")
    try:
        n, weights, subs = body["ambient"], body["weights"], body["subspaces"]
    except KeyError as exc:
        raise ParseError(f"family is missing key {exc.args[0]!r}") from None
    n = _int(n, "ambient")
    if not isinstance(weights, list) or not isinstance(subs, list):
        raise ParseError("weights and subspaces must be arrays")
    bases = [_matrix(s) for s in subs]
    if any(b.shape[0] != n for b in bases):
        raise ParseError("subspace basis row count differs from ambient")
    try:
        return WeightedFamily(tuple(Subspace(b) for b in bases), [float(w) for w in weights])
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from None


def parse(text):
    """Inverse of :func:`serialize`; raises :class:`ParseError` with line and column."""
    try:
        # every number as float so that -0 keeps its sign
        doc = json.loads(text, parse_int=float)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    if doc.get("format") != float(FORMAT_VERSION):
        raise ParseError(f"unsupported or missing format version {doc.get('format')!r}")
    kind = doc.get("type")
    if kind == "matrix":
        return _matrix(doc)
    if kind == "family":
        return _family(doc)
    if kind == "pair":
        return _family(doc.get("first")), _family(doc.get("second"))
    if kind == "report":
        return doc.get("report")
    raise ParseError(f"unknown document type {kind!r}")


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def save(x, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(x))
