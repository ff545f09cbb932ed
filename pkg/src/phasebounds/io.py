"""JSON documents for matrices, frames, geodesic paths and reports.

Floats are written with 17 significant digits so doubles survive a round
trip exactly; the writer is deterministic, so equal values give equal text.
"""

import json
import math

import numpy as np

from .frames import make_frame
from .linalg import hermitian_defect


class DocumentError(ValueError):
    pass


def _fmt_float(x):
    if not math.isfinite(x):
        raise DocumentError("non-finite number in document")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent=2, _level=0):
    """Serialize plain JSON data (dict, list, str, int, float, bool, None)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise DocumentError(f"cannot serialize {type(obj).__name__}")


def loads(text):
    def bad_constant(name):
        raise DocumentError(f"non-finite number {name} in document")

    try:
        return json.loads(text, parse_constant=bad_constant)
    except json.JSONDecodeError as e:
        raise DocumentError(f"malformed JSON: {e}") from None


def matrix_to_doc(X, tag=None):
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    if X.ndim != 2 or 0 in X.shape:
        raise DocumentError("matrix must be 2-D and nonempty")
    if not np.all(np.isfinite(X)):
        raise DocumentError("matrix has non-finite entries")
    doc = {
        "rows": int(X.shape[0]),
        "cols": int(X.shape[1]),
        "data": [[float(v.real), float(v.imag)] for v in X.reshape(-1)],
    }
    if tag is not None:
        doc["tag"] = tag
    return doc


def _require(doc, key, kind):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(f"missing field {key!r}")
    val = doc[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise DocumentError(f"field {key!r} must be an integer")
    if kind is list and not isinstance(val, list):
        raise DocumentError(f"field {key!r} must be an array")
    return val


def doc_to_matrix(doc):
    rows = _require(doc, "rows", int)
    cols = _require(doc, "cols", int)
    data = _require(doc, "data", list)
    if rows < 1 or cols < 1:
        raise DocumentError("matrix dimensions must be positive")
    if len(data) != rows * cols:
        raise DocumentError(f"data has {len(data)} entries, expected {rows * cols}")
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise DocumentError("data entries must be [re, im] number pairs") from None
    if arr.shape != (rows * cols, 2):
        raise DocumentError("data entries must be [re, im] number pairs")
    if not np.all(np.isfinite(arr)):
        raise DocumentError("matrix has non-finite entries")
    # viewing the pairs as complex keeps signed zeros intact
    return np.ascontiguousarray(arr).view(complex).reshape(rows, cols)


def frame_to_doc(F):
    return {
        "n": F.dim_n,
        "r": F.target_r,
        "m": F.m,
        "members": [matrix_to_doc(A) for A in F.members],
        "metadata": dict(F.metadata),
    }


def doc_to_frame(doc, tol=1e-10):
    n = _require(doc, "n", int)
    r = _require(doc, "r", int)
    m = _require(doc, "m", int)
    members = _require(doc, "members", list)
    if len(members) != m:
        raise DocumentError(f"frame declares m = {m} but has {len(members)} members")
    mats = []
    for j, md in enumerate(members, start=1):
        A = doc_to_matrix(md)
        if A.shape != (n, n):
            raise DocumentError(f"member {j} has shape {A.shape}, expected ({n}, {n})")
        if hermitian_defect(A) > tol:
            raise DocumentError(f"member {j} is not Hermitian")
        mats.append(A)
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise DocumentError("metadata must be an object")
    try:
        return make_frame(mats, r, meta, tol=tol)
    except ValueError as e:
        raise DocumentError(str(e)) from None


def path_to_doc(path):
    return {
        "x": matrix_to_doc(path.x),
        "y": matrix_to_doc(path.y),
        "aligner": matrix_to_doc(path.aligner),
        "samples": [{"t": t, "rank": P.rank, "matrix": matrix_to_doc(P.matrix)} for t, P in path.samples],
    }


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from None


def write_json(path, obj):
    text = dumps(obj) + "\n"
    if path in (None, "-"):
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
