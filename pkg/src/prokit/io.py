"""Matrix JSON documents.

A document is a JSON object::

    {"schema": "pro-kit/1", "kind": "foster" | "state_space" | "descriptor",
     "m": <ports>, "payload": {...}, "meta": {...}}

Matrices are row-major nested lists. Payload keys per kind:

- ``foster``: ``Q``, ``R``, ``terms`` (list of ``{"omega", "Qj", "Rj"}``)
- ``state_space``: ``M``, ``D``, ``A``, ``B`` (``B`` is n x m)
- ``descriptor``: ``E``, ``A``, ``B``, ``C``, ``D``

Complex numbers (evaluation points and values) are ``{"re", "im"}`` objects.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from prokit.core import DescriptorRealization, FosterForm, FosterTerm, StateSpaceRealization
from prokit.errors import ProError

SCHEMA = "pro-kit/1"
KINDS = ("foster", "state_space", "descriptor")


class DocumentError(ProError):
    """Malformed document: bad JSON, unknown kind or inconsistent shapes."""


@dataclass
class Document:
    kind: str
    m: int
    obj: object
    meta: dict = field(default_factory=dict)


def kind_of(obj):
    if isinstance(obj, FosterForm):
        return "foster"
    if isinstance(obj, StateSpaceRealization):
        return "state_space"
    if isinstance(obj, DescriptorRealization):
        return "descriptor"
    raise DocumentError(f"cannot serialize {type(obj).__name__}")


def _mat(X):
    return np.asarray(X, dtype=float).tolist()


def encode_complex(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def decode_complex(v, where="value"):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        try:
            return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"{where}: bad complex number {v!r}") from exc
    raise DocumentError(f"{where}: expected a number or {{re, im}}, got {v!r}")


def encode_complex_matrix(X):
    return [[encode_complex(x) for x in row] for row in np.asarray(X)]


def payload_of(obj):
    kind = kind_of(obj)
    if kind == "foster":
        return {
            "Q": _mat(obj.Q),
            "R": _mat(obj.R),
            "terms": [
                {"omega": t.omega, "Qj": _mat(t.Qj), "Rj": _mat(t.Rj)} for t in obj.terms
            ],
        }
    if kind == "state_space":
        return {"M": _mat(obj.M), "D": _mat(obj.D), "A": _mat(obj.A), "B": _mat(obj.B)}
    return {
        "E": _mat(obj.E),
        "A": _mat(obj.A),
        "B": _mat(obj.B),
        "C": _mat(obj.C),
        "D": _mat(obj.D),
    }


def to_document(obj, meta=None):
    return {
        "schema": SCHEMA,
        "kind": kind_of(obj),
        "m": int(obj.m),
        "payload": payload_of(obj),
        "meta": dict(meta or {}),
    }


def _format(value, depth=0):
    """JSON text with two-space indentation and each matrix row on one line."""
    pad = "  " * (depth + 1)
    end = "  " * depth
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_format(v, depth + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, list):
        if all(not isinstance(v, (list, dict)) for v in value):
            return json.dumps(value)
        return "[\n" + ",\n".join(pad + _format(v, depth + 1) for v in value) + "\n" + end + "]"
    return json.dumps(value)


def dumps_json(value):
    return _format(value) + "\n"


def dumps(obj, meta=None):
    """Deterministic JSON text for a Foster form or realization."""
    return dumps_json(to_document(obj, meta))


def _field(payload, key, where):
    if key not in payload:
        raise DocumentError(f"{where}: missing field {key!r}")
    return payload[key]


def _array(value, where, cols=None, rows=None):
    try:
        X = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{where}: not a numeric matrix") from exc
    if X.size == 0:
        X = X.reshape(rows or 0, cols or 0)
    if X.ndim != 2:
        raise DocumentError(f"{where}: expected a 2-D matrix, got {X.ndim} dimensions")
    if not np.all(np.isfinite(X)):
        raise DocumentError(f"{where}: non-finite entries")
    return X


def from_document(doc):
    """Build a :class:`Document` from a parsed JSON object."""
    if not isinstance(doc, dict):
        raise DocumentError("document: top level must be an object")
    schema = doc.get("schema")
    if schema != SCHEMA:
        raise DocumentError(f"schema: expected {SCHEMA!r}, got {schema!r}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise DocumentError(f"kind: expected one of {KINDS}, got {kind!r}")
    m = doc.get("m")
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise DocumentError(f"m: expected a nonnegative integer, got {m!r}")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise DocumentError("payload: expected an object")
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise DocumentError("meta: expected an object")
    try:
        if kind == "foster":
            terms = _field(payload, "terms", "payload")
            if not isinstance(terms, list):
                raise DocumentError("payload.terms: expected a list")
            built = []
            for j, t in enumerate(terms):
                where = f"payload.terms[{j}]"
                if not isinstance(t, dict):
                    raise DocumentError(f"{where}: expected an object")
                omega = _field(t, "omega", where)
                if not isinstance(omega, (int, float)) or isinstance(omega, bool):
                    raise DocumentError(f"{where}.omega: expected a number")
                built.append(
                    FosterTerm(
                        omega,
                        _array(_field(t, "Qj", where), where + ".Qj", m, m),
                        _array(_field(t, "Rj", where), where + ".Rj", m, m),
                    )
                )
            obj = FosterForm(
                _array(_field(payload, "Q", "payload"), "payload.Q", m, m),
                _array(_field(payload, "R", "payload"), "payload.R", m, m),
                tuple(built),
            )
        elif kind == "state_space":
            obj = StateSpaceRealization(
                _array(_field(payload, "M", "payload"), "payload.M", m, m),
                _array(_field(payload, "D", "payload"), "payload.D", m, m),
                _array(_field(payload, "A", "payload"), "payload.A"),
                _array(_field(payload, "B", "payload"), "payload.B", m),
            )
        else:
            E = _array(_field(payload, "E", "payload"), "payload.E")
            N = E.shape[0]
            obj = DescriptorRealization(
                E,
                _array(_field(payload, "A", "payload"), "payload.A", N, N),
                _array(_field(payload, "B", "payload"), "payload.B", m, N),
                _array(_field(payload, "C", "payload"), "payload.C", m, N),
                _array(_field(payload, "D", "payload"), "payload.D", m, m),
            )
    except DocumentError:
        raise
    except ProError as exc:
        raise DocumentError(f"payload: {exc}") from exc
    if obj.m != m:
        raise DocumentError(f"m: document declares {m} ports but payload has {obj.m}")
    return Document(kind, m, obj, meta)


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return from_document(doc)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror}") from exc
    return loads(text)
